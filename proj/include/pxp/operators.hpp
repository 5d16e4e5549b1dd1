#pragma once

// Hamiltonians and observables as sparse operators on constrained bases.

#include "pxp/hilbert.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <complex>
#include <stdexcept>
#include <utility>
#include <vector>

namespace pxp {

using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

/// Real operator in row-ordered compressed form.
struct SparseOperator {
    Eigen::SparseMatrix<double, Eigen::RowMajor> matrix;
    bool hermitian = false;

    std::size_t dim() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
    RealMatrix dense() const { return RealMatrix(matrix); }
};

struct DiagonalOperator {
    RealVector values;
    std::size_t dim() const noexcept { return static_cast<std::size_t>(values.size()); }
};

namespace detail {

inline SparseOperator from_triplets(std::size_t dim, std::vector<Eigen::Triplet<double>> const& triplets,
                                    bool hermitian) {
    SparseOperator op;
    op.matrix.resize(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
    op.matrix.setFromTriplets(triplets.begin(), triplets.end(), [](double, double) -> double {
        throw std::logic_error("duplicate (row, col) entry in sparse operator");
    });
    op.matrix.makeCompressed();
    op.hermitian = hermitian;
    return op;
}

// Both neighbours of `site` empty; on a ring of length 2 the neighbour is
// counted once and on a single site there is none.
inline bool neighbours_empty(Config c, int site, int length, Boundary boundary) noexcept {
    if (boundary == Boundary::Periodic) {
        if (length == 1) return true;
        int const left = (site + length - 1) % length;
        int const right = (site + 1) % length;
        return !bit(c, left) && !bit(c, right);
    }
    if (site > 0 && bit(c, site - 1)) return false;
    if (site + 1 < length && bit(c, site + 1)) return false;
    return true;
}

} // namespace detail

/// H = sum_i P_{i-1} X_i P_{i+1} with periodic boundary conditions.
inline SparseOperator pxp_hamiltonian(ConstrainedBasis const& basis) {
    if (basis.boundary() != Boundary::Periodic)
        throw std::invalid_argument("pxp_hamiltonian: periodic basis required");
    int const L = basis.length();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(basis.dim() * static_cast<std::size_t>(L) / 2);
    for (std::size_t col = 0; col < basis.dim(); ++col) {
        Config const c = basis.config(col);
        for (int i = 0; i < L; ++i) {
            if (!detail::neighbours_empty(c, i, L, Boundary::Periodic)) continue;
            Config const flipped = c ^ (Config{1} << i);
            triplets.emplace_back(static_cast<int>(basis.index_of(flipped)), static_cast<int>(col), 1.0);
        }
    }
    return detail::from_triplets(basis.dim(), triplets, true);
}

/// Open-chain PXP on l sites with bare edge flips:
/// H_A = X_1 P_2 + sum_{i=2}^{l-1} P_{i-1} X_i P_{i+1} + P_{l-1} X_l.
inline SparseOperator subsystem_hamiltonian(int l) {
    if (l < 2) throw std::invalid_argument("subsystem_hamiltonian: l must be >= 2");
    ConstrainedBasis const basis(l, Boundary::Open);
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t col = 0; col < basis.dim(); ++col) {
        Config const c = basis.config(col);
        for (int i = 0; i < l; ++i) {
            if (!detail::neighbours_empty(c, i, l, Boundary::Open)) continue;
            triplets.emplace_back(static_cast<int>(basis.index_of(c ^ (Config{1} << i))), static_cast<int>(col), 1.0);
        }
    }
    return detail::from_triplets(basis.dim(), triplets, true);
}

/// Forward-scattering generators anchored to |Z2> = |1010...> (1s on odd
/// sites): H+ raises even sites and lowers odd sites, H- = (H+)^T.
inline std::pair<SparseOperator, SparseOperator> fsa_raising(ConstrainedBasis const& basis) {
    int const L = basis.length();
    if (basis.boundary() != Boundary::Periodic || L % 2 != 0)
        throw std::invalid_argument("fsa_raising: periodic basis with even L required");
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t col = 0; col < basis.dim(); ++col) {
        Config const c = basis.config(col);
        for (int i = 0; i < L; ++i) {
            if (!detail::neighbours_empty(c, i, L, Boundary::Periodic)) continue;
            bool const odd_site = (i % 2 == 0); // 1-indexed site i + 1
            bool const occupied = bit(c, i);
            if (odd_site == occupied) // lower on odd sites, raise on even sites
                triplets.emplace_back(static_cast<int>(basis.index_of(c ^ (Config{1} << i))), static_cast<int>(col), 1.0);
        }
    }
    SparseOperator plus = detail::from_triplets(basis.dim(), triplets, false);
    SparseOperator minus;
    minus.matrix = plus.matrix.transpose();
    minus.matrix.makeCompressed();
    return {std::move(plus), std::move(minus)};
}

/// O = sum_i (-1)^{i+1} Z_i with Z = +1 on an empty site.
inline DiagonalOperator staggered_z(ConstrainedBasis const& basis) {
    DiagonalOperator op;
    op.values.resize(static_cast<Eigen::Index>(basis.dim()));
    int const L = basis.length();
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        Config const c = basis.config(k);
        double sum = 0.0;
        for (int b = 0; b < L; ++b) {
            double const z = bit(c, b) ? -1.0 : 1.0;
            sum += (b % 2 == 0) ? z : -z;
        }
        op.values[static_cast<Eigen::Index>(k)] = sum;
    }
    return op;
}

/// prod_i Z_i restricted to the constrained basis; anticommutes with H.
inline DiagonalOperator particle_hole(ConstrainedBasis const& basis) {
    DiagonalOperator op;
    op.values.resize(static_cast<Eigen::Index>(basis.dim()));
    for (std::size_t k = 0; k < basis.dim(); ++k)
        op.values[static_cast<Eigen::Index>(k)] = (std::popcount(basis.config(k)) % 2 == 0) ? 1.0 : -1.0;
    return op;
}

/// Permutation matrix of the one-site translation on a periodic basis.
inline SparseOperator translation_operator(ConstrainedBasis const& basis) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t col = 0; col < basis.dim(); ++col)
        triplets.emplace_back(static_cast<int>(basis.index_of(translate(basis.config(col), basis.length()))),
                              static_cast<int>(col), 1.0);
    return detail::from_triplets(basis.dim(), triplets, false);
}

inline SparseOperator inversion_operator(ConstrainedBasis const& basis) {
    std::vector<Eigen::Triplet<double>> triplets;
    for (std::size_t col = 0; col < basis.dim(); ++col)
        triplets.emplace_back(static_cast<int>(basis.index_of(invert(basis.config(col), basis.length()))),
                              static_cast<int>(col), 1.0);
    return detail::from_triplets(basis.dim(), triplets, true);
}

/// H restricted to a symmetry sector: H_ab = <v_a|H|v_b>.
inline SparseOperator pxp_sector_hamiltonian(SectorBasis const& sector) {
    auto const& parent = sector.parent();
    int const L = parent.length();
    std::vector<Eigen::Triplet<double>> triplets;
    std::vector<double> row(sector.dim(), 0.0);
    std::vector<char> seen(sector.dim(), 0);
    std::vector<std::uint32_t> touched;
    for (std::size_t b = 0; b < sector.dim(); ++b) {
        // (H v_b) projected on every v_a sharing support with it
        for (auto const& e : sector.vector(b)) {
            Config const c = parent.config(e.parent);
            for (int i = 0; i < L; ++i) {
                if (!detail::neighbours_empty(c, i, L, Boundary::Periodic)) continue;
                std::size_t const target = parent.index_of(c ^ (Config{1} << i));
                for (auto const& [a, amp] : sector.members_at(target)) {
                    if (!seen[a]) {
                        seen[a] = 1;
                        touched.push_back(a);
                    }
                    row[a] += amp * e.amplitude;
                }
            }
        }
        std::sort(touched.begin(), touched.end());
        for (auto a : touched) {
            if (std::abs(row[a]) > 1e-14)
                triplets.emplace_back(static_cast<int>(a), static_cast<int>(b), row[a]);
            row[a] = 0.0;
            seen[a] = 0;
        }
        touched.clear();
    }
    return detail::from_triplets(sector.dim(), triplets, true);
}

/// Exact sparse matrix-vector product.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(SparseOperator const& op,
                                               Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& v) {
    if (static_cast<std::size_t>(v.size()) != op.dim())
        throw std::invalid_argument("apply: dimension mismatch");
    auto const& m = op.matrix;
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(v.size());
    for (Eigen::Index r = 0; r < m.outerSize(); ++r) {
        Scalar acc{0};
        for (typename Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(m, r); it; ++it)
            acc += it.value() * v[it.col()];
        out[r] = acc;
    }
    return out;
}

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(DiagonalOperator const& op,
                                               Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& v) {
    if (static_cast<std::size_t>(v.size()) != op.dim())
        throw std::invalid_argument("apply: dimension mismatch");
    return op.values.cast<Scalar>().cwiseProduct(v);
}

/// <v|H|v> for a normalized v.
template <typename Scalar>
double expectation(SparseOperator const& op, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& v) {
    return std::real(v.dot(pxp::apply(op, v)));
}

template <typename Scalar>
double expectation(DiagonalOperator const& op, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& v) {
    if (static_cast<std::size_t>(v.size()) != op.dim()) throw std::invalid_argument("expectation: dimension mismatch");
    return v.cwiseAbs2().dot(op.values);
}

/// max |M - M^T| over stored entries.
inline double hermiticity_defect(SparseOperator const& op) {
    Eigen::SparseMatrix<double, Eigen::RowMajor> diff = op.matrix - Eigen::SparseMatrix<double, Eigen::RowMajor>(op.matrix.transpose());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < diff.nonZeros(); ++k) worst = std::max(worst, std::abs(diff.valuePtr()[k]));
    return worst;
}

} // namespace pxp
