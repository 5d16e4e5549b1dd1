#pragma once

// Reduced density matrices on constrained subsystems and the entanglement
// diagnostics built from them.

#include "pxp/operators.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace pxp {

inline constexpr double kSpectrumTrim = 1e-14;
inline constexpr double kNegativeEigenvalueTolerance = 1e-12;

/// Descending probabilities, zeros below 1e-14 trimmed.
struct EntanglementSpectrum {
    std::vector<double> probabilities;

    std::size_t size() const noexcept { return probabilities.size(); }
    double sum() const noexcept {
        double s = 0.0;
        for (double p : probabilities) s += p;
        return s;
    }
};

struct ReducedDensity {
    std::vector<Config> region_configs; // row/column labels, ascending
    ComplexMatrix rho;

    double trace() const { return rho.trace().real(); }
};

/// Precomputed placement of every parent configuration in the amplitude
/// matrix M[region, complement] of a cut; reusable across states.
class Bipartition {
public:
    Bipartition(ConstrainedBasis const& basis, CutGeometry const& geometry)
        : region_configs_(geometry.region_basis()) {
        if (basis.boundary() != Boundary::Periodic || basis.length() != geometry.length())
            throw std::invalid_argument("Bipartition: geometry must match a periodic basis");
        std::vector<Config> complement;
        complement.reserve(basis.dim());
        cells_.reserve(basis.dim());
        for (Config c : basis.configs()) {
            auto const split = split_and_check(c, geometry);
            complement.push_back(split.complement);
            auto it = std::lower_bound(region_configs_.begin(), region_configs_.end(), split.region);
            if (it == region_configs_.end() || *it != split.region)
                throw std::logic_error("Bipartition: region part missing from the region basis");
            cells_.push_back({static_cast<std::uint32_t>(it - region_configs_.begin()), 0});
        }
        complement_configs_ = complement;
        std::sort(complement_configs_.begin(), complement_configs_.end());
        complement_configs_.erase(std::unique(complement_configs_.begin(), complement_configs_.end()),
                                  complement_configs_.end());
        for (std::size_t k = 0; k < cells_.size(); ++k) {
            auto it = std::lower_bound(complement_configs_.begin(), complement_configs_.end(), complement[k]);
            cells_[k].second = static_cast<std::uint32_t>(it - complement_configs_.begin());
        }
        parent_dim_ = basis.dim();
    }

    std::size_t rows() const noexcept { return region_configs_.size(); }
    std::size_t cols() const noexcept { return complement_configs_.size(); }
    std::vector<Config> const& region_configs() const noexcept { return region_configs_; }

    template <typename Scalar>
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> amplitude_matrix(
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state) const {
        if (static_cast<std::size_t>(state.size()) != parent_dim_)
            throw std::invalid_argument("Bipartition: state dimension mismatch");
        Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> m =
            Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>::Zero(static_cast<Eigen::Index>(rows()),
                                                                         static_cast<Eigen::Index>(cols()));
        for (std::size_t k = 0; k < cells_.size(); ++k) m(cells_[k].first, cells_[k].second) = state[static_cast<Eigen::Index>(k)];
        return m;
    }

private:
    std::vector<Config> region_configs_;
    std::vector<Config> complement_configs_;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> cells_;
    std::size_t parent_dim_ = 0;
};

namespace detail {

inline EntanglementSpectrum spectrum_from_eigenvalues(Eigen::VectorXd const& values) {
    EntanglementSpectrum spec;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        double p = values[i];
        if (p < -kNegativeEigenvalueTolerance)
            throw std::runtime_error("reduced density matrix has a negative eigenvalue " + std::to_string(p));
        if (p >= kSpectrumTrim) spec.probabilities.push_back(p);
    }
    std::sort(spec.probabilities.begin(), spec.probabilities.end(), std::greater<>());
    return spec;
}

template <typename Derived>
Eigen::VectorXd hermitian_eigenvalues(Eigen::MatrixBase<Derived> const& gram) {
    using Matrix = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    Eigen::SelfAdjointEigenSolver<Matrix> solver(Matrix(gram), Eigen::EigenvaluesOnly);
    return solver.eigenvalues();
}

} // namespace detail

template <typename Scalar>
ReducedDensity reduced_density(Bipartition const& cut, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state) {
    auto const m = cut.amplitude_matrix(state);
    ReducedDensity out;
    out.region_configs = cut.region_configs();
    out.rho = (m * m.adjoint()).template cast<Complex>();
    return out;
}

/// rho_A = tr_complement |psi><psi| for a state on the periodic basis.
template <typename Scalar>
ReducedDensity reduced_density(ConstrainedBasis const& basis, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state,
                               CutGeometry const& geometry) {
    return reduced_density(Bipartition(basis, geometry), state);
}

inline EntanglementSpectrum entanglement_spectrum(ReducedDensity const& rho) {
    return detail::spectrum_from_eigenvalues(detail::hermitian_eigenvalues(rho.rho));
}

/// Spectrum from the smaller of M M^dagger and M^dagger M.
template <typename Scalar>
EntanglementSpectrum entanglement_spectrum(Bipartition const& cut, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state) {
    auto const m = cut.amplitude_matrix(state);
    if (m.rows() <= m.cols()) return detail::spectrum_from_eigenvalues(detail::hermitian_eigenvalues(m * m.adjoint()));
    return detail::spectrum_from_eigenvalues(detail::hermitian_eigenvalues(m.adjoint() * m));
}

template <typename Scalar>
EntanglementSpectrum entanglement_spectrum(ConstrainedBasis const& basis, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state,
                                           CutGeometry const& geometry) {
    return entanglement_spectrum(Bipartition(basis, geometry), state);
}

/// Von Neumann entropy in nats, 0 ln 0 = 0.
inline double entropy(EntanglementSpectrum const& spec) {
    double s = 0.0;
    for (double p : spec.probabilities)
        if (p > 0.0) s -= p * std::log(p);
    return s;
}

template <typename Scalar>
double region_entropy(ConstrainedBasis const& basis, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state,
                      std::vector<Interval> region) {
    return entropy(entanglement_spectrum(basis, state, CutGeometry(basis.length(), std::move(region))));
}

/// I(A:C) = S(A) + S(C) - S(AC).
template <typename Scalar>
double mutual_information(ConstrainedBasis const& basis, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state,
                          Interval a, Interval c) {
    return region_entropy(basis, state, {a}) + region_entropy(basis, state, {c}) - region_entropy(basis, state, {a, c});
}

/// I(A:B:C) from the seven-entropy combination.
template <typename Scalar>
double tripartite_mi(ConstrainedBasis const& basis, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state, Interval a,
                     Interval b, Interval c) {
    double const sa = region_entropy(basis, state, {a});
    double const sb = region_entropy(basis, state, {b});
    double const sc = region_entropy(basis, state, {c});
    double const sab = region_entropy(basis, state, {a, b});
    double const sbc = region_entropy(basis, state, {b, c});
    double const sac = region_entropy(basis, state, {a, c});
    double const sabc = region_entropy(basis, state, {a, b, c});
    return sa + sb + sc - sab - sbc - sac + sabc;
}

/// Default four-way split: A, B, C are the first three quarters.
template <typename Scalar>
double tripartite_mi(ConstrainedBasis const& basis, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state) {
    int const L = basis.length();
    return tripartite_mi(basis, state, CutGeometry::quarter(L, 0), CutGeometry::quarter(L, 1), CutGeometry::quarter(L, 2));
}

/// f_Q = (<O^2> - <O>^2) / L for the staggered magnetization O.
template <typename Scalar>
double qfi_density(ConstrainedBasis const& basis, Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& state) {
    auto const o = staggered_z(basis);
    Eigen::VectorXd const weights = state.cwiseAbs2();
    double const norm = weights.sum();
    double const mean = weights.dot(o.values) / norm;
    double const second = weights.dot(o.values.cwiseAbs2()) / norm;
    return (second - mean * mean) / basis.length();
}

} // namespace pxp
