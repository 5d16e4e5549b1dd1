#include "pxp/operators.hpp"

#include <gtest/gtest.h>

using namespace pxp;

namespace {

// Full 2^L matrix of sum_i P_{i-1} X_i P_{i+1}, P = |0><0|, built from
// Kronecker products site by site.
RealMatrix full_space_pxp(int L, bool periodic) {
    Eigen::Matrix2d const X{{0, 1}, {1, 0}};
    Eigen::Matrix2d const P{{1, 0}, {0, 0}};
    Eigen::Matrix2d const I = Eigen::Matrix2d::Identity();
    auto const dim = Eigen::Index{1} << L;
    RealMatrix h = RealMatrix::Zero(dim, dim);
    for (int i = 0; i < L; ++i) {
        // site b occupies bit b, so the Kronecker order runs from bit L-1 down to bit 0
        RealMatrix term = RealMatrix::Ones(1, 1);
        for (int b = L - 1; b >= 0; --b) {
            Eigen::Matrix2d op = I;
            if (b == i) op = X;
            bool const left = (b == i - 1) || (periodic && i == 0 && b == L - 1);
            bool const right = (b == i + 1) || (periodic && i == L - 1 && b == 0);
            if (left || right) op = P;
            RealMatrix next(term.rows() * 2, term.cols() * 2);
            for (int r = 0; r < 2; ++r)
                for (int c = 0; c < 2; ++c) next.block(r * term.rows(), c * term.cols(), term.rows(), term.cols()) = op(r, c) * term;
            term = next;
        }
        h += term;
    }
    return h;
}

RealMatrix restrict_to(RealMatrix const& full, ConstrainedBasis const& basis) {
    auto const n = static_cast<Eigen::Index>(basis.dim());
    RealMatrix out(n, n);
    for (Eigen::Index r = 0; r < n; ++r)
        for (Eigen::Index c = 0; c < n; ++c)
            out(r, c) = full(static_cast<Eigen::Index>(basis.config(static_cast<std::size_t>(r))),
                             static_cast<Eigen::Index>(basis.config(static_cast<std::size_t>(c))));
    return out;
}

} // namespace

TEST(Operators, PxpMatchesFullSpaceConstruction) {
    for (int L = 3; L <= 10; ++L) {
        auto const basis = build_chain_basis(L, Boundary::Periodic);
        RealMatrix const expected = restrict_to(full_space_pxp(L, true), basis);
        EXPECT_LT((pxp_hamiltonian(basis).dense() - expected).cwiseAbs().maxCoeff(), 1e-12) << "L = " << L;
    }
}

TEST(Operators, SubsystemMatchesOpenFullSpace) {
    for (int l = 2; l <= 8; ++l) {
        auto const basis = build_chain_basis(l, Boundary::Open);
        RealMatrix const expected = restrict_to(full_space_pxp(l, false), basis);
        EXPECT_LT((subsystem_hamiltonian(l).dense() - expected).cwiseAbs().maxCoeff(), 1e-12) << "l = " << l;
    }
    EXPECT_THROW(subsystem_hamiltonian(1), std::invalid_argument);
}

TEST(Operators, L4Matrix) {
    auto const basis = build_chain_basis(4, Boundary::Periodic);
    auto const h = pxp_hamiltonian(basis);
    // |0000> connects to each of the four singly-occupied states
    EXPECT_EQ(h.matrix.row(static_cast<Eigen::Index>(basis.index_of(0))).nonZeros(), 4);
    EXPECT_TRUE(h.hermitian);
    EXPECT_EQ(hermiticity_defect(h), 0.0);
    EXPECT_THROW(pxp_hamiltonian(build_chain_basis(4, Boundary::Open)), std::invalid_argument);
}

TEST(Operators, SymmetriesOfH) {
    for (int L : {6, 8, 10}) {
        auto const basis = build_chain_basis(L, Boundary::Periodic);
        RealMatrix const h = pxp_hamiltonian(basis).dense();
        RealMatrix const t = translation_operator(basis).dense();
        RealMatrix const inv = inversion_operator(basis).dense();
        RealMatrix const c = particle_hole(basis).values.asDiagonal();
        EXPECT_LT((h * t - t * h).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((h * inv - inv * h).cwiseAbs().maxCoeff(), 1e-12);
        EXPECT_LT((c * h * c + h).cwiseAbs().maxCoeff(), 1e-12);
    }
}

TEST(Operators, FsaGeneratorsSumToH) {
    auto const basis = build_chain_basis(10, Boundary::Periodic);
    auto const [plus, minus] = fsa_raising(basis);
    RealMatrix const h = pxp_hamiltonian(basis).dense();
    EXPECT_LT((plus.dense() + minus.dense() - h).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((minus.dense() - plus.dense().transpose()).cwiseAbs().maxCoeff(), 1e-12);
    // H+ annihilates the fully reversed pattern |0101...>
    RealVector anti = RealVector::Zero(static_cast<Eigen::Index>(basis.dim()));
    anti[static_cast<Eigen::Index>(basis.index_of(0b1010101010))] = 1.0;
    EXPECT_EQ(pxp::apply(plus, anti).norm(), 0.0);
}

TEST(Operators, StaggeredMagnetization) {
    auto const basis = build_chain_basis(8, Boundary::Periodic);
    auto const o = staggered_z(basis);
    EXPECT_EQ(o.values[static_cast<Eigen::Index>(basis.index_of(0b01010101))], -8.0);
    EXPECT_EQ(o.values[static_cast<Eigen::Index>(basis.index_of(0b10101010))], 8.0);
    EXPECT_EQ(o.values[static_cast<Eigen::Index>(basis.index_of(0))], 0.0);
}

TEST(Operators, SectorHamiltonianMatchesProjection) {
    for (int L : {8, 10, 12}) {
        auto const basis = build_chain_basis(L, Boundary::Periodic);
        auto const h = pxp_hamiltonian(basis);
        for (auto k : {Momentum::Zero, Momentum::Pi}) {
            for (int inv : {1, -1}) {
                auto const s = build_symmetric_sector(L, k, inv);
                if (s.dim() == 0) continue;
                RealMatrix v = RealMatrix::Zero(static_cast<Eigen::Index>(basis.dim()), static_cast<Eigen::Index>(s.dim()));
                for (std::size_t a = 0; a < s.dim(); ++a)
                    for (auto const& e : s.vector(a)) v(e.parent, static_cast<Eigen::Index>(a)) = e.amplitude;
                RealMatrix const expected = v.transpose() * h.dense() * v;
                auto const hs = pxp_sector_hamiltonian(s);
                EXPECT_LT((hs.dense() - expected).cwiseAbs().maxCoeff(), 1e-12);
                EXPECT_LT(hermiticity_defect(hs), 1e-14);
            }
        }
    }
}

TEST(Operators, ApplyChecksDimensions) {
    auto const h = pxp_hamiltonian(build_chain_basis(6, Boundary::Periodic));
    RealVector wrong = RealVector::Ones(3);
    EXPECT_THROW(pxp::apply(h, wrong), std::invalid_argument);
    ComplexVector v = ComplexVector::Ones(static_cast<Eigen::Index>(h.dim())) / std::sqrt(double(h.dim()));
    EXPECT_NEAR(expectation(h, v), (RealVector::Ones(h.dim()).transpose() * h.dense() * RealVector::Ones(h.dim()))(0) / h.dim(), 1e-12);
}
