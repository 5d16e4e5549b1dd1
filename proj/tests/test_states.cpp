#include "pxp/entanglement.hpp"
#include "pxp/states.hpp"

#include <gtest/gtest.h>

using namespace pxp;

namespace {

// exp(-i theta Y / 2) on every site of |Z2> in the full 2^L space, then the
// blockade projection. Returns the unnormalized legal amplitudes.
RealVector full_space_rotation(ConstrainedBasis const& basis, double theta) {
    int const L = basis.length();
    double const c = std::cos(theta / 2), s = std::sin(theta / 2);
    // R|0> = c|0> + s|1>, R|1> = -s|0> + c|1>
    Eigen::VectorXd full = Eigen::VectorXd::Ones(1);
    for (int b = 0; b < L; ++b) { // the last site added is the top bit
        bool const occupied = (b % 2 == 0);
        Eigen::Vector2d site = occupied ? Eigen::Vector2d(-s, c) : Eigen::Vector2d(c, s);
        Eigen::VectorXd next(full.size() * 2);
        next.head(full.size()) = site[0] * full;
        next.tail(full.size()) = site[1] * full;
        full = next;
    }
    RealVector out(static_cast<Eigen::Index>(basis.dim()));
    for (std::size_t k = 0; k < basis.dim(); ++k) out[static_cast<Eigen::Index>(k)] = full[static_cast<Eigen::Index>(basis.config(k))];
    return out;
}

} // namespace

TEST(States, Z2) {
    auto const basis = build_chain_basis(4, Boundary::Periodic);
    auto const z2 = z2_state(basis);
    EXPECT_EQ(z2[static_cast<Eigen::Index>(basis.index_of(0b0101))], Complex(1.0));
    EXPECT_EQ(z2.norm(), 1.0);
    auto const b8 = build_chain_basis(8, Boundary::Periodic);
    auto const v = z2_state(b8);
    EXPECT_EQ(expectation(pxp_hamiltonian(b8), v), 0.0);
    EXPECT_EQ(expectation(staggered_z(b8), v), -8.0);
    EXPECT_THROW(z2_state(build_chain_basis(5, Boundary::Periodic)), std::invalid_argument);
}

TEST(States, Interpolate) {
    RealVector const a = RealVector::Unit(4, 0), b = RealVector::Unit(4, 1);
    EXPECT_EQ(interpolate(a, b, 1.0), a);
    EXPECT_EQ(interpolate(a, b, 0.0), b);
    auto const half = interpolate(a, b, 0.5);
    EXPECT_NEAR(half[0], 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(half[1], 1 / std::sqrt(2.0), 1e-15);
    EXPECT_NEAR(interpolate(a, b, 0.3).norm(), 1.0, 1e-15);
    EXPECT_THROW(interpolate(a, b, 1.1), std::invalid_argument);
    EXPECT_THROW(interpolate(a, b, -0.1), std::invalid_argument);
}

TEST(States, RotationAngle) {
    EXPECT_THROW(RotationAngle(2.0), std::invalid_argument);
    EXPECT_THROW(RotationAngle(-0.1), std::invalid_argument);
    EXPECT_NEAR(RotationAngle::fold(std::numbers::pi - 0.3).value(), 0.3, 1e-15);
    EXPECT_NEAR(RotationAngle::fold(-0.3).value(), 0.3, 1e-15);
    EXPECT_NEAR(RotationAngle::fold(2 * std::numbers::pi - 0.3).value(), 0.3, 1e-14);
}

TEST(States, RotatedStateMatchesFullSpace) {
    for (int L : {4, 6, 8, 10}) {
        auto const basis = build_chain_basis(L, Boundary::Periodic);
        for (double theta : {0.0, 0.4, std::numbers::pi / 4, std::numbers::pi / 2, 2.5}) {
            RealVector const raw = full_space_rotation(basis, theta);
            auto const r = rotated_state(basis, theta);
            EXPECT_NEAR(r.survival, raw.squaredNorm(), 1e-12);
            EXPECT_LT((r.state.real() - raw / raw.norm()).cwiseAbs().maxCoeff(), 1e-12);
            EXPECT_LT(r.state.imag().cwiseAbs().maxCoeff(), 1e-15);
        }
    }
}

TEST(States, RotatedStateLimits) {
    auto const basis = build_chain_basis(8, Boundary::Periodic);
    auto const r0 = rotated_state(basis, 0.0);
    EXPECT_EQ(r0.survival, 1.0);
    EXPECT_NEAR((r0.state - z2_state(basis)).norm(), 0.0, 1e-15);
    for (double theta : {0.1, 0.8, std::numbers::pi / 2}) EXPECT_LT(rotated_state(basis, theta).survival, 1.0);
}

TEST(States, SublatticeSwapIsOneSiteTranslation) {
    int const L = 10;
    for (Config c : build_chain_basis(L, Boundary::Periodic).configs())
        EXPECT_EQ(detail::rotated_amplitude(c, L, 0.7, false), detail::rotated_amplitude(translate(c, L), L, 0.7, true));
}

TEST(States, SectorStateAgreesWithProjection) {
    for (int L : {8, 12}) {
        auto const sector = build_symmetric_sector(L, Momentum::Zero, 1);
        for (double theta : {0.0, 0.5, std::numbers::pi / 2}) {
            auto const v = rotated_state_sector(sector, theta);
            EXPECT_NEAR(v.norm(), 1.0, 1e-12);
            ComplexVector proj = project_to_sector(sector, rotated_state(sector.parent(), theta).state);
            proj /= proj.norm();
            EXPECT_GT(std::norm(proj.dot(v)), 1 - 1e-10);
        }
    }
    EXPECT_THROW(rotated_state_sector(build_symmetric_sector(8, Momentum::Pi, 1), 0.3), std::invalid_argument);
}

TEST(States, SectorStateAtZeroIsCatState) {
    auto const sector = build_symmetric_sector(8, Momentum::Zero, 1);
    auto const full = expand_sector_state(sector, rotated_state_sector(sector, 0.0));
    auto const& basis = sector.parent();
    EXPECT_NEAR(full[static_cast<Eigen::Index>(basis.index_of(0b01010101))].real(), 1 / std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(full[static_cast<Eigen::Index>(basis.index_of(0b10101010))].real(), 1 / std::sqrt(2.0), 1e-14);
}

TEST(States, ExpandProjectIsometry) {
    auto const sector = build_symmetric_sector(10, Momentum::Zero, 1);
    auto const& basis = sector.parent();
    ComplexVector v = ComplexVector::Random(static_cast<Eigen::Index>(sector.dim()));
    v /= v.norm();
    auto const full = expand_sector_state(sector, v);
    EXPECT_NEAR(full.norm(), 1.0, 1e-12);
    EXPECT_LT((project_to_sector(sector, full) - v).norm(), 1e-12);
    EXPECT_LT((pxp::apply(translation_operator(basis), full) - full).norm(), 1e-10);
    EXPECT_LT((pxp::apply(inversion_operator(basis), full) - full).norm(), 1e-10);
    auto const hs = pxp_sector_hamiltonian(sector);
    EXPECT_NEAR(expectation(pxp_hamiltonian(basis), full), expectation(hs, v), 1e-10);
}

TEST(States, AngleSymmetryOfEntanglementSpectrum) {
    auto const basis = build_chain_basis(16, Boundary::Periodic);
    Bipartition const cut(basis, CutGeometry::half_chain(16));
    for (double theta : {0.3, 0.9, 1.3}) {
        auto const a = entanglement_spectrum(cut, rotated_state(basis, theta).state).probabilities;
        auto const b = entanglement_spectrum(cut, rotated_state(basis, std::numbers::pi - theta).state).probabilities;
        ASSERT_EQ(a.size(), b.size());
        for (std::size_t k = 0; k < a.size(); ++k) EXPECT_NEAR(a[k], b[k], 1e-8);
    }
}
