#include "pxp/entanglement.hpp"
#include "pxp/scars.hpp"
#include "pxp/states.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace pxp;

namespace {

ComplexVector random_state(std::size_t dim, unsigned seed) {
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    ComplexVector v(static_cast<Eigen::Index>(dim));
    for (auto& x : v) x = {g(rng), g(rng)};
    return v / v.norm();
}

// Partial trace in the embedded 2^L space over every site outside `region`.
// Rows and columns are packed region bitmasks (region sites in increasing order).
ComplexMatrix full_space_partial_trace(ConstrainedBasis const& basis, ComplexVector const& psi, std::vector<int> const& region) {
    int const L = basis.length();
    std::vector<int> rest;
    for (int s = 0; s < L; ++s)
        if (std::find(region.begin(), region.end(), s) == region.end()) rest.push_back(s);
    auto pack = [](Config c, std::vector<int> const& sites) {
        Config out = 0;
        for (std::size_t j = 0; j < sites.size(); ++j) out |= ((c >> sites[j]) & 1) << j;
        return out;
    };
    auto const na = Eigen::Index{1} << region.size();
    auto const nb = Eigen::Index{1} << rest.size();
    ComplexMatrix m = ComplexMatrix::Zero(na, nb);
    for (std::size_t k = 0; k < basis.dim(); ++k) {
        Config const c = basis.config(k);
        m(static_cast<Eigen::Index>(pack(c, region)), static_cast<Eigen::Index>(pack(c, rest))) = psi[static_cast<Eigen::Index>(k)];
    }
    return m * m.adjoint();
}

} // namespace

TEST(Entanglement, ReducedDensityMatchesFullSpacePartialTrace) {
    for (int L : {6, 8, 10}) {
        auto const basis = build_chain_basis(L, Boundary::Periodic);
        auto const psi = random_state(basis.dim(), 7u + static_cast<unsigned>(L));
        for (auto const& intervals : {std::vector<Interval>{{0, L / 2}}, std::vector<Interval>{{1, 3}, {L / 2, L / 2 + 2}}}) {
            CutGeometry const g(L, intervals);
            auto const rho = reduced_density(basis, psi, g);
            std::vector<int> sites(g.region_sites().begin(), g.region_sites().end());
            ComplexMatrix const full = full_space_partial_trace(basis, psi, sites);
            // legal region configurations pick out the nonzero block
            double worst = 0.0;
            for (std::size_t r = 0; r < rho.region_configs.size(); ++r)
                for (std::size_t c = 0; c < rho.region_configs.size(); ++c)
                    worst = std::max(worst, std::abs(rho.rho(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) -
                                                     full(static_cast<Eigen::Index>(rho.region_configs[r]),
                                                          static_cast<Eigen::Index>(rho.region_configs[c]))));
            EXPECT_LT(worst, 1e-12);
            EXPECT_NEAR(full.trace().real(), rho.trace(), 1e-12);
        }
    }
}

TEST(Entanglement, Z2HalfCutIsPure) {
    auto const basis = build_chain_basis(4, Boundary::Periodic);
    auto const rho = reduced_density(basis, z2_state(basis), CutGeometry::half_chain(4));
    ASSERT_EQ(rho.region_configs.size(), 3u);
    auto const idx = std::find(rho.region_configs.begin(), rho.region_configs.end(), Config{0b01}) - rho.region_configs.begin();
    EXPECT_EQ(rho.rho(idx, idx), Complex(1.0));
    EXPECT_NEAR(rho.rho.cwiseAbs().sum(), 1.0, 1e-15);
    EXPECT_EQ(entropy(entanglement_spectrum(rho)), 0.0);
}

TEST(Entanglement, SpectrumProperties) {
    auto const basis = build_chain_basis(12, Boundary::Periodic);
    auto const psi = random_state(basis.dim(), 3);
    Bipartition const cut(basis, CutGeometry::half_chain(12));
    auto const from_rho = entanglement_spectrum(reduced_density(cut, psi));
    auto const from_m = entanglement_spectrum(cut, psi);
    EXPECT_NEAR(from_rho.sum(), 1.0, 1e-10);
    ASSERT_EQ(from_rho.size(), from_m.size());
    for (std::size_t k = 0; k < from_m.size(); ++k) EXPECT_NEAR(from_rho.probabilities[k], from_m.probabilities[k], 1e-12);
    EXPECT_TRUE(std::is_sorted(from_m.probabilities.begin(), from_m.probabilities.end(), std::greater<>()));
    for (double p : from_m.probabilities) EXPECT_GE(p, kSpectrumTrim);
}

TEST(Entanglement, EntropyOfUniformAndPure) {
    EntanglementSpectrum uniform;
    uniform.probabilities.assign(8, 0.125);
    EXPECT_NEAR(entropy(uniform), std::log(8.0), 1e-15);
    EXPECT_EQ(entropy(EntanglementSpectrum{{1.0}}), 0.0);
}

TEST(Entanglement, NegativeEigenvaluesAreRejected) {
    ReducedDensity bad;
    bad.region_configs = {0, 1};
    bad.rho = ComplexMatrix{{1.0 + 1e-6, 0.0}, {0.0, -1e-6}};
    EXPECT_THROW(entanglement_spectrum(bad), std::runtime_error);
}

TEST(Entanglement, ComplementEntropyEqualsRegionEntropy) {
    int const L = 10;
    auto const basis = build_chain_basis(L, Boundary::Periodic);
    auto const psi = random_state(basis.dim(), 11);
    std::vector<std::pair<std::vector<Interval>, std::vector<Interval>>> const cases{
        {{{0, 5}}, {{5, 10}}},
        {{{0, 3}}, {{3, 10}}},
        {{{1, 3}, {6, 8}}, {{0, 1}, {3, 6}, {8, 10}}},
    };
    for (auto const& [a, b] : cases) EXPECT_NEAR(region_entropy(basis, psi, a), region_entropy(basis, psi, b), 1e-9);
}

TEST(Entanglement, MutualInformation) {
    int const L = 12;
    auto const basis = build_chain_basis(L, Boundary::Periodic);
    auto const z2 = z2_state(basis);
    EXPECT_NEAR(mutual_information(basis, z2, {0, 3}, {6, 9}), 0.0, 1e-14);
    EXPECT_NEAR(tripartite_mi(basis, z2), 0.0, 1e-14);
    for (unsigned seed = 0; seed < 5; ++seed)
        EXPECT_GE(mutual_information(basis, random_state(basis.dim(), seed), {0, 3}, {6, 9}), -1e-9);
}

TEST(Entanglement, TripartiteMatchesPurityIdentity) {
    int const L = 12;
    auto const basis = build_chain_basis(L, Boundary::Periodic);
    auto const psi = random_state(basis.dim(), 5);
    auto const a = CutGeometry::quarter(L, 0), b = CutGeometry::quarter(L, 1), c = CutGeometry::quarter(L, 2),
               d = CutGeometry::quarter(L, 3);
    // S(ABC) = S(D) for a pure global state
    EXPECT_NEAR(region_entropy(basis, psi, {a, b, c}), region_entropy(basis, psi, {d}), 1e-9);
    double const i3 = tripartite_mi(basis, psi);
    double const by_purity = region_entropy(basis, psi, {a}) + region_entropy(basis, psi, {b}) +
                             region_entropy(basis, psi, {c}) - region_entropy(basis, psi, {a, b}) -
                             region_entropy(basis, psi, {b, c}) - region_entropy(basis, psi, {a, c}) +
                             region_entropy(basis, psi, {d});
    EXPECT_NEAR(i3, by_purity, 1e-9);
}

TEST(Entanglement, QfiDensity) {
    int const L = 10;
    auto const basis = build_chain_basis(L, Boundary::Periodic);
    EXPECT_EQ(qfi_density(basis, z2_state(basis)), 0.0);
    ComplexVector cat = ComplexVector::Zero(static_cast<Eigen::Index>(basis.dim()));
    cat[static_cast<Eigen::Index>(basis.index_of(z2_config(L)))] = 1 / std::sqrt(2.0);
    cat[static_cast<Eigen::Index>(basis.index_of(translate(z2_config(L), L)))] = 1 / std::sqrt(2.0);
    EXPECT_NEAR(qfi_density(basis, cat), double(L), 1e-12);
}
