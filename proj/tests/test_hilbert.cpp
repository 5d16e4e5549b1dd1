#include "pxp/hilbert.hpp"

#include <gtest/gtest.h>


using namespace pxp;

namespace {

// Independent legality test working site by site.
bool legal_by_sites(Config c, int L, bool periodic) {
    for (int i = 0; i + 1 < L; ++i)
        if (((c >> i) & 1) && ((c >> (i + 1)) & 1)) return false;
    if (periodic && L > 2 && (c & 1) && ((c >> (L - 1)) & 1)) return false;
    return true;
}

std::vector<Config> brute_force(int L, bool periodic) {
    std::vector<Config> out;
    for (Config c = 0; c < (Config{1} << L); ++c)
        if (legal_by_sites(c, L, periodic)) out.push_back(c);
    return out;
}

std::size_t fibonacci(int n) { // F(1) = F(2) = 1
    std::size_t a = 0, b = 1;
    for (int i = 0; i < n; ++i) b = std::exchange(a, b) + b;
    return a;
}

std::size_t lucas(int n) {
    std::size_t a = 2, b = 1;
    for (int i = 0; i < n; ++i) b = std::exchange(a, b) + b;
    return a;
}

} // namespace

TEST(Hilbert, PeriodicMatchesBruteForce) {
    for (int L = 2; L <= 14; ++L) {
        auto const basis = build_chain_basis(L, Boundary::Periodic);
        auto const expected = brute_force(L, true);
        ASSERT_EQ(basis.dim(), expected.size()) << "L = " << L;
        EXPECT_TRUE(std::equal(expected.begin(), expected.end(), basis.configs().begin()));
    }
}

TEST(Hilbert, OpenChainFollowsFibonacci) {
    for (int L = 1; L <= 20; ++L) {
        auto const basis = build_chain_basis(L, Boundary::Open);
        EXPECT_EQ(basis.dim(), fibonacci(L + 2)) << "L = " << L;
        if (L <= 14) {
            EXPECT_EQ(basis.dim(), brute_force(L, false).size());
        }
    }
}

TEST(Hilbert, PeriodicFollowsLucas) {
    for (int L = 3; L <= 28; L += (L < 16 ? 1 : 4)) EXPECT_EQ(build_chain_basis(L, Boundary::Periodic).dim(), lucas(L));
    EXPECT_EQ(build_chain_basis(16, Boundary::Periodic).dim(), 2207u);
    EXPECT_EQ(build_chain_basis(24, Boundary::Periodic).dim(), 103682u);
}

TEST(Hilbert, SmallChains) {
    EXPECT_EQ(build_chain_basis(4, Boundary::Periodic).dim(), 7u);
    EXPECT_EQ(build_chain_basis(2, Boundary::Periodic).dim(), 3u);
    EXPECT_THROW(build_chain_basis(0, Boundary::Periodic), std::invalid_argument);
    EXPECT_THROW(build_chain_basis(kMaxSites + 1, Boundary::Open), std::invalid_argument);
}

TEST(Hilbert, IndexLookup) {
    auto const basis = build_chain_basis(10, Boundary::Periodic);
    for (std::size_t i = 0; i < basis.dim(); ++i) EXPECT_EQ(basis.index_of(basis.config(i)), i);
    EXPECT_EQ(state_index(basis, 0b0101010101), basis.index_of(0b0101010101));
    EXPECT_THROW(basis.index_of(0b11), std::invalid_argument);
    EXPECT_THROW(basis.index_of(0b1000000001), std::invalid_argument); // wraps around the ring
    EXPECT_THROW(basis.index_of(Config{1} << 12), std::out_of_range);
    EXPECT_FALSE(basis.find(0b11).has_value());
}

TEST(Hilbert, TranslationAndInversion) {
    int const L = 6;
    EXPECT_EQ(translate(0b000001, L), 0b000010u);
    EXPECT_EQ(translate(0b100000, L), 0b000001u);
    EXPECT_EQ(invert(0b000011, L), 0b110000u);
    for (Config c : brute_force(L, true)) {
        Config t = c;
        for (int k = 0; k < L; ++k) t = translate(t, L);
        EXPECT_EQ(t, c);
        EXPECT_EQ(invert(invert(c, L), L), c);
        EXPECT_TRUE(is_blockade_legal(translate(c, L), L, Boundary::Periodic));
    }
}

namespace {

double overlap(SectorBasis const& s, std::size_t a, std::size_t b) {
    std::vector<double> dense(s.parent().dim(), 0.0);
    for (auto const& e : s.vector(a)) dense[e.parent] = e.amplitude;
    double acc = 0.0;
    for (auto const& e : s.vector(b)) acc += dense[e.parent] * e.amplitude;
    return acc;
}

std::vector<double> as_dense(SectorBasis const& s, std::size_t a) {
    std::vector<double> v(s.parent().dim(), 0.0);
    for (auto const& e : s.vector(a)) v[e.parent] = e.amplitude;
    return v;
}

} // namespace

TEST(Sectors, L4Dimensions) {
    // dihedral orbits {0000}, {1000 x4}, {1010 x2}; the bond-centred
    // reflection makes both k = pi combinations odd
    EXPECT_EQ(build_symmetric_sector(4, Momentum::Zero, 1).dim(), 3u);
    EXPECT_EQ(build_symmetric_sector(4, Momentum::Zero, -1).dim(), 0u);
    EXPECT_EQ(build_symmetric_sector(4, Momentum::Pi, 1).dim(), 0u);
    EXPECT_EQ(build_symmetric_sector(4, Momentum::Pi, -1).dim(), 2u);
    EXPECT_EQ(build_momentum_pair_sector(4, 1).dim(), 2u);
}

TEST(Sectors, OrthonormalAndSymmetric) {
    for (int L : {6, 8, 10, 12}) {
        for (auto [k, inv] : {std::pair{Momentum::Zero, 1}, {Momentum::Zero, -1}, {Momentum::Pi, 1}, {Momentum::Pi, -1}}) {
            auto const s = build_symmetric_sector(L, k, inv);
            double const chi = k == Momentum::Pi ? -1.0 : 1.0;
            for (std::size_t a = 0; a < s.dim(); ++a) {
                EXPECT_NEAR(overlap(s, a, a), 1.0, 1e-12);
                if (a + 1 < s.dim()) {
                    EXPECT_NEAR(overlap(s, a, a + 1), 0.0, 1e-12);
                }
                auto const v = as_dense(s, a);
                auto const& parent = s.parent();
                for (std::size_t i = 0; i < parent.dim(); ++i) {
                    auto const ti = parent.index_of(translate(parent.config(i), L));
                    auto const ii = parent.index_of(invert(parent.config(i), L));
                    EXPECT_NEAR(v[ti], chi * v[i], 1e-12);
                    EXPECT_NEAR(v[ii], inv * v[i], 1e-12);
                }
            }
        }
    }
}

TEST(Sectors, CompleteDecomposition) {
    for (int L : {6, 8, 10, 12}) {
        std::size_t total = 0;
        for (auto k : {Momentum::Zero, Momentum::Pi})
            for (int inv : {1, -1}) total += build_symmetric_sector(L, k, inv).dim();
        for (int m = 1; 2 * m < L; ++m) total += build_momentum_pair_sector(L, m).dim();
        EXPECT_EQ(total, build_chain_basis(L, Boundary::Periodic).dim()) << "L = " << L;
    }
}

TEST(Sectors, ReverseMapAndRepresentatives) {
    auto const s = build_symmetric_sector(10, Momentum::Zero, 1);
    for (std::size_t a = 0; a < s.dim(); ++a) {
        auto const& parent = s.parent();
        auto const rep_idx = parent.index_of(s.representatives()[a]);
        bool found = false;
        for (auto const& [b, amp] : s.members_at(rep_idx))
            if (b == a) {
                found = true;
                EXPECT_DOUBLE_EQ(amp, s.representative_amplitude(a));
            }
        EXPECT_TRUE(found);
    }
    EXPECT_THROW(build_symmetric_sector(7, Momentum::Zero, 1), std::invalid_argument);
    EXPECT_THROW(build_symmetric_sector(8, Momentum::Zero, 0), std::invalid_argument);
    EXPECT_THROW(build_symmetric_sector(8, 1.0, 1), std::invalid_argument);
    EXPECT_THROW(build_momentum_pair_sector(8, 4), std::invalid_argument);
}

TEST(Cuts, HalfChainAndQuarters) {
    auto const half = CutGeometry::half_chain(8);
    EXPECT_EQ(half.region_sites().size(), 4u);
    EXPECT_EQ(half.region_basis().size(), 8u); // open chain of 4 sites: F(6)
    auto const q = CutGeometry::quarter(8, 1);
    EXPECT_EQ(q.begin, 2);
    EXPECT_EQ(q.end, 4);
    EXPECT_THROW(CutGeometry(8, {{0, 3}, {2, 5}}), std::invalid_argument);
    EXPECT_THROW(CutGeometry(8, {{0, 9}}), std::invalid_argument);
}

TEST(Cuts, NonContiguousRegionBasisIsProductOfIntervals) {
    CutGeometry const g(12, {{0, 3}, {6, 9}});
    EXPECT_EQ(g.region_basis().size(), 5u * 5u);
}

TEST(Cuts, SplitMergeRoundTrip) {
    int const L = 10;
    CutGeometry const g(L, {{1, 4}, {6, 8}});
    auto const basis = build_chain_basis(L, Boundary::Periodic);
    for (Config c : basis.configs()) {
        auto const s = split_and_check(c, g);
        EXPECT_TRUE(s.compatible);
        EXPECT_TRUE(are_compatible(s.region, s.complement, g));
        EXPECT_EQ(merge_split(s.region, s.complement, g), c);
    }
    // region 1 at its last site and complement 1 right after it clash
    auto const s = split_and_check(0b0000011000, g);
    EXPECT_FALSE(s.compatible);
}
