#pragma once

// Blockade-constrained configuration spaces of a PXP chain.
//
// Bit convention: bit b of a configuration is the occupation of site b + 1
// (sites are 1-indexed in physics statements, 0-indexed as bit positions).
// "Odd sites" therefore live on even bit positions.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace pxp {

using Config = std::uint64_t;

enum class Boundary { Periodic, Open };

inline constexpr int kMaxSites = 40;

inline constexpr Config site_mask(int length) noexcept {
    return length >= 64 ? ~Config{0} : (Config{1} << length) - 1;
}

inline constexpr bool bit(Config c, int site) noexcept { return (c >> site) & 1U; }

/// True when no two occupied sites are nearest neighbours. For periodic
/// chains of length >= 3 sites 0 and L-1 are neighbours; L = 2 counts the
/// single bond once and L = 1 has no bond at all.
inline constexpr bool is_blockade_legal(Config c, int length, Boundary boundary) noexcept {
    if ((c & ~site_mask(length)) != 0) return false;
    if ((c & (c >> 1)) != 0) return false;
    if (boundary == Boundary::Periodic && length >= 3 && bit(c, 0) && bit(c, length - 1)) return false;
    return true;
}

/// Cyclic shift by one site: site i -> i + 1 (mod L).
inline constexpr Config translate(Config c, int length) noexcept {
    if (length <= 1) return c;
    Config const mask = site_mask(length);
    return ((c << 1) | (c >> (length - 1))) & mask;
}

/// Site reflection i -> L - i + 1 (1-indexed), i.e. bit b -> L - 1 - b.
inline constexpr Config invert(Config c, int length) noexcept {
    Config out = 0;
    for (int b = 0; b < length; ++b)
        if (bit(c, b)) out |= Config{1} << (length - 1 - b);
    return out;
}

namespace detail {

// Legal open-chain configurations of `length` sites in ascending order.
// The top site is either empty (any legal config of length-1 sites) or
// occupied (site length-2 empty, any legal config of length-2 sites); every
// member of the second group exceeds every member of the first.
inline std::vector<Config> open_chain_configs(int length) {
    std::vector<Config> shorter{0};    // length - 2
    std::vector<Config> current{0, 1}; // length - 1 (starting at length 1)
    if (length <= 0) return shorter;
    if (length == 1) return current;
    for (int l = 2; l <= length; ++l) {
        std::vector<Config> next = current;
        next.reserve(current.size() + shorter.size());
        Config const top = Config{1} << (l - 1);
        for (Config c : shorter) next.push_back(top | c);
        shorter = std::move(current);
        current = std::move(next);
    }
    return current;
}

} // namespace detail

/// Ordered set of blockade-legal configurations of a chain segment.
class ConstrainedBasis {
public:
    ConstrainedBasis(int length, Boundary boundary) : length_(length), boundary_(boundary) {
        if (length < 1 || length > kMaxSites)
            throw std::invalid_argument("ConstrainedBasis: length must lie in [1, " +
                                        std::to_string(kMaxSites) + "]");
        auto configs = detail::open_chain_configs(length);
        if (boundary == Boundary::Periodic && length >= 3) {
            std::erase_if(configs, [length](Config c) { return bit(c, 0) && bit(c, length - 1); });
        }
        configs_ = std::move(configs);
    }

    int length() const noexcept { return length_; }
    Boundary boundary() const noexcept { return boundary_; }
    std::size_t dim() const noexcept { return configs_.size(); }
    std::span<const Config> configs() const noexcept { return configs_; }
    Config config(std::size_t index) const { return configs_.at(index); }

    bool contains(Config c) const noexcept { return find(c).has_value(); }

    std::optional<std::size_t> find(Config c) const noexcept {
        auto it = std::lower_bound(configs_.begin(), configs_.end(), c);
        if (it == configs_.end() || *it != c) return std::nullopt;
        return static_cast<std::size_t>(it - configs_.begin());
    }

    /// Ordinal of a legal configuration. Bits beyond the chain raise
    /// std::out_of_range; a blockade violation raises std::invalid_argument.
    std::size_t index_of(Config c) const {
        if ((c & ~site_mask(length_)) != 0)
            throw std::out_of_range("configuration has bits beyond the chain length");
        if (auto idx = find(c)) return *idx;
        throw std::invalid_argument("configuration violates the Rydberg blockade");
    }

private:
    int length_;
    Boundary boundary_;
    std::vector<Config> configs_;
};

inline ConstrainedBasis build_chain_basis(int length, Boundary boundary) {
    return ConstrainedBasis(length, boundary);
}

inline std::size_t state_index(ConstrainedBasis const& basis, Config config) {
    return basis.index_of(config);
}

// ---------------------------------------------------------------------------
// Symmetry sectors

enum class Momentum { Zero, Pi };

/// Symmetry-adapted orthonormal basis of a periodic constrained space.
///
/// Sectors with momentum 0 or pi carry an inversion quantum number and each
/// dihedral orbit contributes at most one vector. Interior momenta
/// k = 2 pi m / L (0 < m < L/2) are represented by the real span of the
/// {k, -k} pair (cosine and sine combinations of each translation orbit);
/// those sectors have `inversion() == 0` and every level appears twice.
class SectorBasis {
public:
    struct Entry {
        std::uint32_t parent;
        double amplitude;
    };

    ConstrainedBasis const& parent() const noexcept { return parent_; }
    int length() const noexcept { return parent_.length(); }
    int momentum_index() const noexcept { return momentum_index_; }
    int inversion() const noexcept { return inversion_; }
    std::size_t dim() const noexcept { return vectors_.size(); }

    /// Orbit-representative bitmask of each sector vector.
    std::span<const Config> representatives() const noexcept { return representatives_; }
    /// |amplitude| of each sector vector on its orbit members.
    std::span<const double> norms() const noexcept { return norms_; }
    /// Amplitude of sector vector `a` on its representative configuration.
    double representative_amplitude(std::size_t a) const { return rep_amplitude_.at(a); }

    std::span<const Entry> vector(std::size_t a) const noexcept { return vectors_[a]; }

    /// Sector vectors supported on a given parent index.
    std::span<const std::pair<std::uint32_t, double>> members_at(std::size_t parent_index) const noexcept {
        return {reverse_.data() + reverse_offsets_[parent_index],
                reverse_offsets_[parent_index + 1] - reverse_offsets_[parent_index]};
    }

    friend SectorBasis build_symmetric_sector(int, Momentum, int);
    friend SectorBasis build_momentum_pair_sector(int, int);

private:
    explicit SectorBasis(ConstrainedBasis parent) : parent_(std::move(parent)) {}

    void push(Config rep, double rep_amp, std::vector<Entry> entries) {
        double norm2 = 0.0;
        for (auto const& e : entries) norm2 += e.amplitude * e.amplitude;
        double const inv = 1.0 / std::sqrt(norm2);
        for (auto& e : entries) e.amplitude *= inv;
        representatives_.push_back(rep);
        norms_.push_back(std::abs(entries.front().amplitude));
        rep_amplitude_.push_back(rep_amp * inv);
        vectors_.push_back(std::move(entries));
    }

    void finalize() {
        std::size_t const n = parent_.dim();
        reverse_offsets_.assign(n + 1, 0);
        for (auto const& v : vectors_)
            for (auto const& e : v) ++reverse_offsets_[e.parent + 1];
        for (std::size_t i = 0; i < n; ++i) reverse_offsets_[i + 1] += reverse_offsets_[i];
        reverse_.resize(reverse_offsets_[n]);
        std::vector<std::size_t> fill(reverse_offsets_.begin(), reverse_offsets_.end() - 1);
        for (std::size_t a = 0; a < vectors_.size(); ++a)
            for (auto const& e : vectors_[a])
                reverse_[fill[e.parent]++] = {static_cast<std::uint32_t>(a), e.amplitude};
    }

    ConstrainedBasis parent_;
    int momentum_index_ = 0;
    int inversion_ = 1;
    std::vector<Config> representatives_;
    std::vector<double> norms_;
    std::vector<double> rep_amplitude_;
    std::vector<std::vector<Entry>> vectors_;
    std::vector<std::size_t> reverse_offsets_;
    std::vector<std::pair<std::uint32_t, double>> reverse_;
};

namespace detail {

// Accumulates sum_g chi(g) g|c> over the listed group images, keyed by config.
inline std::vector<SectorBasis::Entry> symmetrize(ConstrainedBasis const& parent,
                                                  std::vector<std::pair<Config, double>> const& images) {
    std::vector<std::pair<Config, double>> acc = images;
    std::sort(acc.begin(), acc.end(), [](auto const& a, auto const& b) { return a.first < b.first; });
    std::vector<SectorBasis::Entry> out;
    for (std::size_t i = 0; i < acc.size();) {
        std::size_t j = i;
        double sum = 0.0;
        while (j < acc.size() && acc[j].first == acc[i].first) sum += acc[j++].second;
        if (std::abs(sum) > 1e-12)
            out.push_back({static_cast<std::uint32_t>(parent.index_of(acc[i].first)), sum});
        i = j;
    }
    return out;
}

} // namespace detail

/// Symmetry sector with momentum 0 or pi and inversion eigenvalue +-1.
inline SectorBasis build_symmetric_sector(int length, Momentum momentum, int inversion) {
    if (length < 2 || length % 2 != 0)
        throw std::invalid_argument("build_symmetric_sector: L must be even and >= 2");
    if (inversion != 1 && inversion != -1)
        throw std::invalid_argument("build_symmetric_sector: inversion must be +1 or -1");

    SectorBasis sector(ConstrainedBasis(length, Boundary::Periodic));
    sector.momentum_index_ = momentum == Momentum::Zero ? 0 : length / 2;
    sector.inversion_ = inversion;

    auto const& parent = sector.parent_;
    std::vector<char> visited(parent.dim(), 0);
    std::vector<std::pair<Config, double>> images;
    for (std::size_t i = 0; i < parent.dim(); ++i) {
        if (visited[i]) continue;
        Config const rep = parent.config(i); // ascending scan: first unvisited is orbit-minimal
        images.clear();
        Config t = rep;
        for (int j = 0; j < length; ++j) {
            double const chi = (momentum == Momentum::Pi && (j % 2 == 1)) ? -1.0 : 1.0;
            images.emplace_back(t, chi);
            images.emplace_back(invert(t, length), chi * inversion);
            t = translate(t, length);
        }
        for (auto const& [c, _] : images) visited[parent.index_of(c)] = 1;
        auto entries = detail::symmetrize(parent, images);
        if (entries.empty()) continue;
        double rep_amp = 0.0;
        for (auto const& e : entries)
            if (parent.config(e.parent) == rep) rep_amp = e.amplitude;
        sector.push(rep, rep_amp, std::move(entries));
    }
    sector.finalize();
    return sector;
}

inline SectorBasis build_symmetric_sector(int length, double momentum, int inversion) {
    if (std::abs(momentum) < 1e-12) return build_symmetric_sector(length, Momentum::Zero, inversion);
    if (std::abs(momentum - std::numbers::pi) < 1e-12) return build_symmetric_sector(length, Momentum::Pi, inversion);
    throw std::invalid_argument("build_symmetric_sector: momentum must be 0 or pi");
}

/// Real span of the momentum pair {k, -k}, k = 2 pi m / L with 0 < m < L/2.
inline SectorBasis build_momentum_pair_sector(int length, int m) {
    if (length < 3 || m <= 0 || 2 * m >= length)
        throw std::invalid_argument("build_momentum_pair_sector: need 0 < m < L/2");
    SectorBasis sector(ConstrainedBasis(length, Boundary::Periodic));
    sector.momentum_index_ = m;
    sector.inversion_ = 0;

    auto const& parent = sector.parent_;
    double const k = 2.0 * std::numbers::pi * m / length;
    std::vector<char> visited(parent.dim(), 0);
    for (std::size_t i = 0; i < parent.dim(); ++i) {
        if (visited[i]) continue;
        Config const rep = parent.config(i);
        int period = 0;
        Config t = rep;
        do {
            visited[parent.index_of(t)] = 1;
            t = translate(t, length);
            ++period;
        } while (t != rep);
        if ((m * period) % length != 0) continue;
        std::vector<std::pair<Config, double>> cos_images, sin_images;
        t = rep;
        for (int j = 0; j < period; ++j) {
            cos_images.emplace_back(t, std::cos(k * j));
            sin_images.emplace_back(t, std::sin(k * j));
            t = translate(t, length);
        }
        auto c = detail::symmetrize(parent, cos_images);
        auto s = detail::symmetrize(parent, sin_images);
        double const c_rep = c.empty() ? 0.0 : cos_images.front().second;
        sector.push(rep, c_rep, std::move(c));
        sector.push(rep, 0.0, std::move(s));
    }
    sector.finalize();
    return sector;
}

// ---------------------------------------------------------------------------
// Cut geometry

/// Half-open site interval [begin, end) in bit positions.
struct Interval {
    int begin = 0;
    int end = 0;
    int size() const noexcept { return end - begin; }
};

/// A region of a periodic chain given as disjoint intervals; the complement
/// is everything else.
class CutGeometry {
public:
    CutGeometry(int length, std::vector<Interval> region) : length_(length), region_(std::move(region)) {
        if (length < 1) throw std::invalid_argument("CutGeometry: length must be positive");
        std::sort(region_.begin(), region_.end(), [](Interval a, Interval b) { return a.begin < b.begin; });
        std::vector<char> used(static_cast<std::size_t>(length), 0);
        for (auto const& iv : region_) {
            if (iv.begin < 0 || iv.end > length || iv.begin >= iv.end)
                throw std::invalid_argument("CutGeometry: interval outside [0, L) or empty");
            for (int s = iv.begin; s < iv.end; ++s) {
                if (used[static_cast<std::size_t>(s)])
                    throw std::invalid_argument("CutGeometry: overlapping intervals");
                used[static_cast<std::size_t>(s)] = 1;
            }
        }
        for (int s = 0; s < length; ++s) (used[static_cast<std::size_t>(s)] ? region_sites_ : complement_sites_).push_back(s);
    }

    static CutGeometry half_chain(int length) { return CutGeometry(length, {{0, length / 2}}); }

    /// Boundaries of the k-th of four near-equal intervals.
    static Interval quarter(int length, int k) { return {k * length / 4, (k + 1) * length / 4}; }

    int length() const noexcept { return length_; }
    std::span<const Interval> intervals() const noexcept { return region_; }
    std::span<const int> region_sites() const noexcept { return region_sites_; }
    std::span<const int> complement_sites() const noexcept { return complement_sites_; }

    /// Extracts the listed sites of `c` into consecutive low bits.
    static Config gather(Config c, std::span<const int> sites) noexcept {
        Config out = 0;
        for (std::size_t j = 0; j < sites.size(); ++j)
            if (bit(c, sites[j])) out |= Config{1} << j;
        return out;
    }

    static Config scatter(Config packed, std::span<const int> sites) noexcept {
        Config out = 0;
        for (std::size_t j = 0; j < sites.size(); ++j)
            if (bit(packed, static_cast<int>(j))) out |= Config{1} << sites[j];
        return out;
    }

    /// Region configurations: product of per-interval open-chain bases,
    /// packed in interval order, ascending.
    std::vector<Config> region_basis() const {
        std::vector<Config> out{0};
        int offset = 0;
        for (auto const& iv : region_) {
            auto local = detail::open_chain_configs(iv.size());
            std::vector<Config> next;
            next.reserve(out.size() * local.size());
            for (Config hi : local)
                for (Config lo : out) next.push_back(lo | (hi << offset));
            out = std::move(next);
            offset += iv.size();
        }
        std::sort(out.begin(), out.end());
        return out;
    }

private:
    int length_;
    std::vector<Interval> region_;
    std::vector<int> region_sites_;
    std::vector<int> complement_sites_;
};

struct SplitConfig {
    Config region = 0;
    Config complement = 0;
    bool compatible = false;
};

/// Splits a parent configuration into packed region / complement parts.
/// `compatible` is true iff no occupied pair straddles a cut (periodic wrap
/// included), which together with open-chain legality of both parts is
/// equivalent to legality of the merged periodic configuration.
inline SplitConfig split_and_check(Config config, CutGeometry const& geometry) {
    SplitConfig out;
    out.region = CutGeometry::gather(config, geometry.region_sites());
    out.complement = CutGeometry::gather(config, geometry.complement_sites());
    out.compatible = is_blockade_legal(config, geometry.length(), Boundary::Periodic);
    return out;
}

/// Whether packed region and complement parts can coexist in the chain:
/// no occupied pair may straddle a cut, the periodic wrap included.
inline bool are_compatible(Config region, Config complement, CutGeometry const& geometry) noexcept {
    Config const merged = CutGeometry::scatter(region, geometry.region_sites()) |
                          CutGeometry::scatter(complement, geometry.complement_sites());
    return is_blockade_legal(merged, geometry.length(), Boundary::Periodic);
}

/// Merges packed region / complement configurations back into the chain.
inline Config merge_split(Config region, Config complement, CutGeometry const& geometry) noexcept {
    return CutGeometry::scatter(region, geometry.region_sites()) |
           CutGeometry::scatter(complement, geometry.complement_sites());
}

} // namespace pxp
