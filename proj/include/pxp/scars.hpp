#pragma once

// Forward-scattering tower and scar/thermal separation inside a degenerate
// energy shell.

#include "pxp/spectra.hpp"

#include <string>
#include <vector>

namespace pxp {

/// |n> = (H+)^n |Z2> / norm, n = 0, 1, ... until n = L or the raising
/// annihilates the state.
struct FsaTower {
    std::vector<RealVector> vectors;

    std::size_t size() const noexcept { return vectors.size(); }

    RealMatrix as_matrix() const {
        if (vectors.empty()) return {};
        RealMatrix m(vectors.front().size(), static_cast<Eigen::Index>(vectors.size()));
        for (std::size_t n = 0; n < vectors.size(); ++n) m.col(static_cast<Eigen::Index>(n)) = vectors[n];
        return m;
    }
};

/// Index of |1010...> (1s on odd sites, i.e. even bit positions).
inline Config z2_config(int length) noexcept {
    Config c = 0;
    for (int b = 0; b < length; b += 2) c |= Config{1} << b;
    return c;
}

inline FsaTower fsa_basis(ConstrainedBasis const& basis) {
    int const L = basis.length();
    auto const [plus, minus] = fsa_raising(basis);
    FsaTower tower;
    RealVector v = RealVector::Zero(static_cast<Eigen::Index>(basis.dim()));
    v[static_cast<Eigen::Index>(basis.index_of(z2_config(L)))] = 1.0;
    tower.vectors.push_back(v);
    for (int n = 1; n <= L; ++n) {
        v = pxp::apply(plus, v);
        double const norm = v.norm();
        if (norm < 1e-14) break;
        v /= norm;
        tower.vectors.push_back(v);
    }
    return tower;
}

struct ScarSplit {
    RealVector scar;
    RealMatrix thermal; // columns
    RealVector fsa_weights; // descending
    bool multiple_scar_candidates = false;
    std::string warning;
};

inline constexpr double kMultiScarThreshold = 0.5;

/// Diagonalizes G_ij = sum_n <E_i|n><n|E_j> over the shell; the top
/// eigenvector is the scar and the rest span the thermal complement. The
/// scar's sign is fixed so that <Z2|scar> >= 0.
inline ScarSplit separate_scar(RealMatrix const& shell, FsaTower const& tower) {
    if (shell.cols() == 0) throw std::invalid_argument("separate_scar: empty shell");
    RealMatrix const overlaps = tower.as_matrix().transpose() * shell; // (n, i) = <n|E_i>
    RealMatrix gram = overlaps.transpose() * overlaps;
    gram = 0.5 * (gram + gram.transpose()).eval();
    auto dec = dense_eigh(gram);

    Eigen::Index const k = shell.cols();
    ScarSplit out;
    out.fsa_weights = dec.values.reverse();
    RealMatrix const rotated = shell * dec.vectors.rowwise().reverse(); // descending weight order
    out.scar = rotated.col(0);
    out.thermal = rotated.rightCols(k - 1);

    Eigen::Index z2 = -1;
    {
        // the tower starts on |Z2>, so its support identifies the index
        Eigen::Index idx = 0;
        tower.vectors.front().cwiseAbs().maxCoeff(&idx);
        z2 = idx;
    }
    if (out.scar[z2] < 0.0) out.scar = -out.scar;

    if (k >= 2 && out.fsa_weights[1] > kMultiScarThreshold) {
        out.multiple_scar_candidates = true;
        out.warning = "multiple scar candidates: second FSA weight " + std::to_string(out.fsa_weights[1]) +
                      " exceeds " + std::to_string(kMultiScarThreshold) + "; using the top vector only";
    }
    return out;
}

} // namespace pxp
