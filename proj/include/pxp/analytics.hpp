#pragma once

// Closed-form transfer-matrix results for the projected rotated state and
// the numerical checks that back them.
//
// The state is a bond-dimension-2 network: each site carries the rotated
// single-site weights and each bond the blockade projector. The 4x4 blocks
// below use the doubled (ket x bra) bond index (a, a') -> 2a + a'; only the
// diagonal components 0 and 3 are ever populated.

#include "pxp/operators.hpp"

#include <Eigen/Eigenvalues>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pxp {

struct TransferAnalytics {
    double theta = 0.0;
    double f = 0.0;
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    double xi = 0.0; // correlation length in units of two-site cells; +inf at theta = 0
    double h = 0.0;
    std::array<double, 2> single_cut{};
    std::array<double, 4> two_cut{};
};

inline constexpr double kEntanglementBound = 2.0 / (15.0 + 5.0 * 2.2360679774997896964);

inline double transfer_f(double theta) {
    return std::sqrt(2.0) * std::sqrt(44.0 * std::cos(2 * theta) - 3.0 * std::cos(4 * theta) + 87.0);
}

inline TransferAnalytics transfer_analytics(double theta) {
    if (!(theta >= -1e-12 && theta <= std::numbers::pi + 1e-12))
        throw std::invalid_argument("transfer_analytics: theta must lie in [0, pi]");
    TransferAnalytics out;
    out.theta = theta;
    double const c2 = std::cos(2 * theta);
    out.f = transfer_f(theta);
    out.lambda1 = (2 * c2 + out.f + 14) / 32;
    out.lambda2 = (2 * c2 - out.f + 14) / 32;
    // lambda2 vanishes analytically at theta = 0, pi; clamp rounding noise
    if (std::abs(out.lambda2) < 1e-15) out.lambda2 = 0.0;
    double const ratio = out.lambda2 / out.lambda1;
    out.xi = ratio > 0.0 ? -1.0 / std::log(ratio) : 0.0;
    double const s = std::sin(theta);
    out.h = 128 * std::pow(s, 6) / ((2 * c2 + out.f + 14) * out.f * out.f);
    double const root = std::sqrt(std::max(0.0, 0.25 - out.h));
    out.single_cut = {0.5 + root, 0.5 - root};
    out.two_cut = {0.5 - out.h + root, 0.5 - out.h - root, out.h, out.h};
    return out;
}

struct TransferBlocks {
    Eigen::Matrix4d ab;
    Eigen::Matrix4d ba;
    Eigen::Matrix4d ab_insertion; // one PXP term on the B site of an AB cell
    Eigen::Matrix4d ba_insertion;
};

/// Two-site transfer blocks with entries written out in closed form.
inline TransferBlocks transfer_blocks(double theta) {
    double const c = std::cos(theta / 2);
    double const s = std::sin(theta / 2);
    double const c2 = c * c, s2 = s * s;
    TransferBlocks t;
    t.ab.setZero();
    t.ab.row(0) << s2, c2 * s2, c2 * s2, c2 * s2;
    t.ab.row(3).setConstant(c2 * c2);
    t.ba.setZero();
    t.ba.row(0) << c2, c2 * s2, c2 * s2, c2 * s2;
    t.ba.row(3).setConstant(s2 * s2);
    t.ab_insertion.setZero();
    t.ab_insertion(0, 0) = 2 * s2 * s * c;
    t.ba_insertion.setZero();
    t.ba_insertion(0, 0) = -2 * c2 * c * s;
    return t;
}

/// The two largest-magnitude eigenvalues of a transfer block, descending.
inline std::array<double, 2> leading_eigenvalues(Eigen::Matrix4d const& block) {
    Eigen::EigenSolver<Eigen::Matrix4d> es(block, false);
    std::array<double, 4> v{};
    for (int k = 0; k < 4; ++k) v[static_cast<std::size_t>(k)] = es.eigenvalues()[k].real();
    std::sort(v.begin(), v.end(), [](double a, double b) { return std::abs(a) > std::abs(b); });
    return {std::max(v[0], v[1]), std::min(v[0], v[1])};
}

/// Single-cut spectrum from the dominant right and left fixed points of the
/// AB block: eig of reshape(r) * reshape(l), normalized to unit trace.
inline std::array<double, 2> fixed_point_spectrum(double theta) {
    auto const blocks = transfer_blocks(theta);
    Eigen::EigenSolver<Eigen::Matrix4d> right(blocks.ab);
    Eigen::EigenSolver<Eigen::Matrix4d> left(blocks.ab.transpose());
    Eigen::Index ir = 0, il = 0;
    right.eigenvalues().real().maxCoeff(&ir);
    left.eigenvalues().real().maxCoeff(&il);
    Eigen::Vector4d const r = right.eigenvectors().col(ir).real();
    Eigen::Vector4d const l = left.eigenvectors().col(il).real();
    Eigen::Matrix2d rm, lm;
    rm << r[0], r[1], r[2], r[3];
    lm << l[0], l[1], l[2], l[3];
    Eigen::EigenSolver<Eigen::Matrix2d> product(rm * lm);
    double a = product.eigenvalues()[0].real();
    double b = product.eigenvalues()[1].real();
    double const trace = a + b;
    a /= trace;
    b /= trace;
    return {std::max(a, b), std::min(a, b)};
}

/// Prefactor of the finite-L trace formula, fixed once by matching
/// <psi(theta)|H|psi(theta)>/L at L = 8 (see tests/test_analytics.cpp).
inline constexpr double kEnergyTracePrefactor = 1.0;

/// Energy per site of the projected rotated state on a ring of L = 4n sites:
///   E/L = kappa * 2n [tr(E_AB^{2n-1} E^O_AB) + tr(E_BA^{2n-1} E^O_BA)] / (L tr(E_AB^{2n})).
inline double energy_trace_ratio(double theta, int length) {
    if (length <= 0 || length % 4 != 0) throw std::invalid_argument("energy density: L must be a multiple of 4");
    int const cells = length / 2;
    auto const t = transfer_blocks(theta);
    Eigen::Matrix4d pab = Eigen::Matrix4d::Identity();
    Eigen::Matrix4d pba = Eigen::Matrix4d::Identity();
    for (int k = 0; k < cells - 1; ++k) {
        pab = pab * t.ab;
        pba = pba * t.ba;
    }
    double const partition = (pab * t.ab).trace();
    double const numerator = (pab * t.ab_insertion).trace() + (pba * t.ba_insertion).trace();
    return cells * numerator / (length * partition);
}

inline double analytic_energy_density(double theta, int length) {
    return kEnergyTracePrefactor * energy_trace_ratio(theta, length);
}

} // namespace pxp
