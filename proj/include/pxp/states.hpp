#pragma once

// Named states: Z2, scar-thermal interpolations and projected rotated states.

#include "pxp/scars.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pxp {

/// Uniform rotation angle restricted to [0, pi/2].
class RotationAngle {
public:
    explicit RotationAngle(double theta) : theta_(theta) {
        if (!(theta >= 0.0 && theta <= std::numbers::pi / 2 + 1e-12))
            throw std::invalid_argument("RotationAngle: theta must lie in [0, pi/2]");
    }

    /// Maps any angle into [0, pi/2] through theta -> -theta, 2pi - theta and
    /// pi - theta. Only valid for quantities invariant under the global flip
    /// relating theta and pi - theta (entanglement spectra).
    static RotationAngle fold(double theta) {
        double t = std::fmod(std::abs(theta), 2 * std::numbers::pi);
        if (t > std::numbers::pi) t = 2 * std::numbers::pi - t;
        if (t > std::numbers::pi / 2) t = std::numbers::pi - t;
        return RotationAngle(t);
    }

    double value() const noexcept { return theta_; }

private:
    double theta_;
};

inline ComplexVector z2_state(ConstrainedBasis const& basis) {
    if (basis.length() % 2 != 0) throw std::invalid_argument("z2_state: L must be even");
    ComplexVector v = ComplexVector::Zero(static_cast<Eigen::Index>(basis.dim()));
    v[static_cast<Eigen::Index>(basis.index_of(z2_config(basis.length())))] = 1.0;
    return v;
}

/// (lambda scar + (1 - lambda) thermal) / sqrt(lambda^2 + (1 - lambda)^2).
/// The two inputs must be orthonormal.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> interpolate(Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& scar,
                                                     Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& thermal,
                                                     double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("interpolate: lambda outside [0, 1]");
    if (scar.size() != thermal.size()) throw std::invalid_argument("interpolate: dimension mismatch");
    double const norm = std::sqrt(lambda * lambda + (1.0 - lambda) * (1.0 - lambda));
    return (lambda * scar + (1.0 - lambda) * thermal) / norm;
}

namespace detail {

// <sigma| prod_i R_i(theta) |reference>, R = exp(-i theta Y / 2), with the
// reference occupied on even bit positions (odd sites) when `odd_sublattice`
// is true and on odd bit positions otherwise. With gamma = tan(theta/2):
//   cos^L(theta/2) gamma^{#flipped} (-1)^{#occupied sites emptied}.
inline double rotated_amplitude(Config sigma, int length, double theta, bool odd_sublattice) {
    double const c = std::cos(theta / 2);
    double const s = std::sin(theta / 2);
    int flipped = 0;
    int emptied = 0;
    for (int b = 0; b < length; ++b) {
        bool const reference_occupied = ((b % 2 == 0) == odd_sublattice);
        bool const occupied = bit(sigma, b);
        if (occupied != reference_occupied) {
            ++flipped;
            if (reference_occupied) ++emptied;
        }
    }
    double amp = std::pow(c, length - flipped) * std::pow(s, flipped);
    return (emptied % 2 == 0) ? amp : -amp;
}

} // namespace detail

struct RotatedState {
    ComplexVector state; // normalized
    double survival = 1.0; // <phi|P|phi>: weight kept by the blockade projection
};

/// P exp(-i theta/2 sum_i Y_i) |Z2>, normalized. Valid for any real theta.
inline RotatedState rotated_state(ConstrainedBasis const& basis, double theta) {
    int const L = basis.length();
    if (L % 2 != 0) throw std::invalid_argument("rotated_state: L must be even");
    RotatedState out;
    out.state.resize(static_cast<Eigen::Index>(basis.dim()));
    for (std::size_t k = 0; k < basis.dim(); ++k)
        out.state[static_cast<Eigen::Index>(k)] = detail::rotated_amplitude(basis.config(k), L, theta, true);
    out.survival = out.state.squaredNorm();
    out.state /= std::sqrt(out.survival);
    return out;
}

/// Symmetric-sector (k = 0, I = +1) amplitudes of the rotated (|Z2> + |Z2bar>)
/// state from the two sublattice monomials at each representative.
inline ComplexVector rotated_state_sector(SectorBasis const& sector, double theta) {
    if (sector.momentum_index() != 0 || sector.inversion() != 1)
        throw std::invalid_argument("rotated_state_sector: requires the k = 0, I = +1 sector");
    int const L = sector.length();
    ComplexVector v(static_cast<Eigen::Index>(sector.dim()));
    for (std::size_t a = 0; a < sector.dim(); ++a) {
        Config const rep = sector.representatives()[a];
        double const sym = detail::rotated_amplitude(rep, L, theta, true) +
                           detail::rotated_amplitude(rep, L, theta, false);
        v[static_cast<Eigen::Index>(a)] = sym / sector.representative_amplitude(a);
    }
    return v / v.norm();
}

/// Embeds sector amplitudes into the parent basis.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> expand_sector_state(SectorBasis const& sector,
                                                             Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& v) {
    if (static_cast<std::size_t>(v.size()) != sector.dim())
        throw std::invalid_argument("expand_sector_state: dimension mismatch");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out =
        Eigen::Matrix<Scalar, Eigen::Dynamic, 1>::Zero(static_cast<Eigen::Index>(sector.parent().dim()));
    for (std::size_t a = 0; a < sector.dim(); ++a)
        for (auto const& e : sector.vector(a)) out[e.parent] += e.amplitude * v[static_cast<Eigen::Index>(a)];
    return out;
}

/// Sector components <v_a|psi> of a parent-basis state (not renormalized).
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> project_to_sector(SectorBasis const& sector,
                                                           Eigen::Matrix<Scalar, Eigen::Dynamic, 1> const& psi) {
    if (static_cast<std::size_t>(psi.size()) != sector.parent().dim())
        throw std::invalid_argument("project_to_sector: dimension mismatch");
    Eigen::Matrix<Scalar, Eigen::Dynamic, 1> out(static_cast<Eigen::Index>(sector.dim()));
    for (std::size_t a = 0; a < sector.dim(); ++a) {
        Scalar acc{0};
        for (auto const& e : sector.vector(a)) acc += e.amplitude * psi[e.parent];
        out[static_cast<Eigen::Index>(a)] = acc;
    }
    return out;
}

} // namespace pxp
