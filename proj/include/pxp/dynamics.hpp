#pragma once

// Real-time evolution, quench time series and steady-state averages.

#include "pxp/ergotropy.hpp"
#include "pxp/states.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace pxp {

/// psi(t) = V exp(-i Lambda t) V^T psi0 for a fixed initial state.
class EigenbasisPropagator {
public:
    EigenbasisPropagator(SpectralDecomposition const& dec, ComplexVector const& psi0) : dec_(&dec) {
        if (static_cast<std::size_t>(psi0.size()) != dec.dim())
            throw std::invalid_argument("EigenbasisPropagator: dimension mismatch");
        coefficients_ = dec.vectors.transpose().cast<Complex>() * psi0;
    }

    ComplexVector at(double t) const {
        ComplexVector phased(coefficients_.size());
        for (Eigen::Index k = 0; k < coefficients_.size(); ++k)
            phased[k] = std::polar(1.0, -dec_->values[k] * t) * coefficients_[k];
        return dec_->vectors.cast<Complex>() * phased;
    }

private:
    SpectralDecomposition const* dec_;
    ComplexVector coefficients_;
};

inline std::vector<ComplexVector> evolve_eigenbasis(SpectralDecomposition const& dec, ComplexVector const& psi0,
                                                    std::vector<double> const& times) {
    EigenbasisPropagator const prop(dec, psi0);
    std::vector<ComplexVector> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(prop.at(t));
    return out;
}

struct KrylovOptions {
    int max_subspace = 60;
    double tolerance = 1e-12;
};

/// One Lanczos step exp(-i H dt) psi. The subspace grows until the a
/// posteriori error estimate beta_m |[exp(-i T_m dt) e_1]_m| drops below the
/// tolerance; throws if it cannot converge within the space dimension.
inline ComplexVector evolve_krylov(SparseOperator const& h, ComplexVector const& psi, double dt,
                                   KrylovOptions const& options = {}) {
    if (!h.hermitian) throw std::invalid_argument("evolve_krylov: operator not flagged Hermitian");
    if (!(dt > 0.0)) throw std::invalid_argument("evolve_krylov: dt must be positive");
    if (static_cast<std::size_t>(psi.size()) != h.dim()) throw std::invalid_argument("evolve_krylov: dimension mismatch");

    double const norm0 = psi.norm();
    auto const dim = static_cast<int>(h.dim());
    int const max_m = std::min(options.max_subspace, dim);

    std::vector<ComplexVector> q;
    std::vector<double> alpha, beta;
    q.push_back(psi / norm0);

    auto small_exponential = [&](int m) {
        RealMatrix t = RealMatrix::Zero(m, m);
        for (int j = 0; j < m; ++j) {
            t(j, j) = alpha[static_cast<std::size_t>(j)];
            if (j + 1 < m) t(j, j + 1) = t(j + 1, j) = beta[static_cast<std::size_t>(j)];
        }
        Eigen::SelfAdjointEigenSolver<RealMatrix> es(t);
        ComplexVector phase(m);
        for (int k = 0; k < m; ++k) phase[k] = std::polar(1.0, -es.eigenvalues()[k] * dt) * es.eigenvectors()(0, k);
        return ComplexVector(es.eigenvectors().cast<Complex>() * phase);
    };

    for (int m = 1; m <= max_m; ++m) {
        ComplexVector w = pxp::apply(h, q.back());
        alpha.push_back(std::real(q.back().dot(w)));
        // full reorthogonalization against the whole Krylov basis
        for (auto const& v : q) w -= v.dot(w) * v;
        for (auto const& v : q) w -= v.dot(w) * v;
        double const b = w.norm();
        ComplexVector const coeffs = small_exponential(m);
        double const estimate = b * std::abs(coeffs[m - 1]);
        if (estimate < options.tolerance || b < 1e-14 || m == dim) {
            ComplexVector out = ComplexVector::Zero(psi.size());
            for (int j = 0; j < m; ++j) out += coeffs[j] * q[static_cast<std::size_t>(j)];
            return norm0 * out / out.norm();
        }
        beta.push_back(b);
        q.push_back(w / b);
    }
    throw std::runtime_error("evolve_krylov: no convergence within " + std::to_string(max_m) + " Lanczos vectors");
}

/// Sampled {E_A, W, Q, S_vN} along a half-chain quench trajectory.
struct TimeSeries {
    int length = 0;
    double theta = 0.0;
    std::string method;
    std::vector<double> times;
    std::vector<double> energy;       // E_A, ground-shifted
    std::vector<double> ergotropy;    // W
    std::vector<double> bound_energy; // Q
    std::vector<double> entropy;      // S_vN

    std::size_t size() const noexcept { return times.size(); }
};

struct QuenchOptions {
    double t_max = 1000.0;
    double dt = 0.5;
    std::size_t eigenbasis_limit = 4000; // sector dimension
    KrylovOptions krylov{};
    bool force_krylov = false;
};

inline constexpr char kMethodEigenbasis[] = "eigenbasis";
inline constexpr char kMethodKrylov[] = "krylov";

inline std::vector<double> uniform_grid(double t_max, double dt) {
    if (!(dt > 0.0) || t_max < 0.0) throw std::invalid_argument("uniform_grid: need dt > 0 and t_max >= 0");
    auto const n = static_cast<std::size_t>(std::floor(t_max / dt + 1e-9));
    std::vector<double> grid(n + 1);
    for (std::size_t k = 0; k <= n; ++k) grid[k] = static_cast<double>(k) * dt;
    return grid;
}

/// Evolves the rotated symmetric state in the (k = 0, I = +1) sector and
/// records half-chain observables at every grid point.
inline TimeSeries quench_series(int length, double theta, QuenchOptions const& options = {}) {
    if (length % 4 != 0) throw std::invalid_argument("quench_series: L must be a multiple of 4");
    auto const sector = build_symmetric_sector(length, Momentum::Zero, 1);
    auto const h = pxp_sector_hamiltonian(sector);
    ComplexVector const psi0 = rotated_state_sector(sector, theta);
    Bipartition const cut(sector.parent(), CutGeometry::half_chain(length));
    SubsystemModel const model(length / 2);

    TimeSeries series;
    series.length = length;
    series.theta = theta;
    series.times = uniform_grid(options.t_max, options.dt);

    auto record = [&](ComplexVector const& sector_state) {
        auto const rho = reduced_density(cut, expand_sector_state(sector, sector_state));
        auto const erg = ergotropy(rho, model);
        series.energy.push_back(erg.energy);
        series.ergotropy.push_back(erg.ergotropy);
        series.bound_energy.push_back(erg.bound_energy);
        series.entropy.push_back(entropy(entanglement_spectrum(rho)));
    };

    bool const use_eigenbasis = !options.force_krylov && sector.dim() <= options.eigenbasis_limit;
    if (use_eigenbasis) {
        series.method = kMethodEigenbasis;
        auto const dec = dense_eigh(h);
        EigenbasisPropagator const prop(dec, psi0);
        for (double t : series.times) record(prop.at(t));
    } else {
        series.method = kMethodKrylov;
        ComplexVector psi = psi0;
        double now = 0.0;
        for (double t : series.times) {
            if (t > now) psi = evolve_krylov(h, psi, t - now, options.krylov);
            now = t;
            record(psi);
        }
    }
    return series;
}

struct SteadyState {
    double ergotropy = 0.0;
    double bound_energy = 0.0;
    double entropy = 0.0;
    std::size_t samples = 0;
};

/// Arithmetic means over samples with t in [t1, t2].
inline SteadyState steady_average(TimeSeries const& series, double t1, double t2) {
    SteadyState out;
    for (std::size_t k = 0; k < series.size(); ++k) {
        double const t = series.times[k];
        if (t < t1 - 1e-12 || t > t2 + 1e-12) continue;
        out.ergotropy += series.ergotropy[k];
        out.bound_energy += series.bound_energy[k];
        out.entropy += series.entropy[k];
        ++out.samples;
    }
    if (out.samples == 0) throw std::invalid_argument("steady_average: empty window");
    auto const n = static_cast<double>(out.samples);
    out.ergotropy /= n;
    out.bound_energy /= n;
    out.entropy /= n;
    return out;
}

/// max_t |E_A(t) - E_A(0)|.
inline double max_energy_drift(TimeSeries const& series) {
    double worst = 0.0;
    for (double e : series.energy) worst = std::max(worst, std::abs(e - series.energy.front()));
    return worst;
}

} // namespace pxp
