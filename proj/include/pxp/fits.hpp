#pragma once

// Least-squares scaling fits over system size.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pxp {

struct FitResult {
    std::string model;
    std::vector<std::string> names;
    std::vector<double> coefficients;
    std::vector<double> standard_errors; // NaN when the fit has no residual degrees of freedom
    double residual_norm = 0.0;
    double r_squared = 0.0;
    std::size_t samples = 0;

    double coefficient(std::string const& name) const {
        for (std::size_t k = 0; k < names.size(); ++k)
            if (names[k] == name) return coefficients[k];
        throw std::out_of_range("FitResult: no coefficient " + name);
    }
    double standard_error(std::string const& name) const {
        for (std::size_t k = 0; k < names.size(); ++k)
            if (names[k] == name) return standard_errors[k];
        throw std::out_of_range("FitResult: no coefficient " + name);
    }
};

using SizeSeries = std::vector<std::pair<double, double>>; // (L, y)

using BasisFunction = std::function<double(double)>;

namespace detail {

inline SizeSeries sorted_series(SizeSeries data) {
    std::sort(data.begin(), data.end());
    return data;
}

} // namespace detail

/// Ordinary least squares y ~ sum_k c_k phi_k(L) through a column-pivoted
/// QR. Inputs are sorted first so permuted data give identical bits.
inline FitResult linear_least_squares(std::string model, SizeSeries data, std::vector<std::string> names,
                                      std::vector<BasisFunction> const& basis) {
    if (names.size() != basis.size()) throw std::invalid_argument("linear_least_squares: names/basis mismatch");
    data = detail::sorted_series(std::move(data));
    auto const n = static_cast<Eigen::Index>(data.size());
    auto const p = static_cast<Eigen::Index>(basis.size());
    if (n < p) throw std::invalid_argument(model + ": need at least " + std::to_string(p) + " points");

    Eigen::MatrixXd design(n, p);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        auto const [x, value] = data[static_cast<std::size_t>(i)];
        if (!std::isfinite(x) || !std::isfinite(value)) throw std::invalid_argument(model + ": non-finite input");
        for (Eigen::Index j = 0; j < p; ++j) design(i, j) = basis[static_cast<std::size_t>(j)](x);
        y[i] = value;
    }
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(design);
    qr.setThreshold(1e-10);
    if (qr.rank() < p) throw std::invalid_argument(model + ": rank-deficient design");
    Eigen::VectorXd const c = qr.solve(y);
    Eigen::VectorXd const residual = y - design * c;

    FitResult out;
    out.model = std::move(model);
    out.names = std::move(names);
    out.samples = static_cast<std::size_t>(n);
    out.coefficients.assign(c.data(), c.data() + p);
    out.residual_norm = residual.norm();

    double const mean = y.mean();
    double const total = (y.array() - mean).square().sum();
    double const rss = residual.squaredNorm();
    out.r_squared = total > 0.0 ? std::clamp(1.0 - rss / total, 0.0, 1.0) : (rss < 1e-24 ? 1.0 : 0.0);

    out.standard_errors.assign(static_cast<std::size_t>(p), std::numeric_limits<double>::quiet_NaN());
    if (n > p) {
        double const sigma2 = rss / static_cast<double>(n - p);
        Eigen::MatrixXd const cov = sigma2 * (design.transpose() * design).inverse();
        for (Eigen::Index j = 0; j < p; ++j) out.standard_errors[static_cast<std::size_t>(j)] = std::sqrt(std::max(0.0, cov(j, j)));
    }
    return out;
}

/// S = a + v L + c ln(L)/3
inline FitResult fit_entropy_scaling(SizeSeries const& data) {
    if (data.size() < 4) throw std::invalid_argument("fit_entropy_scaling: need at least 4 sizes");
    return linear_least_squares("S = a + v L + c ln(L)/3", data, {"a", "v", "c"},
                                {[](double) { return 1.0; }, [](double l) { return l; },
                                 [](double l) { return std::log(l) / 3.0; }});
}

/// S^2/Q = n + m L
inline FitResult fit_sq_over_q(SizeSeries const& data) {
    if (data.size() < 3) throw std::invalid_argument("fit_sq_over_q: need at least 3 sizes");
    return linear_least_squares("S^2/Q = n + m L", data, {"n", "m"},
                                {[](double) { return 1.0; }, [](double l) { return l; }});
}

enum class Regime { Scar, Thermal };

inline char const* to_string(Regime r) { return r == Regime::Scar ? "scar" : "thermal"; }

struct Extrapolation {
    Regime regime = Regime::Scar;
    FitResult fit;
    double limit = 0.0;          // w_inf
    double limit_error = 0.0;
    double drop_smallest_limit = std::numeric_limits<double>::quiet_NaN(); // same fit without the smallest L
    bool correction_term_added = false; // the 1/L^2 term in the thermal form
};

/// scar:    W/L = w_inf + b ln^2(L)/L^2
/// thermal: W/L = w_inf + d/L + c/L^2
inline Extrapolation extrapolate_ergotropy_density(SizeSeries const& data, Regime regime) {
    if (data.size() < 4) throw std::invalid_argument("extrapolate_ergotropy_density: need at least 4 sizes");
    auto run = [regime](SizeSeries const& d) {
        if (regime == Regime::Scar)
            return linear_least_squares("W/L = w_inf + b ln^2(L)/L^2", d, {"w_inf", "b"},
                                        {[](double) { return 1.0; },
                                         [](double l) { return std::pow(std::log(l), 2) / (l * l); }});
        return linear_least_squares("W/L = w_inf + d/L + c/L^2", d, {"w_inf", "d", "c"},
                                    {[](double) { return 1.0; }, [](double l) { return 1.0 / l; },
                                     [](double l) { return 1.0 / (l * l); }});
    };
    Extrapolation out;
    out.regime = regime;
    out.correction_term_added = regime == Regime::Thermal;
    out.fit = run(data);
    out.limit = out.fit.coefficient("w_inf");
    out.limit_error = out.fit.standard_error("w_inf");
    auto const sorted = detail::sorted_series(data);
    SizeSeries const tail(sorted.begin() + 1, sorted.end());
    if (tail.size() >= out.fit.names.size()) out.drop_smallest_limit = run(tail).coefficient("w_inf");
    return out;
}

/// Slope of an ordinary y = a + b x fit; used for trend checks.
inline double linear_slope(SizeSeries const& data) {
    return linear_least_squares("y = a + b x", data, {"a", "b"},
                                {[](double) { return 1.0; }, [](double x) { return x; }})
        .coefficient("b");
}

} // namespace pxp
