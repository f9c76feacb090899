#pragma once

// Chaos indicators: largest Lyapunov exponent (from data and from 1-D maps),
// forecast horizon and periodicity detection.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "symchaos/detail/kdtree.hpp"
#include "symchaos/error.hpp"
#include "symchaos/series.hpp"

namespace symchaos {

struct LyapunovEstimate {
    double lambda = 0.0;                 // nats per time unit
    std::size_t fit_first = 1;           // fit range over separations j, inclusive
    std::size_t fit_last = 1;
    double quality = 0.0;                // R^2 of the linear fit, in [0, 1]
    double uncertainty = 0.0;            // standard error of lambda
    std::vector<double> mean_log_divergence;  // <ln d(j)> for j = 0..horizon
};

namespace detail {

struct LineFit {
    double slope = 0.0;
    double r2 = 0.0;
    double slope_stderr = 0.0;
};

inline LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        mx += x[k];
        my += y[k];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        sxx += (x[k] - mx) * (x[k] - mx);
        sxy += (x[k] - mx) * (y[k] - my);
        syy += (y[k] - my) * (y[k] - my);
    }
    LineFit fit;
    fit.slope = sxy / sxx;
    const double sse = std::max(0.0, syy - fit.slope * sxy);
    fit.r2 = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
    fit.slope_stderr = x.size() > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
    return fit;
}

}  // namespace detail

/// Rosenstein estimate of the largest Lyapunov exponent.
///
/// Every reference point is paired with its nearest neighbour at least
/// `min_separation` samples away in time (default lag * dim); the mean log
/// distance of the pairs is tracked for `horizon` steps and its slope over
/// j in [1, horizon/2] is the exponent per step, divided by the source dt.
inline LyapunovEstimate largest_lyapunov(const EmbeddedAttractor& attractor,
                                         std::optional<std::size_t> min_separation = std::nullopt,
                                         std::size_t horizon = 30) {
    constexpr std::size_t kMinPoints = 500;
    if (attractor.size() < kMinPoints)
        throw Error("too few points for Lyapunov estimate: " + std::to_string(attractor.size()) +
                    " < 500");
    if (horizon < 4) throw Error("Lyapunov horizon must be >= 4");
    const std::size_t dim = attractor.dim();
    const std::size_t min_sep = std::max<std::size_t>(
        1, min_separation.value_or(attractor.lag() * attractor.dim()));
    const std::size_t usable = attractor.size() - horizon;

    const detail::KdTree tree(attractor.flat().first(usable * dim), dim, usable);
    std::vector<double> log_sum(horizon + 1, 0.0);
    std::vector<std::size_t> counts(horizon + 1, 0);
    for (std::size_t i = 0; i < usable; ++i) {
        const auto nb = tree.nearest(attractor.point(i), i, min_sep);
        if (!nb.found()) continue;
        for (std::size_t j = 0; j <= horizon; ++j) {
            double d2 = 0.0;
            for (std::size_t a = 0; a < dim; ++a) {
                const double diff = attractor.at(i + j, a) - attractor.at(nb.index + j, a);
                d2 += diff * diff;
            }
            if (d2 > 0.0) {
                log_sum[j] += 0.5 * std::log(d2);
                ++counts[j];
            }
        }
    }

    LyapunovEstimate est;
    est.fit_first = 1;
    est.fit_last = horizon / 2;
    std::vector<double> xs, ys;
    for (std::size_t j = 0; j <= horizon; ++j) {
        const double mean = counts[j] > 0 ? log_sum[j] / static_cast<double>(counts[j])
                                          : std::numeric_limits<double>::quiet_NaN();
        est.mean_log_divergence.push_back(mean);
        if (j >= est.fit_first && j <= est.fit_last) {
            if (counts[j] == 0)
                throw Error("all neighbor distances are zero (duplicated data) at separation " +
                            std::to_string(j));
            xs.push_back(static_cast<double>(j));
            ys.push_back(mean);
        }
    }
    const auto fit = detail::fit_line(xs, ys);
    est.lambda = fit.slope / attractor.source_dt();
    est.uncertainty = fit.slope_stderr / attractor.source_dt();
    est.quality = fit.r2;
    return est;
}

enum class MapKind { logistic, tent, custom_affine_forced };

/// One-parameter family of 1-D maps used for Lyapunov sweeps.
struct MapFamily {
    using Rule = std::function<double(double, double)>;  // (state, param)

    MapKind kind = MapKind::custom_affine_forced;
    std::string name;
    std::string param_name;
    Rule iterate;
    Rule derivative;  // may be empty for families without a 1-D derivative

    /// x -> r x (1 - x) on [0, 1].
    static MapFamily logistic() {
        return {MapKind::logistic, "logistic", "r",
                [](double x, double r) { return r * x * (1.0 - x); },
                [](double x, double r) { return r * (1.0 - 2.0 * x); }};
    }

    /// x -> s min(x, 1 - x) on [0, 1]; |slope| is s everywhere.
    static MapFamily tent() {
        return {MapKind::tent, "tent", "s",
                [](double x, double s) { return s * std::min(x, 1.0 - x); },
                [](double x, double s) { return x < 0.5 ? s : -s; }};
    }

    static MapFamily custom(std::string name, std::string param_name, Rule iterate, Rule derivative) {
        return {MapKind::custom_affine_forced, std::move(name), std::move(param_name),
                std::move(iterate), std::move(derivative)};
    }
};

inline std::optional<MapFamily> map_family_by_name(const std::string& name) {
    if (name == "logistic") return MapFamily::logistic();
    if (name == "tent") return MapFamily::tent();
    return std::nullopt;
}

/// Average of ln|f'(x_k)| along the orbit after `n_transient` discarded iterates.
/// A zero derivative contributes ln(DBL_MIN) instead of -inf.
inline double lyapunov_map(const MapFamily& family, double param, double x0, std::size_t n_transient,
                           std::size_t n_iter) {
    if (!family.derivative) throw Error("map family '" + family.name + "' has no derivative rule");
    if (n_iter < 1) throw Error("n_iter must be >= 1");
    static const double kLogFloor = std::log(std::numeric_limits<double>::min());

    double x = x0;
    for (std::size_t k = 0; k < n_transient; ++k) {
        x = family.iterate(x, param);
        if (!std::isfinite(x)) throw Error("orbit escaped to a non-finite value during transient");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < n_iter; ++k) {
        const double slope = std::abs(family.derivative(x, param));
        sum += slope > 0.0 ? std::log(slope) : kLogFloor;
        x = family.iterate(x, param);
        if (!std::isfinite(x)) throw Error("orbit escaped to a non-finite value at iterate " + std::to_string(k));
    }
    return sum / static_cast<double>(n_iter);
}

/// Lyapunov time for an error to grow from delta0 to delta_tol.
inline double forecast_horizon(double lambda, double delta0, double delta_tol) {
    if (!(delta0 > 0.0) || !(delta_tol > delta0)) throw Error("forecast horizon needs delta_tol > delta0 > 0");
    if (!(lambda > 0.0)) throw Error("non-chaotic: horizon unbounded for lambda <= 0");
    return std::log(delta_tol / delta0) / lambda;
}

/// True when |s[k+P] - s[k]| <= rel_tol * range(series) over the trailing
/// 2 * max_period samples.
inline bool accepts_period(std::span<const double> series, std::size_t period, std::size_t max_period,
                           double rel_tol) {
    if (series.size() < 3 * max_period) throw Error("series too short for periodicity test");
    const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
    const double tol = rel_tol * (*hi - *lo);
    const std::size_t n = series.size();
    for (std::size_t k = n - 2 * max_period; k + period < n; ++k) {
        if (std::abs(series[k + period] - series[k]) > tol) return false;
    }
    return true;
}

inline std::optional<std::size_t> detect_periodicity(std::span<const double> series, std::size_t max_period,
                                                     double rel_tol) {
    if (max_period < 1) throw Error("max_period must be >= 1");
    if (series.size() < 3 * max_period)
        throw Error("series too short for periodicity test: need >= 3 * max_period samples");
    for (std::size_t p = 1; p <= max_period; ++p) {
        if (accepts_period(series, p, max_period, rel_tol)) return p;
    }
    return std::nullopt;
}

}  // namespace symchaos
