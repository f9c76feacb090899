#pragma once

// Robust chaos generation: piecewise-linear modulation of the forcing term
// and robustness checks by Lyapunov parameter sweeps.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symchaos/chaos_metrics.hpp"
#include "symchaos/error.hpp"
#include "symchaos/state_model.hpp"

namespace symchaos {

/// u(t) = p t + q_i on segment i = [t_i, t_{i+1}); the last segment is unbounded.
class PiecewiseLinearModulator {
public:
    PiecewiseLinearModulator(std::vector<std::size_t> breakpoints, double p, std::vector<double> q)
        : breakpoints_(std::move(breakpoints)), p_(p), q_(std::move(q)) {
        if (breakpoints_.empty() || breakpoints_.front() != 0) throw Error("modulator breakpoints must start at 0");
        for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
            if (breakpoints_[i] <= breakpoints_[i - 1]) throw Error("modulator breakpoints must be strictly increasing");
        }
        if (q_.size() != breakpoints_.size())
            throw Error("modulator needs one intercept per segment (" + std::to_string(breakpoints_.size()) + ")");
        if (!std::isfinite(p_) || std::any_of(q_.begin(), q_.end(), [](double v) { return !std::isfinite(v); }))
            throw Error("modulator coefficients must be finite");
    }

    static PiecewiseLinearModulator constant(double value) { return {{0}, 0.0, {value}}; }

    [[nodiscard]] std::size_t segment(std::size_t t) const {
        const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
        return static_cast<std::size_t>(it - breakpoints_.begin()) - 1;
    }

    [[nodiscard]] double value(std::size_t t) const { return p_ * static_cast<double>(t) + q_[segment(t)]; }

    [[nodiscard]] const std::vector<std::size_t>& breakpoints() const noexcept { return breakpoints_; }
    [[nodiscard]] double slope() const noexcept { return p_; }
    [[nodiscard]] const std::vector<double>& intercepts() const noexcept { return q_; }

private:
    std::vector<std::size_t> breakpoints_;
    double p_;
    std::vector<double> q_;
};

inline double modulator_value(const PiecewiseLinearModulator& m, std::size_t t) { return m.value(t); }

/// Parses "p:<slope>;breaks:<t1>,<t2>,...;q:<q0>,<q1>,..." (breaks exclude the
/// implicit 0). Returns nullopt for "none".
inline std::optional<PiecewiseLinearModulator> parse_modulator(const std::string& spec) {
    if (detail::trim(spec) == "none") return std::nullopt;
    std::optional<double> p;
    std::optional<std::vector<std::string_view>> breaks, q;
    std::string_view rest(spec);
    while (!rest.empty()) {
        const auto semi = rest.find(';');
        const auto part = detail::trim(rest.substr(0, semi));
        rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
        if (part.empty()) continue;
        const auto colon = part.find(':');
        if (colon == std::string_view::npos) throw Error("modulator spec part '" + std::string(part) + "' lacks ':'");
        const auto key = detail::trim(part.substr(0, colon));
        const auto value = detail::trim(part.substr(colon + 1));
        std::vector<std::string_view> items;
        if (!value.empty()) {
            std::size_t pos = 0;
            while (true) {
                const auto comma = value.find(',', pos);
                items.push_back(detail::trim(value.substr(pos, comma == std::string_view::npos ? comma : comma - pos)));
                if (comma == std::string_view::npos) break;
                pos = comma + 1;
            }
        }
        if (key == "p") {
            double v = 0.0;
            if (items.size() != 1 || !detail::parse_double(items[0], v)) throw Error("modulator 'p' must be one number");
            p = v;
        } else if (key == "breaks") {
            breaks = items;
        } else if (key == "q") {
            q = items;
        } else {
            throw Error("unknown modulator key '" + std::string(key) + "'");
        }
    }
    if (!p || !breaks || !q) throw Error("modulator spec needs p, breaks and q (or 'none')");

    std::vector<std::size_t> points{0};
    for (auto item : *breaks) {
        std::size_t t = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), t);
        if (ec != std::errc{} || ptr != item.data() + item.size() || item.empty())
            throw Error("modulator breakpoint '" + std::string(item) + "' is not a non-negative integer");
        points.push_back(t);
    }
    std::vector<double> intercepts;
    for (auto item : *q) {
        double v = 0.0;
        if (!detail::parse_double(item, v)) throw Error("modulator intercept '" + std::string(item) + "' is not a number");
        intercepts.push_back(v);
    }
    return PiecewiseLinearModulator(std::move(points), *p, std::move(intercepts));
}

/// Same recurrence as simulate() with the forcing term multiplied by u(t).
inline Trajectory simulate_robust(const LinearForcedModel& m, const PiecewiseLinearModulator& mod, std::size_t steps) {
    return detail::run_model(m, steps, [&mod](std::size_t t) { return mod.value(t); });
}

struct SweepWindow {
    double lo = 0.0;
    double hi = 0.0;
};

struct SweepResult {
    std::vector<double> params;
    std::vector<std::optional<double>> lambdas;  // empty where the orbit escaped
    std::vector<SweepWindow> windows;            // maximal runs of grid points with lambda < 0
};

struct SweepOptions {
    std::size_t n_transient = 1000;
    double x0_jitter = 1e-6;  // per-point uniform perturbation of x0, drawn from (seed, point index)
};

namespace detail {

inline std::vector<SweepWindow> negative_windows(const std::vector<double>& params,
                                                 const std::vector<std::optional<double>>& lambdas) {
    std::vector<SweepWindow> windows;
    std::size_t k = 0;
    while (k < params.size()) {
        if (lambdas[k] && *lambdas[k] < 0.0) {
            std::size_t e = k;
            while (e + 1 < params.size() && lambdas[e + 1] && *lambdas[e + 1] < 0.0) ++e;
            windows.push_back({params[k], params[e]});
            k = e + 1;
        } else {
            ++k;
        }
    }
    return windows;
}

}  // namespace detail

/// Lyapunov exponent of `family` on `steps` equally spaced parameters in [lo, hi].
inline SweepResult sweep_lyapunov(const MapFamily& family, double lo, double hi, std::size_t steps, std::size_t n_iter,
                                  double x0, std::uint64_t seed, const SweepOptions& opts = {}) {
    if (!(lo < hi)) throw Error("sweep needs lo < hi");
    if (steps < 2) throw Error("sweep needs at least 2 grid points");
    SweepResult res;
    res.params.resize(steps);
    res.lambdas.resize(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        res.params[i] = i + 1 == steps ? hi : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(steps - 1);
        double start = x0;
        if (opts.x0_jitter > 0.0) {
            std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                              static_cast<std::uint32_t>(i)};
            std::mt19937_64 rng(seq);
            start += std::uniform_real_distribution<double>(-opts.x0_jitter, opts.x0_jitter)(rng);
        }
        try {
            res.lambdas[i] = lyapunov_map(family, res.params[i], start, opts.n_transient, n_iter);
        } catch (const Error&) {
            res.lambdas[i] = std::nullopt;
        }
    }
    res.windows = detail::negative_windows(res.params, res.lambdas);
    return res;
}

struct WindowReport {
    std::vector<SweepWindow> windows;
    double smoothness = 0.0;  // max |second difference| of lambda over gap-free triples
    double smooth_tol = 0.5;
    bool robust = false;
};

inline WindowReport detect_windows(const SweepResult& result, double smooth_tol = 0.5) {
    WindowReport rep;
    rep.windows = detail::negative_windows(result.params, result.lambdas);
    rep.smooth_tol = smooth_tol;
    for (std::size_t k = 1; k + 1 < result.lambdas.size(); ++k) {
        const auto& a = result.lambdas[k - 1];
        const auto& b = result.lambdas[k];
        const auto& c = result.lambdas[k + 1];
        if (a && b && c) rep.smoothness = std::max(rep.smoothness, std::abs(*c - 2.0 * *b + *a));
    }
    rep.robust = rep.windows.empty() && rep.smoothness <= smooth_tol;
    return rep;
}

}  // namespace symchaos
