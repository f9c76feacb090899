#pragma once

// Splits a trajectory into monotone fragments delimited by prominent local
// extrema of one coordinate.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "symchaos/error.hpp"
#include "symchaos/series.hpp"

namespace symchaos {

enum class Direction { increasing, decreasing };

inline const char* to_string(Direction d) { return d == Direction::increasing ? "increasing" : "decreasing"; }

struct Fragment {
    std::size_t start = 0;  // inclusive point index
    std::size_t end = 0;    // inclusive point index
    std::size_t coord = 0;
    Direction direction = Direction::increasing;

    [[nodiscard]] std::size_t length() const noexcept { return end - start + 1; }
    friend bool operator==(const Fragment&, const Fragment&) = default;
};

struct MarkingOptions {
    std::size_t coord = 0;
    std::size_t min_len = 8;
    double prominence = 0.01;  // fraction of the projection range
};

struct MarkingResult {
    std::vector<Fragment> fragments;
    std::vector<std::size_t> extrema;  // point indices of accepted extrema
    bool constant_projection = false;
};

namespace detail {

/// Runs of exactly equal values collapse to their first index.
struct Compressed {
    std::vector<double> values;
    std::vector<std::size_t> first_index;
};

inline Compressed compress_plateaus(const std::vector<double>& proj) {
    Compressed c;
    for (std::size_t k = 0; k < proj.size(); ++k) {
        if (k == 0 || proj[k] != proj[k - 1]) {
            c.values.push_back(proj[k]);
            c.first_index.push_back(k);
        }
    }
    return c;
}

/// Hysteresis extremum scan: a running max (min) is accepted once the signal
/// falls (rises) from it by at least `threshold`. Returns compressed indices.
inline std::vector<std::size_t> prominent_extrema(const std::vector<double>& v, double threshold) {
    const auto reverses = [threshold](double from, double to) {
        const double drop = std::abs(from - to);
        return drop > 0.0 && drop >= threshold;
    };
    std::vector<std::size_t> extrema;
    if (v.size() < 3) return extrema;

    std::size_t hi = 0, lo = 0;
    int trend = 0;  // +1 rising toward a max, -1 falling toward a min
    std::size_t cand = 0;
    std::size_t i = 1;
    for (; i < v.size() && trend == 0; ++i) {
        if (v[i] > v[hi]) hi = i;
        if (v[i] < v[lo]) lo = i;
        if (hi < i && reverses(v[hi], v[i])) {
            if (hi != 0) extrema.push_back(hi);
            trend = -1;
            cand = i;
        } else if (lo < i && reverses(v[lo], v[i])) {
            if (lo != 0) extrema.push_back(lo);
            trend = +1;
            cand = i;
        }
    }
    for (; i < v.size(); ++i) {
        if (trend > 0) {
            if (v[i] > v[cand]) {
                cand = i;
            } else if (reverses(v[cand], v[i])) {
                extrema.push_back(cand);
                trend = -1;
                cand = i;
            }
        } else {
            if (v[i] < v[cand]) {
                cand = i;
            } else if (reverses(v[cand], v[i])) {
                extrema.push_back(cand);
                trend = +1;
                cand = i;
            }
        }
    }
    return extrema;
}

}  // namespace detail

/// Marks monotone fragments along `opts.coord`.
///
/// Boundaries are the first point, every prominent extremum and the last
/// point. Between two boundaries the fragment is the longest run of steps
/// moving in the boundary-to-boundary direction (earliest run on ties), so
/// sub-prominence ripples are trimmed rather than split into new fragments.
inline MarkingResult mark_fragments(const EmbeddedAttractor& attractor, const MarkingOptions& opts = {}) {
    if (opts.coord >= attractor.dim())
        throw Error("marking coordinate " + std::to_string(opts.coord) + " out of range for dim " +
                    std::to_string(attractor.dim()));
    if (opts.min_len < 2) throw Error("min_len must be >= 2");
    if (!(opts.prominence >= 0.0)) throw Error("prominence must be >= 0");

    std::vector<double> proj(attractor.size());
    for (std::size_t k = 0; k < proj.size(); ++k) proj[k] = attractor.at(k, opts.coord);

    MarkingResult result;
    const auto c = detail::compress_plateaus(proj);
    if (c.values.size() < 2) {
        result.constant_projection = true;
        return result;
    }
    const auto [lo, hi] = std::minmax_element(c.values.begin(), c.values.end());
    const auto ext = detail::prominent_extrema(c.values, opts.prominence * (*hi - *lo));
    for (auto e : ext) result.extrema.push_back(c.first_index[e]);

    std::vector<std::size_t> bounds;
    bounds.push_back(0);
    bounds.insert(bounds.end(), ext.begin(), ext.end());
    if (bounds.back() != c.values.size() - 1) bounds.push_back(c.values.size() - 1);

    for (std::size_t b = 0; b + 1 < bounds.size(); ++b) {
        const std::size_t from = bounds[b];
        const std::size_t to = bounds[b + 1];
        const bool rising = c.values[to] > c.values[from];

        std::size_t best_start = from, best_end = from;
        std::size_t run_start = from;
        for (std::size_t k = from + 1; k <= to; ++k) {
            const bool with = rising ? c.values[k] > c.values[k - 1] : c.values[k] < c.values[k - 1];
            if (!with) run_start = k;
            if (k - run_start > best_end - best_start) {
                best_start = run_start;
                best_end = k;
            }
        }
        if (best_end == best_start) continue;
        Fragment f{c.first_index[best_start], c.first_index[best_end], opts.coord,
                   rising ? Direction::increasing : Direction::decreasing};
        if (f.length() >= opts.min_len) result.fragments.push_back(f);
    }
    return result;
}

}  // namespace symchaos
