#pragma once

// End-to-end analysis of one scalar series: reconstruction, chaos gate,
// fragment marking, descriptors, symmetry pair search and forecast horizon.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "symchaos/chaos_metrics.hpp"
#include "symchaos/descriptors.hpp"
#include "symchaos/marking.hpp"
#include "symchaos/pair_search.hpp"
#include "symchaos/series.hpp"

namespace symchaos {

struct AnalysisOptions {
    std::optional<std::size_t> lag;  // estimated when absent
    std::optional<std::size_t> dim;  // estimated when absent
    std::size_t max_dim = 8;
    double fnn_tol = 0.01;
    std::size_t lyapunov_horizon = 30;
    double chaos_threshold = 0.01;   // gate: lambda must exceed this
    MarkingOptions marking;
    DescriptorOptions descriptor;
    std::vector<double> betas;       // uniform when empty
    GaConfig ga;
    std::size_t top_k = 5;
    std::size_t exhaustive_limit = 64;
    double delta0 = 1e-6;            // forecast error bounds, relative to the series range
    double delta_tol = 1e-2;
};

struct AnalysisReport {
    std::string label;
    std::uint64_t seed = 0;
    EmbeddingConfig embedding;
    bool lag_estimated = false;
    bool dim_estimated = false;
    std::vector<double> false_fractions;
    LyapunovEstimate lyapunov;
    bool chaotic = false;
    std::vector<Fragment> fragments;
    std::vector<Descriptor> descriptors;  // one per fragment, same order
    std::vector<SymmetryPair> best_pairs;
    std::optional<std::vector<SymmetryPair>> exhaustive_pairs;
    std::optional<double> horizon;
    std::vector<std::string> warnings;
};

/// Runs the analysis pipeline. Stops right after the Lyapunov estimate when
/// the exponent does not exceed the chaos threshold (report.chaotic = false).
inline AnalysisReport analyze(const ScalarSeries& series, const AnalysisOptions& opts = {}) {
    AnalysisReport rep;
    rep.label = series.label();
    rep.seed = opts.ga.seed;

    rep.lag_estimated = !opts.lag.has_value();
    rep.embedding.lag = opts.lag.value_or(0);
    if (rep.lag_estimated) rep.embedding.lag = estimate_delay(series);
    rep.dim_estimated = !opts.dim.has_value();
    if (rep.dim_estimated) {
        const auto est = estimate_dimension(series, rep.embedding.lag, opts.max_dim, opts.fnn_tol);
        rep.embedding.dim = est.dim;
        rep.false_fractions = est.false_fractions;
        if (est.saturated) rep.warnings.push_back("false-neighbour tolerance not reached; using max_dim");
    } else {
        rep.embedding.dim = *opts.dim;
    }

    const auto att = embed(series, rep.embedding);
    rep.lyapunov = largest_lyapunov(att, std::nullopt, opts.lyapunov_horizon);
    rep.chaotic = rep.lyapunov.lambda > opts.chaos_threshold;
    if (!rep.chaotic) return rep;

    auto marking = opts.marking;
    if (marking.coord >= att.dim()) marking.coord = 0;
    const auto marked = mark_fragments(att, marking);
    if (marked.constant_projection) rep.warnings.push_back("constant projection: no fragments");
    for (const auto& f : marked.fragments) {
        if (f.length() < 4) continue;
        rep.fragments.push_back(f);
        rep.descriptors.push_back(normalize(att, f, opts.descriptor));
    }

    const SpectralWeights w = opts.betas.empty() ? SpectralWeights::uniform(opts.descriptor.q)
                                                 : SpectralWeights{opts.betas};
    if (rep.descriptors.size() >= 2) {
        rep.best_pairs = ga_search(rep.descriptors, w, opts.ga, opts.top_k);
        if (rep.descriptors.size() <= opts.exhaustive_limit)
            rep.exhaustive_pairs = exhaustive_search(rep.descriptors, w, opts.top_k);
    } else {
        rep.warnings.push_back("fewer than 2 fragments: no symmetry pairs");
    }

    const auto [lo, hi] = std::minmax_element(series.samples().begin(), series.samples().end());
    const double range = *hi - *lo;
    rep.horizon = forecast_horizon(rep.lyapunov.lambda, opts.delta0 * range, opts.delta_tol * range);
    return rep;
}

}  // namespace symchaos
