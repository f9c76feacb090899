// symchaos: command-line front end.
//
// Exit codes: 0 success, 1 I/O or validation error, 2 series not chaotic,
// 3 divergence guard tripped, 4 periodic windows found (or sweep not robust).

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "symchaos/symchaos.hpp"

namespace {

using namespace symchaos;

enum Exit : int { kOk = 0, kFailure = 1, kNotChaotic = 2, kDiverged = 3, kWindows = 4 };

struct CommonFlags {
    std::uint64_t seed = 0;
    std::optional<std::size_t> lag;
    std::optional<std::size_t> dim;
    std::size_t min_frag_len = 8;
    double prominence = 0.01;
    std::size_t q = 8;
    std::size_t M = 64;
    std::vector<double> betas;
    std::size_t top_k = 5;
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--seed", f.seed, "Seed for every stochastic step");
    cmd->add_option("--lag", f.lag, "Embedding delay (estimated when omitted)");
    cmd->add_option("--dim", f.dim, "Embedding dimension (estimated when omitted)")->check(CLI::Range(1, 16));
    cmd->add_option("--min-frag-len", f.min_frag_len, "Minimum fragment length in points")->check(CLI::Range(2, 1 << 30));
    cmd->add_option("--prominence", f.prominence, "Extremum prominence as a fraction of the range");
    cmd->add_option("--q", f.q, "Retained harmonics per descriptor");
    cmd->add_option("--M", f.M, "Descriptor resample count (power of two)");
    cmd->add_option("--betas", f.betas, "Comma-separated harmonic weights")->delimiter(',');
    cmd->add_option("--top-k", f.top_k, "Number of symmetry pairs to keep");
}

void emit(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        std::cout.flush();
    } else {
        write_text_file(path, text);
    }
}

/// Reads the value column: column 1 of a two-column (time, value) file, else `column`.
ScalarSeries load_auto(const std::string& path, std::optional<std::size_t> column, bool header) {
    const std::size_t col = column ? *column : (count_columns(path, header) == 2 ? 1 : 0);
    return load_series(path, col, header);
}

// ---------------------------------------------------------------- analyze ---

struct AnalyzeArgs {
    std::string input, output;
    std::optional<std::size_t> column;
    bool header = false;
    std::size_t max_dim = 8;
    std::size_t coord = 0;
    std::size_t population = 64, generations = 100;
    double chaos_threshold = 0.01;
};

int cmd_analyze(const AnalyzeArgs& a, const CommonFlags& f) {
    const auto series = load_auto(a.input, a.column, a.header);
    AnalysisOptions opts;
    opts.lag = f.lag;
    opts.dim = f.dim;
    opts.max_dim = a.max_dim;
    opts.chaos_threshold = a.chaos_threshold;
    opts.marking = MarkingOptions{a.coord, f.min_frag_len, f.prominence};
    opts.descriptor = DescriptorOptions{f.M, f.q};
    opts.betas = f.betas;
    opts.ga.seed = f.seed;
    opts.ga.population = a.population;
    opts.ga.generations = a.generations;
    opts.top_k = f.top_k;

    const auto report = analyze(series, opts);
    if (!report.chaotic) {
        std::cerr << "not chaotic: largest Lyapunov exponent " << report.lyapunov.lambda
                  << " does not exceed " << a.chaos_threshold << "\n";
        return kNotChaotic;
    }
    emit(a.output, report_to_json(report).dump(2) + "\n");
    std::cerr << "lambda " << report.lyapunov.lambda << ", " << report.fragments.size() << " fragments, "
              << report.best_pairs.size() << " pairs\n";
    return kOk;
}

// --------------------------------------------------------------- identify ---

struct IdentifyArgs {
    std::string input, output;
    std::optional<std::size_t> column, output_column;
    bool header = false;
    double alpha = 0.0001, gamma = 0.4;
};

int cmd_identify(const IdentifyArgs& a, const CommonFlags& f) {
    const ForcingSpec forcing{a.alpha, a.gamma};
    std::vector<Eigen::VectorXd> states;
    std::vector<double> observed;
    const bool json_input = a.input.size() >= 5 && a.input.substr(a.input.size() - 5) == ".json";
    if (json_input) {
        const auto tr = states_from_json(read_json_file(a.input));
        states = tr.states;
        observed = tr.outputs;
    } else {
        const auto series = load_auto(a.input, a.column, a.header);
        // Series too short or too flat to estimate an embedding fall back to
        // the default (lag 1, dim 2) and still reach identify(), whose
        // diagnostics (transition count, conditioning) say more about why the
        // data cannot be fitted.
        EmbeddingConfig cfg;
        bool estimable = true;
        if (f.lag) {
            cfg.lag = *f.lag;
        } else {
            try {
                cfg.lag = estimate_delay(series);
            } catch (const Error& e) {
                estimable = false;
                std::cerr << "warning: " << e.what() << "; using lag " << cfg.lag << "\n";
            }
        }
        if (f.dim) {
            cfg.dim = *f.dim;
        } else if (estimable) {
            try {
                cfg.dim = estimate_dimension(series, cfg.lag).dim;
            } catch (const Error& e) {
                std::cerr << "warning: " << e.what() << "; using dim " << cfg.dim << "\n";
            }
        }
        const auto att = embed(series, cfg);
        for (std::size_t k = 0; k < att.size(); ++k) {
            const auto p = att.point(k);
            states.emplace_back(Eigen::Map<const Eigen::VectorXd>(p.data(), static_cast<Eigen::Index>(p.size())));
        }
        if (a.output_column) {
            const auto y = load_series(a.input, *a.output_column, a.header);
            observed.assign(y.samples().begin(), y.samples().begin() + static_cast<std::ptrdiff_t>(states.size()));
        } else {
            for (const auto& s : states) observed.push_back(s(0));
        }
    }

    const auto id = identify(states, forcing);
    LinearForcedModel m;
    m.A = id.A;
    m.psi_amp = id.psi_amp;
    m.forcing = forcing;
    m.x0 = states.front();
    std::cout << "state residual " << id.residual << " (condition " << id.condition << ")\n";
    if (!observed.empty()) {
        const auto out = identify_output(states, observed);
        m.C = out.C;
        std::cout << "output residual " << out.residual << "\n";
    } else {
        m.C = Eigen::RowVectorXd::Unit(id.A.rows(), 0);
        std::cerr << "warning: no outputs given; C set to the first state coordinate\n";
    }
    emit(a.output, model_to_json(m).dump(2) + "\n");
    return kOk;
}

// --------------------------------------------------------------- generate ---

struct GenerateArgs {
    std::string model, output, states_out;
    std::size_t steps = 1000;
    std::string modulator = "none";
};

int cmd_generate(const GenerateArgs& a) {
    const auto model = load_model(a.model);
    const auto mod = parse_modulator(a.modulator);
    const auto tr = mod ? simulate_robust(model, *mod, a.steps) : simulate(model, a.steps);
    std::string csv;
    for (std::size_t t = 0; t < tr.outputs.size(); ++t) {
        csv += std::to_string(t);
        csv += ',';
        csv += format_double(tr.outputs[t]);
        csv += '\n';
    }
    emit(a.output, csv);
    if (!a.states_out.empty()) write_text_file(a.states_out, states_to_json(tr).dump() + "\n");
    return kOk;
}

// ------------------------------------------------------------------ sweep ---

struct SweepArgs {
    std::string family, output, report;
    double lo = 0.0, hi = 0.0, x0 = 0.3, smooth_tol = 0.5;
    std::size_t steps = 101, iters = 100000, transient = 1000;
};

int cmd_sweep(const SweepArgs& a, const CommonFlags& f) {
    const auto family = map_family_by_name(a.family);
    if (!family) throw Error("unknown map family '" + a.family + "' (expected logistic or tent)");
    SweepOptions opts;
    opts.n_transient = a.transient;
    const auto result = sweep_lyapunov(*family, a.lo, a.hi, a.steps, a.iters, a.x0, f.seed, opts);
    const auto windows = detect_windows(result, a.smooth_tol);
    emit(a.output, sweep_to_csv(result));
    std::string report_path = a.report;
    if (report_path.empty() && !a.output.empty() && a.output != "-") {
        const auto dot = a.output.rfind('.');
        report_path = (dot == std::string::npos ? a.output : a.output.substr(0, dot)) + ".windows.json";
    }
    const auto text = window_report_to_json(windows, family->name, result).dump(2) + "\n";
    if (report_path.empty()) {
        std::cerr << text;
    } else {
        write_text_file(report_path, text);
    }
    std::cerr << (windows.robust ? "robust" : "not robust") << ": " << windows.windows.size() << " windows\n";
    return windows.robust ? kOk : kWindows;
}

// ---------------------------------------------------------------- compare ---

struct CompareArgs {
    std::string original, generated, output;
    std::optional<std::size_t> column_original, column_generated;
    bool header = false;
    std::size_t best_pairs = 5;
};

int cmd_compare(const CompareArgs& a, const CommonFlags& f) {
    const auto orig = load_auto(a.original, a.column_original, a.header);
    const auto gen = load_auto(a.generated, a.column_generated, a.header);
    EmbeddingConfig cfg;
    cfg.lag = f.lag ? *f.lag : estimate_delay(orig);
    cfg.dim = f.dim ? *f.dim : estimate_dimension(orig, cfg.lag).dim;
    ComparisonOptions opts;
    opts.marking = MarkingOptions{0, f.min_frag_len, f.prominence};
    opts.descriptor = DescriptorOptions{f.M, f.q};
    opts.best_pairs = a.best_pairs;
    const auto rep = compare_dynamics(orig, gen, cfg, opts);
    emit(a.output, comparison_to_json(rep, cfg).dump(2) + "\n");
    if (rep.lambda_mismatch) std::cerr << "lambda mismatch: one series is chaotic, the other is not\n";
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Chaotic attractor analysis, symmetry search and robust chaos generation"};
    app.require_subcommand(1);

    CommonFlags common;

    AnalyzeArgs an;
    auto* analyze_cmd = app.add_subcommand("analyze", "Reconstruct, gate on chaos, mark fragments and search symmetric pairs");
    analyze_cmd->add_option("input", an.input, "Input CSV")->required();
    analyze_cmd->add_option("-o,--output", an.output, "Report JSON (stdout when omitted)");
    analyze_cmd->add_option("--column", an.column, "Value column (default: 1 for two-column files, else 0)");
    analyze_cmd->add_flag("--header", an.header, "Skip one header row");
    analyze_cmd->add_option("--max-dim", an.max_dim, "Largest embedding dimension tried")->check(CLI::Range(2, 16));
    analyze_cmd->add_option("--coord", an.coord, "Coordinate used for fragment marking");
    analyze_cmd->add_option("--population", an.population, "GA population");
    analyze_cmd->add_option("--generations", an.generations, "GA generations");
    analyze_cmd->add_option("--chaos-threshold", an.chaos_threshold, "Lambda must exceed this to continue");
    add_common(analyze_cmd, common);

    IdentifyArgs id;
    auto* identify_cmd = app.add_subcommand("identify", "Least-squares identification of A, psi and C");
    identify_cmd->add_option("input", id.input, "Series CSV or states JSON")->required();
    identify_cmd->add_option("-o,--output", id.output, "Model JSON (stdout when omitted)");
    identify_cmd->add_option("--column", id.column, "Series column for CSV input");
    identify_cmd->add_option("--output-column", id.output_column, "Observed output column for C");
    identify_cmd->add_flag("--header", id.header, "Skip one header row");
    identify_cmd->add_option("--alpha", id.alpha, "Forcing envelope exponent alpha");
    identify_cmd->add_option("--gamma", id.gamma, "Forcing phase exponent gamma");
    add_common(identify_cmd, common);

    GenerateArgs gen;
    auto* generate_cmd = app.add_subcommand("generate", "Simulate a model, optionally with a piecewise-linear modulator");
    generate_cmd->add_option("model", gen.model, "Model JSON")->required();
    generate_cmd->add_option("--steps", gen.steps, "Number of steps")->check(CLI::Range(1, 1 << 30));
    generate_cmd->add_option("--modulator", gen.modulator, "'none' or 'p:v;breaks:t1,t2;q:q0,q1,q2'");
    generate_cmd->add_option("-o,--output", gen.output, "Output CSV of t,y rows (stdout when omitted)");
    generate_cmd->add_option("--states-out", gen.states_out, "Also write the state trajectory as JSON");
    add_common(generate_cmd, common);

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "Lyapunov sweep of a map family with periodic-window detection");
    sweep_cmd->add_option("--family", sw.family, "logistic or tent")->required();
    sweep_cmd->add_option("--lo", sw.lo, "Lower parameter bound")->required();
    sweep_cmd->add_option("--hi", sw.hi, "Upper parameter bound")->required();
    sweep_cmd->add_option("--steps", sw.steps, "Grid points");
    sweep_cmd->add_option("--iters", sw.iters, "Iterates averaged per point");
    sweep_cmd->add_option("--transient", sw.transient, "Discarded iterates per point");
    sweep_cmd->add_option("--x0", sw.x0, "Initial state");
    sweep_cmd->add_option("--smooth-tol", sw.smooth_tol, "Bound on the second difference of lambda");
    sweep_cmd->add_option("-o,--output", sw.output, "Sweep CSV (stdout when omitted)");
    sweep_cmd->add_option("--report", sw.report, "Window report JSON (default: <output>.windows.json)");
    add_common(sweep_cmd, common);

    CompareArgs cmp;
    auto* compare_cmd = app.add_subcommand("compare", "Compare the dynamics of an original and a generated series");
    compare_cmd->add_option("original", cmp.original, "Original series CSV")->required();
    compare_cmd->add_option("generated", cmp.generated, "Generated series CSV")->required();
    compare_cmd->add_option("-o,--output", cmp.output, "Comparison JSON (stdout when omitted)");
    compare_cmd->add_option("--column-original", cmp.column_original, "Value column of the original file");
    compare_cmd->add_option("--column-generated", cmp.column_generated, "Value column of the generated file");
    compare_cmd->add_flag("--header", cmp.header, "Skip one header row in both files");
    compare_cmd->add_option("--pairs", cmp.best_pairs, "Number K of closest descriptor pairs averaged");
    add_common(compare_cmd, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kFailure;
    }

    try {
        if (*analyze_cmd) return cmd_analyze(an, common);
        if (*identify_cmd) return cmd_identify(id, common);
        if (*generate_cmd) return cmd_generate(gen);
        if (*sweep_cmd) return cmd_sweep(sw, common);
        if (*compare_cmd) return cmd_compare(cmp, common);
    } catch (const DivergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kDiverged;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kFailure;
    }
    return kFailure;
}
