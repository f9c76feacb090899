#pragma once

// JSON and CSV file formats: model files, analysis reports, sweep tables,
// window reports and comparison reports, with re-validation on read.

#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <json.hpp>

#include "symchaos/analysis.hpp"
#include "symchaos/error.hpp"
#include "symchaos/robust_gen.hpp"
#include "symchaos/state_model.hpp"

namespace symchaos {

using Json = nlohmann::json;

/// Shortest decimal text that parses back to exactly `v`.
inline std::string format_double(double v) {
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file '" + path + "'");
    try {
        return Json::parse(in);
    } catch (const Json::exception& e) {
        throw Error("invalid JSON in '" + path + "': " + e.what());
    }
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write file '" + path + "'");
    out << text;
    if (!out) throw Error("failed writing file '" + path + "'");
}

namespace detail {

inline Json vector_json(const Eigen::VectorXd& v) {
    Json j = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) j.push_back(v(i));
    return j;
}

inline std::vector<double> number_array(const Json& j, const std::string& what) {
    if (!j.is_array()) throw Error("'" + what + "' must be an array");
    std::vector<double> out;
    for (const auto& e : j) {
        if (!e.is_number()) throw Error("'" + what + "' must contain only numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

inline Eigen::VectorXd eigen_vector(const Json& j, const std::string& what) {
    const auto v = number_array(j, what);
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

inline const Json& field(const Json& j, const char* name) {
    if (!j.is_object() || !j.contains(name)) throw Error(std::string("missing field '") + name + "'");
    return j.at(name);
}

inline void require(bool ok, const std::string& msg) {
    if (!ok) throw Error("invalid report: " + msg);
}

}  // namespace detail

// ---------------------------------------------------------------- model ---

inline Json model_to_json(const LinearForcedModel& m) {
    m.validate();
    Json a = Json::array();
    for (Eigen::Index r = 0; r < m.A.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.A.cols(); ++c) a.push_back(m.A(r, c));
    }
    return Json{{"n", m.n()},
                {"A", a},
                {"psi_amp", detail::vector_json(m.psi_amp)},
                {"forcing", {{"alpha", m.forcing.alpha}, {"gamma", m.forcing.gamma}}},
                {"C", detail::vector_json(m.C.transpose())},
                {"x0", detail::vector_json(m.x0)}};
}

/// Accepts "A" either flat row-major (n*n numbers) or as n rows of n numbers.
inline LinearForcedModel model_from_json(const Json& j) {
    using detail::field;
    const auto& nj = field(j, "n");
    if (!nj.is_number_integer() || nj.get<long long>() < 1) throw Error("model 'n' must be a positive integer");
    const auto n = static_cast<Eigen::Index>(nj.get<long long>());

    std::vector<double> flat;
    const auto& aj = field(j, "A");
    if (aj.is_array() && !aj.empty() && aj.front().is_array()) {
        for (const auto& row : aj) {
            const auto r = detail::number_array(row, "A");
            flat.insert(flat.end(), r.begin(), r.end());
        }
    } else {
        flat = detail::number_array(aj, "A");
    }
    if (static_cast<Eigen::Index>(flat.size()) != n * n) throw Error("model 'A' must hold n*n entries");

    LinearForcedModel m;
    m.A = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(flat.data(), n, n);
    m.psi_amp = detail::eigen_vector(field(j, "psi_amp"), "psi_amp");
    const auto& fj = field(j, "forcing");
    m.forcing.alpha = detail::number_array(Json::array({field(fj, "alpha")}), "forcing.alpha")[0];
    m.forcing.gamma = detail::number_array(Json::array({field(fj, "gamma")}), "forcing.gamma")[0];
    m.C = detail::eigen_vector(field(j, "C"), "C").transpose();
    m.x0 = detail::eigen_vector(field(j, "x0"), "x0");
    m.validate();
    return m;
}

inline LinearForcedModel load_model(const std::string& path) { return model_from_json(read_json_file(path)); }

// ---------------------------------------------------------------- states ---

/// {"states": [[...], ...], "outputs": [...]}; outputs are optional.
inline Json states_to_json(const Trajectory& tr) {
    Json states = Json::array();
    for (const auto& s : tr.states) states.push_back(detail::vector_json(s));
    return Json{{"states", states}, {"outputs", tr.outputs}};
}

inline Trajectory states_from_json(const Json& j) {
    Trajectory tr;
    const auto& sj = detail::field(j, "states");
    if (!sj.is_array()) throw Error("'states' must be an array of state vectors");
    for (const auto& s : sj) tr.states.push_back(detail::eigen_vector(s, "states"));
    if (j.contains("outputs")) {
        tr.outputs = detail::number_array(j.at("outputs"), "outputs");
        if (tr.outputs.size() != tr.states.size()) throw Error("'outputs' length differs from 'states'");
    }
    return tr;
}

// --------------------------------------------------------- analysis parts ---

inline Json fragment_to_json(const Fragment& f) {
    return Json{{"start", f.start}, {"end", f.end}, {"coord", f.coord}, {"direction", to_string(f.direction)}};
}

inline Json descriptor_to_json(const Descriptor& d, std::size_t fragment) {
    Json rot = Json::array();
    for (Eigen::Index r = 0; r < d.pose.rotation.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < d.pose.rotation.cols(); ++c) row.push_back(d.pose.rotation(r, c));
        rot.push_back(row);
    }
    Json spec = Json::array();
    for (Eigen::Index i = 0; i < d.spectrum.rows(); ++i) {
        Json harmonic = Json::array();
        for (Eigen::Index c = 0; c < d.spectrum.cols(); ++c)
            harmonic.push_back(Json::array({d.spectrum(i, c).real(), d.spectrum(i, c).imag()}));
        spec.push_back(harmonic);
    }
    return Json{{"fragment", fragment},
                {"M", d.M()},
                {"q", d.q()},
                {"n", d.n()},
                {"degenerate", d.degenerate},
                {"pose",
                 {{"translation", detail::vector_json(d.pose.translation)}, {"rotation", rot}, {"scale", d.pose.scale}}},
                {"spectrum", spec}};
}

inline Json pairs_to_json(const std::vector<SymmetryPair>& pairs) {
    Json out = Json::array();
    for (const auto& p : pairs) {
        out.push_back({{"idx_a", p.idx_a},
                       {"idx_b", p.idx_b},
                       {"distance", p.distance},
                       {"descriptor_a", p.idx_a},
                       {"descriptor_b", p.idx_b}});
    }
    return out;
}

inline Json lyapunov_to_json(const LyapunovEstimate& l) {
    return Json{{"lambda", l.lambda},
                {"fit_range", {l.fit_first, l.fit_last}},
                {"quality", l.quality},
                {"uncertainty", l.uncertainty}};
}

inline Json report_to_json(const AnalysisReport& r) {
    Json frags = Json::array();
    for (const auto& f : r.fragments) frags.push_back(fragment_to_json(f));
    Json descs = Json::array();
    for (std::size_t i = 0; i < r.descriptors.size(); ++i) descs.push_back(descriptor_to_json(r.descriptors[i], i));
    Json j{{"label", r.label},
           {"seed", r.seed},
           {"embedding",
            {{"lag", r.embedding.lag},
             {"dim", r.embedding.dim},
             {"lag_estimated", r.lag_estimated},
             {"dim_estimated", r.dim_estimated},
             {"false_fractions", r.false_fractions}}},
           {"lyapunov", lyapunov_to_json(r.lyapunov)},
           {"chaotic", r.chaotic},
           {"fragments", frags},
           {"descriptors", descs},
           {"best_pairs", pairs_to_json(r.best_pairs)},
           {"horizon", r.horizon ? Json(*r.horizon) : Json(nullptr)},
           {"warnings", r.warnings}};
    if (r.exhaustive_pairs) j["exhaustive_pairs"] = pairs_to_json(*r.exhaustive_pairs);
    return j;
}

namespace detail {

inline void validate_pairs(const Json& pairs, std::size_t fragment_count, const std::string& what) {
    require(pairs.is_array(), what + " must be an array");
    double prev = -1.0;
    for (const auto& p : pairs) {
        const auto a = field(p, "idx_a").get<std::size_t>();
        const auto b = field(p, "idx_b").get<std::size_t>();
        const double d = field(p, "distance").get<double>();
        require(a < b, what + ": idx_a < idx_b");
        require(b < fragment_count, what + ": fragment index out of range");
        require(d >= 0.0 && std::isfinite(d), what + ": distance >= 0");
        require(d >= prev, what + " sorted ascending by distance");
        prev = d;
    }
}

}  // namespace detail

/// Structural and invariant checks on a parsed analysis report.
inline void validate_report_json(const Json& j) {
    using detail::field;
    using detail::require;
    const auto& emb = field(j, "embedding");
    const auto lag = field(emb, "lag").get<long long>();
    const auto dim = field(emb, "dim").get<long long>();
    require(lag >= 1, "embedding lag >= 1");
    require(dim >= 1 && dim <= 16, "embedding dim in [1, 16]");

    const auto& ly = field(j, "lyapunov");
    const auto fr = field(ly, "fit_range");
    require(fr.is_array() && fr.size() == 2 && fr[0].get<long long>() <= fr[1].get<long long>(), "fit_range nonempty");
    const double quality = field(ly, "quality").get<double>();
    require(quality >= 0.0 && quality <= 1.0, "lyapunov quality in [0, 1]");
    require(std::isfinite(field(ly, "lambda").get<double>()), "lambda finite");

    const auto& frags = field(j, "fragments");
    require(frags.is_array(), "fragments array");
    for (const auto& f : frags) {
        require(field(f, "start").get<long long>() <= field(f, "end").get<long long>(), "fragment start <= end");
        require(field(f, "coord").get<long long>() < dim, "fragment coord < dim");
        const auto dir = field(f, "direction").get<std::string>();
        require(dir == "increasing" || dir == "decreasing", "fragment direction");
    }
    const auto& descs = field(j, "descriptors");
    require(descs.is_array() && descs.size() == frags.size(), "one descriptor per fragment");
    for (const auto& d : descs) {
        const auto n = field(d, "n").get<std::size_t>();
        const auto& pose = field(d, "pose");
        require(field(pose, "scale").get<double>() > 0.0, "descriptor scale > 0");
        const auto& rj = field(pose, "rotation");
        require(rj.is_array() && rj.size() == n, "rotation is n x n");
        Eigen::MatrixXd rot(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (std::size_t r = 0; r < n; ++r) {
            const auto row = detail::number_array(rj[r], "rotation");
            require(row.size() == n, "rotation is n x n");
            for (std::size_t c = 0; c < n; ++c) rot(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
        }
        const double err = (rot.transpose() * rot - Eigen::MatrixXd::Identity(rot.rows(), rot.cols())).cwiseAbs().maxCoeff();
        require(err < 1e-9, "rotation orthogonal");
        const auto& spec = field(d, "spectrum");
        require(spec.is_array() && spec.size() == field(d, "q").get<std::size_t>(), "spectrum has q harmonics");
        for (const auto& h : spec) {
            require(h.is_array() && h.size() == n, "spectrum harmonic has n coordinates");
            for (const auto& c : h) require(c.is_array() && c.size() == 2, "spectrum entries are [re, im]");
        }
    }
    detail::validate_pairs(field(j, "best_pairs"), frags.size(), "best_pairs");
    if (j.contains("exhaustive_pairs")) detail::validate_pairs(j.at("exhaustive_pairs"), frags.size(), "exhaustive_pairs");
    const auto& hz = field(j, "horizon");
    require(hz.is_null() || (hz.is_number() && hz.get<double>() > 0.0), "horizon positive or null");
    require(field(j, "warnings").is_array(), "warnings array");
}

// ---------------------------------------------------------------- sweeps ---

/// "param,lambda" header, one row per grid point, empty lambda for gaps.
inline std::string sweep_to_csv(const SweepResult& s) {
    std::string out = "param,lambda\n";
    for (std::size_t i = 0; i < s.params.size(); ++i) {
        out += format_double(s.params[i]);
        out += ',';
        if (s.lambdas[i]) out += format_double(*s.lambdas[i]);
        out += '\n';
    }
    return out;
}

inline SweepResult sweep_from_csv(const std::string& text) {
    SweepResult s;
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || detail::trim(line) != "param,lambda") throw Error("sweep CSV must start with 'param,lambda'");
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw Error("sweep CSV row without comma");
        double p = 0.0, l = 0.0;
        if (!detail::parse_double(detail::trim(std::string_view(line).substr(0, comma)), p))
            throw Error("bad sweep parameter");
        s.params.push_back(p);
        const auto cell = detail::trim(std::string_view(line).substr(comma + 1));
        if (cell.empty()) {
            s.lambdas.emplace_back();
        } else {
            if (!detail::parse_double(cell, l)) throw Error("bad sweep lambda");
            s.lambdas.emplace_back(l);
        }
    }
    s.windows = detail::negative_windows(s.params, s.lambdas);
    return s;
}

inline Json window_report_to_json(const WindowReport& r, const std::string& family, const SweepResult& s) {
    Json windows = Json::array();
    for (const auto& w : r.windows) windows.push_back(Json::array({w.lo, w.hi}));
    std::size_t gaps = 0;
    for (const auto& l : s.lambdas) gaps += l ? 0 : 1;
    return Json{{"family", family},
                {"lo", s.params.front()},
                {"hi", s.params.back()},
                {"points", s.params.size()},
                {"gaps", gaps},
                {"windows", windows},
                {"smoothness", r.smoothness},
                {"smooth_tol", r.smooth_tol},
                {"verdict", r.robust ? "robust" : "not robust"}};
}

inline void validate_window_report_json(const Json& j) {
    using detail::field;
    using detail::require;
    const double lo = field(j, "lo").get<double>();
    const double hi = field(j, "hi").get<double>();
    require(lo < hi, "lo < hi");
    const auto& windows = field(j, "windows");
    require(windows.is_array(), "windows array");
    for (const auto& w : windows) {
        require(w.is_array() && w.size() == 2, "window is [lo, hi]");
        const double a = w[0].get<double>(), b = w[1].get<double>();
        require(lo <= a && a <= b && b <= hi, "window inside the swept range");
    }
    const bool robust = field(j, "verdict").get<std::string>() == "robust";
    require(robust == (windows.empty() && field(j, "smoothness").get<double>() <= field(j, "smooth_tol").get<double>()),
            "verdict consistent with windows and smoothness");
}

// ------------------------------------------------------------ comparison ---

inline Json comparison_to_json(const ComparisonReport& r, const EmbeddingConfig& cfg) {
    const auto nan_safe = [](double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); };
    return Json{{"embedding", {{"lag", cfg.lag}, {"dim", cfg.dim}}},
                {"lyapunov_original", lyapunov_to_json(r.lyapunov_original)},
                {"lyapunov_generated", lyapunov_to_json(r.lyapunov_generated)},
                {"lambda_difference", r.lambda_difference},
                {"lambda_mismatch", r.lambda_mismatch},
                {"mean_descriptor_distance", nan_safe(r.mean_descriptor_distance)},
                {"pairs_used", r.pairs_used},
                {"fragments_original", r.fragments_original},
                {"fragments_generated", r.fragments_generated},
                {"warnings", r.warnings}};
}

inline void validate_comparison_json(const Json& j) {
    using detail::field;
    using detail::require;
    for (const char* side : {"lyapunov_original", "lyapunov_generated"}) {
        const double q = field(field(j, side), "quality").get<double>();
        require(q >= 0.0 && q <= 1.0, "lyapunov quality in [0, 1]");
    }
    const double a = field(field(j, "lyapunov_original"), "lambda").get<double>();
    const double b = field(field(j, "lyapunov_generated"), "lambda").get<double>();
    require(std::abs(field(j, "lambda_difference").get<double>() - std::abs(a - b)) <= 1e-12 * (1.0 + std::abs(a - b)),
            "lambda_difference = |lambda_original - lambda_generated|");
    field(j, "lambda_mismatch").get<bool>();
    const auto& md = field(j, "mean_descriptor_distance");
    require(md.is_null() || md.get<double>() >= 0.0, "mean descriptor distance >= 0");
}

}  // namespace symchaos
