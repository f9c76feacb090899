#pragma once

// Linear forced difference-equation model x(t+1) = A x(t) + psi g(t),
// y = C x: simulation, least-squares identification and model-vs-data
// comparison.

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "symchaos/chaos_metrics.hpp"
#include "symchaos/descriptors.hpp"
#include "symchaos/error.hpp"
#include "symchaos/marking.hpp"
#include "symchaos/series.hpp"

namespace symchaos {

/// Forcing envelope g(t) = exp(t^alpha) * sin(t^gamma).
struct ForcingSpec {
    double alpha = 0.0001;
    double gamma = 0.4;

    void validate() const {
        if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw Error("forcing alpha must be >= 0");
        if (!(gamma > 0.0) || !std::isfinite(gamma)) throw Error("forcing gamma must be > 0");
    }
};

/// 0^a is taken as 0 for a > 0, so g(0) = 0.
inline double forcing_value(const ForcingSpec& f, std::size_t t) {
    const auto pow0 = [t](double a) {
        if (t == 0) return a > 0.0 ? 0.0 : 1.0;
        return std::pow(static_cast<double>(t), a);
    };
    return std::exp(pow0(f.alpha)) * std::sin(pow0(f.gamma));
}

struct LinearForcedModel {
    Eigen::MatrixXd A;
    Eigen::VectorXd psi_amp;
    ForcingSpec forcing;
    Eigen::RowVectorXd C;
    Eigen::VectorXd x0;

    [[nodiscard]] Eigen::Index n() const noexcept { return A.rows(); }

    void validate() const {
        const auto dim = A.rows();
        if (dim < 1) throw Error("model dimension must be >= 1");
        if (A.cols() != dim || psi_amp.size() != dim || C.size() != dim || x0.size() != dim)
            throw Error("model matrices have inconsistent dimensions");
        if (!A.allFinite() || !psi_amp.allFinite() || !C.allFinite() || !x0.allFinite())
            throw Error("model contains non-finite entries");
        forcing.validate();
    }
};

/// The published 4-state model. x0 is not published; 1e-3 in every state is used.
inline LinearForcedModel published_model() {
    LinearForcedModel m;
    m.A.resize(4, 4);
    m.A << 0.9413, -0.1805, 0.1164, -0.0295,
          -0.0545, 0.8226, 0.1622, 0.1056,
           0.0014, -0.0105, -0.4455, 0.8471,
          -0.0062, 0.0341, -0.8860, -0.5404;
    m.psi_amp.resize(4);
    m.psi_amp << 0.0399, 0.0463, -0.4848, -0.1851;
    m.C.resize(4);
    m.C << 2.1037e4, -0.0124e4, 0.1202e4, -0.0302e4;
    m.forcing = ForcingSpec{0.0001, 0.4};
    m.x0 = Eigen::VectorXd::Constant(4, 1e-3);
    return m;
}

/// Largest eigenvalue modulus of A.
inline double spectral_radius(const Eigen::MatrixXd& A) {
    if (A.rows() != A.cols() || A.rows() == 0) throw Error("spectral radius needs a non-empty square matrix");
    const Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

struct Trajectory {
    std::vector<Eigen::VectorXd> states;  // x(0..steps)
    std::vector<double> outputs;          // y(0..steps)
};

constexpr double kDivergenceGuard = 1e12;

namespace detail {

/// Shared recurrence; the forcing term is (psi * u(t)) * g(t) so that u = 1
/// and u = c reproduce the plain and amplitude-scaled runs bit for bit.
template <typename Modulation>
Trajectory run_model(const LinearForcedModel& m, std::size_t steps, Modulation&& u) {
    m.validate();
    if (steps < 1) throw Error("simulation needs steps >= 1");
    Trajectory tr;
    tr.states.reserve(steps + 1);
    tr.outputs.reserve(steps + 1);
    Eigen::VectorXd x = m.x0;
    tr.states.push_back(x);
    tr.outputs.push_back(m.C.dot(x));
    for (std::size_t t = 0; t < steps; ++t) {
        const double g = forcing_value(m.forcing, t);
        const Eigen::VectorXd drive = (m.psi_amp * u(t)) * g;
        Eigen::VectorXd next = m.A * x;
        next += drive;
        x = std::move(next);
        const double norm = x.norm();
        if (!(norm <= kDivergenceGuard)) throw DivergenceError(t + 1, norm);
        tr.states.push_back(x);
        tr.outputs.push_back(m.C.dot(x));
    }
    return tr;
}

inline double condition_estimate(const Eigen::MatrixXd& z) {
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(z);
    const auto& sv = svd.singularValues();
    const double smin = sv(sv.size() - 1);
    return smin > 0.0 ? sv(0) / smin : std::numeric_limits<double>::infinity();
}

inline std::string format_condition(double cond) {
    std::ostringstream os;
    os.precision(3);
    os << cond;
    return os.str();
}

constexpr double kMaxCondition = 1e12;

}  // namespace detail

/// x(t+1) = A x(t) + psi g(t), y(t) = C x(t) for t = 0..steps.
inline Trajectory simulate(const LinearForcedModel& m, std::size_t steps) {
    return detail::run_model(m, steps, [](std::size_t) { return 1.0; });
}

struct Identification {
    Eigen::MatrixXd A;
    Eigen::VectorXd psi_amp;
    double residual = 0.0;   // RMS of the minimized objective per transition
    double condition = 0.0;  // condition estimate of the regressor matrix
};

/// Joint least squares for (A, psi) on regressors (x(t), g(t)).
inline Identification identify(const std::vector<Eigen::VectorXd>& states, const ForcingSpec& forcing) {
    forcing.validate();
    if (states.empty()) throw Error("too few transitions: no states given");
    const auto n = states.front().size();
    for (const auto& s : states) {
        if (s.size() != n) throw Error("states have inconsistent dimensions");
        if (!s.allFinite()) throw Error("states contain non-finite values");
    }
    const auto transitions = static_cast<Eigen::Index>(states.size()) - 1;
    if (transitions < n + 2)
        throw Error("too few transitions: " + std::to_string(std::max<Eigen::Index>(transitions, 0)) +
                    " given, need >= " + std::to_string(n + 2));

    Eigen::MatrixXd z(transitions, n + 1);
    Eigen::MatrixXd target(transitions, n);
    for (Eigen::Index t = 0; t < transitions; ++t) {
        z.row(t).head(n) = states[static_cast<std::size_t>(t)].transpose();
        z(t, n) = forcing_value(forcing, static_cast<std::size_t>(t));
        target.row(t) = states[static_cast<std::size_t>(t + 1)].transpose();
    }
    const double cond = detail::condition_estimate(z);
    if (!(cond <= detail::kMaxCondition))
        throw Error("rank-deficient regressors: condition estimate " + detail::format_condition(cond));

    const Eigen::MatrixXd theta = z.colPivHouseholderQr().solve(target);  // (n+1) x n
    Identification id;
    id.A = theta.topRows(n).transpose();
    id.psi_amp = theta.row(n).transpose();
    id.residual = std::sqrt((target - z * theta).squaredNorm() / static_cast<double>(transitions));
    id.condition = cond;
    return id;
}

struct OutputIdentification {
    Eigen::RowVectorXd C;
    double residual = 0.0;
    double condition = 0.0;
};

/// Least-squares row C minimizing sum_t (y_t - C x_t)^2.
inline OutputIdentification identify_output(const std::vector<Eigen::VectorXd>& states,
                                            const std::vector<double>& observed) {
    if (states.size() != observed.size()) throw Error("states and observations differ in length");
    if (states.empty()) throw Error("no states given");
    const auto n = states.front().size();
    if (static_cast<Eigen::Index>(states.size()) < n) throw Error("rank-deficient states: fewer rows than states");
    Eigen::MatrixXd x(static_cast<Eigen::Index>(states.size()), n);
    Eigen::VectorXd y(static_cast<Eigen::Index>(states.size()));
    for (std::size_t t = 0; t < states.size(); ++t) {
        if (states[t].size() != n) throw Error("states have inconsistent dimensions");
        x.row(static_cast<Eigen::Index>(t)) = states[t].transpose();
        y(static_cast<Eigen::Index>(t)) = observed[t];
    }
    const double cond = detail::condition_estimate(x);
    if (!(cond <= detail::kMaxCondition))
        throw Error("rank-deficient states: condition estimate " + detail::format_condition(cond));
    OutputIdentification out;
    out.C = x.colPivHouseholderQr().solve(y).transpose();
    out.residual = std::sqrt((y - x * out.C.transpose()).squaredNorm() / static_cast<double>(states.size()));
    out.condition = cond;
    return out;
}

struct ComparisonOptions {
    MarkingOptions marking;
    DescriptorOptions descriptor;
    std::size_t best_pairs = 5;   // K
    std::size_t horizon = 30;
    double chaos_threshold = 0.01;
};

struct ComparisonReport {
    LyapunovEstimate lyapunov_original;
    LyapunovEstimate lyapunov_generated;
    double lambda_difference = 0.0;
    bool lambda_mismatch = false;     // one side chaotic, the other not
    double mean_descriptor_distance = 0.0;
    std::size_t pairs_used = 0;
    std::size_t fragments_original = 0;
    std::size_t fragments_generated = 0;
    std::vector<std::string> warnings;
};

/// Ranks a generated series against the original: Lyapunov exponents of both
/// embeddings and the mean distance of the K closest cross-attractor
/// fragment descriptor pairs.
inline ComparisonReport compare_dynamics(const ScalarSeries& original, const ScalarSeries& generated,
                                         const EmbeddingConfig& cfg, const ComparisonOptions& opts = {}) {
    const auto att_a = embed(original, cfg);
    const auto att_b = embed(generated, cfg);

    ComparisonReport rep;
    rep.lyapunov_original = largest_lyapunov(att_a, std::nullopt, opts.horizon);
    rep.lyapunov_generated = largest_lyapunov(att_b, std::nullopt, opts.horizon);
    rep.lambda_difference = std::abs(rep.lyapunov_original.lambda - rep.lyapunov_generated.lambda);
    rep.lambda_mismatch = (rep.lyapunov_original.lambda > opts.chaos_threshold) !=
                          (rep.lyapunov_generated.lambda > opts.chaos_threshold);

    const auto describe = [&](const EmbeddedAttractor& att) {
        std::vector<Descriptor> out;
        for (const auto& f : mark_fragments(att, opts.marking).fragments) out.push_back(normalize(att, f, opts.descriptor));
        return out;
    };
    const auto da = describe(att_a);
    const auto db = describe(att_b);
    rep.fragments_original = da.size();
    rep.fragments_generated = db.size();
    if (da.empty() || db.empty()) {
        rep.warnings.push_back("no fragments on one side; descriptor distance not computed");
        rep.mean_descriptor_distance = std::numeric_limits<double>::quiet_NaN();
        return rep;
    }

    const auto w = SpectralWeights::uniform(opts.descriptor.q);
    std::vector<double> dists;
    dists.reserve(da.size() * db.size());
    for (const auto& a : da) {
        for (const auto& b : db) dists.push_back(symmetry_distance(a, b, w));
    }
    const std::size_t k = std::min(opts.best_pairs, dists.size());
    std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(k), dists.end());
    double sum = 0.0;
    for (std::size_t i = 0; i < k; ++i) sum += dists[i];
    rep.mean_descriptor_distance = sum / static_cast<double>(k);
    rep.pairs_used = k;
    if (k < opts.best_pairs) rep.warnings.push_back("fewer than K fragment pairs available");
    return rep;
}

}  // namespace symchaos
