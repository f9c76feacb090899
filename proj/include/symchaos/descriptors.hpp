#pragma once

// Similarity-invariant Fourier descriptors of trajectory fragments and the
// spectral symmetry-violation distance between two descriptors.

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "symchaos/error.hpp"
#include "symchaos/marking.hpp"
#include "symchaos/series.hpp"

namespace symchaos {

/// Maps canonical coordinates back to the original frame:
/// x = translation + scale * rotation * c.
struct PoseParams {
    Eigen::VectorXd translation;
    Eigen::MatrixXd rotation;  // orthogonal, columns are the principal axes
    double scale = 1.0;
};

struct Descriptor {
    Eigen::MatrixXd canonical;   // M x n, resampled and pose-normalized
    Eigen::MatrixXcd spectrum;   // q x n, row i-1 holds harmonic i of every coordinate
    PoseParams pose;
    bool degenerate = false;     // principal axes not uniquely determined

    [[nodiscard]] std::size_t M() const noexcept { return static_cast<std::size_t>(canonical.rows()); }
    [[nodiscard]] std::size_t n() const noexcept { return static_cast<std::size_t>(canonical.cols()); }
    [[nodiscard]] std::size_t q() const noexcept { return static_cast<std::size_t>(spectrum.rows()); }
};

struct SpectralWeights {
    std::vector<double> betas;

    [[nodiscard]] std::size_t q() const noexcept { return betas.size(); }

    static SpectralWeights uniform(std::size_t q) { return {std::vector<double>(q, 1.0)}; }

    void validate() const {
        if (betas.empty()) throw Error("spectral weights need q >= 1");
        for (double b : betas) {
            if (!(b >= 0.0) || !std::isfinite(b)) throw Error("spectral weights must be finite and >= 0");
        }
    }
};

struct DescriptorOptions {
    std::size_t M = 64;
    std::size_t q = 8;
};

namespace detail {

/// In-place iterative radix-2 FFT (forward, unnormalized).
inline void fft(std::vector<std::complex<double>>& a) {
    const std::size_t n = a.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = -2.0 * std::numbers::pi / static_cast<double>(len);
        for (std::size_t i = 0; i < n; i += len) {
            for (std::size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> w = std::polar(1.0, ang * static_cast<double>(k));
                const auto u = a[i + k];
                const auto v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
            }
        }
    }
}

/// Resamples a polyline (rows are vertices) to M points uniformly spaced in
/// cumulative chord length, endpoints included.
inline Eigen::MatrixXd resample_arc_length(const Eigen::MatrixXd& poly, std::size_t M) {
    const auto rows = static_cast<std::size_t>(poly.rows());
    std::vector<double> cum(rows, 0.0);
    for (std::size_t k = 1; k < rows; ++k)
        cum[k] = cum[k - 1] + (poly.row(static_cast<Eigen::Index>(k)) - poly.row(static_cast<Eigen::Index>(k - 1))).norm();
    const double total = cum.back();
    if (!(total > 0.0)) throw Error("zero-length polyline: all fragment points coincide");

    Eigen::MatrixXd out(static_cast<Eigen::Index>(M), poly.cols());
    std::size_t seg = 0;
    for (std::size_t m = 0; m < M; ++m) {
        const auto row = static_cast<Eigen::Index>(m);
        if (m + 1 == M) {
            out.row(row) = poly.row(static_cast<Eigen::Index>(rows - 1));
            break;
        }
        const double s = total * static_cast<double>(m) / static_cast<double>(M - 1);
        while (seg + 2 < rows && cum[seg + 1] < s) ++seg;
        const double len = cum[seg + 1] - cum[seg];
        const double t = len > 0.0 ? std::clamp((s - cum[seg]) / len, 0.0, 1.0) : 0.0;
        const auto a = static_cast<Eigen::Index>(seg);
        out.row(row) = (1.0 - t) * poly.row(a) + t * poly.row(a + 1);
    }
    return out;
}

}  // namespace detail

/// Harmonics first..last (inclusive) of one real sequence whose length is a power of two.
inline std::vector<std::complex<double>> harmonics(const Eigen::VectorXd& column, std::size_t first,
                                                   std::size_t last) {
    std::vector<std::complex<double>> buf(static_cast<std::size_t>(column.size()));
    for (std::size_t k = 0; k < buf.size(); ++k) buf[k] = column(static_cast<Eigen::Index>(k));
    detail::fft(buf);
    return {buf.begin() + static_cast<std::ptrdiff_t>(first), buf.begin() + static_cast<std::ptrdiff_t>(last + 1)};
}

/// Pose-normalizes an arbitrary polyline (rows are n-dimensional vertices).
///
/// Steps: arc-length resampling to M points, centroid to the origin, unit RMS
/// radius, rotation onto principal axes by descending variance with each axis
/// oriented so the third central moment along it is non-negative (falling back
/// to the sign of the first point when the moment vanishes), then DFT of each
/// canonical coordinate keeping harmonics 1..q.
inline Descriptor normalize_polyline(const Eigen::MatrixXd& poly, const DescriptorOptions& opts = {}) {
    const std::size_t M = opts.M;
    const std::size_t q = opts.q;
    if (q < 1) throw Error("descriptor needs q >= 1");
    if (!std::has_single_bit(M)) throw Error("descriptor resample count M must be a power of two");
    if (M < 2 * q + 2) throw Error("descriptor needs M >= 2q + 2");
    if (poly.rows() < 4) throw Error("fragment too short for a descriptor (need >= 4 points)");

    const Eigen::MatrixXd res = detail::resample_arc_length(poly, M);
    const Eigen::VectorXd centroid = res.colwise().mean().transpose();
    const Eigen::MatrixXd centered = res.rowwise() - centroid.transpose();
    const double scale = std::sqrt(centered.rowwise().squaredNorm().mean());
    if (!(scale > 0.0)) throw Error("zero-length polyline: resampled points coincide");
    const Eigen::MatrixXd unit = centered / scale;

    const auto n = unit.cols();
    const Eigen::MatrixXd cov = unit.transpose() * unit / static_cast<double>(M);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);

    struct Axis {
        double variance;
        Eigen::VectorXd dir;
    };
    std::vector<Axis> axes;
    for (Eigen::Index a = n - 1; a >= 0; --a) {
        Eigen::VectorXd v = eig.eigenvectors().col(a);
        const Eigen::VectorXd proj = unit * v;
        const double moment = proj.array().cube().mean();
        const bool flip = std::abs(moment) >= 1e-12 ? moment < 0.0 : proj(0) < 0.0;
        if (flip) v = -v;
        axes.push_back({eig.eigenvalues()(a), v});
    }

    constexpr double kTieTol = 1e-9;
    bool degenerate = false;
    for (std::size_t a = 0; a < axes.size();) {
        std::size_t b = a + 1;
        while (b < axes.size() && axes[b - 1].variance - axes[b].variance <= kTieTol) ++b;
        if (b - a > 1) {
            degenerate = true;
            std::sort(axes.begin() + static_cast<std::ptrdiff_t>(a), axes.begin() + static_cast<std::ptrdiff_t>(b),
                      [](const Axis& x, const Axis& y) {
                          return std::lexicographical_compare(y.dir.begin(), y.dir.end(), x.dir.begin(), x.dir.end());
                      });
        }
        a = b;
    }

    Descriptor d;
    d.pose.translation = centroid;
    d.pose.rotation.resize(n, n);
    for (Eigen::Index a = 0; a < n; ++a) d.pose.rotation.col(a) = axes[static_cast<std::size_t>(a)].dir;
    d.pose.scale = scale;
    d.degenerate = degenerate;
    d.canonical = unit * d.pose.rotation;

    d.spectrum.resize(static_cast<Eigen::Index>(q), n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const auto h = harmonics(d.canonical.col(j), 1, q);
        for (std::size_t i = 0; i < q; ++i) d.spectrum(static_cast<Eigen::Index>(i), j) = h[i];
    }
    return d;
}

/// Descriptor of the attractor points covered by `fragment`.
inline Descriptor normalize(const EmbeddedAttractor& attractor, const Fragment& fragment,
                            const DescriptorOptions& opts = {}) {
    if (fragment.start > fragment.end || fragment.end >= attractor.size())
        throw Error("fragment [" + std::to_string(fragment.start) + ", " + std::to_string(fragment.end) +
                    "] is not valid for an attractor of " + std::to_string(attractor.size()) + " points");
    const auto rows = static_cast<Eigen::Index>(fragment.length());
    const auto n = static_cast<Eigen::Index>(attractor.dim());
    Eigen::MatrixXd poly(rows, n);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < n; ++c)
            poly(r, c) = attractor.at(fragment.start + static_cast<std::size_t>(r), static_cast<std::size_t>(c));
    }
    return normalize_polyline(poly, opts);
}

/// D = sum_i beta_i * (I_i + R_i), where I_i and R_i are the Euclidean
/// norms, over the n coordinates, of the imaginary and real part differences
/// of harmonic i.
inline double symmetry_distance(const Descriptor& a, const Descriptor& b, const SpectralWeights& w) {
    w.validate();
    if (a.n() != b.n()) throw Error("descriptor dimension mismatch");
    if (a.M() != b.M()) throw Error("descriptor resolution mismatch");
    if (w.q() > std::min(a.q(), b.q())) throw Error("spectral weights request more harmonics than stored");

    double total = 0.0;
    for (std::size_t i = 0; i < w.q(); ++i) {
        const auto row = static_cast<Eigen::Index>(i);
        double im2 = 0.0, re2 = 0.0;
        for (Eigen::Index j = 0; j < a.spectrum.cols(); ++j) {
            const std::complex<double> diff = b.spectrum(row, j) - a.spectrum(row, j);
            im2 += diff.imag() * diff.imag();
            re2 += diff.real() * diff.real();
        }
        total += w.betas[i] * (std::sqrt(im2) + std::sqrt(re2));
    }
    return total;
}

}  // namespace symchaos
