#pragma once

// Scalar time series input, delay estimation and delay embedding.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "symchaos/detail/kdtree.hpp"
#include "symchaos/error.hpp"

namespace symchaos {

/// Uniformly sampled scalar observations.
class ScalarSeries {
public:
    explicit ScalarSeries(std::vector<double> samples, double dt = 1.0, std::string label = {})
        : samples_(std::move(samples)), dt_(dt), label_(std::move(label)) {
        if (samples_.size() < 2) throw Error("series needs at least 2 samples");
        if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw Error("sampling interval dt must be positive");
        for (std::size_t k = 0; k < samples_.size(); ++k) {
            if (!std::isfinite(samples_[k]))
                throw Error("non-finite sample at index " + std::to_string(k));
        }
    }

    [[nodiscard]] std::span<const double> samples() const noexcept { return samples_; }
    [[nodiscard]] std::size_t size() const noexcept { return samples_.size(); }
    [[nodiscard]] double operator[](std::size_t k) const { return samples_[k]; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] const std::string& label() const noexcept { return label_; }

private:
    std::vector<double> samples_;
    double dt_;
    std::string label_;
};

struct EmbeddingConfig {
    std::size_t lag = 1;
    std::size_t dim = 2;

    static constexpr std::size_t kMaxDim = 16;

    void validate() const {
        if (lag < 1) throw Error("embedding lag must be >= 1");
        if (dim < 1 || dim > kMaxDim) throw Error("embedding dimension must be in [1, 16]");
    }
};

/// Ordered n-dimensional state points, stored row-major.
class EmbeddedAttractor {
public:
    EmbeddedAttractor(std::vector<double> flat, std::size_t dim, std::size_t lag = 1,
                      double source_dt = 1.0)
        : data_(std::move(flat)), dim_(dim), lag_(lag), source_dt_(source_dt) {
        if (dim_ == 0) throw Error("attractor dimension must be >= 1");
        if (data_.size() % dim_ != 0) throw Error("attractor data is not a whole number of points");
        for (double v : data_) {
            if (!std::isfinite(v)) throw Error("attractor contains non-finite coordinates");
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return data_.size() / dim_; }
    [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
    [[nodiscard]] std::size_t lag() const noexcept { return lag_; }
    [[nodiscard]] double source_dt() const noexcept { return source_dt_; }
    [[nodiscard]] std::span<const double> flat() const noexcept { return data_; }

    [[nodiscard]] std::span<const double> point(std::size_t k) const {
        return std::span<const double>(data_).subspan(k * dim_, dim_);
    }
    [[nodiscard]] double at(std::size_t k, std::size_t coord) const { return data_[k * dim_ + coord]; }

private:
    std::vector<double> data_;
    std::size_t dim_;
    std::size_t lag_;
    double source_dt_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string_view> split_row(std::string_view line) {
    std::vector<std::string_view> cells;
    if (line.find(',') != std::string_view::npos) {
        std::size_t pos = 0;
        while (true) {
            const auto next = line.find(',', pos);
            cells.push_back(trim(line.substr(pos, next == std::string_view::npos ? next : next - pos)));
            if (next == std::string_view::npos) break;
            pos = next + 1;
        }
    } else {
        std::size_t pos = 0;
        while (pos < line.size()) {
            pos = line.find_first_not_of(" \t", pos);
            if (pos == std::string_view::npos) break;
            const auto next = line.find_first_of(" \t", pos);
            cells.push_back(line.substr(pos, next == std::string_view::npos ? next : next - pos));
            pos = next;
        }
    }
    return cells;
}

inline bool parse_double(std::string_view cell, double& out) {
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, out);
    return ec == std::errc{} && ptr == end && !cell.empty();
}

struct CsvRows {
    std::vector<std::vector<std::string_view>> cells;
    std::vector<std::size_t> line_numbers;  // 1-based
    std::vector<std::string> storage;
};

inline CsvRows read_rows(const std::string& path, bool has_header) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open file '" + path + "'");
    CsvRows rows;
    std::string line;
    std::size_t line_no = 0;
    bool header_pending = has_header;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        if (header_pending) {
            header_pending = false;
            continue;
        }
        rows.storage.push_back(line);
        rows.line_numbers.push_back(line_no);
    }
    for (const auto& stored : rows.storage) rows.cells.push_back(split_row(stored));
    return rows;
}

}  // namespace detail

/// Number of delimited columns in the first data row of a CSV file.
inline std::size_t count_columns(const std::string& path, bool has_header) {
    const auto rows = detail::read_rows(path, has_header);
    if (rows.cells.empty()) throw Error("file '" + path + "' contains no data rows");
    return rows.cells.front().size();
}

/// Reads one column of a CSV file. In a two-column file read at column 1,
/// column 0 is the time axis and fixes dt as its median step.
inline ScalarSeries load_series(const std::string& path, std::size_t column = 0, bool has_header = false) {
    const auto rows = detail::read_rows(path, has_header);
    if (rows.cells.size() < 2) throw Error("file '" + path + "' has fewer than 2 data rows");

    const bool timed = rows.cells.front().size() == 2 && column == 1;
    std::vector<double> values;
    std::vector<double> times;
    values.reserve(rows.cells.size());
    for (std::size_t r = 0; r < rows.cells.size(); ++r) {
        const auto& cells = rows.cells[r];
        const auto row_no = std::to_string(rows.line_numbers[r]);
        if (column >= cells.size())
            throw Error("row " + row_no + " has no column " + std::to_string(column));
        double v = 0.0;
        if (!detail::parse_double(cells[column], v) || !std::isfinite(v))
            throw Error("non-numeric value '" + std::string(cells[column]) + "' at row " + row_no);
        values.push_back(v);
        if (timed) {
            double t = 0.0;
            if (!detail::parse_double(cells[0], t) || !std::isfinite(t))
                throw Error("non-numeric time '" + std::string(cells[0]) + "' at row " + row_no);
            times.push_back(t);
        }
    }

    double dt = 1.0;
    if (timed) {
        std::vector<double> steps(times.size() - 1);
        for (std::size_t k = 0; k + 1 < times.size(); ++k) {
            steps[k] = times[k + 1] - times[k];
            if (!(steps[k] > 0.0))
                throw Error("time column is not strictly increasing at row " +
                            std::to_string(rows.line_numbers[k + 1]));
        }
        const auto [lo, hi] = std::minmax_element(steps.begin(), steps.end());
        if (*hi / *lo > 1.01) throw Error("irregular sampling: max/min time step ratio exceeds 1.01");
        auto mid = steps.begin() + static_cast<std::ptrdiff_t>(steps.size() / 2);
        std::nth_element(steps.begin(), mid, steps.end());
        dt = *mid;
        if (steps.size() % 2 == 0) {
            const double lower = *std::max_element(steps.begin(), mid);
            dt = 0.5 * (dt + lower);
        }
    }
    return ScalarSeries(std::move(values), dt, path);
}

/// Sample autocorrelation at lags 0..max_lag (biased estimator, rho(0) = 1).
inline std::vector<double> autocorrelation(std::span<const double> x, std::size_t max_lag) {
    const std::size_t n = x.size();
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> c(n);
    double c0 = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        c[k] = x[k] - mean;
        c0 += c[k] * c[k];
    }
    std::vector<double> rho(max_lag + 1, 0.0);
    for (std::size_t tau = 0; tau <= max_lag && tau < n; ++tau) {
        double acc = 0.0;
        for (std::size_t k = 0; k + tau < n; ++k) acc += c[k] * c[k + tau];
        rho[tau] = acc / c0;
    }
    return rho;
}

/// Delay from the first zero crossing of the autocorrelation, falling back to
/// its first local minimum within length/4.
inline std::size_t estimate_delay(const ScalarSeries& series) {
    const auto x = series.samples();
    if (x.size() < 32) throw Error("series too short for delay estimation (need >= 32 samples)");
    const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
    if (*lo == *hi) throw Error("zero variance: constant series has no usable delay");

    const std::size_t max_lag = x.size() / 4;
    const auto rho = autocorrelation(x, max_lag + 1);
    for (std::size_t tau = 1; tau <= max_lag; ++tau) {
        if (rho[tau] <= 0.0) return tau;
    }
    for (std::size_t tau = 1; tau <= max_lag; ++tau) {
        if (rho[tau] < rho[tau - 1] && rho[tau] <= rho[tau + 1]) return tau;
    }
    return std::max<std::size_t>(1, max_lag);
}

/// Point k is (s[k], s[k+lag], ..., s[k+(dim-1)lag]).
inline EmbeddedAttractor embed(const ScalarSeries& series, const EmbeddingConfig& config) {
    config.validate();
    const std::size_t span = (config.dim - 1) * config.lag;
    if (series.size() <= span)
        throw Error("series too short for embedding: length " + std::to_string(series.size()) +
                    " needs > " + std::to_string(span) + " for lag " + std::to_string(config.lag) +
                    ", dim " + std::to_string(config.dim));
    const std::size_t count = series.size() - span;
    std::vector<double> flat;
    flat.reserve(count * config.dim);
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t d = 0; d < config.dim; ++d) flat.push_back(series[k + d * config.lag]);
    }
    return EmbeddedAttractor(std::move(flat), config.dim, config.lag, series.dt());
}

struct DimensionEstimate {
    std::size_t dim = 1;
    bool saturated = false;                // tolerance never reached up to max_dim
    std::vector<double> false_fractions;   // entry d-1 is the fraction at dimension d
};

/// False-nearest-neighbour fraction at dimension `dim`: a neighbour is false
/// when adding the next delay coordinate stretches the distance by more than
/// `ratio`.
inline double false_neighbor_fraction(const ScalarSeries& series, std::size_t lag, std::size_t dim,
                                      double ratio = 10.0) {
    const auto s = series.samples();
    if (s.size() <= dim * lag + 1) throw Error("series too short for false-neighbour test");
    const std::size_t count = s.size() - dim * lag;
    std::vector<double> flat;
    flat.reserve(count * dim);
    for (std::size_t k = 0; k < count; ++k) {
        for (std::size_t d = 0; d < dim; ++d) flat.push_back(s[k + d * lag]);
    }
    const detail::KdTree tree(flat, dim, count);
    std::size_t false_count = 0;
    for (std::size_t k = 0; k < count; ++k) {
        const auto nb = tree.nearest(std::span<const double>(flat).subspan(k * dim, dim), k, 1);
        const double extra = std::abs(s[k + dim * lag] - s[nb.index + dim * lag]);
        const double r = std::sqrt(nb.dist2);
        if (r == 0.0 ? extra > 0.0 : extra / r > ratio) ++false_count;
    }
    return static_cast<double>(false_count) / static_cast<double>(count);
}

inline DimensionEstimate estimate_dimension(const ScalarSeries& series, std::size_t lag,
                                            std::size_t max_dim = 8, double fnn_tol = 0.01) {
    if (lag < 1) throw Error("lag must be >= 1");
    if (max_dim < 2) throw Error("max_dim must be >= 2");
    if (max_dim > EmbeddingConfig::kMaxDim) throw Error("max_dim must be <= 16");
    if (series.size() < (max_dim - 1) * lag + 16)
        throw Error("series too short for dimension estimation: need >= " +
                    std::to_string((max_dim - 1) * lag + 16) + " samples");

    DimensionEstimate est;
    for (std::size_t d = 1; d <= max_dim; ++d) {
        if (series.size() < d * lag + 2) break;
        const double frac = false_neighbor_fraction(series, lag, d);
        est.false_fractions.push_back(frac);
        if (frac < fnn_tol) {
            est.dim = d;
            return est;
        }
    }
    est.dim = max_dim;
    est.saturated = true;
    return est;
}

}  // namespace symchaos
