#pragma once

#include <cmath>
#include <random>
#include <span>
#include <tuple>
#include <vector>

#include "tsode/core/time_series.hpp"

namespace tsode {

/// Scale to zero mean and unit population standard deviation.
inline std::pair<TimeSeries, Scaler> standardize(const TimeSeries& ts) {
    detail::require(ts.size() >= 2, "standardize: need at least two values");
    const auto& v = ts.values();
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    const double sd = std::sqrt(var / n);
    detail::require(sd > 0.0, "standardize: constant series has zero variance");
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (v[i] - mean) / sd;
    return {ts.with_values(std::move(out)), Scaler{mean, sd}};
}

/// Apply an existing scaler (for example one fitted on the training split).
inline std::vector<double> scale(std::span<const double> values, const Scaler& scaler) {
    detail::require(scaler.std > 0.0, "scale: scaler std must be positive");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = (values[i] - scaler.mean) / scaler.std;
    return out;
}

inline std::vector<double> unscale(std::span<const double> values, const Scaler& scaler) {
    detail::require(scaler.std > 0.0, "unscale: scaler std must be positive");
    std::vector<double> out(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) out[i] = values[i] * scaler.std + scaler.mean;
    return out;
}

/// Additive zero-mean Gaussian noise, a pure function of (ts, spec).
inline TimeSeries add_noise(const TimeSeries& ts, const NoiseSpec& spec) {
    detail::require(spec.sigma >= 0.0 && std::isfinite(spec.sigma), "add_noise: sigma must be non-negative");
    if (spec.sigma == 0.0) return ts;
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> noise(0.0, spec.sigma);
    std::vector<double> out = ts.values();
    for (double& x : out) x += noise(rng);
    return ts.with_values(std::move(out));
}

inline std::size_t window_count(std::size_t length, std::size_t m, std::size_t n, std::size_t stride) {
    if (m + n > length || stride == 0) return 0;
    return (length - m - n) / stride + 1;
}

inline std::vector<WindowPair> make_windows(std::span<const double> values, std::size_t m, std::size_t n,
                                            std::size_t stride = 1) {
    detail::require(m >= 1 && n >= 1, "make_windows: m and n must be positive");
    detail::require(stride >= 1, "make_windows: stride must be positive");
    detail::require(m + n <= values.size(), "make_windows: series too short for m + n");
    const std::size_t count = window_count(values.size(), m, n, stride);
    std::vector<WindowPair> windows;
    windows.reserve(count);
    for (std::size_t w = 0; w < count; ++w) {
        const auto begin = values.begin() + static_cast<std::ptrdiff_t>(w * stride);
        windows.push_back({std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(m)),
                           std::vector<double>(begin + static_cast<std::ptrdiff_t>(m),
                                               begin + static_cast<std::ptrdiff_t>(m + n))});
    }
    return windows;
}

inline std::vector<WindowPair> make_windows(const TimeSeries& ts, std::size_t m, std::size_t n,
                                            std::size_t stride = 1) {
    return make_windows(ts.span(), m, n, stride);
}

/// Chronological train/validation/test split; the rounding remainder goes to test.
inline std::tuple<TimeSeries, TimeSeries, TimeSeries> split(const TimeSeries& ts, const SplitSpec& spec) {
    spec.validate();
    const std::size_t total = ts.size();
    const auto n_train = static_cast<std::size_t>(std::floor(spec.train_frac * static_cast<double>(total) + 1e-9));
    const auto n_val = static_cast<std::size_t>(std::floor(spec.val_frac * static_cast<double>(total) + 1e-9));
    detail::require(n_train > 0 && n_val > 0 && n_train + n_val < total, "split: a segment would be empty");
    const std::size_t n_test = total - n_train - n_val;
    return {ts.slice(0, n_train), ts.slice(n_train, n_val), ts.slice(n_train + n_val, n_test)};
}

}  // namespace tsode
