#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <vector>

#include "tsode/core/error.hpp"

namespace tsode::closed_form {

/// Squared DFT magnitude of the mean-removed series for bins 0..N/2.
inline std::vector<double> periodogram(std::span<const double> values) {
    const std::size_t n = values.size();
    detail::require(n >= 2, "periodogram: need at least two samples");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(n);
    std::vector<double> power(n / 2 + 1);
    for (std::size_t k = 0; k < power.size(); ++k) {
        double re = 0.0, im = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            // (k * j) mod n keeps the phase argument small and exact
            const double phase = 2.0 * std::numbers::pi * static_cast<double>((k * j) % n) / static_cast<double>(n);
            re += (values[j] - mean) * std::cos(phase);
            im -= (values[j] - mean) * std::sin(phase);
        }
        power[k] = (re * re + im * im) / static_cast<double>(n);
    }
    return power;
}

struct FrequencyEstimate {
    std::vector<double> betas;  // angular frequencies, ascending
    std::vector<std::size_t> bins;
    double peak_to_median = 0.0;  // strongest selected peak over the median bin power
    bool low_confidence = false;  // peak_to_median < 3
};

/// Bins that are local maxima of the periodogram (zero bin excluded) and rise above 1e-10 of
/// the strongest bin.
inline std::vector<std::size_t> spectral_peaks(const std::vector<double>& power) {
    detail::require(power.size() >= 2, "spectral_peaks: periodogram too short");
    const std::size_t last = power.size() - 1;
    const double max_power = *std::max_element(power.begin() + 1, power.end());
    const double floor = 1e-10 * max_power;
    std::vector<std::size_t> peaks;
    for (std::size_t k = 1; k <= last; ++k) {
        const bool left = power[k] > power[k - 1];
        const bool right = k == last || power[k] >= power[k + 1];
        if (left && right && power[k] > floor && max_power > 0.0) peaks.push_back(k);
    }
    return peaks;
}

/// Angular frequencies of the K strongest periodogram peaks, ascending.
/// Throws if fewer than K peaks are found.
inline FrequencyEstimate estimate_frequencies(std::span<const double> values, double dt, std::size_t k_modes) {
    detail::require(k_modes >= 1, "estimate_frequencies: K must be positive");
    detail::require(values.size() >= 4 * k_modes, "estimate_frequencies: need at least 4K samples");
    detail::require(dt > 0.0, "estimate_frequencies: dt must be positive");
    const auto power = periodogram(values);
    auto peaks = spectral_peaks(power);
    if (peaks.size() < k_modes)
        throw Error("estimate_frequencies: found " + std::to_string(peaks.size()) + " spectral peaks, need " +
                    std::to_string(k_modes));
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return power[a] > power[b]; });
    peaks.resize(k_modes);

    std::vector<double> rest(power.begin() + 1, power.end());
    std::nth_element(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(rest.size() / 2), rest.end());
    const double median = rest[rest.size() / 2];

    FrequencyEstimate est;
    est.peak_to_median = median > 0.0 ? power[peaks.front()] / median : std::numeric_limits<double>::infinity();
    est.low_confidence = est.peak_to_median < 3.0;
    std::sort(peaks.begin(), peaks.end());
    const double span = static_cast<double>(values.size()) * dt;
    for (std::size_t k : peaks) est.betas.push_back(2.0 * std::numbers::pi * static_cast<double>(k) / span);
    est.bins = std::move(peaks);
    return est;
}

}  // namespace tsode::closed_form
