#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "tsode/core/time_series.hpp"

namespace tsode {

/// Names accepted by `synth`.
inline constexpr std::string_view kSynthNames[] = {"sine_pair", "two_tone", "seasonal24"};

inline bool is_synth_name(std::string_view name) {
    for (auto known : kSynthNames)
        if (known == name) return true;
    return false;
}

/// Samples a named test signal at `count` points on [t_start, t_end).
///
/// The grid excludes the right endpoint (dt = (t_end - t_start) / count), so periodic
/// signals sampled over whole periods land exactly on DFT bins. `sine_pair` yields two
/// channels [sin t, cos t]; the other names yield one channel.
inline std::vector<TimeSeries> synth(std::string_view name, std::size_t count, double t_start, double t_end) {
    detail::require(count >= 2, "synth: count must be at least 2");
    detail::require(t_end > t_start, "synth: t_end must exceed t_start");
    const double dt = (t_end - t_start) / static_cast<double>(count);
    auto sample = [&](auto&& f) {
        std::vector<double> v(count);
        for (std::size_t i = 0; i < count; ++i) v[i] = f(t_start + static_cast<double>(i) * dt);
        return TimeSeries(t_start, dt, std::move(v));
    };
    if (name == "sine_pair")
        return {sample([](double t) { return std::sin(t); }), sample([](double t) { return std::cos(t); })};
    if (name == "two_tone") return {sample([](double t) { return 4.0 * std::sin(t) - 5.0 * std::sin(2.0 * t); })};
    if (name == "seasonal24")
        return {sample([](double t) { return std::sin(2.0 * std::numbers::pi * t / 24.0); })};
    throw Error("synth: unknown signal '" + std::string(name) + "'");
}

/// Single-channel convenience wrapper; rejects vector-valued names.
inline TimeSeries synth_scalar(std::string_view name, std::size_t count, double t_start, double t_end) {
    auto channels = synth(name, count, t_start, t_end);
    detail::require(channels.size() == 1, "synth_scalar: signal is vector-valued");
    return std::move(channels.front());
}

}  // namespace tsode
