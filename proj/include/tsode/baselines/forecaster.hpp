#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsode/core/time_series.hpp"

namespace tsode::baselines {

/// Common interface of every model in the comparison.
class Forecaster {
public:
    virtual ~Forecaster() = default;

    virtual std::string name() const = 0;

    /// Fit on a training series for windows of m history and n forecast points.
    virtual void fit(const TimeSeries& train, std::size_t m, std::size_t n, std::uint64_t seed) = 0;

    /// Exactly n values following `history` (length m).
    virtual std::vector<double> predict(std::span<const double> history) const = 0;

    /// True when fit ignores the seed.
    virtual bool deterministic() const { return false; }

    virtual nlohmann::json to_json() const = 0;

    std::size_t history_length() const noexcept { return m_; }
    std::size_t horizon() const noexcept { return n_; }

protected:
    void set_shape(std::size_t m, std::size_t n) {
        detail::require(m >= 1 && n >= 1, "forecaster: m and n must be positive");
        m_ = m;
        n_ = n;
    }
    void check_history(std::span<const double> history) const {
        detail::require(n_ > 0, name() + ": predict before fit");
        detail::require(history.size() == m_, name() + ": history length must be " + std::to_string(m_));
    }

private:
    std::size_t m_ = 0;
    std::size_t n_ = 0;
};

using ForecasterPtr = std::unique_ptr<Forecaster>;

}  // namespace tsode::baselines
