#pragma once

#include <span>
#include <vector>

#include "tsode/baselines/forecaster.hpp"

namespace tsode::baselines {

/// Returns its input window; requires m = n.
inline std::vector<double> repeater(std::span<const double> history, std::size_t n) {
    detail::require(history.size() == n, "repeater: history length must equal the horizon");
    return {history.begin(), history.end()};
}

class RepeaterForecaster final : public Forecaster {
public:
    std::string name() const override { return "repeater"; }

    void fit(const TimeSeries&, std::size_t m, std::size_t n, std::uint64_t) override {
        detail::require(m == n, "repeater: m must equal n");
        set_shape(m, n);
    }

    std::vector<double> predict(std::span<const double> history) const override {
        check_history(history);
        return repeater(history, horizon());
    }

    bool deterministic() const override { return true; }

    nlohmann::json to_json() const override { return {{"model", "repeater"}}; }
};

}  // namespace tsode::baselines
