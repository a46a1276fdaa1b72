#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tsode/baselines/forecaster.hpp"
#include "tsode/optim/nelder_mead.hpp"

namespace tsode::baselines {

/// x_t = c + phi x_{t-P} + theta e_{t-1} + e_t
struct SeasonalArimaModel {
    double c = 0.0;
    double phi = 0.0;
    double theta = 0.0;
    double sigma_res = 0.0;
    std::size_t period = 24;

    static constexpr std::size_t parameter_count() noexcept { return 4; }
};

namespace detail_sarima {

/// One-step residuals for t >= period with e initialized to zero; entries below period stay 0.
inline std::vector<double> residuals(std::span<const double> x, double c, double phi, double theta, std::size_t period) {
    std::vector<double> e(x.size(), 0.0);
    for (std::size_t t = period; t < x.size(); ++t) e[t] = x[t] - c - phi * x[t - period] - theta * e[t - 1];
    return e;
}

inline double css(std::span<const double> x, double c, double phi, double theta, std::size_t period) {
    const auto e = residuals(x, c, phi, theta, period);
    double s = 0.0;
    for (std::size_t t = period; t < x.size(); ++t) s += e[t] * e[t];
    return s;
}

}  // namespace detail_sarima

/// Conditional-sum-of-squares fit. Starts from least squares on (c, phi) with theta = 0 and
/// refines all three by Nelder-Mead, keeping |theta| < 1.
inline SeasonalArimaModel fit_sarima(std::span<const double> x, std::size_t period = 24) {
    detail::require(period >= 1, "fit_sarima: period must be positive");
    detail::require(x.size() > 2 * period, "fit_sarima: series must be longer than two periods");
    const auto rows = static_cast<Eigen::Index>(x.size() - period);
    Eigen::MatrixXd design(rows, 2);
    Eigen::VectorXd rhs(rows);
    for (Eigen::Index r = 0; r < rows; ++r) {
        design(r, 0) = 1.0;
        design(r, 1) = x[static_cast<std::size_t>(r)];
        rhs[r] = x[static_cast<std::size_t>(r) + period];
    }
    const Eigen::Vector2d ols = design.completeOrthogonalDecomposition().solve(rhs);

    const std::size_t count = x.size() - period;
    auto objective = [&](const std::vector<double>& p) {
        if (std::abs(p[2]) >= 1.0) return std::numeric_limits<double>::infinity();
        return std::sqrt(detail_sarima::css(x, p[0], p[1], p[2], period) / static_cast<double>(count));
    };
    optim::NelderMeadOptions nm;
    nm.max_evaluations = 4000;
    nm.f_tolerance = 1e-14;
    const auto res = optim::nelder_mead(objective, {ols[0], ols[1], 0.0}, {0.05, 0.05, 0.1}, nm);
    if (!std::isfinite(res.value)) throw ConvergenceError("fit_sarima: no finite residual", res.value);

    SeasonalArimaModel model{res.x[0], res.x[1], res.x[2], 0.0, period};
    const auto e = detail_sarima::residuals(x, model.c, model.phi, model.theta, period);
    double mean = 0.0;
    for (std::size_t t = period; t < x.size(); ++t) mean += e[t];
    mean /= static_cast<double>(count);
    double var = 0.0;
    for (std::size_t t = period; t < x.size(); ++t) var += (e[t] - mean) * (e[t] - mean);
    model.sigma_res = std::sqrt(var / static_cast<double>(count));
    return model;
}

inline SeasonalArimaModel fit_sarima(const TimeSeries& train, std::size_t period = 24) {
    return fit_sarima(train.span(), period);
}

/// Runs the recurrence forward from the history with future residuals set to zero.
inline std::vector<double> sarima_forecast(const SeasonalArimaModel& model, std::span<const double> history, std::size_t n) {
    const std::size_t p = model.period;
    detail::require(history.size() >= p, "sarima_forecast: history shorter than the period");
    const auto e = detail_sarima::residuals(history, model.c, model.phi, model.theta, p);
    std::vector<double> x(history.begin(), history.end());
    x.reserve(history.size() + n);
    double last_e = e.back();
    for (std::size_t j = 0; j < n; ++j) {
        x.push_back(model.c + model.phi * x[x.size() - p] + model.theta * last_e);
        last_e = 0.0;
    }
    return {x.begin() + static_cast<std::ptrdiff_t>(history.size()), x.end()};
}

class SarimaForecaster final : public Forecaster {
public:
    explicit SarimaForecaster(std::size_t period = 24) : period_(period) {}

    std::string name() const override { return "arima"; }

    void fit(const TimeSeries& train, std::size_t m, std::size_t n, std::uint64_t) override {
        detail::require(m >= period_, "arima: history must cover one period");
        set_shape(m, n);
        model_ = fit_sarima(train, period_);
    }

    std::vector<double> predict(std::span<const double> history) const override {
        check_history(history);
        return sarima_forecast(model_, history, horizon());
    }

    bool deterministic() const override { return true; }

    const SeasonalArimaModel& model() const noexcept { return model_; }

    nlohmann::json to_json() const override {
        return {{"model", "arima"}, {"period", model_.period}, {"c", model_.c}, {"phi", model_.phi},
                {"theta", model_.theta}, {"sigma_res", model_.sigma_res}};
    }

private:
    std::size_t period_;
    SeasonalArimaModel model_;
};

}  // namespace tsode::baselines
