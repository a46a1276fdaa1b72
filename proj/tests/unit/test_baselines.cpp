#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "tsode/baselines/factory.hpp"
#include "tsode/core/metrics.hpp"
#include "tsode/core/preprocess.hpp"
#include "tsode/core/synth.hpp"

using namespace tsode;
using namespace tsode::baselines;

namespace {

/// Mean MAE over every stride-1 test window.
double window_mae(const Forecaster& f, const TimeSeries& test) {
    const auto windows = make_windows(test, f.history_length(), f.horizon(), 1);
    double total = 0.0;
    for (const auto& w : windows) total += mae(f.predict(w.history), w.target);
    return total / static_cast<double>(windows.size());
}

struct Prepared {
    TimeSeries train, test;
};

/// Standardized by the train split, then seeded noise, then split.
Prepared prepare(const TimeSeries& raw, double sigma, std::uint64_t noise_seed = 5) {
    const auto [train_raw, val_raw, test_raw] = split(raw, {});
    (void)val_raw;
    (void)test_raw;
    const auto [ignored, scaler] = standardize(train_raw);
    (void)ignored;
    const auto noisy = add_noise(raw.with_values(scale(raw.span(), scaler)), {sigma, noise_seed});
    auto [train, val, test] = split(noisy, {});
    (void)val;
    return {train, test};
}

TimeSeries seasonal(std::size_t count) { return synth_scalar("seasonal24", count, 0.0, static_cast<double>(count)); }
TimeSeries two_tone(std::size_t count) { return synth_scalar("two_tone", count, 0.0, 0.1 * static_cast<double>(count)); }

std::vector<double> seasonal_values(std::size_t count, double noise, std::uint64_t seed) {
    return add_noise(seasonal(count), {noise, seed}).values();
}

}  // namespace

TEST(Repeater, ReturnsInput) {
    const std::vector<double> h{1, 2, 3};
    EXPECT_EQ(repeater(h, 3), h);
    EXPECT_THROW(repeater(h, 2), Error);
    const std::vector<double> constant(10, 4.0);
    EXPECT_EQ(mae(repeater(constant, 10), constant), 0.0);
}

TEST(Repeater, ForecasterShape) {
    RepeaterForecaster f;
    EXPECT_THROW(f.fit(seasonal(100), 10, 5, 0), Error);
    f.fit(seasonal(100), 10, 10, 0);
    const std::vector<double> h(10, 1.5);
    EXPECT_EQ(f.predict(h), h);
    EXPECT_THROW(f.predict(std::vector<double>(9, 0.0)), Error);
    EXPECT_TRUE(f.deterministic());
}

TEST(Repeater, NoiseInflatesError) {
    const auto raw = seasonal(20000);
    RepeaterForecaster clean, noisy;
    const auto a = prepare(raw, 0.0), b = prepare(raw, 0.3);
    clean.fit(a.train, 100, 100, 0);
    noisy.fit(b.train, 100, 100, 0);
    EXPECT_GT(window_mae(noisy, b.test), window_mae(clean, a.test));
}

TEST(Sarima, PureSeasonalIsExact) {
    const auto model = fit_sarima(seasonal(2000));
    EXPECT_NEAR(model.phi, 1.0, 1e-6);
    EXPECT_NEAR(model.c, 0.0, 1e-6);
    EXPECT_LE(model.sigma_res, 1e-6);
    EXPECT_EQ(model.parameter_count(), 4u);
    const auto series = seasonal(3000);
    for (std::size_t n : {100u, 250u, 500u}) {
        const std::vector<double> history(series.values().begin() + 1000, series.values().begin() + 1100);
        const auto f = sarima_forecast(model, history, n);
        ASSERT_EQ(f.size(), n);
        EXPECT_LE(mae(f, std::span<const double>(series.values()).subspan(1100, n)), 1e-4) << n;
    }
}

TEST(Sarima, WhiteNoise) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> d(0.0, 0.5);
    std::vector<double> x(3000);
    for (auto& v : x) v = d(rng);
    const auto model = fit_sarima(x);
    EXPECT_NEAR(model.phi, 0.0, 0.1);
    EXPECT_NEAR(model.sigma_res, 0.5, 0.05);
    EXPECT_LT(std::abs(model.theta), 1.0);
}

TEST(Sarima, HandPickedRecurrences) {
    std::vector<double> history(30);
    for (std::size_t i = 0; i < history.size(); ++i) history[i] = std::sqrt(static_cast<double>(i) + 0.5);
    const SeasonalArimaModel repeat{0.0, 1.0, 0.0, 0.0, 24};
    const auto f = sarima_forecast(repeat, history, 60);
    for (std::size_t j = 0; j < f.size(); ++j) EXPECT_EQ(f[j], history[history.size() - 24 + j % 24]);
    const SeasonalArimaModel level{0.7, 0.0, 0.0, 0.0, 24};
    for (double v : sarima_forecast(level, history, 10)) EXPECT_EQ(v, 0.7);
    EXPECT_THROW(sarima_forecast(repeat, std::vector<double>(23, 0.0), 5), Error);
    EXPECT_THROW(fit_sarima(std::vector<double>(48, 0.0)), Error);
}

TEST(Sarima, NoisySeasonalHorizon) {
    const TimeSeries noisy(0.0, 1.0, seasonal_values(3000, 0.1, 11));
    const auto [train, val, test] = split(noisy, {});
    (void)val;
    SarimaForecaster f;
    f.fit(train, 100, 100, 0);
    EXPECT_LE(window_mae(f, test), 0.15);
}

TEST(NeuralBaselines, ConstantDataGivesFlatOutput) {
    const TimeSeries constant(0.0, 1.0, std::vector<double>(400, 0.5));
    NetTrainOptions o;
    o.epochs = 30;
    FcnnForecaster fcnn(o);
    LstmForecaster lstm(o, 8, 16);
    for (Forecaster* f : {static_cast<Forecaster*>(&fcnn), static_cast<Forecaster*>(&lstm)}) {
        f->fit(constant, 20, 20, 3);
        const auto out = f->predict(std::vector<double>(20, 0.5));
        double mean = 0.0, var = 0.0;
        for (double v : out) mean += v / 20.0;
        for (double v : out) var += (v - mean) * (v - mean) / 20.0;
        EXPECT_LE(std::sqrt(var), 0.05) << f->name();
    }
}

TEST(NeuralBaselines, LstmBeatsRepeaterOnSeasonal) {
    const auto data = prepare(seasonal(3000), 0.0);
    NetTrainOptions o;
    o.epochs = 50;
    o.max_windows = 200;
    LstmForecaster lstm(o);
    RepeaterForecaster rep;
    lstm.fit(data.train, 100, 100, 1);
    rep.fit(data.train, 100, 100, 1);
    EXPECT_LT(window_mae(lstm, data.test), window_mae(rep, data.test));
}

TEST(NeuralBaselines, FcnnBeatsRepeaterOnTwoTone) {
    const auto data = prepare(two_tone(3000), 0.0);
    NetTrainOptions o;
    o.max_windows = 500;
    FcnnForecaster fcnn(o);
    RepeaterForecaster rep;
    fcnn.fit(data.train, 100, 100, 1);
    rep.fit(data.train, 100, 100, 1);
    EXPECT_LT(window_mae(fcnn, data.test), window_mae(rep, data.test));
}

TEST(LatentOde, LinearLatentRecoversRotation) {
    std::vector<double> v(1500);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::sin(0.1 * double(i)) + 0.5 * std::cos(0.1 * double(i));
    const TimeSeries ts(0.0, 0.1, v);
    LatentOdeOptions o;
    o.latent = 2;
    o.encoder_hidden = 16;
    o.iterations = 2000;
    o.stride = 5;
    o.learning_rate = 3e-3;
    o.latent_dt = 0.0;
    LatentOdeForecaster<ode::LinearField> f(o);
    f.fit(ts.slice(0, 1000), 50, 50, 3);
    EXPECT_LE(window_mae(f, ts.slice(1000, 500)), 0.1);
    EXPECT_EQ(f.report().steps, 2000u);
}

TEST(LatentOde, ZeroIterationsIsInitialisation) {
    const auto data = prepare(seasonal(600), 0.0);
    LatentOdeOptions o;
    o.iterations = 0;
    LatentOdeForecaster<> a(o), b(o);
    a.fit(data.train, 30, 30, 9);
    b.fit(data.train, 30, 30, 9);
    std::mt19937_64 rng(9);
    const auto init = make_latent_ode<ode::MlpField>(30, 30, o.latent_dt, o, rng);
    EXPECT_EQ(a.model().parameters(), init.parameters());
    const std::vector<double> h(data.train.values().begin(), data.train.values().begin() + 30);
    EXPECT_EQ(a.predict(h), b.predict(h));
    EXPECT_EQ(a.model().latent_dimension(), 15);
}

TEST(LatentOde, SeasonalLossHalves) {
    const auto data = prepare(seasonal(3000), 0.0);
    LatentOdeOptions o;
    o.stride = 10;
    o.learning_rate = 3e-3;
    LatentOdeForecaster<> f(o);
    f.fit(data.train, 100, 100, 1);
    const auto& loss = f.report().loss_history;
    ASSERT_GE(loss.size(), 2u);
    EXPECT_LE(2.0 * loss.back(), loss.front());
    EXPECT_LE(2.0 * loss.back(), f.report().initial_loss);
    EXPECT_EQ(f.report().steps, 500u);

    // decoded trajectories move no faster than the field allows
    const std::vector<double> h(data.test.values().begin(), data.test.values().begin() + 100);
    const auto& model = f.model();
    const auto path = model.latent_path(nn::to_vector(h));
    const nn::Vector w = model.decoder().weights.row(0).transpose();
    const double dt = model.grid().dt;
    double max_rate = 0.0, max_jump = 0.0;
    for (std::size_t j = 0; j + 1 < path.size(); ++j) {
        max_rate = std::max(max_rate, std::abs(w.dot(model.field().eval(path[j]))));
        max_jump = std::max(max_jump, std::abs(w.dot(path[j + 1] - path[j])));
    }
    EXPECT_LE(max_jump, 10.0 * dt * max_rate);
}

TEST(LatentOde, BlowUpIsReported) {
    const auto data = prepare(seasonal(600), 0.0);
    LatentOdeOptions o;
    o.iterations = 5;
    o.latent = 2;
    o.latent_dt = 1e6;
    LatentOdeForecaster<ode::LinearField> f(o);
    EXPECT_THROW(f.fit(data.train, 30, 30, 1), DivergenceError);
}

TEST(Forecasters, DeterministicWithExactHorizon) {
    const auto data = prepare(two_tone(1500), 0.1);
    const nlohmann::json options = {
        {"fcnn", {{"epochs", 3}, {"max_windows", 100}}},
        {"lstm", {{"epochs", 2}, {"max_windows", 30}, {"units", 4}, {"hidden", 8}}},
        {"latent_ode", {{"iterations", 5}, {"max_windows", 50}}},
        {"closed_form", {{"epochs", 3}, {"max_windows", 50}}}};
    const std::vector<double> history(data.test.values().begin(), data.test.values().begin() + 60);
    for (auto name : kModelNames) {
        const auto opts = options.value(std::string(name), nlohmann::json::object());
        auto a = make_forecaster(name, opts);
        auto b = make_forecaster(name, opts);
        a->fit(data.train, 60, 60, 42);
        b->fit(data.train, 60, 60, 42);
        const auto pa = a->predict(history);
        EXPECT_EQ(pa.size(), 60u) << name;
        EXPECT_EQ(pa, b->predict(history)) << name;
        EXPECT_EQ(a->to_json().dump(), b->to_json().dump()) << name;
        EXPECT_EQ(a->name(), std::string(name));
        for (double v : pa) EXPECT_TRUE(std::isfinite(v)) << name;
    }
    EXPECT_THROW(make_forecaster("prophet"), Error);
    EXPECT_TRUE(is_model_name("arima"));
    EXPECT_FALSE(is_model_name("ARIMA"));
}

TEST(Forecasters, PredictBeforeFitFails) {
    for (auto name : kModelNames) EXPECT_THROW(make_forecaster(name)->predict(std::vector<double>(5, 0.0)), Error) << name;
}

TEST(ClosedFormForecaster, AdaptsModesToPeaks) {
    const auto data = prepare(seasonal(3000), 0.0);
    ClosedFormOptions o;
    o.max_windows = 300;
    ClosedFormForecaster f(o);
    f.fit(data.train, 100, 100, 2);
    EXPECT_EQ(f.sample_fit().model.modes(), 1u);
    RepeaterForecaster rep;
    rep.fit(data.train, 100, 100, 0);
    EXPECT_LT(window_mae(f, data.test), window_mae(rep, data.test));

    o.adapt_modes = false;
    ClosedFormForecaster strict(o);
    EXPECT_THROW(strict.fit(data.train, 100, 100, 2), Error);
}
