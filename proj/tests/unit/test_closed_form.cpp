#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fd.hpp"
#include "tsode/closed_form/encoder.hpp"
#include "tsode/closed_form/fit.hpp"
#include "tsode/closed_form/io.hpp"
#include "tsode/core/metrics.hpp"
#include "tsode/core/preprocess.hpp"
#include "tsode/core/synth.hpp"
#include "tsode/linear/companion.hpp"
#include "tsode/ode/solver.hpp"

using namespace tsode;
using namespace tsode::closed_form;

namespace {

const double kPi = std::numbers::pi;

/// j-th derivative at s of c_minus (cos bs - sin bs) + c_plus (cos bs + sin bs), alpha = 0.
double basis_derivative(double c_minus, double c_plus, double beta, double s, int j) {
    const double phase = beta * s + j * kPi / 2.0;
    const double scale = std::pow(beta, j);
    return scale * (c_minus * (std::cos(phase) - std::sin(phase)) + c_plus * (std::cos(phase) + std::sin(phase)));
}

ClosedFormModel random_model(std::mt19937_64& rng, std::size_t k) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0), gap(0.4, 1.0);
    ClosedFormModel m{std::vector<double>(k, 0.0), {}, {}, 0.0};
    double beta = 0.3;
    for (std::size_t i = 0; i < k; ++i) {
        beta += gap(rng);
        m.betas.push_back(beta);
        m.c.push_back(amp(rng));
        m.c.push_back(amp(rng));
    }
    m.t0 = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    return m;
}

}  // namespace

TEST(Evaluate, CosineFromCancellation) {
    const ClosedFormModel m{{0.0}, {1.0}, {0.5, 0.5}, 0.0};
    const auto t = time_grid(-3.0, 0.37, 40);
    const auto v = evaluate(m, t);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(v[i], std::cos(t[i]), 1e-15);
}

TEST(Evaluate, ZeroAmplitudes) {
    const ClosedFormModel m{{0.0, -0.1}, {1.0, 2.0}, {0, 0, 0, 0}, 0.3};
    for (double v : evaluate(m, time_grid(0.0, 0.5, 10))) EXPECT_EQ(v, 0.0);
}

TEST(Evaluate, LeastSquaresTwoTone) {
    const auto series = synth_scalar("two_tone", 100, 0.0, 4.0 * kPi);
    const auto t = time_grid(0.0, series.dt(), series.size());
    ClosedFormModel m{{0.0, 0.0}, {1.0, 2.0}, {}, 0.0};
    m.c = least_squares_amplitudes(m, t, series.span());
    const auto v = evaluate(m, t);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(v[i], series[i], 1e-10);
    // 4 sin t = -2 (cos - sin) + 2 (cos + sin); -5 sin 2t likewise
    EXPECT_NEAR(m.c[0], -2.0, 1e-10);
    EXPECT_NEAR(m.c[1], 2.0, 1e-10);
    EXPECT_NEAR(m.c[2], 2.5, 1e-10);
    EXPECT_NEAR(m.c[3], -2.5, 1e-10);
}

TEST(Evaluate, OverflowAndValidation) {
    const ClosedFormModel grow{{1.0}, {1.0}, {1.0, 0.0}, 0.0};
    EXPECT_THROW(evaluate(grow, std::vector<double>{701.0}), Error);
    EXPECT_NO_THROW(evaluate(grow, std::vector<double>{699.0}));
    EXPECT_THROW(evaluate(ClosedFormModel{{0.0}, {1.0}, {1.0}, 0.0}, std::vector<double>{0.0}), Error);
    EXPECT_THROW(evaluate(ClosedFormModel{{0.0, 0.0}, {2.0, 1.0}, {1, 1, 1, 1}, 0.0}, std::vector<double>{0.0}), Error);
    EXPECT_THROW(evaluate(ClosedFormModel{{0.0}, {-1.0}, {1, 1}, 0.0}, std::vector<double>{0.0}), Error);
}

TEST(Evaluate, TimeShiftProperty) {
    std::mt19937_64 rng(1);
    auto m = random_model(rng, 3);
    m.alphas = {-0.05, 0.0, 0.02};
    const double shift = 1.7;
    auto shifted = m;
    m.t0 = 0.0;
    shifted.t0 = shift;
    const auto t = time_grid(0.0, 0.1, 80);
    std::vector<double> back(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) back[i] = t[i] - shift;
    EXPECT_EQ(evaluate(shifted, t), evaluate(m, back));
}

TEST(Evaluate, LinearInAmplitudes) {
    std::mt19937_64 rng(2);
    auto a = random_model(rng, 2);
    auto b = a;
    auto sum = a;
    for (std::size_t i = 0; i < a.c.size(); ++i) {
        b.c[i] = std::normal_distribution<double>()(rng);
        sum.c[i] = a.c[i] + b.c[i];
    }
    const auto t = time_grid(0.0, 0.2, 50);
    const auto va = evaluate(a, t), vb = evaluate(b, t), vs = evaluate(sum, t);
    for (std::size_t i = 0; i < t.size(); ++i) EXPECT_NEAR(vs[i], va[i] + vb[i], 1e-12);
}

TEST(Evaluate, MatchesCompanionSystemIntegration) {
    std::mt19937_64 rng(3);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t k = 1 + rep % 3;
        const auto m = random_model(rng, k);
        const auto a = linear::companion_from_modes(m.alphas, m.betas);
        const Eigen::Index d = a.rows();
        Eigen::VectorXd x0(d);
        for (Eigen::Index j = 0; j < d; ++j) {
            double v = 0.0;
            for (std::size_t i = 0; i < k; ++i)
                v += basis_derivative(m.c[2 * i], m.c[2 * i + 1], m.betas[i], -m.t0, static_cast<int>(j));
            x0[j] = v;
        }
        const double period = 2.0 * kPi / m.betas.front();
        const ode::TimeGrid grid{0.0, period / 200.0, 201};
        const auto traj = ode::integrate(ode::LinearField(a), x0, grid, {8});
        const auto v = evaluate(m, traj.times);
        double worst = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(traj.states[i][0] - v[i]));
        EXPECT_LE(worst, 1e-5) << rep;
    }
}

TEST(Evaluate, SearchSpaceSize) {
    for (std::size_t k = 1; k <= 4; ++k) {
        std::mt19937_64 rng(k);
        const auto m = random_model(rng, k);
        EXPECT_EQ(m.parameter_count(), 3 * k + 1 + k);  // alphas included
        EXPECT_EQ(m.betas.size() + m.c.size() + 1, 3 * k + 1);
        EXPECT_EQ(static_cast<std::size_t>(linear::companion_from_modes(m.alphas, m.betas).size()), 4 * k * k);
    }
}

TEST(EstimateFrequencies, TwoToneOnGrid) {
    const auto series = synth_scalar("two_tone", 100, 0.0, 4.0 * kPi);
    const auto est = estimate_frequencies(series.span(), series.dt(), 2);
    ASSERT_EQ(est.betas.size(), 2u);
    EXPECT_NEAR(est.betas[0], 1.0, 1e-12);
    EXPECT_NEAR(est.betas[1], 2.0, 1e-12);
    EXPECT_EQ(est.bins, (std::vector<std::size_t>{2, 4}));
    EXPECT_FALSE(est.low_confidence);
}

TEST(EstimateFrequencies, DirectDftOracle) {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> d;
    std::vector<double> x(37);
    for (auto& v : x) v = d(rng);
    const auto power = periodogram(x);
    double mean = 0.0;
    for (double v : x) mean += v / 37.0;
    for (std::size_t k = 0; k < power.size(); ++k) {
        std::complex<double> s{0.0, 0.0};
        for (std::size_t t = 0; t < x.size(); ++t) s += (x[t] - mean) * std::polar(1.0, -2.0 * kPi * double(k * t) / 37.0);
        EXPECT_NEAR(power[k], std::norm(s) / 37.0, 1e-10);
    }
}

TEST(EstimateFrequencies, SingleSine) {
    std::vector<double> x(200);
    const double dt = 2.0 * kPi / 200.0 * 3.0;  // three periods of sin t over the sample
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(3.0 * dt * static_cast<double>(i));
    const auto est = estimate_frequencies(x, dt, 1);
    ASSERT_EQ(est.betas.size(), 1u);
    EXPECT_NEAR(est.betas[0], 3.0, 1e-12);
}

TEST(EstimateFrequencies, WhiteNoise) {
    std::size_t flagged = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> d;
        std::vector<double> x(128);
        for (auto& v : x) v = d(rng);
        const auto est = estimate_frequencies(x, 1.0, 1);
        const auto power = periodogram(x);
        const auto argmax = static_cast<std::size_t>(std::max_element(power.begin() + 1, power.end()) - power.begin());
        EXPECT_EQ(est.bins.front(), argmax);
        EXPECT_EQ(est.low_confidence, est.peak_to_median < 3.0);
        flagged += est.low_confidence;
        EXPECT_LT(est.peak_to_median, 30.0);
    }
    std::vector<double> clean(128);
    for (std::size_t i = 0; i < clean.size(); ++i) clean[i] = std::sin(0.3 * static_cast<double>(i));
    EXPECT_GT(estimate_frequencies(clean, 1.0, 1).peak_to_median, 30.0);
}

TEST(EstimateFrequencies, Errors) {
    EXPECT_THROW(estimate_frequencies(std::vector<double>(7, 1.0), 1.0, 2), Error);
    std::vector<double> sine(64);
    for (std::size_t i = 0; i < sine.size(); ++i) sine[i] = std::sin(2.0 * kPi * 4.0 * double(i) / 64.0);
    try {
        estimate_frequencies(sine, 1.0, 3);
        FAIL() << "expected too few peaks";
    } catch (const Error& e) {
        EXPECT_NE(std::string(e.what()).find("found 1"), std::string::npos);
    }
}

TEST(FitClosedForm, TwoTone) {
    const auto series = synth_scalar("two_tone", 100, 0.0, 4.0 * kPi);
    const auto fit = fit_closed_form(series, 2);
    ASSERT_EQ(fit.model.modes(), 2u);
    EXPECT_NEAR(fit.model.betas[0], 1.0, 0.02);
    EXPECT_NEAR(fit.model.betas[1], 2.0, 0.02);
    EXPECT_LE(fit.rmse, 0.05);
    const auto v = evaluate(fit.model, time_grid(0.0, series.dt(), series.size()));
    EXPECT_NEAR(rmse(v, series.span()), fit.rmse, 1e-12);
    EXPECT_GE(fit.evaluations, 1u);
}

TEST(FitClosedForm, SelfRecovery) {
    const ClosedFormModel truth{{0.0, 0.0}, {0.7, 1.9}, {0.8, -0.3, 0.5, 1.1}, 0.4};
    const auto t = time_grid(0.0, 0.1, 200);
    const auto values = evaluate(truth, t);
    const auto fit = fit_closed_form(values, 0.1, 2);
    EXPECT_LE(fit.rmse, 1e-6);
    EXPECT_NEAR(fit.model.betas[0], 0.7, 1e-4);
    EXPECT_NEAR(fit.model.betas[1], 1.9, 1e-4);
}

TEST(FitClosedForm, SingleCosine) {
    std::vector<double> x(100);
    const double dt = 4.0 * kPi / 100.0;
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::cos(dt * static_cast<double>(i));
    const auto fit = fit_closed_form(x, dt, 1);
    EXPECT_NEAR(fit.model.betas[0], 1.0, 1e-3);
    // cos t has many (C, t0) representations; compare the curve instead of raw amplitudes
    const auto v = evaluate(fit.model, time_grid(0.0, dt, x.size()));
    for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(v[i], x[i], 1e-3);
    const ClosedFormModel unshifted{{0.0}, {fit.model.betas[0]}, {}, 0.0};
    const auto c = least_squares_amplitudes(unshifted, time_grid(0.0, dt, x.size()), x);
    EXPECT_NEAR(c[0], 0.5, 1e-3);
    EXPECT_NEAR(c[1], 0.5, 1e-3);
}

TEST(FitClosedForm, FreeAlphasAndErrors) {
    const ClosedFormModel truth{{-0.05}, {1.3}, {0.6, 0.2}, 0.0};
    const auto t = time_grid(0.0, 0.1, 150);
    FitOptions opts;
    opts.free_alphas = true;
    const auto fit = fit_closed_form(evaluate(truth, t), 0.1, 1, opts);
    EXPECT_NEAR(fit.model.alphas[0], -0.05, 5e-3);
    EXPECT_LE(fit.rmse, 1e-3);
    EXPECT_THROW(fit_closed_form(std::vector<double>(9, 0.0), 0.1, 2), Error);
}

TEST(FitClosedForm, Deterministic) {
    const auto series = synth_scalar("two_tone", 100, 0.0, 4.0 * kPi);
    FitOptions opts;
    opts.seed = 5;
    const auto a = fit_closed_form(series, 2, opts);
    const auto b = fit_closed_form(series, 2, opts);
    EXPECT_EQ(a.model.c, b.model.c);
    EXPECT_EQ(a.evaluations, b.evaluations);
}

namespace {

struct SyntheticWindows {
    std::vector<WindowPair> train, test;
    double dt = 0.1;
};

SyntheticWindows synthetic_windows(std::size_t m, std::size_t n) {
    const ClosedFormModel truth{{0.0, 0.0}, {0.5, 1.3}, {0.7, -0.4, 0.3, 0.5}, 0.0};
    SyntheticWindows out;
    const auto values = evaluate(truth, time_grid(0.0, out.dt, 3000));
    const TimeSeries ts(0.0, out.dt, values);
    out.train = make_windows(ts.slice(0, 2100), m, n, 2);
    out.test = make_windows(ts.slice(2100, 900), m, n, 5);
    return out;
}

double held_out_mae(const EncoderModel& enc, const std::vector<WindowPair>& windows) {
    double total = 0.0;
    for (const auto& w : windows) total += mae(forecast(enc, w.history, w.target.size()), w.target);
    return total / static_cast<double>(windows.size());
}

}  // namespace

TEST(Encoder, SyntheticIdentifiability) {
    const auto data = synthetic_windows(50, 50);
    EncoderOptions opts;
    opts.epochs = 150;
    const auto trained = train_encoder(data.train, {{0.0, 0.0}, {0.5, 1.3}}, data.dt, opts);
    EXPECT_LE(held_out_mae(trained.encoder, data.test), 0.05);
    EXPECT_LT(trained.report.loss_history.back(), trained.report.initial_loss);
}

TEST(Encoder, UntrainedIsConstant) {
    EncoderOptions opts;
    opts.initial_amplitudes = {0.2, -0.1};
    const auto enc = make_encoder({{0.0}, {1.0}}, 10, 5, 0.1, opts);
    std::mt19937_64 rng(6);
    std::normal_distribution<double> d;
    std::vector<double> h1(10), h2(10);
    for (auto& v : h1) v = d(rng);
    for (auto& v : h2) v = d(rng);
    EXPECT_EQ(forecast(enc, h1, 5), forecast(enc, h2, 5));
    const ClosedFormModel expected{{0.0}, {1.0}, {0.2, -0.1}, 0.0};
    EXPECT_EQ(forecast(enc, h1, 5), evaluate(expected, time_grid(0.1, 0.1, 5)));

    auto data = synthetic_windows(10, 5);
    opts.epochs = 0;
    const auto zero = train_encoder(data.train, {{0.0}, {1.0}}, data.dt, opts);
    EXPECT_EQ(zero.encoder.parameters(), enc.parameters());
}

TEST(Encoder, Seasonal24SingleTone) {
    const auto series = synth_scalar("seasonal24", 3000, 0.0, 3000.0);
    const auto train = make_windows(series.slice(0, 2100), 100, 100, 2);
    const auto test = make_windows(series.slice(2100, 900), 100, 100, 7);
    const auto fit = fit_closed_form(series.slice(0, 200), 1);
    EncoderOptions opts;
    opts.initial_amplitudes = fit.model.c;
    const auto trained = train_encoder(train, {fit.model.alphas, fit.model.betas}, 1.0, opts);
    EXPECT_LE(held_out_mae(trained.encoder, test), 0.1);
}

TEST(Encoder, GradientMatchesFiniteDifferences) {
    EncoderOptions opts;
    opts.hidden = 5;
    auto enc = make_encoder({{0.0, -0.1}, {0.8, 1.7}}, 6, 4, 0.3, opts);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> d(0.0, 0.3);
    Eigen::VectorXd p = enc.parameters();
    for (auto& v : p) v += d(rng);
    enc.set_parameters(p);
    const Eigen::VectorXd history = Eigen::VectorXd::NullaryExpr(6, [&] { return d(rng); });
    const Eigen::VectorXd target = Eigen::VectorXd::NullaryExpr(4, [&] { return d(rng); });
    auto loss = [&](const Eigen::VectorXd& q) {
        auto copy = enc;
        copy.set_parameters(q);
        return 0.5 * (copy.forward(history).output - target).squaredNorm();
    };
    const auto cache = enc.forward(history);
    const Eigen::VectorXd g = enc.backward(cache, cache.output - target);
    EXPECT_LE(test::max_relative_error(g, test::central_difference(loss, p)), 1e-4);
}

TEST(Forecast, ZeroHorizonAndErrors) {
    const auto enc = make_encoder({{0.0}, {1.0}}, 4, 3, 0.1, {});
    EXPECT_TRUE(forecast(enc, std::vector<double>(4, 0.0), 0).empty());
    EXPECT_THROW(forecast(enc, std::vector<double>(3, 0.0), 2), Error);
    EXPECT_EQ(forecast(enc, std::vector<double>(4, 0.0), 7).size(), 7u);
}

TEST(ClosedFormIo, ModelAndEncoderRoundTrip) {
    const ClosedFormModel m{{0.0, -0.01}, {1.0 / 3.0, 2.0}, {0.1, 0.2, 0.3, 0.4}, 0.7};
    const auto dir = std::filesystem::temp_directory_path();
    const auto path = (dir / "tsode_cf_model.json").string();
    save_model(path, m, std::string("encoder.json"));
    const auto back = load_model(path);
    std::filesystem::remove(path);
    EXPECT_EQ(back.betas, m.betas);
    EXPECT_EQ(back.c, m.c);
    EXPECT_EQ(back.t0, m.t0);
    EXPECT_THROW(model_from_json({{"K", 3}, {"alphas", {0.0}}, {"betas", {1.0}}, {"C", {1.0, 1.0}}, {"t0", 0.0}}), Error);

    EncoderOptions opts;
    opts.seed = 3;
    auto enc = make_encoder({{0.0}, {1.0}}, 5, 4, 0.25, opts);
    const auto j = encoder_to_json(enc, 3);
    const auto enc2 = encoder_from_json(nlohmann::json::parse(j.dump()));
    EXPECT_EQ(enc2.parameters(), enc.parameters());
    EXPECT_EQ(enc2.dt(), 0.25);
    EXPECT_EQ(enc2.horizon(), 4u);
}
