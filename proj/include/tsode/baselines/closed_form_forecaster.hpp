#pragma once

#include <algorithm>
#include <random>
#include <span>
#include <vector>

#include "tsode/baselines/forecaster.hpp"
#include "tsode/baselines/nn_forecasters.hpp"
#include "tsode/closed_form/fit.hpp"
#include "tsode/closed_form/io.hpp"
#include "tsode/core/preprocess.hpp"

namespace tsode::baselines {

struct ClosedFormOptions {
    std::size_t modes = 2;
    bool adapt_modes = true;  // use fewer modes when the sample has fewer spectral peaks
    bool free_alphas = false;
    std::size_t sample_length = 0;  // fitted sample length, 0 for m + n
    std::size_t stride = 1;         // spacing between encoder training windows
    std::size_t max_windows = 0;    // widen the stride so at most this many windows train
    closed_form::EncoderOptions encoder{};
};

/// Frequencies from one randomly picked training sample, then an encoder for (C, t0) per window.
class ClosedFormForecaster final : public Forecaster {
public:
    explicit ClosedFormForecaster(ClosedFormOptions opts = {}) : opts_(std::move(opts)) {}

    std::string name() const override { return "closed_form"; }

    void fit(const TimeSeries& train, std::size_t m, std::size_t n, std::uint64_t seed) override {
        set_shape(m, n);
        seed_ = seed;
        const std::size_t len = opts_.sample_length == 0 ? m + n : opts_.sample_length;
        detail::require(len <= train.size(), "closed_form: training series shorter than the fitted sample");
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, train.size() - len);
        const auto sample = train.slice(pick(rng), len);

        closed_form::FitOptions fo;
        fo.seed = seed;
        fo.free_alphas = opts_.free_alphas;
        std::size_t modes = opts_.modes;
        if (opts_.adapt_modes) {
            const auto peaks = closed_form::spectral_peaks(closed_form::periodogram(sample.span())).size();
            modes = std::clamp<std::size_t>(peaks, 1, modes);
        }
        sample_fit_ = closed_form::fit_closed_form(sample, modes, fo);

        auto eo = opts_.encoder;
        eo.seed = seed;
        if (eo.initial_amplitudes.empty()) eo.initial_amplitudes = sample_fit_.model.c;
        const auto windows = make_windows(train, m, n, training_stride(train.size(), m, n, opts_.stride, opts_.max_windows));
        auto trained = closed_form::train_encoder(windows, {sample_fit_.model.alphas, sample_fit_.model.betas},
                                                  train.dt(), eo);
        encoder_ = std::move(trained.encoder);
        report_ = std::move(trained.report);
    }

    std::vector<double> predict(std::span<const double> history) const override {
        check_history(history);
        return closed_form::forecast(encoder_, history, horizon());
    }

    const closed_form::FitResult& sample_fit() const noexcept { return sample_fit_; }
    const closed_form::EncoderModel& encoder() const noexcept { return encoder_; }
    const nn::TrainReport& report() const noexcept { return report_; }

    nlohmann::json to_json() const override {
        return {{"model", "closed_form"},
                {"sample_fit", closed_form::to_json(sample_fit_.model)},
                {"encoder", closed_form::encoder_to_json(encoder_, seed_)}};
    }

private:
    ClosedFormOptions opts_;
    std::uint64_t seed_ = 0;
    closed_form::FitResult sample_fit_;
    closed_form::EncoderModel encoder_;
    nn::TrainReport report_;
};

}  // namespace tsode::baselines
