#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tsode/closed_form/model.hpp"
#include "tsode/core/time_series.hpp"
#include "tsode/nn/train.hpp"

namespace tsode::closed_form {

/// Frozen rates shared by every window.
struct ModeRates {
    std::vector<double> alphas;
    std::vector<double> betas;

    std::size_t modes() const noexcept { return betas.size(); }
};

/// Network mapping a history window to the amplitudes and shift of a closed-form model.
///
/// Window-local time puts the last history sample at t = 0, so the forecast horizon is
/// t = dt, 2 dt, ..., n dt. The network output is [C_1..C_2K, t0].
class EncoderModel {
public:
    struct Cache {
        nn::MlpCache net;
        Eigen::VectorXd output;  // forecast over the horizon
    };

    EncoderModel() = default;
    EncoderModel(nn::Mlp net, ModeRates spectrum, double dt, std::size_t horizon)
        : net_(std::move(net)), spectrum_(std::move(spectrum)), dt_(dt), horizon_(horizon) {
        detail::require(spectrum_.alphas.size() == spectrum_.modes() && spectrum_.modes() >= 1,
                        "EncoderModel: invalid frozen spectrum");
        detail::require(net_.output_size() == static_cast<Eigen::Index>(2 * spectrum_.modes() + 1),
                        "EncoderModel: network output must be 2K + 1");
        detail::require(dt > 0.0, "EncoderModel: dt must be positive");
    }

    const nn::Mlp& network() const noexcept { return net_; }
    const ModeRates& spectrum() const noexcept { return spectrum_; }
    double dt() const noexcept { return dt_; }
    std::size_t horizon() const noexcept { return horizon_; }
    std::size_t history_length() const { return static_cast<std::size_t>(net_.input_size()); }
    void set_horizon(std::size_t n) noexcept { horizon_ = n; }

    /// Closed-form model the network assigns to a history window.
    ClosedFormModel coefficients(std::span<const double> history) const {
        const Eigen::VectorXd out = net_.predict(to_input(history));
        return model_from_output(out);
    }

    Cache forward(const Eigen::VectorXd& history) const {
        Cache cache{net_.forward(history), Eigen::VectorXd(static_cast<Eigen::Index>(horizon_))};
        const auto model = model_from_output(cache.net.output);
        for (std::size_t j = 0; j < horizon_; ++j) {
            const double s = static_cast<double>(j + 1) * dt_ - model.t0;
            double v = 0.0;
            for (std::size_t k = 0; k < model.modes(); ++k) {
                const auto b = mode_basis(model.alphas[k], model.betas[k], s);
                v += model.c[2 * k] * b.minus + model.c[2 * k + 1] * b.plus;
            }
            cache.output[static_cast<Eigen::Index>(j)] = v;
        }
        return cache;
    }

    /// Gradient flows through the closed form analytically: dX/dC is the basis and
    /// dX/dt0 = -dX/ds.
    Eigen::VectorXd backward(const Cache& cache, const Eigen::VectorXd& upstream) const {
        const auto model = model_from_output(cache.net.output);
        const auto k_modes = model.modes();
        Eigen::VectorXd d_out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * k_modes + 1));
        for (std::size_t j = 0; j < horizon_; ++j) {
            const double u = upstream[static_cast<Eigen::Index>(j)];
            const double s = static_cast<double>(j + 1) * dt_ - model.t0;
            for (std::size_t k = 0; k < k_modes; ++k) {
                const auto b = mode_basis(model.alphas[k], model.betas[k], s);
                d_out[static_cast<Eigen::Index>(2 * k)] += u * b.minus;
                d_out[static_cast<Eigen::Index>(2 * k + 1)] += u * b.plus;
                d_out[static_cast<Eigen::Index>(2 * k_modes)] -= u * (model.c[2 * k] * b.dminus + model.c[2 * k + 1] * b.dplus);
            }
        }
        return net_.backward(cache.net, d_out);
    }

    Eigen::VectorXd parameters() const { return net_.parameters(); }
    void set_parameters(const Eigen::VectorXd& p) { net_.set_parameters(p); }

private:
    static Eigen::VectorXd to_input(std::span<const double> history) {
        return Eigen::Map<const Eigen::VectorXd>(history.data(), static_cast<Eigen::Index>(history.size()));
    }

    ClosedFormModel model_from_output(const Eigen::VectorXd& out) const {
        const auto k_modes = spectrum_.modes();
        ClosedFormModel m{spectrum_.alphas, spectrum_.betas, std::vector<double>(2 * k_modes), out[static_cast<Eigen::Index>(2 * k_modes)]};
        for (std::size_t i = 0; i < 2 * k_modes; ++i) m.c[i] = out[static_cast<Eigen::Index>(i)];
        return m;
    }

    nn::Mlp net_;
    ModeRates spectrum_;
    double dt_ = 1.0;
    std::size_t horizon_ = 0;
};

static_assert(nn::Trainable<EncoderModel>);

struct EncoderOptions {
    std::size_t hidden = 32;
    nn::Activation activation = nn::Activation::tanh;
    std::size_t epochs = 100;
    std::size_t batch_size = 32;
    double learning_rate = 3e-3;
    std::uint64_t seed = 0;
    std::vector<double> initial_amplitudes;  // optional constant start for the C outputs
};

struct EncoderTraining {
    EncoderModel encoder;
    nn::TrainReport report;
};

/// Untrained encoder: hidden layer Glorot-initialized, output layer zero weights, so every
/// history initially maps to the same (C, t0) = (initial_amplitudes, 0).
inline EncoderModel make_encoder(const ModeRates& spectrum, std::size_t m, std::size_t n, double dt,
                                 const EncoderOptions& opts) {
    detail::require(m >= 1, "make_encoder: history length must be positive");
    std::mt19937_64 rng(opts.seed);
    const auto out = static_cast<Eigen::Index>(2 * spectrum.modes() + 1);
    std::vector<nn::DenseLayer> layers;
    layers.push_back(nn::DenseLayer::glorot(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(opts.hidden),
                                            opts.activation, rng));
    nn::DenseLayer head{nn::Matrix::Zero(out, static_cast<Eigen::Index>(opts.hidden)), nn::Vector::Zero(out),
                        nn::Activation::identity};
    if (!opts.initial_amplitudes.empty()) {
        detail::require(opts.initial_amplitudes.size() == 2 * spectrum.modes(),
                        "make_encoder: initial amplitudes must have 2K entries");
        for (std::size_t i = 0; i < opts.initial_amplitudes.size(); ++i)
            head.bias[static_cast<Eigen::Index>(i)] = opts.initial_amplitudes[i];
    }
    layers.push_back(std::move(head));
    return EncoderModel(nn::Mlp(std::move(layers)), spectrum, dt, n);
}

/// Trains the encoder so that the closed form it predicts matches each window's target.
inline EncoderTraining train_encoder(std::span<const WindowPair> windows, const ModeRates& spectrum, double dt,
                                     const EncoderOptions& opts) {
    detail::require(!windows.empty(), "train_encoder: no windows");
    const std::size_t m = windows.front().history.size();
    const std::size_t n = windows.front().target.size();
    EncoderTraining out{make_encoder(spectrum, m, n, dt, opts), {}};
    std::vector<nn::Sample> data;
    data.reserve(windows.size());
    for (const auto& w : windows) {
        detail::require(w.history.size() == m && w.target.size() == n, "train_encoder: ragged windows");
        data.push_back({Eigen::Map<const Eigen::VectorXd>(w.history.data(), static_cast<Eigen::Index>(m)),
                        Eigen::Map<const Eigen::VectorXd>(w.target.data(), static_cast<Eigen::Index>(n))});
    }
    nn::TrainOptions topts;
    topts.epochs = opts.epochs;
    topts.batch_size = opts.batch_size;
    topts.seed = opts.seed;
    topts.optimizer.learning_rate = opts.learning_rate;
    out.report = nn::train(out.encoder, std::span<const nn::Sample>(data), topts);
    return out;
}

/// Encoder output evaluated on the n grid points following the history.
inline std::vector<double> forecast(const EncoderModel& encoder, std::span<const double> history, std::size_t n) {
    detail::require(history.size() == encoder.history_length(), "forecast: history length mismatch");
    if (n == 0) return {};
    const auto model = encoder.coefficients(history);
    return evaluate(model, time_grid(encoder.dt(), encoder.dt(), n));
}

}  // namespace tsode::closed_form
