#pragma once

#include <random>
#include <span>
#include <vector>

#include "tsode/baselines/nn_forecasters.hpp"
#include "tsode/ode/solver.hpp"

namespace tsode::baselines {

/// Encoder -> z0 -> ODE over the horizon -> linear readout per grid point.
///
/// z0 sits at the last history sample; the forecast reads the latent state at dt, 2 dt, ..., n dt.
template <ode::VectorFieldLike F>
class LatentOdeModel {
public:
    struct Cache {
        nn::MlpCache encoder;
        ode::SolverTape<F> tape;
        Vector output;
    };

    LatentOdeModel() = default;
    LatentOdeModel(nn::Mlp encoder, F field, nn::DenseLayer decoder, double dt, std::size_t horizon,
                   ode::SolverOptions solver = {})
        : encoder_(std::move(encoder)), field_(std::move(field)), decoder_(std::move(decoder)), dt_(dt),
          horizon_(horizon), solver_(solver) {
        detail::require(encoder_.output_size() == field_.dimension(), "LatentOdeModel: encoder must emit the latent state");
        detail::require(decoder_.in() == field_.dimension() && decoder_.out() == 1,
                        "LatentOdeModel: decoder must map the latent state to one value");
        detail::require(dt > 0.0 && horizon >= 1, "LatentOdeModel: invalid grid");
    }

    Eigen::Index latent_dimension() const { return field_.dimension(); }
    const nn::Mlp& encoder() const noexcept { return encoder_; }
    const F& field() const noexcept { return field_; }
    const nn::DenseLayer& decoder() const noexcept { return decoder_; }
    ode::TimeGrid grid() const { return {0.0, dt_, horizon_ + 1}; }

    Cache forward(const Vector& history) const {
        auto enc = encoder_.forward(history);
        auto tape = ode::record(field_, enc.output, grid(), solver_);
        Vector out(static_cast<Eigen::Index>(horizon_));
        for (std::size_t j = 0; j < horizon_; ++j)
            out[static_cast<Eigen::Index>(j)] = decoder_.weights.row(0).dot(tape.trajectory.states[j + 1]) + decoder_.bias[0];
        return {std::move(enc), std::move(tape), std::move(out)};
    }

    Vector predict(const Vector& history) const { return forward(history).output; }

    /// Latent trajectory at every grid point, including z0.
    std::vector<Vector> latent_path(const Vector& history) const {
        return ode::integrate(field_, encoder_.predict(history), grid(), solver_).states;
    }

    Vector backward(const Cache& cache, const Vector& upstream) const {
        const Vector w = decoder_.weights.row(0).transpose();
        std::vector<Vector> state_grads(horizon_ + 1, Vector::Zero(w.size()));
        Vector dw = Vector::Zero(w.size());
        double db = 0.0;
        for (std::size_t j = 0; j < horizon_; ++j) {
            const double u = upstream[static_cast<Eigen::Index>(j)];
            state_grads[j + 1] = u * w;
            dw += u * cache.tape.trajectory.states[j + 1];
            db += u;
        }
        const auto sg = ode::backprop(field_, cache.tape, state_grads);
        const Vector de = encoder_.backward(cache.encoder, sg.initial_state);
        Vector g(de.size() + sg.parameters.size() + dw.size() + 1);
        g << de, sg.parameters, dw, db;
        return g;
    }

    Vector parameters() const {
        const Vector a = encoder_.parameters();
        const Vector b = field_.parameters();
        Vector p(a.size() + b.size() + decoder_.weights.size() + 1);
        p << a, b, decoder_.weights.row(0).transpose(), decoder_.bias[0];
        return p;
    }

    void set_parameters(const Vector& p) {
        const auto na = static_cast<Eigen::Index>(encoder_.parameter_count());
        const auto nb = field_.parameters().size();
        const auto nd = decoder_.weights.size();
        detail::require(p.size() == na + nb + nd + 1, "LatentOdeModel: parameter size mismatch");
        encoder_.set_parameters(p.head(na));
        field_.set_parameters(p.segment(na, nb));
        decoder_.weights.row(0) = p.segment(na + nb, nd).transpose();
        decoder_.bias[0] = p[p.size() - 1];
    }

private:
    nn::Mlp encoder_;
    F field_;
    nn::DenseLayer decoder_;
    double dt_ = 1.0;
    std::size_t horizon_ = 1;
    ode::SolverOptions solver_;
};

static_assert(nn::Trainable<LatentOdeModel<ode::MlpField>>);
static_assert(nn::Trainable<LatentOdeModel<ode::LinearField>>);

struct LatentOdeOptions {
    std::size_t latent = 15;
    std::size_t encoder_hidden = 64;
    std::size_t field_hidden = 32;  // unused by the linear field
    std::size_t iterations = 500;   // optimizer steps
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    std::size_t stride = 1;
    std::size_t max_windows = 0;
    std::size_t substeps = 1;
    double latent_dt = 0.3;  // ODE time per forecast step, 0 to use the series spacing
};

template <ode::VectorFieldLike F>
F make_latent_field(std::size_t latent, std::size_t hidden, std::mt19937_64& rng);

template <>
inline ode::MlpField make_latent_field<ode::MlpField>(std::size_t latent, std::size_t hidden, std::mt19937_64& rng) {
    const auto d = static_cast<Eigen::Index>(latent);
    auto net = nn::Mlp::glorot({d, static_cast<Eigen::Index>(hidden), d}, {nn::Activation::tanh, nn::Activation::identity}, rng);
    net.layers().back().weights *= 0.1;
    return ode::MlpField(std::move(net));
}

template <>
inline ode::LinearField make_latent_field<ode::LinearField>(std::size_t latent, std::size_t, std::mt19937_64& rng) {
    const auto d = static_cast<Eigen::Index>(latent);
    return ode::LinearField(0.1 * nn::glorot_uniform(d, d, rng));
}

template <ode::VectorFieldLike F>
LatentOdeModel<F> make_latent_ode(std::size_t m, std::size_t n, double dt, const LatentOdeOptions& opts,
                                  std::mt19937_64& rng) {
    const auto d = static_cast<Eigen::Index>(opts.latent);
    auto encoder = nn::Mlp::glorot({static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(opts.encoder_hidden), d},
                                   {nn::Activation::tanh, nn::Activation::identity}, rng);
    auto field = make_latent_field<F>(opts.latent, opts.field_hidden, rng);
    auto decoder = nn::DenseLayer::glorot(d, 1, nn::Activation::identity, rng);
    ode::SolverOptions solver;
    solver.substeps = opts.substeps;
    return LatentOdeModel<F>(std::move(encoder), std::move(field), std::move(decoder), dt, n, solver);
}

/// Latent ODE baseline trained end to end on MSE through the solver.
///
/// A solver blow-up stops training; the parameters from the last completed step are kept in
/// `checkpoint()` and the failure is rethrown as a DivergenceError.
template <ode::VectorFieldLike F = ode::MlpField>
class LatentOdeForecaster final : public Forecaster {
public:
    explicit LatentOdeForecaster(LatentOdeOptions opts = {}) : opts_(opts) {}

    std::string name() const override { return "latent_ode"; }

    void fit(const TimeSeries& train, std::size_t m, std::size_t n, std::uint64_t seed) override {
        set_shape(m, n);
        seed_ = seed;
        std::mt19937_64 rng(seed);
        model_ = make_latent_ode<F>(m, n, opts_.latent_dt > 0.0 ? opts_.latent_dt : train.dt(), opts_, rng);
        const auto data = window_samples(train, m, n, training_stride(train.size(), m, n, opts_.stride, opts_.max_windows));
        nn::TrainOptions t;
        t.batch_size = opts_.batch_size;
        t.seed = seed;
        t.optimizer.learning_rate = opts_.learning_rate;
        t.max_steps = opts_.iterations;
        const std::size_t per_epoch = (data.size() + opts_.batch_size - 1) / opts_.batch_size;
        t.epochs = opts_.iterations == 0 ? 0 : (opts_.iterations + per_epoch - 1) / per_epoch;
        try {
            report_ = nn::train(model_, std::span<const nn::Sample>(data), t);
        } catch (const BlowUpError& e) {
            checkpoint_ = to_json();
            throw DivergenceError(std::string("latent_ode: ") + e.what(), 0);
        }
        checkpoint_ = to_json();
    }

    std::vector<double> predict(std::span<const double> history) const override {
        check_history(history);
        return nn::to_std(model_.predict(nn::to_vector({history.begin(), history.end()})));
    }

    const LatentOdeModel<F>& model() const noexcept { return model_; }
    const nn::TrainReport& report() const noexcept { return report_; }
    const nlohmann::json& checkpoint() const noexcept { return checkpoint_; }

    nlohmann::json to_json() const override {
        nn::Checkpoint ck{{{"type", "latent_ode"},
                           {"encoder", nn::describe(model_.encoder())},
                           {"latent", model_.latent_dimension()},
                           {"dt", model_.grid().dt},
                           {"horizon", horizon()}},
                          nn::to_std(model_.parameters()), seed_};
        auto j = ck.to_json();
        j["model"] = "latent_ode";
        return j;
    }

private:
    LatentOdeOptions opts_;
    std::uint64_t seed_ = 0;
    LatentOdeModel<F> model_;
    nn::TrainReport report_;
    nlohmann::json checkpoint_;
};

}  // namespace tsode::baselines
