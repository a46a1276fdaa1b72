#pragma once

#include <algorithm>
#include <random>
#include <span>
#include <vector>

#include "tsode/baselines/forecaster.hpp"
#include "tsode/core/preprocess.hpp"
#include "tsode/nn/checkpoint.hpp"
#include "tsode/nn/lstm.hpp"
#include "tsode/nn/train.hpp"

namespace tsode::baselines {

using nn::Vector;

struct NetTrainOptions {
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    double learning_rate = 1e-3;
    std::size_t stride = 1;       // spacing between training windows
    std::size_t max_windows = 0;  // widen the stride so at most this many windows train, 0 for no cap
};

/// Smallest stride >= `stride` that leaves at most `max_windows` windows (0 for no cap).
inline std::size_t training_stride(std::size_t length, std::size_t m, std::size_t n, std::size_t stride,
                                   std::size_t max_windows) {
    stride = std::max<std::size_t>(stride, 1);
    if (max_windows == 0 || m + n > length) return stride;
    const std::size_t span = length - m - n;
    while (span / stride + 1 > max_windows) ++stride;
    return stride;
}

/// Training pairs (history, target) cut from a series.
inline std::vector<nn::Sample> window_samples(const TimeSeries& train, std::size_t m, std::size_t n, std::size_t stride) {
    const auto windows = make_windows(train, m, n, stride);
    std::vector<nn::Sample> out;
    out.reserve(windows.size());
    for (const auto& w : windows)
        out.push_back({nn::to_vector(w.history), nn::to_vector(w.target)});
    return out;
}

inline nn::TrainOptions train_options(const NetTrainOptions& o, std::uint64_t seed) {
    nn::TrainOptions t;
    t.epochs = o.epochs;
    t.batch_size = o.batch_size;
    t.seed = seed;
    t.optimizer.learning_rate = o.learning_rate;
    return t;
}

/// m -> hidden (relu) -> n.
class FcnnForecaster final : public Forecaster {
public:
    explicit FcnnForecaster(NetTrainOptions opts = {}, std::size_t hidden = 128) : opts_(opts), hidden_(hidden) {}

    std::string name() const override { return "fcnn"; }

    void fit(const TimeSeries& train, std::size_t m, std::size_t n, std::uint64_t seed) override {
        set_shape(m, n);
        seed_ = seed;
        std::mt19937_64 rng(seed);
        net_ = nn::Mlp::glorot({Eigen::Index(m), Eigen::Index(hidden_), Eigen::Index(n)}, {nn::Activation::relu, nn::Activation::identity}, rng);
        const auto data = window_samples(train, m, n, training_stride(train.size(), m, n, opts_.stride, opts_.max_windows));
        report_ = nn::train(net_, std::span<const nn::Sample>(data), train_options(opts_, seed));
    }

    std::vector<double> predict(std::span<const double> history) const override {
        check_history(history);
        return nn::to_std(net_.predict(nn::to_vector({history.begin(), history.end()})));
    }

    const nn::Mlp& network() const noexcept { return net_; }
    const nn::TrainReport& report() const noexcept { return report_; }

    nlohmann::json to_json() const override {
        auto j = nn::make_checkpoint(net_, seed_).to_json();
        j["model"] = "fcnn";
        return j;
    }

private:
    NetTrainOptions opts_;
    std::size_t hidden_;
    std::uint64_t seed_ = 0;
    nn::Mlp net_;
    nn::TrainReport report_;
};

/// LSTM over the history (one scalar per step) followed by a dense head on the final hidden state.
class LstmHeadModel {
public:
    struct Cache {
        nn::LstmTrace trace;
        nn::MlpCache head;
        Vector output;
    };

    LstmHeadModel() = default;
    LstmHeadModel(nn::LstmLayer lstm, nn::Mlp head) : lstm_(std::move(lstm)), head_(std::move(head)) {
        detail::require(head_.input_size() == lstm_.units(), "LstmHeadModel: head input must match LSTM units");
    }

    static LstmHeadModel glorot(std::size_t units, std::size_t hidden, std::size_t n, std::mt19937_64& rng) {
        auto lstm = nn::LstmLayer::glorot(1, static_cast<Eigen::Index>(units), rng);
        auto head = nn::Mlp::glorot({Eigen::Index(units), Eigen::Index(hidden), Eigen::Index(n)}, {nn::Activation::relu, nn::Activation::identity}, rng);
        return {std::move(lstm), std::move(head)};
    }

    Cache forward(const Vector& history) const {
        std::vector<Vector> xs(static_cast<std::size_t>(history.size()), Vector(1));
        for (Eigen::Index i = 0; i < history.size(); ++i) xs[static_cast<std::size_t>(i)][0] = history[i];
        Cache c{lstm_.forward(xs), {}, {}};
        c.head = head_.forward(c.trace.hidden.back());
        c.output = c.head.output;
        return c;
    }

    Vector predict(const Vector& history) const { return forward(history).output; }

    Vector backward(const Cache& cache, const Vector& upstream) const {
        const auto head_grad = head_.backward_full(cache.head, upstream);
        const auto lstm_grad = lstm_.backward(cache.trace, head_grad.input);
        Vector g(lstm_grad.parameters.size() + head_grad.parameters.size());
        g << lstm_grad.parameters, head_grad.parameters;
        return g;
    }

    Vector parameters() const {
        const Vector a = lstm_.parameters();
        const Vector b = head_.parameters();
        Vector p(a.size() + b.size());
        p << a, b;
        return p;
    }

    void set_parameters(const Vector& p) {
        const auto k = static_cast<Eigen::Index>(lstm_.parameter_count());
        detail::require(p.size() == k + static_cast<Eigen::Index>(head_.parameter_count()),
                        "LstmHeadModel: parameter size mismatch");
        lstm_.set_parameters(p.head(k));
        head_.set_parameters(p.tail(p.size() - k));
    }

    std::size_t parameter_count() const { return lstm_.parameter_count() + head_.parameter_count(); }
    const nn::LstmLayer& lstm() const noexcept { return lstm_; }
    const nn::Mlp& head() const noexcept { return head_; }

private:
    nn::LstmLayer lstm_;
    nn::Mlp head_;
};

static_assert(nn::Trainable<LstmHeadModel>);

/// LSTM(units) -> dense hidden (relu) -> dense n.
class LstmForecaster final : public Forecaster {
public:
    explicit LstmForecaster(NetTrainOptions opts = {}, std::size_t units = 32, std::size_t hidden = 128)
        : opts_(opts), units_(units), hidden_(hidden) {}

    std::string name() const override { return "lstm"; }

    void fit(const TimeSeries& train, std::size_t m, std::size_t n, std::uint64_t seed) override {
        set_shape(m, n);
        seed_ = seed;
        std::mt19937_64 rng(seed);
        model_ = LstmHeadModel::glorot(units_, hidden_, n, rng);
        const auto data = window_samples(train, m, n, training_stride(train.size(), m, n, opts_.stride, opts_.max_windows));
        report_ = nn::train(model_, std::span<const nn::Sample>(data), train_options(opts_, seed));
    }

    std::vector<double> predict(std::span<const double> history) const override {
        check_history(history);
        return nn::to_std(model_.predict(nn::to_vector({history.begin(), history.end()})));
    }

    const LstmHeadModel& model() const noexcept { return model_; }
    const nn::TrainReport& report() const noexcept { return report_; }

    nlohmann::json to_json() const override {
        nn::Checkpoint ck{{{"type", "lstm_forecaster"}, {"units", units_}, {"head", nn::describe(model_.head())}},
                          nn::to_std(model_.parameters()), seed_};
        auto j = ck.to_json();
        j["model"] = "lstm";
        return j;
    }

private:
    NetTrainOptions opts_;
    std::size_t units_, hidden_;
    std::uint64_t seed_ = 0;
    LstmHeadModel model_;
    nn::TrainReport report_;
};

}  // namespace tsode::baselines
