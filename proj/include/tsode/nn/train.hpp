#pragma once

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <numeric>
#include <random>
#include <span>
#include <vector>

#include "tsode/nn/optimizer.hpp"

namespace tsode::nn {

/// A differentiable model: forward pass producing a cache with an `output` vector, and a
/// backward pass mapping the loss gradient at the output to a flat parameter gradient.
template <class M>
concept Trainable = requires(M& m, const M& cm, const Vector& v, const typename M::Cache& cache) {
    { cm.forward(v) } -> std::same_as<typename M::Cache>;
    { cache.output } -> std::convertible_to<Vector>;
    { cm.backward(cache, v) } -> std::convertible_to<Vector>;
    { cm.parameters() } -> std::convertible_to<Vector>;
    m.set_parameters(v);
};

struct Sample {
    Vector input;
    Vector target;
};

struct TrainOptions {
    std::size_t epochs = 200;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;
    OptimizerConfig optimizer{};
    std::size_t max_steps = 0;  // optimizer steps cap, 0 for none
};

struct TrainReport {
    double initial_loss = 0.0;         // mean loss over the dataset before any update
    std::vector<double> loss_history;  // mean minibatch loss per epoch
    std::size_t steps = 0;
};

/// Mean squared error over all samples.
template <Trainable M>
double dataset_loss(const M& model, std::span<const Sample> data) {
    double total = 0.0;
    for (const auto& s : data) total += (model.forward(s.input).output - s.target).squaredNorm() / double(s.target.size());
    return total / static_cast<double>(data.size());
}

/// Minibatch training on mean squared error. Deterministic for a fixed seed.
template <Trainable M>
TrainReport train(M& model, std::span<const Sample> data, const TrainOptions& opts) {
    detail::require(!data.empty(), "train: empty dataset");
    detail::require(opts.batch_size >= 1, "train: batch size must be positive");
    TrainReport report;
    report.initial_loss = dataset_loss(model, data);
    if (!std::isfinite(report.initial_loss)) throw DivergenceError("train: non-finite initial loss", 0);

    Optimizer optimizer(opts.optimizer);
    std::mt19937_64 rng(opts.seed);
    std::vector<std::size_t> order(data.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    Vector params = model.parameters();
    for (std::size_t epoch = 0; epoch < opts.epochs; ++epoch) {
        std::shuffle(order.begin(), order.end(), rng);
        double epoch_loss = 0.0;
        std::size_t seen = 0;
        for (std::size_t start = 0; start < order.size(); start += opts.batch_size) {
            if (opts.max_steps != 0 && report.steps == opts.max_steps) break;
            const std::size_t stop = std::min(order.size(), start + opts.batch_size);
            Vector grad = Vector::Zero(params.size());
            for (std::size_t k = start; k < stop; ++k) {
                const auto& s = data[order[k]];
                const auto cache = model.forward(s.input);
                const Vector residual = cache.output - s.target;
                const double scale = 1.0 / static_cast<double>(s.target.size());
                epoch_loss += residual.squaredNorm() * scale;
                grad += model.backward(cache, (2.0 * scale) * residual);
            }
            grad /= static_cast<double>(stop - start);
            optimizer.step(params, grad);
            model.set_parameters(params);
            seen += stop - start;
            ++report.steps;
        }
        if (seen == 0) break;
        epoch_loss /= static_cast<double>(seen);
        if (!std::isfinite(epoch_loss) || !params.allFinite())
            throw DivergenceError("train: loss became non-finite", epoch + 1);
        report.loss_history.push_back(epoch_loss);
    }
    return report;
}

}  // namespace tsode::nn
