#pragma once

#include <cmath>
#include <cstddef>

#include "tsode/nn/mlp.hpp"

namespace tsode::nn {

enum class OptimizerKind { sgd, adam };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
};

/// First-order optimizer over a flat parameter vector.
class Optimizer {
public:
    Optimizer() = default;
    explicit Optimizer(OptimizerConfig config) : config_(config) {
        detail::require(config.learning_rate >= 0.0, "Optimizer: learning rate must be non-negative");
    }

    void step(Vector& params, const Vector& grad) {
        detail::require(params.size() == grad.size(), "Optimizer: gradient size mismatch");
        ++steps_;
        if (config_.kind == OptimizerKind::sgd) {
            params -= config_.learning_rate * grad;
            return;
        }
        if (first_moment_.size() != params.size()) {
            first_moment_ = Vector::Zero(params.size());
            second_moment_ = Vector::Zero(params.size());
        }
        first_moment_ = config_.beta1 * first_moment_ + (1.0 - config_.beta1) * grad;
        second_moment_ = config_.beta2 * second_moment_ + (1.0 - config_.beta2) * grad.cwiseAbs2();
        const double t = static_cast<double>(steps_);
        const double c1 = 1.0 - std::pow(config_.beta1, t);
        const double c2 = 1.0 - std::pow(config_.beta2, t);
        params.array() -= config_.learning_rate * (first_moment_.array() / c1) /
                          ((second_moment_.array() / c2).sqrt() + config_.epsilon);
    }

    void set_learning_rate(double lr) noexcept { config_.learning_rate = lr; }
    const OptimizerConfig& config() const noexcept { return config_; }
    std::size_t steps() const noexcept { return steps_; }
    const Vector& first_moment() const noexcept { return first_moment_; }
    const Vector& second_moment() const noexcept { return second_moment_; }

private:
    OptimizerConfig config_{};
    Vector first_moment_;
    Vector second_moment_;
    std::size_t steps_ = 0;
};

}  // namespace tsode::nn
