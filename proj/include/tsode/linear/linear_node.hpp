#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "tsode/nn/optimizer.hpp"
#include "tsode/ode/solver.hpp"

namespace tsode::linear {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// x' = A x with a fixed initial state.
struct LinearOdeSystem {
    Matrix a;
    Vector x0;

    Eigen::Index dimension() const noexcept { return a.rows(); }
};

struct LinearNodeOptions {
    double learning_rate = 0.05;
    std::size_t max_iters = 1000;
    double l1_penalty = 0.0;
    std::uint64_t seed = 0;
    double init_scale = 0.1;       // A entries start i.i.d. uniform in [-init_scale, init_scale]
    double loss_tolerance = 0.0;   // stop once the data loss falls below this value
    double lr_decay = 1.0;         // learning rate multiplier applied every iteration
    std::size_t horizon_warmup = 500;  // iterations over which the fitted prefix grows to the full grid
    std::size_t substeps = 4;
    nn::OptimizerKind optimizer = nn::OptimizerKind::adam;
};

struct LinearNodeResult {
    LinearOdeSystem system;
    Vector readout;                    // only for scalar observations; empty otherwise
    std::vector<double> loss_history;  // data loss before each update
    std::size_t iterations = 0;        // parameter updates performed
    double final_loss = 0.0;
};

/// Entries i.i.d. uniform in [-scale, scale], filled column by column.
inline Matrix random_uniform(Eigen::Index rows, Eigen::Index cols, double scale, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-scale, scale);
    Matrix a(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) a(i, j) = dist(rng);
    return a;
}

inline Matrix random_system_matrix(Eigen::Index d, double scale, std::uint64_t seed) {
    return random_uniform(d, d, scale, seed);
}

namespace detail_node {

/// Number of leading grid points fitted at iteration `it` (horizon curriculum).
inline std::size_t active_points(std::size_t total, std::size_t it, std::size_t warmup) {
    if (warmup == 0 || it >= warmup) return total;
    const double frac = static_cast<double>(it + 1) / static_cast<double>(warmup);
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(frac * static_cast<double>(total))), 2, total);
}

inline void add_l1(const Matrix& a, double penalty, Vector& grad) {
    if (penalty <= 0.0) return;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double v = a.data()[k];
        grad[k] += penalty * (v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0));
    }
}

}  // namespace detail_node

/// Learns A in x' = A x from samples of the full state on a uniform grid, by gradient
/// descent through the unrolled RK4 solver. `x0` is supplied, not learned. The loss is the
/// mean squared trajectory error plus l1_penalty * sum |a_ij|.
inline LinearNodeResult train_linear_node(const std::vector<Vector>& samples, const ode::TimeGrid& grid,
                                          const Vector& x0, const LinearNodeOptions& opts) {
    const Eigen::Index d = x0.size();
    detail::require(d >= 1, "train_linear_node: dimension must be positive");
    detail::require(samples.size() == grid.count && !samples.empty(), "train_linear_node: one sample per grid point required");
    for (const auto& s : samples) detail::require(s.size() == d, "train_linear_node: sample dimension mismatch");

    ode::LinearField field(random_system_matrix(d, opts.init_scale, opts.seed));
    nn::Optimizer optimizer({opts.optimizer, opts.learning_rate});
    const ode::SolverOptions solver{opts.substeps, 1e12};

    LinearNodeResult result;
    Vector params = field.parameters();
    std::vector<Vector> grads(samples.size());
    for (std::size_t it = 0;; ++it) {
        const std::size_t active = detail_node::active_points(samples.size(), it, opts.horizon_warmup);
        const double norm = 1.0 / static_cast<double>(active * static_cast<std::size_t>(d));
        grads.resize(active);
        ode::SolverTape<ode::LinearField> tape;
        try {
            tape = ode::record(field, x0, ode::TimeGrid{grid.t0, grid.dt, active}, solver);
        } catch (const BlowUpError& e) {
            throw DivergenceError(std::string("train_linear_node: ") + e.what(), it);
        }
        double loss = 0.0;
        for (std::size_t i = 0; i < active; ++i) {
            const Vector r = tape.trajectory.states[i] - samples[i];
            loss += r.squaredNorm() * norm;
            grads[i] = (2.0 * norm) * r;
        }
        if (!std::isfinite(loss)) throw DivergenceError("train_linear_node: non-finite loss", it);
        result.loss_history.push_back(loss);
        result.final_loss = loss;
        if (it == opts.max_iters || (active == samples.size() && loss < opts.loss_tolerance)) break;

        Vector g = ode::backprop(field, tape, grads).parameters;
        detail_node::add_l1(field.matrix(), opts.l1_penalty, g);
        optimizer.step(params, g);
        optimizer.set_learning_rate(optimizer.config().learning_rate * opts.lr_decay);
        field.set_parameters(params);
        result.iterations = it + 1;
    }
    result.system = {field.matrix(), x0};
    return result;
}

/// Variant for a scalar observation y(t) = w . x(t): learns A and the readout w together,
/// with x0 fixed. Used when only one component of the dynamics is observed.
inline LinearNodeResult train_linear_node_observed(std::span<const double> observed, const ode::TimeGrid& grid,
                                                   const Vector& x0, const LinearNodeOptions& opts) {
    const Eigen::Index d = x0.size();
    detail::require(d >= 1, "train_linear_node_observed: dimension must be positive");
    detail::require(observed.size() == grid.count && !observed.empty(),
                    "train_linear_node_observed: one observation per grid point required");

    ode::LinearField field(random_system_matrix(d, opts.init_scale, opts.seed));
    Vector readout = random_uniform(d, 1, opts.init_scale, opts.seed ^ 0x9e3779b97f4a7c15ULL);
    nn::Optimizer optimizer({opts.optimizer, opts.learning_rate});
    const ode::SolverOptions solver{opts.substeps, 1e12};
    const Eigen::Index na = d * d;

    LinearNodeResult result;
    Vector params(na + d);
    params << field.parameters(), readout;
    std::vector<Vector> grads(observed.size());
    for (std::size_t it = 0;; ++it) {
        const std::size_t active = detail_node::active_points(observed.size(), it, opts.horizon_warmup);
        const double norm = 1.0 / static_cast<double>(active);
        grads.resize(active);
        ode::SolverTape<ode::LinearField> tape;
        try {
            tape = ode::record(field, x0, ode::TimeGrid{grid.t0, grid.dt, active}, solver);
        } catch (const BlowUpError& e) {
            throw DivergenceError(std::string("train_linear_node_observed: ") + e.what(), it);
        }
        double loss = 0.0;
        Vector g = Vector::Zero(na + d);
        for (std::size_t i = 0; i < active; ++i) {
            const Vector& x = tape.trajectory.states[i];
            const double r = readout.dot(x) - observed[i];
            loss += r * r * norm;
            grads[i] = (2.0 * norm * r) * readout;
            g.tail(d) += (2.0 * norm * r) * x;
        }
        if (!std::isfinite(loss)) throw DivergenceError("train_linear_node_observed: non-finite loss", it);
        result.loss_history.push_back(loss);
        result.final_loss = loss;
        if (it == opts.max_iters || (active == observed.size() && loss < opts.loss_tolerance)) break;

        g.head(na) = ode::backprop(field, tape, grads).parameters;
        Vector ga = g.head(na);
        detail_node::add_l1(field.matrix(), opts.l1_penalty, ga);
        g.head(na) = ga;
        optimizer.step(params, g);
        optimizer.set_learning_rate(optimizer.config().learning_rate * opts.lr_decay);
        field.set_parameters(params.head(na));
        readout = params.tail(d);
        result.iterations = it + 1;
    }
    result.system = {field.matrix(), x0};
    result.readout = readout;
    return result;
}

}  // namespace tsode::linear
