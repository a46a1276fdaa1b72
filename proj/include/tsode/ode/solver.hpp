#pragma once

#include <cmath>
#include <vector>

#include "tsode/ode/vector_field.hpp"

namespace tsode::ode {

/// Uniform output grid t0, t0 + dt, ..., t0 + (count - 1) dt.
struct TimeGrid {
    double t0 = 0.0;
    double dt = 1.0;
    std::size_t count = 1;

    double time(std::size_t i) const noexcept { return t0 + static_cast<double>(i) * dt; }
};

struct Trajectory {
    std::vector<double> times;
    std::vector<Vector> states;
};

struct SolverOptions {
    std::size_t substeps = 4;  // RK4 steps per grid interval (h = dt / substeps)
    double blowup_norm = 1e12;
};

template <VectorFieldLike F>
Vector rk4_step(const F& f, const Vector& x, double /*t*/, double h) {
    detail::require(h > 0.0, "rk4_step: step must be positive");
    const Vector k1 = f.forward(x).output;
    const Vector k2 = f.forward(x + 0.5 * h * k1).output;
    const Vector k3 = f.forward(x + 0.5 * h * k2).output;
    const Vector k4 = f.forward(x + h * k3).output;
    Vector next = x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) throw Error("rk4_step: non-finite state");
    return next;
}

/// Forward pass with every stage cache kept for the reverse sweep.
template <VectorFieldLike F>
struct SolverTape {
    struct Step {
        typename F::Cache k1, k2, k3, k4;
    };

    TimeGrid grid;
    SolverOptions options;
    Trajectory trajectory;
    std::vector<Step> steps;  // count - 1 intervals x substeps
};

namespace detail_solver {

inline void validate(const Vector& x0, Eigen::Index dim, const TimeGrid& grid, const SolverOptions& opts) {
    detail::require(x0.size() == dim, "integrate: initial state dimension mismatch");
    detail::require(x0.allFinite(), "integrate: initial state must be finite");
    detail::require(grid.count >= 1, "integrate: empty time grid");
    detail::require(grid.dt > 0.0, "integrate: grid step must be positive");
    detail::require(opts.substeps >= 1, "integrate: substeps must be positive");
}

inline void check_blowup(const Vector& x, double t, const SolverOptions& opts) {
    if (!x.allFinite() || x.norm() > opts.blowup_norm) throw BlowUpError(t);
}

}  // namespace detail_solver

template <VectorFieldLike F>
SolverTape<F> record(const F& f, const Vector& x0, const TimeGrid& grid, const SolverOptions& opts = {}) {
    detail_solver::validate(x0, f.dimension(), grid, opts);
    SolverTape<F> tape{grid, opts, {}, {}};
    tape.trajectory.times.reserve(grid.count);
    tape.trajectory.states.reserve(grid.count);
    tape.steps.reserve((grid.count - 1) * opts.substeps);
    const double h = grid.dt / static_cast<double>(opts.substeps);
    Vector x = x0;
    tape.trajectory.times.push_back(grid.time(0));
    tape.trajectory.states.push_back(x);
    for (std::size_t i = 1; i < grid.count; ++i) {
        for (std::size_t s = 0; s < opts.substeps; ++s) {
            typename SolverTape<F>::Step st{f.forward(x), {}, {}, {}};
            st.k2 = f.forward(x + 0.5 * h * st.k1.output);
            st.k3 = f.forward(x + 0.5 * h * st.k2.output);
            st.k4 = f.forward(x + h * st.k3.output);
            x += (h / 6.0) * (st.k1.output + 2.0 * st.k2.output + 2.0 * st.k3.output + st.k4.output);
            detail_solver::check_blowup(x, grid.time(i - 1) + static_cast<double>(s + 1) * h, opts);
            tape.steps.push_back(std::move(st));
        }
        tape.trajectory.times.push_back(grid.time(i));
        tape.trajectory.states.push_back(x);
    }
    return tape;
}

/// Samples the solution at every grid point using fixed-step RK4 (h = dt / substeps).
/// Throws BlowUpError at the first substep whose state norm exceeds the threshold.
template <VectorFieldLike F>
Trajectory integrate(const F& f, const Vector& x0, const TimeGrid& grid, const SolverOptions& opts = {}) {
    detail_solver::validate(x0, f.dimension(), grid, opts);
    Trajectory traj;
    traj.times.reserve(grid.count);
    traj.states.reserve(grid.count);
    const double h = grid.dt / static_cast<double>(opts.substeps);
    Vector x = x0;
    traj.times.push_back(grid.time(0));
    traj.states.push_back(x);
    for (std::size_t i = 1; i < grid.count; ++i) {
        for (std::size_t s = 0; s < opts.substeps; ++s) {
            const Vector k1 = f.forward(x).output;
            const Vector k2 = f.forward(x + 0.5 * h * k1).output;
            const Vector k3 = f.forward(x + 0.5 * h * k2).output;
            const Vector k4 = f.forward(x + h * k3).output;
            x += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            detail_solver::check_blowup(x, grid.time(i - 1) + static_cast<double>(s + 1) * h, opts);
        }
        traj.times.push_back(grid.time(i));
        traj.states.push_back(x);
    }
    return traj;
}

inline Trajectory integrate(const VectorField& f, const Vector& x0, const TimeGrid& grid, const SolverOptions& opts = {}) {
    return std::visit([&](const auto& field) { return integrate(field, x0, grid, opts); }, f);
}

struct SolverGradient {
    Vector parameters;  // d loss / d theta, layout of f.parameters()
    Vector initial_state;
};

/// Reverse sweep through the recorded RK4 steps. `state_grads[i]` is d loss / d x(t_i).
template <VectorFieldLike F>
SolverGradient backprop(const F& f, const SolverTape<F>& tape, const std::vector<Vector>& state_grads) {
    const auto& grid = tape.grid;
    detail::require(state_grads.size() == grid.count, "grad_through_solver: one loss gradient per grid point required");
    const Eigen::Index dim = f.dimension();
    for (const auto& g : state_grads)
        detail::require(g.size() == dim, "grad_through_solver: loss gradient dimension mismatch");

    const double h = grid.dt / static_cast<double>(tape.options.substeps);
    SolverGradient out{Vector::Zero(f.parameters().size()), Vector()};
    Vector dx = state_grads.back();
    std::size_t step = tape.steps.size();
    for (std::size_t i = grid.count - 1; i > 0; --i) {
        for (std::size_t s = 0; s < tape.options.substeps; ++s) {
            const auto& st = tape.steps[--step];
            Vector dk1 = (h / 6.0) * dx;
            Vector dk2 = (h / 3.0) * dx;
            Vector dk3 = (h / 3.0) * dx;
            const Vector dk4 = (h / 6.0) * dx;
            const Vector ds4 = f.backward(st.k4, dk4, out.parameters);
            dx += ds4;
            dk3 += h * ds4;
            const Vector ds3 = f.backward(st.k3, dk3, out.parameters);
            dx += ds3;
            dk2 += (0.5 * h) * ds3;
            const Vector ds2 = f.backward(st.k2, dk2, out.parameters);
            dx += ds2;
            dk1 += (0.5 * h) * ds2;
            dx += f.backward(st.k1, dk1, out.parameters);
        }
        dx += state_grads[i - 1];
    }
    out.initial_state = std::move(dx);
    return out;
}

/// Exact gradients of a loss on the discretized trajectory (discretize-then-optimize).
template <VectorFieldLike F>
SolverGradient grad_through_solver(const F& f, const Vector& x0, const TimeGrid& grid,
                                   const std::vector<Vector>& state_grads, const SolverOptions& opts = {}) {
    return backprop(f, record(f, x0, grid, opts), state_grads);
}

}  // namespace tsode::ode
