#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tsode/closed_form/model.hpp"
#include "tsode/closed_form/periodogram.hpp"
#include "tsode/core/time_series.hpp"
#include "tsode/optim/nelder_mead.hpp"

namespace tsode::closed_form {

struct FitOptions {
    std::uint64_t seed = 0;
    std::size_t restarts = 3;          // Nelder-Mead runs at most
    bool free_alphas = false;          // alphas fixed at 0 unless set
    double target_rmse = 1e-9;         // a run stops once RMSE reaches this
    double max_rmse = std::numeric_limits<double>::infinity();  // stagnation above this is an error
    std::size_t max_evaluations = 4000;  // per run
};

struct FitResult {
    ClosedFormModel model;
    double rmse = 0.0;
    std::size_t evaluations = 0;  // objective evaluations over all runs
    std::size_t runs = 0;
    FrequencyEstimate initial_frequencies;
};

/// Amplitudes minimizing the squared error for fixed rates and shift.
inline std::vector<double> least_squares_amplitudes(const ClosedFormModel& shape, std::span<const double> times,
                                                    std::span<const double> values) {
    const auto k_modes = shape.modes();
    Eigen::MatrixXd design(static_cast<Eigen::Index>(times.size()), static_cast<Eigen::Index>(2 * k_modes));
    for (std::size_t i = 0; i < times.size(); ++i)
        for (std::size_t k = 0; k < k_modes; ++k) {
            const auto b = mode_basis(shape.alphas[k], shape.betas[k], times[i] - shape.t0);
            design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * k)) = b.minus;
            design(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(2 * k + 1)) = b.plus;
        }
    const Eigen::Map<const Eigen::VectorXd> rhs(values.data(), static_cast<Eigen::Index>(values.size()));
    const Eigen::VectorXd c = design.completeOrthogonalDecomposition().solve(rhs);
    return {c.data(), c.data() + c.size()};
}

namespace detail_fit {

struct Layout {
    std::size_t k;
    bool free_alphas;
    std::size_t size() const { return 3 * k + 1 + (free_alphas ? k : 0); }
};

inline std::vector<double> pack(const ClosedFormModel& m, const Layout& lay) {
    std::vector<double> x;
    x.insert(x.end(), m.betas.begin(), m.betas.end());
    x.insert(x.end(), m.c.begin(), m.c.end());
    x.push_back(m.t0);
    if (lay.free_alphas) x.insert(x.end(), m.alphas.begin(), m.alphas.end());
    return x;
}

inline ClosedFormModel unpack(const std::vector<double>& x, const Layout& lay) {
    ClosedFormModel m;
    const auto k = static_cast<std::ptrdiff_t>(lay.k);
    m.betas.assign(x.begin(), x.begin() + k);
    m.c.assign(x.begin() + k, x.begin() + 3 * k);
    m.t0 = x[static_cast<std::size_t>(3 * k)];
    if (lay.free_alphas)
        m.alphas.assign(x.begin() + 3 * k + 1, x.begin() + 4 * k + 1);
    else
        m.alphas.assign(lay.k, 0.0);
    return m;
}

}  // namespace detail_fit

/// Fits betas, amplitudes and the time shift to one sample by Nelder-Mead on the RMSE.
///
/// Betas start at the periodogram peaks and amplitudes at their least-squares values. The
/// shift is confined to one fundamental period [0, 2 pi / min beta]. Runs that stall are
/// restarted from the best point with a freshly randomized simplex.
inline FitResult fit_closed_form(std::span<const double> values, double dt, std::size_t k_modes,
                                 const FitOptions& opts = {}, double t_start = 0.0) {
    detail::require(k_modes >= 1, "fit_closed_form: K must be positive");
    detail::require(values.size() >= 4 * k_modes + 2, "fit_closed_form: sample too short for K modes");
    const std::vector<double> times = time_grid(t_start, dt, values.size());

    FitResult result;
    result.initial_frequencies = estimate_frequencies(values, dt, k_modes);
    ClosedFormModel init{std::vector<double>(k_modes, 0.0), result.initial_frequencies.betas, {}, 0.0};
    init.c = least_squares_amplitudes(init, times, values);

    const detail_fit::Layout layout{k_modes, opts.free_alphas};
    const double span = static_cast<double>(values.size()) * dt;
    const double bin = 2.0 * std::numbers::pi / span;
    auto objective = [&](const std::vector<double>& x) {
        const auto m = detail_fit::unpack(x, layout);
        double min_beta = std::numeric_limits<double>::infinity();
        for (double b : m.betas) {
            if (b <= 0.0) return std::numeric_limits<double>::infinity();
            min_beta = std::min(min_beta, b);
        }
        if (m.t0 < 0.0 || m.t0 > 2.0 * std::numbers::pi / min_beta) return std::numeric_limits<double>::infinity();
        for (double a : m.alphas)
            if (std::abs(a) * span > 700.0) return std::numeric_limits<double>::infinity();
        double sum = 0.0;
        for (std::size_t i = 0; i < times.size(); ++i) {
            const double s = times[i] - m.t0;
            double v = 0.0;
            for (std::size_t k = 0; k < k_modes; ++k) {
                const auto b = mode_basis(m.alphas[k], m.betas[k], s);
                v += m.c[2 * k] * b.minus + m.c[2 * k + 1] * b.plus;
            }
            sum += (v - values[i]) * (v - values[i]);
        }
        return std::sqrt(sum / static_cast<double>(times.size()));
    };

    double c_scale = 1e-3;
    for (double c : init.c) c_scale = std::max(c_scale, std::abs(c));
    std::vector<double> steps;
    steps.insert(steps.end(), k_modes, 0.25 * bin);
    steps.insert(steps.end(), 2 * k_modes, 0.1 * c_scale);
    steps.push_back(0.05 * 2.0 * std::numbers::pi / init.betas.front());
    if (opts.free_alphas) steps.insert(steps.end(), k_modes, 0.1 / span);

    optim::NelderMeadOptions nm;
    nm.f_target = opts.target_rmse;
    nm.max_evaluations = opts.max_evaluations;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> jitter(0.5, 1.5);

    std::vector<double> best = detail_fit::pack(init, layout);
    double best_value = std::numeric_limits<double>::infinity();
    bool stagnated = false;
    const std::size_t runs = std::max<std::size_t>(1, opts.restarts);
    for (std::size_t run = 0; run < runs; ++run) {
        std::vector<double> run_steps = steps;
        if (run > 0)
            for (auto& s : run_steps) s *= jitter(rng) * (rng() & 1U ? 1.0 : -1.0);
        // a negative t0 step would leave the feasible region from t0 = 0
        run_steps[3 * k_modes] = std::abs(run_steps[3 * k_modes]);
        const auto res = optim::nelder_mead(objective, best, run_steps, nm);
        result.evaluations += res.evaluations;
        ++result.runs;
        stagnated = res.stagnated;
        if (res.value < best_value) {
            best_value = res.value;
            best = res.x;
        }
        if (best_value <= opts.target_rmse) break;
    }
    if (stagnated && best_value > opts.max_rmse)
        throw ConvergenceError("fit_closed_form: simplex stagnated after " + std::to_string(result.runs) + " runs",
                               best_value);

    result.model = detail_fit::unpack(best, layout);
    result.model.sort_modes();
    result.rmse = best_value;
    return result;
}

inline FitResult fit_closed_form(const TimeSeries& sample, std::size_t k_modes, const FitOptions& opts = {}) {
    return fit_closed_form(sample.span(), sample.dt(), k_modes, opts, sample.t0());
}

}  // namespace tsode::closed_form
