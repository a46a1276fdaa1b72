#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "tsode/core/error.hpp"

namespace tsode::optim {

struct NelderMeadOptions {
    std::size_t max_evaluations = 20000;
    double f_tolerance = 1e-12;   // stop when f_worst - f_best <= f_tolerance * (1 + |f_best|)
    double x_tolerance = 1e-12;   // stagnation: simplex diameter below this
    double f_target = -std::numeric_limits<double>::infinity();  // stop as soon as f_best <= f_target
};

struct NelderMeadResult {
    std::vector<double> x;
    double value = 0.0;
    std::size_t evaluations = 0;
    std::size_t iterations = 0;
    bool converged = false;   // function spread or target criterion met
    bool stagnated = false;   // simplex collapsed before convergence
};

/// Downhill simplex minimization (reflection 1, expansion 2, contraction 0.5, shrink 0.5).
/// `steps[i]` is the initial simplex edge along coordinate i. Non-finite objective values
/// are treated as +infinity, so an objective can reject infeasible points that way.
inline NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                                    std::vector<double> start, const std::vector<double>& steps,
                                    const NelderMeadOptions& opts = {}) {
    const std::size_t n = start.size();
    detail::require(n >= 1, "nelder_mead: empty parameter vector");
    detail::require(steps.size() == n, "nelder_mead: one step per parameter required");

    NelderMeadResult res;
    auto f = [&](const std::vector<double>& x) {
        ++res.evaluations;
        const double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += steps[i];
    std::vector<double> values(n + 1);
    for (std::size_t j = 0; j <= n; ++j) values[j] = f(simplex[j]);

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    auto blend = [&](std::vector<double>& out, const std::vector<double>& from, const std::vector<double>& to, double s) {
        for (std::size_t i = 0; i < n; ++i) out[i] = from[i] + s * (to[i] - from[i]);
    };

    while (true) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        {
            std::vector<std::vector<double>> s2(n + 1);
            std::vector<double> v2(n + 1);
            for (std::size_t k = 0; k <= n; ++k) {
                s2[k] = std::move(simplex[order[k]]);
                v2[k] = values[order[k]];
            }
            simplex.swap(s2);
            values.swap(v2);
        }
        const double best = values[0];
        const double worst = values[n];
        if (best <= opts.f_target || (std::isfinite(worst) && worst - best <= opts.f_tolerance * (1.0 + std::abs(best)))) {
            res.converged = true;
            break;
        }
        double diameter = 0.0;
        for (std::size_t j = 1; j <= n; ++j)
            for (std::size_t i = 0; i < n; ++i) diameter = std::max(diameter, std::abs(simplex[j][i] - simplex[0][i]));
        if (diameter < opts.x_tolerance) {
            res.stagnated = true;
            break;
        }
        if (res.evaluations >= opts.max_evaluations) break;
        ++res.iterations;

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[j][i] / static_cast<double>(n);

        blend(trial, centroid, simplex[n], -1.0);  // reflection
        const double fr = f(trial);
        if (fr < values[0]) {
            blend(trial2, centroid, simplex[n], -2.0);  // expansion
            const double fe = f(trial2);
            if (fe < fr) {
                simplex[n] = trial2;
                values[n] = fe;
            } else {
                simplex[n] = trial;
                values[n] = fr;
            }
        } else if (fr < values[n - 1]) {
            simplex[n] = trial;
            values[n] = fr;
        } else {
            const bool outside = fr < values[n];
            if (outside)
                blend(trial2, centroid, trial, 0.5);
            else
                blend(trial2, centroid, simplex[n], 0.5);
            const double fc = f(trial2);
            if (fc < (outside ? fr : values[n])) {
                simplex[n] = trial2;
                values[n] = fc;
            } else {
                for (std::size_t j = 1; j <= n; ++j) {
                    blend(simplex[j], simplex[0], simplex[j], 0.5);
                    values[j] = f(simplex[j]);
                }
            }
        }
    }
    res.x = simplex[0];
    res.value = values[0];
    return res;
}

}  // namespace tsode::optim
