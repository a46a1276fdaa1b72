#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "tsode/core/error.hpp"

namespace tsode::closed_form {

/// Explicit solution of a linear ODE with K oscillatory modes:
///
///   X(t) = sum_k e^{a_k s} [ C_{2k-1} (cos b_k s - sin b_k s) + C_{2k} (cos b_k s + sin b_k s) ],  s = t - t0
///
/// with decay rates a_k (`alphas`), angular frequencies b_k (`betas`, ascending) and
/// amplitudes `c` (2K values, pairs per mode).
struct ClosedFormModel {
    std::vector<double> alphas;
    std::vector<double> betas;
    std::vector<double> c;
    double t0 = 0.0;

    std::size_t modes() const noexcept { return betas.size(); }

    /// Scalar count carried by the model: alphas, betas, amplitudes and the shift.
    std::size_t parameter_count() const noexcept { return alphas.size() + betas.size() + c.size() + 1; }

    void validate() const {
        detail::require(!betas.empty(), "ClosedFormModel: at least one mode required");
        detail::require(alphas.size() == betas.size(), "ClosedFormModel: one alpha per mode required");
        detail::require(c.size() == 2 * betas.size(), "ClosedFormModel: two amplitudes per mode required");
        detail::require(std::isfinite(t0), "ClosedFormModel: t0 must be finite");
        for (std::size_t k = 0; k < betas.size(); ++k) {
            detail::require(std::isfinite(alphas[k]) && std::isfinite(betas[k]), "ClosedFormModel: non-finite rate");
            detail::require(betas[k] >= 0.0, "ClosedFormModel: betas must be non-negative");
            if (k > 0) detail::require(betas[k - 1] <= betas[k], "ClosedFormModel: betas must be ascending");
        }
        for (double v : c) detail::require(std::isfinite(v), "ClosedFormModel: non-finite amplitude");
    }

    /// Reorders modes so that betas ascend, carrying alphas and amplitude pairs along.
    void sort_modes() {
        std::vector<std::size_t> idx(betas.size());
        for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return betas[a] < betas[b]; });
        ClosedFormModel out{{}, {}, {}, t0};
        for (std::size_t k : idx) {
            out.alphas.push_back(alphas[k]);
            out.betas.push_back(betas[k]);
            out.c.push_back(c[2 * k]);
            out.c.push_back(c[2 * k + 1]);
        }
        *this = std::move(out);
    }
};

/// The two basis functions of mode (alpha, beta) at shifted time s, and their s-derivatives.
struct ModeBasis {
    double minus, plus;    // e^{as}(cos bs - sin bs), e^{as}(cos bs + sin bs)
    double dminus, dplus;  // d/ds of the above
};

inline ModeBasis mode_basis(double alpha, double beta, double s) {
    const double growth = alpha * s;
    if (growth > 700.0) throw Error("closed form: exponential overflow (alpha * t = " + std::to_string(growth) + ")");
    const double e = std::exp(growth);
    const double cs = std::cos(beta * s);
    const double sn = std::sin(beta * s);
    return {e * (cs - sn), e * (cs + sn), e * (alpha * (cs - sn) - beta * (sn + cs)), e * (alpha * (cs + sn) + beta * (cs - sn))};
}

/// X(t - t0) at each time.
inline std::vector<double> evaluate(const ClosedFormModel& model, std::span<const double> times) {
    model.validate();
    std::vector<double> out(times.size(), 0.0);
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double s = times[i] - model.t0;
        double sum = 0.0;
        for (std::size_t k = 0; k < model.modes(); ++k) {
            const auto b = mode_basis(model.alphas[k], model.betas[k], s);
            sum += model.c[2 * k] * b.minus + model.c[2 * k + 1] * b.plus;
        }
        out[i] = sum;
    }
    return out;
}

/// Uniform grid start, start + dt, ... with `count` points.
inline std::vector<double> time_grid(double start, double dt, std::size_t count) {
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i) t[i] = start + static_cast<double>(i) * dt;
    return t;
}

}  // namespace tsode::closed_form
