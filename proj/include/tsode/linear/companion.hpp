#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "tsode/linear/eigen.hpp"

namespace tsode::linear {

/// Shift-row companion matrix of  lambda^d + a_{d-1} lambda^{d-1} + ... + a_0,
/// given `coeffs` = [a_0, ..., a_{d-1}]. Ones on the superdiagonal, last row -a.
/// This is the first-order system of the scalar ODE x^(d) + a_{d-1} x^(d-1) + ... + a_0 x = 0
/// with state (x, x', ..., x^(d-1)).
inline Matrix companion_from_char_poly(std::span<const double> coeffs) {
    detail::require(!coeffs.empty(), "companion_from_char_poly: need at least one coefficient");
    const auto d = static_cast<Eigen::Index>(coeffs.size());
    Matrix c = Matrix::Zero(d, d);
    for (Eigen::Index i = 0; i + 1 < d; ++i) c(i, i + 1) = 1.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        detail::require(std::isfinite(coeffs[static_cast<std::size_t>(j)]), "companion_from_char_poly: non-finite coefficient");
        c(d - 1, j) = -coeffs[static_cast<std::size_t>(j)];
    }
    return c;
}

/// Monic real polynomial coefficients [a_0, ..., a_{d-1}] whose roots are `roots`
/// (complex roots must come in conjugate pairs).
inline std::vector<double> char_poly_from_roots(std::span<const Complex> roots) {
    std::vector<Complex> poly{Complex{1.0, 0.0}};  // highest degree last
    for (const auto& r : roots) {
        std::vector<Complex> next(poly.size() + 1, Complex{0.0, 0.0});
        for (std::size_t i = 0; i < poly.size(); ++i) {
            next[i + 1] += poly[i];
            next[i] -= r * poly[i];
        }
        poly = std::move(next);
    }
    std::vector<double> coeffs(roots.size());
    for (std::size_t i = 0; i < roots.size(); ++i) coeffs[i] = poly[i].real();
    return coeffs;
}

/// Companion system whose spectrum is {alpha_k +- i beta_k}; a zero beta contributes a
/// single real root alpha_k.
inline Matrix companion_from_modes(std::span<const double> alphas, std::span<const double> betas) {
    detail::require(alphas.size() == betas.size(), "companion_from_modes: size mismatch");
    std::vector<Complex> roots;
    for (std::size_t k = 0; k < alphas.size(); ++k) {
        if (betas[k] == 0.0) {
            roots.emplace_back(alphas[k], 0.0);
        } else {
            roots.emplace_back(alphas[k], betas[k]);
            roots.emplace_back(alphas[k], -betas[k]);
        }
    }
    return companion_from_char_poly(char_poly_from_roots(roots));
}

/// x_1(t) = c_2 sin 2t + c_4 sin t + c_1 cos 2t + c_3 cos t: the first component of any
/// solution of the companion system of lambda^4 + 5 lambda^2 + 4.
inline std::vector<double> particular_solution_x1(std::span<const double, 4> c, std::span<const double> times) {
    std::vector<double> out(times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        const double t = times[i];
        out[i] = c[1] * std::sin(2.0 * t) + c[3] * std::sin(t) + c[0] * std::cos(2.0 * t) + c[2] * std::cos(t);
    }
    return out;
}

/// Companion state (x_1, x_1', x_1'', x_1''') at t = 0 for the constants above. Recovering
/// these from observations of x_1 alone requires estimating its derivatives.
inline Eigen::VectorXd particular_solution_initial_state(std::span<const double, 4> c) {
    Eigen::VectorXd x(4);
    x << c[0] + c[2], 2.0 * c[1] + c[3], -4.0 * c[0] - c[2], -8.0 * c[1] - c[3];
    return x;
}

}  // namespace tsode::linear
