#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <sstream>
#include <vector>

#include <Eigen/Dense>

#include "tsode/core/error.hpp"

namespace tsode::linear {

using Matrix = Eigen::MatrixXd;
using Complex = std::complex<double>;

/// Eigenvalues of a real matrix. Complex values appear as adjacent conjugate pairs,
/// positive imaginary part first; pairs are ordered by decreasing |Im|, then decreasing Re.
struct Spectrum {
    std::vector<Complex> eigenvalues;

    std::size_t size() const noexcept { return eigenvalues.size(); }
    Complex sum() const {
        Complex s{0.0, 0.0};
        for (auto v : eigenvalues) s += v;
        return s;
    }
    Complex product() const {
        Complex p{1.0, 0.0};
        for (auto v : eigenvalues) p *= v;
        return p;
    }
};

namespace detail_eigen {

/// Diagonal similarity scaling so that row and column norms are comparable.
inline void balance(Matrix& a) {
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const Eigen::Index n = a.rows();
    bool done = false;
    while (!done) {
        done = true;
        for (Eigen::Index i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (Eigen::Index j = 0; j < n; ++j)
                if (j != i) {
                    c += std::abs(a(j, i));
                    r += std::abs(a(i, j));
                }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                a.row(i) /= f;
                a.col(i) *= f;
            }
        }
    }
}

/// Householder reduction to upper Hessenberg form (similarity transform).
inline void hessenberg(Matrix& a) {
    const Eigen::Index n = a.rows();
    for (Eigen::Index k = 0; k + 2 < n; ++k) {
        Eigen::VectorXd v = a.col(k).tail(n - k - 1);
        const double alpha = v.norm();
        if (alpha == 0.0) continue;
        v(0) += v(0) >= 0.0 ? alpha : -alpha;
        const double vnorm = v.norm();
        if (vnorm == 0.0) continue;
        v /= vnorm;
        auto rows = a.bottomRows(n - k - 1);
        rows -= 2.0 * v * (v.transpose() * rows);
        auto cols = a.rightCols(n - k - 1);
        cols -= 2.0 * (cols * v) * v.transpose();
        a.col(k).tail(n - k - 2).setZero();
    }
}

inline double sign(double a, double b) { return b >= 0.0 ? std::abs(a) : -std::abs(a); }

}  // namespace detail_eigen

/// All eigenvalues of a real square matrix (d <= 32): balancing, Householder
/// Hessenberg reduction, then Francis implicit double-shift QR iteration.
/// Throws ConvergenceError if more than 100 d sweeps are needed.
inline Spectrum eigenvalues(const Matrix& input) {
    detail::require(input.rows() == input.cols(), "eigenvalues: matrix must be square");
    detail::require(input.rows() >= 1 && input.rows() <= 32, "eigenvalues: dimension must be in [1, 32]");
    detail::require(input.allFinite(), "eigenvalues: entries must be finite");

    Matrix a = input;
    detail_eigen::balance(a);
    detail_eigen::hessenberg(a);

    using detail_eigen::sign;
    const int n = static_cast<int>(a.rows());
    const double eps = std::numeric_limits<double>::epsilon();
    double anorm = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::abs(a(i, j));
    const double deflate_abs = 1e-12 * input.norm();
    const int max_sweeps = 100 * n;

    std::vector<Complex> w(static_cast<std::size_t>(n));
    int nn = n - 1;
    int its = 0;
    int sweeps = 0;
    double t = 0.0;
    double p = 0, q = 0, r = 0, s = 0, x = 0, y = 0, z = 0, ww = 0;
    while (nn >= 0) {
        int l = nn;
        for (; l > 0; --l) {
            s = std::abs(a(l - 1, l - 1)) + std::abs(a(l, l));
            if (s == 0.0) s = anorm;
            if (std::abs(a(l, l - 1)) <= std::max(eps * s, deflate_abs)) {
                a(l, l - 1) = 0.0;
                break;
            }
        }
        x = a(nn, nn);
        if (l == nn) {
            w[static_cast<std::size_t>(nn)] = x + t;
            --nn;
            its = 0;
            continue;
        }
        y = a(nn - 1, nn - 1);
        ww = a(nn, nn - 1) * a(nn - 1, nn);
        if (l == nn - 1) {
            p = 0.5 * (y - x);
            q = p * p + ww;
            z = std::sqrt(std::abs(q));
            x += t;
            if (q >= 0.0) {
                z = p + sign(z, p);
                w[static_cast<std::size_t>(nn - 1)] = w[static_cast<std::size_t>(nn)] = x + z;
                if (z != 0.0) w[static_cast<std::size_t>(nn)] = x - ww / z;
            } else {
                w[static_cast<std::size_t>(nn - 1)] = Complex(x + p, z);
                w[static_cast<std::size_t>(nn)] = Complex(x + p, -z);
            }
            nn -= 2;
            its = 0;
            continue;
        }
        if (++sweeps > max_sweeps) {
            double residual = 0.0;
            for (int i = 1; i <= nn; ++i) residual = std::max(residual, std::abs(a(i, i - 1)));
            std::ostringstream msg;
            msg << "eigenvalues: QR iteration did not converge for matrix\n" << input;
            throw ConvergenceError(msg.str(), residual);
        }
        if (its == 10 || its == 20) {
            // exceptional shift
            t += x;
            for (int i = 0; i <= nn; ++i) a(i, i) -= x;
            s = std::abs(a(nn, nn - 1)) + std::abs(a(nn - 1, nn - 2));
            y = x = 0.75 * s;
            ww = -0.4375 * s * s;
        }
        ++its;
        int m = nn - 2;
        for (; m >= l; --m) {
            z = a(m, m);
            r = x - z;
            s = y - z;
            p = (r * s - ww) / a(m + 1, m) + a(m, m + 1);
            q = a(m + 1, m + 1) - z - r - s;
            r = a(m + 2, m + 1);
            s = std::abs(p) + std::abs(q) + std::abs(r);
            p /= s;
            q /= s;
            r /= s;
            if (m == l) break;
            const double u = std::abs(a(m, m - 1)) * (std::abs(q) + std::abs(r));
            const double v = std::abs(p) * (std::abs(a(m - 1, m - 1)) + std::abs(z) + std::abs(a(m + 1, m + 1)));
            if (u <= eps * v) break;
        }
        for (int i = m; i < nn - 1; ++i) {
            a(i + 2, i) = 0.0;
            if (i != m) a(i + 2, i - 1) = 0.0;
        }
        for (int k = m; k < nn; ++k) {
            if (k != m) {
                p = a(k, k - 1);
                q = a(k + 1, k - 1);
                r = 0.0;
                if (k + 1 != nn) r = a(k + 2, k - 1);
                if ((x = std::abs(p) + std::abs(q) + std::abs(r)) != 0.0) {
                    p /= x;
                    q /= x;
                    r /= x;
                }
            }
            if ((s = sign(std::sqrt(p * p + q * q + r * r), p)) == 0.0) continue;
            if (k == m) {
                if (l != m) a(k, k - 1) = -a(k, k - 1);
            } else {
                a(k, k - 1) = -s * x;
            }
            p += s;
            x = p / s;
            y = q / s;
            z = r / s;
            q /= p;
            r /= p;
            for (int j = k; j <= nn; ++j) {
                p = a(k, j) + q * a(k + 1, j);
                if (k + 1 != nn) {
                    p += r * a(k + 2, j);
                    a(k + 2, j) -= p * z;
                }
                a(k + 1, j) -= p * y;
                a(k, j) -= p * x;
            }
            const int mmin = nn < k + 3 ? nn : k + 3;
            for (int i = l; i <= mmin; ++i) {
                p = x * a(i, k) + y * a(i, k + 1);
                if (k + 1 != nn) {
                    p += z * a(i, k + 2);
                    a(i, k + 2) -= p * r;
                }
                a(i, k + 1) -= p * q;
                a(i, k) -= p;
            }
        }
    }

    std::sort(w.begin(), w.end(), [](const Complex& lhs, const Complex& rhs) {
        if (std::abs(lhs.imag()) != std::abs(rhs.imag())) return std::abs(lhs.imag()) > std::abs(rhs.imag());
        if (lhs.real() != rhs.real()) return lhs.real() > rhs.real();
        return lhs.imag() > rhs.imag();
    });
    return Spectrum{std::move(w)};
}

/// Largest distance between paired values under the best one-to-one pairing of two equally
/// sized multisets. Exhaustive up to 8 values, greedy nearest-first beyond.
inline double root_match_error(std::vector<Complex> got, const std::vector<Complex>& want) {
    detail::require(got.size() == want.size(), "root_match_error: sizes differ");
    if (got.empty()) return 0.0;
    if (got.size() <= 8) {
        std::sort(got.begin(), got.end(), [](Complex a, Complex b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        });
        double best = std::numeric_limits<double>::infinity();
        do {
            double worst = 0.0;
            for (std::size_t i = 0; i < got.size() && worst < best; ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
            best = std::min(best, worst);
        } while (std::next_permutation(got.begin(), got.end(), [](Complex a, Complex b) {
            return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
        }));
        return best;
    }
    double worst = 0.0;
    for (const auto& w : want) {
        auto it = std::min_element(got.begin(), got.end(), [&](Complex a, Complex b) { return std::abs(a - w) < std::abs(b - w); });
        worst = std::max(worst, std::abs(*it - w));
        got.erase(it);
    }
    return worst;
}

}  // namespace tsode::linear
