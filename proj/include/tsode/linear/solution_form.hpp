#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "tsode/linear/eigen.hpp"

namespace tsode::linear {

struct Mode {
    double alpha = 0.0;  // decay rate
    double beta = 0.0;   // angular frequency, >= 0
};

/// Functional form of the solutions of x' = A x.
struct SolutionForm {
    std::vector<Mode> modes;  // one per conjugate pair or real eigenvalue, decreasing beta
    std::string rendering;
};

namespace detail_form {

inline std::string subscript(std::size_t i) {
    static const char* digits[] = {"₀", "₁", "₂", "₃", "₄", "₅", "₆", "₇", "₈", "₉"};
    std::string s;
    for (char ch : std::to_string(i)) s += digits[ch - '0'];
    return s;
}

/// Rounded to `decimals`, trailing zeros trimmed, unicode minus.
inline std::string number(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    double r = std::round(std::abs(v) * scale) / scale;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, r);
    std::string s = buf;
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    return (v < 0.0 && r != 0.0 ? "−" : "") + s;
}

inline bool is_zero(double v, int decimals) { return std::round(std::abs(v) * std::pow(10.0, decimals)) == 0.0; }

/// "2t", "t", "0.5t"
inline std::string rate_times_t(double rate, int decimals) {
    const std::string n = number(rate, decimals);
    if (n == "1") return "t";
    if (n == "−1") return "−t";
    return n + "t";
}

}  // namespace detail_form

/// Groups a spectrum into modes: a conjugate pair alpha +- i beta gives one mode with
/// beta > 0, each real eigenvalue gives a beta = 0 mode.
inline std::vector<Mode> modes_from_spectrum(const Spectrum& spectrum) {
    std::vector<Mode> modes;
    for (const auto& ev : spectrum.eigenvalues) {
        if (ev.imag() < 0.0) continue;
        modes.push_back({ev.real(), ev.imag()});
    }
    std::stable_sort(modes.begin(), modes.end(), [](const Mode& a, const Mode& b) {
        if (a.beta != b.beta) return a.beta > b.beta;
        return a.alpha > b.alpha;
    });
    return modes;
}

/// Renders modes as the list of basis functions a solution component combines, e.g.
/// "f(c₁cos 2t, c₂sin 2t, c₃cos t, c₄sin t)". Rates are rounded to `decimals` places
/// before printing, so nearly-zero decay rates print as pure oscillations.
inline std::string render_modes(const std::vector<Mode>& modes, int decimals = 2) {
    using namespace detail_form;
    std::vector<std::string> terms;
    std::size_t next = 1;
    auto coef = [&] { return "c" + subscript(next++); };
    for (const auto& m : modes) {
        const std::string growth = is_zero(m.alpha, decimals) ? "" : "e^{" + rate_times_t(m.alpha, decimals) + "}";
        if (is_zero(m.beta, decimals)) {
            terms.push_back(coef() + growth);
        } else {
            const std::string arg = rate_times_t(m.beta, decimals);
            terms.push_back(coef() + growth + "cos " + arg);
            terms.push_back(coef() + growth + "sin " + arg);
        }
    }
    if (terms.size() == 1) return terms.front();
    std::string out = "f(";
    for (std::size_t i = 0; i < terms.size(); ++i) out += (i ? ", " : "") + terms[i];
    return out + ")";
}

inline SolutionForm solution_form_report(const Matrix& a, int decimals = 2) {
    SolutionForm form;
    form.modes = modes_from_spectrum(eigenvalues(a));
    form.rendering = render_modes(form.modes, decimals);
    return form;
}

}  // namespace tsode::linear
