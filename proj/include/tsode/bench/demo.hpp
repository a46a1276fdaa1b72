#pragma once

#include <array>
#include <chrono>
#include <cmath>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tsode/closed_form/fit.hpp"
#include "tsode/closed_form/io.hpp"
#include "tsode/core/synth.hpp"
#include "tsode/linear/companion.hpp"
#include "tsode/linear/io.hpp"
#include "tsode/linear/linear_node.hpp"

namespace tsode::bench {

inline constexpr std::array<std::string_view, 4> kDemoNames = {"sine_recovery", "two_tone_spectrum", "companion",
                                                               "closed_form_speed"};

struct DemoReport {
    std::string name;
    bool ok = false;      // the demo's own success check
    std::string text;     // console output
    nlohmann::json json;  // machine-readable report
};

namespace detail_demo {

inline double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

inline nlohmann::json matrix_json(const linear::Matrix& a) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        std::vector<double> r(static_cast<std::size_t>(a.cols()));
        for (Eigen::Index j = 0; j < a.cols(); ++j) r[static_cast<std::size_t>(j)] = a(i, j);
        rows.push_back(r);
    }
    return rows;
}

inline std::string eigen_lines(const linear::Spectrum& s) {
    std::string out;
    for (std::size_t k = 0; k < s.size(); ++k)
        out += "  lambda" + std::to_string(k + 1) + " = " + linear::format_complex(s.eigenvalues[k]) + "\n";
    return out;
}

/// The 4 sin t - 5 sin 2t experiment: 100 samples on [0, 4 pi).
inline TimeSeries two_tone_sample() { return synth_scalar("two_tone", 100, 0.0, 4.0 * std::numbers::pi); }

}  // namespace detail_demo

/// Linear neural ODE on [sin t, cos t]; the learned matrix should approach [[0, 1], [-1, 0]].
inline DemoReport demo_sine_recovery(std::uint64_t seed = 0) {
    using namespace detail_demo;
    const auto ch = synth("sine_pair", 100, 0.0, 2.0 * std::numbers::pi);
    std::vector<linear::Vector> samples;
    for (std::size_t i = 0; i < ch[0].size(); ++i) samples.push_back(linear::Vector{{ch[0][i], ch[1][i]}});
    linear::LinearNodeOptions opts;
    opts.seed = seed;
    const auto start = std::chrono::steady_clock::now();
    const auto res = linear::train_linear_node(samples, {0.0, ch[0].dt(), samples.size()}, samples.front(), opts);
    const double secs = seconds_since(start);
    linear::Matrix target(2, 2);
    target << 0.0, 1.0, -1.0, 0.0;
    const linear::Matrix dev = res.system.a - target;
    const double max_dev = dev.cwiseAbs().maxCoeff();

    DemoReport r{"sine_recovery", max_dev <= 0.02, {}, {}};
    std::ostringstream os;
    os << "Learned system matrix A (x' = A x, x = [sin t, cos t]):\n" << linear::format_matrix(res.system.a)
       << "Deviation from [[0, 1], [-1, 0]]:\n" << linear::format_matrix(dev, 6) << "max |deviation| = " << max_dev
       << "\niterations = " << res.iterations << ", final loss = " << res.final_loss << ", seed = " << seed
       << ", time = " << secs << " s\n";
    r.text = os.str();
    r.json = {{"demo", r.name}, {"seed", seed}, {"matrix", matrix_json(res.system.a)}, {"deviation", matrix_json(dev)},
              {"max_deviation", max_dev}, {"iterations", res.iterations}, {"final_loss", res.final_loss},
              {"seconds", secs}, {"ok", r.ok}};
    return r;
}

/// 4x4 linear system observed through a learned readout, fit to 4 sin t - 5 sin 2t. The
/// spectrum should approach {+-i, +-2i}.
inline DemoReport demo_two_tone_spectrum(std::uint64_t seed = 0) {
    using namespace detail_demo;
    const auto y = two_tone_sample();
    linear::LinearNodeOptions opts;
    opts.seed = seed;
    const linear::Vector x0{{1.0, 0.0, 0.0, 0.0}};
    const auto start = std::chrono::steady_clock::now();
    const auto res = linear::train_linear_node_observed(y.span(), {0.0, y.dt(), y.size()}, x0, opts);
    const double secs = seconds_since(start);
    const auto spectrum = linear::eigenvalues(res.system.a);
    const double err = linear::root_match_error(spectrum.eigenvalues, {{0, 1}, {0, -1}, {0, 2}, {0, -2}});
    const auto form = linear::solution_form_report(res.system.a);

    DemoReport r{"two_tone_spectrum", err <= 0.05, {}, {}};
    std::ostringstream os;
    os << "Learned 4x4 system matrix A:\n" << linear::format_matrix(res.system.a) << "Eigenvalues:\n" << eigen_lines(spectrum)
       << "max distance to {+-i, +-2i} = " << err << "\nSolution form: x(t) = " << form.rendering
       << "\niterations = " << res.iterations << ", final loss = " << res.final_loss << ", seed = " << seed
       << ", time = " << secs << " s\n";
    r.text = os.str();
    r.json = linear::spectrum_report(res.system.a);
    r.json["demo"] = r.name;
    r.json["seed"] = seed;
    r.json["matrix"] = matrix_json(res.system.a);
    r.json["readout"] = std::vector<double>(res.readout.data(), res.readout.data() + res.readout.size());
    r.json["root_error"] = err;
    r.json["iterations"] = res.iterations;
    r.json["final_loss"] = res.final_loss;
    r.json["seconds"] = secs;
    r.json["ok"] = r.ok;
    return r;
}

/// Companion matrix of x'''' + 5 x'' + 4 x = 0 and its spectrum.
inline DemoReport demo_companion() {
    using namespace detail_demo;
    const std::array<double, 4> coeffs{4.0, 0.0, 5.0, 0.0};
    const auto a = linear::companion_from_char_poly(coeffs);
    const auto spectrum = linear::eigenvalues(a);
    const double err = linear::root_match_error(spectrum.eigenvalues, {{0, 1}, {0, -1}, {0, 2}, {0, -2}});
    const bool last_row = a(3, 0) == -4.0 && a(3, 1) == 0.0 && a(3, 2) == -5.0 && a(3, 3) == 0.0;

    DemoReport r{"companion", last_row && err <= 1e-8, {}, {}};
    std::ostringstream os;
    os << "Companion matrix of x'''' + 5x'' + 4x = 0:\n" << linear::format_matrix(a, 0) << "Eigenvalues:\n"
       << eigen_lines(spectrum) << "max distance to {+-i, +-2i} = " << err << "\nSolution form: x(t) = "
       << linear::solution_form_report(a).rendering << "\n";
    r.text = os.str();
    r.json = linear::spectrum_report(a);
    r.json["demo"] = r.name;
    r.json["char_poly"] = coeffs;
    r.json["matrix"] = matrix_json(a);
    r.json["root_error"] = err;
    r.json["ok"] = r.ok;
    return r;
}

/// Objective evaluations of the closed-form fit against optimizer iterations of the linear
/// neural ODE on the two-tone task. The linear ODE stops once its MSE is below 0.05^2.
inline DemoReport demo_closed_form_speed(std::uint64_t seed = 0) {
    using namespace detail_demo;
    const auto y = two_tone_sample();
    closed_form::FitOptions fo;
    fo.seed = seed;
    auto start = std::chrono::steady_clock::now();
    const auto fit = closed_form::fit_closed_form(y, 2, fo);
    const double fit_secs = seconds_since(start);

    linear::LinearNodeOptions opts;
    opts.seed = seed;
    opts.loss_tolerance = 0.05 * 0.05;
    start = std::chrono::steady_clock::now();
    const auto node = linear::train_linear_node_observed(y.span(), {0.0, y.dt(), y.size()},
                                                         linear::Vector{{1.0, 0.0, 0.0, 0.0}}, opts);
    const double node_secs = seconds_since(start);
    const double ratio = static_cast<double>(node.iterations) / static_cast<double>(fit.evaluations);
    const bool betas_ok = std::abs(fit.model.betas[0] - 1.0) <= 0.02 && std::abs(fit.model.betas[1] - 2.0) <= 0.02;

    DemoReport r{"closed_form_speed", ratio >= 5.0 && betas_ok && fit.rmse <= 0.05, {}, {}};
    std::ostringstream os;
    os << "Closed form: betas = [" << fit.model.betas[0] << ", " << fit.model.betas[1] << "], RMSE = " << fit.rmse
       << ", function evaluations = " << fit.evaluations << " (" << fit_secs << " s)\n"
       << "Linear neural ODE: iterations = " << node.iterations << ", final MSE = " << node.final_loss << " ("
       << node_secs << " s)\n"
       << "iterations / evaluations = " << ratio << "\n";
    r.text = os.str();
    r.json = {{"demo", r.name},
              {"seed", seed},
              {"closed_form", closed_form::to_json(fit.model)},
              {"closed_form_rmse", fit.rmse},
              {"closed_form_evaluations", fit.evaluations},
              {"linear_node_iterations", node.iterations},
              {"linear_node_final_loss", node.final_loss},
              {"ratio", ratio},
              {"ok", r.ok}};
    return r;
}

inline DemoReport run_demo(std::string_view name, std::uint64_t seed = 0) {
    if (name == "sine_recovery") return demo_sine_recovery(seed);
    if (name == "two_tone_spectrum") return demo_two_tone_spectrum(seed);
    if (name == "companion") return demo_companion();
    if (name == "closed_form_speed") return demo_closed_form_speed(seed);
    throw Error("unknown demo '" + std::string(name) + "'");
}

}  // namespace tsode::bench
