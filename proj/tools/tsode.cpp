// Command-line front end: benchmark grid, demos, closed-form fitting and spectrum reports.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "tsode/bench/demo.hpp"
#include "tsode/bench/grid.hpp"
#include "tsode/closed_form/fit.hpp"
#include "tsode/closed_form/io.hpp"
#include "tsode/core/csv.hpp"
#include "tsode/linear/io.hpp"

namespace {

int cmd_bench(const std::string& config_path, const std::string& out_dir, std::size_t threads, bool quiet) {
    auto config = tsode::bench::load_config(config_path);
    if (threads != 0) config.threads = threads;
    tsode::bench::ProgressFn progress;
    if (!quiet)
        progress = [](std::size_t done, std::size_t total, const std::string& line) {
            std::fprintf(stderr, "[%zu/%zu] %s\n", done, total, line.c_str());
        };
    const auto result = tsode::bench::run_grid(config, progress);
    tsode::bench::write_outputs(config, result, out_dir);
    std::cout << tsode::bench::table_markdown(result.table, [&] {
        std::vector<std::string> names;
        for (const auto& d : config.datasets) names.push_back(d.name);
        return names;
    }(), config.models, config.sigmas, config.horizons);
    std::cout << "wrote " << (std::filesystem::path(out_dir) / "results.csv").string() << "\n";
    if (!result.table.failures.empty()) {
        std::cerr << result.table.failures.size() << " cell(s) failed\n";
        return 2;
    }
    return 0;
}

int cmd_demo(const std::string& name, std::uint64_t seed, const std::string& json_path) {
    const auto report = tsode::bench::run_demo(name, seed);
    std::cout << report.text;
    const std::string path = json_path.empty() ? name + ".json" : json_path;
    tsode::bench::write_text(path, report.json.dump(2) + "\n");
    std::cout << "report: " << path << (report.ok ? "" : " (check FAILED)") << "\n";
    return report.ok ? 0 : 1;
}

int cmd_fit_closed(const std::string& input, const std::string& column, std::size_t modes, bool free_alphas,
                   std::uint64_t seed, const std::string& out) {
    const auto series = tsode::load_csv(input, column);
    tsode::closed_form::FitOptions opts;
    opts.seed = seed;
    opts.free_alphas = free_alphas;
    const auto fit = tsode::closed_form::fit_closed_form(series, modes, opts);
    auto j = tsode::closed_form::to_json(fit.model);
    std::cout << j.dump(2) << "\n";
    std::cout << "rmse = " << fit.rmse << ", evaluations = " << fit.evaluations << ", runs = " << fit.runs << "\n";
    if (fit.initial_frequencies.low_confidence) std::cout << "warning: weak spectral peaks, frequency start is low-confidence\n";
    if (!out.empty()) {
        tsode::closed_form::save_model(out, fit.model);
        std::cout << "model: " << out << "\n";
    }
    return 0;
}

int cmd_spectrum(const std::string& matrix_path, int decimals, const std::string& out) {
    const auto a = tsode::linear::read_matrix_csv(matrix_path);
    const auto report = tsode::linear::spectrum_report(a, decimals);
    std::cout << tsode::linear::format_matrix(a) << "Eigenvalues:\n";
    for (const auto& e : report.at("eigenvalues"))
        std::cout << "  " << tsode::linear::format_complex({e.at("re").get<double>(), e.at("im").get<double>()}) << "\n";
    std::cout << "Solution form: x(t) = " << report.at("solution_form").get<std::string>() << "\n";
    if (!out.empty()) tsode::bench::write_text(out, report.dump(2) + "\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linear neural ODE and closed-form time series forecasting toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "bench_out";
    std::size_t threads = 0;
    bool quiet = false;
    auto* bench = app.add_subcommand("bench", "Run the benchmark grid described by a JSON config");
    bench->add_option("--config", config_path, "grid config (JSON)")->required()->check(CLI::ExistingFile);
    bench->add_option("--out", out_dir, "output directory");
    bench->add_option("--threads", threads, "worker threads (default: config value or all cores)");
    bench->add_flag("--quiet", quiet, "no per-task progress on stderr");

    std::string demo_name, demo_json;
    std::uint64_t seed = 0;
    auto* demo = app.add_subcommand("demo", "Run a named demonstration");
    demo->add_option("name", demo_name, "sine_recovery | two_tone_spectrum | companion | closed_form_speed")
        ->required()
        ->check(CLI::IsMember({"sine_recovery", "two_tone_spectrum", "companion", "closed_form_speed"}));
    demo->add_option("--seed", seed, "training seed");
    demo->add_option("--json", demo_json, "report path (default <name>.json)");

    std::string input, column = "value", model_out;
    std::size_t modes = 2;
    bool free_alphas = false;
    auto* fit = app.add_subcommand("fit-closed", "Fit the closed-form model to one CSV column");
    fit->add_option("--input", input, "CSV file (first column is time)")->required()->check(CLI::ExistingFile);
    fit->add_option("--modes", modes, "number of oscillatory modes K")->check(CLI::PositiveNumber);
    fit->add_option("--column", column, "value column name");
    fit->add_flag("--free-alphas", free_alphas, "fit decay rates too");
    fit->add_option("--seed", seed, "restart seed");
    fit->add_option("--out", model_out, "write the model JSON here");

    std::string matrix_path, spectrum_out;
    int decimals = 2;
    auto* spectrum = app.add_subcommand("spectrum", "Eigenvalues and solution form of x' = A x");
    spectrum->add_option("--matrix", matrix_path, "square matrix as CSV rows")->required()->check(CLI::ExistingFile);
    spectrum->add_option("--decimals", decimals, "rounding of rates in the solution form");
    spectrum->add_option("--out", spectrum_out, "write the JSON report here");

    CLI11_PARSE(app, argc, argv);
    try {
        if (*bench) return cmd_bench(config_path, out_dir, threads, quiet);
        if (*demo) return cmd_demo(demo_name, seed, demo_json);
        if (*fit) return cmd_fit_closed(input, column, modes, free_alphas, seed, model_out);
        if (*spectrum) return cmd_spectrum(matrix_path, decimals, spectrum_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
