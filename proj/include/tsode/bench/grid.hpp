#pragma once

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <mutex>
#include <numbers>
#include <random>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsode/bench/config.hpp"
#include "tsode/bench/plot.hpp"
#include "tsode/bench/seed.hpp"
#include "tsode/bench/table.hpp"
#include "tsode/closed_form/io.hpp"
#include "tsode/core/metrics.hpp"
#include "tsode/core/preprocess.hpp"

namespace tsode::bench {

/// Windows drawn for the prediction plots of one (dataset, sigma, horizon) group.
struct PlotGroup {
    std::string dataset;
    double sigma = 0.0;
    std::size_t horizon = 0;
    std::vector<std::size_t> windows;  // test-window indices: the first one and a seeded random one
    std::vector<WindowPair> pairs;
    std::vector<std::vector<NamedSeries>> predictions;  // per window, per successful model
};

struct GridResult {
    MetricTable table;
    std::vector<PlotGroup> plots;
    nlohmann::json spectrum = nlohmann::json::object();
};

/// Progress callback: completed task count, total, and a one-line description.
using ProgressFn = std::function<void(std::size_t, std::size_t, const std::string&)>;

namespace detail_grid {

struct Prepared {
    std::string name;
    double dt = 1.0;
    std::vector<TimeSeries> train, test;  // per sigma
    std::vector<double> clean_train;      // standardized, noise free
};

struct Task {
    std::size_t dataset, sigma, horizon, model, repeat;
};

struct TaskResult {
    bool ok = false;
    double mae = 0.0;
    std::string error;
    std::vector<std::vector<double>> plot_predictions;  // repeat 0 only
    nlohmann::json extra;                               // closed-form sample fit
    double seconds = 0.0;
};

inline double mean_test_mae(const baselines::Forecaster& f, const std::vector<WindowPair>& windows) {
    double total = 0.0;
    for (const auto& w : windows) total += mae(f.predict(w.history), w.target);
    return total / static_cast<double>(windows.size());
}

/// Strongest periodogram peaks of a series, for the spectrum report.
inline nlohmann::json peak_report(const std::vector<double>& values, double dt, std::size_t count = 5) {
    const auto power = closed_form::periodogram(values);
    auto peaks = closed_form::spectral_peaks(power);
    std::stable_sort(peaks.begin(), peaks.end(), [&](std::size_t a, std::size_t b) { return power[a] > power[b]; });
    if (peaks.size() > count) peaks.resize(count);
    nlohmann::json out = nlohmann::json::array();
    const double span = static_cast<double>(values.size()) * dt;
    for (auto k : peaks) {
        const double beta = 2.0 * std::numbers::pi * static_cast<double>(k) / span;
        out.push_back({{"bin", k}, {"beta", beta}, {"period", 2.0 * std::numbers::pi / beta}, {"power", power[k]}});
    }
    return out;
}

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

/// Population standard deviation.
inline double stddev(const std::vector<double>& v) {
    const double mu = mean(v);
    double s = 0.0;
    for (double x : v) s += (x - mu) * (x - mu);
    return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace detail_grid

/// Runs every (dataset, sigma, horizon, model, repeat) task on a bounded worker pool.
///
/// Each dataset is standardized with the scaler of its training split; Gaussian noise with a
/// seed fixed per (dataset, sigma) is added to the standardized series; models fit on the
/// training split and are scored by MAE over every stride-1 test window. A task that throws
/// marks its cell as failed without stopping the grid.
inline GridResult run_grid(const GridConfig& config, const ProgressFn& progress = {}) {
    using namespace detail_grid;
    config.validate();
    GridResult result;

    std::vector<Prepared> data;
    for (const auto& spec : config.datasets) {
        const TimeSeries raw = load_dataset(spec, config);
        auto [raw_train, raw_val, raw_test] = split(raw, config.split);
        const auto [std_train, scaler] = standardize(raw_train);
        const TimeSeries clean = raw.with_values(scale(raw.span(), scaler));
        Prepared p{spec.name, raw.dt(), {}, {}, std_train.values()};
        for (double sigma : config.sigmas) {
            const auto noisy = add_noise(clean, {sigma, cell_seed(config.seed, spec.name, "noise", sigma, 0, 0)});
            auto [tr, va, te] = split(noisy, config.split);
            p.train.push_back(std::move(tr));
            p.test.push_back(std::move(te));
        }
        result.spectrum[spec.name] = {{"dt", raw.dt()},
                                      {"length", raw.size()},
                                      {"train_peaks", peak_report(p.clean_train, raw.dt())},
                                      {"closed_form_fits", nlohmann::json::array()}};
        data.push_back(std::move(p));
    }

    std::vector<Task> tasks;
    for (std::size_t d = 0; d < data.size(); ++d)
        for (std::size_t s = 0; s < config.sigmas.size(); ++s)
            for (std::size_t h = 0; h < config.horizons.size(); ++h)
                for (std::size_t m = 0; m < config.models.size(); ++m) {
                    const bool fixed = baselines::make_forecaster(config.models[m], config.options_for(config.models[m]))->deterministic();
                    const std::size_t reps = fixed ? 1 : config.repeats;
                    for (std::size_t r = 0; r < reps; ++r) tasks.push_back({d, s, h, m, r});
                }

    // plot windows per (dataset, sigma, horizon)
    std::vector<std::vector<std::size_t>> plot_windows(data.size() * config.sigmas.size() * config.horizons.size());
    auto group_index = [&](std::size_t d, std::size_t s, std::size_t h) {
        return (d * config.sigmas.size() + s) * config.horizons.size() + h;
    };
    for (std::size_t d = 0; d < data.size(); ++d)
        for (std::size_t s = 0; s < config.sigmas.size(); ++s)
            for (std::size_t h = 0; h < config.horizons.size(); ++h) {
                const std::size_t n = config.horizons[h];
                const std::size_t count = window_count(data[d].test[s].size(), config.history_for(n), n, 1);
                auto& w = plot_windows[group_index(d, s, h)];
                if (!config.plots || count == 0) continue;
                w.push_back(0);
                std::mt19937_64 rng(cell_seed(config.seed, data[d].name, "plot", config.sigmas[s], n, 0));
                w.push_back(std::uniform_int_distribution<std::size_t>(0, count - 1)(rng));
            }

    std::vector<TaskResult> results(tasks.size());
    std::atomic<std::size_t> next{0}, done{0};
    std::mutex progress_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < tasks.size(); i = next++) {
            const auto& t = tasks[i];
            const auto& p = data[t.dataset];
            const std::string& model = config.models[t.model];
            const double sigma = config.sigmas[t.sigma];
            const std::size_t n = config.horizons[t.horizon];
            const std::size_t m = config.history_for(n);
            auto& out = results[i];
            const auto start = std::chrono::steady_clock::now();
            try {
                auto f = baselines::make_forecaster(model, config.options_for(model));
                const auto windows = make_windows(p.test[t.sigma], m, n, 1);
                f->fit(p.train[t.sigma], m, n, cell_seed(config.seed, p.name, model, sigma, n, t.repeat));
                out.mae = mean_test_mae(*f, windows);
                if (t.repeat == 0)
                    for (auto w : plot_windows[group_index(t.dataset, t.sigma, t.horizon)])
                        out.plot_predictions.push_back(f->predict(windows[w].history));
                if (const auto* cf = dynamic_cast<const baselines::ClosedFormForecaster*>(f.get()))
                    out.extra = {{"sigma", sigma}, {"horizon", n}, {"repeat", t.repeat},
                                 {"model", closed_form::to_json(cf->sample_fit().model)},
                                 {"rmse", cf->sample_fit().rmse}, {"evaluations", cf->sample_fit().evaluations}};
                out.ok = std::isfinite(out.mae);
                if (!out.ok) out.error = "non-finite MAE";
            } catch (const std::exception& e) {
                out.error = e.what();
            }
            out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            const std::size_t finished = ++done;
            if (progress) {
                char buf[160];
                if (out.ok)
                    std::snprintf(buf, sizeof buf, "%s %s sigma=%g n=%zu repeat=%zu: MAE %.4f (%.1f s)", p.name.c_str(),
                                  model.c_str(), sigma, n, t.repeat, out.mae, out.seconds);
                else
                    std::snprintf(buf, sizeof buf, "%s %s sigma=%g n=%zu repeat=%zu: FAILED", p.name.c_str(), model.c_str(),
                                  sigma, n, t.repeat);
                std::lock_guard lock(progress_mutex);
                progress(finished, tasks.size(), buf + (out.ok ? std::string() : " " + out.error));
            }
        }
    };
    std::size_t threads = config.threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : config.threads;
    threads = std::min(threads, std::max<std::size_t>(1, tasks.size()));
    {
        std::vector<std::jthread> pool;
        for (std::size_t k = 1; k < threads; ++k) pool.emplace_back(worker);
        worker();
    }

    // assemble in task order, which is fixed by the config
    std::size_t i = 0;
    for (std::size_t d = 0; d < data.size(); ++d)
        for (std::size_t s = 0; s < config.sigmas.size(); ++s)
            for (std::size_t h = 0; h < config.horizons.size(); ++h) {
                PlotGroup group{data[d].name, config.sigmas[s], config.horizons[h], plot_windows[group_index(d, s, h)], {}, {}};
                if (!group.windows.empty()) {
                    const std::size_t n = config.horizons[h];
                    const auto windows = make_windows(data[d].test[s], config.history_for(n), n, 1);
                    for (auto w : group.windows) group.pairs.push_back(windows[w]);
                    group.predictions.resize(group.windows.size());
                }
                for (std::size_t m = 0; m < config.models.size(); ++m) {
                    std::vector<double> maes;
                    std::string error;
                    const std::size_t first = i;
                    while (i < tasks.size() && tasks[i].dataset == d && tasks[i].sigma == s && tasks[i].horizon == h &&
                           tasks[i].model == m) {
                        if (results[i].ok)
                            maes.push_back(results[i].mae);
                        else if (error.empty())
                            error = "repeat " + std::to_string(tasks[i].repeat) + ": " + results[i].error;
                        if (!results[i].extra.is_null()) result.spectrum[data[d].name]["closed_form_fits"].push_back(results[i].extra);
                        ++i;
                    }
                    const auto& name = config.models[m];
                    if (!error.empty()) {
                        result.table.failures.push_back({data[d].name, name, config.sigmas[s], config.horizons[h], error});
                        continue;
                    }
                    MetricRow row{data[d].name, name, config.sigmas[s], config.horizons[h], 0.0, 0.0};
                    if (maes.size() == 1) {
                        row.mae_mean = maes.front();  // deterministic model: one run stands for every repeat
                    } else {
                        row.mae_mean = mean(maes);
                        row.mae_std = stddev(maes);
                    }
                    result.table.rows.push_back(row);
                    for (std::size_t w = 0; w < group.windows.size(); ++w)
                        group.predictions[w].push_back({name, results[first].plot_predictions[w]});
                }
                if (!group.windows.empty()) result.plots.push_back(std::move(group));
            }
    return result;
}

/// File-name friendly form of a label.
inline std::string slug(const std::string& s) {
    std::string out;
    for (char c : s) out += (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '-') ? c : '_';
    return out;
}

/// results.csv, results.md, spectrum.json and plots/*.svg under `dir`.
inline void write_outputs(const GridConfig& config, const GridResult& result, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    emit_table(result.table, TableFormat::csv, (dir / "results.csv").string());
    std::vector<std::string> names;
    for (const auto& d : config.datasets) names.push_back(d.name);
    write_text((dir / "results.md").string(),
               "# MAE on the test split (mean ± std over repeats)\n\n" +
                   table_markdown(result.table, names, config.models, config.sigmas, config.horizons));
    write_text((dir / "spectrum.json").string(), result.spectrum.dump(2) + "\n");
    if (!config.plots) return;
    std::filesystem::create_directories(dir / "plots");
    for (const auto& g : result.plots)
        for (std::size_t w = 0; w < g.windows.size(); ++w) {
            const std::string tag = w == 0 ? "first" : "random";
            const std::string file = slug(g.dataset) + "_sigma" + format_sigma(g.sigma) + "_n" + std::to_string(g.horizon) + "_" + tag + ".svg";
            const std::string title = g.dataset + ", sigma " + format_sigma(g.sigma) + ", n = " + std::to_string(g.horizon) +
                                      ", test window " + std::to_string(g.windows[w]);
            emit_plot(g.pairs[w].history, g.pairs[w].target, g.predictions[w], (dir / "plots" / file).string(), title);
        }
}

}  // namespace tsode::bench
