#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsode/baselines/factory.hpp"
#include "tsode/core/csv.hpp"
#include "tsode/core/synth.hpp"

namespace tsode::bench {

/// One dataset of the grid: a named synthetic signal or a CSV column.
struct DatasetSpec {
    std::string name;
    std::string synthetic;    // synth name, empty for CSV
    std::string csv;          // path, empty for synthetic
    std::string column = "value";
    std::string time_column;  // empty: first column
    std::size_t count = 0;    // synthetic length, 0 for automatic
    double dt = 0.0;          // synthetic spacing, 0 for the signal's default

    bool is_synthetic() const noexcept { return !synthetic.empty(); }
};

/// Default spacing of the bundled signals: two_tone in radians, seasonal24 in hours.
inline double default_synthetic_dt(const std::string& name) { return name == "two_tone" ? 0.1 : 1.0; }

struct GridConfig {
    std::vector<DatasetSpec> datasets;
    std::size_t m = 0;  // history length, 0 for m = n in every cell
    std::vector<std::size_t> horizons{100, 250, 500};
    std::vector<double> sigmas{0.0, 0.1, 0.2, 0.3};
    std::size_t repeats = 5;
    std::vector<std::string> models{"repeater", "fcnn", "arima", "lstm", "latent_ode", "closed_form"};
    std::uint64_t seed = 0;
    std::size_t threads = 0;  // 0 for hardware concurrency
    bool plots = true;
    SplitSpec split{};
    nlohmann::json model_options = nlohmann::json::object();  // per-model overrides keyed by model name

    std::size_t history_for(std::size_t horizon) const noexcept { return m == 0 ? horizon : m; }

    void validate() const {
        detail::require(!datasets.empty(), "config: at least one dataset required");
        detail::require(!horizons.empty(), "config: horizons must be nonempty");
        detail::require(!sigmas.empty(), "config: sigmas must be nonempty");
        detail::require(repeats >= 1, "config: repeats must be at least 1");
        detail::require(!models.empty(), "config: at least one model required");
        for (auto h : horizons) detail::require(h >= 1, "config: horizons must be positive");
        for (auto s : sigmas) detail::require(s >= 0.0, "config: sigmas must be non-negative");
        for (const auto& name : models)
            detail::require(baselines::is_model_name(name), "config: unknown model '" + name + "'");
        for (const auto& d : datasets) {
            detail::require(d.is_synthetic() != !d.csv.empty(), "config: dataset '" + d.name + "' needs exactly one of synthetic or csv");
            if (d.is_synthetic())
                detail::require(is_synth_name(d.synthetic) && d.synthetic != "sine_pair",
                                "config: unsupported synthetic dataset '" + d.synthetic + "'");
        }
        for (std::size_t i = 0; i < datasets.size(); ++i)
            for (std::size_t j = 0; j < i; ++j)
                detail::require(datasets[i].name != datasets[j].name, "config: duplicate dataset name '" + datasets[i].name + "'");
        split.validate();
    }

    nlohmann::json options_for(const std::string& model) const {
        return model_options.contains(model) ? model_options.at(model) : nlohmann::json::object();
    }
};

/// Parses a config; relative CSV paths resolve against `base_dir`.
inline GridConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {}) {
    GridConfig c;
    try {
        for (const auto& d : j.at("datasets")) {
            DatasetSpec s;
            if (d.is_string()) {
                s.synthetic = d.get<std::string>();
            } else {
                s.synthetic = d.value("synthetic", "");
                s.csv = d.value("csv", "");
                s.column = d.value("column", "value");
                s.time_column = d.value("time_column", "");
                s.count = d.value("count", std::size_t{0});
                s.dt = d.value("dt", 0.0);
                s.name = d.value("name", "");
            }
            if (!s.csv.empty() && std::filesystem::path(s.csv).is_relative() && !base_dir.empty())
                s.csv = (base_dir / s.csv).string();
            if (s.name.empty()) s.name = s.is_synthetic() ? s.synthetic : std::filesystem::path(s.csv).stem().string();
            c.datasets.push_back(std::move(s));
        }
        if (j.contains("m") && !j.at("m").is_null()) c.m = j.at("m").get<std::size_t>();
        if (j.contains("horizons")) c.horizons = j.at("horizons").get<std::vector<std::size_t>>();
        if (j.contains("sigmas")) c.sigmas = j.at("sigmas").get<std::vector<double>>();
        if (j.contains("repeats")) c.repeats = j.at("repeats").get<std::size_t>();
        if (j.contains("models")) c.models = j.at("models").get<std::vector<std::string>>();
        if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("threads")) c.threads = j.at("threads").get<std::size_t>();
        if (j.contains("plots")) c.plots = j.at("plots").get<bool>();
        if (j.contains("model_options")) c.model_options = j.at("model_options");
        if (j.contains("split")) {
            const auto& s = j.at("split");
            c.split = {s.value("train", 0.7), s.value("val", 0.2), s.value("test", 0.1)};
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    c.validate();
    return c;
}

inline GridConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open config '" + path.string() + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw Error("config '" + path.string() + "': " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

/// Raw series of a dataset. Automatic synthetic length leaves every split room for the
/// longest window: the test share holds at least m + n + 100 points.
inline TimeSeries load_dataset(const DatasetSpec& d, const GridConfig& config) {
    if (!d.is_synthetic()) return load_csv(d.csv, d.column, d.time_column);
    std::size_t count = d.count;
    if (count == 0) {
        std::size_t longest = 0;
        for (auto h : config.horizons) longest = std::max(longest, config.history_for(h) + h);
        count = std::max<std::size_t>(3000, static_cast<std::size_t>(std::ceil(static_cast<double>(longest + 100) / config.split.test_frac)));
    }
    const double dt = d.dt > 0.0 ? d.dt : default_synthetic_dt(d.synthetic);
    return synth_scalar(d.synthetic, count, 0.0, static_cast<double>(count) * dt);
}

}  // namespace tsode::bench
