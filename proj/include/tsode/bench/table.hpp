#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "tsode/core/error.hpp"

namespace tsode::bench {

struct MetricRow {
    std::string dataset;
    std::string model;
    double sigma = 0.0;
    std::size_t horizon = 0;
    double mae_mean = 0.0;
    double mae_std = 0.0;
};

struct CellFailure {
    std::string dataset;
    std::string model;
    double sigma = 0.0;
    std::size_t horizon = 0;
    std::string message;
};

struct MetricTable {
    std::vector<MetricRow> rows;
    std::vector<CellFailure> failures;

    const MetricRow* find(const std::string& dataset, const std::string& model, double sigma, std::size_t horizon) const {
        for (const auto& r : rows)
            if (r.dataset == dataset && r.model == model && r.sigma == sigma && r.horizon == horizon) return &r;
        return nullptr;
    }
    const CellFailure* find_failure(const std::string& dataset, const std::string& model, double sigma,
                                    std::size_t horizon) const {
        for (const auto& f : failures)
            if (f.dataset == dataset && f.model == model && f.sigma == sigma && f.horizon == horizon) return &f;
        return nullptr;
    }
};

/// Fixed-point text with half-away-from-zero rounding: 0.5049 -> "0.505" at 3 decimals.
inline std::string round_fixed(double value, int decimals = 3) {
    const double scale = std::pow(10.0, decimals);
    double r = std::round(value * scale) / scale;
    if (r == 0.0) r = 0.0;  // drop a negative zero
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, r);
    return buf;
}

inline std::string format_number(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_sigma(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", v);
    return buf;
}

/// Header dataset,model,sigma,horizon,mae_mean,mae_std then one line per row. Failed cells
/// have no line.
inline std::string table_csv(const MetricTable& table) {
    std::string out = "dataset,model,sigma,horizon,mae_mean,mae_std\n";
    for (const auto& r : table.rows)
        out += r.dataset + "," + r.model + "," + format_sigma(r.sigma) + "," + std::to_string(r.horizon) + "," +
               format_number(r.mae_mean) + "," + format_number(r.mae_std) + "\n";
    return out;
}

/// Per dataset and model, one row per noise level and one column per horizon.
inline std::string table_markdown(const MetricTable& table, const std::vector<std::string>& datasets,
                                  const std::vector<std::string>& models, const std::vector<double>& sigmas,
                                  const std::vector<std::size_t>& horizons) {
    std::string out;
    for (const auto& d : datasets) {
        out += "## " + d + "\n\n";
        for (const auto& m : models) {
            out += "### " + m + "\n\n| Noise level |";
            for (auto h : horizons) out += " " + std::to_string(h) + " points |";
            out += "\n|---|";
            for (std::size_t i = 0; i < horizons.size(); ++i) out += "---|";
            out += "\n";
            for (auto s : sigmas) {
                out += "| " + format_sigma(s) + " |";
                for (auto h : horizons) {
                    if (const auto* r = table.find(d, m, s, h))
                        out += " " + round_fixed(r->mae_mean) + " ± " + round_fixed(r->mae_std) + " |";
                    else
                        out += " failed |";
                }
                out += "\n";
            }
            out += "\n";
        }
    }
    if (!table.failures.empty()) {
        out += "## Failed cells\n\n";
        for (const auto& f : table.failures)
            out += "- " + f.dataset + " / " + f.model + " / sigma " + format_sigma(f.sigma) + " / n " +
                   std::to_string(f.horizon) + ": " + f.message + "\n";
    }
    return out;
}

inline void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw Error("write failed for '" + path + "'");
}

enum class TableFormat { csv, markdown };

/// Writes the table; markdown axes follow the order in which values first appear.
inline void emit_table(const MetricTable& table, TableFormat format, const std::string& path) {
    detail::require(!table.rows.empty() || !table.failures.empty(), "emit_table: empty table");
    if (format == TableFormat::csv) {
        write_text(path, table_csv(table));
        return;
    }
    std::vector<std::string> datasets, models;
    std::vector<double> sigmas;
    std::vector<std::size_t> horizons;
    auto add = [](auto& list, const auto& v) {
        if (std::find(list.begin(), list.end(), v) == list.end()) list.push_back(v);
    };
    auto visit = [&](const auto& r) {
        add(datasets, r.dataset);
        add(models, r.model);
        add(sigmas, r.sigma);
        add(horizons, r.horizon);
    };
    for (const auto& r : table.rows) visit(r);
    for (const auto& f : table.failures) visit(f);
    write_text(path, table_markdown(table, datasets, models, sigmas, horizons));
}

}  // namespace tsode::bench
