#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "tsode/core/time_series.hpp"

namespace tsode {

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '"')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r' || s.back() == '"'))
        s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        fields.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

inline double parse_real(std::string_view cell, std::size_t row, std::string_view column) {
    double value = 0.0;
    const auto* end = cell.data() + cell.size();
    const auto [ptr, ec] = std::from_chars(cell.data(), end, value);
    if (ec != std::errc{} || ptr != end || !std::isfinite(value))
        throw Error("load_csv: cannot parse '" + std::string(cell) + "' in column '" + std::string(column) +
                    "' at data row " + std::to_string(row));
    return value;
}

}  // namespace detail

/// Reads one value column of a CSV file whose `time_column` holds a uniform numeric grid.
/// An empty `time_column` selects the first column.
inline TimeSeries load_csv(std::istream& in, const std::string& column, const std::string& time_column = {}) {
    std::string line;
    if (!std::getline(in, line)) throw Error("load_csv: missing header row");
    const auto header = detail::split_fields(line);
    auto find = [&](std::string_view name) -> std::size_t {
        const auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end()) throw Error("load_csv: missing column '" + std::string(name) + "'");
        return static_cast<std::size_t>(it - header.begin());
    };
    const std::size_t value_idx = find(column);
    const std::size_t time_idx = time_column.empty() ? 0 : find(time_column);
    const std::string time_name = std::string(header[time_idx]);

    std::vector<double> times;
    std::vector<double> values;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        if (detail::trim(line).empty()) continue;
        ++row;
        const auto fields = detail::split_fields(line);
        if (fields.size() <= std::max(value_idx, time_idx))
            throw Error("load_csv: too few fields at data row " + std::to_string(row));
        times.push_back(detail::parse_real(fields[time_idx], row, time_name));
        values.push_back(detail::parse_real(fields[value_idx], row, column));
    }
    if (values.empty()) throw Error("load_csv: no data rows");
    if (values.size() == 1) return TimeSeries(times[0], 1.0, std::move(values));

    const double dt = times[1] - times[0];
    detail::require(dt > 0.0, "load_csv: time column must be strictly increasing");
    for (std::size_t i = 1; i < times.size(); ++i) {
        const double step = times[i] - times[i - 1];
        if (std::abs(step - dt) > 1e-9 * dt)
            throw Error("load_csv: non-uniform time grid at data row " + std::to_string(i + 1));
    }
    return TimeSeries(times[0], dt, std::move(values));
}

inline TimeSeries load_csv(const std::string& path, const std::string& column, const std::string& time_column = {}) {
    std::ifstream in(path);
    if (!in) throw Error("load_csv: cannot open " + path);
    return load_csv(in, column, time_column);
}

}  // namespace tsode
