#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "tsode/bench/table.hpp"

namespace tsode::bench {

struct NamedSeries {
    std::string name;
    std::vector<double> values;
};

namespace detail_plot {

inline constexpr double kWidth = 800, kHeight = 420;
inline constexpr double kLeft = 64, kRight = 780, kTop = 36, kBottom = 370;
inline constexpr const char* kColors[] = {"#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2"};

inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

/// 1, 2 or 5 times a power of ten, close to span / target.
inline double nice_step(double span, int target = 5) {
    const double raw = span / target;
    const double p = std::pow(10.0, std::floor(std::log10(raw)));
    const double f = raw / p;
    return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * p;
}

inline std::string tick_label(double v, double step) {
    const int decimals = std::max(0, -static_cast<int>(std::floor(std::log10(step) + 1e-9)));
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, std::abs(v) < step * 1e-9 ? 0.0 : v);
    return buf;
}

}  // namespace detail_plot

/// SVG of a history window followed by the truth and each model's forecast. Step 0 is the
/// last history sample; forecasts occupy steps 1..n. Output bytes depend only on the input.
inline std::string render_plot(const std::vector<double>& history, const std::vector<double>& truth,
                               const std::vector<NamedSeries>& predictions, const std::string& title = "") {
    using namespace detail_plot;
    detail::require(!history.empty() && !truth.empty(), "emit_plot: history and truth must be nonempty");
    for (const auto& p : predictions)
        detail::require(p.values.size() == truth.size(), "emit_plot: prediction '" + p.name + "' has the wrong horizon");

    const double x_min = 1.0 - static_cast<double>(history.size());
    const double x_max = static_cast<double>(truth.size());
    double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
    auto extend = [&](const std::vector<double>& v) {
        for (double y : v)
            if (std::isfinite(y)) {
                y_min = std::min(y_min, y);
                y_max = std::max(y_max, y);
            }
    };
    extend(history);
    extend(truth);
    for (const auto& p : predictions) extend(p.values);
    if (!std::isfinite(y_min)) y_min = -1.0, y_max = 1.0;
    if (y_max - y_min < 1e-12) y_min -= 1.0, y_max += 1.0;
    const double pad = 0.05 * (y_max - y_min);
    y_min -= pad;
    y_max += pad;

    auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * (kRight - kLeft); };
    auto py = [&](double y) { return kBottom - (y - y_min) / (y_max - y_min) * (kBottom - kTop); };
    auto polyline = [&](const std::vector<double>& v, double x0, const std::string& color, const std::string& extra) {
        std::string pts;
        for (std::size_t i = 0; i < v.size(); ++i) {
            const double y = std::isfinite(v[i]) ? std::clamp(v[i], y_min, y_max) : y_min;
            pts += (i ? " " : "") + fmt(px(x0 + static_cast<double>(i))) + "," + fmt(py(y));
        }
        return "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"" + extra + " points=\"" + pts + "\"/>\n";
    };

    std::string svg = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) +
           "\" viewBox=\"0 0 " + fmt(kWidth) + " " + fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fmt(kWidth) + "\" height=\"" + fmt(kHeight) + "\" fill=\"white\"/>\n";
    if (!title.empty())
        svg += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" + escape(title) + "</text>\n";

    svg += "<g stroke=\"#333\" stroke-width=\"1\">\n";
    svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kBottom) + "\" x2=\"" + fmt(kRight) + "\" y2=\"" + fmt(kBottom) + "\"/>\n";
    svg += "<line x1=\"" + fmt(kLeft) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" + fmt(kBottom) + "\"/>\n";
    svg += "</g>\n<g fill=\"#333\">\n";
    const double xs = nice_step(x_max - x_min);
    for (double t = std::ceil(x_min / xs) * xs; t <= x_max + 1e-9; t += xs) {
        const std::string x = fmt(px(t));
        svg += "<line x1=\"" + x + "\" y1=\"" + fmt(kBottom) + "\" x2=\"" + x + "\" y2=\"" + fmt(kBottom + 4) + "\" stroke=\"#333\"/>\n";
        svg += "<text x=\"" + x + "\" y=\"" + fmt(kBottom + 16) + "\" text-anchor=\"middle\">" + tick_label(t, xs) + "</text>\n";
    }
    const double ys = nice_step(y_max - y_min);
    for (double v = std::ceil(y_min / ys) * ys; v <= y_max + 1e-12; v += ys) {
        const std::string y = fmt(py(v));
        svg += "<line x1=\"" + fmt(kLeft - 4) + "\" y1=\"" + y + "\" x2=\"" + fmt(kLeft) + "\" y2=\"" + y + "\" stroke=\"#333\"/>\n";
        svg += "<text x=\"" + fmt(kLeft - 7) + "\" y=\"" + fmt(py(v) + 4) + "\" text-anchor=\"end\">" + tick_label(v, ys) + "</text>\n";
    }
    svg += "<text x=\"" + fmt((kLeft + kRight) / 2) + "\" y=\"" + fmt(kHeight - 6) + "\" text-anchor=\"middle\">step</text>\n";
    svg += "</g>\n";

    svg += "<line x1=\"" + fmt(px(0.0)) + "\" y1=\"" + fmt(kTop) + "\" x2=\"" + fmt(px(0.0)) + "\" y2=\"" + fmt(kBottom) +
           "\" stroke=\"#bbb\" stroke-dasharray=\"4 3\"/>\n";
    svg += polyline(history, x_min, "#7f7f7f", "");
    svg += polyline(truth, 1.0, "#000000", "");
    for (std::size_t k = 0; k < predictions.size(); ++k)
        svg += polyline(predictions[k].values, 1.0, kColors[k % std::size(kColors)], " stroke-dasharray=\"6 3\"");

    std::vector<std::pair<std::string, std::string>> legend{{"history", "#7f7f7f"}, {"truth", "#000000"}};
    for (std::size_t k = 0; k < predictions.size(); ++k)
        legend.emplace_back(predictions[k].name, kColors[k % std::size(kColors)]);
    svg += "<g>\n";
    for (std::size_t k = 0; k < legend.size(); ++k) {
        const double y = kTop + 8 + 15.0 * static_cast<double>(k);
        svg += "<line x1=\"" + fmt(kRight - 120) + "\" y1=\"" + fmt(y) + "\" x2=\"" + fmt(kRight - 100) + "\" y2=\"" + fmt(y) +
               "\" stroke=\"" + legend[k].second + "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(kRight - 94) + "\" y=\"" + fmt(y + 4) + "\">" + escape(legend[k].first) + "</text>\n";
    }
    svg += "</g>\n</svg>\n";
    return svg;
}

inline void emit_plot(const std::vector<double>& history, const std::vector<double>& truth,
                      const std::vector<NamedSeries>& predictions, const std::string& path, const std::string& title = "") {
    write_text(path, render_plot(history, truth, predictions, title));
}

}  // namespace tsode::bench
