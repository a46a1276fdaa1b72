#pragma once

#include <cmath>
#include <span>

#include "tsode/core/error.hpp"

namespace tsode {

inline double mae(std::span<const double> pred, std::span<const double> truth) {
    detail::require(pred.size() == truth.size(), "mae: length mismatch");
    detail::require(!pred.empty(), "mae: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) sum += std::abs(pred[i] - truth[i]);
    return sum / static_cast<double>(pred.size());
}

inline double mse(std::span<const double> pred, std::span<const double> truth) {
    detail::require(pred.size() == truth.size(), "mse: length mismatch");
    detail::require(!pred.empty(), "mse: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < pred.size(); ++i) sum += (pred[i] - truth[i]) * (pred[i] - truth[i]);
    return sum / static_cast<double>(pred.size());
}

inline double rmse(std::span<const double> pred, std::span<const double> truth) {
    return std::sqrt(mse(pred, truth));
}

}  // namespace tsode
