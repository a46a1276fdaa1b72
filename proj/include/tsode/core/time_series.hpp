#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "tsode/core/error.hpp"

namespace tsode {

/// Uniformly sampled scalar signal.
class TimeSeries {
public:
    TimeSeries(double t0, double dt, std::vector<double> values)
        : t0_(t0), dt_(dt), values_(std::move(values)) {
        detail::require(std::isfinite(t0), "TimeSeries: start time must be finite");
        detail::require(dt > 0.0 && std::isfinite(dt), "TimeSeries: dt must be positive");
        detail::require(!values_.empty(), "TimeSeries: at least one value required");
        for (double v : values_) detail::require(std::isfinite(v), "TimeSeries: values must be finite");
    }

    double t0() const noexcept { return t0_; }
    double dt() const noexcept { return dt_; }
    std::size_t size() const noexcept { return values_.size(); }
    const std::vector<double>& values() const noexcept { return values_; }
    std::span<const double> span() const noexcept { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    double time(std::size_t i) const noexcept { return t0_ + static_cast<double>(i) * dt_; }

    /// Contiguous sub-series starting at `offset`.
    TimeSeries slice(std::size_t offset, std::size_t length) const {
        detail::require(offset + length <= values_.size() && length > 0, "TimeSeries::slice out of range");
        return TimeSeries(time(offset), dt_,
                          std::vector<double>(values_.begin() + static_cast<std::ptrdiff_t>(offset),
                                              values_.begin() + static_cast<std::ptrdiff_t>(offset + length)));
    }

    TimeSeries with_values(std::vector<double> values) const { return TimeSeries(t0_, dt_, std::move(values)); }

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    double t0_;
    double dt_;
    std::vector<double> values_;
};

/// Affine map from the original scale to zero mean / unit variance.
struct Scaler {
    double mean = 0.0;
    double std = 1.0;
};

struct WindowPair {
    std::vector<double> history;
    std::vector<double> target;
};

struct SplitSpec {
    double train_frac = 0.7;
    double val_frac = 0.2;
    double test_frac = 0.1;

    void validate() const {
        for (double f : {train_frac, val_frac, test_frac})
            detail::require(f > 0.0 && f < 1.0, "SplitSpec: fractions must lie in (0, 1)");
        detail::require(std::abs(train_frac + val_frac + test_frac - 1.0) <= 1e-12,
                        "SplitSpec: fractions must sum to 1");
    }
};

struct NoiseSpec {
    double sigma = 0.0;
    std::uint64_t seed = 0;
};

}  // namespace tsode
