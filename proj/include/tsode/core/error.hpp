#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace tsode {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Training produced a non-finite loss or the solver blew up.
class DivergenceError : public Error {
public:
    DivergenceError(const std::string& what, std::size_t iteration)
        : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

    std::size_t iteration() const noexcept { return iteration_; }

private:
    std::size_t iteration_;
};

/// ODE state norm exceeded the blow-up threshold.
class BlowUpError : public Error {
public:
    explicit BlowUpError(double time)
        : Error("ODE state blew up at t = " + std::to_string(time)), time_(time) {}

    double time() const noexcept { return time_; }

private:
    double time_;
};

/// Iterative algorithm hit its cap without meeting its tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& what, double residual)
        : Error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

namespace detail {
inline void require(bool condition, const char* message) {
    if (!condition) throw Error(message);
}
inline void require(bool condition, const std::string& message) {
    if (!condition) throw Error(message);
}
}  // namespace detail

}  // namespace tsode
