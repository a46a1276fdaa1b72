#pragma once

#include <concepts>
#include <variant>

#include "tsode/nn/mlp.hpp"

namespace tsode::ode {

using nn::Matrix;
using nn::Vector;

/// Autonomous vector field x' = f(x; theta) with reverse-mode support.
///
/// `forward` evaluates f and keeps what `backward` needs. `backward` takes the cotangent v
/// of the output, returns v^T df/dx and adds v^T df/dtheta into `param_grad`.
template <class F>
concept VectorFieldLike = requires(const F& f, F& mf, const Vector& x, const typename F::Cache& cache, Vector& g) {
    { f.dimension() } -> std::convertible_to<Eigen::Index>;
    { f.forward(x) } -> std::same_as<typename F::Cache>;
    { cache.output } -> std::convertible_to<Vector>;
    { f.backward(cache, x, g) } -> std::convertible_to<Vector>;
    { f.parameters() } -> std::convertible_to<Vector>;
    mf.set_parameters(x);
};

/// f(x) = A x. Parameters are the entries of A in column-major order.
class LinearField {
public:
    struct Cache {
        Vector input;
        Vector output;
    };

    LinearField() = default;
    explicit LinearField(Matrix a) : a_(std::move(a)) {
        detail::require(a_.rows() == a_.cols() && a_.rows() >= 1, "LinearField: matrix must be square");
        detail::require(a_.allFinite(), "LinearField: entries must be finite");
    }

    Eigen::Index dimension() const noexcept { return a_.rows(); }
    const Matrix& matrix() const noexcept { return a_; }
    std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(a_.size()); }

    Vector eval(const Vector& x) const { return a_ * x; }
    Cache forward(const Vector& x) const { return {x, a_ * x}; }

    Vector backward(const Cache& cache, const Vector& v, Vector& param_grad) const {
        Eigen::Map<Matrix>(param_grad.data(), a_.rows(), a_.cols()).noalias() += v * cache.input.transpose();
        return a_.transpose() * v;
    }

    Vector parameters() const { return Eigen::Map<const Vector>(a_.data(), a_.size()); }
    void set_parameters(const Vector& p) {
        detail::require(p.size() == a_.size(), "LinearField: parameter size mismatch");
        a_ = Eigen::Map<const Matrix>(p.data(), a_.rows(), a_.cols());
    }

private:
    Matrix a_;
};

/// f(x) = mlp(x) with matching input and output dimension.
class MlpField {
public:
    using Cache = nn::MlpCache;

    MlpField() = default;
    explicit MlpField(nn::Mlp net) : net_(std::move(net)) {
        detail::require(net_.input_size() == net_.output_size(), "MlpField: input and output dimension must match");
    }

    Eigen::Index dimension() const { return net_.input_size(); }
    const nn::Mlp& network() const noexcept { return net_; }
    std::size_t parameter_count() const noexcept { return net_.parameter_count(); }

    Vector eval(const Vector& x) const { return net_.predict(x); }
    Cache forward(const Vector& x) const { return net_.forward(x); }

    Vector backward(const Cache& cache, const Vector& v, Vector& param_grad) const {
        auto g = net_.backward_full(cache, v);
        param_grad += g.parameters;
        return std::move(g.input);
    }

    Vector parameters() const { return net_.parameters(); }
    void set_parameters(const Vector& p) { net_.set_parameters(p); }

private:
    nn::Mlp net_;
};

static_assert(VectorFieldLike<LinearField>);
static_assert(VectorFieldLike<MlpField>);

/// Either kind of field, for callers that choose the kind at runtime.
using VectorField = std::variant<LinearField, MlpField>;

}  // namespace tsode::ode
