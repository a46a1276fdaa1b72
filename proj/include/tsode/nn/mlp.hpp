#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tsode/core/error.hpp"

namespace tsode::nn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class Activation { relu, tanh, identity };

inline std::string_view to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::tanh: return "tanh";
        case Activation::identity: return "identity";
    }
    return "identity";
}

inline Activation activation_from_string(std::string_view name) {
    if (name == "relu") return Activation::relu;
    if (name == "tanh") return Activation::tanh;
    if (name == "identity") return Activation::identity;
    throw Error("unknown activation '" + std::string(name) + "'");
}

inline Vector activate(Activation a, const Vector& z) {
    switch (a) {
        case Activation::relu: return z.cwiseMax(0.0);
        case Activation::tanh: return z.array().tanh().matrix();
        case Activation::identity: return z;
    }
    return z;
}

/// Derivative of the activation, expressed through the pre-activation `z` and output `y`.
inline Vector activation_slope(Activation a, const Vector& z, const Vector& y) {
    switch (a) {
        case Activation::relu: return (z.array() > 0.0).cast<double>().matrix();
        case Activation::tanh: return (1.0 - y.array().square()).matrix();
        case Activation::identity: return Vector::Ones(z.size());
    }
    return Vector::Ones(z.size());
}

/// Glorot-uniform weights, zero bias.
inline Matrix glorot_uniform(Eigen::Index out, Eigen::Index in, std::mt19937_64& rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(in + out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    Matrix w(out, in);
    for (Eigen::Index j = 0; j < in; ++j)
        for (Eigen::Index i = 0; i < out; ++i) w(i, j) = dist(rng);
    return w;
}

struct DenseLayer {
    Matrix weights;  // out x in
    Vector bias;     // out
    Activation activation = Activation::identity;

    Eigen::Index in() const noexcept { return weights.cols(); }
    Eigen::Index out() const noexcept { return weights.rows(); }
    std::size_t parameter_count() const noexcept { return static_cast<std::size_t>(out() * in() + out()); }

    static DenseLayer glorot(Eigen::Index in, Eigen::Index out, Activation act, std::mt19937_64& rng) {
        return {glorot_uniform(out, in, rng), Vector::Zero(out), act};
    }
};

/// Per-layer values recorded by a forward pass.
struct MlpCache {
    std::vector<Vector> inputs;        // input to each layer
    std::vector<Vector> preactivations;
    Vector output;
};

struct MlpGradient {
    Vector parameters;  // same layout as Mlp::parameters()
    Vector input;
};

/// Fully connected network: a chain of dense layers.
class Mlp {
public:
    using Cache = MlpCache;

    Mlp() = default;
    explicit Mlp(std::vector<DenseLayer> layers) : layers_(std::move(layers)) {
        detail::require(!layers_.empty(), "Mlp: at least one layer required");
        for (std::size_t i = 0; i < layers_.size(); ++i) {
            const auto& l = layers_[i];
            detail::require(l.bias.size() == l.out(), "Mlp: bias size must equal layer output size");
            if (i > 0) detail::require(layers_[i - 1].out() == l.in(), "Mlp: adjacent layer dimensions must chain");
        }
    }

    /// `sizes` lists layer widths from input to output; `activations` has one entry per layer.
    static Mlp glorot(const std::vector<Eigen::Index>& sizes, const std::vector<Activation>& activations,
                      std::mt19937_64& rng) {
        detail::require(sizes.size() >= 2 && activations.size() == sizes.size() - 1,
                        "Mlp::glorot: need one activation per layer");
        std::vector<DenseLayer> layers;
        for (std::size_t i = 0; i + 1 < sizes.size(); ++i)
            layers.push_back(DenseLayer::glorot(sizes[i], sizes[i + 1], activations[i], rng));
        return Mlp(std::move(layers));
    }

    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    Eigen::Index input_size() const { return layers_.front().in(); }
    Eigen::Index output_size() const { return layers_.back().out(); }

    std::size_t parameter_count() const noexcept {
        std::size_t total = 0;
        for (const auto& l : layers_) total += l.parameter_count();
        return total;
    }

    Vector predict(const Vector& x) const {
        check_input(x);
        Vector a = x;
        for (const auto& l : layers_) a = activate(l.activation, l.weights * a + l.bias);
        return a;
    }

    Cache forward(const Vector& x) const {
        check_input(x);
        Cache cache;
        cache.inputs.reserve(layers_.size());
        cache.preactivations.reserve(layers_.size());
        Vector a = x;
        for (const auto& l : layers_) {
            cache.inputs.push_back(a);
            cache.preactivations.push_back(l.weights * a + l.bias);
            a = activate(l.activation, cache.preactivations.back());
        }
        cache.output = std::move(a);
        return cache;
    }

    MlpGradient backward_full(const Cache& cache, const Vector& upstream) const {
        detail::require(upstream.size() == output_size(), "Mlp::backward: upstream size mismatch");
        MlpGradient grad{Vector(static_cast<Eigen::Index>(parameter_count())), Vector()};
        Eigen::Index offset = grad.parameters.size();
        Vector delta = upstream;
        for (std::size_t k = layers_.size(); k-- > 0;) {
            const auto& l = layers_[k];
            const Vector y = k + 1 < layers_.size() ? cache.inputs[k + 1] : cache.output;
            delta = delta.cwiseProduct(activation_slope(l.activation, cache.preactivations[k], y));
            offset -= l.parameter_count();
            Eigen::Map<Matrix>(grad.parameters.data() + offset, l.out(), l.in()).noalias() =
                delta * cache.inputs[k].transpose();
            grad.parameters.segment(offset + l.out() * l.in(), l.out()) = delta;
            delta = l.weights.transpose() * delta;
        }
        grad.input = std::move(delta);
        return grad;
    }

    Vector backward(const Cache& cache, const Vector& upstream) const {
        return backward_full(cache, upstream).parameters;
    }

    /// Flat parameters: per layer, column-major weights followed by bias.
    Vector parameters() const {
        Vector p(static_cast<Eigen::Index>(parameter_count()));
        Eigen::Index offset = 0;
        for (const auto& l : layers_) {
            Eigen::Map<Matrix>(p.data() + offset, l.out(), l.in()) = l.weights;
            offset += l.out() * l.in();
            p.segment(offset, l.out()) = l.bias;
            offset += l.out();
        }
        return p;
    }

    void set_parameters(const Vector& p) {
        detail::require(p.size() == static_cast<Eigen::Index>(parameter_count()), "Mlp: parameter size mismatch");
        Eigen::Index offset = 0;
        for (auto& l : layers_) {
            l.weights = Eigen::Map<const Matrix>(p.data() + offset, l.out(), l.in());
            offset += l.out() * l.in();
            l.bias = p.segment(offset, l.out());
            offset += l.out();
        }
    }

private:
    void check_input(const Vector& x) const {
        detail::require(!layers_.empty(), "Mlp: empty network");
        detail::require(x.size() == input_size(), "Mlp: input dimension mismatch");
    }

    std::vector<DenseLayer> layers_;
};

inline Vector mlp_forward(const Mlp& net, const Vector& x) { return net.predict(x); }

/// Gradients of a scalar loss whose gradient at the network output is `upstream`.
inline MlpGradient mlp_backward(const Mlp& net, const Vector& x, const Vector& upstream) {
    return net.backward_full(net.forward(x), upstream);
}

}  // namespace tsode::nn
