#pragma once

#include <random>
#include <vector>

#include "tsode/nn/mlp.hpp"

namespace tsode::nn {

inline Vector sigmoid(const Vector& z) { return (1.0 / (1.0 + (-z.array()).exp())).matrix(); }

/// Values recorded at every timestep of an LSTM forward pass.
struct LstmTrace {
    std::vector<Vector> concat;  // [x_t; h_{t-1}]
    std::vector<Vector> input_gate, forget_gate, cell_candidate, output_gate;
    std::vector<Vector> cells;   // c_t
    std::vector<Vector> hidden;  // h_t
};

struct LstmGradient {
    Vector parameters;
    std::vector<Vector> inputs;
};

/// Single LSTM layer. Gate blocks are stacked in the order input, forget, cell, output;
/// each block maps [x_t; h_{t-1}] (in + units) to `units` values.
class LstmLayer {
public:
    LstmLayer() = default;
    LstmLayer(Eigen::Index in, Eigen::Index units)
        : in_(in), units_(units), weights_(Matrix::Zero(4 * units, in + units)), bias_(Vector::Zero(4 * units)) {
        detail::require(in >= 1 && units >= 1, "LstmLayer: sizes must be positive");
    }

    static LstmLayer glorot(Eigen::Index in, Eigen::Index units, std::mt19937_64& rng) {
        LstmLayer layer(in, units);
        for (Eigen::Index g = 0; g < 4; ++g)
            layer.weights_.middleRows(g * units, units) = glorot_uniform(units, in + units, rng);
        return layer;
    }

    Eigen::Index input_size() const noexcept { return in_; }
    Eigen::Index units() const noexcept { return units_; }
    const Matrix& weights() const noexcept { return weights_; }
    const Vector& bias() const noexcept { return bias_; }
    Matrix& weights() noexcept { return weights_; }
    Vector& bias() noexcept { return bias_; }

    std::size_t parameter_count() const noexcept {
        return static_cast<std::size_t>(4 * (units_ * (in_ + units_) + units_));
    }

    LstmTrace forward(const std::vector<Vector>& xs) const {
        detail::require(!xs.empty(), "LstmLayer: empty input sequence");
        LstmTrace tr;
        const auto steps = xs.size();
        for (auto* v : {&tr.concat, &tr.input_gate, &tr.forget_gate, &tr.cell_candidate, &tr.output_gate,
                        &tr.cells, &tr.hidden})
            v->reserve(steps);
        Vector h = Vector::Zero(units_);
        Vector c = Vector::Zero(units_);
        Vector z(in_ + units_);
        const auto u = units_;
        for (const auto& x : xs) {
            detail::require(x.size() == in_, "LstmLayer: input dimension mismatch");
            z << x, h;
            const Vector a = weights_ * z + bias_;
            Vector i = sigmoid(a.segment(0, u));
            Vector f = sigmoid(a.segment(u, u));
            Vector g = a.segment(2 * u, u).array().tanh().matrix();
            Vector o = sigmoid(a.segment(3 * u, u));
            c = f.cwiseProduct(c) + i.cwiseProduct(g);
            h = o.cwiseProduct(c.array().tanh().matrix());
            tr.concat.push_back(z);
            tr.input_gate.push_back(std::move(i));
            tr.forget_gate.push_back(std::move(f));
            tr.cell_candidate.push_back(std::move(g));
            tr.output_gate.push_back(std::move(o));
            tr.cells.push_back(c);
            tr.hidden.push_back(h);
        }
        return tr;
    }

    /// Backpropagation through time. `upstream_final` is dL/dh_T; `upstream_steps`, when
    /// non-empty, adds dL/dh_t for every step.
    LstmGradient backward(const LstmTrace& tr, const Vector& upstream_final,
                          const std::vector<Vector>& upstream_steps = {}) const {
        const auto steps = tr.hidden.size();
        detail::require(upstream_final.size() == units_, "LstmLayer: upstream size mismatch");
        detail::require(upstream_steps.empty() || upstream_steps.size() == steps,
                        "LstmLayer: per-step upstream length mismatch");
        const auto u = units_;
        Matrix dw = Matrix::Zero(weights_.rows(), weights_.cols());
        Vector db = Vector::Zero(bias_.size());
        std::vector<Vector> dx(steps);
        Vector dh = upstream_final;
        Vector dc = Vector::Zero(u);
        Vector da(4 * u);
        for (std::size_t t = steps; t-- > 0;) {
            if (!upstream_steps.empty()) dh += upstream_steps[t];
            const Vector& i = tr.input_gate[t];
            const Vector& f = tr.forget_gate[t];
            const Vector& g = tr.cell_candidate[t];
            const Vector& o = tr.output_gate[t];
            const Vector tanh_c = tr.cells[t].array().tanh().matrix();
            const Vector c_prev = t > 0 ? tr.cells[t - 1] : Vector::Zero(u);

            const Vector d_o = dh.cwiseProduct(tanh_c);
            dc += dh.cwiseProduct(o).cwiseProduct((1.0 - tanh_c.array().square()).matrix());
            da.segment(0, u) = dc.cwiseProduct(g).cwiseProduct((i.array() * (1.0 - i.array())).matrix());
            da.segment(u, u) = dc.cwiseProduct(c_prev).cwiseProduct((f.array() * (1.0 - f.array())).matrix());
            da.segment(2 * u, u) = dc.cwiseProduct(i).cwiseProduct((1.0 - g.array().square()).matrix());
            da.segment(3 * u, u) = d_o.cwiseProduct((o.array() * (1.0 - o.array())).matrix());

            dw.noalias() += da * tr.concat[t].transpose();
            db += da;
            const Vector dz = weights_.transpose() * da;
            dx[t] = dz.head(in_);
            dh = dz.tail(u);
            dc = dc.cwiseProduct(f);
        }
        LstmGradient grad{Vector(static_cast<Eigen::Index>(parameter_count())), std::move(dx)};
        Eigen::Map<Matrix>(grad.parameters.data(), dw.rows(), dw.cols()) = dw;
        grad.parameters.tail(db.size()) = db;
        return grad;
    }

    Vector parameters() const {
        Vector p(static_cast<Eigen::Index>(parameter_count()));
        Eigen::Map<Matrix>(p.data(), weights_.rows(), weights_.cols()) = weights_;
        p.tail(bias_.size()) = bias_;
        return p;
    }

    void set_parameters(const Vector& p) {
        detail::require(p.size() == static_cast<Eigen::Index>(parameter_count()), "LstmLayer: parameter size mismatch");
        weights_ = Eigen::Map<const Matrix>(p.data(), weights_.rows(), weights_.cols());
        bias_ = p.tail(bias_.size());
    }

private:
    Eigen::Index in_ = 0;
    Eigen::Index units_ = 0;
    Matrix weights_;
    Vector bias_;
};

/// Runs the layer and returns (all hidden states, final hidden state).
inline std::pair<std::vector<Vector>, Vector> lstm_forward(const LstmLayer& layer, const std::vector<Vector>& xs) {
    auto tr = layer.forward(xs);
    Vector last = tr.hidden.back();
    return {std::move(tr.hidden), std::move(last)};
}

inline LstmGradient lstm_backward(const LstmLayer& layer, const std::vector<Vector>& xs, const Vector& upstream_final) {
    return layer.backward(layer.forward(xs), upstream_final);
}

}  // namespace tsode::nn
