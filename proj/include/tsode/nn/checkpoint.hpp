#pragma once

#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsode/nn/lstm.hpp"
#include "tsode/nn/mlp.hpp"

namespace tsode::nn {

/// Serialized model: architecture descriptor, flat parameters and the training seed.
/// Doubles are written in shortest round-trip form, so save/load is bit-exact.
struct Checkpoint {
    nlohmann::json architecture;
    std::vector<double> parameters;
    std::uint64_t seed = 0;

    nlohmann::json to_json() const {
        return {{"architecture", architecture}, {"parameters", parameters}, {"seed", seed}};
    }

    static Checkpoint from_json(const nlohmann::json& j) {
        try {
            return {j.at("architecture"), j.at("parameters").get<std::vector<double>>(), j.at("seed").get<std::uint64_t>()};
        } catch (const nlohmann::json::exception& e) {
            throw Error(std::string("checkpoint: malformed JSON: ") + e.what());
        }
    }

    void save(const std::string& path) const {
        std::ofstream out(path);
        if (!out) throw Error("checkpoint: cannot write " + path);
        out << to_json().dump(2) << '\n';
    }

    static Checkpoint load(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw Error("checkpoint: cannot read " + path);
        try {
            return from_json(nlohmann::json::parse(in));
        } catch (const nlohmann::json::parse_error& e) {
            throw Error(std::string("checkpoint: ") + e.what());
        }
    }
};

inline Vector to_vector(const std::vector<double>& v) { return Eigen::Map<const Vector>(v.data(), Eigen::Index(v.size())); }
inline std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

inline nlohmann::json describe(const Mlp& net) {
    nlohmann::json layers = nlohmann::json::array();
    for (const auto& l : net.layers())
        layers.push_back({{"in", l.in()}, {"out", l.out()}, {"activation", to_string(l.activation)}});
    return {{"type", "mlp"}, {"layers", layers}};
}

/// Zero-initialized network matching a descriptor produced by `describe`.
inline Mlp mlp_from_descriptor(const nlohmann::json& arch) {
    if (arch.value("type", "") != "mlp") throw Error("checkpoint: architecture is not an mlp");
    std::vector<DenseLayer> layers;
    for (const auto& l : arch.at("layers")) {
        const auto in = l.at("in").get<Eigen::Index>();
        const auto out = l.at("out").get<Eigen::Index>();
        layers.push_back({Matrix::Zero(out, in), Vector::Zero(out), activation_from_string(l.at("activation").get<std::string>())});
    }
    return Mlp(std::move(layers));
}

inline Checkpoint make_checkpoint(const Mlp& net, std::uint64_t seed) {
    return {describe(net), to_std(net.parameters()), seed};
}

inline Mlp restore_mlp(const Checkpoint& ck) {
    Mlp net = mlp_from_descriptor(ck.architecture);
    net.set_parameters(to_vector(ck.parameters));
    return net;
}

}  // namespace tsode::nn
