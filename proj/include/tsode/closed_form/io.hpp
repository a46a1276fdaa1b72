#pragma once

#include <fstream>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "tsode/closed_form/encoder.hpp"
#include "tsode/closed_form/model.hpp"
#include "tsode/nn/checkpoint.hpp"

namespace tsode::closed_form {

inline nlohmann::json to_json(const ClosedFormModel& m) {
    return {{"K", m.modes()}, {"alphas", m.alphas}, {"betas", m.betas}, {"C", m.c}, {"t0", m.t0}};
}

inline ClosedFormModel model_from_json(const nlohmann::json& j) {
    ClosedFormModel m{j.at("alphas").get<std::vector<double>>(), j.at("betas").get<std::vector<double>>(),
                      j.at("C").get<std::vector<double>>(), j.at("t0").get<double>()};
    detail::require(j.at("K").get<std::size_t>() == m.modes(), "closed-form model file: K disagrees with betas");
    m.validate();
    return m;
}

/// Encoder checkpoint: the network plus the frozen rates, spacing and horizon it was trained for.
inline nlohmann::json encoder_to_json(const EncoderModel& enc, std::uint64_t seed) {
    const nlohmann::json arch{{"type", "closed_form_encoder"},   {"network", nn::describe(enc.network())},
                              {"alphas", enc.spectrum().alphas}, {"betas", enc.spectrum().betas},
                              {"dt", enc.dt()},                  {"horizon", enc.horizon()}};
    return nn::Checkpoint{arch, nn::to_std(enc.parameters()), seed}.to_json();
}

inline EncoderModel encoder_from_json(const nlohmann::json& j) {
    const auto ck = nn::Checkpoint::from_json(j);
    const auto& arch = ck.architecture;
    auto net = nn::mlp_from_descriptor(arch.at("network"));
    net.set_parameters(nn::to_vector(ck.parameters));
    return EncoderModel(std::move(net),
                        {arch.at("alphas").get<std::vector<double>>(), arch.at("betas").get<std::vector<double>>()},
                        arch.at("dt").get<double>(), arch.at("horizon").get<std::size_t>());
}

/// Writes the model file; `encoder_path`, when given, is recorded as the encoder checkpoint reference.
inline void save_model(const std::string& path, const ClosedFormModel& m,
                       const std::optional<std::string>& encoder_path = std::nullopt) {
    auto j = to_json(m);
    if (encoder_path) j["encoder"] = *encoder_path;
    std::ofstream out(path);
    if (!out) throw Error("cannot open '" + path + "' for writing");
    out << j.dump(2) << '\n';
    if (!out) throw Error("write failed for '" + path + "'");
}

inline ClosedFormModel load_model(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return model_from_json(nlohmann::json::parse(in));
}

}  // namespace tsode::closed_form
