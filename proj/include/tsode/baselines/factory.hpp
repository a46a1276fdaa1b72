#pragma once

#include <array>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "tsode/baselines/closed_form_forecaster.hpp"
#include "tsode/baselines/latent_ode.hpp"
#include "tsode/baselines/nn_forecasters.hpp"
#include "tsode/baselines/repeater.hpp"
#include "tsode/baselines/sarima.hpp"

namespace tsode::baselines {

inline constexpr std::array<std::string_view, 6> kModelNames = {"repeater", "fcnn", "arima", "lstm", "latent_ode",
                                                                "closed_form"};

inline bool is_model_name(std::string_view name) {
    for (auto known : kModelNames)
        if (known == name) return true;
    return false;
}

namespace detail_factory {

template <class T>
void read(const nlohmann::json& j, const char* key, T& field) {
    if (j.contains(key)) field = j.at(key).get<T>();
}

inline NetTrainOptions net_options(const nlohmann::json& j) {
    NetTrainOptions o;
    read(j, "epochs", o.epochs);
    read(j, "batch_size", o.batch_size);
    read(j, "learning_rate", o.learning_rate);
    read(j, "stride", o.stride);
    read(j, "max_windows", o.max_windows);
    return o;
}

}  // namespace detail_factory

/// Builds an unfitted forecaster. `options` holds model-specific overrides; unknown keys are ignored.
inline ForecasterPtr make_forecaster(std::string_view name, const nlohmann::json& options = nlohmann::json::object()) {
    using detail_factory::read;
    try {
        if (name == "repeater") return std::make_unique<RepeaterForecaster>();
        if (name == "arima") return std::make_unique<SarimaForecaster>(options.value("period", std::size_t{24}));
        if (name == "fcnn")
            return std::make_unique<FcnnForecaster>(detail_factory::net_options(options),
                                                    options.value("hidden", std::size_t{128}));
        if (name == "lstm")
            return std::make_unique<LstmForecaster>(detail_factory::net_options(options),
                                                    options.value("units", std::size_t{32}),
                                                    options.value("hidden", std::size_t{128}));
        if (name == "latent_ode") {
            LatentOdeOptions o;
            read(options, "latent", o.latent);
            read(options, "encoder_hidden", o.encoder_hidden);
            read(options, "field_hidden", o.field_hidden);
            read(options, "iterations", o.iterations);
            read(options, "batch_size", o.batch_size);
            read(options, "learning_rate", o.learning_rate);
            read(options, "stride", o.stride);
            read(options, "max_windows", o.max_windows);
            read(options, "substeps", o.substeps);
            read(options, "latent_dt", o.latent_dt);
            if (options.value("field", std::string("mlp")) == "linear")
                return std::make_unique<LatentOdeForecaster<ode::LinearField>>(o);
            return std::make_unique<LatentOdeForecaster<ode::MlpField>>(o);
        }
        if (name == "closed_form") {
            ClosedFormOptions o;
            read(options, "modes", o.modes);
            read(options, "adapt_modes", o.adapt_modes);
            read(options, "free_alphas", o.free_alphas);
            read(options, "sample_length", o.sample_length);
            read(options, "stride", o.stride);
            read(options, "max_windows", o.max_windows);
            read(options, "hidden", o.encoder.hidden);
            read(options, "epochs", o.encoder.epochs);
            read(options, "batch_size", o.encoder.batch_size);
            read(options, "learning_rate", o.encoder.learning_rate);
            return std::make_unique<ClosedFormForecaster>(o);
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error("options for model '" + std::string(name) + "': " + e.what());
    }
    throw Error("unknown model '" + std::string(name) + "'");
}

}  // namespace tsode::baselines
