// Fits the closed-form forecaster on a noisy daily cycle and compares it with the repeater.

#include <iostream>

#include "tsode/baselines/factory.hpp"
#include "tsode/core/metrics.hpp"
#include "tsode/core/preprocess.hpp"
#include "tsode/core/synth.hpp"

int main() {
    using namespace tsode;
    const auto raw = synth_scalar("seasonal24", 4000, 0.0, 4000.0);
    auto [train, val, test] = split(raw, {});
    const auto [std_train, scaler] = standardize(train);
    const auto noisy_train = add_noise(std_train, {0.1, 1});
    const auto std_test = test.with_values(scale(test.span(), scaler));

    const std::size_t m = 30, n = 30;
    const auto windows = make_windows(std_test, m, n, 1);
    for (const char* name : {"repeater", "closed_form"}) {
        auto f = baselines::make_forecaster(name, {{"epochs", 50}, {"max_windows", 300}});
        f->fit(noisy_train, m, n, 7);
        double total = 0.0;
        for (const auto& w : windows) total += mae(f->predict(w.history), w.target);
        std::cout << name << ": test MAE " << total / static_cast<double>(windows.size()) << "\n";
    }
}
