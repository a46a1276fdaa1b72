// Learns x' = A x from samples of [sin t, cos t] and prints the spectrum and solution form of A.

#include <iostream>
#include <numbers>

#include "tsode/core/synth.hpp"
#include "tsode/linear/io.hpp"
#include "tsode/linear/linear_node.hpp"
#include "tsode/linear/solution_form.hpp"

int main() {
    using namespace tsode;
    const auto ch = synth("sine_pair", 100, 0.0, 2.0 * std::numbers::pi);
    std::vector<linear::Vector> samples;
    for (std::size_t i = 0; i < ch[0].size(); ++i) samples.push_back(linear::Vector{{ch[0][i], ch[1][i]}});

    const auto res = linear::train_linear_node(samples, {0.0, ch[0].dt(), samples.size()}, samples.front(), {});
    std::cout << "A =\n" << linear::format_matrix(res.system.a, 4);
    for (const auto& z : linear::eigenvalues(res.system.a).eigenvalues) std::cout << "lambda = " << linear::format_complex(z) << "\n";
    std::cout << "x(t) = " << linear::solution_form_report(res.system.a).rendering << "\n";
}
