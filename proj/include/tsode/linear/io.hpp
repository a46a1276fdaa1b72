#pragma once

#include <charconv>
#include <cstdio>
#include <fstream>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tsode/linear/solution_form.hpp"

namespace tsode::linear {

/// Square matrix from comma-separated rows. Blank lines are skipped.
inline Matrix read_matrix_csv(std::istream& in) {
    std::vector<std::vector<double>> rows;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            const auto b = cell.find_first_not_of(" \t\r");
            const auto e = cell.find_last_not_of(" \t\r");
            if (b == std::string::npos) throw Error("matrix csv: empty cell on line " + std::to_string(line_no));
            double v = 0.0;
            const auto* first = cell.data() + b;
            const auto* last = cell.data() + e + 1;
            const auto [ptr, ec] = std::from_chars(first, last, v);
            if (ec != std::errc() || ptr != last)
                throw Error("matrix csv: cannot parse '" + cell.substr(b, e - b + 1) + "' on line " + std::to_string(line_no));
            row.push_back(v);
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw Error("matrix csv: no rows");
    const std::size_t d = rows.size();
    Matrix a(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < d; ++i) {
        if (rows[i].size() != d)
            throw Error("matrix csv: row " + std::to_string(i + 1) + " has " + std::to_string(rows[i].size()) +
                        " entries, expected " + std::to_string(d));
        for (std::size_t j = 0; j < d; ++j) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return a;
}

inline Matrix read_matrix_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path + "'");
    return read_matrix_csv(in);
}

inline std::string matrix_to_csv(const Matrix& a) {
    std::string out;
    char buf[32];
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", a(i, j));
            out += (j ? "," : "") + std::string(buf);
        }
        out += '\n';
    }
    return out;
}

/// Fixed-width text rendering for console output.
inline std::string format_matrix(const Matrix& a, int decimals = 4) {
    std::string out;
    char buf[48];
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        out += "[";
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%*.*f", decimals + 5, decimals, a(i, j) == 0.0 ? 0.0 : a(i, j));
            out += buf;
        }
        out += " ]\n";
    }
    return out;
}

inline std::string format_complex(Complex z, int decimals = 6) {
    char buf[96];
    const double re = z.real() == 0.0 ? 0.0 : z.real();
    const double im = z.imag() == 0.0 ? 0.0 : z.imag();
    std::snprintf(buf, sizeof buf, "%.*f %c %.*fi", decimals, re, im < 0.0 ? '-' : '+', decimals, std::abs(im));
    return buf;
}

/// Eigenvalues, modes and the solution form of x' = A x.
inline nlohmann::json spectrum_report(const Matrix& a, int decimals = 2) {
    const auto spectrum = eigenvalues(a);
    nlohmann::json eig = nlohmann::json::array();
    for (auto z : spectrum.eigenvalues) eig.push_back({{"re", z.real()}, {"im", z.imag()}});
    const auto modes = modes_from_spectrum(spectrum);
    nlohmann::json jm = nlohmann::json::array();
    for (const auto& m : modes) jm.push_back({{"alpha", m.alpha}, {"beta", m.beta}});
    return {{"dimension", a.rows()}, {"eigenvalues", eig}, {"modes", jm}, {"solution_form", render_modes(modes, decimals)}};
}

}  // namespace tsode::linear
