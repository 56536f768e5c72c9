#pragma once

#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "triage/matrix.hpp"
#include "triage/telemetry.hpp"

namespace testutil {

inline triage::Matrix to_matrix(const oracle::Grid& g) {
    triage::Matrix m(g.size(), g.front().size());
    for (std::size_t r = 0; r < g.size(); ++r)
        for (std::size_t c = 0; c < g[r].size(); ++c) m(r, c) = g[r][c];
    return m;
}

inline oracle::Grid to_grid(const triage::Matrix& m) {
    oracle::Grid g(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t r = 0; r < m.rows(); ++r)
        for (std::size_t c = 0; c < m.cols(); ++c) g[r][c] = m(r, c);
    return g;
}

inline oracle::Grid random_grid(std::size_t rows, std::size_t cols, std::mt19937_64& rng,
                                double scale = 1.0) {
    std::normal_distribution<double> g(0.0, scale);
    oracle::Grid out(rows, std::vector<double>(cols));
    for (auto& r : out)
        for (double& v : r) v = g(rng);
    return out;
}

inline triage::Sample sample(std::string id, triage::FamilyLabel label, triage::FeatureVector f = {}) {
    return triage::Sample{std::move(id), label, f};
}

inline std::string csv_header() {
    std::string h = "id,label";
    for (auto n : triage::canonical_schema().names) h += "," + std::string(n);
    return h + "\n";
}

} // namespace testutil
