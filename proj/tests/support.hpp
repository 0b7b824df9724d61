#pragma once
// Glue between oracle matrices and library types.

#include <string>
#include <vector>

#include "hypotest/model.hpp"
#include "oracles.hpp"

inline hypotest::PmfTable table_of(const oracle::Matrix& f) {
    hypotest::RawPmf raw;
    for (std::size_t y = 0; y < f[0].size(); ++y) raw.labels.push_back("y" + std::to_string(y));
    raw.columns = f;
    return hypotest::validate_pmf(raw);
}

inline std::vector<double> values_of(const hypotest::PairVector& p) {
    return {p.entries().begin(), p.entries().end()};
}

inline double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
    double g = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
    return g;
}
