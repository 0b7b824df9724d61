#include "hypotest/rules.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypotest {

ScoreVector::ScoreVector(std::size_t num_observations, std::size_t num_hypotheses,
                         std::vector<double> values)
    : num_observations_(num_observations),
      num_hypotheses_(num_hypotheses),
      values_(std::move(values)) {
    if (values_.size() != num_observations_ * num_hypotheses_) {
        throw Error(ErrorKind::DimensionMismatch, "score matrix has the wrong shape");
    }
}

double ScoreVector::tolerance(std::size_t observation, double eps) const {
    double scale = 0.0;
    for (std::size_t i = 0; i < num_hypotheses_; ++i) {
        scale = std::max(scale, std::abs(at(observation, i)));
    }
    return std::max(eps * scale, 1e-15);
}

std::vector<std::size_t> ScoreVector::minimizers(std::size_t observation, double eps) const {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < num_hypotheses_; ++i) best = std::min(best, at(observation, i));
    const double tol = tolerance(observation, eps);
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < num_hypotheses_; ++i) {
        if (at(observation, i) <= best + tol) out.push_back(i);
    }
    return out;
}

ScoreVector scores(const WeightVector& v, const PmfTable& table) {
    const std::size_t m = table.num_hypotheses();
    if (v.num_hypotheses() != m) {
        throw Error(ErrorKind::DimensionMismatch, "weight vector does not match the pmf table");
    }
    const std::size_t n = table.num_observations();
    std::vector<double> values(n * m, 0.0);
    for (std::size_t y = 0; y < n; ++y) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < m; ++j) {
                if (j != i) s += v.at(i, j) * table.mass(y, j);
            }
            values[y * m + i] = s;
        }
    }
    return ScoreVector(n, m, std::move(values));
}

std::size_t TiePolicy::choose(const std::vector<std::size_t>& tied) const {
    switch (kind_) {
        case Kind::LowestIndex: return tied.front();
        case Kind::HighestIndex: return tied.back();
        case Kind::Prefer:
            if (std::find(tied.begin(), tied.end(), preferred_) != tied.end()) return preferred_;
            return tied.front();
    }
    return tied.front();
}

DeterministicRule rule_from_weights(const WeightVector& v, const PmfTable& table,
                                    TiePolicy policy) {
    const ScoreVector s = scores(v, table);
    std::vector<std::size_t> assignment(table.num_observations());
    for (std::size_t y = 0; y < assignment.size(); ++y) {
        assignment[y] = policy.choose(s.minimizers(y, kRuleTieEps));
    }
    return DeterministicRule(table.num_hypotheses(), std::move(assignment));
}

bool BoundaryReport::negligible() const {
    return std::all_of(mass.begin(), mass.end(), [](double x) { return x == 0.0; });
}

BoundaryReport boundary_report(const WeightVector& v, const PmfTable& table, double eps) {
    if (!(eps >= 0.0)) throw Error(ErrorKind::InvalidSpec, "tie tolerance must be >= 0");
    const ScoreVector s = scores(v, table);
    const std::size_t m = table.num_hypotheses();
    const std::size_t n = table.num_observations();

    BoundaryReport report;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i + 1; j < m; ++j) report.pairs.push_back({i, j, {}});
    }
    report.mass.assign(m, 0.0);

    for (std::size_t y = 0; y < n; ++y) {
        const double tol = s.tolerance(y, eps);
        bool on_boundary = false;
        std::size_t slot = 0;
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = i + 1; j < m; ++j, ++slot) {
                if (std::abs(s.at(y, i) - s.at(y, j)) > tol) continue;
                bool lowest = true;
                for (std::size_t k = 0; k < m && lowest; ++k) {
                    if (k == i || k == j) continue;
                    lowest = s.at(y, i) <= s.at(y, k) + tol && s.at(y, j) <= s.at(y, k) + tol;
                }
                if (lowest) {
                    report.pairs[slot].observations.push_back(y);
                    on_boundary = true;
                }
            }
        }
        if (on_boundary) {
            report.boundary.push_back(y);
            for (std::size_t j = 0; j < m; ++j) report.mass[j] += table.mass(y, j);
        } else {
            report.interior.push_back(y);
        }
    }
    return report;
}

TieBreakVariants tie_break_variants(const WeightVector& v, const PmfTable& table, double eps,
                                    std::size_t cap) {
    const ScoreVector s = scores(v, table);
    const std::size_t n = table.num_observations();

    std::vector<std::vector<std::size_t>> choices(n);
    for (std::size_t y = 0; y < n; ++y) choices[y] = s.minimizers(y, eps);

    TieBreakVariants out;
    std::vector<std::size_t> cursor(n, 0);
    while (true) {
        if (out.rules.size() >= cap) {
            out.truncated = true;
            break;
        }
        std::vector<std::size_t> assignment(n);
        for (std::size_t y = 0; y < n; ++y) assignment[y] = choices[y][cursor[y]];
        out.rules.emplace_back(table.num_hypotheses(), std::move(assignment));

        std::size_t y = 0;
        while (y < n && ++cursor[y] == choices[y].size()) cursor[y++] = 0;
        if (y == n) break;
    }
    return out;
}

std::optional<std::uint64_t> rule_count(std::size_t num_hypotheses, std::size_t num_observations,
                                        std::uint64_t limit) {
    std::uint64_t count = 1;
    for (std::size_t y = 0; y < num_observations; ++y) {
        if (count > limit / num_hypotheses) return std::nullopt;
        count *= num_hypotheses;
    }
    return count;
}

DeterministicRuleEnumerator::DeterministicRuleEnumerator(std::size_t num_hypotheses,
                                                         std::size_t num_observations,
                                                         std::uint64_t cap)
    : num_hypotheses_(num_hypotheses), digits_(num_observations, 0), count_(0) {
    if (num_hypotheses < 2) {
        throw Error(ErrorKind::DimensionMismatch, "at least two hypotheses are required");
    }
    const auto required = rule_count(num_hypotheses, num_observations, cap);
    if (!required || *required > cap) {
        const double needed = std::pow(static_cast<double>(num_hypotheses),
                                       static_cast<double>(num_observations));
        throw Error(ErrorKind::CapExceeded,
                    "enumeration needs " + std::to_string(num_hypotheses) + "^" +
                        std::to_string(num_observations) + " rules, cap is " +
                        std::to_string(cap),
                    std::nullopt, needed);
    }
    count_ = *required;
}

std::optional<DeterministicRule> DeterministicRuleEnumerator::next() {
    if (emitted_ == count_) return std::nullopt;
    DeterministicRule rule(num_hypotheses_, digits_);
    ++emitted_;
    std::size_t y = 0;
    while (y < digits_.size() && ++digits_[y] == num_hypotheses_) digits_[y++] = 0;
    return rule;
}

DeterministicRuleEnumerator enumerate_deterministic_rules(const PmfTable& table,
                                                          std::uint64_t cap) {
    return DeterministicRuleEnumerator(table.num_hypotheses(), table.num_observations(), cap);
}

} // namespace hypotest
