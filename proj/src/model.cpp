#include "hypotest/model.hpp"

#include <cmath>
#include <sstream>
#include <unordered_set>

namespace hypotest {

std::size_t pair_index(std::size_t decided, std::size_t truth, std::size_t num_hypotheses) {
    if (decided == truth || decided >= num_hypotheses || truth >= num_hypotheses) {
        throw Error(ErrorKind::DimensionMismatch, "invalid hypothesis pair");
    }
    return truth * (num_hypotheses - 1) + (decided < truth ? decided : decided - 1);
}

std::pair<std::size_t, std::size_t> pair_at(std::size_t slot, std::size_t num_hypotheses) {
    if (num_hypotheses < 2 || slot >= pair_count(num_hypotheses)) {
        throw Error(ErrorKind::DimensionMismatch, "pair slot out of range");
    }
    const std::size_t truth = slot / (num_hypotheses - 1);
    std::size_t decided = slot % (num_hypotheses - 1);
    if (decided >= truth) ++decided;
    return {decided, truth};
}

PairVector::PairVector(std::size_t num_hypotheses, std::vector<double> entries)
    : num_hypotheses_(num_hypotheses), entries_(std::move(entries)) {
    if (num_hypotheses < 2 || entries_.size() != pair_count(num_hypotheses)) {
        throw Error(ErrorKind::DimensionMismatch,
                    "pair vector needs M(M-1) entries with M >= 2");
    }
}

double PairVector::at(std::size_t decided, std::size_t truth) const {
    return entries_[pair_index(decided, truth, num_hypotheses_)];
}

double& PairVector::at(std::size_t decided, std::size_t truth) {
    return entries_[pair_index(decided, truth, num_hypotheses_)];
}

ErrorVector ErrorVector::zeros(std::size_t num_hypotheses) {
    return ErrorVector(num_hypotheses, std::vector<double>(pair_count(num_hypotheses), 0.0));
}

double ErrorVector::correct(std::size_t truth) const {
    double sum = 0.0;
    for (std::size_t i = 0; i < num_hypotheses_; ++i) {
        if (i != truth) sum += at(i, truth);
    }
    return 1.0 - sum;
}

bool ErrorVector::is_valid(double tol) const {
    for (double e : entries_) {
        if (!(e >= -tol && e <= 1.0 + tol)) return false;
    }
    for (std::size_t j = 0; j < num_hypotheses_; ++j) {
        if (correct(j) < -tol) return false;
    }
    return true;
}

WeightVector WeightVector::zeros(std::size_t num_hypotheses) {
    return WeightVector(num_hypotheses, std::vector<double>(pair_count(num_hypotheses), 0.0));
}

double dot(const WeightVector& v, const ErrorVector& p) {
    if (v.size() != p.size()) {
        throw Error(ErrorKind::DimensionMismatch, "weight and error vectors differ in length");
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) sum += v[k] * p[k];
    return sum;
}

double max_abs_difference(const PairVector& a, const PairVector& b) {
    if (a.size() != b.size()) {
        throw Error(ErrorKind::DimensionMismatch, "pair vectors differ in length");
    }
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

std::vector<double> PmfTable::column(std::size_t hypothesis) const {
    std::vector<double> out(num_observations());
    for (std::size_t y = 0; y < out.size(); ++y) out[y] = mass(y, hypothesis);
    return out;
}

RawPmf PmfTable::raw() const {
    RawPmf raw;
    raw.labels = labels_;
    raw.columns.reserve(num_hypotheses_);
    for (std::size_t j = 0; j < num_hypotheses_; ++j) raw.columns.push_back(column(j));
    return raw;
}

PmfTable validate_pmf(const RawPmf& raw, const PmfOptions& options) {
    const std::size_t m = raw.columns.size();
    const std::size_t n = raw.labels.size();
    if (m < 2) {
        throw Error(ErrorKind::DimensionMismatch, "at least two hypotheses are required");
    }
    if (n == 0) {
        throw Error(ErrorKind::DimensionMismatch, "observation alphabet is empty");
    }
    for (std::size_t j = 0; j < m; ++j) {
        if (raw.columns[j].size() != n) {
            std::ostringstream msg;
            msg << "hypothesis " << j << " has " << raw.columns[j].size() << " entries, expected "
                << n;
            throw Error(ErrorKind::DimensionMismatch, msg.str(), j);
        }
    }

    std::unordered_set<std::string> seen;
    for (std::size_t y = 0; y < n; ++y) {
        if (!seen.insert(raw.labels[y]).second) {
            throw Error(ErrorKind::DuplicateLabel, "observation label '" + raw.labels[y] +
                                                       "' appears more than once",
                        y);
        }
    }

    for (std::size_t j = 0; j < m; ++j) {
        double sum = 0.0;
        for (std::size_t y = 0; y < n; ++y) {
            const double f = raw.columns[j][y];
            if (!std::isfinite(f) || f < 0.0) {
                std::ostringstream msg;
                msg << "f_" << j << "(" << raw.labels[y] << ") = " << f << " is not a valid mass";
                throw Error(ErrorKind::NegativeMass, msg.str(), j, f);
            }
            sum += f;
        }
        const double deviation = sum - 1.0;
        bool entry_above_one = false;
        for (std::size_t y = 0; y < n; ++y) entry_above_one |= raw.columns[j][y] > 1.0;
        if (std::abs(deviation) > options.normalization_tol || entry_above_one) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "hypothesis " << j << " sums to " << sum << " (deviation " << deviation << ")";
            throw Error(ErrorKind::ColumnNotNormalized, msg.str(), j, deviation);
        }
    }

    PmfTable table;
    table.num_hypotheses_ = m;
    for (std::size_t y = 0; y < n; ++y) {
        bool all_zero = true;
        for (std::size_t j = 0; j < m; ++j) all_zero &= raw.columns[j][y] == 0.0;
        if (all_zero) {
            table.dropped_.push_back(raw.labels[y]);
            continue;
        }
        table.labels_.push_back(raw.labels[y]);
        for (std::size_t j = 0; j < m; ++j) table.mass_.push_back(raw.columns[j][y]);
    }
    return table;
}

DeterministicRule::DeterministicRule(std::size_t num_hypotheses,
                                     std::vector<std::size_t> assignment)
    : num_hypotheses_(num_hypotheses), assignment_(std::move(assignment)) {
    if (num_hypotheses < 2) {
        throw Error(ErrorKind::DimensionMismatch, "at least two hypotheses are required");
    }
    for (std::size_t y = 0; y < assignment_.size(); ++y) {
        if (assignment_[y] >= num_hypotheses) {
            throw Error(ErrorKind::InvalidRule, "observation assigned to unknown hypothesis", y);
        }
    }
}

DeterministicRule DeterministicRule::constant(std::size_t num_hypotheses,
                                              std::size_t num_observations,
                                              std::size_t hypothesis) {
    return DeterministicRule(num_hypotheses,
                             std::vector<std::size_t>(num_observations, hypothesis));
}

RandomizedRule DeterministicRule::randomized() const {
    std::vector<double> delta(assignment_.size() * num_hypotheses_, 0.0);
    for (std::size_t y = 0; y < assignment_.size(); ++y) {
        delta[y * num_hypotheses_ + assignment_[y]] = 1.0;
    }
    return RandomizedRule(assignment_.size(), num_hypotheses_, std::move(delta));
}

RandomizedRule::RandomizedRule(std::size_t num_observations, std::size_t num_hypotheses,
                               std::vector<double> delta, double tol)
    : num_observations_(num_observations),
      num_hypotheses_(num_hypotheses),
      delta_(std::move(delta)) {
    if (num_hypotheses < 2 || delta_.size() != num_observations * num_hypotheses) {
        throw Error(ErrorKind::DimensionMismatch, "decision matrix has the wrong shape");
    }
    for (std::size_t y = 0; y < num_observations; ++y) {
        double sum = 0.0;
        for (std::size_t i = 0; i < num_hypotheses; ++i) {
            const double d = probability(y, i);
            if (!(d >= 0.0 && d <= 1.0)) {
                throw Error(ErrorKind::InvalidRule, "decision probability outside [0,1]", y, d);
            }
            sum += d;
        }
        if (std::abs(sum - 1.0) > tol) {
            throw Error(ErrorKind::InvalidRule, "decision probabilities do not sum to one", y,
                        sum - 1.0);
        }
    }
}

MixtureRule::MixtureRule(std::vector<MixtureComponent> components, double tol)
    : components_(std::move(components)) {
    if (components_.empty()) {
        throw Error(ErrorKind::InvalidCoefficients, "mixture needs at least one component");
    }
    double sum = 0.0;
    const auto& first = components_.front().rule;
    for (std::size_t k = 0; k < components_.size(); ++k) {
        const auto& c = components_[k];
        if (!(c.coefficient >= 0.0)) {
            throw Error(ErrorKind::InvalidCoefficients, "negative mixture coefficient", k,
                        c.coefficient);
        }
        if (c.rule.num_hypotheses() != first.num_hypotheses() ||
            c.rule.num_observations() != first.num_observations()) {
            throw Error(ErrorKind::DimensionMismatch, "mixture components differ in shape", k);
        }
        sum += c.coefficient;
    }
    if (std::abs(sum - 1.0) > tol) {
        throw Error(ErrorKind::InvalidCoefficients, "mixture coefficients do not sum to one",
                    std::nullopt, sum - 1.0);
    }
}

RandomizedRule MixtureRule::randomized() const {
    const auto& first = components_.front().rule;
    const std::size_t n = first.num_observations();
    const std::size_t m = first.num_hypotheses();
    std::vector<double> delta(n * m, 0.0);
    for (const auto& c : components_) {
        for (std::size_t y = 0; y < n; ++y) delta[y * m + c.rule.decision(y)] += c.coefficient;
    }
    // Row sums may differ from one at rounding level; renormalize each row.
    for (std::size_t y = 0; y < n; ++y) {
        double sum = 0.0;
        for (std::size_t i = 0; i < m; ++i) sum += delta[y * m + i];
        for (std::size_t i = 0; i < m; ++i) delta[y * m + i] /= sum;
    }
    return RandomizedRule(n, m, std::move(delta));
}

ErrorVector error_vector(const RandomizedRule& rule, const PmfTable& table) {
    const std::size_t m = table.num_hypotheses();
    if (rule.num_hypotheses() != m || rule.num_observations() != table.num_observations()) {
        throw Error(ErrorKind::DimensionMismatch, "rule does not match the pmf table");
    }
    ErrorVector p = ErrorVector::zeros(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            if (i == j) continue;
            double sum = 0.0;
            for (std::size_t y = 0; y < table.num_observations(); ++y) {
                sum += rule.probability(y, i) * table.mass(y, j);
            }
            p.at(i, j) = sum;
        }
    }
    return p;
}

ErrorVector error_vector(const DeterministicRule& rule, const PmfTable& table) {
    const std::size_t m = table.num_hypotheses();
    if (rule.num_hypotheses() != m || rule.num_observations() != table.num_observations()) {
        throw Error(ErrorKind::DimensionMismatch, "rule does not match the pmf table");
    }
    // Accumulate in observation order so the sums match the randomized embedding bit for bit.
    ErrorVector p = ErrorVector::zeros(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            if (i == j) continue;
            double sum = 0.0;
            for (std::size_t y = 0; y < table.num_observations(); ++y) {
                if (rule.decision(y) == i) sum += table.mass(y, j);
            }
            p.at(i, j) = sum;
        }
    }
    return p;
}

ErrorVector mixture_error_vector(const MixtureRule& mix, const PmfTable& table) {
    ErrorVector p = ErrorVector::zeros(table.num_hypotheses());
    for (const auto& c : mix.components()) {
        const ErrorVector q = error_vector(c.rule, table);
        for (std::size_t k = 0; k < p.size(); ++k) p[k] += c.coefficient * q[k];
    }
    return p;
}

MergeResult merge_equivalent_observations(const PmfTable& table, double tol) {
    const std::size_t m = table.num_hypotheses();
    const std::size_t n = table.num_observations();

    std::vector<std::vector<double>> directions;  // unit-sum representative per group
    std::vector<std::vector<double>> merged_mass;
    std::vector<std::string> merged_labels;
    std::vector<std::size_t> mapping(n);

    for (std::size_t y = 0; y < n; ++y) {
        const auto f = table.densities(y);
        double total = 0.0;
        for (double x : f) total += x;
        std::vector<double> dir(m);
        for (std::size_t j = 0; j < m; ++j) dir[j] = f[j] / total;

        std::size_t group = directions.size();
        for (std::size_t g = 0; g < directions.size(); ++g) {
            bool same = true;
            for (std::size_t j = 0; j < m && same; ++j) {
                same = std::abs(directions[g][j] - dir[j]) <= tol;
            }
            if (same) {
                group = g;
                break;
            }
        }
        if (group == directions.size()) {
            directions.push_back(dir);
            merged_mass.emplace_back(f.begin(), f.end());
            merged_labels.push_back(table.labels()[y]);
        } else {
            for (std::size_t j = 0; j < m; ++j) merged_mass[group][j] += f[j];
            merged_labels[group] += "|" + table.labels()[y];
        }
        mapping[y] = group;
    }

    RawPmf raw;
    raw.labels = std::move(merged_labels);
    raw.columns.assign(m, std::vector<double>(raw.labels.size()));
    for (std::size_t g = 0; g < raw.labels.size(); ++g) {
        for (std::size_t j = 0; j < m; ++j) raw.columns[j][g] = merged_mass[g][j];
    }
    // Regrouped sums can drift by a few ulps from the input's own rounding.
    PmfOptions options;
    options.normalization_tol = 1e-9;
    return {validate_pmf(raw, options), std::move(mapping)};
}

LikelihoodRatioProfile::LikelihoodRatioProfile(std::size_t num_hypotheses,
                                               std::vector<double> ratios,
                                               std::vector<bool> at_infinity)
    : num_hypotheses_(num_hypotheses),
      ratios_(std::move(ratios)),
      at_infinity_(std::move(at_infinity)) {
    if (ratios_.size() != at_infinity_.size() * num_hypotheses_) {
        throw Error(ErrorKind::DimensionMismatch, "ratio matrix has the wrong shape");
    }
}

double LikelihoodRatioProfile::ratio(std::size_t observation, std::size_t hypothesis) const {
    if (at_infinity_[observation]) {
        throw Error(ErrorKind::InvalidSpec, "likelihood ratio is at infinity (f_0 = 0)",
                    observation);
    }
    return ratios_[observation * num_hypotheses_ + hypothesis];
}

LikelihoodRatioProfile likelihood_ratio_profile(const PmfTable& table) {
    const std::size_t m = table.num_hypotheses();
    const std::size_t n = table.num_observations();
    std::vector<double> ratios(n * m, 0.0);
    std::vector<bool> infinite(n, false);
    for (std::size_t y = 0; y < n; ++y) {
        const double f0 = table.mass(y, 0);
        if (f0 == 0.0) {
            infinite[y] = true;
            continue;
        }
        for (std::size_t i = 0; i < m; ++i) ratios[y * m + i] = table.mass(y, i) / f0;
    }
    return LikelihoodRatioProfile(m, std::move(ratios), std::move(infinite));
}

} // namespace hypotest
