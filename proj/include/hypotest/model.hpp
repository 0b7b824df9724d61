#pragma once
// Pmf tables over a finite observation alphabet and the decision rules that
// act on them. error_vector() maps a rule to its pairwise error probabilities.

#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hypotest/errors.hpp"

namespace hypotest {

/// Number of ordered pairs (i, j), i != j, for M hypotheses: M(M-1).
constexpr std::size_t pair_count(std::size_t num_hypotheses) noexcept {
    return num_hypotheses * (num_hypotheses - 1);
}

/// Canonical slot of the ordered pair (decided i, true j). Pairs are grouped
/// by the true hypothesis j, then by i, so a binary vector reads (p10, p01).
std::size_t pair_index(std::size_t decided, std::size_t truth, std::size_t num_hypotheses);

/// Inverse of pair_index: returns (decided, truth).
std::pair<std::size_t, std::size_t> pair_at(std::size_t slot, std::size_t num_hypotheses);

/// Fixed-length real vector indexed by ordered hypothesis pairs.
class PairVector {
public:
    PairVector() = default;
    PairVector(std::size_t num_hypotheses, std::vector<double> entries);

    std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
    std::size_t size() const noexcept { return entries_.size(); }
    std::span<const double> entries() const noexcept { return entries_; }

    double operator[](std::size_t slot) const { return entries_[slot]; }
    double& operator[](std::size_t slot) { return entries_[slot]; }

    double at(std::size_t decided, std::size_t truth) const;
    double& at(std::size_t decided, std::size_t truth);

    bool operator==(const PairVector&) const = default;

protected:
    std::size_t num_hypotheses_ = 0;
    std::vector<double> entries_;
};

/// p(δ): entry (i, j) is the probability of deciding H_i while H_j is true.
class ErrorVector : public PairVector {
public:
    using PairVector::PairVector;
    static ErrorVector zeros(std::size_t num_hypotheses);

    /// p_jj = 1 - sum_{i != j} p_ij.
    double correct(std::size_t truth) const;

    /// Entries in [0,1] and every correct-decision mass nonnegative, within tol.
    bool is_valid(double tol = 1e-12) const;
};

/// Weights v_ij of the linear functional v·p.
class WeightVector : public PairVector {
public:
    using PairVector::PairVector;
    static WeightVector zeros(std::size_t num_hypotheses);
};

double dot(const WeightVector& v, const ErrorVector& p);
double max_abs_difference(const PairVector& a, const PairVector& b);

struct PmfOptions {
    double normalization_tol = 1e-12;
    double merge_tol = 1e-10;
};

/// Unvalidated input: columns[j][y] = f_j(y).
struct RawPmf {
    std::vector<std::string> labels;
    std::vector<std::vector<double>> columns;
};

/// Validated pmf table. Immutable; build through validate_pmf.
class PmfTable {
public:
    std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
    std::size_t num_observations() const noexcept { return labels_.size(); }
    std::size_t error_dim() const noexcept { return pair_count(num_hypotheses_); }

    double mass(std::size_t observation, std::size_t hypothesis) const {
        return mass_[observation * num_hypotheses_ + hypothesis];
    }
    /// Density vector (f_0(y), ..., f_{M-1}(y)).
    std::span<const double> densities(std::size_t observation) const {
        return {mass_.data() + observation * num_hypotheses_, num_hypotheses_};
    }
    std::vector<double> column(std::size_t hypothesis) const;

    const std::vector<std::string>& labels() const noexcept { return labels_; }
    /// Observations removed because they carry zero mass under every hypothesis.
    const std::vector<std::string>& dropped_labels() const noexcept { return dropped_; }

    RawPmf raw() const;

private:
    friend PmfTable validate_pmf(const RawPmf&, const PmfOptions&);

    std::size_t num_hypotheses_ = 0;
    std::vector<std::string> labels_;
    std::vector<double> mass_;  // row-major (observation, hypothesis)
    std::vector<std::string> dropped_;
};

/// Validates a raw table. Normalization is checked, never applied.
PmfTable validate_pmf(const RawPmf& raw, const PmfOptions& options = {});

class RandomizedRule;

/// Every observation mapped to exactly one hypothesis.
class DeterministicRule {
public:
    DeterministicRule() = default;
    DeterministicRule(std::size_t num_hypotheses, std::vector<std::size_t> assignment);

    /// Rule deciding `hypothesis` at every observation.
    static DeterministicRule constant(std::size_t num_hypotheses, std::size_t num_observations,
                                      std::size_t hypothesis);

    std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
    std::size_t num_observations() const noexcept { return assignment_.size(); }
    std::size_t decision(std::size_t observation) const { return assignment_[observation]; }
    std::span<const std::size_t> assignment() const noexcept { return assignment_; }

    RandomizedRule randomized() const;

    bool operator==(const DeterministicRule&) const = default;

private:
    std::size_t num_hypotheses_ = 0;
    std::vector<std::size_t> assignment_;
};

/// δ_i(y): probability of deciding H_i after observing y.
class RandomizedRule {
public:
    RandomizedRule(std::size_t num_observations, std::size_t num_hypotheses,
                   std::vector<double> delta, double tol = 1e-12);

    std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
    std::size_t num_observations() const noexcept { return num_observations_; }
    double probability(std::size_t observation, std::size_t decided) const {
        return delta_[observation * num_hypotheses_ + decided];
    }

private:
    std::size_t num_observations_;
    std::size_t num_hypotheses_;
    std::vector<double> delta_;
};

struct MixtureComponent {
    double coefficient;
    DeterministicRule rule;
};

/// Randomization among deterministic rules with simplex coefficients.
class MixtureRule {
public:
    explicit MixtureRule(std::vector<MixtureComponent> components, double tol = 1e-12);

    const std::vector<MixtureComponent>& components() const noexcept { return components_; }
    std::size_t size() const noexcept { return components_.size(); }

    RandomizedRule randomized() const;

private:
    std::vector<MixtureComponent> components_;
};

ErrorVector error_vector(const RandomizedRule& rule, const PmfTable& table);
ErrorVector error_vector(const DeterministicRule& rule, const PmfTable& table);
ErrorVector mixture_error_vector(const MixtureRule& mix, const PmfTable& table);

struct MergeResult {
    PmfTable table;
    /// mapping[old observation] = merged observation index.
    std::vector<std::size_t> mapping;
};

/// Merges observations whose density vectors point in the same direction.
/// The achievable error region is unchanged by the merge.
MergeResult merge_equivalent_observations(const PmfTable& table, double tol = 1e-10);

/// L_i(y) = f_i(y) / f_0(y); rows with f_0(y) = 0 are marked at infinity.
class LikelihoodRatioProfile {
public:
    LikelihoodRatioProfile(std::size_t num_hypotheses, std::vector<double> ratios,
                           std::vector<bool> at_infinity);

    std::size_t num_observations() const noexcept { return at_infinity_.size(); }
    std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
    bool at_infinity(std::size_t observation) const { return at_infinity_[observation]; }
    /// Throws InvalidSpec when the observation is marked at infinity.
    double ratio(std::size_t observation, std::size_t hypothesis) const;

private:
    std::size_t num_hypotheses_;
    std::vector<double> ratios_;
    std::vector<bool> at_infinity_;
};

LikelihoodRatioProfile likelihood_ratio_profile(const PmfTable& table);

} // namespace hypotest
