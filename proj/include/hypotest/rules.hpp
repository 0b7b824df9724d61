#pragma once
// Deterministic rules of the weighted-argmin form: observation y goes to the
// hypothesis minimizing V_i(y) = sum_{j != i} v_ij f_j(y). Such a rule
// minimizes v·p over every randomized rule.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "hypotest/model.hpp"

namespace hypotest {

/// V_i(y) for every observation and hypothesis.
class ScoreVector {
public:
    ScoreVector(std::size_t num_observations, std::size_t num_hypotheses,
                std::vector<double> values);

    std::size_t num_observations() const noexcept { return num_observations_; }
    std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
    double at(std::size_t observation, std::size_t hypothesis) const {
        return values_[observation * num_hypotheses_ + hypothesis];
    }

    /// Tie tolerance at y: eps * max_i |V_i(y)|, floored at 1e-15.
    double tolerance(std::size_t observation, double eps) const;

    /// Hypotheses whose score is within the tie tolerance of the minimum at y.
    std::vector<std::size_t> minimizers(std::size_t observation, double eps) const;

private:
    std::size_t num_observations_;
    std::size_t num_hypotheses_;
    std::vector<double> values_;
};

ScoreVector scores(const WeightVector& v, const PmfTable& table);

class TiePolicy {
public:
    enum class Kind { LowestIndex, HighestIndex, Prefer };

    static TiePolicy lowest_index() { return TiePolicy(Kind::LowestIndex, 0); }
    static TiePolicy highest_index() { return TiePolicy(Kind::HighestIndex, 0); }
    /// Picks `hypothesis` when it is among the tied minimizers, else the lowest index.
    static TiePolicy prefer(std::size_t hypothesis) { return TiePolicy(Kind::Prefer, hypothesis); }

    Kind kind() const noexcept { return kind_; }
    std::size_t preferred() const noexcept { return preferred_; }

    std::size_t choose(const std::vector<std::size_t>& tied) const;

private:
    TiePolicy(Kind kind, std::size_t preferred) : kind_(kind), preferred_(preferred) {}
    Kind kind_;
    std::size_t preferred_;
};

/// Relative tolerance used by rule_from_weights to recognise exact ties that
/// differ only by rounding.
inline constexpr double kRuleTieEps = 1e-12;

DeterministicRule rule_from_weights(const WeightVector& v, const PmfTable& table,
                                    TiePolicy policy = TiePolicy::lowest_index());

inline constexpr double kBoundaryEps = 1e-9;

struct BoundaryReport {
    struct PairSet {
        std::size_t first;
        std::size_t second;
        std::vector<std::size_t> observations;
    };
    /// B_{i,j}(v) for every i < j (possibly empty).
    std::vector<PairSet> pairs;
    /// B(v): observations where at least two scores tie at the minimum.
    std::vector<std::size_t> boundary;
    /// Complement of B(v).
    std::vector<std::size_t> interior;
    /// sum_{y in B(v)} f_j(y) for each hypothesis j.
    std::vector<double> mass;

    bool negligible() const;
};

BoundaryReport boundary_report(const WeightVector& v, const PmfTable& table,
                               double eps = kBoundaryEps);

struct TieBreakVariants {
    std::vector<DeterministicRule> rules;
    bool truncated = false;
};

inline constexpr std::size_t kDefaultVariantCap = 4096;

/// All deterministic rules that agree with the argmin off the boundary and
/// send each boundary observation to any of its tied minimizers.
TieBreakVariants tie_break_variants(const WeightVector& v, const PmfTable& table,
                                    double eps = kBoundaryEps,
                                    std::size_t cap = kDefaultVariantCap);

inline constexpr std::uint64_t kDefaultEnumerationCap = std::uint64_t{1} << 20;

/// M^n, or nullopt on overflow past `limit`.
std::optional<std::uint64_t> rule_count(std::size_t num_hypotheses, std::size_t num_observations,
                                        std::uint64_t limit);

/// Yields every total assignment exactly once, in odometer order with the
/// first observation varying fastest.
class DeterministicRuleEnumerator {
public:
    /// Throws CapExceeded (value() = required count, or +inf on overflow).
    DeterministicRuleEnumerator(std::size_t num_hypotheses, std::size_t num_observations,
                                std::uint64_t cap = kDefaultEnumerationCap);

    std::uint64_t count() const noexcept { return count_; }
    std::optional<DeterministicRule> next();

private:
    std::size_t num_hypotheses_;
    std::vector<std::size_t> digits_;
    std::uint64_t count_;
    std::uint64_t emitted_ = 0;
};

DeterministicRuleEnumerator enumerate_deterministic_rules(
    const PmfTable& table, std::uint64_t cap = kDefaultEnumerationCap);

} // namespace hypotest
