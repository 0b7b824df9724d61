#pragma once
// Benchmark problems built from independent binary channels observed jointly,
// plus seeded random problems for property tests.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hypotest/criteria.hpp"
#include "hypotest/model.hpp"
#include "hypotest/optimizer.hpp"

namespace hypotest {

/// p10 = P(output 1 | bit 0), p01 = P(output 0 | bit 1).
struct BinaryChannel {
    double p10;
    double p01;

    double p00() const noexcept { return 1.0 - p10; }
    double p11() const noexcept { return 1.0 - p01; }
    /// P(output | bit).
    double transition(int output, int bit) const noexcept;
};

/// Joint pmf of the channel outputs for bits 0 and 1. Observations are the
/// output tuples in lexicographic order, labelled "[0,1]" style.
RawPmf binary_channel_raw(std::span<const BinaryChannel> channels);
PmfTable binary_channel_pmf(std::span<const BinaryChannel> channels);

/// A problem together with the description it was built from, so it can be
/// written back out unchanged.
struct Scenario {
    std::string name;
    /// Exactly one of channels / table is the source of the pmf.
    std::optional<std::vector<BinaryChannel>> channels;
    std::optional<RawPmf> table;
    // Placeholder so Scenario is default-constructible; loaders overwrite it.
    CriterionSpec criterion = BayesSpec{CostModel::uniform(2)};
    SolveOptions options;

    PmfTable pmf(const PmfOptions& pmf_options = {}) const;
    Problem problem() const;
};

/// Two-channel examples: 1 uses channels (0.4, 0.1) twice with kappa 5;
/// 2 uses (0.3, 0.4) and (0.2, 0.25) with kappa 1.5. Both use the prospect
/// criterion with values v(c00)=3, v(c01)=10, v(c10)=20, v(c11)=7 and equal priors.
Scenario builtin_scenario(int which);
Problem builtin_example(int which);

enum class CriterionKind { Bayes, Minimax, NeymanPearson, RestrictedBayes, Prospect };

/// Columns are normalized exponentials; criterion parameters are drawn from
/// the same stream, so equal seeds give identical problems. CapExceeded when
/// M^n_obs exceeds the enumeration cap.
Scenario random_scenario(std::uint64_t seed, std::size_t num_hypotheses,
                         std::size_t num_observations, CriterionKind kind,
                         std::uint64_t cap = kDefaultEnumerationCap);
Problem random_problem(std::uint64_t seed, std::size_t num_hypotheses, std::size_t num_observations,
                       CriterionKind kind);

} // namespace hypotest
