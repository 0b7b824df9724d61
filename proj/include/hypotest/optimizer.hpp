#pragma once
// Optimal randomized rules: search over mixtures of region vertices with at
// most k components. With k = M(M-1)+1 every achievable error vector is
// reachable, so the search covers the whole region.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hypotest/criteria.hpp"
#include "hypotest/model.hpp"
#include "hypotest/region.hpp"

namespace hypotest {

struct SolveOptions {
    /// Mixture size; nullopt picks the bound from the criterion structure.
    std::optional<std::size_t> k;
    /// Grid resolution used to seed the coefficient search.
    std::size_t grid_steps = 50;
    /// Grid resolution of the brute-force oracle.
    std::size_t oracle_grid_steps = 200;
    std::uint64_t subset_budget = 1'000'000;
    std::uint64_t oracle_budget = 200'000'000;
    /// Upper bound on seed grid points per subset; the resolution is lowered to fit.
    std::size_t seed_budget = 500;
    std::size_t starts = 3;
    std::uint64_t seed = 1;
    double coefficient_tol = 1e-6;
    double objective_tol = 1e-10;
    double ineq_tol = 1e-12;
    std::uint64_t enumeration_cap = kDefaultEnumerationCap;
};

struct Problem {
    PmfTable table;
    Criterion criterion;
    SolveOptions options;
};

struct SolveReport {
    MixtureRule mixture;
    /// Region vertex indices of the mixture components.
    std::vector<std::size_t> vertices;
    std::vector<double> coefficients;
    ErrorVector error_vector;
    double objective;
    std::vector<double> inequality_values;
    std::vector<double> equality_values;
    bool feasible;
    std::uint64_t subsets_examined = 0;
    std::uint64_t refinement_iterations = 0;
    bool budget_exceeded = false;
    std::size_t bound_used = 0;
    std::string bound_rationale;
    std::uint64_t seed = 0;
};

/// Best single vertex (no randomization). Throws NoFeasibleVertex.
SolveReport best_deterministic(const Region& region, const Criterion& criterion,
                               const SolveOptions& options = {});

/// Best mixture of at most k vertices. Throws NoFeasibleMixture; an exhausted
/// subset budget is reported through SolveReport::budget_exceeded.
SolveReport best_mixture(const Region& region, const Criterion& criterion, std::size_t k,
                         const SolveOptions& options = {});

/// k picked by the criterion structure: n + 1 for a concave-or-linear
/// objective with n linear constraints, M(M-1) + 1 otherwise.
std::size_t mixture_bound(const Criterion& criterion, std::string* rationale = nullptr);

SolveReport solve(const Problem& problem);
/// Same as solve() on an already built region.
SolveReport solve(const Region& region, const Criterion& criterion,
                  const SolveOptions& options = {});

struct OracleOptions {
    /// Largest mixture support enumerated; 0 means dim + 1. Every point of the
    /// region is a mixture of at most dim + 1 vertices.
    std::size_t support_limit = 0;
    std::uint64_t budget = 200'000'000;
    double ineq_tol = 1e-12;
};

/// Number of grid mixtures brute_force_oracle evaluates.
std::uint64_t oracle_grid_size(std::size_t num_vertices, std::size_t grid_steps,
                               std::size_t support_limit);

/// Exhaustive evaluation of every mixture with coefficients in {0, 1/g, ..., 1}
/// whose support has at most support_limit vertices. Throws BudgetExceeded.
SolveReport brute_force_oracle(const Region& region, const Criterion& criterion,
                               std::size_t grid_steps, const OracleOptions& options = {});

/// Max conditional risk of the minimax rule; restricted-Bayes caps below it are infeasible.
double restricted_bayes_alpha_floor(const PmfTable& table, const CostModel& cost,
                                    const SolveOptions& options = {});

} // namespace hypotest
