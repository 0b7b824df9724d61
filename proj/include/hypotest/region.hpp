#pragma once
// The achievable set of pairwise error vectors, held as its extreme points.
// Each extreme point remembers the deterministic rule that produces it.

#include <cstddef>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "hypotest/model.hpp"
#include "hypotest/rules.hpp"

namespace hypotest {

struct Region {
    std::size_t num_hypotheses = 0;
    std::vector<ErrorVector> vertices;
    /// provenance[k] produces vertices[k].
    std::vector<DeterministicRule> provenance;
    /// Number of enumerated rules that landed on each vertex (dedup diagnostics).
    std::vector<std::size_t> multiplicity;
    double dedup_tol = 1e-10;

    std::size_t dim() const noexcept { return pair_count(num_hypotheses); }
    std::size_t size() const noexcept { return vertices.size(); }
};

struct RegionOptions {
    std::uint64_t cap = kDefaultEnumerationCap;
    double dedup_tol = 1e-10;
    /// L1 residual under which a point counts as a mixture of the others.
    double extreme_tol = 1e-11;
};

Region vertex_set(const PmfTable& table, const RegionOptions& options = {});

/// Region restricted to the listed vertices (in the given order).
Region subregion(const Region& region, std::span<const std::size_t> indices);

struct SupportResult {
    double value;
    std::vector<std::size_t> argmin;
};

SupportResult support_minimize(const Region& region, const WeightVector& v);

struct Inside {
    std::vector<std::size_t> vertices;
    std::vector<double> coefficients;
    double reconstruction_error;
};

struct Outside {
    /// v with v·p_query < min_k v·vertex_k.
    WeightVector normal;
    /// min_k v·vertex_k - v·p_query.
    double gap;
};

using MembershipCertificate = std::variant<Inside, Outside>;

inline constexpr double kMembershipTol = 1e-8;

MembershipCertificate contains(const Region& region, const ErrorVector& p,
                               double tol = kMembershipTol);

struct Decomposition {
    std::vector<std::size_t> vertices;
    std::vector<double> coefficients;
    double reconstruction_error;

    MixtureRule mixture(const Region& region) const;
};

/// kmax = 0 selects dim + 1.
Decomposition decompose(const Region& region, const ErrorVector& p, std::size_t kmax = 0,
                        double tol = kMembershipTol, std::uint64_t subset_budget = 1'000'000);

/// Counterclockwise cycle of vertex indices in the (p10, p01) plane. M = 2 only.
std::vector<std::size_t> hull_polygon_2d(const Region& region);

/// Reduces a convex combination to affinely independent support (at most
/// dim + 1 points) without moving the represented point.
void caratheodory_reduce(std::span<const ErrorVector> points, std::vector<std::size_t>& support,
                         std::vector<double>& coefficients);

} // namespace hypotest
