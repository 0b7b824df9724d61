#include "doctest.h"

#include <random>
#include <set>

#include "hypotest/errors.hpp"
#include "hypotest/rules.hpp"
#include "support.hpp"

using namespace hypotest;

namespace {

WeightVector random_weights(std::mt19937_64& rng, std::size_t m) {
    std::normal_distribution<double> g;
    std::vector<double> w(pair_count(m));
    for (double& x : w) x = g(rng);
    return WeightVector(m, w);
}

} // namespace

TEST_CASE("scores are weighted sums of the other densities") {
    std::mt19937_64 rng(3);
    const auto f = oracle::random_pmf(rng, 3, 4);
    const PmfTable t = table_of(f);
    const WeightVector v = random_weights(rng, 3);
    const ScoreVector s = scores(v, t);
    for (std::size_t y = 0; y < 4; ++y) {
        for (std::size_t i = 0; i < 3; ++i) {
            double expected = 0.0;
            for (std::size_t j = 0; j < 3; ++j) {
                if (j != i) expected += v.at(i, j) * f[j][y];
            }
            CHECK(s.at(y, i) == doctest::Approx(expected).epsilon(1e-14));
        }
    }
}

TEST_CASE("weighted argmin minimizes v.p over every rule") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t m = 2 + trial % 2;
        const std::size_t n = 2 + trial % 4;
        const auto f = oracle::random_pmf(rng, m, n);
        const PmfTable t = table_of(f);
        const WeightVector v = random_weights(rng, m);
        const DeterministicRule r = rule_from_weights(v, t);
        const double got = dot(v, error_vector(r, t));
        CHECK(got <= oracle::min_linear(f, values_of(v)) + 1e-12);
    }
}

TEST_CASE("binary likelihood ratio form") {
    // With v10 = pi0, v01 = pi1 the rule decides H1 exactly where pi1 f1 > pi0 f0.
    const oracle::Matrix f{{0.36, 0.24, 0.24, 0.16}, {0.01, 0.09, 0.09, 0.81}};
    const PmfTable t = table_of(f);
    const DeterministicRule r = rule_from_weights(WeightVector(2, {0.5, 0.5}), t);
    CHECK(std::vector<std::size_t>(r.assignment().begin(), r.assignment().end()) ==
          std::vector<std::size_t>{0, 0, 0, 1});
}

TEST_CASE("tie policies and boundary sets") {
    // Equal weights on a table with f0(y1) = f1(y1): y1 is a tie.
    const PmfTable t = validate_pmf(RawPmf{{"a", "b", "c"}, {{0.6, 0.3, 0.1}, {0.1, 0.3, 0.6}}});
    const WeightVector v(2, {1.0, 1.0});

    CHECK(rule_from_weights(v, t, TiePolicy::lowest_index()).decision(1) == 0);
    CHECK(rule_from_weights(v, t, TiePolicy::highest_index()).decision(1) == 1);
    CHECK(rule_from_weights(v, t, TiePolicy::prefer(1)).decision(1) == 1);
    CHECK(rule_from_weights(v, t, TiePolicy::prefer(0)).decision(0) == 0);

    const BoundaryReport b = boundary_report(v, t);
    CHECK(b.boundary == std::vector<std::size_t>{1});
    CHECK(b.interior == std::vector<std::size_t>{0, 2});
    REQUIRE(b.pairs.size() == 1);
    CHECK(b.pairs[0].observations == std::vector<std::size_t>{1});
    CHECK(b.mass[0] == doctest::Approx(0.3));
    CHECK_FALSE(b.negligible());

    const TieBreakVariants variants = tie_break_variants(v, t);
    CHECK(variants.rules.size() == 2);
    CHECK_FALSE(variants.truncated);
    // Every variant attains the same minimum.
    const double lo = dot(v, error_vector(variants.rules[0], t));
    for (const auto& r : variants.rules) CHECK(dot(v, error_vector(r, t)) == doctest::Approx(lo));

    const BoundaryReport none = boundary_report(WeightVector(2, {1.0, 2.0}), t);
    CHECK(none.boundary.empty());
    CHECK(none.negligible());
    CHECK_THROWS_AS(boundary_report(v, t, -1.0), Error);
}

TEST_CASE("three-way ties multiply variants") {
    const PmfTable t = validate_pmf(RawPmf{{"a", "b"}, {{0.5, 0.5}, {0.5, 0.5}, {0.5, 0.5}}});
    const WeightVector v(3, std::vector<double>(6, 1.0));
    const TieBreakVariants all = tie_break_variants(v, t);
    CHECK(all.rules.size() == 9);
    const TieBreakVariants few = tie_break_variants(v, t, kBoundaryEps, 4);
    CHECK(few.rules.size() == 4);
    CHECK(few.truncated);
}

TEST_CASE("rule enumeration") {
    const PmfTable t = validate_pmf(RawPmf{{"a", "b", "c"}, {{0.2, 0.3, 0.5}, {0.5, 0.3, 0.2}, {0.3, 0.4, 0.3}}});
    DeterministicRuleEnumerator e = enumerate_deterministic_rules(t);
    CHECK(e.count() == 27);
    std::set<std::vector<std::size_t>> seen;
    std::vector<std::size_t> first;
    while (auto r = e.next()) {
        std::vector<std::size_t> a(r->assignment().begin(), r->assignment().end());
        if (seen.empty()) first = a;
        seen.insert(a);
    }
    CHECK(seen.size() == 27);
    CHECK(first == std::vector<std::size_t>{0, 0, 0});

    CHECK(rule_count(2, 10, 1 << 20) == 1024u);
    CHECK_FALSE(rule_count(3, 40, 1 << 20).has_value());
    try {
        DeterministicRuleEnumerator big(3, 20, 1000);
        FAIL("cap not enforced");
    } catch (const Error& err) {
        CHECK(err.kind() == ErrorKind::CapExceeded);
        CHECK(err.value() == doctest::Approx(std::pow(3.0, 20.0)));
    }
}

TEST_CASE("odometer order varies the first observation fastest") {
    DeterministicRuleEnumerator e(2, 2);
    std::vector<std::vector<std::size_t>> seq;
    while (auto r = e.next()) seq.emplace_back(r->assignment().begin(), r->assignment().end());
    CHECK(seq == std::vector<std::vector<std::size_t>>{{0, 0}, {1, 0}, {0, 1}, {1, 1}});
}
