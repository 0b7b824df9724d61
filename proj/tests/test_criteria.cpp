#include "doctest.h"

#include <limits>
#include <random>

#include "hypotest/criteria.hpp"
#include "hypotest/errors.hpp"
#include "hypotest/rules.hpp"
#include "support.hpp"

using namespace hypotest;

TEST_CASE("cost model validation") {
    CHECK_NOTHROW(CostModel({0.5, 0.5}, {{0, 1}, {1, 0}}));
    CHECK_THROWS_AS(CostModel({0.6, 0.5}, {{0, 1}, {1, 0}}), Error);
    CHECK_THROWS_AS(CostModel({0.5, 0.5}, {{0, 1}}), Error);
    CHECK_THROWS_AS(CostModel({0.5, 0.5}, {{0, std::nan("")}, {1, 0}}), Error);
    const CostModel u = CostModel::uniform(3);
    CHECK(u.prior(2) == doctest::Approx(1.0 / 3));
    CHECK(u.cost(1, 2) == 1.0);
    CHECK(u.cost(2, 2) == 0.0);
}

TEST_CASE("risks by direct expansion") {
    const CostModel cost({0.2, 0.3, 0.5}, {{0.0, 2.0, 1.0}, {3.0, 0.5, 1.5}, {1.0, 4.0, 0.2}});
    std::mt19937_64 rng(41);
    const auto f = oracle::random_pmf(rng, 3, 4);
    const PmfTable t = table_of(f);
    const std::vector<std::size_t> a{0, 2, 1, 2};
    const ErrorVector p = error_vector(DeterministicRule(3, a), t);
    const auto conf = oracle::confusion(f, a);
    double bayes = 0.0;
    const auto risks = conditional_risks(p, cost);
    for (std::size_t j = 0; j < 3; ++j) {
        double r = 0.0;
        for (std::size_t i = 0; i < 3; ++i) r += cost.cost(i, j) * conf[i][j];
        CHECK(risks[j] == doctest::Approx(r).epsilon(1e-13));
        bayes += cost.prior(j) * r;
    }
    CHECK(bayes_risk(p, cost) == doctest::Approx(bayes).epsilon(1e-13));
}

TEST_CASE("cost weights give the Bayes rule") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> u(0.0, 3.0);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t m = 2 + trial % 2;
        const auto f = oracle::random_pmf(rng, m, 3);
        const PmfTable t = table_of(f);
        std::vector<std::vector<double>> c(m, std::vector<double>(m));
        for (auto& row : c) {
            for (double& x : row) x = u(rng);
        }
        std::vector<double> pri(m, 1.0 / static_cast<double>(m));
        const CostModel cost(pri, c);
        const DeterministicRule r = rule_from_weights(weights_from_cost(cost), t);
        double best = INFINITY;
        for (const auto& a : oracle::all_assignments(m, 3)) {
            best = std::min(best, bayes_risk(error_vector(DeterministicRule(m, a), t), cost));
        }
        CHECK(bayes_risk(error_vector(r, t), cost) <= best + 1e-12);
    }
}

TEST_CASE("probability weighting") {
    CHECK(weight_function(0.0, 5.0) == 0.0);
    CHECK(weight_function(1.0, 5.0) == 1.0);
    CHECK(weight_function(-0.2, 2.0) == 0.0);
    CHECK(weight_function(1.3, 2.0) == 1.0);
    CHECK(weight_function(0.3, 1.0) == doctest::Approx(0.3));
    for (double p : {0.01, 0.2, 0.5, 0.9}) {
        CHECK(weight_function(p, 1.5) == doctest::Approx(oracle::distort(p, 1.5)).epsilon(1e-14));
    }
    try {
        (void)weight_function(0.5, 0.0);
        FAIL("kappa 0 accepted");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NonPositiveKappa);
    }
}

TEST_CASE("prospect objective written out for two hypotheses") {
    const ProspectParams params{{0.5, 0.5}, {{3, 10}, {20, 7}}, 5.0};
    for (auto [p10, p01] : {std::pair{0.16, 0.19}, {0.0, 1.0}, {0.3, 0.4}, {1.0, 0.0}}) {
        const double expected = oracle::prospect_binary(p10, p01, 0.5, 0.5, params.values, 5.0);
        CHECK(prospect_objective(ErrorVector(2, {p10, p01}), params) ==
              doctest::Approx(expected).epsilon(1e-14));
    }
    // Best single rule of the first channel example.
    CHECK(prospect_objective(ErrorVector(2, {0.16, 0.19}), params) == doctest::Approx(0.190086).epsilon(1e-5));
    ProspectParams bad = params;
    bad.kappa = -1;
    CHECK_THROWS_AS(prospect_criterion(bad), Error);
}

TEST_CASE("declared linearity is checked") {
    CriterionFunction fake{"fake", [](const ErrorVector& p) { return p[0] * p[0]; }, Curvature::Linear};
    CHECK_THROWS_AS(custom_criterion(2, fake), Error);
    CriterionFunction honest{"lin", [](const ErrorVector& p) { return 2 * p[0] - p[1] + 1; }, Curvature::Linear};
    CHECK_NOTHROW(custom_criterion(2, honest));
}

TEST_CASE("builder metadata") {
    const CostModel u = CostModel::uniform(2);
    const Criterion b = bayes_criterion(u);
    CHECK(b.objective_concave_or_linear());
    CHECK(b.constraint_count() == 0);

    const Criterion mm = minimax_criterion(u);
    CHECK_FALSE(mm.objective_concave_or_linear());
    CHECK(mm.objective(ErrorVector(2, {0.2, 0.3})) == doctest::Approx(0.3));

    const Criterion np = neyman_pearson_criterion(0.05);
    CHECK(np.constraint_count() == 1);
    CHECK(np.constraints_linear());
    CHECK(np.objective(ErrorVector(2, {0.01, 0.7})) == doctest::Approx(0.7));
    CHECK(np.feasible(ErrorVector(2, {0.05, 0.7})));
    CHECK_FALSE(np.feasible(ErrorVector(2, {0.06, 0.7})));
    CHECK_THROWS_AS(neyman_pearson_criterion(-0.1), Error);

    const Criterion rb = restricted_bayes_criterion(u, 0.2);
    CHECK(rb.risk_cap().has_value());
    CHECK_FALSE(rb.constraints_linear());
    CHECK(rb.feasible(ErrorVector(2, {0.1, 0.2})));
    CHECK_FALSE(rb.feasible(ErrorVector(2, {0.1, 0.3})));
    const Criterion open = restricted_bayes_criterion(u, std::numeric_limits<double>::infinity());
    CHECK(open.feasible(ErrorVector(2, {1.0, 1.0})));
    CHECK_THROWS_AS(restricted_bayes_criterion(u, std::nan("")), Error);

    CHECK(criterion_kind(BayesSpec{u}) == "bayes");
    CHECK(criterion_kind(NeymanPearsonSpec{0.1}) == "neyman_pearson");
    CHECK(criterion_kind(ProspectSpec{{{0.5, 0.5}, {{3, 10}, {20, 7}}, 5}}) == "prospect");
}

TEST_CASE("custom linear spec with an equality") {
    LinearCustomSpec spec;
    spec.num_hypotheses = 2;
    spec.objective = {{0.0, 1.0}, 0.0};
    spec.equalities = {{{1.0, 0.0}, -0.1}};
    const Criterion c = make_criterion(spec);
    CHECK(c.constraints_linear());
    CHECK(c.feasible(ErrorVector(2, {0.1, 0.5})));
    CHECK_FALSE(c.feasible(ErrorVector(2, {0.2, 0.5})));
    spec.objective.coefficients = {1.0};
    CHECK_THROWS_AS(make_criterion(spec), Error);
}
