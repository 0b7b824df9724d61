// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>

#include "hypotest/optimizer.hpp"
#include "hypotest/region.hpp"
#include "hypotest/rules.hpp"
#include "hypotest/scenarios.hpp"
#include "support.hpp"

using namespace hypotest;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int failures = 0;

void verdict(int id, bool pass, const std::string& detail) {
    std::printf("%s criterion %d: %s\n", pass ? "PASS" : "FAIL", id, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++failures;
}

std::string fmt(const char* f, double a) {
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

bool near(double x, double ref, double tol) { return std::abs(x - ref) <= tol; }

// Criterion 1 and 2 share the shape: vertex count plus k = 1, 2, 3 objectives.
struct ExampleResult {
    std::size_t vertices;
    double k1, k2, k3;
    double seconds;
};

ExampleResult run_example(int which) {
    const auto t0 = Clock::now();
    const Problem p = builtin_example(which);
    const Region region = vertex_set(p.table);
    ExampleResult r{region.size(), best_deterministic(region, p.criterion, p.options).objective,
                    best_mixture(region, p.criterion, 2, p.options).objective,
                    best_mixture(region, p.criterion, 3, p.options).objective, 0.0};
    r.seconds = seconds_since(t0);
    return r;
}

std::string describe(const ExampleResult& r) {
    return "vertices=" + std::to_string(r.vertices) + fmt(" k1=%.6f", r.k1) + fmt(" k2=%.6f", r.k2) +
           fmt(" k3=%.6f", r.k3) + fmt(" time=%.2fs", r.seconds);
}

void criterion1() {
    const ExampleResult r = run_example(1);
    const bool ok = r.vertices == 6 && near(r.k1, 0.1901, 5e-4) && near(r.k2, 0.0422, 1.5e-3) &&
                    near(r.k3, 0.0400, 1.5e-3) && r.k3 < r.k2 && r.k2 < r.k1 && r.seconds < 10.0;
    verdict(1, ok, describe(r));
}

void criterion2() {
    const ExampleResult r = run_example(2);
    const bool ok = r.vertices == 8 && near(r.k1, 3.9278, 5e-3) && near(r.k2, 3.8432, 5e-3) &&
                    near(r.k3, 3.8432, 5e-3) && std::abs(r.k2 - r.k3) <= 1e-3 && r.seconds < 10.0;
    verdict(2, ok, describe(r));
}

void criterion3() {
    const auto t0 = Clock::now();
    double worst = 0.0;
    int cases = 0;
    auto check = [&](const PmfTable& table, const Criterion& c, const SolveOptions& o) {
        const Region region = vertex_set(table);
        const double got = solve(region, c, o).objective;
        const double grid = brute_force_oracle(region, c, 200).objective;
        worst = std::max(worst, std::abs(got - grid));
        ++cases;
    };
    for (int which : {1, 2}) {
        const Problem p = builtin_example(which);
        check(p.table, p.criterion, p.options);
        check(p.table, minimax_criterion(CostModel::uniform(2)), p.options);
    }
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::size_t n = 2 + seed % 4;
        for (auto kind : {CriterionKind::Prospect, CriterionKind::Minimax}) {
            const Problem p = random_problem(seed, 2, n, kind);
            check(p.table, p.criterion, p.options);
        }
    }
    const double secs = seconds_since(t0);
    verdict(3, worst <= 2e-3 && secs < 120.0,
            std::to_string(cases) + " cases" + fmt(", max |solve - oracle| = %.3g", worst) +
                fmt(", time=%.1fs", secs));
}

void criterion4() {
    std::mt19937_64 rng(404);
    std::cauchy_distribution<double> cauchy;
    double worst = 0.0;
    for (int problem = 0; problem < 10; ++problem) {
        const std::size_t m = problem < 5 ? 2 : 3;
        const std::size_t n = m == 2 ? 3 + problem % 3 : 2 + problem % 2;
        const auto f = oracle::random_pmf(rng, m, n);
        const PmfTable t = table_of(f);
        const auto rules = oracle::all_assignments(m, n);
        std::vector<std::vector<double>> points;
        for (const auto& a : rules) points.push_back(oracle::error_point(f, a));
        for (int w = 0; w < 1000; ++w) {
            std::vector<double> v(pair_count(m));
            for (double& x : v) x = cauchy(rng);
            double best = INFINITY;
            for (const auto& p : points) best = std::min(best, oracle::dot(v, p));
            const DeterministicRule r = rule_from_weights(WeightVector(m, v), t);
            const double got = oracle::dot(v, oracle::error_point(f, {r.assignment().begin(), r.assignment().end()}));
            worst = std::max(worst, (got - best) / std::max(1.0, std::abs(best)));
        }
    }
    verdict(4, worst <= 1e-9, fmt("10 problems x 1000 weights, max relative excess = %.3g", worst));
}

void criterion5() {
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0.0;
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t m = 2 + trial % 3;
        const std::size_t n = 2 + trial % 5;
        const auto f = oracle::random_pmf(rng, m, n);
        const PmfTable t = table_of(f);
        const std::size_t parts = 1 + trial % 6;
        std::vector<double> theta(parts);
        double s = 0.0;
        for (double& x : theta) s += (x = u(rng) + 1e-3);
        for (double& x : theta) x /= s;
        std::vector<MixtureComponent> comps;
        std::vector<double> expected(pair_count(m), 0.0);
        for (std::size_t k = 0; k < parts; ++k) {
            oracle::Assignment a(n);
            for (auto& x : a) x = static_cast<std::size_t>(u(rng) * static_cast<double>(m)) % m;
            comps.push_back({theta[k], DeterministicRule(m, a)});
            const auto p = oracle::error_point(f, a);
            for (std::size_t i = 0; i < p.size(); ++i) expected[i] += theta[k] * p[i];
        }
        const ErrorVector got = mixture_error_vector(MixtureRule(comps), t);
        worst = std::max(worst, max_gap(values_of(got), expected));
    }
    verdict(5, worst <= 1e-12, fmt("1000 mixtures, max componentwise error = %.3g", worst));
}

void criterion6() {
    std::mt19937_64 rng(606);
    std::uniform_real_distribution<double> u(0.2, 0.8);
    double worst = 0.0;
    bool counts_match = true;
    for (int problem = 0; problem < 20; ++problem) {
        const std::size_t m = 2 + problem % 2;
        const std::size_t base = m == 2 ? 3 + problem % 2 : 2;
        auto f = oracle::random_pmf(rng, m, base);
        // Split observations into proportional pieces: same direction, more labels.
        const std::size_t splits = m == 2 ? 2 : 1;
        for (std::size_t s = 0; s < splits; ++s) {
            const std::size_t y = s % base;
            const double share = u(rng);
            for (auto& col : f) {
                col.push_back(col[y] * (1.0 - share));
                col[y] *= share;
            }
        }
        const PmfTable t = table_of(f);
        const MergeResult merged = merge_equivalent_observations(t);
        if (merged.table.num_observations() != base) counts_match = false;
        const Region a = vertex_set(t);
        const Region b = vertex_set(merged.table);
        if (a.size() != b.size()) {
            worst = INFINITY;
            continue;
        }
        auto directed = [](const Region& x, const Region& y) {
            double d = 0.0;
            for (const auto& p : x.vertices) {
                double best = INFINITY;
                for (const auto& q : y.vertices) best = std::min(best, max_abs_difference(p, q));
                d = std::max(d, best);
            }
            return d;
        };
        worst = std::max({worst, directed(a, b), directed(b, a)});
    }
    verdict(6, worst <= 1e-9 && counts_match,
            fmt("20 problems, max vertex distance = %.3g", worst) +
                (counts_match ? "" : ", merge missed a duplicated direction"));
}

void criterion7() {
    const PmfTable t = validate_pmf(RawPmf{{"y1", "y2", "y3"}, {{0.6, 0.3, 0.1}, {0.1, 0.3, 0.6}}});
    const SolveReport r = solve(vertex_set(t), neyman_pearson_criterion(0.05));
    const bool ok = near(r.error_vector[0], 0.05, 1e-9) && near(r.error_vector[1], 0.7, 1e-9) &&
                    r.bound_used == 2;
    verdict(7, ok, fmt("p = (%.12f, ", r.error_vector[0]) + fmt("%.12f)", r.error_vector[1]) +
                       ", bound_used=" + std::to_string(r.bound_used));
}

void criterion8() {
    double worst = 0.0;
    bool single = true;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const std::size_t m = 2 + seed % 2;
        const std::size_t n = m == 2 ? 3 + seed % 4 : 2 + seed % 3;
        const Scenario s = random_scenario(800 + seed, m, n, CriterionKind::Bayes);
        const PmfTable t = s.pmf();
        const CostModel& cost = std::get<BayesSpec>(s.criterion).cost;
        const SolveReport r = solve(vertex_set(t), bayes_criterion(cost));
        single = single && r.vertices.size() == 1 && r.bound_used == 1;
        double best = INFINITY;
        for (const auto& a : oracle::all_assignments(m, n)) {
            best = std::min(best, bayes_risk(error_vector(DeterministicRule(m, a), t), cost));
        }
        worst = std::max(worst, std::abs(r.objective - best));
    }
    verdict(8, single && worst <= 1e-9,
            fmt("20 problems, max |solve - enumeration| = %.3g", worst) +
                (single ? ", all single-rule" : ", a multi-rule answer was returned"));
}

void criterion9() {
    const auto t0 = Clock::now();
    double worst = -INFINITY;
    int cases = 0;
    auto check = [&](const PmfTable& table, const Criterion& c) {
        const Region region = vertex_set(table);
        const std::size_t bound = region.dim() + 1;
        SolveOptions o;
        const double at_bound = best_mixture(region, c, bound, o).objective;
        for (std::size_t k = bound + 1; k <= std::min<std::size_t>(region.size(), bound + 2); ++k) {
            worst = std::max(worst, at_bound - best_mixture(region, c, k, o).objective);
        }
        // Grid over the full vertex set with no limit on support size.
        OracleOptions full;
        full.support_limit = region.size();
        std::size_t g = 200;
        while (oracle_grid_size(region.size(), g, region.size()) > 20'000'000) g -= g > 40 ? 20 : 1;
        worst = std::max(worst, at_bound - brute_force_oracle(region, c, g, full).objective);
        ++cases;
    };
    for (int which : {1, 2}) {
        const Problem p = builtin_example(which);
        check(p.table, p.criterion);
    }
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        for (auto kind : {CriterionKind::Prospect, CriterionKind::Minimax}) {
            const Problem p = random_problem(900 + seed, 2, 2 + seed % 3, kind);
            check(p.table, p.criterion);
        }
    }
    for (std::uint64_t seed = 1; seed <= 2; ++seed) {
        const Problem p = random_problem(950 + seed, 3, 2, CriterionKind::Minimax);
        check(p.table, p.criterion);
    }
    verdict(9, worst <= 1e-9,
            std::to_string(cases) + " problems" +
                fmt(", largest improvement beyond M(M-1)+1 = %.3g", std::max(worst, 0.0)) +
                fmt(", time=%.1fs", seconds_since(t0)));
}

void guarded(int id, const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        verdict(id, false, std::string("exception: ") + e.what());
    }
}

} // namespace

int main() {
    guarded(1, criterion1);
    guarded(2, criterion2);
    guarded(3, criterion3);
    guarded(4, criterion4);
    guarded(5, criterion5);
    guarded(6, criterion6);
    guarded(7, criterion7);
    guarded(8, criterion8);
    guarded(9, criterion9);
    return failures == 0 ? 0 : 1;
}
