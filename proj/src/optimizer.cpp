#include "hypotest/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>

namespace hypotest {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b) {
    return a > std::numeric_limits<std::uint64_t>::max() - b
               ? std::numeric_limits<std::uint64_t>::max()
               : a + b;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > std::numeric_limits<std::uint64_t>::max() / a) {
        return std::numeric_limits<std::uint64_t>::max();
    }
    return a * b;
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
    if (k > n) return 0;
    k = std::min(k, n - k);
    std::uint64_t result = 1;
    for (std::uint64_t i = 1; i <= k; ++i) {
        // result * (n - k + i) / i stays integral at every step
        const std::uint64_t num = n - k + i;
        const std::uint64_t g = std::gcd(result, i);
        const std::uint64_t r = result / g;
        const std::uint64_t d = i / g;
        result = saturating_mul(r, num / d);
        if (result == std::numeric_limits<std::uint64_t>::max()) return result;
    }
    return result;
}

bool next_combination(std::vector<std::size_t>& subset, std::size_t n) {
    const std::size_t size = subset.size();
    std::size_t i = size;
    while (i > 0 && subset[i - 1] == n - size + i - 1) --i;
    if (i == 0) return false;
    ++subset[i - 1];
    for (std::size_t j = i; j < size; ++j) subset[j] = subset[j - 1] + 1;
    return true;
}

// Calls fn(parts) for every way of writing `total` as `count` parts, each at
// least `minimum`, in lexicographic order.
void for_each_composition(std::size_t total, std::size_t count, std::size_t minimum,
                          const std::function<void(const std::vector<std::size_t>&)>& fn) {
    if (count == 0 || total < count * minimum) return;
    std::vector<std::size_t> parts(count, minimum);
    std::function<void(std::size_t, std::size_t)> rec = [&](std::size_t slot, std::size_t left) {
        if (slot + 1 == count) {
            parts[slot] = left;
            fn(parts);
            return;
        }
        const std::size_t reserve = (count - slot - 1) * minimum;
        for (std::size_t v = minimum; v + reserve <= left; ++v) {
            parts[slot] = v;
            rec(slot + 1, left - v);
        }
    };
    rec(0, total);
}

struct Candidate {
    double objective = kInf;
    std::vector<std::size_t> vertices;
    std::vector<double> coefficients;
};

struct NelderMeadResult {
    std::vector<double> x;
    double value;
    std::uint64_t iterations;
};

NelderMeadResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                             std::vector<double> start, double step, double xtol, double ftol,
                             std::uint64_t max_iterations) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> pts(n + 1, start);
    for (std::size_t i = 0; i < n; ++i) pts[i + 1][i] += step;
    std::vector<double> vals(n + 1);
    for (std::size_t i = 0; i <= n; ++i) vals[i] = f(pts[i]);

    std::vector<std::size_t> order(n + 1);
    std::uint64_t it = 0;
    for (; it < max_iterations; ++it) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        double spread = 0.0;
        for (std::size_t i = 0; i <= n; ++i) {
            for (std::size_t d = 0; d < n; ++d) {
                spread = std::max(spread, std::abs(pts[i][d] - pts[best][d]));
            }
        }
        if (spread < xtol && vals[worst] - vals[best] < ftol) break;
        if (spread < 1e-15) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t d = 0; d < n; ++d) centroid[d] += pts[order[i]][d] / static_cast<double>(n);
        }
        auto along = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t d = 0; d < n; ++d) x[d] = centroid[d] + t * (pts[worst][d] - centroid[d]);
            return x;
        };

        auto reflected = along(-1.0);
        const double fr = f(reflected);
        if (fr < vals[best]) {
            auto expanded = along(-2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                pts[worst] = std::move(expanded);
                vals[worst] = fe;
            } else {
                pts[worst] = std::move(reflected);
                vals[worst] = fr;
            }
            continue;
        }
        if (fr < vals[second]) {
            pts[worst] = std::move(reflected);
            vals[worst] = fr;
            continue;
        }
        auto contracted = fr < vals[worst] ? along(-0.5) : along(0.5);
        const double fc = f(contracted);
        if (fc < std::min(fr, vals[worst])) {
            pts[worst] = std::move(contracted);
            vals[worst] = fc;
            continue;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best) continue;
            for (std::size_t d = 0; d < n; ++d) pts[i][d] = pts[best][d] + 0.5 * (pts[i][d] - pts[best][d]);
            vals[i] = f(pts[i]);
        }
    }
    const auto best = static_cast<std::size_t>(
        std::min_element(vals.begin(), vals.end()) - vals.begin());
    return {pts[best], vals[best], it};
}

// Minimizes f on [lo, hi] assuming one basin; returns (t, f(t)).
std::pair<double, double> golden_section(const std::function<double(double)>& f, double lo,
                                         double hi, std::uint64_t& iterations) {
    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - ratio * (b - a);
    double d = a + ratio * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > 1e-13) {
        ++iterations;
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = f(d);
        }
    }
    return fc <= fd ? std::make_pair(c, fc) : std::make_pair(d, fd);
}

class MixtureSearch {
public:
    MixtureSearch(const Region& region, const Criterion& criterion, const SolveOptions& options)
        : region_(region), criterion_(criterion), options_(options) {}

    std::uint64_t iterations() const noexcept { return iterations_; }

    Candidate optimize(const std::vector<std::size_t>& subset) {
        switch (subset.size()) {
            case 1: {
                const double v = value(subset, std::vector<double>{1.0});
                return {v, subset, {1.0}};
            }
            case 2: return segment(subset);
            default: return simplex(subset);
        }
    }

    ErrorVector point(const std::vector<std::size_t>& subset,
                      const std::vector<double>& coefficients) const {
        ErrorVector p = ErrorVector::zeros(region_.num_hypotheses);
        for (std::size_t k = 0; k < subset.size(); ++k) {
            const auto& v = region_.vertices[subset[k]];
            for (std::size_t t = 0; t < p.size(); ++t) p[t] += coefficients[k] * v[t];
        }
        return p;
    }

    bool feasible(const ErrorVector& p) const { return criterion_.feasible(p, options_.ineq_tol); }

    /// Objective, or +inf outside the feasible set.
    double value(const std::vector<std::size_t>& subset, const std::vector<double>& coefficients) {
        const ErrorVector p = point(subset, coefficients);
        if (!feasible(p)) return kInf;
        const double v = criterion_.objective(p);
        return std::isnan(v) ? kInf : v;
    }

private:
    Candidate segment(const std::vector<std::size_t>& subset) {
        auto coef = [](double t) { return std::vector<double>{1.0 - t, t}; };
        auto at = [&](double t) { return point(subset, coef(t)); };
        auto objective = [&](double t) { return value(subset, coef(t)); };
        auto is_feasible = [&](double t) { return feasible(at(t)); };

        const std::size_t grid = std::max<std::size_t>(8, 4 * options_.grid_steps);
        std::vector<double> ts(grid + 1);
        std::vector<double> vals(grid + 1);
        std::vector<bool> ok(grid + 1);
        for (std::size_t i = 0; i <= grid; ++i) {
            ts[i] = static_cast<double>(i) / static_cast<double>(grid);
            ok[i] = is_feasible(ts[i]);
            vals[i] = ok[i] ? objective(ts[i]) : kInf;
        }

        std::vector<double> candidates;
        // Boundary of the feasible set between a feasible and an infeasible sample.
        auto edge = [&](double good, double bad) {
            for (int step = 0; step < 100 && std::abs(good - bad) > 1e-17; ++step) {
                const double mid = 0.5 * (good + bad);
                (is_feasible(mid) ? good : bad) = mid;
            }
            return good;
        };

        std::size_t i = 0;
        while (i <= grid) {
            if (!ok[i]) {
                ++i;
                continue;
            }
            std::size_t j = i;
            while (j + 1 <= grid && ok[j + 1]) ++j;
            const double lo = i > 0 ? edge(ts[i], ts[i - 1]) : ts[i];
            const double hi = j < grid ? edge(ts[j], ts[j + 1]) : ts[j];
            candidates.push_back(lo);
            candidates.push_back(hi);

            // Refine around the best few local minima of the run.
            std::vector<std::size_t> minima;
            for (std::size_t q = i; q <= j; ++q) {
                const bool left = q == i || vals[q] <= vals[q - 1];
                const bool right = q == j || vals[q] <= vals[q + 1];
                if (left && right) minima.push_back(q);
            }
            std::stable_sort(minima.begin(), minima.end(),
                             [&](std::size_t a, std::size_t b) { return vals[a] < vals[b]; });
            if (minima.size() > options_.starts) minima.resize(options_.starts);
            for (std::size_t q : minima) {
                const double a = q > i ? ts[q - 1] : lo;
                const double b = q < j ? ts[q + 1] : hi;
                candidates.push_back(golden_section(objective, a, b, iterations_).first);
            }
            i = j + 1;
        }

        // Equality constraints are met at isolated points; locate sign changes.
        for (const auto& h : criterion_.equalities()) {
            std::vector<double> hv(grid + 1);
            for (std::size_t q = 0; q <= grid; ++q) hv[q] = h.eval(at(ts[q]));
            for (std::size_t q = 0; q < grid; ++q) {
                if (hv[q] == 0.0) candidates.push_back(ts[q]);
                if ((hv[q] < 0.0) == (hv[q + 1] < 0.0) || hv[q + 1] == 0.0) continue;
                double a = ts[q];
                double b = ts[q + 1];
                const bool a_negative = hv[q] < 0.0;
                for (int step = 0; step < 100 && b - a > 1e-17; ++step) {
                    const double mid = 0.5 * (a + b);
                    ((h.eval(at(mid)) < 0.0) == a_negative ? a : b) = mid;
                }
                candidates.push_back(a);
                candidates.push_back(b);
            }
            if (hv[grid] == 0.0) candidates.push_back(ts[grid]);
        }

        Candidate best;
        for (double t : candidates) {
            const double v = objective(t);
            if (v < best.objective) best = {v, subset, coef(t)};
        }
        return best;
    }

    Candidate simplex(const std::vector<std::size_t>& subset) {
        const std::size_t s = subset.size();
        std::size_t resolution = std::max<std::size_t>(1, options_.grid_steps);
        while (resolution > 1 && binomial(resolution + s - 1, s - 1) > options_.seed_budget) {
            --resolution;
        }

        auto coefficients = [s](const std::vector<double>& u) {
            std::vector<double> c(s);
            double rest = 1.0;
            for (std::size_t d = 0; d + 1 < s; ++d) {
                c[d] = u[d];
                rest -= u[d];
            }
            c[s - 1] = rest;
            return c;
        };
        auto objective = [&](const std::vector<double>& u) {
            const auto c = coefficients(u);
            for (double x : c) {
                if (x < 0.0) return kInf;
            }
            return value(subset, c);
        };

        struct Seed {
            double value;
            std::vector<double> u;
        };
        std::vector<Seed> seeds;
        for_each_composition(resolution, s, 0, [&](const std::vector<std::size_t>& parts) {
            std::vector<double> u(s - 1);
            for (std::size_t d = 0; d + 1 < s; ++d) {
                u[d] = static_cast<double>(parts[d]) / static_cast<double>(resolution);
            }
            const double v = objective(u);
            if (v < kInf) seeds.push_back({v, std::move(u)});
        });
        std::stable_sort(seeds.begin(), seeds.end(),
                         [](const Seed& a, const Seed& b) { return a.value < b.value; });
        if (seeds.size() > options_.starts) seeds.resize(options_.starts);

        Candidate best;
        const double step = 1.0 / static_cast<double>(resolution);
        for (const auto& seed : seeds) {
            auto result = nelder_mead(objective, seed.u, step, options_.coefficient_tol,
                                      options_.objective_tol, 2000 * s);
            iterations_ += result.iterations;
            if (result.value < best.objective) {
                best = {result.value, subset, coefficients(result.x)};
            }
        }
        return best;
    }

    const Region& region_;
    const Criterion& criterion_;
    const SolveOptions& options_;
    std::uint64_t iterations_ = 0;
};

SolveReport make_report(const Region& region, const Criterion& criterion,
                        std::vector<std::size_t> vertices, std::vector<double> coefficients,
                        const SolveOptions& options) {
    // Drop components that only hold rounding drift and renormalize the rest.
    std::vector<std::size_t> kept;
    std::vector<double> weights;
    double sum = 0.0;
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        const double c = coefficients[k] < 1e-15 ? 0.0 : coefficients[k];
        if (c == 0.0) continue;
        kept.push_back(vertices[k]);
        weights.push_back(c);
        sum += c;
    }
    for (double& c : weights) c /= sum;

    std::vector<MixtureComponent> components;
    ErrorVector p = ErrorVector::zeros(region.num_hypotheses);
    for (std::size_t k = 0; k < kept.size(); ++k) {
        components.push_back({weights[k], region.provenance.at(kept[k])});
        const auto& v = region.vertices[kept[k]];
        for (std::size_t t = 0; t < p.size(); ++t) p[t] += weights[k] * v[t];
    }

    SolveReport report{MixtureRule(std::move(components)), std::move(kept), std::move(weights), p,
                       criterion.objective(p), criterion.inequality_values(p),
                       criterion.equality_values(p), criterion.feasible(p, options.ineq_tol),
                       0, 0, false, 0, {}, 0};
    report.seed = options.seed;
    return report;
}

bool improves(double candidate, double incumbent) {
    if (incumbent == kInf) return candidate < kInf;
    return candidate < incumbent - 1e-12 * std::max(1.0, std::abs(incumbent));
}

double alpha_floor(const Region& region, const CostModel& cost, const SolveOptions& options) {
    // Minimax optima are extreme points of the region cut by M risk
    // constraints, so M + 1 rules always suffice.
    SolveOptions opts = options;
    opts.k = std::min(region.num_hypotheses + 1, region.dim() + 1);
    return solve(region, minimax_criterion(cost), opts).objective;
}

} // namespace

SolveReport best_deterministic(const Region& region, const Criterion& criterion,
                               const SolveOptions& options) {
    if (region.vertices.empty()) throw Error(ErrorKind::InvalidSpec, "region has no vertices");
    MixtureSearch search(region, criterion, options);
    std::optional<std::size_t> best;
    double best_value = kInf;
    for (std::size_t k = 0; k < region.size(); ++k) {
        const double v = search.value({k}, {1.0});
        if (improves(v, best_value)) {
            best = k;
            best_value = v;
        }
    }
    if (!best) throw Error(ErrorKind::NoFeasibleVertex, "no vertex satisfies the constraints");
    SolveReport report = make_report(region, criterion, {*best}, {1.0}, options);
    report.subsets_examined = region.size();
    report.bound_used = 1;
    report.bound_rationale = "deterministic rules only";
    return report;
}

SolveReport best_mixture(const Region& region, const Criterion& criterion, std::size_t k,
                         const SolveOptions& options) {
    if (k == 0) throw Error(ErrorKind::InvalidSpec, "mixture size must be at least 1");
    if (region.vertices.empty()) throw Error(ErrorKind::InvalidSpec, "region has no vertices");
    const std::size_t nv = region.size();
    const std::size_t max_size = std::min(k, nv);

    MixtureSearch search(region, criterion, options);
    Candidate best;
    std::uint64_t examined = 0;
    bool exceeded = false;

    auto consider = [&](const std::vector<std::size_t>& subset) {
        ++examined;
        Candidate c = search.optimize(subset);
        if (improves(c.objective, best.objective)) best = std::move(c);
    };

    std::mt19937_64 rng(options.seed);
    for (std::size_t size = 1; size <= max_size; ++size) {
        const std::uint64_t count = binomial(nv, size);
        if (saturating_add(examined, count) <= options.subset_budget) {
            std::vector<std::size_t> subset(size);
            std::iota(subset.begin(), subset.end(), std::size_t{0});
            do {
                consider(subset);
            } while (next_combination(subset, nv));
            continue;
        }
        // Budget cannot cover every subset of this size: seeded random sample.
        exceeded = true;
        std::vector<std::size_t> pool(nv);
        std::iota(pool.begin(), pool.end(), std::size_t{0});
        while (examined < options.subset_budget) {
            for (std::size_t i = 0; i < size; ++i) {
                std::uniform_int_distribution<std::size_t> pick(i, nv - 1);
                std::swap(pool[i], pool[pick(rng)]);
            }
            std::vector<std::size_t> subset(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
            std::sort(subset.begin(), subset.end());
            consider(subset);
        }
        break;
    }

    if (best.objective == kInf) {
        throw Error(ErrorKind::NoFeasibleMixture,
                    "no mixture of at most " + std::to_string(k) + " rules is feasible");
    }
    SolveReport report =
        make_report(region, criterion, std::move(best.vertices), std::move(best.coefficients), options);
    report.subsets_examined = examined;
    report.refinement_iterations = search.iterations();
    report.budget_exceeded = exceeded;
    report.bound_used = k;
    report.bound_rationale = "requested mixture size";
    return report;
}

std::size_t mixture_bound(const Criterion& criterion, std::string* rationale) {
    const std::size_t general = pair_count(criterion.num_hypotheses()) + 1;
    if (criterion.objective_concave_or_linear() && criterion.constraints_linear()) {
        const std::size_t n = criterion.constraint_count();
        if (rationale) {
            *rationale = "concave-or-linear objective with " + std::to_string(n) +
                         " linear constraint(s): an extreme point of the feasible set mixes at "
                         "most n+1 vertices";
        }
        return std::min(general, n + 1);
    }
    if (rationale) *rationale = "general criterion: at most M(M-1)+1 deterministic rules";
    return general;
}

SolveReport solve(const Region& region, const Criterion& criterion, const SolveOptions& options) {
    if (criterion.num_hypotheses() != region.num_hypotheses) {
        throw Error(ErrorKind::DimensionMismatch, "criterion does not match the region");
    }
    if (const auto& cap = criterion.risk_cap()) {
        const double floor = alpha_floor(region, cap->cost, options);
        if (cap->alpha < floor - 1e-9) {
            throw Error(ErrorKind::InvalidSpec,
                        "risk cap is below the minimax risk " + std::to_string(floor),
                        std::nullopt, floor);
        }
    }
    std::string rationale;
    std::size_t k = mixture_bound(criterion, &rationale);
    if (options.k) {
        k = *options.k;
        rationale = "mixture size fixed by caller";
    }
    SolveReport report = best_mixture(region, criterion, k, options);
    report.bound_used = k;
    report.bound_rationale = std::move(rationale);
    return report;
}

SolveReport solve(const Problem& problem) {
    RegionOptions region_options;
    region_options.cap = problem.options.enumeration_cap;
    const Region region = vertex_set(problem.table, region_options);
    return solve(region, problem.criterion, problem.options);
}

std::uint64_t oracle_grid_size(std::size_t num_vertices, std::size_t grid_steps,
                               std::size_t support_limit) {
    std::uint64_t total = 0;
    for (std::size_t s = 1; s <= std::min(support_limit, num_vertices); ++s) {
        if (s > grid_steps) break;
        total = saturating_add(total, saturating_mul(binomial(num_vertices, s),
                                                     binomial(grid_steps - 1, s - 1)));
    }
    return total;
}

SolveReport brute_force_oracle(const Region& region, const Criterion& criterion,
                               std::size_t grid_steps, const OracleOptions& options) {
    if (grid_steps == 0) throw Error(ErrorKind::InvalidSpec, "grid needs at least one step");
    if (region.vertices.empty()) throw Error(ErrorKind::InvalidSpec, "region has no vertices");
    const std::size_t nv = region.size();
    std::size_t limit = options.support_limit == 0 ? region.dim() + 1 : options.support_limit;
    limit = std::min(limit, nv);

    const std::uint64_t count = oracle_grid_size(nv, grid_steps, limit);
    if (count > options.budget) {
        throw Error(ErrorKind::BudgetExceeded,
                    "oracle grid has " + std::to_string(count) + " points, budget is " +
                        std::to_string(options.budget),
                    std::nullopt, static_cast<double>(count));
    }

    SolveOptions opts;
    opts.ineq_tol = options.ineq_tol;
    MixtureSearch search(region, criterion, opts);
    Candidate best;
    std::uint64_t subsets = 0;
    std::uint64_t points = 0;
    const double g = static_cast<double>(grid_steps);
    for (std::size_t size = 1; size <= std::min(limit, grid_steps); ++size) {
        std::vector<std::size_t> subset(size);
        std::iota(subset.begin(), subset.end(), std::size_t{0});
        std::vector<double> coefficients(size);
        do {
            ++subsets;
            for_each_composition(grid_steps, size, 1, [&](const std::vector<std::size_t>& parts) {
                ++points;
                for (std::size_t q = 0; q < size; ++q) coefficients[q] = static_cast<double>(parts[q]) / g;
                const double v = search.value(subset, coefficients);
                if (improves(v, best.objective)) best = {v, subset, coefficients};
            });
        } while (next_combination(subset, nv));
    }
    if (best.objective == kInf) {
        throw Error(ErrorKind::NoFeasibleMixture, "no grid mixture satisfies the constraints");
    }
    SolveReport report =
        make_report(region, criterion, std::move(best.vertices), std::move(best.coefficients), opts);
    report.subsets_examined = subsets;
    report.refinement_iterations = points;
    report.bound_used = limit;
    report.bound_rationale = "grid oracle, " + std::to_string(grid_steps) + " steps";
    return report;
}

double restricted_bayes_alpha_floor(const PmfTable& table, const CostModel& cost,
                                    const SolveOptions& options) {
    RegionOptions region_options;
    region_options.cap = options.enumeration_cap;
    return alpha_floor(vertex_set(table, region_options), cost, options);
}

} // namespace hypotest
