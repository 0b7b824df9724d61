#include "hypotest/region.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <Eigen/Dense>

#include "simplex_lp.hpp"

namespace hypotest {
namespace {

using detail::DenseLp;

void check_dim(const Region& region, const PairVector& x) {
    if (x.num_hypotheses() != region.num_hypotheses) {
        throw Error(ErrorKind::DimensionMismatch, "vector does not match the region dimension");
    }
}

double reconstruction_error(const Region& region, std::span<const std::size_t> support,
                            std::span<const double> coefficients, const ErrorVector& p) {
    double worst = 0.0;
    for (std::size_t t = 0; t < region.dim(); ++t) {
        double x = 0.0;
        for (std::size_t k = 0; k < support.size(); ++k) {
            x += coefficients[k] * region.vertices[support[k]][t];
        }
        worst = std::max(worst, std::abs(x - p[t]));
    }
    return worst;
}

struct L1Fit {
    double residual;
    std::vector<double> lambda;
};

// min ||V lambda - p||_1 over the probability simplex, V restricted to `idx`.
L1Fit l1_fit(const Region& region, std::span<const std::size_t> idx, const ErrorVector& p) {
    const std::size_t nv = idx.size();
    const std::size_t d = region.dim();
    const std::size_t cols = nv + 2 * d;

    DenseLp::Matrix a;
    DenseLp::Vector b;
    a.reserve(2 * d + 2);
    for (std::size_t t = 0; t < d; ++t) {
        DenseLp::Vector row(cols, 0.0);
        for (std::size_t k = 0; k < nv; ++k) row[k] = region.vertices[idx[k]][t];
        row[nv + t] = 1.0;
        row[nv + d + t] = -1.0;
        DenseLp::Vector neg(row);
        for (double& x : neg) x = -x;
        a.push_back(std::move(row));
        b.push_back(p[t]);
        a.push_back(std::move(neg));
        b.push_back(-p[t]);
    }
    DenseLp::Vector sum_row(cols, 0.0);
    std::fill(sum_row.begin(), sum_row.begin() + static_cast<std::ptrdiff_t>(nv), 1.0);
    DenseLp::Vector neg_sum_row(sum_row);
    for (double& x : neg_sum_row) x = -x;
    a.push_back(std::move(sum_row));
    b.push_back(1.0);
    a.push_back(std::move(neg_sum_row));
    b.push_back(-1.0);

    DenseLp::Vector c(cols, 0.0);
    for (std::size_t t = nv; t < cols; ++t) c[t] = -1.0;

    const auto result = DenseLp(a, b, c).solve();
    if (result.status != DenseLp::Status::Optimal) {
        // The program is always feasible and bounded; reaching here means numerical breakdown.
        return {std::numeric_limits<double>::infinity(), {}};
    }
    std::vector<double> lambda(result.x.begin(), result.x.begin() + static_cast<std::ptrdiff_t>(nv));
    return {std::max(0.0, -result.value), std::move(lambda)};
}

// max y·p + z  s.t.  y·V_k + z <= 0 for all k, |y_t| <= 1. Returns v = -y.
WeightVector separating_normal(const Region& region, const ErrorVector& p) {
    const std::size_t nv = region.size();
    const std::size_t d = region.dim();
    const std::size_t cols = 2 * d + 2;  // y+, y-, z+, z-
    const double zbound = static_cast<double>(d) + 1.0;

    DenseLp::Matrix a;
    DenseLp::Vector b;
    for (std::size_t k = 0; k < nv; ++k) {
        DenseLp::Vector row(cols, 0.0);
        for (std::size_t t = 0; t < d; ++t) {
            row[t] = region.vertices[k][t];
            row[d + t] = -region.vertices[k][t];
        }
        row[2 * d] = 1.0;
        row[2 * d + 1] = -1.0;
        a.push_back(std::move(row));
        b.push_back(0.0);
    }
    for (std::size_t t = 0; t < cols; ++t) {
        DenseLp::Vector row(cols, 0.0);
        row[t] = 1.0;
        a.push_back(std::move(row));
        b.push_back(t < 2 * d ? 1.0 : zbound);
    }
    DenseLp::Vector c(cols, 0.0);
    for (std::size_t t = 0; t < d; ++t) {
        c[t] = p[t];
        c[d + t] = -p[t];
    }
    c[2 * d] = 1.0;
    c[2 * d + 1] = -1.0;

    const auto result = DenseLp(a, b, c).solve();
    WeightVector v = WeightVector::zeros(region.num_hypotheses);
    if (result.status == DenseLp::Status::Optimal) {
        for (std::size_t t = 0; t < d; ++t) v[t] = -(result.x[t] - result.x[d + t]);
    }
    return v;
}

double separation_gap(const Region& region, const WeightVector& v, const ErrorVector& p) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& vertex : region.vertices) best = std::min(best, dot(v, vertex));
    return best - dot(v, p);
}

// Least-squares barycentric coordinates of p over the listed vertices.
std::vector<double> barycentric(const Region& region, std::span<const std::size_t> support,
                                const ErrorVector& p) {
    const auto d = static_cast<Eigen::Index>(region.dim());
    const auto s = static_cast<Eigen::Index>(support.size());
    Eigen::MatrixXd a(d + 1, s);
    Eigen::VectorXd rhs(d + 1);
    for (Eigen::Index k = 0; k < s; ++k) {
        for (Eigen::Index t = 0; t < d; ++t) {
            a(t, k) = region.vertices[support[static_cast<std::size_t>(k)]][static_cast<std::size_t>(t)];
        }
        a(d, k) = 1.0;
    }
    for (Eigen::Index t = 0; t < d; ++t) rhs(t) = p[static_cast<std::size_t>(t)];
    rhs(d) = 1.0;
    const Eigen::VectorXd sol = a.colPivHouseholderQr().solve(rhs);
    return {sol.data(), sol.data() + s};
}

// Clamps tiny negative drift, renormalizes; false if materially off the simplex.
bool to_simplex(std::vector<double>& coefficients, double tol = 1e-12) {
    double sum = 0.0;
    for (double& c : coefficients) {
        if (!(c >= -tol)) return false;
        c = std::max(c, 0.0);
        sum += c;
    }
    if (!(sum > 0.0)) return false;
    for (double& c : coefficients) c /= sum;
    return true;
}

void drop_zero_coefficients(std::vector<std::size_t>& support, std::vector<double>& coefficients) {
    std::size_t out = 0;
    for (std::size_t k = 0; k < support.size(); ++k) {
        if (coefficients[k] > 0.0) {
            support[out] = support[k];
            coefficients[out] = coefficients[k];
            ++out;
        }
    }
    support.resize(out);
    coefficients.resize(out);
}

Inside polish(const Region& region, std::vector<std::size_t> support,
              std::vector<double> coefficients, const ErrorVector& p) {
    drop_zero_coefficients(support, coefficients);
    to_simplex(coefficients, std::numeric_limits<double>::infinity());
    caratheodory_reduce(region.vertices, support, coefficients);
    double err = reconstruction_error(region, support, coefficients, p);

    auto refined = barycentric(region, support, p);
    if (to_simplex(refined)) {
        const double refined_err = reconstruction_error(region, support, refined, p);
        if (refined_err < err) {
            coefficients = std::move(refined);
            err = refined_err;
            drop_zero_coefficients(support, coefficients);
        }
    }
    return {std::move(support), std::move(coefficients), err};
}

} // namespace

void caratheodory_reduce(std::span<const ErrorVector> points, std::vector<std::size_t>& support,
                         std::vector<double>& coefficients) {
    if (support.empty()) return;
    const std::size_t d = points[support.front()].size();
    while (support.size() > 1) {
        const auto s = static_cast<Eigen::Index>(support.size());
        Eigen::MatrixXd a(static_cast<Eigen::Index>(d) + 1, s);
        for (Eigen::Index k = 0; k < s; ++k) {
            const auto& x = points[support[static_cast<std::size_t>(k)]];
            for (std::size_t t = 0; t < d; ++t) a(static_cast<Eigen::Index>(t), k) = x[t];
            a(static_cast<Eigen::Index>(d), k) = 1.0;
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
        lu.setThreshold(1e-12);
        if (lu.rank() == s) break;
        Eigen::VectorXd mu = lu.kernel().col(0);
        if (mu.maxCoeff() <= 0.0) mu = -mu;

        // Largest step keeping every coefficient nonnegative; zeroes at least one.
        std::size_t hit = 0;
        double step = std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < support.size(); ++k) {
            const double m = mu(static_cast<Eigen::Index>(k));
            if (m > 1e-15 && coefficients[k] / m < step) {
                step = coefficients[k] / m;
                hit = k;
            }
        }
        for (std::size_t k = 0; k < support.size(); ++k) {
            coefficients[k] = std::max(0.0, coefficients[k] - step * mu(static_cast<Eigen::Index>(k)));
        }
        coefficients[hit] = 0.0;
        drop_zero_coefficients(support, coefficients);
    }
    to_simplex(coefficients, std::numeric_limits<double>::infinity());
}

Region vertex_set(const PmfTable& table, const RegionOptions& options) {
    auto rules = enumerate_deterministic_rules(table, options.cap);

    std::vector<ErrorVector> points;
    std::vector<DeterministicRule> sources;
    points.reserve(rules.count());
    sources.reserve(rules.count());
    while (auto rule = rules.next()) {
        points.push_back(error_vector(*rule, table));
        sources.push_back(std::move(*rule));
    }

    // Dedup: sweep in order of the first coordinate, comparing only against
    // representatives whose first coordinate is within tolerance.
    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t l, std::size_t r) { return points[l][0] < points[r][0]; });
    std::vector<std::size_t> reps;          // enumeration index of each cluster's representative
    std::vector<std::size_t> multiplicity;
    std::vector<std::size_t> rep_by_order;  // reps sorted by first coordinate (append order)
    for (std::size_t idx : order) {
        std::size_t found = reps.size();
        for (auto it = rep_by_order.rbegin(); it != rep_by_order.rend(); ++it) {
            const auto& q = points[reps[*it]];
            if (points[idx][0] - q[0] > options.dedup_tol) break;
            if (max_abs_difference(points[idx], q) <= options.dedup_tol) {
                found = *it;
                break;
            }
        }
        if (found == reps.size()) {
            rep_by_order.push_back(reps.size());
            reps.push_back(idx);
            multiplicity.push_back(1);
        } else {
            reps[found] = std::min(reps[found], idx);
            ++multiplicity[found];
        }
    }

    // Keep clusters in enumeration order so vertex numbering is stable.
    std::vector<std::size_t> cluster(reps.size());
    std::iota(cluster.begin(), cluster.end(), std::size_t{0});
    std::sort(cluster.begin(), cluster.end(),
              [&](std::size_t l, std::size_t r) { return reps[l] < reps[r]; });

    Region candidates;
    candidates.num_hypotheses = table.num_hypotheses();
    candidates.dedup_tol = options.dedup_tol;
    for (std::size_t c : cluster) {
        candidates.vertices.push_back(points[reps[c]]);
        candidates.provenance.push_back(sources[reps[c]]);
        candidates.multiplicity.push_back(multiplicity[c]);
    }

    // A distinct point is extreme iff it is not a mixture of the other points.
    std::vector<std::size_t> keep;
    std::vector<std::size_t> others;
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        others.clear();
        for (std::size_t o = 0; o < candidates.size(); ++o) {
            if (o != k) others.push_back(o);
        }
        if (others.empty() || l1_fit(candidates, others, candidates.vertices[k]).residual >
                                  options.extreme_tol) {
            keep.push_back(k);
        }
    }
    return subregion(candidates, keep);
}

Region subregion(const Region& region, std::span<const std::size_t> indices) {
    Region out;
    out.num_hypotheses = region.num_hypotheses;
    out.dedup_tol = region.dedup_tol;
    for (std::size_t k : indices) {
        out.vertices.push_back(region.vertices.at(k));
        out.provenance.push_back(region.provenance.at(k));
        out.multiplicity.push_back(k < region.multiplicity.size() ? region.multiplicity[k] : 1);
    }
    return out;
}

SupportResult support_minimize(const Region& region, const WeightVector& v) {
    check_dim(region, v);
    if (region.vertices.empty()) throw Error(ErrorKind::InvalidSpec, "region has no vertices");
    std::vector<double> values;
    values.reserve(region.size());
    for (const auto& vertex : region.vertices) values.push_back(dot(v, vertex));
    const double best = *std::min_element(values.begin(), values.end());
    const double tol = 1e-12 * std::max(1.0, std::abs(best));
    SupportResult result{best, {}};
    for (std::size_t k = 0; k < values.size(); ++k) {
        if (values[k] <= best + tol) result.argmin.push_back(k);
    }
    return result;
}

MembershipCertificate contains(const Region& region, const ErrorVector& p, double tol) {
    check_dim(region, p);
    if (region.vertices.empty()) throw Error(ErrorKind::InvalidSpec, "region has no vertices");

    std::vector<std::size_t> all(region.size());
    std::iota(all.begin(), all.end(), std::size_t{0});
    const L1Fit fit = l1_fit(region, all, p);

    if (fit.residual <= tol) {
        Inside inside = polish(region, all, fit.lambda, p);
        if (inside.reconstruction_error <= tol) return inside;
        std::vector<std::size_t> support = all;
        std::vector<double> coefficients = fit.lambda;
        drop_zero_coefficients(support, coefficients);
        to_simplex(coefficients, std::numeric_limits<double>::infinity());
        const double err = reconstruction_error(region, support, coefficients, p);
        return Inside{std::move(support), std::move(coefficients), err};
    }
    WeightVector normal = separating_normal(region, p);
    const double gap = separation_gap(region, normal, p);
    return Outside{std::move(normal), gap};
}

MixtureRule Decomposition::mixture(const Region& region) const {
    std::vector<MixtureComponent> components;
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        components.push_back({coefficients[k], region.provenance.at(vertices[k])});
    }
    return MixtureRule(std::move(components));
}

Decomposition decompose(const Region& region, const ErrorVector& p, std::size_t kmax,
                        double tol, std::uint64_t subset_budget) {
    if (kmax == 0) kmax = region.dim() + 1;
    const auto certificate = contains(region, p, tol);
    if (const auto* outside = std::get_if<Outside>(&certificate)) {
        throw Error(ErrorKind::NotInRegion, "point lies outside the achievable region",
                    std::nullopt, outside->gap);
    }
    const auto& inside = std::get<Inside>(certificate);
    if (inside.vertices.size() <= kmax) {
        return {inside.vertices, inside.coefficients, inside.reconstruction_error};
    }

    // Smaller supports exist only for special points; search subsets directly.
    std::uint64_t examined = 0;
    const std::size_t nv = region.size();
    for (std::size_t size = 1; size <= std::min(kmax, nv); ++size) {
        std::vector<std::size_t> subset(size);
        std::iota(subset.begin(), subset.end(), std::size_t{0});
        while (true) {
            if (++examined > subset_budget) {
                throw Error(ErrorKind::BudgetExceeded,
                            "subset budget exhausted while searching for a small decomposition");
            }
            auto coefficients = barycentric(region, subset, p);
            if (to_simplex(coefficients)) {
                const double err = reconstruction_error(region, subset, coefficients, p);
                if (err <= tol) {
                    std::vector<std::size_t> support = subset;
                    drop_zero_coefficients(support, coefficients);
                    return {std::move(support), std::move(coefficients), err};
                }
            }
            // next combination in lexicographic order
            std::size_t i = size;
            while (i > 0 && subset[i - 1] == nv - size + i - 1) --i;
            if (i == 0) break;
            ++subset[i - 1];
            for (std::size_t j = i; j < size; ++j) subset[j] = subset[j - 1] + 1;
        }
    }
    throw Error(ErrorKind::InfeasibleWithinKmax,
                "point needs more than " + std::to_string(kmax) + " vertices", kmax);
}

std::vector<std::size_t> hull_polygon_2d(const Region& region) {
    if (region.num_hypotheses != 2) {
        throw Error(ErrorKind::NotTwoDimensional, "2-D hull needs exactly two hypotheses");
    }
    const std::size_t n = region.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto x = [&](std::size_t k) { return region.vertices[k][0]; };
    auto y = [&](std::size_t k) { return region.vertices[k][1]; };
    std::sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) {
        return x(l) < x(r) || (x(l) == x(r) && y(l) < y(r));
    });
    if (n < 3) return idx;

    auto cross = [&](std::size_t o, std::size_t a, std::size_t b) {
        return (x(a) - x(o)) * (y(b) - y(o)) - (y(a) - y(o)) * (x(b) - x(o));
    };
    // Andrew's monotone chain; collinear points are dropped.
    std::vector<std::size_t> hull(2 * n);
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        while (k >= 2 && cross(hull[k - 2], hull[k - 1], idx[i]) <= 0.0) --k;
        hull[k++] = idx[i];
    }
    for (std::size_t i = n - 1, lower = k + 1; i-- > 0;) {
        while (k >= lower && cross(hull[k - 2], hull[k - 1], idx[i]) <= 0.0) --k;
        hull[k++] = idx[i];
    }
    hull.resize(k - 1);
    return hull;
}

} // namespace hypotest
