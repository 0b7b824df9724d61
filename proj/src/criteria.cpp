#include "hypotest/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace hypotest {
namespace {

constexpr double kSimplexTol = 1e-12;

void check_priors(const std::vector<double>& priors, std::size_t m) {
    if (priors.size() != m) {
        throw Error(ErrorKind::DimensionMismatch, "one prior per hypothesis is required");
    }
    double sum = 0.0;
    for (double p : priors) {
        if (!(p >= 0.0 && p <= 1.0)) {
            throw Error(ErrorKind::InvalidSpec, "prior outside [0,1]", std::nullopt, p);
        }
        sum += p;
    }
    if (std::abs(sum - 1.0) > kSimplexTol) {
        throw Error(ErrorKind::InvalidSpec, "priors do not sum to one", std::nullopt, sum - 1.0);
    }
}

void check_square(const std::vector<std::vector<double>>& matrix, std::size_t m,
                  const char* what) {
    if (matrix.size() != m) {
        throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be M x M");
    }
    for (const auto& row : matrix) {
        if (row.size() != m) {
            throw Error(ErrorKind::DimensionMismatch, std::string(what) + " must be M x M");
        }
        for (double x : row) {
            if (!std::isfinite(x)) {
                throw Error(ErrorKind::InvalidSpec, std::string(what) + " entries must be finite");
            }
        }
    }
}

// Valid error vector with each column drawn from a flat Dirichlet.
ErrorVector random_error_vector(std::size_t m, std::mt19937_64& rng) {
    std::exponential_distribution<double> draw(1.0);
    ErrorVector p = ErrorVector::zeros(m);
    for (std::size_t j = 0; j < m; ++j) {
        std::vector<double> column(m);
        double sum = 0.0;
        for (double& x : column) sum += (x = draw(rng));
        for (std::size_t i = 0; i < m; ++i) {
            if (i != j) p.at(i, j) = column[i] / sum;
        }
    }
    return p;
}

void verify_linear(const CriterionFunction& f, std::size_t m) {
    if (!f.is_linear()) return;
    std::mt19937_64 rng(0x1ea5u);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 8; ++trial) {
        const ErrorVector a = random_error_vector(m, rng);
        const ErrorVector b = random_error_vector(m, rng);
        const double theta = unit(rng);
        ErrorVector mid = ErrorVector::zeros(m);
        for (std::size_t k = 0; k < mid.size(); ++k) mid[k] = theta * a[k] + (1.0 - theta) * b[k];
        const double fa = f.eval(a);
        const double fb = f.eval(b);
        const double lhs = f.eval(mid);
        const double rhs = theta * fa + (1.0 - theta) * fb;
        const double scale = std::max({1.0, std::abs(fa), std::abs(fb)});
        if (!(std::abs(lhs - rhs) <= 1e-10 * scale)) {
            throw Error(ErrorKind::InvalidSpec,
                        "function '" + f.name + "' is declared linear but is not affine");
        }
    }
}

} // namespace

CostModel::CostModel(std::vector<double> priors, std::vector<std::vector<double>> costs)
    : priors_(std::move(priors)) {
    const std::size_t m = priors_.size();
    if (m < 2) throw Error(ErrorKind::DimensionMismatch, "at least two hypotheses are required");
    check_priors(priors_, m);
    check_square(costs, m, "cost matrix");
    costs_.reserve(m * m);
    for (const auto& row : costs) costs_.insert(costs_.end(), row.begin(), row.end());
}

CostModel CostModel::uniform(std::size_t num_hypotheses) {
    std::vector<std::vector<double>> costs(num_hypotheses, std::vector<double>(num_hypotheses, 1.0));
    for (std::size_t i = 0; i < num_hypotheses; ++i) costs[i][i] = 0.0;
    return CostModel(std::vector<double>(num_hypotheses, 1.0 / static_cast<double>(num_hypotheses)),
                     std::move(costs));
}

std::vector<std::vector<double>> CostModel::cost_matrix() const {
    const std::size_t m = num_hypotheses();
    std::vector<std::vector<double>> out(m, std::vector<double>(m));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) out[i][j] = cost(i, j);
    }
    return out;
}

std::vector<double> conditional_risks(const ErrorVector& p, const CostModel& cost) {
    const std::size_t m = cost.num_hypotheses();
    if (p.num_hypotheses() != m) {
        throw Error(ErrorKind::DimensionMismatch, "error vector does not match the cost model");
    }
    std::vector<double> risks(m, 0.0);
    for (std::size_t j = 0; j < m; ++j) {
        double r = cost.cost(j, j) * p.correct(j);
        for (std::size_t i = 0; i < m; ++i) {
            if (i != j) r += cost.cost(i, j) * p.at(i, j);
        }
        risks[j] = r;
    }
    return risks;
}

double bayes_risk(const ErrorVector& p, const CostModel& cost) {
    const auto risks = conditional_risks(p, cost);
    double r = 0.0;
    for (std::size_t j = 0; j < risks.size(); ++j) r += cost.prior(j) * risks[j];
    return r;
}

WeightVector weights_from_cost(const CostModel& cost) {
    const std::size_t m = cost.num_hypotheses();
    WeightVector v = WeightVector::zeros(m);
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            if (i != j) v.at(i, j) = cost.prior(j) * (cost.cost(i, j) - cost.cost(j, j));
        }
    }
    return v;
}

double weight_function(double prob, double kappa) {
    if (!(kappa > 0.0)) {
        throw Error(ErrorKind::NonPositiveKappa, "weight exponent must be positive",
                    std::nullopt, kappa);
    }
    const double p = std::clamp(prob, 0.0, 1.0);
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    const double a = std::pow(p, kappa);
    const double b = std::pow(1.0 - p, kappa);
    return a / std::pow(a + b, 1.0 / kappa);
}

void ProspectParams::validate() const {
    if (!(kappa > 0.0)) {
        throw Error(ErrorKind::NonPositiveKappa, "weight exponent must be positive",
                    std::nullopt, kappa);
    }
    if (priors.size() < 2) {
        throw Error(ErrorKind::DimensionMismatch, "at least two hypotheses are required");
    }
    check_priors(priors, priors.size());
    check_square(values, priors.size(), "value table");
}

double prospect_objective(const ErrorVector& p, const ProspectParams& params) {
    const std::size_t m = params.priors.size();
    if (p.num_hypotheses() != m || params.values.size() != m) {
        throw Error(ErrorKind::DimensionMismatch, "error vector does not match prospect parameters");
    }
    double total = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
        for (std::size_t i = 0; i < m; ++i) {
            const double conditional = i == j ? p.correct(j) : p.at(i, j);
            total += weight_function(params.priors[j] * conditional, params.kappa) *
                     params.values[i][j];
        }
    }
    return total;
}

Criterion::Criterion(std::size_t num_hypotheses, std::string name, CriterionFunction objective,
                     std::vector<CriterionFunction> inequalities,
                     std::vector<CriterionFunction> equalities, double eq_tol)
    : num_hypotheses_(num_hypotheses),
      name_(std::move(name)),
      objective_(std::move(objective)),
      inequalities_(std::move(inequalities)),
      equalities_(std::move(equalities)),
      eq_tol_(eq_tol) {
    if (num_hypotheses_ < 2) {
        throw Error(ErrorKind::InvalidSpec, "at least two hypotheses are required");
    }
    if (!objective_.eval) throw Error(ErrorKind::InvalidSpec, "objective is missing");
    if (!(eq_tol_ >= 0.0)) throw Error(ErrorKind::InvalidSpec, "equality tolerance must be >= 0");
    verify_linear(objective_, num_hypotheses_);
    for (const auto& g : inequalities_) {
        if (!g.eval) throw Error(ErrorKind::InvalidSpec, "inequality constraint is empty");
        verify_linear(g, num_hypotheses_);
    }
    for (const auto& h : equalities_) {
        if (!h.eval) throw Error(ErrorKind::InvalidSpec, "equality constraint is empty");
        verify_linear(h, num_hypotheses_);
    }
}

bool Criterion::objective_concave_or_linear() const noexcept {
    return objective_.curvature == Curvature::Linear || objective_.curvature == Curvature::Concave;
}

bool Criterion::constraints_linear() const noexcept {
    return std::all_of(inequalities_.begin(), inequalities_.end(),
                       [](const auto& f) { return f.is_linear(); }) &&
           std::all_of(equalities_.begin(), equalities_.end(),
                       [](const auto& f) { return f.is_linear(); });
}

void Criterion::check(const ErrorVector& p) const {
    if (p.num_hypotheses() != num_hypotheses_) {
        throw Error(ErrorKind::DimensionMismatch, "error vector does not match the criterion");
    }
}

double Criterion::objective(const ErrorVector& p) const {
    check(p);
    return objective_.eval(p);
}

std::vector<double> Criterion::inequality_values(const ErrorVector& p) const {
    check(p);
    std::vector<double> out;
    out.reserve(inequalities_.size());
    for (const auto& g : inequalities_) out.push_back(g.eval(p));
    return out;
}

std::vector<double> Criterion::equality_values(const ErrorVector& p) const {
    check(p);
    std::vector<double> out;
    out.reserve(equalities_.size());
    for (const auto& h : equalities_) out.push_back(h.eval(p));
    return out;
}

bool Criterion::feasible(const ErrorVector& p, double ineq_tol) const {
    check(p);
    for (const auto& g : inequalities_) {
        if (!(g.eval(p) <= ineq_tol)) return false;
    }
    for (const auto& h : equalities_) {
        if (!(std::abs(h.eval(p)) <= eq_tol_)) return false;
    }
    return true;
}

double LinearForm::operator()(const ErrorVector& p) const {
    if (coefficients.size() != p.size()) {
        throw Error(ErrorKind::DimensionMismatch, "linear form does not match the error vector");
    }
    double s = offset;
    for (std::size_t k = 0; k < p.size(); ++k) s += coefficients[k] * p[k];
    return s;
}

Criterion bayes_criterion(const CostModel& cost) {
    return Criterion(cost.num_hypotheses(), "bayes",
                     {"bayes_risk", [cost](const ErrorVector& p) { return bayes_risk(p, cost); },
                      Curvature::Linear});
}

Criterion minimax_criterion(const CostModel& cost) {
    return Criterion(cost.num_hypotheses(), "minimax",
                     {"max_conditional_risk",
                      [cost](const ErrorVector& p) {
                          const auto r = conditional_risks(p, cost);
                          return *std::max_element(r.begin(), r.end());
                      },
                      Curvature::Convex});
}

Criterion neyman_pearson_criterion(double alpha) {
    if (!(alpha >= 0.0)) {
        throw Error(ErrorKind::InvalidSpec, "false-alarm level must be >= 0", std::nullopt, alpha);
    }
    return Criterion(2, "neyman_pearson",
                     {"miss_probability", [](const ErrorVector& p) { return p.at(0, 1); },
                      Curvature::Linear},
                     {{"false_alarm_excess",
                       [alpha](const ErrorVector& p) { return p.at(1, 0) - alpha; },
                       Curvature::Linear}});
}

Criterion restricted_bayes_criterion(const CostModel& cost, double alpha) {
    if (std::isnan(alpha)) throw Error(ErrorKind::InvalidSpec, "risk cap is NaN");
    Criterion c(cost.num_hypotheses(), "restricted_bayes",
                {"bayes_risk", [cost](const ErrorVector& p) { return bayes_risk(p, cost); },
                 Curvature::Linear},
                {{"max_risk_excess",
                  [cost, alpha](const ErrorVector& p) {
                      if (alpha == std::numeric_limits<double>::infinity()) {
                          return -std::numeric_limits<double>::infinity();
                      }
                      const auto r = conditional_risks(p, cost);
                      return *std::max_element(r.begin(), r.end()) - alpha;
                  },
                  Curvature::Convex}});
    c.with_risk_cap({cost, alpha});
    return c;
}

Criterion prospect_criterion(const ProspectParams& params) {
    params.validate();
    return Criterion(params.priors.size(), "prospect",
                     {"prospect_value",
                      [params](const ErrorVector& p) { return prospect_objective(p, params); },
                      Curvature::General});
}

Criterion custom_criterion(std::size_t num_hypotheses, CriterionFunction objective,
                           std::vector<CriterionFunction> inequalities,
                           std::vector<CriterionFunction> equalities, double eq_tol) {
    return Criterion(num_hypotheses, "custom", std::move(objective), std::move(inequalities),
                     std::move(equalities), eq_tol);
}

std::string criterion_kind(const CriterionSpec& spec) {
    struct Visitor {
        std::string operator()(const BayesSpec&) const { return "bayes"; }
        std::string operator()(const MinimaxSpec&) const { return "minimax"; }
        std::string operator()(const NeymanPearsonSpec&) const { return "neyman_pearson"; }
        std::string operator()(const RestrictedBayesSpec&) const { return "restricted_bayes"; }
        std::string operator()(const ProspectSpec&) const { return "prospect"; }
        std::string operator()(const LinearCustomSpec&) const { return "custom"; }
    };
    return std::visit(Visitor{}, spec);
}

Criterion make_criterion(const CriterionSpec& spec) {
    struct Visitor {
        Criterion operator()(const BayesSpec& s) const { return bayes_criterion(s.cost); }
        Criterion operator()(const MinimaxSpec& s) const { return minimax_criterion(s.cost); }
        Criterion operator()(const NeymanPearsonSpec& s) const {
            return neyman_pearson_criterion(s.alpha);
        }
        Criterion operator()(const RestrictedBayesSpec& s) const {
            return restricted_bayes_criterion(s.cost, s.alpha);
        }
        Criterion operator()(const ProspectSpec& s) const { return prospect_criterion(s.params); }
        Criterion operator()(const LinearCustomSpec& s) const {
            const std::size_t dim = pair_count(s.num_hypotheses);
            auto check = [dim](const LinearForm& f) {
                if (f.coefficients.size() != dim) {
                    throw Error(ErrorKind::InvalidSpec, "linear form needs M(M-1) coefficients");
                }
                return f;
            };
            auto wrap = [&](const LinearForm& f, std::string name) {
                return CriterionFunction{std::move(name), check(f), Curvature::Linear};
            };
            std::vector<CriterionFunction> ineq;
            for (std::size_t k = 0; k < s.inequalities.size(); ++k) {
                ineq.push_back(wrap(s.inequalities[k], "g" + std::to_string(k + 1)));
            }
            std::vector<CriterionFunction> eq;
            for (std::size_t k = 0; k < s.equalities.size(); ++k) {
                eq.push_back(wrap(s.equalities[k], "h" + std::to_string(k + 1)));
            }
            return custom_criterion(s.num_hypotheses, wrap(s.objective, "g0"), std::move(ineq),
                                    std::move(eq), s.eq_tol);
        }
    };
    return std::visit(Visitor{}, spec);
}

} // namespace hypotest
