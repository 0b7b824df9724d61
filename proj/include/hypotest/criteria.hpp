#pragma once
// Objectives and constraints over pairwise error vectors. A Criterion is
// "minimize objective(p) s.t. inequalities(p) <= 0, |equalities(p)| <= eq_tol".

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hypotest/model.hpp"

namespace hypotest {

/// Priors pi_j and costs c_ij (decide i, truth j).
class CostModel {
public:
    CostModel(std::vector<double> priors, std::vector<std::vector<double>> costs);

    /// Equal priors, cost 1 for every wrong decision and 0 for right ones.
    static CostModel uniform(std::size_t num_hypotheses);

    std::size_t num_hypotheses() const noexcept { return priors_.size(); }
    const std::vector<double>& priors() const noexcept { return priors_; }
    double prior(std::size_t truth) const { return priors_[truth]; }
    double cost(std::size_t decided, std::size_t truth) const {
        return costs_[decided * priors_.size() + truth];
    }
    std::vector<std::vector<double>> cost_matrix() const;

private:
    std::vector<double> priors_;
    std::vector<double> costs_;
};

/// R_j = sum_i c_ij p_ij, with p_jj recovered from the column.
std::vector<double> conditional_risks(const ErrorVector& p, const CostModel& cost);
double bayes_risk(const ErrorVector& p, const CostModel& cost);

/// v_ij = pi_j (c_ij - c_jj); its argmin rule is the Bayes rule.
WeightVector weights_from_cost(const CostModel& cost);

/// Probability distortion w(p) = p^k / (p^k + (1-p)^k)^(1/k); p is clamped to [0,1].
double weight_function(double prob, double kappa);

struct ProspectParams {
    std::vector<double> priors;
    /// values[i][j] = v(c_ij).
    std::vector<std::vector<double>> values;
    double kappa;

    void validate() const;
};

/// sum_{i,j} w(pi_j p_ij) v(c_ij), over all pairs including i = j.
double prospect_objective(const ErrorVector& p, const ProspectParams& params);

enum class Curvature { Linear, Concave, Convex, General };

struct CriterionFunction {
    std::string name;
    std::function<double(const ErrorVector&)> eval;
    Curvature curvature = Curvature::General;

    bool is_linear() const noexcept { return curvature == Curvature::Linear; }
};

inline constexpr double kEqualityTol = 1e-8;

class Criterion {
public:
    /// Functions declared linear are checked on random triples; InvalidSpec on failure.
    Criterion(std::size_t num_hypotheses, std::string name, CriterionFunction objective,
              std::vector<CriterionFunction> inequalities = {},
              std::vector<CriterionFunction> equalities = {}, double eq_tol = kEqualityTol);

    std::size_t num_hypotheses() const noexcept { return num_hypotheses_; }
    const std::string& name() const noexcept { return name_; }
    const CriterionFunction& objective_function() const noexcept { return objective_; }
    const std::vector<CriterionFunction>& inequalities() const noexcept { return inequalities_; }
    const std::vector<CriterionFunction>& equalities() const noexcept { return equalities_; }
    double eq_tol() const noexcept { return eq_tol_; }

    /// n = m + p.
    std::size_t constraint_count() const noexcept {
        return inequalities_.size() + equalities_.size();
    }
    bool objective_concave_or_linear() const noexcept;
    bool constraints_linear() const noexcept;

    double objective(const ErrorVector& p) const;
    std::vector<double> inequality_values(const ErrorVector& p) const;
    std::vector<double> equality_values(const ErrorVector& p) const;
    bool feasible(const ErrorVector& p, double ineq_tol = 0.0) const;

    /// Set by restricted_bayes_criterion; solve() checks alpha against the minimax floor.
    struct RiskCap {
        CostModel cost;
        double alpha;
    };
    const std::optional<RiskCap>& risk_cap() const noexcept { return risk_cap_; }
    Criterion& with_risk_cap(RiskCap cap) {
        risk_cap_ = std::move(cap);
        return *this;
    }

private:
    void check(const ErrorVector& p) const;

    std::size_t num_hypotheses_;
    std::string name_;
    CriterionFunction objective_;
    std::vector<CriterionFunction> inequalities_;
    std::vector<CriterionFunction> equalities_;
    double eq_tol_;
    std::optional<RiskCap> risk_cap_;
};

/// Affine function of the error vector, coefficients in canonical pair order.
struct LinearForm {
    std::vector<double> coefficients;
    double offset = 0.0;

    double operator()(const ErrorVector& p) const;
};

struct BayesSpec {
    CostModel cost;
};
struct MinimaxSpec {
    CostModel cost;
};
/// Binary: minimize p01 subject to p10 <= alpha.
struct NeymanPearsonSpec {
    double alpha;
};
struct RestrictedBayesSpec {
    CostModel cost;
    double alpha;
};
struct ProspectSpec {
    ProspectParams params;
};
/// Linear objective with linear constraints; covers generalized Neyman-Pearson.
struct LinearCustomSpec {
    std::size_t num_hypotheses;
    LinearForm objective;
    std::vector<LinearForm> inequalities;
    std::vector<LinearForm> equalities;
    double eq_tol = kEqualityTol;
};

using CriterionSpec = std::variant<BayesSpec, MinimaxSpec, NeymanPearsonSpec, RestrictedBayesSpec,
                                   ProspectSpec, LinearCustomSpec>;

/// Builder name as used in scenario files ("bayes", "minimax", ...).
std::string criterion_kind(const CriterionSpec& spec);

Criterion make_criterion(const CriterionSpec& spec);

Criterion bayes_criterion(const CostModel& cost);
Criterion minimax_criterion(const CostModel& cost);
Criterion neyman_pearson_criterion(double alpha);
Criterion restricted_bayes_criterion(const CostModel& cost, double alpha);
Criterion prospect_criterion(const ProspectParams& params);
Criterion custom_criterion(std::size_t num_hypotheses, CriterionFunction objective,
                           std::vector<CriterionFunction> inequalities = {},
                           std::vector<CriterionFunction> equalities = {},
                           double eq_tol = kEqualityTol);

} // namespace hypotest
