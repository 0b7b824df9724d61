#pragma once
// Reading and writing scenario documents plus the report and figure outputs.
//
// Scenario document (format_version 1):
//   {
//     "format_version": 1,
//     "name": "example1",                                  optional
//     "hypotheses": { "channels": [{"p10": 0.4, "p01": 0.1}, ...] }
//                or { "table": {"labels": [...], "mass": [[f_0(y)...], [f_1(y)...]]} },
//     "criterion": { "type": "bayes" | "minimax", "priors": [...], "costs": [[c_ij]] }
//                | { "type": "neyman_pearson", "alpha": a }
//                | { "type": "restricted_bayes", "priors", "costs", "alpha" }
//                | { "type": "prospect", "priors", "values": [[v(c_ij)]], "kappa" }
//                | { "type": "custom", "num_hypotheses", "objective": {"coefficients", "offset"},
//                    "inequalities": [...], "equalities": [...], "eq_tol" },
//     "solver": { "k": "auto" | N, "grid_steps", "oracle_grid_steps", "subset_budget",
//                 "oracle_budget", "seed_budget", "starts", "seed", "cap",
//                 "coefficient_tol", "objective_tol", "ineq_tol" }   all optional
//   }
// costs[i][j] and values[i][j] are indexed (decided i, true j).

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hypotest/optimizer.hpp"
#include "hypotest/region.hpp"
#include "hypotest/scenarios.hpp"

namespace hypotest {

inline constexpr int kFormatVersion = 1;

/// Malformed document: bad syntax, missing or mistyped fields.
class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

Scenario parse_scenario(const std::string& text);
Scenario load_scenario(const std::filesystem::path& path);
std::string dump_scenario(const Scenario& scenario);

/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// Rule as "label->hypothesis" pairs joined by ';'.
std::string format_rule(const DeterministicRule& rule, const PmfTable& table);

/// Columns vertex_id, one p<i><j> per pair in canonical order, rule.
std::string region_csv(const Region& region, const PmfTable& table);

struct CsvVertex {
    std::size_t id;
    std::vector<double> point;
    std::string rule;
};
/// Reads region_csv output back.
std::vector<CsvVertex> parse_region_csv(const std::string& text);

std::string region_json(const Region& region, const PmfTable& table);

struct Verification {
    double oracle_objective;
    double gap;
    std::size_t grid_steps;
    double tolerance;
    bool passed;
};

std::string report_json(const SolveReport& report, const Region& region, const PmfTable& table,
                        const std::optional<Verification>& verification);

enum class MarkerShape { Square, Triangle, Circle };

struct SvgMarker {
    ErrorVector point;
    MarkerShape shape;
    std::string label;
};

/// Hull polygon, a star per vertex (class "vertex-star") and optional
/// markers. NotTwoDimensional unless M = 2.
std::string region_svg(const Region& region, const std::vector<SvgMarker>& markers = {},
                       const std::string& title = {});

} // namespace hypotest
