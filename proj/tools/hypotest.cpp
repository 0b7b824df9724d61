// hypotest: command-line front end.
//
// Exit codes
//   0  success
//   1  reproduce: a reference value missed its tolerance; other runtime failures
//   2  usage or scenario schema error (including invalid criterion parameters)
//   3  pmf validation error
//   4  no feasible rule or mixture
//   5  --verify gap above --tol-objective
//   6  --svg requested for a problem without exactly two hypotheses
//   7  enumeration cap or search budget exceeded

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "hypotest/errors.hpp"
#include "hypotest/optimizer.hpp"
#include "hypotest/region.hpp"
#include "hypotest/scenario_io.hpp"
#include "hypotest/scenarios.hpp"

namespace fs = std::filesystem;
using namespace hypotest;

namespace {

enum Exit { kOk = 0, kMiss = 1, kSchema = 2, kPmf = 3, kInfeasible = 4, kVerify = 5, kNot2d = 6, kLimit = 7 };

struct Failure {
    int code;
    std::string message;
};

int code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::NoFeasibleMixture:
        case ErrorKind::NoFeasibleVertex: return kInfeasible;
        case ErrorKind::NotTwoDimensional: return kNot2d;
        case ErrorKind::CapExceeded:
        case ErrorKind::BudgetExceeded: return kLimit;
        case ErrorKind::InvalidSpec:
        case ErrorKind::NonPositiveKappa:
        case ErrorKind::InvalidCoefficients: return kSchema;
        default: return kMiss;
    }
}

/// Scenario with its validated table and criterion.
struct Loaded {
    Scenario scenario;
    PmfTable table;
    Criterion criterion;
};

Loaded load(const std::string& path, std::optional<std::uint64_t> cap) {
    Scenario scenario;
    try {
        scenario = load_scenario(path);
    } catch (const SchemaError& e) {
        throw Failure{kSchema, e.what()};
    } catch (const Error& e) {
        throw Failure{kSchema, e.what()};
    }
    if (cap) scenario.options.enumeration_cap = *cap;
    if (const char* budget = std::getenv("HYPOTEST_BUDGET")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(budget, &end, 10);
        if (end == budget || *end != '\0') throw Failure{kSchema, "HYPOTEST_BUDGET must be an integer"};
        scenario.options.subset_budget = v;
    }
    std::optional<PmfTable> table;
    try {
        table = scenario.pmf();
    } catch (const Error& e) {
        std::string msg = e.what();
        if (e.index()) msg += " (index " + std::to_string(*e.index()) + ")";
        throw Failure{kPmf, msg};
    }
    try {
        Criterion criterion = make_criterion(scenario.criterion);
        if (criterion.num_hypotheses() != table->num_hypotheses()) {
            throw Failure{kSchema, "criterion is for " + std::to_string(criterion.num_hypotheses()) +
                                       " hypotheses but the table has " +
                                       std::to_string(table->num_hypotheses())};
        }
        return Loaded{std::move(scenario), std::move(*table), std::move(criterion)};
    } catch (const Error& e) {
        throw Failure{kSchema, e.what()};
    }
}

Region build_region(const Loaded& in) {
    RegionOptions options;
    options.cap = in.scenario.options.enumeration_cap;
    return vertex_set(in.table, options);
}

void emit(const std::string& content, const std::string& out) {
    if (out.empty() || out == "-") {
        std::cout << content;
    } else {
        write_file_atomic(out, content);
    }
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

int cmd_validate(const std::string& path) {
    const Loaded in = load(path, std::nullopt);
    const PmfTable& t = in.table;
    std::cout << "scenario: " << (in.scenario.name.empty() ? path : in.scenario.name) << "\n"
              << "hypotheses: " << t.num_hypotheses() << "\n"
              << "observations: " << t.num_observations() << "\n"
              << "error vector dimension: " << t.error_dim() << "\n";
    std::cout << "pmf columns:\n";
    for (std::size_t y = 0; y < t.num_observations(); ++y) {
        std::cout << "  " << t.labels()[y];
        for (std::size_t j = 0; j < t.num_hypotheses(); ++j) std::cout << "  " << t.mass(y, j);
        std::cout << "\n";
    }
    if (!t.dropped_labels().empty()) {
        std::cout << "dropped (zero mass everywhere):";
        for (const auto& l : t.dropped_labels()) std::cout << " " << l;
        std::cout << "\n";
    }
    const auto rules = rule_count(t.num_hypotheses(), t.num_observations(), in.scenario.options.enumeration_cap);
    std::cout << "criterion: " << criterion_kind(in.scenario.criterion) << " ("
              << in.criterion.constraint_count() << " constraint(s))\n"
              << "deterministic rules: " << (rules ? std::to_string(*rules) : "above cap") << "\n"
              << "k: " << (in.scenario.options.k ? std::to_string(*in.scenario.options.k) : "auto") << "\n"
              << "seed: " << in.scenario.options.seed << "\n";
    return kOk;
}

int cmd_region(const std::string& path, const std::string& format, const std::string& out,
               const std::string& svg, std::optional<std::uint64_t> cap) {
    const Loaded in = load(path, cap);
    const Region region = build_region(in);
    emit(format == "json" ? region_json(region, in.table) : region_csv(region, in.table), out);
    if (!svg.empty()) write_file_atomic(svg, region_svg(region, {}, in.scenario.name));
    return kOk;
}

struct SolveFlags {
    std::string k = "auto";
    bool verify = false;
    std::optional<std::size_t> grid_steps;
    std::optional<std::uint64_t> seed;
    double tol_objective = 2e-3;
    std::string format = "json";
    std::string out;
    std::optional<std::uint64_t> cap;
};

int cmd_solve(const std::string& path, const SolveFlags& flags) {
    Loaded in = load(path, flags.cap);
    SolveOptions& options = in.scenario.options;
    if (flags.k != "auto") {
        std::size_t pos = 0;
        unsigned long v = 0;
        try {
            v = std::stoul(flags.k, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != flags.k.size() || v == 0) throw Failure{kSchema, "--k must be 'auto' or a positive integer"};
        options.k = v;
    }
    if (flags.seed) options.seed = *flags.seed;
    if (flags.grid_steps) options.oracle_grid_steps = *flags.grid_steps;

    const Region region = build_region(in);
    const SolveReport report = solve(region, in.criterion, options);

    std::optional<Verification> verification;
    if (flags.verify) {
        OracleOptions oracle;
        oracle.budget = options.oracle_budget;
        oracle.ineq_tol = options.ineq_tol;
        const SolveReport ref = brute_force_oracle(region, in.criterion, options.oracle_grid_steps, oracle);
        const double gap = report.objective - ref.objective;
        verification = Verification{ref.objective, gap, options.oracle_grid_steps, flags.tol_objective,
                                    std::abs(gap) <= flags.tol_objective};
    }

    if (flags.format == "json") {
        emit(report_json(report, region, in.table, verification), flags.out);
    } else {
        std::ostringstream o;
        o << "objective: " << fixed(report.objective, 6) << "\n"
          << "bound_used: " << report.bound_used << " (" << report.bound_rationale << ")\n"
          << "error vector:";
        for (std::size_t t = 0; t < report.error_vector.size(); ++t) o << " " << fixed(report.error_vector[t], 6);
        o << "\nmixture:\n";
        for (std::size_t c = 0; c < report.vertices.size(); ++c) {
            o << "  " << fixed(report.coefficients[c], 6) << "  vertex " << report.vertices[c] << "  "
              << format_rule(region.provenance[report.vertices[c]], in.table) << "\n";
        }
        o << "subsets examined: " << report.subsets_examined
          << (report.budget_exceeded ? " (budget exceeded, sampled)" : "") << "\n"
          << "seed: " << report.seed << "\n";
        if (verification) {
            o << "oracle (g=" << verification->grid_steps << "): " << fixed(verification->oracle_objective, 6)
              << "  gap " << verification->gap << (verification->passed ? "  ok" : "  FAILED") << "\n";
        }
        emit(o.str(), flags.out);
    }
    return verification && !verification->passed ? kVerify : kOk;
}

int cmd_reproduce(const std::string& out_dir) {
    struct Reference {
        double value;
        double tol;
    };
    struct Row {
        int which;
        std::size_t vertices;
        Reference k1, k2, k3;
    };
    const Row rows[] = {{1, 6, {0.1901, 5e-4}, {0.0422, 1.5e-3}, {0.0400, 1.5e-3}},
                        {2, 8, {3.9278, 5e-3}, {3.8432, 5e-3}, {3.8432, 5e-3}}};
    fs::create_directories(out_dir);

    bool ok = true;
    std::cout << "example  vertices      k=1 (ref)            k=2 (ref)            k=3 (ref)\n";
    for (const Row& row : rows) {
        const Scenario scenario = builtin_scenario(row.which);
        const Problem problem = scenario.problem();
        const Region region = vertex_set(problem.table);
        const SolveReport r1 = best_deterministic(region, problem.criterion, problem.options);
        const SolveReport r2 = best_mixture(region, problem.criterion, 2, problem.options);
        const SolveReport r3 = best_mixture(region, problem.criterion, 3, problem.options);

        auto cell = [&](const SolveReport& r, const Reference& ref) {
            const bool hit = std::abs(r.objective - ref.value) <= ref.tol;
            ok = ok && hit;
            return fixed(r.objective, 4) + " (" + fixed(ref.value, 4) + ") " + (hit ? "ok  " : "MISS");
        };
        const bool count_ok = region.size() == row.vertices;
        ok = ok && count_ok;
        std::cout << "   " << row.which << "     " << region.size() << (count_ok ? " ok  " : " MISS") << "    "
                  << cell(r1, row.k1) << "  " << cell(r2, row.k2) << "  " << cell(r3, row.k3) << "\n";

        const std::vector<SvgMarker> markers{{r1.error_vector, MarkerShape::Square, "best single rule"},
                                             {r2.error_vector, MarkerShape::Triangle, "best 2-rule mixture"},
                                             {r3.error_vector, MarkerShape::Circle, "best 3-rule mixture"}};
        const fs::path figure = fs::path(out_dir) / (scenario.name + "_region.svg");
        write_file_atomic(figure, region_svg(region, markers, scenario.name + " achievable region"));
        std::cout << "         figure: " << figure.string() << "\n";
    }
    std::cout << (ok ? "all reference values reproduced\n" : "some reference values missed\n");
    return ok ? kOk : kMiss;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal randomized decision rules for finite-alphabet hypothesis tests"};
    app.require_subcommand(1);

    std::string path;
    std::optional<std::uint64_t> cap;

    auto* validate = app.add_subcommand("validate", "Check a scenario file and print a summary");
    validate->add_option("scenario", path, "Scenario file")->required();

    std::string region_format = "csv";
    std::string region_out;
    std::string svg;
    auto* region = app.add_subcommand("region", "List the vertices of the achievable region");
    region->add_option("scenario", path, "Scenario file")->required();
    region->add_option("--format", region_format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    region->add_option("--out,-o", region_out, "Output file (default stdout)");
    region->add_option("--svg", svg, "Also draw the region (two hypotheses only)");
    region->add_option("--cap", cap, "Largest number of deterministic rules to enumerate");

    SolveFlags flags;
    auto* solve_cmd = app.add_subcommand("solve", "Find the best mixture of deterministic rules");
    solve_cmd->add_option("scenario", path, "Scenario file")->required();
    solve_cmd->add_option("--k", flags.k, "Mixture size: auto or a positive integer");
    solve_cmd->add_flag("--verify", flags.verify, "Compare against the brute-force grid oracle");
    solve_cmd->add_option("--grid-steps", flags.grid_steps, "Oracle grid resolution for --verify");
    solve_cmd->add_option("--seed", flags.seed, "Random seed");
    solve_cmd->add_option("--tol-objective", flags.tol_objective, "Allowed |solve - oracle| gap");
    solve_cmd->add_option("--format", flags.format, "json or text")->check(CLI::IsMember({"json", "text"}));
    solve_cmd->add_option("--out,-o", flags.out, "Output file (default stdout)");
    solve_cmd->add_option("--cap", flags.cap, "Largest number of deterministic rules to enumerate");

    std::string out_dir = ".";
    auto* reproduce = app.add_subcommand("reproduce", "Recompute the two built-in channel examples");
    reproduce->add_option("--out-dir", out_dir, "Directory for the SVG figures");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kOk : kSchema;
    }

    try {
        if (*validate) return cmd_validate(path);
        if (*region) return cmd_region(path, region_format, region_out, svg, cap);
        if (*solve_cmd) return cmd_solve(path, flags);
        if (*reproduce) return cmd_reproduce(out_dir);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kMiss;
    }
    return kOk;
}
