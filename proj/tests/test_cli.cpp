#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "hypotest/errors.hpp"
#include "hypotest/scenario_io.hpp"
#include "support.hpp"

using namespace hypotest;
namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    static const fs::path dir = [] {
        auto d = fs::temp_directory_path() / ("hypotest_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

void spit(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::binary) << text; }

struct Run {
    int code;
    std::string out;
    std::string err;
};

Run cli(const std::string& args) {
    const fs::path out = scratch() / "stdout.txt";
    const fs::path err = scratch() / "stderr.txt";
    const std::string cmd = std::string(HYPOTEST_CLI) + " " + args + " >" + out.string() + " 2>" + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string bundled(const char* name) { return std::string(HYPOTEST_SCENARIOS) + "/" + name; }

std::size_t count(const std::string& text, const std::string& needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) ++n;
    return n;
}

} // namespace

TEST_CASE("scenario documents round-trip") {
    for (int which : {1, 2}) {
        const Scenario s = builtin_scenario(which);
        const std::string text = dump_scenario(s);
        const Scenario back = parse_scenario(text);
        CHECK(dump_scenario(back) == text);
        CHECK(back.channels.has_value());
        CHECK(back.pmf().column(1) == s.pmf().column(1));
    }
    for (auto kind : {CriterionKind::Bayes, CriterionKind::Minimax, CriterionKind::RestrictedBayes,
                      CriterionKind::Prospect}) {
        const Scenario s = random_scenario(13, 3, 3, kind);
        const std::string text = dump_scenario(s);
        CHECK(dump_scenario(parse_scenario(text)) == text);
    }
    Scenario custom = builtin_scenario(1);
    custom.criterion = LinearCustomSpec{2, {{0.0, 1.0}, 0.25}, {{{1.0, 0.0}, -0.1}}, {}, 1e-7};
    custom.options.k = 2;
    const std::string text = dump_scenario(custom);
    CHECK(dump_scenario(parse_scenario(text)) == text);
}

TEST_CASE("schema errors") {
    const std::string good = slurp(bundled("example1.json"));
    CHECK_NOTHROW(parse_scenario(good));
    CHECK_THROWS_AS(parse_scenario("{ not json"), SchemaError);
    CHECK_THROWS_AS(parse_scenario(R"({"format_version": 1, "hypotheses": {"channels": []}})"), SchemaError);
    CHECK_THROWS_AS(parse_scenario(R"({"format_version": 2, "hypotheses": {}, "criterion": {}})"), SchemaError);
    CHECK_THROWS_AS(parse_scenario(R"({"format_version": 1,
        "hypotheses": {"channels": [], "table": {"labels": [], "mass": []}},
        "criterion": {"type": "neyman_pearson", "alpha": 0.1}})"), SchemaError);
    CHECK_THROWS_AS(parse_scenario(R"({"format_version": 1, "hypotheses": {"channels": [{"p10": "x", "p01": 0}]},
        "criterion": {"type": "neyman_pearson", "alpha": 0.1}})"), SchemaError);
    CHECK_THROWS_AS(parse_scenario(R"({"format_version": 1, "hypotheses": {"channels": [{"p10": 0, "p01": 0}]},
        "criterion": {"type": "mystery"}})"), SchemaError);
    CHECK_THROWS_AS(parse_scenario(R"({"format_version": 1, "hypotheses": {"channels": [{"p10": 0, "p01": 0}]},
        "criterion": {"type": "neyman_pearson", "alpha": 0.1}, "solver": {"k": "many"}})"), SchemaError);
}

TEST_CASE("region CSV") {
    const Problem p = builtin_example(1);
    const Region r = vertex_set(p.table);
    const std::string csv = region_csv(r, p.table);
    CHECK(csv.rfind("vertex_id,p10,p01,rule\r\n", 0) == 0);
    CHECK(csv.find("\"[0,0]->0;[0,1]->0;[1,0]->0;[1,1]->0\"") != std::string::npos);
    const auto rows = parse_region_csv(csv);
    REQUIRE(rows.size() == 6);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        CHECK(rows[k].id == k);
        char buf[64];
        for (std::size_t t = 0; t < 2; ++t) {
            std::snprintf(buf, sizeof buf, "%.12g", r.vertices[k][t]);
            CHECK(rows[k].point[t] == std::stod(buf));
        }
        CHECK(rows[k].rule == format_rule(r.provenance[k], p.table));
    }
    // Quotes inside fields are doubled.
    const auto quoted = parse_region_csv("vertex_id,p10,p01,rule\r\n0,0,1,\"a\"\"b,c\"\r\n");
    CHECK(quoted[0].rule == "a\"b,c");

    const Region r3 = vertex_set(random_problem(2, 3, 2, CriterionKind::Minimax).table);
    const std::string csv3 = region_csv(r3, random_problem(2, 3, 2, CriterionKind::Minimax).table);
    CHECK(csv3.rfind("vertex_id,p10,p20,p01,p21,p02,p12,rule", 0) == 0);
}

TEST_CASE("SVG figures") {
    const Region r = vertex_set(builtin_example(2).table);
    const std::string svg = region_svg(r, {{r.vertices[0], MarkerShape::Circle, "x"}});
    CHECK(count(svg, "class=\"vertex-star\"") == 8);
    CHECK(count(svg, "class=\"hull\"") == 1);
    CHECK(count(svg, ">p10</text>") == 1);
    CHECK(count(svg, ">p01</text>") == 1);
    CHECK(count(svg, "class=\"marker-circle\"") == 2);  // marker and legend entry
    const Region r3 = vertex_set(random_problem(2, 3, 2, CriterionKind::Minimax).table);
    CHECK_THROWS_AS(region_svg(r3), Error);
}

TEST_CASE("atomic writes leave no temporary files") {
    const fs::path target = scratch() / "atomic.txt";
    write_file_atomic(target, "first");
    write_file_atomic(target, "second");
    CHECK(slurp(target) == "second");
    std::size_t entries = 0;
    for (const auto& e : fs::directory_iterator(scratch())) {
        if (e.path().filename().string().rfind("atomic.txt", 0) == 0) ++entries;
    }
    CHECK(entries == 1);
    CHECK_THROWS(write_file_atomic(scratch() / "missing" / "x.txt", "data"));
}

TEST_CASE("cli validate") {
    CHECK(cli("validate " + bundled("example1.json")).code == 0);

    const fs::path bad = scratch() / "column09.json";
    spit(bad, R"({"format_version": 1, "hypotheses": {"table": {"labels": ["a", "b"],
        "mass": [[0.5, 0.5], [0.45, 0.45]]}}, "criterion": {"type": "neyman_pearson", "alpha": 0.1}})");
    const Run r = cli("validate " + bad.string());
    CHECK(r.code == 3);
    CHECK(r.err.find("hypothesis 1") != std::string::npos);

    const fs::path missing = scratch() / "nocriterion.json";
    spit(missing, R"({"format_version": 1, "hypotheses": {"channels": [{"p10": 0.1, "p01": 0.1}]}})");
    CHECK(cli("validate " + missing.string()).code == 2);
    CHECK(cli("validate " + (scratch() / "absent.json").string()).code == 2);
    CHECK(cli("frobnicate").code == 2);
}

TEST_CASE("cli region") {
    const Run r1 = cli("region " + bundled("example1.json"));
    CHECK(r1.code == 0);
    CHECK(parse_region_csv(r1.out).size() == 6);
    const Run r2 = cli("region " + bundled("example2.json") + " --format json");
    CHECK(r2.code == 0);
    CHECK(count(r2.out, "\"vertex_id\"") == 8);
    CHECK(r2.out.find("\"format_version\": 1") != std::string::npos);

    const fs::path svg = scratch() / "ex1.svg";
    CHECK(cli("region " + bundled("example1.json") + " --svg " + svg.string()).code == 0);
    CHECK(count(slurp(svg), "class=\"vertex-star\"") == 6);

    const fs::path ternary = scratch() / "ternary.json";
    spit(ternary, dump_scenario(random_scenario(4, 3, 2, CriterionKind::Minimax)));
    const fs::path csv = scratch() / "ternary.csv";
    const fs::path svg3 = scratch() / "ternary.svg";
    const Run r3 = cli("region " + ternary.string() + " --out " + csv.string() + " --svg " + svg3.string());
    CHECK(r3.code == 6);
    CHECK(fs::exists(csv));
    CHECK_FALSE(fs::exists(svg3));
    CHECK(parse_region_csv(slurp(csv)).size() > 1);
}

TEST_CASE("cli solve") {
    const Run k1 = cli("solve " + bundled("example1.json") + " --k 1");
    CHECK(k1.code == 0);
    CHECK(k1.out.find("\"bound_used\": 1") != std::string::npos);

    const Run autok = cli("solve " + bundled("example1.json") + " --verify --format json");
    REQUIRE(autok.code == 0);
    CHECK(autok.out.find("\"bound_used\": 3") != std::string::npos);
    CHECK(autok.out.find("\"verification\"") != std::string::npos);
    CHECK(autok.out.find("\"seed\": 1") != std::string::npos);

    const Run k2 = cli("solve " + bundled("example2.json") + " --k 2 --format text");
    CHECK(k2.code == 0);
    CHECK(k2.out.find("objective: 3.843") != std::string::npos);

    // A negative tolerance cannot be met: verification must fail.
    CHECK(cli("solve " + bundled("example1.json") + " --verify --grid-steps 20 --tol-objective -1").code == 5);

    const fs::path never = scratch() / "infeasible.json";
    spit(never, R"({"format_version": 1, "hypotheses": {"channels": [{"p10": 0.2, "p01": 0.3}]},
        "criterion": {"type": "custom", "num_hypotheses": 2, "objective": {"coefficients": [1, 0]},
                      "inequalities": [{"coefficients": [1, 1], "offset": 0.5}]}})");
    CHECK(cli("solve " + never.string()).code == 4);

    const fs::path low = scratch() / "lowcap.json";
    spit(low, R"({"format_version": 1, "hypotheses": {"channels": [{"p10": 0.2, "p01": 0.3}]},
        "criterion": {"type": "restricted_bayes", "priors": [0.5, 0.5], "costs": [[0, 1], [1, 0]], "alpha": 0.01}})");
    CHECK(cli("solve " + low.string()).code == 2);

    CHECK(cli("solve " + bundled("example1.json") + " --k zero").code == 2);
    const fs::path out = scratch() / "report.json";
    CHECK(cli("solve " + bundled("neyman_pearson.json") + " --out " + out.string()).code == 0);
    CHECK(slurp(out).find("\"bound_used\": 2") != std::string::npos);
}

TEST_CASE("cli budget override") {
    const std::string cmd = "env HYPOTEST_BUDGET=5 ";
    const fs::path out = scratch() / "budget.txt";
    const int status = std::system((cmd + HYPOTEST_CLI + " solve " + bundled("example2.json") + " --out " + out.string()).c_str());
    CHECK(WEXITSTATUS(status) == 0);
    CHECK(slurp(out).find("\"budget_exceeded\": true") != std::string::npos);
}

TEST_CASE("cli reproduce") {
    const fs::path dir = scratch() / "figures";
    const Run r = cli("reproduce --out-dir " + dir.string());
    CHECK(r.code == 0);
    CHECK(count(r.out, " ok") == 8);
    CHECK(count(slurp(dir / "example1_region.svg"), "class=\"vertex-star\"") == 6);
    CHECK(count(slurp(dir / "example2_region.svg"), "class=\"vertex-star\"") == 8);
    CHECK(cli("reproduce --out-dir " + dir.string()).out == r.out);
}
