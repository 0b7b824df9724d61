#include "hypotest/scenario_io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>
#include <unistd.h>

#include "json.hpp"

#include "hypotest/errors.hpp"

namespace hypotest {
namespace {

using json = nlohmann::json;
using ordered = nlohmann::ordered_json;

const json& require(const json& obj, const char* key, const std::string& where) {
    if (!obj.is_object()) throw SchemaError(where + " must be an object");
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError(where + "." + key + " is missing");
    return *it;
}

double number(const json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError(where + " must be a number");
    return v.get<double>();
}

std::vector<double> number_list(const json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaError(where + " must be an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<std::vector<double>> number_matrix(const json& v, const std::string& where) {
    if (!v.is_array()) throw SchemaError(where + " must be an array of arrays");
    std::vector<std::vector<double>> out;
    for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number_list(v[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

std::uint64_t count(const json& v, const std::string& where) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
        throw SchemaError(where + " must be a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

CostModel parse_cost(const json& c) {
    return CostModel(number_list(require(c, "priors", "criterion"), "criterion.priors"),
                     number_matrix(require(c, "costs", "criterion"), "criterion.costs"));
}

LinearForm parse_form(const json& f, const std::string& where) {
    LinearForm form;
    form.coefficients = number_list(require(f, "coefficients", where), where + ".coefficients");
    if (f.contains("offset")) form.offset = number(f["offset"], where + ".offset");
    return form;
}

CriterionSpec parse_criterion(const json& c) {
    const json& type = require(c, "type", "criterion");
    if (!type.is_string()) throw SchemaError("criterion.type must be a string");
    const std::string name = type.get<std::string>();
    if (name == "bayes") return BayesSpec{parse_cost(c)};
    if (name == "minimax") return MinimaxSpec{parse_cost(c)};
    if (name == "neyman_pearson") {
        return NeymanPearsonSpec{number(require(c, "alpha", "criterion"), "criterion.alpha")};
    }
    if (name == "restricted_bayes") {
        return RestrictedBayesSpec{parse_cost(c), number(require(c, "alpha", "criterion"), "criterion.alpha")};
    }
    if (name == "prospect") {
        return ProspectSpec{ProspectParams{
            number_list(require(c, "priors", "criterion"), "criterion.priors"),
            number_matrix(require(c, "values", "criterion"), "criterion.values"),
            number(require(c, "kappa", "criterion"), "criterion.kappa")}};
    }
    if (name == "custom") {
        LinearCustomSpec spec;
        spec.num_hypotheses = count(require(c, "num_hypotheses", "criterion"), "criterion.num_hypotheses");
        spec.objective = parse_form(require(c, "objective", "criterion"), "criterion.objective");
        for (const char* key : {"inequalities", "equalities"}) {
            if (!c.contains(key)) continue;
            const json& list = c[key];
            if (!list.is_array()) throw SchemaError(std::string("criterion.") + key + " must be an array");
            auto& target = std::string(key) == "inequalities" ? spec.inequalities : spec.equalities;
            for (std::size_t i = 0; i < list.size(); ++i) {
                target.push_back(parse_form(list[i], std::string("criterion.") + key + "[" + std::to_string(i) + "]"));
            }
        }
        if (c.contains("eq_tol")) spec.eq_tol = number(c["eq_tol"], "criterion.eq_tol");
        return spec;
    }
    throw SchemaError("unknown criterion type '" + name + "'");
}

SolveOptions parse_solver(const json& s) {
    SolveOptions o;
    if (!s.is_object()) throw SchemaError("solver must be an object");
    if (s.contains("k")) {
        const json& k = s["k"];
        if (k.is_string()) {
            if (k.get<std::string>() != "auto") throw SchemaError("solver.k must be \"auto\" or a positive integer");
        } else {
            const auto v = count(k, "solver.k");
            if (v == 0) throw SchemaError("solver.k must be positive");
            o.k = static_cast<std::size_t>(v);
        }
    }
    auto opt_count = [&](const char* key, auto& field) {
        if (s.contains(key)) field = static_cast<std::remove_reference_t<decltype(field)>>(count(s[key], std::string("solver.") + key));
    };
    auto opt_number = [&](const char* key, double& field) {
        if (s.contains(key)) field = number(s[key], std::string("solver.") + key);
    };
    opt_count("grid_steps", o.grid_steps);
    opt_count("oracle_grid_steps", o.oracle_grid_steps);
    opt_count("subset_budget", o.subset_budget);
    opt_count("oracle_budget", o.oracle_budget);
    opt_count("seed_budget", o.seed_budget);
    opt_count("starts", o.starts);
    opt_count("seed", o.seed);
    opt_count("cap", o.enumeration_cap);
    opt_number("coefficient_tol", o.coefficient_tol);
    opt_number("objective_tol", o.objective_tol);
    opt_number("ineq_tol", o.ineq_tol);
    return o;
}

ordered dump_cost(const CostModel& cost) {
    return ordered{{"priors", cost.priors()}, {"costs", cost.cost_matrix()}};
}

ordered dump_form(const LinearForm& f) {
    return ordered{{"coefficients", f.coefficients}, {"offset", f.offset}};
}

ordered dump_criterion(const CriterionSpec& spec) {
    ordered out;
    out["type"] = criterion_kind(spec);
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, BayesSpec> || std::is_same_v<T, MinimaxSpec>) {
                out.update(dump_cost(s.cost));
            } else if constexpr (std::is_same_v<T, NeymanPearsonSpec>) {
                out["alpha"] = s.alpha;
            } else if constexpr (std::is_same_v<T, RestrictedBayesSpec>) {
                out.update(dump_cost(s.cost));
                out["alpha"] = s.alpha;
            } else if constexpr (std::is_same_v<T, ProspectSpec>) {
                out["priors"] = s.params.priors;
                out["values"] = s.params.values;
                out["kappa"] = s.params.kappa;
            } else {
                out["num_hypotheses"] = s.num_hypotheses;
                out["objective"] = dump_form(s.objective);
                out["inequalities"] = ordered::array();
                for (const auto& f : s.inequalities) out["inequalities"].push_back(dump_form(f));
                out["equalities"] = ordered::array();
                for (const auto& f : s.equalities) out["equalities"].push_back(dump_form(f));
                out["eq_tol"] = s.eq_tol;
            }
        },
        spec);
    return out;
}

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string pair_name(std::size_t slot, std::size_t m) {
    const auto [i, j] = pair_at(slot, m);
    if (m <= 10) return "p" + std::to_string(i) + std::to_string(j);
    return "p" + std::to_string(i) + "_" + std::to_string(j);
}

ordered rule_object(const DeterministicRule& rule, const PmfTable& table) {
    ordered out = ordered::object();
    for (std::size_t y = 0; y < table.num_observations(); ++y) out[table.labels()[y]] = rule.decision(y);
    return out;
}

ordered error_object(const ErrorVector& p, std::size_t m) {
    ordered out = ordered::object();
    for (std::size_t t = 0; t < p.size(); ++t) out[pair_name(t, m)] = p[t];
    return out;
}

} // namespace

Scenario parse_scenario(const std::string& text) {
    try {
        const json doc = json::parse(text);
        if (!doc.is_object()) throw SchemaError("scenario must be a JSON object");
        const auto version = count(require(doc, "format_version", "scenario"), "format_version");
        if (version != static_cast<std::uint64_t>(kFormatVersion)) {
            throw SchemaError("unsupported format_version " + std::to_string(version));
        }
        Scenario s;
        if (doc.contains("name")) {
            if (!doc["name"].is_string()) throw SchemaError("name must be a string");
            s.name = doc["name"].get<std::string>();
        }
        const json& hyp = require(doc, "hypotheses", "scenario");
        const bool has_table = hyp.is_object() && hyp.contains("table");
        const bool has_channels = hyp.is_object() && hyp.contains("channels");
        if (has_table == has_channels) {
            throw SchemaError("hypotheses needs exactly one of 'table' or 'channels'");
        }
        if (has_channels) {
            const json& list = hyp["channels"];
            if (!list.is_array()) throw SchemaError("hypotheses.channels must be an array");
            std::vector<BinaryChannel> channels;
            for (std::size_t k = 0; k < list.size(); ++k) {
                const std::string where = "hypotheses.channels[" + std::to_string(k) + "]";
                channels.push_back({number(require(list[k], "p10", where), where + ".p10"),
                                    number(require(list[k], "p01", where), where + ".p01")});
            }
            s.channels = std::move(channels);
        } else {
            const json& t = hyp["table"];
            RawPmf raw;
            const json& labels = require(t, "labels", "hypotheses.table");
            if (!labels.is_array()) throw SchemaError("hypotheses.table.labels must be an array");
            for (const auto& l : labels) {
                if (!l.is_string()) throw SchemaError("hypotheses.table.labels must hold strings");
                raw.labels.push_back(l.get<std::string>());
            }
            raw.columns = number_matrix(require(t, "mass", "hypotheses.table"), "hypotheses.table.mass");
            s.table = std::move(raw);
        }
        s.criterion = parse_criterion(require(doc, "criterion", "scenario"));
        if (doc.contains("solver")) s.options = parse_solver(doc["solver"]);
        return s;
    } catch (const json::exception& e) {
        throw SchemaError(std::string("malformed scenario: ") + e.what());
    }
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::string dump_scenario(const Scenario& s) {
    ordered doc;
    doc["format_version"] = kFormatVersion;
    if (!s.name.empty()) doc["name"] = s.name;
    if (s.channels) {
        ordered list = ordered::array();
        for (const auto& c : *s.channels) list.push_back(ordered{{"p10", c.p10}, {"p01", c.p01}});
        doc["hypotheses"]["channels"] = list;
    } else if (s.table) {
        doc["hypotheses"]["table"] = ordered{{"labels", s.table->labels}, {"mass", s.table->columns}};
    }
    doc["criterion"] = dump_criterion(s.criterion);
    const SolveOptions& o = s.options;
    ordered solver;
    if (o.k) solver["k"] = *o.k; else solver["k"] = "auto";
    solver["grid_steps"] = o.grid_steps;
    solver["oracle_grid_steps"] = o.oracle_grid_steps;
    solver["subset_budget"] = o.subset_budget;
    solver["oracle_budget"] = o.oracle_budget;
    solver["seed_budget"] = o.seed_budget;
    solver["starts"] = o.starts;
    solver["seed"] = o.seed;
    solver["cap"] = o.enumeration_cap;
    solver["coefficient_tol"] = o.coefficient_tol;
    solver["objective_tol"] = o.objective_tol;
    solver["ineq_tol"] = o.ineq_tol;
    doc["solver"] = solver;
    return doc.dump(2) + "\n";
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp" + std::to_string(::getpid());
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.flush();
        if (!out) {
            std::error_code ec;
            std::filesystem::remove(tmp, ec);
            throw std::runtime_error("cannot write " + tmp.string());
        }
    }
    std::filesystem::rename(tmp, path);
}

std::string format_rule(const DeterministicRule& rule, const PmfTable& table) {
    std::string out;
    for (std::size_t y = 0; y < table.num_observations(); ++y) {
        if (y) out += ';';
        out += table.labels()[y] + "->" + std::to_string(rule.decision(y));
    }
    return out;
}

std::string region_csv(const Region& region, const PmfTable& table) {
    std::string out = "vertex_id";
    const std::size_t m = region.num_hypotheses;
    for (std::size_t t = 0; t < region.dim(); ++t) out += "," + pair_name(t, m);
    out += ",rule\r\n";
    for (std::size_t k = 0; k < region.size(); ++k) {
        out += std::to_string(k);
        for (std::size_t t = 0; t < region.dim(); ++t) out += "," + fmt12(region.vertices[k][t]);
        out += "," + csv_field(format_rule(region.provenance[k], table)) + "\r\n";
    }
    return out;
}

std::vector<CsvVertex> parse_region_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        if (c == '"') {
            quoted = true;
            any = true;
        } else if (c == ',') {
            row.push_back(std::move(field));
            field.clear();
            any = true;
        } else if (c == '\r' || c == '\n') {
            if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
            if (any || !field.empty()) {
                row.push_back(std::move(field));
                rows.push_back(std::move(row));
            }
            field.clear();
            row.clear();
            any = false;
        } else {
            field += c;
            any = true;
        }
    }
    if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw SchemaError("empty CSV");
    const std::size_t width = rows.front().size();
    if (width < 3) throw SchemaError("CSV header too short");
    std::vector<CsvVertex> out;
    for (std::size_t r = 1; r < rows.size(); ++r) {
        if (rows[r].size() != width) throw SchemaError("CSV row " + std::to_string(r) + " has wrong width");
        CsvVertex v;
        v.id = std::stoul(rows[r][0]);
        for (std::size_t c = 1; c + 1 < width; ++c) v.point.push_back(std::stod(rows[r][c]));
        v.rule = rows[r][width - 1];
        out.push_back(std::move(v));
    }
    return out;
}

std::string region_json(const Region& region, const PmfTable& table) {
    ordered doc;
    doc["format_version"] = kFormatVersion;
    doc["num_hypotheses"] = region.num_hypotheses;
    ordered pairs = ordered::array();
    for (std::size_t t = 0; t < region.dim(); ++t) pairs.push_back(pair_name(t, region.num_hypotheses));
    doc["pairs"] = pairs;
    doc["vertices"] = ordered::array();
    for (std::size_t k = 0; k < region.size(); ++k) {
        doc["vertices"].push_back(ordered{
            {"vertex_id", k},
            {"error_vector", std::vector<double>(region.vertices[k].entries().begin(),
                                                 region.vertices[k].entries().end())},
            {"rule", rule_object(region.provenance[k], table)},
            {"multiplicity", region.multiplicity[k]}});
    }
    return doc.dump(2) + "\n";
}

std::string report_json(const SolveReport& report, const Region& region, const PmfTable& table,
                        const std::optional<Verification>& verification) {
    const std::size_t m = region.num_hypotheses;
    ordered doc;
    doc["format_version"] = kFormatVersion;
    doc["seed"] = report.seed;
    doc["objective"] = report.objective;
    doc["feasible"] = report.feasible;
    doc["error_vector"] = error_object(report.error_vector, m);
    doc["mixture"] = ordered::array();
    for (std::size_t c = 0; c < report.vertices.size(); ++c) {
        doc["mixture"].push_back(ordered{
            {"coefficient", report.coefficients[c]},
            {"vertex_id", report.vertices[c]},
            {"error_vector", error_object(region.vertices[report.vertices[c]], m)},
            {"rule", rule_object(region.provenance[report.vertices[c]], table)}});
    }
    doc["inequality_values"] = report.inequality_values;
    doc["equality_values"] = report.equality_values;
    doc["bound_used"] = report.bound_used;
    doc["bound_rationale"] = report.bound_rationale;
    doc["subsets_examined"] = report.subsets_examined;
    doc["refinement_iterations"] = report.refinement_iterations;
    doc["budget_exceeded"] = report.budget_exceeded;
    if (verification) {
        doc["verification"] = ordered{{"oracle_objective", verification->oracle_objective},
                                      {"gap", verification->gap},
                                      {"grid_steps", verification->grid_steps},
                                      {"tolerance", verification->tolerance},
                                      {"passed", verification->passed}};
    }
    return doc.dump(2) + "\n";
}

std::string region_svg(const Region& region, const std::vector<SvgMarker>& markers,
                       const std::string& title) {
    if (region.num_hypotheses != 2) {
        throw Error(ErrorKind::NotTwoDimensional, "figures need exactly two hypotheses");
    }
    constexpr double kSize = 480.0;
    constexpr double kMargin = 60.0;
    constexpr double kPlot = kSize - 2 * kMargin;
    auto sx = [](double p10) { return kMargin + kPlot * p10; };
    auto sy = [](double p01) { return kSize - kMargin - kPlot * p01; };
    auto xy = [&](double x, double y) { return fmt12(sx(x)) + "," + fmt12(sy(y)); };

    std::ostringstream o;
    o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kSize
      << "\" height=\"" << kSize << "\" viewBox=\"0 0 " << kSize << " " << kSize << "\">\n"
      << "<rect x=\"0\" y=\"0\" width=\"" << kSize << "\" height=\"" << kSize << "\" fill=\"white\"/>\n";
    if (!title.empty()) {
        o << "<text x=\"" << kSize / 2 << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
          << title << "</text>\n";
    }
    // Axes with ticks.
    o << "<g class=\"axes\" stroke=\"black\" stroke-width=\"1\">\n"
      << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(1) << "\" y2=\"" << sy(0) << "\"/>\n"
      << "<line x1=\"" << sx(0) << "\" y1=\"" << sy(0) << "\" x2=\"" << sx(0) << "\" y2=\"" << sy(1) << "\"/>\n";
    for (int t = 0; t <= 5; ++t) {
        const double v = t / 5.0;
        o << "<line x1=\"" << fmt12(sx(v)) << "\" y1=\"" << sy(0) << "\" x2=\"" << fmt12(sx(v))
          << "\" y2=\"" << sy(0) + 5 << "\"/>\n"
          << "<line x1=\"" << sx(0) - 5 << "\" y1=\"" << fmt12(sy(v)) << "\" x2=\"" << sx(0)
          << "\" y2=\"" << fmt12(sy(v)) << "\"/>\n";
    }
    o << "</g>\n<g class=\"tick-labels\" font-size=\"11\">\n";
    for (int t = 0; t <= 5; ++t) {
        const double v = t / 5.0;
        o << "<text x=\"" << fmt12(sx(v)) << "\" y=\"" << sy(0) + 18 << "\" text-anchor=\"middle\">"
          << fmt12(v) << "</text>\n"
          << "<text x=\"" << sx(0) - 8 << "\" y=\"" << fmt12(sy(v) + 4)
          << "\" text-anchor=\"end\">" << fmt12(v) << "</text>\n";
    }
    o << "</g>\n"
      << "<text class=\"axis-label\" x=\"" << sx(0.5) << "\" y=\"" << kSize - 18
      << "\" text-anchor=\"middle\" font-size=\"14\">p10</text>\n"
      << "<text class=\"axis-label\" x=\"18\" y=\"" << sy(0.5) << "\" text-anchor=\"middle\" font-size=\"14\""
      << " transform=\"rotate(-90 18 " << sy(0.5) << ")\">p01</text>\n";

    const auto hull = hull_polygon_2d(region);
    o << "<polygon class=\"hull\" fill=\"#dbe8f6\" stroke=\"#2a5d9f\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < hull.size(); ++i) {
        const auto& v = region.vertices[hull[i]];
        o << (i ? " " : "") << xy(v[0], v[1]);
    }
    o << "\"/>\n";

    for (std::size_t k = 0; k < region.size(); ++k) {
        const double cx = sx(region.vertices[k][0]);
        const double cy = sy(region.vertices[k][1]);
        o << "<polygon class=\"vertex-star\" data-vertex=\"" << k << "\" fill=\"#c0392b\" points=\"";
        for (int q = 0; q < 10; ++q) {
            const double r = q % 2 == 0 ? 7.0 : 3.0;
            const double a = -M_PI / 2 + q * M_PI / 5;
            o << (q ? " " : "") << fmt12(cx + r * std::cos(a)) << "," << fmt12(cy + r * std::sin(a));
        }
        o << "\"/>\n";
    }

    double legend_y = kMargin;
    for (const auto& m : markers) {
        const double cx = sx(m.point[0]);
        const double cy = sy(m.point[1]);
        auto shape = [&](double x, double y, const char* extra) {
            std::ostringstream s;
            switch (m.shape) {
                case MarkerShape::Square:
                    s << "<rect class=\"marker-square\"" << extra << " x=\"" << fmt12(x - 5) << "\" y=\""
                      << fmt12(y - 5) << "\" width=\"10\" height=\"10\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>";
                    break;
                case MarkerShape::Triangle:
                    s << "<polygon class=\"marker-triangle\"" << extra << " points=\"" << fmt12(x) << ","
                      << fmt12(y - 6) << " " << fmt12(x - 6) << "," << fmt12(y + 5) << " " << fmt12(x + 6)
                      << "," << fmt12(y + 5) << "\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>";
                    break;
                case MarkerShape::Circle:
                    s << "<circle class=\"marker-circle\"" << extra << " cx=\"" << fmt12(x) << "\" cy=\""
                      << fmt12(y) << "\" r=\"6\" fill=\"none\" stroke=\"black\" stroke-width=\"1.5\"/>";
                    break;
            }
            return s.str();
        };
        o << shape(cx, cy, "") << "\n";
        if (!m.label.empty()) {
            const double lx = sx(0.62);
            o << "<g class=\"legend\">" << shape(lx, legend_y, " data-legend=\"1\"") << "<text x=\""
              << fmt12(lx + 12) << "\" y=\"" << fmt12(legend_y + 4) << "\" font-size=\"12\">" << m.label
              << "</text></g>\n";
            legend_y += 18;
        }
    }
    o << "</svg>\n";
    return o.str();
}

} // namespace hypotest
