#include "lct/cli.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>

#include "CLI11.hpp"
#include "lct/errors.hpp"
#include "lct/oracle.hpp"

namespace lct::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void reject_unknown(const json& obj, const std::string& path, std::initializer_list<const char*> known) {
    if (!obj.is_object()) throw ConfigError(path + ": expected an object");
    for (const auto& [key, value] : obj.items()) {
        const bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) { return key == k; });
        if (!ok) throw ConfigError("unknown key '" + (path.empty() ? key : path + "." + key) + "'");
    }
}

template <class T>
T required(const json& obj, const std::string& path, const char* key) {
    if (!obj.contains(key)) throw ConfigError("missing key '" + path + "." + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("wrong type for '" + path + "." + key + "'");
    }
}

template <class T>
void optional_into(const json& obj, const std::string& path, const char* key, T& into) {
    if (!obj.contains(key)) return;
    try {
        into = obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError("wrong type for '" + path + "." + key + "'");
    }
}

std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

void write_json_file(const fs::path& path, const json& doc) {
    std::ofstream os(path);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << doc.dump(2) << '\n';
}

int exit_code(const Error& e) { return static_cast<int>(e.category()); }

}  // namespace

ProblemSpec RunConfig::problem() const { return make_problem(g, phi, f, a, b, period); }

RunConfig parse_config(const json& doc) {
    reject_unknown(doc, "", {"problem", "interval", "continuation", "certify", "output"});
    RunConfig cfg;

    if (!doc.contains("problem")) throw ConfigError("missing key 'problem'");
    const json& pr = doc.at("problem");
    reject_unknown(pr, "problem", {"g", "phi", "f", "a", "b", "T"});
    cfg.g = required<std::string>(pr, "problem", "g");
    cfg.phi = required<std::string>(pr, "problem", "phi");
    cfg.f = required<std::string>(pr, "problem", "f");
    cfg.a = required<double>(pr, "problem", "a");
    const double b_value = required<double>(pr, "problem", "b");
    if (b_value != std::floor(b_value) || b_value < 1.0 || b_value > 1e6) {
        throw ConfigError("problem.b must be a positive integer");
    }
    cfg.b = static_cast<int>(b_value);
    cfg.period = required<double>(pr, "problem", "T");
    if (!(cfg.a > 0.0)) throw ConfigError("problem.a must be positive");
    if (!(cfg.period > 0.0)) throw ConfigError("problem.T must be positive");

    if (!doc.contains("interval")) throw ConfigError("missing key 'interval'");
    const json& iv = doc.at("interval");
    reject_unknown(iv, "interval", {"alpha", "beta", "grid_n"});
    cfg.alpha = required<double>(iv, "interval", "alpha");
    cfg.beta = required<double>(iv, "interval", "beta");
    optional_into(iv, "interval", "grid_n", cfg.grid_n);
    if (!(cfg.alpha < cfg.beta)) throw ConfigError("interval.alpha must be below interval.beta");
    if (cfg.grid_n < 2) throw ConfigError("interval.grid_n must be at least 2");

    if (doc.contains("continuation")) {
        const json& c = doc.at("continuation");
        reject_unknown(c, "continuation",
                       {"initial_step", "min_step", "max_step", "max_steps", "newton_tol", "newton_max_iters", "shrink",
                        "grow", "lambda_max", "norm_max", "seed_lambda", "integration_tol"});
        auto& p = cfg.continuation;
        optional_into(c, "continuation", "initial_step", p.initial_step);
        optional_into(c, "continuation", "min_step", p.min_step);
        optional_into(c, "continuation", "max_step", p.max_step);
        optional_into(c, "continuation", "max_steps", p.max_steps);
        optional_into(c, "continuation", "newton_tol", p.newton_tol);
        optional_into(c, "continuation", "newton_max_iters", p.newton_max_iters);
        optional_into(c, "continuation", "shrink", p.shrink);
        optional_into(c, "continuation", "grow", p.grow);
        optional_into(c, "continuation", "lambda_max", p.lambda_max);
        optional_into(c, "continuation", "norm_max", p.norm_max);
        optional_into(c, "continuation", "seed_lambda", p.seed_lambda);
        optional_into(c, "continuation", "integration_tol", p.integration_tol);
    }
    cfg.continuation.validate();

    if (doc.contains("certify")) {
        const json& c = doc.at("certify");
        reject_unknown(c, "certify", {"radius", "grid"});
        if (c.contains("radius") && !c.at("radius").is_null()) {
            cfg.certify_radius = required<double>(c, "certify", "radius");
            if (!(*cfg.certify_radius > 0.0)) throw ConfigError("certify.radius must be positive");
        }
        optional_into(c, "certify", "grid", cfg.certify_grid);
        if (cfg.certify_grid < 2) throw ConfigError("certify.grid must be at least 2");
    }

    if (doc.contains("output")) {
        const json& o = doc.at("output");
        reject_unknown(o, "output", {"dir"});
        optional_into(o, "output", "dir", cfg.out_dir);
    }

    // Validates expressions, kernel and periodicity of f.
    (void)cfg.problem();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ConfigError("cannot open config file " + path);
    json doc;
    try {
        doc = json::parse(is);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    return parse_config(doc);
}

json to_json(const StatePoint& xi) { return json(std::vector<double>(xi.data(), xi.data() + xi.size())); }

json to_json(const ZeroRecord& z) {
    return {{"u_bar", z.u_bar},
            {"phi_prime", z.phi_prime},
            {"lifted", to_json(z.lifted)},
            {"det_fd", number_or_null(z.det_fd)},
            {"det_formula", z.det_formula},
            {"nondegenerate", z.nondegenerate},
            {"sign_change", z.sign_change}};
}

json to_json(const DegreeReport& r) {
    json zeros = json::array();
    for (const auto& z : r.zeros) zeros.push_back(to_json(z));
    return {{"interval", {r.alpha, r.beta}},
            {"zeros", zeros},
            {"deg_phi", r.deg_phi},
            {"deg_G", r.deg_G},
            {"deg_G_jacobian", r.jacobian_route_defined ? json(r.deg_G_jacobian) : json(nullptr)},
            {"jacobian_route_defined", r.jacobian_route_defined},
            {"routes_agree", r.routes_agree},
            {"admissible", r.admissible}};
}

json to_json(const CertReport& r) {
    return {{"zero", to_json(r.zero)},
            {"box_radius", r.box_radius},
            {"L", r.lipschitz},
            {"L_kind", "sampled lower estimate"},
            {"yorke_period_bound", number_or_null(r.yorke_period_bound)},
            {"certified_bound", number_or_null(r.certified_bound)},
            {"safety_factor", kLipschitzSafetyFactor},
            {"T", r.period},
            {"ejecting_certified", r.ejecting_certified},
            {"notes", r.notes}};
}

json to_json(const MultiplicityReport& r) {
    json certs = json::array();
    for (const auto& c : r.certified_zeros) certs.push_back(to_json(c));
    return {{"interval", {r.alpha, r.beta}},
            {"certified_zeros", certs},
            {"n", r.n},
            {"lambda_star_hint", r.lambda_star_hint ? json(*r.lambda_star_hint) : json(nullptr)},
            {"verdict", r.verdict}};
}

std::string branch_csv_header(int b) {
    std::string h = "lambda,q";
    for (int i = 0; i <= b; ++i) h += ",p" + std::to_string(i);
    return h + ",sup_norm,diameter,arclength,residual";
}

void write_branch_csv(std::ostream& os, const std::vector<BranchPoint>& points, int b) {
    os << branch_csv_header(b) << '\n';
    for (const auto& p : points) {
        os << format17(p.sp.lambda);
        for (Eigen::Index i = 0; i < p.sp.xi0.size(); ++i) os << ',' << format17(p.sp.xi0[i]);
        os << ',' << format17(p.sup_norm) << ',' << format17(p.diameter) << ',' << format17(p.arclength) << ','
           << format17(p.sp.residual) << '\n';
    }
}

std::vector<BranchPoint> read_branch_csv(std::istream& is, int b) {
    std::vector<BranchPoint> rows;
    std::string line;
    if (!std::getline(is, line)) return rows;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) return rows;
    if (line != branch_csv_header(b)) throw SchemaError("unexpected CSV header '" + line + "'");

    const std::size_t columns = static_cast<std::size_t>(b) + 7;
    std::size_t line_no = 1;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != columns) {
            throw SchemaError("line " + std::to_string(line_no) + ": expected " + std::to_string(columns) + " columns");
        }
        std::vector<double> v(columns);
        for (std::size_t c = 0; c < columns; ++c) {
            try {
                std::size_t used = 0;
                v[c] = std::stod(cells[c], &used);
                if (used != cells[c].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw SchemaError("line " + std::to_string(line_no) + ": malformed number '" + cells[c] + "'");
            }
        }
        BranchPoint p;
        p.sp.lambda = v[0];
        p.sp.xi0 = Eigen::Map<const Eigen::VectorXd>(v.data() + 1, b + 2);
        p.sup_norm = v[columns - 4];
        p.diameter = v[columns - 3];
        p.arclength = v[columns - 2];
        p.sp.residual = v[columns - 1];
        rows.push_back(std::move(p));
    }
    return rows;
}

json cmd_analyze(const RunConfig& cfg) {
    const ProblemSpec p = cfg.problem();
    const DegreeReport degree = degree_G(p, cfg.alpha, cfg.beta, cfg.grid_n);
    const MultiplicityReport mult =
        multiplicity_report(p, cfg.alpha, cfg.beta, cfg.grid_n, cfg.certify_radius, cfg.certify_grid);
    return {{"degree", to_json(degree)}, {"multiplicity", to_json(mult)}};
}

json cmd_branch(const RunConfig& cfg, std::optional<int> seed_zero) {
    const ProblemSpec p = cfg.problem();
    const ExpandedField field = expand(p);
    const DegreeReport degree = degree_G(p, cfg.alpha, cfg.beta, cfg.grid_n);
    MultiplicityReport mult =
        multiplicity_report(p, cfg.alpha, cfg.beta, cfg.grid_n, cfg.certify_radius, cfg.certify_grid);

    const int nzeros = static_cast<int>(degree.zeros.size());
    if (seed_zero && (*seed_zero < 0 || *seed_zero >= nzeros)) {
        throw ConfigError("--seed-zero " + std::to_string(*seed_zero) + " out of range (" + std::to_string(nzeros) +
                          " zeros)");
    }
    fs::create_directories(cfg.out_dir);

    json seeds = json::array();
    double max_lambda_all = 0.0;
    std::optional<double> fold_max;
    for (int k = 0; k < nzeros; ++k) {
        if (seed_zero && k != *seed_zero) continue;
        const ZeroRecord& z = degree.zeros[k];
        json entry = {{"zero_index", k}, {"u_bar", z.u_bar}, {"ejecting_certified", mult.certified_zeros[k].ejecting_certified}};
        const fs::path csv = fs::path(cfg.out_dir) / ("branch_zero" + std::to_string(k) + ".csv");
        entry["csv"] = csv.string();
        try {
            const SeededBranch traced = trace_from_equilibrium(field, z.lifted, cfg.continuation);
            const auto& pts = traced.branch.points;
            std::ofstream os(csv);
            if (!os) throw ConfigError("cannot write " + csv.string());
            write_branch_csv(os, pts, p.kernel.shape);

            double max_lambda = 0.0;
            for (const auto& bp : pts) max_lambda = std::max(max_lambda, bp.sp.lambda);
            json folds = json::array();
            for (const auto& f : find_folds(pts)) {
                folds.push_back({{"lambda", f.lambda}, {"q", pts[f.index].sp.xi0[0]}, {"kind", f.is_max ? "max" : "min"}});
                if (f.is_max) fold_max = std::max(fold_max.value_or(0.0), f.lambda);
            }
            max_lambda_all = std::max(max_lambda_all, max_lambda);
            entry["status"] = traced.degenerate ? "degenerate" : "ok";
            entry["termination"] = to_string(traced.branch.termination);
            entry["rows"] = pts.size();
            entry["max_lambda"] = max_lambda;
            entry["folds"] = folds;
            entry["note"] = traced.note;
            if (!traced.branch.message.empty()) entry["message"] = traced.branch.message;
        } catch (const Error& e) {
            entry["status"] = "failed";
            entry["error"] = e.what();
        }
        seeds.push_back(entry);
    }
    mult.lambda_star_hint = fold_max;

    json summary = {{"seeds", seeds},
                    {"max_lambda", max_lambda_all},
                    {"lambda_star_hint", fold_max ? json(*fold_max) : json(nullptr)},
                    {"multiplicity", to_json(mult)}};
    write_json_file(fs::path(cfg.out_dir) / "branch_summary.json", summary);
    return summary;
}

json cmd_verify(const RunConfig& cfg, const std::string& csv_path) {
    const ProblemSpec p = cfg.problem();
    const ExpandedField field = expand(p);
    std::ifstream is(csv_path);
    if (!is) throw SchemaError("cannot open CSV " + csv_path);
    const auto rows = read_branch_csv(is, p.kernel.shape);

    json out = json::array();
    bool all_pass = true;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        const StartingPoint& sp = rows[k].sp;
        json row = {{"row", k}, {"lambda", sp.lambda}};
        try {
            const DenseRun run = integrate(field, sp.lambda, sp.xi0, 0.0, p.period);
            const double periodicity = (run.final_state - sp.xi0).cwiseAbs().maxCoeff();
            const double lift = verify_lift(p, sp);
            const double residual = direct_residual(p, sp.lambda, track_of(run, 0, p.period));
            const bool pass = lift <= kLiftThreshold && residual <= kResidualThreshold;
            row["verify_lift"] = lift;
            row["direct_residual"] = residual;
            row["periodicity_residual"] = periodicity;
            row["pass"] = pass;
            all_pass = all_pass && pass;
        } catch (const Error& e) {
            row["pass"] = false;
            row["error"] = e.what();
            all_pass = false;
        }
        out.push_back(row);
    }
    return {{"csv", csv_path},
            {"thresholds", {{"verify_lift", kLiftThreshold}, {"direct_residual", kResidualThreshold}}},
            {"rows", out},
            {"all_pass", all_pass}};
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Linear-chain-trick analysis of gamma-delay forced oscillators"};
    app.require_subcommand(1);
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<int> seed_zero;
    std::string csv_path;

    auto* analyze = app.add_subcommand("analyze", "degree and multiplicity reports (JSON)");
    auto* branch = app.add_subcommand("branch", "trace branches of starting points (CSV per zero)");
    auto* verify = app.add_subcommand("verify", "check branch rows against the delay equation (JSON)");
    for (auto* sub : {analyze, branch, verify}) {
        sub->add_option("--config", config_path, "configuration file")->required();
        sub->add_option("--out", out_dir, "output directory");
    }
    branch->add_option("--seed-zero", seed_zero, "trace only the branch of this zero index");
    verify->add_option("--csv", csv_path, "branch CSV to verify")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err) == 0 ? 0 : static_cast<int>(Error::Category::Config);
    }

    try {
        RunConfig cfg = load_config(config_path);
        if (out_dir) cfg.out_dir = *out_dir;
        json doc;
        std::string file_name;
        if (*analyze) {
            doc = cmd_analyze(cfg);
            file_name = "analysis.json";
        } else if (*branch) {
            doc = cmd_branch(cfg, seed_zero);
        } else {
            doc = cmd_verify(cfg, csv_path);
            file_name = "verification.json";
        }
        out << doc.dump(2) << '\n';
        if (out_dir && !file_name.empty()) {
            fs::create_directories(*out_dir);
            write_json_file(fs::path(*out_dir) / file_name, doc);
        }
        return 0;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return static_cast<int>(Error::Category::Numerical);
    }
}

}  // namespace lct::cli
