#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "json.hpp"
#include "lct/cli.hpp"
#include "lct/errors.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json example_config() {
    return {{"problem", {{"g", "-x0*(1+x2)"}, {"phi", "q-p"}, {"f", "1+x*sin(2*pi*t)"}, {"a", 2}, {"b", 2}, {"T", 1}}},
            {"interval", {{"alpha", -0.5}, {"beta", 1.5}}}};
}

struct TempDir {
    fs::path path;
    TempDir() {
        std::random_device rd;
        path = fs::temp_directory_path() / ("lct_cli_" + std::to_string(rd()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    [[nodiscard]] std::string file(const std::string& name) const { return (path / name).string(); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(file(name)) << text;
        return file(name);
    }
};

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "lct");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = lct::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

json read_json(const std::string& path) {
    std::ifstream is(path);
    return json::parse(is);
}

}  // namespace

TEST_CASE("configuration parsing") {
    const auto cfg = lct::cli::parse_config(example_config());
    CHECK(cfg.b == 2);
    CHECK(cfg.a == 2.0);
    CHECK(cfg.period == 1.0);
    CHECK(cfg.grid_n == 200);
    CHECK_FALSE(cfg.certify_radius.has_value());
    CHECK(cfg.continuation.lambda_max == 1.0);
    CHECK(cfg.problem().kernel.shape == 2);

    json bad = example_config();
    bad["problem"]["b"] = 0;
    CHECK_THROWS_AS((void)lct::cli::parse_config(bad), lct::ConfigError);

    bad = example_config();
    bad["problem"]["T"] = 0;
    CHECK_THROWS_AS((void)lct::cli::parse_config(bad), lct::ConfigError);

    bad = example_config();
    bad["interval"]["gamma"] = 1;
    try {
        (void)lct::cli::parse_config(bad);
        FAIL("expected unknown key");
    } catch (const lct::ConfigError& e) {
        CHECK(std::string(e.what()).find("interval.gamma") != std::string::npos);
    }

    bad = example_config();
    bad["continuation"] = {{"min_step", 1.0}};
    CHECK_THROWS_AS((void)lct::cli::parse_config(bad), lct::ConfigError);

    bad = example_config();
    bad["problem"].erase("g");
    CHECK_THROWS_AS((void)lct::cli::parse_config(bad), lct::ConfigError);
}

TEST_CASE("branch CSV round trip and schema errors") {
    std::vector<lct::BranchPoint> pts(2);
    pts[0].sp = {0.0, lct::testing::vec({0.1, 0.2, 0.3, 0.4}), 1e-12};
    pts[1].sp = {0.1234567890123456789, lct::testing::vec({-1.0 / 3, 2, 3, 4}), 3e-11};
    pts[1].sup_norm = 1.5;
    pts[1].diameter = 0.25;
    pts[1].arclength = 0.7;
    std::ostringstream os;
    lct::cli::write_branch_csv(os, pts, 2);
    CHECK(os.str().rfind(lct::cli::branch_csv_header(2) + "\n", 0) == 0);
    CHECK(lct::cli::branch_csv_header(2) == "lambda,q,p0,p1,p2,sup_norm,diameter,arclength,residual");

    std::istringstream is(os.str());
    const auto back = lct::cli::read_branch_csv(is, 2);
    REQUIRE(back.size() == 2);
    CHECK(back[1].sp.lambda == pts[1].sp.lambda);
    CHECK(back[1].sp.xi0 == pts[1].sp.xi0);
    CHECK(back[1].diameter == 0.25);

    std::istringstream empty("");
    CHECK(lct::cli::read_branch_csv(empty, 2).empty());
    std::istringstream wrong_b(os.str());
    CHECK_THROWS_AS((void)lct::cli::read_branch_csv(wrong_b, 3), lct::SchemaError);
    std::istringstream bad_row(lct::cli::branch_csv_header(2) + "\n1,2,3\n");
    CHECK_THROWS_AS((void)lct::cli::read_branch_csv(bad_row, 2), lct::SchemaError);
    std::istringstream bad_num(lct::cli::branch_csv_header(2) + "\n1,2,3,4,5,x,7,8,9\n");
    CHECK_THROWS_AS((void)lct::cli::read_branch_csv(bad_num, 2), lct::SchemaError);
}

TEST_CASE("analyze") {
    TempDir dir;
    const auto cfg = dir.write("config.json", example_config().dump());
    const auto ok = invoke({"analyze", "--config", cfg, "--out", dir.path.string()});
    REQUIRE(ok.code == 0);
    const json doc = read_json(dir.file("analysis.json"));
    CHECK(doc == json::parse(ok.out));
    CHECK(doc["degree"]["zeros"].size() == 2);
    CHECK(doc["degree"]["deg_phi"] == 0);
    CHECK(doc["multiplicity"]["n"] == 2);

    json edge = example_config();
    edge["interval"]["beta"] = 1.0;
    const auto bad = invoke({"analyze", "--config", dir.write("edge.json", edge.dump())});
    CHECK(bad.code == 2);
    CHECK(bad.err.find("error:") != std::string::npos);

    CHECK(invoke({"analyze", "--config", dir.file("missing.json")}).code == 1);
    CHECK(invoke({"analyze"}).code == 1);
    CHECK(invoke({"bogus"}).code == 1);
}

TEST_CASE("branch and verify on the worked example") {
    TempDir dir;
    const auto cfg = dir.write("config.json", example_config().dump());
    const auto run = invoke({"branch", "--config", cfg, "--out", dir.path.string()});
    REQUIRE(run.code == 0);
    const json summary = read_json(dir.file("branch_summary.json"));
    REQUIRE(summary["seeds"].size() == 2);
    for (const auto& s : summary["seeds"]) {
        CHECK(s["status"] == "ok");
        CHECK(s["max_lambda"].get<double>() >= 0.2);
    }
    CHECK(summary["lambda_star_hint"].get<double>() == doctest::Approx(0.25).epsilon(0.4));

    const auto verified = invoke({"verify", "--config", cfg, "--csv", dir.file("branch_zero0.csv"), "--out",
                                  dir.path.string()});
    REQUIRE(verified.code == 0);
    const json v = read_json(dir.file("verification.json"));
    CHECK(v["all_pass"] == true);
    CHECK(v["rows"].size() == summary["seeds"][0]["rows"]);

    // Perturbing q by 0.1 in one row breaks periodicity and the lift.
    std::ifstream in(dir.file("branch_zero0.csv"));
    std::string header, first, second;
    std::getline(in, header);
    std::getline(in, first);
    std::getline(in, second);
    std::istringstream fields(second);
    std::vector<double> values;
    for (std::string cell; std::getline(fields, cell, ',');) values.push_back(std::stod(cell));
    values[1] += 0.1;
    std::ostringstream row;
    row.precision(17);
    for (std::size_t k = 0; k < values.size(); ++k) row << (k ? "," : "") << values[k];
    const auto tampered = dir.write("tampered.csv", header + "\n" + row.str() + "\n");
    const auto check = invoke({"verify", "--config", cfg, "--csv", tampered});
    REQUIRE(check.code == 0);
    const json t = json::parse(check.out);
    CHECK(t["all_pass"] == false);
    CHECK(t["rows"][0]["pass"] == false);

    CHECK(invoke({"verify", "--config", cfg, "--csv", dir.write("empty.csv", "")}).code == 0);
    CHECK(invoke({"verify", "--config", cfg, "--csv", dir.write("bad.csv", "lambda,q\n0,0\n")}).code == 4);
}

TEST_CASE("branch options") {
    TempDir dir;
    json c = example_config();
    c["continuation"] = {{"lambda_max", 0.0}};
    const auto cfg = dir.write("config.json", c.dump());
    const auto one = invoke({"branch", "--config", cfg, "--out", dir.path.string(), "--seed-zero", "1"});
    REQUIRE(one.code == 0);
    const json summary = json::parse(one.out);
    REQUIRE(summary["seeds"].size() == 1);
    CHECK(summary["seeds"][0]["zero_index"] == 1);
    CHECK(summary["seeds"][0]["rows"] == 1);
    CHECK(fs::exists(dir.file("branch_zero1.csv")));
    CHECK_FALSE(fs::exists(dir.file("branch_zero0.csv")));

    CHECK(invoke({"branch", "--config", cfg, "--out", dir.path.string(), "--seed-zero", "5"}).code == 1);
}

TEST_CASE("resonant configuration is reported as degenerate") {
    TempDir dir;
    const json c = {{"problem", {{"g", "-x0"}, {"phi", "0"}, {"f", "sin(t)"}, {"a", 1}, {"b", 1}, {"T", 6.283185307179586}}},
                    {"interval", {{"alpha", -1}, {"beta", 1}}}};
    const auto run = invoke({"branch", "--config", dir.write("config.json", c.dump()), "--out", dir.path.string()});
    REQUIRE(run.code == 0);
    const json summary = json::parse(run.out);
    REQUIRE(summary["seeds"].size() == 1);
    CHECK(summary["seeds"][0]["status"] == "degenerate");
    CHECK(summary["seeds"][0]["rows"] == 1);
}
