#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "lct/analysis.hpp"
#include "lct/certify.hpp"
#include "lct/chain.hpp"
#include "lct/orbit.hpp"

namespace lct::cli {

/// Everything a run needs, as read from the JSON configuration file.
struct RunConfig {
    std::string g;
    std::string phi;
    std::string f;
    double a = 0.0;
    int b = 0;
    double period = 0.0;

    double alpha = 0.0;
    double beta = 0.0;
    int grid_n = 200;

    ContinuationParams continuation;

    std::optional<double> certify_radius;
    int certify_grid = kDefaultLipschitzGrid;

    std::string out_dir = ".";

    [[nodiscard]] ProblemSpec problem() const;
};

/// Parses and validates; unknown keys and invalid values throw ConfigError naming the key path.
[[nodiscard]] RunConfig parse_config(const nlohmann::json& doc);
[[nodiscard]] RunConfig load_config(const std::string& path);

[[nodiscard]] nlohmann::json to_json(const StatePoint& xi);
[[nodiscard]] nlohmann::json to_json(const ZeroRecord& z);
[[nodiscard]] nlohmann::json to_json(const DegreeReport& r);
[[nodiscard]] nlohmann::json to_json(const CertReport& r);
[[nodiscard]] nlohmann::json to_json(const MultiplicityReport& r);

/// Header `lambda,q,p0,...,pb,sup_norm,diameter,arclength,residual`.
[[nodiscard]] std::string branch_csv_header(int b);
void write_branch_csv(std::ostream& os, const std::vector<BranchPoint>& points, int b);

/// Rows of a branch CSV. An empty stream yields no rows; a header or column mismatch throws SchemaError.
[[nodiscard]] std::vector<BranchPoint> read_branch_csv(std::istream& is, int b);

/// Degree and multiplicity reports for the configured interval.
[[nodiscard]] nlohmann::json cmd_analyze(const RunConfig& cfg);

/// Traces one branch per zero (or only `seed_zero`), writes `branch_zero<k>.csv` files into
/// cfg.out_dir and returns the summary document (also written as branch_summary.json).
[[nodiscard]] nlohmann::json cmd_branch(const RunConfig& cfg, std::optional<int> seed_zero = std::nullopt);

/// Per-row lift and direct-equation checks of a branch CSV.
[[nodiscard]] nlohmann::json cmd_verify(const RunConfig& cfg, const std::string& csv_path);

inline constexpr double kLiftThreshold = 1e-4;
inline constexpr double kResidualThreshold = 1e-3;

/// Entry point shared by the executable and the tests; returns the process exit code
/// (0 ok, 1 config, 2 admissibility, 3 numerical, 4 schema).
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace lct::cli
