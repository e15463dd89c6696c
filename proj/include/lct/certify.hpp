#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lct/analysis.hpp"
#include "lct/chain.hpp"

namespace lct {

inline constexpr double kLipschitzSafetyFactor = 1.1;
inline constexpr int kDefaultLipschitzGrid = 7;

struct CertReport {
    ZeroRecord zero;
    double box_radius = 0.0;
    double lipschitz = 0.0;            // sampled lower estimate of the local Lipschitz constant of G
    double yorke_period_bound = 0.0;   // 2 pi / L, +inf for L = 0
    double certified_bound = 0.0;      // 2 pi / (1.1 L), the bound actually compared with T
    double period = 0.0;
    bool ejecting_certified = false;
    std::string notes;
};

struct MultiplicityReport {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<CertReport> certified_zeros;
    int n = 0;
    std::optional<double> lambda_star_hint;
    std::string verdict;
};

/// Largest operator 2-norm of the central-difference Jacobian of G sampled on the box of
/// half-width `radius` around `center`. The first min(dim, 5) axes are sampled on a uniform
/// grid (remaining coordinates at the center); fields of dimension above 5 add 10^4 Monte
/// Carlo points over the full box with seed 0x5EED. This is a lower estimate of the true
/// Lipschitz constant on the box.
[[nodiscard]] double lipschitz_estimate(const ExpandedField& field, const StatePoint& center, double radius,
                                        int grid_per_axis = kDefaultLipschitzGrid);

struct YorkeCheck {
    double bound;
    bool passes;  // period < bound, strictly
};

/// Minimal period bound 2 pi / L of nonconstant periodic orbits of an L-Lipschitz field.
[[nodiscard]] YorkeCheck yorke_check(double lipschitz, double period);

/// Default box radius 0.1 (1 + |lifted|_inf).
[[nodiscard]] double default_box_radius(const ZeroRecord& z);

/// Certifies the trivial pair at `z` as ejecting when T < 2 pi / (1.1 L) and the zero is
/// nondegenerate or Phi changes sign there.
[[nodiscard]] CertReport certify_ejecting(const ProblemSpec& p, const ZeroRecord& z, double radius,
                                          int grid_per_axis = kDefaultLipschitzGrid);

/// Scans (alpha, beta), certifies every zero and counts the certified sign-changing zeros.
[[nodiscard]] MultiplicityReport multiplicity_report(const ProblemSpec& p, double alpha, double beta,
                                                     int grid_n = 200, std::optional<double> radius = std::nullopt,
                                                     int grid_per_axis = kDefaultLipschitzGrid);

}  // namespace lct
