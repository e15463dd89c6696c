#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "lct/chain.hpp"

namespace lct {

namespace tolerances {
inline constexpr double kZero = 1e-10;        // |Phi(u)| at a reported zero
inline constexpr double kDegenerate = 1e-8;   // |Phi'(u)| at or below this is degenerate
inline constexpr double kFdStep = 1e-6;       // central finite differences
inline constexpr double kMerge = 1e-9;        // zeros closer than this are one zero
}  // namespace tolerances

/// A zero of Phi together with its lift and both determinant routes.
struct ZeroRecord {
    double u_bar = 0.0;
    double phi_prime = 0.0;
    StatePoint lifted;
    double det_fd = 0.0;       // det of the finite-difference Jacobian of the modified field at `lifted`
    double det_formula = 0.0;  // (-1)^(b-1) a^b Phi'(u_bar)
    bool nondegenerate = false;
    bool sign_change = false;
};

struct DegreeReport {
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<ZeroRecord> zeros;
    int deg_phi = 0;
    int deg_G = 0;               // (-1)^(b-1) deg_phi
    int deg_G_jacobian = 0;      // sum of sign(det_fd) over lifted zeros
    bool jacobian_route_defined = true;  // false when some zero is degenerate
    bool admissible = false;
    bool routes_agree = true;
};

/// Phi(u) = g(u, 0, phi(u, 0)).
[[nodiscard]] double phi_eval(const ProblemSpec& p, double u);

/// Phi'(u) = d1 g + d3 g * d1 phi at (u, 0, phi(u,0)), from symbolic partials; falls back to a
/// central difference where a partial is undefined (e.g. abs at its kink).
[[nodiscard]] double phi_prime(const ProblemSpec& p, double u);

/// The modified field: G with the third component a(phi(u, v0) - vb). Same zeros as G and
/// admissibly homotopic to it, so it carries the same degree.
[[nodiscard]] Eigen::VectorXd modified_field(const ProblemSpec& p, const Eigen::VectorXd& xi);

/// Central-difference Jacobian (step h) of any map R^n -> R^m.
[[nodiscard]] Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map,
                                          const Eigen::VectorXd& at, double h = tolerances::kFdStep);

/// All zeros of Phi in (alpha, beta) found by sign-change scanning on grid_n+1 points and bisection.
/// Throws AdmissibilityError when Phi vanishes at an endpoint.
[[nodiscard]] std::vector<ZeroRecord> scan_zeros(const ProblemSpec& p, double alpha, double beta, int grid_n = 200);

/// Brouwer degree of Phi on (alpha, beta) as the sum of sign(Phi') over zeros, cross-checked
/// against (sign Phi(beta) - sign Phi(alpha)) / 2. Throws DegenerateZeroError, AdmissibilityError.
[[nodiscard]] int degree_phi(const ProblemSpec& p, double alpha, double beta, int grid_n = 200);

/// Degree of G on (alpha, beta) x R^{b+1} by the product formula and by Jacobian-sign summation.
/// Throws CrossCheckError when the two routes disagree.
[[nodiscard]] DegreeReport degree_G(const ProblemSpec& p, double alpha, double beta, int grid_n = 200);

}  // namespace lct
