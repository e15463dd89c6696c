#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

#include "lct/expr.hpp"
#include "lct/kernel.hpp"

namespace lct {

/// Point of R^{b+2} ordered (u, v0, v1, ..., vb).
using StatePoint = Eigen::VectorXd;

/// The triple (g, phi, f) of the forced equation
///   x'' = g(x, x', (gamma * phi(x, x'))(t)) + lambda f(t, x, x'),
/// with the gamma kernel and the forcing period.
///
/// Variable names are positional: g(x0, x1, x2), phi(p, q), f(t, x, v).
struct ProblemSpec {
    Expr g;
    Expr phi;
    Expr f;
    GammaKernel kernel;
    double period;

    /// Validates period > 0 and the T-periodicity of f (sampled at 50 points, tolerance 1e-9).
    ProblemSpec(Expr g, Expr phi, Expr f, GammaKernel kernel, double period);

    [[nodiscard]] int dim() const noexcept { return kernel.shape + 2; }

    [[nodiscard]] double eval_g(double x, double xdot, double delayed) const;
    [[nodiscard]] double eval_phi(double p, double q) const;
    [[nodiscard]] double eval_f(double t, double x, double v) const;
};

/// Parses the three expressions with their positional variable names.
[[nodiscard]] ProblemSpec make_problem(const std::string& g, const std::string& phi, const std::string& f, double a,
                                       int b, double period);

/// Autonomous field G and forcing F of the first-order system xi' = G(xi) + lambda F(t, xi).
///
/// Built from a ProblemSpec by expand(). A field given directly by G(xi) = A xi (F = 0) is also
/// supported; the certification and integration tests use it as a reference field.
class ExpandedField {
public:
    explicit ExpandedField(ProblemSpec problem);
    [[nodiscard]] static ExpandedField linear(Eigen::MatrixXd a, double period);

    [[nodiscard]] int dim() const noexcept { return dim_; }
    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] const ProblemSpec* problem() const noexcept { return problem_ ? &*problem_ : nullptr; }

    void autonomous(const Eigen::VectorXd& xi, Eigen::VectorXd& out) const;
    [[nodiscard]] Eigen::VectorXd autonomous(const Eigen::VectorXd& xi) const;

    /// Only the second component of F is nonzero.
    [[nodiscard]] double forcing_component(double t, const Eigen::VectorXd& xi) const;
    [[nodiscard]] Eigen::VectorXd forcing(double t, const Eigen::VectorXd& xi) const;

    /// G(xi) + lambda F(t, xi) into `out`.
    void rhs(double t, const Eigen::VectorXd& xi, double lambda, Eigen::VectorXd& out) const;

private:
    ExpandedField(Eigen::MatrixXd a, double period);

    std::optional<ProblemSpec> problem_;
    Eigen::MatrixXd linear_;
    int dim_;
    double period_;
};

[[nodiscard]] inline ExpandedField expand(const ProblemSpec& p) { return ExpandedField(p); }

/// (u, 0, phi(u,0), ..., phi(u,0)); a zero of G whenever Phi(u) = 0.
[[nodiscard]] StatePoint lifted_zero(const ProblemSpec& p, double u);

/// First two coordinate tracks (x, x') of a sampled trajectory (columns are samples).
struct ProjectedTrack {
    Eigen::VectorXd x;
    Eigen::VectorXd xdot;
};
[[nodiscard]] ProjectedTrack project(const Eigen::MatrixXd& states);

}  // namespace lct
