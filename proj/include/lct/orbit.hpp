#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "lct/chain.hpp"
#include "lct/ode.hpp"

namespace lct {

inline constexpr int kSamplesPerPeriod = 512;
inline constexpr double kIntegrationTol = 1e-10;
// Central-difference step for the field Jacobian inside the variational equations.
inline constexpr double kMonodromyStep = 1e-7;
// sigma_min(M - I) at or below this is treated as an eigenvalue 1 of the monodromy.
inline constexpr double kSingularMonodromy = 1e-7;

/// (lambda, xi(0)) of a T-periodic solution of xi' = G(xi) + lambda F(t, xi).
struct StartingPoint {
    double lambda = 0.0;
    StatePoint xi0;
    double residual = 0.0;  // |xi(T) - xi(0)|_inf
};

struct BranchPoint {
    StartingPoint sp;
    double sup_norm = 0.0;   // max |x(t)| over one period
    double diameter = 0.0;   // max x - min x over one period
    double arclength = 0.0;  // cumulative along the branch in (lambda, xi)
};

struct ContinuationParams {
    double initial_step = 0.01;
    double min_step = 1e-6;
    double max_step = 0.02;
    int max_steps = 2000;
    double newton_tol = 1e-10;
    int newton_max_iters = 25;
    double shrink = 0.5;
    double grow = 1.3;
    double lambda_max = 1.0;
    double norm_max = 100.0;
    double seed_lambda = 1e-3;
    double integration_tol = kIntegrationTol;

    void validate() const;  // throws ConfigError
};

/// Adaptive DOPRI5 run of the expanded system; `samples` dense points over [t0, t1].
[[nodiscard]] DenseRun integrate(const ExpandedField& field, double lambda, const StatePoint& xi0, double t0, double t1,
                                 double tol = kIntegrationTol, int samples = kSamplesPerPeriod);

/// xi(T) for the solution starting at xi0 at t = 0.
[[nodiscard]] StatePoint period_map(const ExpandedField& field, double lambda, const StatePoint& xi0,
                                    double tol = kIntegrationTol);

/// Time-T map with its derivatives from the variational equations.
struct PeriodMapDerivative {
    StatePoint end;
    Eigen::MatrixXd monodromy;  // d xi(T) / d xi0
    Eigen::VectorXd d_lambda;   // d xi(T) / d lambda
};
[[nodiscard]] PeriodMapDerivative period_map_derivative(const ExpandedField& field, double lambda,
                                                        const StatePoint& xi0, double tol = kIntegrationTol,
                                                        double fd_step = kMonodromyStep);

/// Damped Newton on xi(T) - xi(0) = 0. Throws NoConvergenceError and SingularJacobianError.
[[nodiscard]] StartingPoint newton_periodic(const ExpandedField& field, double lambda, const StatePoint& guess,
                                            const ContinuationParams& params = {});

struct OrbitMetrics {
    double sup_norm = 0.0;
    double diameter = 0.0;
    double min_x = 0.0;
    double max_x = 0.0;
};
/// Metrics of the first coordinate over the sampled run.
[[nodiscard]] OrbitMetrics orbit_metrics(const DenseRun& run);

enum class Termination { LambdaZero, LambdaMax, NormMax, MaxSteps, ClosedLoop, CorrectorFailure, Degenerate, Seed };
[[nodiscard]] const char* to_string(Termination t);

struct BranchResult {
    std::vector<BranchPoint> points;
    Termination termination = Termination::MaxSteps;
    std::string message;
};

/// Pseudo-arclength continuation in (lambda, xi) from a converged seed. `direction`, if given,
/// orients the first step (size dim+1, lambda first); otherwise the tangent with growing lambda
/// is taken. Stops on lambda < 0 or > lambda_max (landing exactly on the bound), |xi| > norm_max,
/// step budget, a closed loop, or corrector failure at the minimum step.
[[nodiscard]] BranchResult continue_branch(const ExpandedField& field, const StartingPoint& seed,
                                           const ContinuationParams& params,
                                           std::optional<Eigen::VectorXd> direction = std::nullopt);

/// Whether the monodromy at the equilibrium `eq` (lambda = 0) has an eigenvalue 1, i.e. the
/// unforced linearization is T-resonant and the branch may stay in the lambda = 0 slice.
[[nodiscard]] bool is_resonant_equilibrium(const ExpandedField& field, const StatePoint& eq,
                                           double tol = kIntegrationTol);

struct SeededBranch {
    BranchResult branch;
    bool degenerate = false;
    std::string note;
};

/// Traces the branch emanating from the trivial pair (0, eq): Newton at seed_lambda from `eq`,
/// then continuation in both tangent directions. Rows are in traversal order starting at the
/// lambda = 0 end nearest `eq`.
[[nodiscard]] SeededBranch trace_from_equilibrium(const ExpandedField& field, const StatePoint& eq,
                                                  const ContinuationParams& params);

struct Fold {
    std::size_t index;
    double lambda;
    bool is_max;
};
[[nodiscard]] std::vector<Fold> find_folds(const std::vector<BranchPoint>& points);

/// Starting points at exactly `lambda`, one per crossing of the polyline, Newton-corrected.
[[nodiscard]] std::vector<StartingPoint> solutions_at_lambda(const ExpandedField& field,
                                                             const std::vector<BranchPoint>& points, double lambda,
                                                             const ContinuationParams& params = {});

/// First return time of the autonomous flow to xi0 (upward crossing of the plane through xi0
/// normal to G(xi0)), searched on (0, t_max].
[[nodiscard]] std::optional<double> minimal_period(const ExpandedField& field, const StatePoint& xi0, double t_max,
                                                   double tol = 1e-12);

/// (lambda, xi) distance between two polylines: min over vertices of either to segments of the other.
[[nodiscard]] double branch_distance(const std::vector<BranchPoint>& a, const std::vector<BranchPoint>& b);

}  // namespace lct
