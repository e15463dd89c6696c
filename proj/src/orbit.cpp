#include "lct/orbit.hpp"

#include <cmath>
#include <limits>

#include "lct/errors.hpp"

namespace lct {

namespace {

struct FieldRhs {
    const ExpandedField& field;
    double lambda;
    void operator()(double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) const { field.rhs(t, y, lambda, out); }
};

double inf_norm(const Eigen::VectorXd& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

double residual_tolerance(const StatePoint& xi) { return 1e-8 * (1.0 + inf_norm(xi)); }

Eigen::VectorXd pack(double lambda, const StatePoint& xi) {
    Eigen::VectorXd z(xi.size() + 1);
    z[0] = lambda;
    z.tail(xi.size()) = xi;
    return z;
}

// Jacobian of H(lambda, xi) = xi(T) - xi, lambda column first.
Eigen::MatrixXd extended_jacobian(const PeriodMapDerivative& d) {
    const Eigen::Index n = d.end.size();
    Eigen::MatrixXd jac(n, n + 1);
    jac.col(0) = d.d_lambda;
    jac.rightCols(n) = d.monodromy - Eigen::MatrixXd::Identity(n, n);
    return jac;
}

Eigen::VectorXd null_direction(const Eigen::MatrixXd& jac) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeFullV);
    Eigen::VectorXd t = svd.matrixV().col(jac.cols() - 1);
    return t / t.norm();
}

BranchPoint make_branch_point(const ExpandedField& field, const StartingPoint& sp, double tol) {
    const DenseRun run = integrate(field, sp.lambda, sp.xi0, 0.0, field.period(), tol);
    const OrbitMetrics m = orbit_metrics(run);
    BranchPoint bp;
    bp.sp = sp;
    bp.sp.residual = inf_norm(run.final_state - sp.xi0);
    bp.sup_norm = m.sup_norm;
    bp.diameter = m.diameter;
    return bp;
}

double point_segment_distance(const Eigen::VectorXd& p, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    const Eigen::VectorXd ab = b - a;
    const double len2 = ab.squaredNorm();
    const double s = len2 == 0.0 ? 0.0 : std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + s * ab)).norm();
}

}  // namespace

void ContinuationParams::validate() const {
    if (!(min_step > 0.0 && min_step <= initial_step && initial_step <= max_step)) {
        throw ConfigError("continuation steps must satisfy 0 < min_step <= initial_step <= max_step");
    }
    if (max_steps < 0 || newton_max_iters < 1) throw ConfigError("continuation iteration limits must be positive");
    if (!(shrink > 0.0 && shrink < 1.0) || !(grow >= 1.0)) throw ConfigError("need 0 < shrink < 1 <= grow");
    if (lambda_max < 0.0 || !(norm_max > 0.0)) throw ConfigError("lambda_max >= 0 and norm_max > 0 required");
    if (!(seed_lambda > 0.0) || !(newton_tol > 0.0) || !(integration_tol > 0.0)) {
        throw ConfigError("seed_lambda, newton_tol and integration_tol must be positive");
    }
}

DenseRun integrate(const ExpandedField& field, double lambda, const StatePoint& xi0, double t0, double t1, double tol,
                   int samples) {
    if (!xi0.allFinite()) throw StepUnderflowError("non-finite initial state", t0);
    OdeOptions opt;
    opt.tol = tol;
    opt.samples = samples;
    return dopri5(FieldRhs{field, lambda}, xi0, t0, t1, opt);
}

StatePoint period_map(const ExpandedField& field, double lambda, const StatePoint& xi0, double tol) {
    return integrate(field, lambda, xi0, 0.0, field.period(), tol, 0).final_state;
}

PeriodMapDerivative period_map_derivative(const ExpandedField& field, double lambda, const StatePoint& xi0, double tol,
                                          double fd_step) {
    // Orbit, fundamental matrix and lambda-sensitivity integrated together so the error control sees the
    // derivatives directly. The Jacobian of the field is a central difference of the field itself.
    const Eigen::Index n = xi0.size();
    Eigen::VectorXd y0 = Eigen::VectorXd::Zero(n + n * n + n);
    y0.head(n) = xi0;
    Eigen::Map<Eigen::MatrixXd>(y0.data() + n, n, n).setIdentity();

    Eigen::VectorXd xi(n), probe(n), plus(n), minus(n), slope(n);
    Eigen::MatrixXd jac(n, n);
    auto rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& out) {
        out.resize(y.size());
        xi = y.head(n);
        field.rhs(t, xi, lambda, slope);
        out.head(n) = slope;
        probe = xi;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double h = fd_step * std::max(1.0, std::abs(xi[j]));
            probe[j] = xi[j] + h;
            field.rhs(t, probe, lambda, plus);
            probe[j] = xi[j] - h;
            field.rhs(t, probe, lambda, minus);
            probe[j] = xi[j];
            jac.col(j) = (plus - minus) / (2.0 * h);
        }
        const Eigen::Map<const Eigen::MatrixXd> fund(y.data() + n, n, n);
        Eigen::Map<Eigen::MatrixXd>(out.data() + n, n, n) = jac * fund;
        out.tail(n) = jac * y.tail(n) + field.forcing(t, xi);
    };
    OdeOptions opt;
    opt.tol = tol;
    opt.samples = 0;
    const Eigen::VectorXd end = dopri5(rhs, y0, 0.0, field.period(), opt).final_state;

    PeriodMapDerivative d;
    d.end = end.head(n);
    d.monodromy = Eigen::Map<const Eigen::MatrixXd>(end.data() + n, n, n);
    d.d_lambda = end.tail(n);
    return d;
}

StartingPoint newton_periodic(const ExpandedField& field, double lambda, const StatePoint& guess,
                              const ContinuationParams& params) {
    if (!guess.allFinite()) throw NoConvergenceError("non-finite Newton guess");
    if (inf_norm(guess) > params.norm_max) throw NoConvergenceError("Newton guess lies outside norm_max");

    const Eigen::Index n = guess.size();
    StatePoint xi = guess;
    double res = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < params.newton_max_iters; ++iter) {
        PeriodMapDerivative d;
        try {
            d = period_map_derivative(field, lambda, xi, params.integration_tol);
        } catch (const StepUnderflowError& e) {
            throw NoConvergenceError(std::string("integration failed during Newton: ") + e.what());
        }
        const Eigen::VectorXd r = d.end - xi;
        res = inf_norm(r);
        if (res <= params.newton_tol * (1.0 + inf_norm(xi))) return {lambda, xi, res};

        const Eigen::MatrixXd jac = d.monodromy - Eigen::MatrixXd::Identity(n, n);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(jac, Eigen::ComputeThinU | Eigen::ComputeThinV);
        if (svd.singularValues()(n - 1) <= kSingularMonodromy) {
            throw SingularJacobianError("monodromy has an eigenvalue 1 (sigma_min(M - I) = " +
                                        std::to_string(svd.singularValues()(n - 1)) + ")");
        }
        const Eigen::VectorXd delta = svd.solve(-r);

        // Halve the step until the residual drops; the last trial is taken regardless.
        double alpha = 1.0;
        StatePoint next = xi + delta;
        for (int k = 0; k < 6; ++k, alpha *= 0.5) {
            next = xi + alpha * delta;
            try {
                if (inf_norm(period_map(field, lambda, next, params.integration_tol) - next) < res) break;
            } catch (const StepUnderflowError&) {
            }
        }
        const bool stalled = inf_norm(next - xi) <= 1e-13 * (1.0 + inf_norm(xi));
        xi = next;
        if (!xi.allFinite() || inf_norm(xi) > params.norm_max) throw NoConvergenceError("Newton iterate left norm_max");
        if (stalled && res <= residual_tolerance(xi)) return {lambda, xi, res};
    }
    const StatePoint end = period_map(field, lambda, xi, params.integration_tol);
    res = inf_norm(end - xi);
    if (res <= residual_tolerance(xi)) return {lambda, xi, res};
    throw NoConvergenceError("Newton did not converge in " + std::to_string(params.newton_max_iters) +
                             " iterations (residual " + std::to_string(res) + ")");
}

OrbitMetrics orbit_metrics(const DenseRun& run) {
    const Eigen::VectorXd x = run.states.row(0).transpose();
    OrbitMetrics m;
    m.min_x = x.minCoeff();
    m.max_x = x.maxCoeff();
    m.sup_norm = x.cwiseAbs().maxCoeff();
    m.diameter = m.max_x - m.min_x;
    return m;
}

const char* to_string(Termination t) {
    switch (t) {
        case Termination::LambdaZero: return "lambda_zero";
        case Termination::LambdaMax: return "lambda_max";
        case Termination::NormMax: return "norm_max";
        case Termination::MaxSteps: return "max_steps";
        case Termination::ClosedLoop: return "closed_loop";
        case Termination::CorrectorFailure: return "corrector_failure";
        case Termination::Degenerate: return "degenerate";
        case Termination::Seed: return "seed_only";
    }
    return "unknown";
}

BranchResult continue_branch(const ExpandedField& field, const StartingPoint& seed, const ContinuationParams& params,
                             std::optional<Eigen::VectorXd> direction) {
    params.validate();
    const Eigen::Index n = seed.xi0.size();
    const double tol = params.integration_tol;
    BranchResult result;

    Eigen::VectorXd z = pack(seed.lambda, seed.xi0);
    Eigen::VectorXd tangent;
    if (direction) {
        tangent = *direction / direction->norm();
    } else {
        tangent = null_direction(extended_jacobian(period_map_derivative(field, seed.lambda, seed.xi0, tol)));
        if (tangent[0] < 0.0) tangent = -tangent;
    }

    std::vector<Eigen::VectorXd> path{z};
    std::vector<Eigen::VectorXd> directions{tangent};
    result.points.push_back(make_branch_point(field, seed, tol));

    const auto land = [&](const Eigen::VectorXd& from, const Eigen::VectorXd& to, double bound) -> bool {
        const double s = (bound - from[0]) / (to[0] - from[0]);
        const StatePoint guess = from.tail(n) + s * (to.tail(n) - from.tail(n));
        try {
            const StartingPoint sp = newton_periodic(field, bound, guess, params);
            BranchPoint bp = make_branch_point(field, sp, tol);
            bp.arclength = result.points.back().arclength + (pack(bound, sp.xi0) - from).norm();
            result.points.push_back(bp);
            return true;
        } catch (const Error&) {
            return false;
        }
    };

    double ds = params.initial_step;
    for (int step = 0; step < params.max_steps; ++step) {
        bool accepted = false;
        Eigen::VectorXd z_new;
        int iterations = 0;
        while (!accepted) {
            z_new = z + ds * tangent;
            bool failed = false;
            double first_res = -1.0;
            for (iterations = 1; iterations <= params.newton_max_iters; ++iterations) {
                PeriodMapDerivative d;
                try {
                    d = period_map_derivative(field, z_new[0], z_new.tail(n), tol);
                } catch (const StepUnderflowError&) {
                    failed = true;
                    break;
                }
                const Eigen::VectorXd h = d.end - z_new.tail(n);
                const double res = inf_norm(h);
                if (first_res < 0.0) first_res = res;
                if (!std::isfinite(res) || res > 1e3 * (first_res + 1e-8)) {
                    failed = true;
                    break;
                }
                Eigen::MatrixXd sys(n + 1, n + 1);
                sys.topRows(n) = extended_jacobian(d);
                sys.row(n) = tangent.transpose();
                Eigen::VectorXd rhs(n + 1);
                rhs.head(n) = -h;
                rhs[n] = -(tangent.dot(z_new - z) - ds);
                const Eigen::VectorXd delta = sys.fullPivLu().solve(rhs);
                if (!delta.allFinite()) {
                    failed = true;
                    break;
                }
                z_new += delta;
                const double tiny = 1e-12 * (1.0 + inf_norm(z_new));
                if (res <= params.newton_tol * (1.0 + inf_norm(z_new.tail(n))) ||
                    (inf_norm(delta) <= tiny && res <= residual_tolerance(z_new.tail(n)))) {
                    // Confirm on the adaptive map at the corrected point.
                    const double final_res =
                        inf_norm(period_map(field, z_new[0], z_new.tail(n), tol) - z_new.tail(n));
                    if (final_res <= residual_tolerance(z_new.tail(n))) accepted = true;
                    else continue;
                    break;
                }
            }
            if (!accepted || failed) {
                accepted = false;
                ds *= params.shrink;
                if (ds < params.min_step) {
                    result.termination = Termination::CorrectorFailure;
                    result.message = "corrector failed at minimum step; last good lambda=" + std::to_string(z[0]);
                    return result;
                }
            }
        }

        // Secant direction for the next predictor.
        Eigen::VectorXd secant = z_new - z;
        secant /= secant.norm();

        if (z_new[0] < 0.0) {
            land(z, z_new, 0.0);
            result.termination = Termination::LambdaZero;
            return result;
        }
        if (z_new[0] > params.lambda_max) {
            land(z, z_new, params.lambda_max);
            result.termination = Termination::LambdaMax;
            return result;
        }
        if (inf_norm(z_new.tail(n)) > params.norm_max) {
            result.termination = Termination::NormMax;
            return result;
        }

        for (std::size_t k = 0; k + 2 < path.size(); ++k) {
            if ((path[k] - z_new).norm() <= 1e-6 && directions[k].dot(secant) > 0.0) {
                result.termination = Termination::ClosedLoop;
                return result;
            }
        }

        StartingPoint sp{z_new[0], z_new.tail(n), 0.0};
        BranchPoint bp = make_branch_point(field, sp, tol);
        bp.arclength = result.points.back().arclength + (z_new - z).norm();
        result.points.push_back(bp);
        path.push_back(z_new);
        directions.push_back(secant);

        z = z_new;
        tangent = secant;
        if (iterations <= 3) ds = std::min(ds * params.grow, params.max_step);
    }
    result.termination = Termination::MaxSteps;
    return result;
}

bool is_resonant_equilibrium(const ExpandedField& field, const StatePoint& eq, double tol) {
    const PeriodMapDerivative d = period_map_derivative(field, 0.0, eq, tol);
    const Eigen::Index n = eq.size();
    const Eigen::MatrixXd jac = d.monodromy - Eigen::MatrixXd::Identity(n, n);
    return Eigen::JacobiSVD<Eigen::MatrixXd>(jac).singularValues()(n - 1) <= kSingularMonodromy;
}

SeededBranch trace_from_equilibrium(const ExpandedField& field, const StatePoint& eq, const ContinuationParams& params) {
    params.validate();
    SeededBranch out;
    const double tol = params.integration_tol;
    const BranchPoint trivial = make_branch_point(field, StartingPoint{0.0, eq, 0.0}, tol);

    const auto seed_only = [&](Termination why, std::string note) {
        out.branch.points = {trivial};
        out.branch.termination = why;
        out.note = std::move(note);
        return out;
    };

    if (is_resonant_equilibrium(field, eq, tol)) {
        out.degenerate = true;
        return seed_only(Termination::Degenerate,
                         "monodromy at the equilibrium has eigenvalue 1: T-resonant, the branch may lie in the "
                         "lambda=0 slice");
    }
    if (params.lambda_max < params.seed_lambda) return seed_only(Termination::LambdaMax, "lambda_max below seed lambda");

    StartingPoint seed;
    try {
        seed = newton_periodic(field, params.seed_lambda, eq, params);
    } catch (const SingularJacobianError& e) {
        out.degenerate = true;
        return seed_only(Termination::Degenerate, e.what());
    } catch (const Error& e) {
        return seed_only(Termination::CorrectorFailure, std::string("seed Newton failed: ") + e.what());
    }

    Eigen::VectorXd tangent =
        null_direction(extended_jacobian(period_map_derivative(field, seed.lambda, seed.xi0, tol)));
    if (tangent[0] < 0.0) tangent = -tangent;

    const BranchResult forward = continue_branch(field, seed, params, tangent);
    const BranchResult backward = continue_branch(field, seed, params, Eigen::VectorXd(-tangent));

    std::vector<BranchPoint> rows;
    if (backward.termination != Termination::LambdaZero ||
        backward.points.back().sp.lambda != 0.0) {
        rows.push_back(trivial);  // anchor the trivial pair when the backward run did not land on it
    }
    for (auto it = backward.points.rbegin(); it != backward.points.rend() - 1; ++it) rows.push_back(*it);
    rows.insert(rows.end(), forward.points.begin(), forward.points.end());

    rows.front().arclength = 0.0;
    for (std::size_t k = 1; k < rows.size(); ++k) {
        rows[k].arclength = rows[k - 1].arclength + (pack(rows[k].sp.lambda, rows[k].sp.xi0) -
                                                     pack(rows[k - 1].sp.lambda, rows[k - 1].sp.xi0))
                                                        .norm();
    }
    out.branch.points = std::move(rows);
    out.branch.termination = forward.termination;
    out.branch.message = forward.message;
    out.note = std::string("backward run: ") + to_string(backward.termination);
    return out;
}

std::vector<Fold> find_folds(const std::vector<BranchPoint>& points) {
    std::vector<Fold> folds;
    for (std::size_t k = 1; k + 1 < points.size(); ++k) {
        const double before = points[k].sp.lambda - points[k - 1].sp.lambda;
        const double after = points[k + 1].sp.lambda - points[k].sp.lambda;
        if (before * after < 0.0) folds.push_back({k, points[k].sp.lambda, before > 0.0});
    }
    return folds;
}

std::vector<StartingPoint> solutions_at_lambda(const ExpandedField& field, const std::vector<BranchPoint>& points,
                                               double lambda, const ContinuationParams& params) {
    std::vector<StartingPoint> found;
    for (std::size_t k = 0; k + 1 < points.size(); ++k) {
        const double l0 = points[k].sp.lambda;
        const double l1 = points[k + 1].sp.lambda;
        if ((l0 - lambda) * (l1 - lambda) > 0.0 || l0 == l1) continue;
        const double s = (lambda - l0) / (l1 - l0);
        const StatePoint guess = points[k].sp.xi0 + s * (points[k + 1].sp.xi0 - points[k].sp.xi0);
        StartingPoint sp = newton_periodic(field, lambda, guess, params);
        const bool duplicate = std::any_of(found.begin(), found.end(), [&](const StartingPoint& other) {
            return inf_norm(other.xi0 - sp.xi0) <= 1e-6;
        });
        if (!duplicate) found.push_back(std::move(sp));
    }
    return found;
}

std::optional<double> minimal_period(const ExpandedField& field, const StatePoint& xi0, double t_max, double tol) {
    const Eigen::VectorXd normal = field.autonomous(xi0);
    if (normal.norm() == 0.0) return std::nullopt;
    const auto section = [&](const Eigen::VectorXd& xi) { return (xi - xi0).dot(normal); };

    constexpr int kSamples = 20000;
    const DenseRun run = integrate(field, 0.0, xi0, 0.0, t_max, tol, kSamples);
    bool went_negative = false;
    for (int k = 1; k <= kSamples; ++k) {
        const double prev = section(run.states.col(k - 1));
        const double cur = section(run.states.col(k));
        if (cur < 0.0) went_negative = true;
        if (!(went_negative && prev < 0.0 && cur >= 0.0)) continue;

        double lo = run.times[k - 1];
        double hi = run.times[k];
        while (hi - lo > 1e-13 * std::max(1.0, hi)) {
            const double mid = 0.5 * (lo + hi);
            const Eigen::VectorXd at = integrate(field, 0.0, xi0, 0.0, mid, tol, 0).final_state;
            (section(at) < 0.0 ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }
    return std::nullopt;
}

double branch_distance(const std::vector<BranchPoint>& a, const std::vector<BranchPoint>& b) {
    const auto to_vec = [](const BranchPoint& p) { return pack(p.sp.lambda, p.sp.xi0); };
    double best = std::numeric_limits<double>::infinity();
    const auto scan = [&](const std::vector<BranchPoint>& pts, const std::vector<BranchPoint>& line) {
        for (const auto& p : pts) {
            const Eigen::VectorXd v = to_vec(p);
            if (line.size() == 1) best = std::min(best, (v - to_vec(line[0])).norm());
            for (std::size_t k = 0; k + 1 < line.size(); ++k) {
                best = std::min(best, point_segment_distance(v, to_vec(line[k]), to_vec(line[k + 1])));
            }
        }
    };
    scan(a, b);
    scan(b, a);
    return best;
}

}  // namespace lct
