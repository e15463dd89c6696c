#include "lct/analysis.hpp"

#include <array>
#include <cmath>

#include "lct/errors.hpp"

namespace lct {

namespace {

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

double central_difference(const std::function<double(double)>& fn, double x) {
    const double h = tolerances::kFdStep;
    return (fn(x + h) - fn(x - h)) / (2.0 * h);
}

ZeroRecord classify(const ProblemSpec& p, double u, bool sign_change) {
    ZeroRecord z;
    z.u_bar = u;
    z.sign_change = sign_change;
    z.phi_prime = phi_prime(p, u);
    z.lifted = lifted_zero(p, u);
    z.nondegenerate = std::abs(z.phi_prime) > tolerances::kDegenerate;

    const int b = p.kernel.shape;
    const double a = p.kernel.rate;
    z.det_formula = ((b - 1) % 2 == 0 ? 1.0 : -1.0) * std::pow(a, b) * z.phi_prime;
    try {
        const Eigen::MatrixXd jac = fd_jacobian([&p](const Eigen::VectorXd& xi) { return modified_field(p, xi); }, z.lifted);
        z.det_fd = jac.determinant();
    } catch (const EvalError&) {
        z.det_fd = std::numeric_limits<double>::quiet_NaN();
    }
    return z;
}

double bisect(const ProblemSpec& p, double lo, double hi, double f_lo) {
    while (hi - lo > 1e-12 * (1.0 + std::abs(lo))) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        const double f_mid = phi_eval(p, mid);
        if (f_mid == 0.0) return mid;
        if ((f_mid > 0.0) == (f_lo > 0.0)) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

double phi_eval(const ProblemSpec& p, double u) { return p.eval_g(u, 0.0, p.eval_phi(u, 0.0)); }

double phi_prime(const ProblemSpec& p, double u) {
    try {
        const double w = p.eval_phi(u, 0.0);
        const std::array<double, 3> g_at{u, 0.0, w};
        const std::array<double, 2> phi_at{u, 0.0};
        const double dg_du = diff(p.g, "x0").eval(g_at);
        const double dg_dw = diff(p.g, "x2").eval(g_at);
        const double dphi_du = dg_dw == 0.0 ? 0.0 : diff(p.phi, "p").eval(phi_at);
        return dg_du + dg_dw * dphi_du;
    } catch (const EvalError&) {
        return central_difference([&p](double x) { return phi_eval(p, x); }, u);
    }
}

Eigen::VectorXd modified_field(const ProblemSpec& p, const Eigen::VectorXd& xi) {
    const int b = p.kernel.shape;
    const double a = p.kernel.rate;
    Eigen::VectorXd out(b + 2);
    out[0] = xi[1];
    out[1] = p.eval_g(xi[0], xi[1], xi[b + 1]);
    out[2] = a * (p.eval_phi(xi[0], xi[1]) - xi[b + 1]);
    for (int i = 2; i <= b; ++i) out[i + 1] = a * (xi[i] - xi[i + 1]);
    return out;
}

Eigen::MatrixXd fd_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& map, const Eigen::VectorXd& at,
                            double h) {
    Eigen::MatrixXd jac;
    Eigen::VectorXd x = at;
    for (Eigen::Index j = 0; j < at.size(); ++j) {
        x[j] = at[j] + h;
        const Eigen::VectorXd plus = map(x);
        x[j] = at[j] - h;
        const Eigen::VectorXd minus = map(x);
        x[j] = at[j];
        if (j == 0) jac.resize(plus.size(), at.size());
        jac.col(j) = (plus - minus) / (2.0 * h);
    }
    return jac;
}

std::vector<ZeroRecord> scan_zeros(const ProblemSpec& p, double alpha, double beta, int grid_n) {
    if (!(alpha < beta)) throw ConfigError("scan interval requires alpha < beta");
    if (grid_n < 2) throw ConfigError("scan grid needs at least 2 intervals");

    std::vector<double> us(static_cast<std::size_t>(grid_n) + 1);
    std::vector<double> vals(us.size());
    for (int k = 0; k <= grid_n; ++k) {
        us[k] = alpha + (beta - alpha) * k / grid_n;
        vals[k] = phi_eval(p, us[k]);
    }
    if (std::abs(vals.front()) <= tolerances::kZero || std::abs(vals.back()) <= tolerances::kZero) {
        throw AdmissibilityError("Phi vanishes at an interval endpoint; the degree is not defined");
    }

    std::vector<ZeroRecord> zeros;
    const auto push = [&](double u, bool sign_change) {
        if (!zeros.empty() && std::abs(zeros.back().u_bar - u) <= tolerances::kMerge) return;
        zeros.push_back(classify(p, u, sign_change));
    };

    for (int k = 0; k < grid_n; ++k) {
        const double f0 = vals[k];
        const double f1 = vals[k + 1];
        if (k > 0 && std::abs(f0) <= tolerances::kZero) {
            // Grid point sits on a zero; look at its neighbours for the crossing.
            const double before = vals[k - 1];
            const bool crossing = sign_of(before) * sign_of(f1) < 0;
            push(crossing ? bisect(p, us[k - 1], us[k + 1], before) : us[k], crossing);
            continue;
        }
        if (std::abs(f1) <= tolerances::kZero) continue;
        if (std::abs(f0) > tolerances::kZero && sign_of(f0) * sign_of(f1) < 0) push(bisect(p, us[k], us[k + 1], f0), true);
    }
    return zeros;
}

int degree_phi(const ProblemSpec& p, double alpha, double beta, int grid_n) {
    const auto zeros = scan_zeros(p, alpha, beta, grid_n);
    int degree = 0;
    for (const auto& z : zeros) {
        if (!z.nondegenerate) {
            throw DegenerateZeroError("degenerate zero of Phi at u=" + std::to_string(z.u_bar));
        }
        degree += sign_of(z.phi_prime);
    }
    const int boundary = (sign_of(phi_eval(p, beta)) - sign_of(phi_eval(p, alpha))) / 2;
    if (boundary != degree) {
        throw CrossCheckError("zero-sign sum " + std::to_string(degree) + " disagrees with boundary formula " +
                              std::to_string(boundary));
    }
    return degree;
}

DegreeReport degree_G(const ProblemSpec& p, double alpha, double beta, int grid_n) {
    DegreeReport report;
    report.alpha = alpha;
    report.beta = beta;
    report.zeros = scan_zeros(p, alpha, beta, grid_n);
    report.admissible = true;

    const int parity = (p.kernel.shape - 1) % 2 == 0 ? 1 : -1;
    const int boundary = (sign_of(phi_eval(p, beta)) - sign_of(phi_eval(p, alpha))) / 2;

    bool all_regular = true;
    int sign_sum = 0;
    int jac_sum = 0;
    for (const auto& z : report.zeros) {
        if (!z.nondegenerate || !std::isfinite(z.det_fd)) {
            all_regular = false;
            continue;
        }
        sign_sum += sign_of(z.phi_prime);
        jac_sum += sign_of(z.det_fd);
    }

    report.jacobian_route_defined = all_regular;
    if (all_regular) {
        report.deg_phi = sign_sum;
        report.deg_G = parity * sign_sum;
        report.deg_G_jacobian = jac_sum;
        report.routes_agree = report.deg_G == jac_sum && sign_sum == boundary;
        if (!report.routes_agree) {
            throw CrossCheckError("degree routes disagree: product formula " + std::to_string(report.deg_G) +
                                  ", Jacobian signs " + std::to_string(jac_sum) + ", boundary " +
                                  std::to_string(boundary));
        }
    } else {
        // Degenerate crossings: only the boundary formula is available.
        report.deg_phi = boundary;
        report.deg_G = parity * boundary;
        report.deg_G_jacobian = 0;
    }
    return report;
}

}  // namespace lct
