#include "lct/chain.hpp"

#include <array>
#include <random>

#include "lct/errors.hpp"

namespace lct {

namespace {

const std::vector<std::string> kGVars = {"x0", "x1", "x2"};
const std::vector<std::string> kPhiVars = {"p", "q"};
const std::vector<std::string> kFVars = {"t", "x", "v"};

void check_periodic_forcing(const Expr& f, double period) {
    std::mt19937_64 rng(0x5EED);
    std::uniform_real_distribution<double> time(0.0, period);
    std::uniform_real_distribution<double> state(-2.0, 2.0);
    for (int i = 0; i < 50; ++i) {
        const double t = time(rng);
        const double x = state(rng);
        const double v = state(rng);
        double now = 0.0;
        double later = 0.0;
        try {
            now = f.eval(std::array{t, x, v});
            later = f.eval(std::array{t + period, x, v});
        } catch (const EvalError&) {
            continue;
        }
        if (std::abs(now - later) > 1e-9 * (1.0 + std::abs(now))) {
            throw ConfigError("forcing f is not periodic in t with period T=" + std::to_string(period));
        }
    }
}

}  // namespace

ProblemSpec::ProblemSpec(Expr g_, Expr phi_, Expr f_, GammaKernel kernel_, double period_)
    : g(std::move(g_)), phi(std::move(phi_)), f(std::move(f_)), kernel(kernel_), period(period_) {
    if (!(period > 0.0) || !std::isfinite(period)) throw ConfigError("period T must be positive and finite");
    if (kernel.rate <= 0.0 || kernel.shape < 1) throw ConfigError("invalid gamma kernel");
    if (g.variables() != kGVars) throw ConfigError("g must be declared over (x0, x1, x2)");
    if (phi.variables() != kPhiVars) throw ConfigError("phi must be declared over (p, q)");
    if (f.variables() != kFVars) throw ConfigError("f must be declared over (t, x, v)");
    check_periodic_forcing(f, period);
}

double ProblemSpec::eval_g(double x, double xdot, double delayed) const { return g.eval(std::array{x, xdot, delayed}); }

double ProblemSpec::eval_phi(double p, double q) const { return phi.eval(std::array{p, q}); }

double ProblemSpec::eval_f(double t, double x, double v) const { return f.eval(std::array{t, x, v}); }

ProblemSpec make_problem(const std::string& g, const std::string& phi, const std::string& f, double a, int b,
                         double period) {
    return ProblemSpec(parse(g, kGVars), parse(phi, kPhiVars), parse(f, kFVars), GammaKernel(a, b), period);
}

ExpandedField::ExpandedField(ProblemSpec problem)
    : problem_(std::move(problem)), dim_(problem_->dim()), period_(problem_->period) {}

ExpandedField::ExpandedField(Eigen::MatrixXd a, double period)
    : linear_(std::move(a)), dim_(static_cast<int>(linear_.rows())), period_(period) {
    if (linear_.rows() != linear_.cols()) throw ConfigError("linear field matrix must be square");
}

ExpandedField ExpandedField::linear(Eigen::MatrixXd a, double period) { return ExpandedField(std::move(a), period); }

void ExpandedField::autonomous(const Eigen::VectorXd& xi, Eigen::VectorXd& out) const {
    out.resize(dim_);
    if (!problem_) {
        out.noalias() = linear_ * xi;
        return;
    }
    const ProblemSpec& p = *problem_;
    const int b = p.kernel.shape;
    const double a = p.kernel.rate;
    const double u = xi[0];
    const double v0 = xi[1];
    out[0] = v0;
    out[1] = p.eval_g(u, v0, xi[b + 1]);
    out[2] = a * (p.eval_phi(u, v0) - xi[2]);
    for (int i = 2; i <= b; ++i) out[i + 1] = a * (xi[i] - xi[i + 1]);
}

Eigen::VectorXd ExpandedField::autonomous(const Eigen::VectorXd& xi) const {
    Eigen::VectorXd out(dim_);
    autonomous(xi, out);
    return out;
}

double ExpandedField::forcing_component(double t, const Eigen::VectorXd& xi) const {
    return problem_ ? problem_->eval_f(t, xi[0], xi[1]) : 0.0;
}

Eigen::VectorXd ExpandedField::forcing(double t, const Eigen::VectorXd& xi) const {
    Eigen::VectorXd out = Eigen::VectorXd::Zero(dim_);
    out[1] = forcing_component(t, xi);
    return out;
}

void ExpandedField::rhs(double t, const Eigen::VectorXd& xi, double lambda, Eigen::VectorXd& out) const {
    autonomous(xi, out);
    if (lambda != 0.0 && problem_) out[1] += lambda * forcing_component(t, xi);
}

StatePoint lifted_zero(const ProblemSpec& p, double u) {
    StatePoint xi(p.dim());
    xi[0] = u;
    xi[1] = 0.0;
    xi.tail(p.kernel.shape).setConstant(p.eval_phi(u, 0.0));
    return xi;
}

ProjectedTrack project(const Eigen::MatrixXd& states) {
    return {states.row(0).transpose(), states.row(1).transpose()};
}

}  // namespace lct
