#include "lct/oracle.hpp"

#include <cmath>

#include "lct/errors.hpp"

namespace lct {

namespace {
constexpr int kTestTimes = 64;
}

PeriodicTrack::PeriodicTrack(Eigen::VectorXd samples, double period) : samples_(std::move(samples)), period_(period) {
    if (samples_.size() < 5) throw ConfigError("periodic track needs at least 5 samples");
    if (!(period_ > 0.0)) throw ConfigError("periodic track needs a positive period");
}

double PeriodicTrack::at(Eigen::Index k) const {
    const Eigen::Index n = samples_.size();
    return samples_[((k % n) + n) % n];
}

double PeriodicTrack::operator()(double t) const {
    const double h = spacing();
    const double pos = t / h;
    const double base = std::floor(pos);
    const double s = pos - base;
    const auto k = static_cast<Eigen::Index>(base);
    if (s == 0.0) return at(k);
    // Lagrange cubic through k-1, k, k+1, k+2.
    const double w0 = -s * (s - 1.0) * (s - 2.0) / 6.0;
    const double w1 = (s + 1.0) * (s - 1.0) * (s - 2.0) / 2.0;
    const double w2 = -(s + 1.0) * s * (s - 2.0) / 2.0;
    const double w3 = (s + 1.0) * s * (s - 1.0) / 6.0;
    return w0 * at(k - 1) + w1 * at(k) + w2 * at(k + 1) + w3 * at(k + 2);
}

PeriodicTrack PeriodicTrack::derivative() const {
    const Eigen::Index n = samples_.size();
    const double h = spacing();
    Eigen::VectorXd d(n);
    for (Eigen::Index k = 0; k < n; ++k) d[k] = (-at(k + 2) + 8.0 * at(k + 1) - 8.0 * at(k - 1) + at(k - 2)) / (12.0 * h);
    return {d, period_};
}

PeriodicTrack PeriodicTrack::second_derivative() const {
    const Eigen::Index n = samples_.size();
    const double h = spacing();
    Eigen::VectorXd d(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        d[k] = (-at(k + 2) + 16.0 * at(k + 1) - 30.0 * at(k) + 16.0 * at(k - 1) - at(k - 2)) / (12.0 * h * h);
    }
    return {d, period_};
}

HistoryQuadrature::HistoryQuadrature(const GammaKernel& kernel, double tail_mass, std::size_t panels)
    : HistoryQuadrature(kernel, tail_horizon(kernel, tail_mass), panels, 0) {}

HistoryQuadrature HistoryQuadrature::with_horizon(const GammaKernel& kernel, double horizon, std::size_t panels) {
    return HistoryQuadrature(kernel, horizon, panels, 0);
}

HistoryQuadrature::HistoryQuadrature(const GammaKernel& kernel, double horizon, std::size_t panels, int)
    : horizon_(horizon) {
    // Composite 1-4-2-...-4-1 rule with node spacing horizon / steps (steps rounded up to even).
    const std::size_t steps = panels + panels % 2;
    const std::size_t nodes = steps + 1;
    const double h = horizon / static_cast<double>(steps);
    nodes_.resize(nodes);
    weights_.resize(nodes);
    for (std::size_t k = 0; k < nodes; ++k) {
        const double s = h * static_cast<double>(k);
        const double w = (k == 0 || k == nodes - 1) ? 1.0 : (k % 2 == 1 ? 4.0 : 2.0);
        nodes_[k] = s;
        weights_[k] = w * h / 3.0 * gamma_eval(kernel, s);
    }
}

double HistoryQuadrature::apply(const PeriodicTrack& z, double t) const {
    double sum = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) sum += weights_[k] * z(t - nodes_[k]);
    return sum;
}

PeriodicTrack history_source(const ProblemSpec& p, const PeriodicTrack& x, const PeriodicTrack& xdot) {
    Eigen::VectorXd z(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) z[k] = p.eval_phi(x.samples()[k], xdot.samples()[k]);
    return {z, x.period()};
}

double history_convolution(const ProblemSpec& p, const PeriodicTrack& x, const PeriodicTrack& xdot, int i, double t) {
    if (i < 1 || i > p.kernel.shape) throw ConfigError("history index must lie in 1..b");
    const HistoryQuadrature quad(GammaKernel(p.kernel.rate, i));
    return quad.apply(history_source(p, x, xdot), t);
}

PeriodicTrack track_of(const DenseRun& run, Eigen::Index row, double period) {
    const Eigen::Index n = run.states.cols() - 1;
    return {run.states.row(row).head(n).transpose(), period};
}

double verify_lift(const ProblemSpec& p, const StartingPoint& sp) {
    const ExpandedField field = expand(p);
    const DenseRun run = integrate(field, sp.lambda, sp.xi0, 0.0, p.period);
    const PeriodicTrack x = track_of(run, 0, p.period);
    const PeriodicTrack xdot = track_of(run, 1, p.period);
    const PeriodicTrack source = history_source(p, x, xdot);

    const Eigen::Index n = x.size();
    const Eigen::Index stride = std::max<Eigen::Index>(1, n / kTestTimes);
    double worst = 0.0;
    for (int i = 1; i <= p.kernel.shape; ++i) {
        const HistoryQuadrature quad(GammaKernel(p.kernel.rate, i));
        for (Eigen::Index k = 0; k < n; k += stride) {
            const double chain = run.states(i + 1, k);
            worst = std::max(worst, std::abs(chain - quad.apply(source, run.times[k])));
        }
    }
    return worst;
}

double direct_residual(const ProblemSpec& p, double lambda, const PeriodicTrack& x) {
    const PeriodicTrack xdot = x.derivative();
    const PeriodicTrack xddot = x.second_derivative();
    const PeriodicTrack source = history_source(p, x, xdot);
    const HistoryQuadrature quad(p.kernel);

    const Eigen::Index n = x.size();
    const Eigen::Index stride = std::max<Eigen::Index>(1, n / kTestTimes);
    double worst = 0.0;
    for (Eigen::Index k = 0; k < n; k += stride) {
        const double t = x.spacing() * static_cast<double>(k);
        const double xv = x.samples()[k];
        const double vv = xdot.samples()[k];
        const double rhs = p.eval_g(xv, vv, quad.apply(source, t)) + lambda * p.eval_f(t, xv, vv);
        worst = std::max(worst, std::abs(xddot.samples()[k] - rhs));
    }
    return worst;
}

}  // namespace lct
