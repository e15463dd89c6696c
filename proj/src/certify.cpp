#include "lct/certify.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "lct/errors.hpp"

namespace lct {

namespace {

double jacobian_norm(const ExpandedField& field, const Eigen::VectorXd& xi) {
    const Eigen::MatrixXd jac = fd_jacobian([&field](const Eigen::VectorXd& x) { return field.autonomous(x); }, xi);
    return Eigen::JacobiSVD<Eigen::MatrixXd>(jac).singularValues()(0);
}

}  // namespace

double lipschitz_estimate(const ExpandedField& field, const StatePoint& center, double radius, int grid_per_axis) {
    if (!(radius > 0.0)) throw ConfigError("Lipschitz box radius must be positive");
    if (grid_per_axis < 2) throw ConfigError("Lipschitz grid needs at least 2 points per axis");

    const int dim = field.dim();
    const int dense_axes = std::min(dim, 5);
    double best = 0.0;

    std::vector<int> index(static_cast<std::size_t>(dense_axes), 0);
    Eigen::VectorXd xi = center;
    for (;;) {
        for (int ax = 0; ax < dense_axes; ++ax) {
            xi[ax] = center[ax] - radius + 2.0 * radius * index[ax] / (grid_per_axis - 1);
        }
        best = std::max(best, jacobian_norm(field, xi));

        int ax = 0;
        while (ax < dense_axes && ++index[ax] == grid_per_axis) index[ax++] = 0;
        if (ax == dense_axes) break;
    }

    if (dim > dense_axes) {
        std::mt19937_64 rng(0x5EED);
        std::uniform_real_distribution<double> offset(-radius, radius);
        for (int s = 0; s < 10'000; ++s) {
            for (int ax = 0; ax < dim; ++ax) xi[ax] = center[ax] + offset(rng);
            best = std::max(best, jacobian_norm(field, xi));
        }
    }
    return best;
}

YorkeCheck yorke_check(double lipschitz, double period) {
    if (lipschitz < 0.0) throw ConfigError("Lipschitz constant must be nonnegative");
    if (!(period > 0.0)) throw ConfigError("period must be positive");
    const double bound =
        lipschitz == 0.0 ? std::numeric_limits<double>::infinity() : 2.0 * std::numbers::pi / lipschitz;
    return {bound, period < bound};
}

double default_box_radius(const ZeroRecord& z) { return 0.1 * (1.0 + z.lifted.cwiseAbs().maxCoeff()); }

CertReport certify_ejecting(const ProblemSpec& p, const ZeroRecord& z, double radius, int grid_per_axis) {
    CertReport cert;
    cert.zero = z;
    cert.box_radius = radius;
    cert.period = p.period;
    cert.lipschitz = lipschitz_estimate(expand(p), z.lifted, radius, grid_per_axis);
    cert.yorke_period_bound = yorke_check(cert.lipschitz, p.period).bound;
    const YorkeCheck padded = yorke_check(kLipschitzSafetyFactor * cert.lipschitz, p.period);
    cert.certified_bound = padded.bound;
    cert.ejecting_certified = padded.passes && (z.nondegenerate || z.sign_change);

    std::ostringstream notes;
    notes.precision(6);
    notes << "L is a sampled lower estimate on a box of radius " << radius << "; compared as " << kLipschitzSafetyFactor
          << "*L. ";
    if (!padded.passes) notes << "T=" << p.period << " is not below 2pi/(1.1L)=" << padded.bound << ". ";
    if (!z.nondegenerate && !z.sign_change) notes << "Zero is degenerate without sign change. ";
    cert.notes = notes.str();
    while (!cert.notes.empty() && cert.notes.back() == ' ') cert.notes.pop_back();
    return cert;
}

MultiplicityReport multiplicity_report(const ProblemSpec& p, double alpha, double beta, int grid_n,
                                       std::optional<double> radius, int grid_per_axis) {
    MultiplicityReport report;
    report.alpha = alpha;
    report.beta = beta;
    const auto zeros = scan_zeros(p, alpha, beta, grid_n);

    int sign_changing = 0;
    for (const auto& z : zeros) {
        CertReport cert = certify_ejecting(p, z, radius.value_or(default_box_radius(z)), grid_per_axis);
        if (z.sign_change) ++sign_changing;
        if (cert.ejecting_certified && z.sign_change) ++report.n;
        report.certified_zeros.push_back(std::move(cert));
    }

    if (report.n > 0 && report.n == sign_changing) {
        report.verdict = "at least " + std::to_string(report.n) +
                         " T-periodic solutions for small lambda > 0, with pairwise disjoint images";
    } else if (report.n > 0) {
        report.verdict = std::to_string(report.n) + " of " + std::to_string(sign_changing) +
                         " sign-changing zeros certified ejecting";
    }
    return report;
}

}  // namespace lct
