#include "lct/kernel.hpp"

#include <vector>

#include "lct/errors.hpp"

namespace lct {

GammaKernel::GammaKernel(double a, int b) : rate(a), shape(b) {
    if (!(a > 0.0) || !std::isfinite(a)) throw ConfigError("kernel rate a must be positive and finite");
    if (b < 1) throw ConfigError("kernel shape b must be a positive integer");
}

namespace {

double simpson_panel(const GammaKernel& k, double lo, double hi) {
    const double mid = 0.5 * (lo + hi);
    return (hi - lo) / 6.0 * (gamma_eval(k, lo) + 4.0 * gamma_eval(k, mid) + gamma_eval(k, hi));
}

// Point past the mode where the density has fallen below 1e-40 of its peak scale.
double far_tail(const GammaKernel& k) {
    const double sd = std::sqrt(k.variance());
    double upper = k.mean() + 10.0 * sd;
    while (gamma_eval(k, upper) > 1e-40 * k.rate) upper += 5.0 * sd;
    return upper;
}

}  // namespace

double kernel_mass(const GammaKernel& k, double upper) {
    if (upper <= 0.0) return 0.0;
    const double width = kernel_panel_width(k);
    double mass = 0.0;
    for (double lo = 0.0; lo < upper; lo += width) mass += simpson_panel(k, lo, std::min(lo + width, upper));
    return mass;
}

double kernel_tail_mass(const GammaKernel& k, double h) {
    const double width = kernel_panel_width(k);
    const double upper = std::max(far_tail(k), h);
    double mass = 0.0;
    // Summing from the far end keeps tiny tails accurate relative to their size.
    for (double hi = upper; hi > h; hi -= width) mass += simpson_panel(k, std::max(hi - width, h), hi);
    return mass;
}

double tail_horizon(const GammaKernel& k, double eps) {
    if (!(eps > 0.0 && eps < 1.0)) throw ConfigError("tail_horizon requires 0 < eps < 1");
    const double width = kernel_panel_width(k);
    const auto panels = static_cast<std::size_t>(std::ceil(far_tail(k) / width));

    // tail[i] = mass beyond i*width, accumulated from the far end.
    std::vector<double> tail(panels + 1, 0.0);
    for (std::size_t i = panels; i-- > 0;) {
        tail[i] = tail[i + 1] + simpson_panel(k, static_cast<double>(i) * width, static_cast<double>(i + 1) * width);
    }
    for (std::size_t i = 0; i <= panels; ++i) {
        if (tail[i] <= eps) return static_cast<double>(i) * width;
    }
    return static_cast<double>(panels) * width;
}

}  // namespace lct
