#pragma once

#include <cmath>
#include <cstddef>
#include <utility>

namespace lct {

/// Gamma density with rate `a` (1/time) and integer shape `b`:
/// a^b s^(b-1) e^(-a s) / (b-1)! for s >= 0, zero for s < 0.
struct GammaKernel {
    double rate = 1.0;
    int shape = 1;

    GammaKernel() = default;
    GammaKernel(double a, int b);  // throws ConfigError unless a > 0 and b >= 1

    [[nodiscard]] double mean() const noexcept { return shape / rate; }
    [[nodiscard]] double variance() const noexcept { return shape / (rate * rate); }
};

/// Density value; uses log-space so large shapes do not overflow. At s = 0 the b = 1 kernel
/// takes its right limit `a`.
template <class Scalar = double>
[[nodiscard]] Scalar gamma_eval(const GammaKernel& k, Scalar s) {
    using std::exp;
    using std::log;
    if (s < Scalar(0)) return Scalar(0);
    if (s == Scalar(0)) return k.shape == 1 ? Scalar(k.rate) : Scalar(0);
    const Scalar log_density = k.shape * log(Scalar(k.rate)) + (k.shape - 1) * log(s) - Scalar(k.rate) * s -
                               Scalar(std::lgamma(static_cast<double>(k.shape)));
    return exp(log_density);
}

/// (mean, variance) = (b/a, b/a^2).
[[nodiscard]] inline std::pair<double, double> gamma_moments(const GammaKernel& k) { return {k.mean(), k.variance()}; }

/// Composite Simpson rule with `panels` equal panels on [lo, hi] (each panel has a midpoint node).
template <class Scalar, class Fn>
[[nodiscard]] Scalar integrate_simpson(Fn&& fn, Scalar lo, Scalar hi, std::size_t panels) {
    const Scalar h = (hi - lo) / Scalar(panels);
    Scalar sum = fn(lo) + fn(hi);
    for (std::size_t i = 0; i < panels; ++i) {
        const Scalar left = lo + h * Scalar(i);
        sum += Scalar(4) * fn(left + h / Scalar(2));
        if (i > 0) sum += Scalar(2) * fn(left);
    }
    return sum * h / Scalar(6);
}

/// Panel width used by every kernel quadrature: mean / 100.
[[nodiscard]] inline double kernel_panel_width(const GammaKernel& k) { return k.mean() / 100.0; }

/// Mass of the kernel on [0, upper] by Simpson on panels of width mean/100 (last panel shortened).
[[nodiscard]] double kernel_mass(const GammaKernel& k, double upper);

/// Mass of the kernel on [h, infinity), integrated from the far tail inward.
[[nodiscard]] double kernel_tail_mass(const GammaKernel& k, double h);

/// Smallest multiple H of mean/100 with tail mass beyond H at most `eps` (0 < eps < 1).
[[nodiscard]] double tail_horizon(const GammaKernel& k, double eps);

}  // namespace lct
