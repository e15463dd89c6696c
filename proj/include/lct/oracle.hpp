#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lct/chain.hpp"
#include "lct/kernel.hpp"
#include "lct/orbit.hpp"

namespace lct {

/// Samples of a T-periodic scalar function on uniform points k T / N, k = 0..N-1.
/// Evaluation between samples is periodic cubic (4-point Lagrange) interpolation; derivatives
/// on the sample grid use 4th-order central differences.
class PeriodicTrack {
public:
    PeriodicTrack(Eigen::VectorXd samples, double period);

    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] Eigen::Index size() const noexcept { return samples_.size(); }
    [[nodiscard]] const Eigen::VectorXd& samples() const noexcept { return samples_; }
    [[nodiscard]] double spacing() const noexcept { return period_ / static_cast<double>(samples_.size()); }

    [[nodiscard]] double operator()(double t) const;

    [[nodiscard]] PeriodicTrack derivative() const;
    [[nodiscard]] PeriodicTrack second_derivative() const;

private:
    [[nodiscard]] double at(Eigen::Index k) const;

    Eigen::VectorXd samples_;
    double period_;
};

/// Simpson quadrature of s -> gamma_a^i(s) z(t - s) over [0, H], H = tail_horizon(1e-12), with
/// node spacing H/4096. Node weights are precomputed so repeated evaluations only touch the track.
class HistoryQuadrature {
public:
    explicit HistoryQuadrature(const GammaKernel& kernel, double tail_mass = 1e-12, std::size_t panels = 4096);
    [[nodiscard]] static HistoryQuadrature with_horizon(const GammaKernel& kernel, double horizon,
                                                        std::size_t panels = 4096);

    [[nodiscard]] double horizon() const noexcept { return horizon_; }
    [[nodiscard]] double apply(const PeriodicTrack& z, double t) const;

private:
    HistoryQuadrature(const GammaKernel& kernel, double horizon, std::size_t panels, int);

    double horizon_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// z0 = phi(x, x') sampled on the track grid.
[[nodiscard]] PeriodicTrack history_source(const ProblemSpec& p, const PeriodicTrack& x, const PeriodicTrack& xdot);

/// int_{-inf}^t gamma_a^i(t - s) phi(x(s), x'(s)) ds for 1 <= i <= b, with periodic x, x'.
[[nodiscard]] double history_convolution(const ProblemSpec& p, const PeriodicTrack& x, const PeriodicTrack& xdot, int i,
                                         double t);

/// First 512 samples of coordinate `row` of a run over one period.
[[nodiscard]] PeriodicTrack track_of(const DenseRun& run, Eigen::Index row, double period);

/// Integrates from `sp` over one period and returns the largest gap between the chain
/// coordinates v_i(t) and the directly computed history integrals, over i = 1..b and 64 times.
[[nodiscard]] double verify_lift(const ProblemSpec& p, const StartingPoint& sp);

/// max over 64 times of |x'' - g(x, x', conv_b) - lambda f(t, x, x')| with derivatives of the track.
[[nodiscard]] double direct_residual(const ProblemSpec& p, double lambda, const PeriodicTrack& x);

}  // namespace lct
