#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <vector>

#include "lct/errors.hpp"

namespace lct {

struct OdeOptions {
    double tol = 1e-10;      // absolute and relative
    int samples = 512;       // dense-output intervals over [t0, t1]; 0 disables sampling
    long max_steps = 2'000'000;
};

/// Result of an adaptive run: `states` holds samples+1 columns at `times`, `steps` the accepted
/// step sizes so the same discrete map can be replayed (see dopri5_replay).
struct DenseRun {
    Eigen::VectorXd times;
    Eigen::MatrixXd states;
    Eigen::VectorXd final_state;
    std::vector<double> steps;
};

namespace detail {

// Dormand-Prince 5(4) tableau with Hairer's 4th-order continuous extension.
struct Dopri5 {
    static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                            a76 = 11.0 / 84;
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                            e6 = 22.0 / 525, e7 = -1.0 / 40;
    static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                            d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                            d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

template <class Rhs>
struct Dopri5Stepper {
    Rhs& rhs;
    Eigen::VectorXd k1, k2, k3, k4, k5, k6, k7, tmp, y_new;

    Dopri5Stepper(Rhs& f, Eigen::Index n)
        : rhs(f), k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), tmp(n), y_new(n) {}

    // One step from (t, y) with k1 = f(t, y) already set; fills y_new and k7 = f(t+h, y_new).
    void step(double t, const Eigen::VectorXd& y, double h) {
        using T = Dopri5;
        tmp = y + h * T::a21 * k1;
        rhs(t + T::c2 * h, tmp, k2);
        tmp = y + h * (T::a31 * k1 + T::a32 * k2);
        rhs(t + T::c3 * h, tmp, k3);
        tmp = y + h * (T::a41 * k1 + T::a42 * k2 + T::a43 * k3);
        rhs(t + T::c4 * h, tmp, k4);
        tmp = y + h * (T::a51 * k1 + T::a52 * k2 + T::a53 * k3 + T::a54 * k4);
        rhs(t + T::c5 * h, tmp, k5);
        tmp = y + h * (T::a61 * k1 + T::a62 * k2 + T::a63 * k3 + T::a64 * k4 + T::a65 * k5);
        rhs(t + h, tmp, k6);
        y_new = y + h * (T::a71 * k1 + T::a73 * k3 + T::a74 * k4 + T::a75 * k5 + T::a76 * k6);
        rhs(t + h, y_new, k7);
    }

    [[nodiscard]] Eigen::VectorXd error_estimate(double h) const {
        using T = Dopri5;
        return h * (T::e1 * k1 + T::e3 * k3 + T::e4 * k4 + T::e5 * k5 + T::e6 * k6 + T::e7 * k7);
    }

    // Continuous extension at theta in [0, 1] of the step (t, y) -> (t + h, y_new).
    [[nodiscard]] Eigen::VectorXd dense(const Eigen::VectorXd& y, double h, double theta) const {
        using T = Dopri5;
        const Eigen::VectorXd diff = y_new - y;
        const Eigen::VectorXd bspl = h * k1 - diff;
        const Eigen::VectorXd r4 = diff - h * k7 - bspl;
        const Eigen::VectorXd r5 = h * (T::d1 * k1 + T::d3 * k3 + T::d4 * k4 + T::d5 * k5 + T::d6 * k6 + T::d7 * k7);
        const double theta1 = 1.0 - theta;
        return y + theta * (diff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
    }
};

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(t, y) from t0 to t1 (t1 > t0).
/// `rhs` is called as rhs(t, y, out). Throws StepUnderflowError when the step collapses.
template <class Rhs>
[[nodiscard]] DenseRun dopri5(Rhs&& rhs, const Eigen::VectorXd& y0, double t0, double t1, const OdeOptions& opt = {}) {
    const Eigen::Index n = y0.size();
    const double span = t1 - t0;
    if (!(span > 0.0)) throw StepUnderflowError("integration interval must have t1 > t0", t0);

    detail::Dopri5Stepper<std::remove_reference_t<Rhs>> st(rhs, n);
    DenseRun run;
    const int samples = std::max(opt.samples, 0);
    run.times.resize(samples + 1);
    run.states.resize(n, samples + 1);
    for (int k = 0; k <= samples; ++k) run.times[k] = samples == 0 ? t1 : t0 + span * k / samples;
    int next_sample = 0;
    if (samples > 0) {
        run.states.col(0) = y0;
        next_sample = 1;
    }

    const auto scale = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
        return (opt.tol + opt.tol * a.cwiseAbs().cwiseMax(b.cwiseAbs()).array()).matrix();
    };
    const auto rms = [n](const Eigen::VectorXd& v) { return std::sqrt(v.squaredNorm() / static_cast<double>(n)); };

    Eigen::VectorXd y = y0;
    double t = t0;
    rhs(t, y, st.k1);

    // Initial step guess (Hairer-Wanner).
    double h = 0.0;
    {
        const Eigen::VectorXd sk = scale(y, y);
        const double d0 = rms(y.cwiseQuotient(sk));
        const double d1 = rms(st.k1.cwiseQuotient(sk));
        const double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
        const Eigen::VectorXd y1 = y + h0 * st.k1;
        Eigen::VectorXd f1(n);
        rhs(t + h0, y1, f1);
        const double d2 = rms((f1 - st.k1).cwiseQuotient(sk)) / h0;
        const double dm = std::max(d1, d2);
        const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 1.0 / 5.0);
        h = std::min({100.0 * h0, h1, span});
    }

    bool rejected_last = false;
    long steps = 0;
    while (t < t1) {
        if (++steps > opt.max_steps) throw StepUnderflowError("step budget exhausted", t);
        const bool last = t + h >= t1 - 1e-14 * std::max(1.0, std::abs(t1));
        if (last) h = t1 - t;
        if (h <= 1e-14 * std::max(1.0, std::abs(t))) throw StepUnderflowError("step size underflow", t);

        st.step(t, y, h);
        double err = rms(st.error_estimate(h).cwiseQuotient(scale(y, st.y_new)));
        if (!std::isfinite(err) || !st.y_new.allFinite()) err = 1e10;

        if (err <= 1.0) {
            const double t_new = last ? t1 : t + h;
            while (samples > 0 && next_sample <= samples && run.times[next_sample] <= t_new) {
                if (next_sample == samples) {
                    run.states.col(next_sample) = st.y_new;
                } else {
                    const double theta = (run.times[next_sample] - t) / h;
                    run.states.col(next_sample) = st.dense(y, h, theta);
                }
                ++next_sample;
            }
            run.steps.push_back(h);
            t = t_new;
            y = st.y_new;
            st.k1 = st.k7;
            double fac = err == 0.0 ? 10.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 10.0);
            if (rejected_last) fac = std::min(fac, 1.0);
            h *= fac;
            rejected_last = false;
        } else {
            h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
            rejected_last = true;
        }
    }
    run.final_state = y;
    return run;
}

/// Replays a recorded step sequence without adaptation and returns the end state. Finite
/// differences taken through replay differentiate one fixed discrete map, so they are smooth.
template <class Rhs>
[[nodiscard]] Eigen::VectorXd dopri5_replay(Rhs&& rhs, const Eigen::VectorXd& y0, double t0,
                                            const std::vector<double>& steps) {
    detail::Dopri5Stepper<std::remove_reference_t<Rhs>> st(rhs, y0.size());
    Eigen::VectorXd y = y0;
    double t = t0;
    rhs(t, y, st.k1);
    for (const double h : steps) {
        st.step(t, y, h);
        y = st.y_new;
        st.k1 = st.k7;
        t += h;
    }
    return y;
}

}  // namespace lct
