#include <cmath>
#include <tuple>

#include "doctest.h"
#include "lct/errors.hpp"
#include "lct/kernel.hpp"

using lct::GammaKernel;

TEST_CASE("gamma density values") {
    CHECK(lct::gamma_eval(GammaKernel(2.0, 2), 0.0) == 0.0);
    CHECK(lct::gamma_eval(GammaKernel(2.0, 1), 0.0) == 2.0);
    CHECK(lct::gamma_eval(GammaKernel(2.0, 2), 1.0) == doctest::Approx(0.5413411329464508).epsilon(1e-14));
    CHECK(lct::gamma_eval(GammaKernel(2.0, 2), -0.5) == 0.0);
    // Large shapes stay finite.
    const double big = lct::gamma_eval(GammaKernel(200.0, 200), 1.0);
    CHECK(std::isfinite(big));
    CHECK(big > 0.0);
}

TEST_CASE("kernel construction rejects invalid parameters") {
    CHECK_THROWS_AS(GammaKernel(0.0, 2), lct::ConfigError);
    CHECK_THROWS_AS(GammaKernel(1.0, 0), lct::ConfigError);
    CHECK_THROWS_AS(GammaKernel(-1.0, 1), lct::ConfigError);
}

TEST_CASE("moments") {
    auto [m, v] = lct::gamma_moments(GammaKernel(2.0, 2));
    CHECK(m == 1.0);
    CHECK(v == 0.5);
    std::tie(m, v) = lct::gamma_moments(GammaKernel(1.0, 1));
    CHECK(m == 1.0);
    CHECK(v == 1.0);
    std::tie(m, v) = lct::gamma_moments(GammaKernel(4.0, 2));
    CHECK(m == 0.5);
    CHECK(v == 0.125);
}

TEST_CASE("tail horizon") {
    // Reference values from the regularized incomplete gamma on the same 0.01 grid.
    const GammaKernel k(2.0, 2);
    CHECK(lct::tail_horizon(k, 0.5) == doctest::Approx(0.84).epsilon(1e-12));
    const double h10 = lct::tail_horizon(k, 1e-10);
    CHECK(h10 == doctest::Approx(13.17).epsilon(1e-12));
    CHECK(h10 <= 20.0);
    CHECK(lct::kernel_tail_mass(k, h10) <= 1e-10);
    CHECK(lct::tail_horizon(k, 1e-12) == doctest::Approx(15.55).epsilon(1e-12));

    // Nearly all mass allowed in the tail: the horizon collapses towards 0.
    CHECK(lct::tail_horizon(GammaKernel(2.0, 1), 1.0 - 1e-9) <= lct::kernel_panel_width(GammaKernel(2.0, 1)));
    CHECK(lct::tail_horizon(k, 1.0 - 1e-3) <= 0.05);
    CHECK_THROWS_AS((void)lct::tail_horizon(k, 1.0), lct::ConfigError);
}

TEST_CASE("unit mass for a grid of kernels") {
    for (const double a : {0.5, 1.0, 2.0, 8.0}) {
        for (const int b : {1, 2, 3, 5, 10}) {
            const GammaKernel k(a, b);
            const double mass = lct::kernel_mass(k, lct::tail_horizon(k, 1e-12));
            CHECK(std::abs(mass - 1.0) <= 1e-8);
        }
    }
}

TEST_CASE("chain recurrence of the gamma family") {
    // d/ds gamma^i = a (gamma^{i-1} - gamma^i), i >= 2.
    for (const double a : {0.5, 2.0, 8.0}) {
        for (int i = 2; i <= 6; ++i) {
            for (const double s : {0.05, 0.3, 1.0, 2.5}) {
                const double h = 1e-6;
                const double fd = (lct::gamma_eval(GammaKernel(a, i), s + h) - lct::gamma_eval(GammaKernel(a, i), s - h)) / (2 * h);
                const double rec = a * (lct::gamma_eval(GammaKernel(a, i - 1), s) - lct::gamma_eval(GammaKernel(a, i), s));
                CHECK(std::abs(fd - rec) <= 1e-6);
            }
        }
    }
}

TEST_CASE("simpson is exact on cubics") {
    const double v = lct::integrate_simpson([](double x) { return x * x * x - 2 * x + 1; }, 0.0, 2.0, std::size_t{3});
    CHECK(v == doctest::Approx(4.0 - 4.0 + 2.0));
}
