#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "lct/analysis.hpp"
#include "lct/errors.hpp"
#include "random_problem.hpp"

using lct::testing::example_problem;
using lct::testing::random_case;

TEST_CASE("zeros of the worked example") {
    const auto p = example_problem();
    // g(u, 0, phi(u, 0)) = -u (1 + (0 - u)) = -u (1 - u).
    CHECK(lct::phi_eval(p, 0.5) == -0.25);
    CHECK(lct::phi_eval(p, 0.3) == doctest::Approx(-0.3 * 0.7));
    CHECK(lct::phi_prime(p, 0.0) == -1.0);
    CHECK(lct::phi_prime(p, 1.0) == 1.0);

    const auto zeros = lct::scan_zeros(p, -0.5, 1.5);
    REQUIRE(zeros.size() == 2);
    CHECK(zeros[0].u_bar == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(zeros[1].u_bar == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(zeros[0].phi_prime == doctest::Approx(-1.0));
    CHECK(zeros[1].phi_prime == doctest::Approx(1.0));
    for (const auto& z : zeros) {
        CHECK(z.nondegenerate);
        CHECK(z.sign_change);
        CHECK(std::abs(lct::phi_eval(p, z.u_bar)) <= lct::tolerances::kZero);
    }

    // (-1)^(b-1) a^b Phi'(0) = (-1)(4)(-1) = 4.
    CHECK(zeros[0].det_formula == 4.0);
    CHECK(zeros[0].det_fd == doctest::Approx(4.0).epsilon(1e-6));
    CHECK(zeros[1].det_formula == -4.0);
    CHECK(zeros[1].det_fd == doctest::Approx(-4.0).epsilon(1e-6));
}

TEST_CASE("degree of the worked example") {
    const auto p = example_problem();
    CHECK(lct::degree_phi(p, -0.5, 0.5) == -1);
    CHECK(lct::degree_phi(p, -0.5, 1.5) == 0);
    CHECK(lct::degree_phi(p, 0.5, 1.5) == 1);

    const auto left = lct::degree_G(p, -0.5, 0.5);
    CHECK(left.deg_G == 1);
    CHECK(left.deg_G_jacobian == 1);
    CHECK(left.routes_agree);
    CHECK(left.admissible);
    CHECK(lct::degree_G(p, 0.5, 1.5).deg_G == -1);

    const auto none = lct::degree_G(p, 0.25, 0.75);
    CHECK(none.zeros.empty());
    CHECK(none.deg_phi == 0);
    CHECK(none.deg_G == 0);
}

TEST_CASE("zeros on the boundary are rejected") {
    const auto p = example_problem();
    CHECK_THROWS_AS((void)lct::degree_phi(p, 0.0, 0.5), lct::AdmissibilityError);
    CHECK_THROWS_AS((void)lct::degree_G(p, -0.5, 1.0), lct::AdmissibilityError);
    CHECK_THROWS_AS((void)lct::scan_zeros(p, 1.0, 2.0), lct::AdmissibilityError);
}

TEST_CASE("zeros sitting on grid points are found once") {
    // The 300-point grid on (-1.5, 1.5) hits u = 0.
    const auto p = lct::make_problem("x0 - x0^3", "0", "0", 1.0, 1, 1.0);
    const auto zeros = lct::scan_zeros(p, -1.5, 1.5, 300);
    REQUIRE(zeros.size() == 3);
    CHECK(zeros[1].u_bar == 0.0);
    CHECK(lct::degree_phi(p, -1.5, 1.5) == -1);
    CHECK(lct::degree_phi(p, -0.5, 0.5) == 1);
}

TEST_CASE("degenerate zeros") {
    const auto cubic = lct::make_problem("x0^3", "0", "0", 1.0, 2, 1.0);
    CHECK_THROWS_AS((void)lct::degree_phi(cubic, -1.0, 0.7), lct::DegenerateZeroError);
    const auto report = lct::degree_G(cubic, -1.0, 0.7);
    CHECK_FALSE(report.jacobian_route_defined);
    REQUIRE(report.zeros.size() == 1);
    CHECK_FALSE(report.zeros[0].nondegenerate);
    CHECK(report.zeros[0].sign_change);
    // Boundary formula: deg Phi = 1, b = 2 flips the sign.
    CHECK(report.deg_phi == 1);
    CHECK(report.deg_G == -1);
}

TEST_CASE("constant Phi") {
    const auto p = lct::make_problem("0.5 + 0*x0", "p", "0", 1.0, 3, 1.0);
    CHECK(lct::scan_zeros(p, -2.0, 2.0).empty());
    CHECK(lct::degree_phi(p, -2.0, 2.0) == 0);
    const auto r = lct::degree_G(p, -2.0, 2.0);
    CHECK(r.deg_G == 0);
    CHECK(r.deg_G_jacobian == 0);
}

TEST_CASE("modified field agrees with G except in the third component") {
    const auto p = example_problem();
    const auto field = lct::expand(p);
    const Eigen::VectorXd xi = lct::testing::vec({0.3, -0.4, 0.5, 0.2});
    const Eigen::VectorXd g = field.autonomous(xi);
    const Eigen::VectorXd m = lct::modified_field(p, xi);
    CHECK(m[0] == g[0]);
    CHECK(m[1] == g[1]);
    CHECK(m[3] == g[3]);
    CHECK(m[2] == doctest::Approx(2.0 * ((-0.4 - 0.3) - 0.2)));
    CHECK(lct::modified_field(p, lct::lifted_zero(p, 1.0)).isZero(0.0));
}

TEST_CASE("fd_jacobian of a linear map is exact to rounding") {
    Eigen::MatrixXd a(2, 3);
    a << 1, 2, 3, -4, 5, 0.5;
    const Eigen::MatrixXd j = lct::fd_jacobian([&](const Eigen::VectorXd& x) { return Eigen::VectorXd(a * x); },
                                               lct::testing::vec({0.1, 0.2, 0.3}));
    CHECK((j - a).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("degree product and determinant formula on random problems") {
    std::mt19937_64 rng(0x5EED);
    int trial = 0;
    for (const int b : {1, 2, 3, 5}) {
        for (int k = 0; k < 5; ++k, ++trial) {
            CAPTURE(trial);
            const auto rc = random_case(rng, b);
            const double alpha = -2.0, beta = 2.0;
            const auto report = lct::degree_G(rc.problem, alpha, beta);
            REQUIRE(report.zeros.size() == 3);
            CHECK(report.routes_agree);
            CHECK(report.deg_G == ((b - 1) % 2 == 0 ? 1 : -1) * report.deg_phi);
            CHECK(report.deg_G_jacobian == report.deg_G);
            // Cubic with positive leading coefficient: signs +, -, + at the three roots.
            CHECK(report.deg_phi == (rc.scale > 0 ? 1 : -1));
            for (std::size_t i = 0; i < 3; ++i) {
                CHECK(report.zeros[i].u_bar == doctest::Approx(rc.roots[i]).epsilon(1e-9));
                CHECK(report.zeros[i].det_fd == doctest::Approx(report.zeros[i].det_formula).epsilon(1e-5));
            }
            // Excision and additivity: split between the first two roots.
            const double mid = 0.5 * (rc.roots[0] + rc.roots[1]);
            CHECK(lct::degree_phi(rc.problem, alpha, mid) + lct::degree_phi(rc.problem, mid, beta) == report.deg_phi);
            CHECK(lct::degree_phi(rc.problem, rc.roots[0] - 0.1, rc.roots[2] + 0.1) == report.deg_phi);
        }
    }
}
