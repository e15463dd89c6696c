#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "fixtures.hpp"
#include "lct/analysis.hpp"
#include "lct/certify.hpp"
#include "lct/errors.hpp"

using lct::testing::example_problem;
using lct::testing::vec;

TEST_CASE("Lipschitz estimate of a linear field is its operator norm") {
    Eigen::MatrixXd a(3, 3);
    a << 0, 1, 0, -2, -0.5, 3, 1, 0, -1;
    const auto field = lct::ExpandedField::linear(a, 1.0);
    const double expected = Eigen::JacobiSVD<Eigen::MatrixXd>(a).singularValues()(0);
    CHECK(std::abs(lct::lipschitz_estimate(field, vec({0.2, -0.1, 0.4}), 0.5) - expected) <= 1e-6);

    const auto zero = lct::ExpandedField::linear(Eigen::MatrixXd::Zero(3, 3), 1.0);
    const double l0 = lct::lipschitz_estimate(zero, vec({0, 0, 0}), 1.0);
    CHECK(l0 == 0.0);
    CHECK(std::isinf(lct::yorke_check(l0, 100.0).bound));
    CHECK(lct::yorke_check(l0, 100.0).passes);
}

TEST_CASE("Lipschitz estimate scales with the field") {
    Eigen::MatrixXd a(2, 2);
    a << 0, 1, -1, 0;
    const double l1 = lct::lipschitz_estimate(lct::ExpandedField::linear(a, 1.0), vec({0, 0}), 1.0);
    const double l3 = lct::lipschitz_estimate(lct::ExpandedField::linear(3.0 * a, 1.0), vec({0, 0}), 1.0);
    CHECK(l3 == doctest::Approx(3.0 * l1).epsilon(1e-8));
}

TEST_CASE("Lipschitz estimate grows with the sample set") {
    // The 13-point grid contains the 7-point grid, so the max cannot drop.
    const auto field = lct::expand(example_problem());
    const Eigen::VectorXd c = vec({0.3, 0.1, -0.2, 0.0});
    CHECK(lct::lipschitz_estimate(field, c, 0.5, 13) >= lct::lipschitz_estimate(field, c, 0.5, 7));
    // Radius r on 3 points per axis is a subset of radius 2r on 5 points.
    CHECK(lct::lipschitz_estimate(field, c, 1.0, 5) >= lct::lipschitz_estimate(field, c, 0.5, 3));
    CHECK_THROWS_AS((void)lct::lipschitz_estimate(field, c, 0.0, 7), lct::ConfigError);
}

TEST_CASE("Lipschitz estimate in high dimension uses Monte Carlo and is deterministic") {
    const auto p = lct::make_problem("-x0*(1+x2)", "q-p", "0", 2.0, 6, 1.0);
    const auto field = lct::expand(p);
    REQUIRE(field.dim() == 8);
    const Eigen::VectorXd c = Eigen::VectorXd::Zero(8);
    const double l = lct::lipschitz_estimate(field, c, 0.1, 3);
    CHECK(l > 0.0);
    CHECK(l == lct::lipschitz_estimate(field, c, 0.1, 3));
}

TEST_CASE("Yorke bound") {
    CHECK(lct::yorke_check(1.9, 1.0).passes);
    CHECK(lct::yorke_check(1.9, 1.0).bound == doctest::Approx(2 * std::numbers::pi / 1.9));
    CHECK_FALSE(lct::yorke_check(2 * std::numbers::pi, 1.0).passes);  // strict
    CHECK_FALSE(lct::yorke_check(7.0, 1.0).passes);
}

TEST_CASE("example zeros are certified ejecting at T = 1") {
    const auto p = example_problem();
    const auto zeros = lct::scan_zeros(p, -0.5, 1.5);
    REQUIRE(zeros.size() == 2);
    for (const auto& z : zeros) {
        const auto report = lct::certify_ejecting(p, z, 0.1);
        CHECK(report.ejecting_certified);
        CHECK(report.period == 1.0);
        CHECK(report.certified_bound == doctest::Approx(report.yorke_period_bound / 1.1));
        // The sampled constant is near the Euclidean norm of the Jacobian at the zero (about 3.84 to 3.86).
        CHECK(report.lipschitz > 3.5);
        CHECK(report.lipschitz < 4.5);
    }
    CHECK(lct::default_box_radius(zeros[1]) == doctest::Approx(0.2));
}

TEST_CASE("a long period defeats the certificate") {
    const auto p = example_problem(10.0);
    const auto zeros = lct::scan_zeros(p, -0.5, 1.5);
    REQUIRE(zeros.size() == 2);
    const auto report = lct::certify_ejecting(p, zeros[0], 0.1);
    CHECK_FALSE(report.ejecting_certified);
    CHECK_FALSE(report.notes.empty());
}

TEST_CASE("multiplicity") {
    const auto p = example_problem();
    const auto two = lct::multiplicity_report(p, -0.5, 1.5);
    CHECK(two.n == 2);
    CHECK(two.certified_zeros.size() == 2);
    CHECK(two.verdict.find("at least 2") != std::string::npos);

    CHECK(lct::multiplicity_report(p, 0.25, 0.75).n == 0);

    // Phi(u) = u (1 - u^2) with a short period: three certified zeros.
    const auto cubic = lct::make_problem("x0-x0^3", "0", "0", 1.0, 1, 0.2);
    CHECK(lct::multiplicity_report(cubic, -2.0, 2.0).n == 3);
}
