#pragma once

#include <Eigen/Dense>

#include "lct/chain.hpp"

namespace lct::testing {

// x'' = -x (1 + gamma_2^2 * (x' - x)) + lambda (1 + x sin(2 pi t)), T = 1.
inline ProblemSpec example_problem(double period = 1.0) {
    return make_problem("-x0*(1+x2)", "q-p", "1+x*sin(2*pi*t)", 2.0, 2, period);
}

// x'' = -x with phi = 0 and forcing sin t; resonant for T = 2 pi.
inline ProblemSpec resonant_oscillator(int b = 1) {
    return make_problem("-x0", "0", "sin(t)", 1.0, b, 2.0 * 3.14159265358979323846);
}

inline Eigen::VectorXd vec(std::initializer_list<double> v) {
    Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (const double x : v) out[i++] = x;
    return out;
}

}  // namespace lct::testing
