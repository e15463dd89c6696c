#pragma once

// Test-only generator of random smooth-ish expressions and a finite-difference reference.

#include <array>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "lct/errors.hpp"
#include "lct/expr.hpp"

namespace lct::testing {

inline std::string random_text(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 9);
    std::uniform_real_distribution<double> lit(-3.0, 3.0);
    std::uniform_int_distribution<std::size_t> var(0, vars.size() - 1);
    switch (pick(rng)) {
        case 0: {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", std::abs(lit(rng)));
            return buf;
        }
        case 1: return vars[var(rng)];
        case 2: return "(" + random_text(rng, vars, depth - 1) + "+" + random_text(rng, vars, depth - 1) + ")";
        case 3: return "(" + random_text(rng, vars, depth - 1) + "-" + random_text(rng, vars, depth - 1) + ")";
        case 4: return random_text(rng, vars, depth - 1) + "*" + random_text(rng, vars, depth - 1);
        case 5: return "(" + random_text(rng, vars, depth - 1) + ")/(2+sin(" + random_text(rng, vars, depth - 1) + "))";
        case 6: return "-" + random_text(rng, vars, depth - 1);
        case 7: return "sin(" + random_text(rng, vars, depth - 1) + ")";
        case 8: return "cos(" + random_text(rng, vars, depth - 1) + ")";
        default: return "(" + random_text(rng, vars, depth - 1) + ")^2";
    }
}

inline Expr random_expr(std::mt19937_64& rng, const std::vector<std::string>& vars, int depth) {
    return parse(random_text(rng, vars, depth), vars);
}

inline std::optional<double> central_fd(const Expr& e, std::array<double, 3> x, std::size_t v, double h) {
    try {
        const double x0 = x[v];
        x[v] = x0 + h;
        const double plus = e.eval(x);
        x[v] = x0 - h;
        const double minus = e.eval(x);
        return (plus - minus) / (2.0 * h);
    } catch (const EvalError&) {
        return std::nullopt;
    }
}

}  // namespace lct::testing
