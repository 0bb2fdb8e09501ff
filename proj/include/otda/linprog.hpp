#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace otda::lp {

// Equality-form linear program: min c'x subject to A x = b, x >= 0.
struct Constraint {
    std::vector<std::pair<std::size_t, double>> terms; // (variable, coefficient)
    double rhs = 0.0;
};

struct Problem {
    std::size_t num_vars = 0;
    std::vector<double> objective;
    std::vector<Constraint> equalities;
};

struct Solution {
    std::vector<double> x;
    double objective = 0.0;
    std::int64_t pivots = 0;
};

// Two-phase dense tableau simplex. Throws NumericalError on infeasibility,
// unboundedness, or pivot-limit; with transportation-style inputs those only
// arise from caller bugs.
Solution solve(const Problem& problem);

} // namespace otda::lp
