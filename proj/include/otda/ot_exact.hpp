#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "otda/cost.hpp"
#include "otda/matrix.hpp"
#include "otda/measures.hpp"

namespace otda {

// Transport plan between two measures. Row sums match the source weights and
// column sums the target weights (within solver tolerance), entries >= 0.
struct Coupling {
    Matrix plan; // N_S x N_T
    DiscreteMeasure row_marginal;
    DiscreteMeasure col_marginal;

    // L1 violation of both marginal constraints.
    double marginal_violation() const;
};

struct SolverMeta {
    std::string status; // "optimal", "converged", "max_iters"
    std::int64_t iterations = 0;
    double marginal_violation = 0.0;
    // Full objective including regularization terms (entropic solvers);
    // NaN for the exact solver where it would equal cost_value.
    double objective = std::numeric_limits<double>::quiet_NaN();
    std::vector<double> objective_trace; // group-regularized outer iterations
};

struct OtSolution {
    Coupling coupling;
    double cost_value = 0.0; // <C, plan>_F, regularizers excluded
    SolverMeta meta;
};

struct ExactConfig {
    // solve_exact refuses instances with more than this many plan entries
    std::size_t max_variables = 250000;
};

// Exact discrete optimal transport by network simplex on the bipartite
// transportation graph. Zero-weight atoms are pruned before solving and get
// zero rows/columns in the returned plan.
OtSolution solve_exact(const DiscreteMeasure& source, const DiscreteMeasure& target,
                       const CostMatrix& costs, const ExactConfig& cfg = {});

double w1(const DiscreteMeasure& source, const DiscreteMeasure& target,
          const CostMatrix& costs, const ExactConfig& cfg = {});
double w1(const DiscreteMeasure& source, const DiscreteMeasure& target, const CostSpec& spec,
          const ExactConfig& cfg = {});

} // namespace otda
