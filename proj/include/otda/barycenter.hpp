#pragma once

#include <optional>
#include <vector>

#include "otda/cost.hpp"
#include "otda/measures.hpp"
#include "otda/ot_entropic.hpp"
#include "otda/ot_exact.hpp"

namespace otda {

struct BarycenterConfig {
    // fixed support; defaults to the union of the input supports with exact
    // duplicates merged
    std::optional<std::vector<Point>> support;
    // one weight per input, nonnegative, summing to 1; empty means uniform
    std::vector<double> weights_a;

    enum class Solver { exact, entropic } solver = Solver::exact;
    EntropicConfig entropic; // epsilon_reg for the entropic path

    int max_outer_iters = 2000; // Bregman projection sweeps
    double tolerance = 1e-7;    // L1 disagreement of row marginals with the consensus

    CostSpec cost;
    std::size_t max_exact_variables = 200000;
};

struct BarycenterResult {
    DiscreteMeasure barycenter; // weights on the fixed support
    double objective = 0.0;     // sum_i a_i W1(barycenter, input_i), achieved
    SolverMeta meta;
};

// Fixed-support Wasserstein barycenter. The exact path solves the joint
// transportation LP over all couplings and the support weights; the entropic
// path runs log-domain iterative Bregman projections.
BarycenterResult barycenter(const std::vector<DiscreteMeasure>& inputs,
                            const BarycenterConfig& cfg);

struct MultisourceReport {
    double pipeline_objective = 0.0;         // (1/N) sum_j alpha_j W1(mu_j, bary) + W1(bary, target)
    double barycenter_objective = 0.0;  // renormalized-weight barycenter functional value
    double sum_alpha_w1_to_target = 0.0;
    std::vector<double> per_source_w1_to_bary;
    std::vector<double> per_source_w1_to_target;
    double w1_bary_to_target = 0.0;
};

// Multi-source adaptation: finds the barycenter of the sources (weights
// alpha_j / N) jointly with the target (weight 1), then composes barycentric
// maps source -> barycenter -> target. Returns the mapped, labeled source
// points (weights scaled by alpha_j) and the decomposed objective values.
std::pair<LabeledSample, MultisourceReport> multisource_adapt(
    const std::vector<LabeledSample>& sources, const DiscreteMeasure& target,
    const std::vector<double>& alphas, const CostSpec& costs, const BarycenterConfig& cfg);

} // namespace otda
