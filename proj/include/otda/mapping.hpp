#pragma once

#include "otda/cost.hpp"
#include "otda/measures.hpp"
#include "otda/ot_entropic.hpp"
#include "otda/ot_exact.hpp"

namespace otda {

// Barycentric projection: row i of the result is the coupling-weighted
// average of the target points, sum_j g_ij y_j / sum_j g_ij. Every output
// point lies in the convex hull of the target support.
std::vector<Point> barycentric_map(const Coupling& coupling,
                                   const std::vector<Point>& target_points);

enum class SolverChoice { exact, sinkhorn };

SolverChoice solver_from_string(const std::string& name);

struct AdaptConfig {
    SolverChoice solver = SolverChoice::exact;
    ExactConfig exact;
    EntropicConfig entropic;
};

// Transports the source onto the target and returns the mapped points with
// the original labels attached.
LabeledSample adapt(const LabeledSample& source, const DiscreteMeasure& target,
                    const CostSpec& costs, const AdaptConfig& cfg = {});

} // namespace otda
