#include "otda/mapping.hpp"

#include <stdexcept>

namespace otda {

std::vector<Point> barycentric_map(const Coupling& coupling,
                                   const std::vector<Point>& target_points) {
    const Matrix& plan = coupling.plan;
    if (plan.cols() != target_points.size())
        throw std::invalid_argument("coupling column count does not match target points");
    if (target_points.empty()) throw std::invalid_argument("empty support");
    const std::size_t d = target_points.front().size();

    std::vector<Point> mapped(plan.rows(), Point(d, 0.0));
    for (std::size_t i = 0; i < plan.rows(); ++i) {
        double row_sum = 0.0;
        for (std::size_t j = 0; j < plan.cols(); ++j) {
            const double g = plan(i, j);
            if (g == 0.0) continue;
            row_sum += g;
            for (std::size_t k = 0; k < d; ++k) mapped[i][k] += g * target_points[j][k];
        }
        if (row_sum <= 0.0) throw std::invalid_argument("unmatched source point");
        for (std::size_t k = 0; k < d; ++k) mapped[i][k] /= row_sum;
    }
    return mapped;
}

SolverChoice solver_from_string(const std::string& name) {
    if (name == "exact") return SolverChoice::exact;
    if (name == "sinkhorn") return SolverChoice::sinkhorn;
    throw std::invalid_argument("unknown solver: " + name);
}

LabeledSample adapt(const LabeledSample& source, const DiscreteMeasure& target,
                    const CostSpec& costs, const AdaptConfig& cfg) {
    source.validate();
    target.validate();

    const CostMatrix c = cost_matrix(source.measure, target, costs);
    const OtSolution sol = cfg.solver == SolverChoice::exact
                               ? solve_exact(source.measure, target, c, cfg.exact)
                               : sinkhorn(source.measure, target, c, cfg.entropic);

    LabeledSample mapped;
    mapped.measure.points = barycentric_map(sol.coupling, target.points);
    mapped.measure.weights = source.measure.weights;
    mapped.labels = source.labels;
    mapped.domain_tag = source.domain_tag;
    mapped.validate();
    return mapped;
}

} // namespace otda
