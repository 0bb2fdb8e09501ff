#pragma once

#include <cstdint>
#include <vector>

#include "otda/cost.hpp"
#include "otda/measures.hpp"
#include "otda/ot_exact.hpp"

namespace otda {

enum class LogDomainMode { automatic, on, off };

struct EntropicConfig {
    double epsilon_reg = 0.01;       // coefficient on the negative-entropy term
    std::int64_t max_iters = 200000; // scaling sweeps at the final epsilon
    double tolerance = 1e-9;         // L1 marginal violation stop criterion
    // automatic switches to the stabilized log-domain solver for
    // epsilon_reg < 1e-2, where the Gibbs kernel underflows on ordinary
    // euclidean instances
    LogDomainMode log_domain = LogDomainMode::automatic;
    // warm-start the log-domain solver by halving epsilon from a coarse level
    bool anneal = true;

    void validate() const;
};

// Entropy-regularized OT by Sinkhorn-Knopp matrix scaling. The returned plan
// has the form diag(u) exp(-C/eps) diag(v); cost_value is <C, plan> with the
// regularizer excluded, meta.objective includes it.
OtSolution sinkhorn(const DiscreteMeasure& source, const DiscreteMeasure& target,
                    const CostMatrix& costs, const EntropicConfig& cfg);

struct GroupRegConfig {
    double eta = 0.0; // group penalty weight
    // I_c: source row indices per class; must partition the rows
    std::vector<std::vector<std::size_t>> class_index_sets;
    int inner_iters = 10; // majorize-minimize rounds around the scaling solver
    // the group norm is fixed to ||.||_1^(1/2) (q = 1, p = 1/2)

    void validate(std::size_t n_rows) const;
};

std::vector<std::vector<std::size_t>> class_index_sets_from_labels(const std::vector<int>& labels);

// Class-structured transport: minimizes
//   <C, g> + eps * sum g log g + eta * sum_j sum_c ||g(I_c, j)||_1^(1/2)
// by re-running Sinkhorn on a cost majorization of the concave group term.
// With eta = 0 this is exactly sinkhorn().
OtSolution sinkhorn_group(const LabeledSample& source, const DiscreteMeasure& target,
                          const CostMatrix& costs, const EntropicConfig& cfg,
                          const GroupRegConfig& gcfg);

// Coupling mass that leaves each target column's dominant class; for two
// classes this is sum_j min(mass_0j, mass_1j).
double class_mixing_mass(const Coupling& coupling,
                         const std::vector<std::vector<std::size_t>>& class_index_sets);

// Full three-term objective of sinkhorn_group evaluated on a plan.
double group_objective(const Matrix& plan, const CostMatrix& costs, double epsilon_reg,
                       double eta, const std::vector<std::vector<std::size_t>>& class_index_sets);

} // namespace otda
