#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "otda/bounds.hpp"
#include "otda/learners.hpp"
#include "otda/measures.hpp"

namespace otda {

// ---- seeded single-run harnesses -------------------------------------------
// These build the synthetic task, fit the hypotheses, estimate lambda within
// the chosen class, and assemble the theorem's right-hand side.

struct UnsupRunConfig {
    DatasetConfig dataset;
    LearnerSpec learner;
    ConcentrationParams params;
    CostSpec cost;
};

struct UnsupRun {
    BoundReport report;
    double target_error = 0.0; // eps_T(h) of the source-trained hypothesis
};

UnsupRun run_bound_unsup(const UnsupRunConfig& cfg);

struct CombinedRunConfig {
    DatasetConfig dataset;
    double alpha = 0.5;
    double beta = 0.1;
    int n_mixed = 200; // mixed-sample size; beta*n from target, rest from source
    LearnerSpec learner;
    ConcentrationParams params;
    CostSpec cost;
};

struct CombinedRun {
    BoundReport report;
    double combined_error_value = 0.0;  // eps_alpha of the returned minimizer
    double target_error_alpha = 0.0;    // eps_T(h_alpha_hat) on the full target sample
    double target_error_target_only = 0.0; // eps_T of the target-part-only hypothesis
};

// Empirical minimizer of eps_alpha over hypotheses trained on the source
// part, the target part, and their union of the mixed sample.
CombinedRun run_bound_combined(const CombinedRunConfig& cfg);

struct MultiRunConfig {
    int n_per_domain = 200;
    double noise_std = 0.0;
    std::vector<double> source_rotations = {10.0, 60.0};
    std::vector<double> alphas = {0.5, 0.5};
    std::uint64_t seed = 1;
    LearnerSpec learner;
    ConcentrationParams params;
    CostSpec cost;
};

struct MultiRun {
    BoundReport report;
};

// Independent moon clouds per domain; source j is rotated by its configured
// angle, the target is unrotated.
MultiRun run_bound_multi(const MultiRunConfig& cfg);

// ---- config-file driven runs ------------------------------------------------

// Runs one bound computation described by a JSON config (schema 1) and
// returns the report with the resolved config embedded. Throws
// std::invalid_argument on schema violations, listing the offending keys.
nlohmann::json run_bound_from_config(const nlohmann::json& config);

// Grid x seed orchestration: writes one report JSON per cell plus
// aggregate.csv under out_dir. Cells run concurrently (capped by
// OTDA_THREADS); outputs are ordered by (grid index, seed) and re-running the
// same config reproduces byte-identical files.
void run_experiment(const std::string& config_path, const std::string& out_dir);

} // namespace otda
