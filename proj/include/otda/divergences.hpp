#pragma once

#include <vector>

#include "otda/cost.hpp"
#include "otda/measures.hpp"

namespace otda {

// Half-L1 total variation (1/2) sum |p_i - q_i|. Requires identical supports
// (same points, same order).
double total_variation(const DiscreteMeasure& p, const DiscreteMeasure& q);

// Full L1 distance sum |p_i - q_i| = 2 * total_variation.
double l1_distance(const DiscreteMeasure& p, const DiscreteMeasure& q);

// sum p_i log(p_i / q_i), with 0 log(0/.) = 0; +infinity when q_i = 0 < p_i.
double kl_divergence(const DiscreteMeasure& p, const DiscreteMeasure& q);

struct ChainRow {
    double w1 = 0.0;
    double tv_half = 0.0;
    double l1 = 0.0;
    double kl = 0.0;
    double diam = 0.0;
    double chain_right = 0.0; // sqrt(2 diam KL)
    // the inequality chain W1 <= diam*TV <= sqrt(2 diam KL) under each TV
    // convention, plus Pinsker on the half-L1 form
    bool w1_le_diam_tv_half = false;
    bool w1_le_diam_l1 = false;
    bool mid_half_le_right = false;
    bool mid_l1_le_right = false;
    bool pinsker_half = false; // tv_half <= sqrt(kl/2)
};

struct ChainAudit {
    std::vector<ChainRow> rows;
    std::size_t skipped_infinite_kl = 0;
    double rate_w1_le_diam_tv_half = 0.0;
    double rate_w1_le_diam_l1 = 0.0;
    double rate_mid_half_le_right = 0.0;
    double rate_mid_l1_le_right = 0.0;
    double rate_pinsker_half = 0.0;
};

// Audits W1 <= diam ||p-q||_TV <= sqrt(2 diam KL) on measure pairs sharing a
// support, under both TV conventions. Pairs with infinite KL are skipped and
// counted.
ChainAudit ckp_chain_audit(const std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>>& pairs,
                           const CostSpec& costs);

} // namespace otda
