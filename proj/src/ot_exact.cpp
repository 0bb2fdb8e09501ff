#include "otda/ot_exact.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otda/errors.hpp"

namespace otda {

double Coupling::marginal_violation() const {
    const auto rows = plan.row_sums();
    const auto cols = plan.col_sums();
    double v = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i) v += std::abs(rows[i] - row_marginal.weights[i]);
    for (std::size_t j = 0; j < cols.size(); ++j) v += std::abs(cols[j] - col_marginal.weights[j]);
    return v;
}

namespace {

// Primal network simplex on the dense bipartite transportation graph.
// Nodes are sources 0..m-1 and sinks m..m+n-1; arc (i,j) has id i*n+j and is
// always directed source -> sink. The basis is a spanning tree initialized by
// the northwest-corner rule (a path, no artificial arcs). Entering arcs are
// found by block search over reduced costs; after a long degenerate stall the
// search switches to Bland's rule, which terminates.
class TransportSimplex {
public:
    TransportSimplex(const std::vector<double>& supply, const std::vector<double>& demand,
                     const Matrix& cost)
        : m_(supply.size()),
          n_(demand.size()),
          num_nodes_(m_ + n_),
          cost_(cost),
          flow_(m_ * n_, 0.0),
          parent_(num_nodes_, -1),
          parent_arc_(num_nodes_, -1),
          depth_(num_nodes_, 0),
          pi_(num_nodes_, 0.0),
          child_head_(num_nodes_, -1),
          sibling_(num_nodes_, -1),
          order_(num_nodes_, 0) {
        init_northwest(supply, demand);
        rebuild_tree_arrays();
        rc_tol_ = 1e-11 * (1.0 + cost_.max_abs());
        block_size_ = std::max<std::size_t>(64, static_cast<std::size_t>(
                                                    std::sqrt(static_cast<double>(m_ * n_))));
    }

    std::int64_t run() {
        const std::int64_t stall_limit = 100 + 5 * static_cast<std::int64_t>(num_nodes_);
        const std::int64_t pivot_limit =
            100000 + 400 * static_cast<std::int64_t>(num_nodes_);
        std::int64_t pivots = 0;
        std::int64_t stall = 0;
        while (true) {
            const std::ptrdiff_t entering = bland_mode_ ? find_entering_bland()
                                                        : find_entering_block();
            if (entering < 0) break;
            const double theta = pivot(static_cast<std::size_t>(entering));
            ++pivots;
            stall = theta > 0.0 ? 0 : stall + 1;
            if (stall > stall_limit) bland_mode_ = true;
            if (pivots > pivot_limit)
                throw NumericalError("network simplex exceeded pivot limit");
        }
        return pivots;
    }

    const std::vector<double>& flows() const { return flow_; }

private:
    std::size_t m_, n_, num_nodes_;
    const Matrix& cost_;
    std::vector<double> flow_;
    std::vector<int> parent_;
    std::vector<std::ptrdiff_t> parent_arc_;
    std::vector<int> depth_;
    std::vector<double> pi_;
    std::vector<int> child_head_, sibling_, order_;
    double rc_tol_ = 1e-11;
    std::size_t block_size_ = 64;
    std::size_t cursor_ = 0;
    bool bland_mode_ = false;
    // per-pivot scratch, hoisted to avoid reallocation
    std::vector<std::size_t> path_up_, side_s_, side_t_;
    std::vector<std::ptrdiff_t> old_arcs_;

    int arc_tail(std::size_t a) const { return static_cast<int>(a / n_); }
    int arc_head(std::size_t a) const { return static_cast<int>(m_ + a % n_); }
    double arc_cost(std::size_t a) const { return cost_.data()[a]; }
    double reduced_cost(std::size_t a) const {
        return arc_cost(a) - pi_[arc_tail(a)] + pi_[arc_head(a)];
    }

    void init_northwest(std::vector<double> a, std::vector<double> b) {
        std::size_t i = 0, j = 0;
        int prev_node = 0; // root is source 0
        bool prev_is_source = true;
        while (true) {
            const std::size_t arc = i * n_ + j;
            const double x = std::min(a[i], b[j]);
            flow_[arc] = x;
            a[i] -= x;
            b[j] -= x;
            // link the node this cell introduces to the staircase path
            if (prev_is_source) {
                parent_[m_ + j] = prev_node;
                parent_arc_[m_ + j] = static_cast<std::ptrdiff_t>(arc);
            } else {
                parent_[i] = prev_node;
                parent_arc_[i] = static_cast<std::ptrdiff_t>(arc);
            }
            if (i == m_ - 1 && j == n_ - 1) break;
            if (j == n_ - 1 || (i < m_ - 1 && a[i] <= b[j])) {
                prev_node = static_cast<int>(m_ + j);
                prev_is_source = false;
                ++i;
            } else {
                prev_node = static_cast<int>(i);
                prev_is_source = true;
                ++j;
            }
        }
        parent_[0] = -1;
        parent_arc_[0] = -1;
    }

    void rebuild_tree_arrays() {
        std::fill(child_head_.begin(), child_head_.end(), -1);
        for (std::size_t v = 0; v < num_nodes_; ++v) {
            const int p = parent_[v];
            if (p < 0) continue;
            sibling_[v] = child_head_[p];
            child_head_[p] = static_cast<int>(v);
        }
        // iterative preorder from the root
        std::size_t top = 0;
        order_[top++] = 0;
        depth_[0] = 0;
        pi_[0] = 0.0;
        for (std::size_t k = 0; k < top; ++k) {
            const int u = order_[k];
            for (int v = child_head_[u]; v >= 0; v = sibling_[v]) {
                depth_[v] = depth_[u] + 1;
                const std::size_t a = static_cast<std::size_t>(parent_arc_[v]);
                // basic arcs have zero reduced cost
                pi_[v] = arc_head(a) == v ? pi_[u] - arc_cost(a) : pi_[u] + arc_cost(a);
                order_[top++] = static_cast<int>(v);
            }
        }
    }

    std::ptrdiff_t find_entering_block() {
        const std::size_t total = m_ * n_;
        double best = -rc_tol_;
        std::ptrdiff_t best_arc = -1;
        std::size_t scanned = 0;
        while (scanned < total) {
            const std::size_t count = std::min(block_size_, total - scanned);
            for (std::size_t k = 0; k < count; ++k) {
                const std::size_t a = (cursor_ + k) % total;
                const double rc = reduced_cost(a);
                if (rc < best) {
                    best = rc;
                    best_arc = static_cast<std::ptrdiff_t>(a);
                }
            }
            cursor_ = (cursor_ + count) % total;
            scanned += count;
            if (best_arc >= 0) return best_arc;
        }
        return -1;
    }

    std::ptrdiff_t find_entering_bland() {
        const std::size_t total = m_ * n_;
        for (std::size_t a = 0; a < total; ++a)
            if (reduced_cost(a) < -rc_tol_) return static_cast<std::ptrdiff_t>(a);
        return -1;
    }

    double pivot(std::size_t entering) {
        const int s = arc_tail(entering);
        const int t = arc_head(entering);

        // nodes strictly below the apex on each side, listed bottom-up
        std::vector<std::size_t>& side_s = side_s_;
        std::vector<std::size_t>& side_t = side_t_;
        side_s.clear();
        side_t.clear();
        int xs = s, xt = t;
        while (depth_[xs] > depth_[xt]) {
            side_s.push_back(static_cast<std::size_t>(xs));
            xs = parent_[xs];
        }
        while (depth_[xt] > depth_[xs]) {
            side_t.push_back(static_cast<std::size_t>(xt));
            xt = parent_[xt];
        }
        while (xs != xt) {
            side_s.push_back(static_cast<std::size_t>(xs));
            xs = parent_[xs];
            side_t.push_back(static_cast<std::size_t>(xt));
            xt = parent_[xt];
        }

        // Pushing theta along s -> t: on the t side the cycle runs x -> parent,
        // on the s side parent -> x. A tree arc is backward when the cycle
        // direction opposes the arc direction.
        double theta = std::numeric_limits<double>::infinity();
        std::ptrdiff_t leave_node = -1;
        bool leave_on_t_side = false;
        auto consider = [&](std::size_t node, bool on_t_side) {
            const std::size_t a = static_cast<std::size_t>(parent_arc_[node]);
            const bool arc_points_up = arc_tail(a) == static_cast<int>(node);
            const bool backward = on_t_side ? !arc_points_up : arc_points_up;
            if (!backward) return;
            const double f = flow_[a];
            const bool better =
                f < theta ||
                (f == theta && bland_mode_ && leave_node >= 0 &&
                 a < static_cast<std::size_t>(parent_arc_[leave_node]));
            if (better) {
                theta = f;
                leave_node = static_cast<std::ptrdiff_t>(node);
                leave_on_t_side = on_t_side;
            }
        };
        for (std::size_t node : side_t) consider(node, true);
        for (std::size_t node : side_s) consider(node, false);

        if (leave_node < 0) throw NumericalError("transportation cycle without blocking arc");

        if (theta > 0.0) {
            flow_[entering] += theta;
            auto apply = [&](const std::vector<std::size_t>& side, bool on_t_side) {
                for (std::size_t node : side) {
                    const std::size_t a = static_cast<std::size_t>(parent_arc_[node]);
                    const bool arc_points_up = arc_tail(a) == static_cast<int>(node);
                    const bool backward = on_t_side ? !arc_points_up : arc_points_up;
                    flow_[a] += backward ? -theta : theta;
                }
            };
            apply(side_t, true);
            apply(side_s, false);
        }
        flow_[static_cast<std::size_t>(parent_arc_[leave_node])] = 0.0;

        // Re-root the cut subtree at the entering arc's endpoint inside it.
        const int q = leave_on_t_side ? t : s;
        const int q_new_parent = leave_on_t_side ? s : t;
        path_up_.clear();
        for (int x = q; x != static_cast<int>(leave_node);) {
            path_up_.push_back(static_cast<std::size_t>(x));
            x = parent_[x];
        }
        path_up_.push_back(static_cast<std::size_t>(leave_node));
        std::vector<std::ptrdiff_t>& old_arcs = old_arcs_;
        old_arcs.resize(path_up_.size());
        for (std::size_t k = 0; k < path_up_.size(); ++k) old_arcs[k] = parent_arc_[path_up_[k]];
        parent_[q] = q_new_parent;
        parent_arc_[q] = static_cast<std::ptrdiff_t>(entering);
        for (std::size_t k = 0; k + 1 < path_up_.size(); ++k) {
            parent_[path_up_[k + 1]] = static_cast<int>(path_up_[k]);
            parent_arc_[path_up_[k + 1]] = old_arcs[k];
        }
        rebuild_tree_arrays();
        return theta;
    }
};

} // namespace

OtSolution solve_exact(const DiscreteMeasure& source, const DiscreteMeasure& target,
                       const CostMatrix& costs, const ExactConfig& cfg) {
    source.validate();
    target.validate();
    if (costs.rows() != source.size() || costs.cols() != target.size())
        throw std::invalid_argument("cost matrix shape does not match the measures");
    for (double c : costs.data())
        if (!std::isfinite(c) || c < 0.0)
            throw std::invalid_argument("cost matrix entries must be finite and nonnegative");

    // prune zero-weight atoms to avoid degenerate rows
    std::vector<std::size_t> rows, cols;
    for (std::size_t i = 0; i < source.size(); ++i)
        if (source.weights[i] > 0.0) rows.push_back(i);
    for (std::size_t j = 0; j < target.size(); ++j)
        if (target.weights[j] > 0.0) cols.push_back(j);

    if (rows.size() * cols.size() > cfg.max_variables)
        throw std::invalid_argument(
            "instance exceeds the exact solver cap of " + std::to_string(cfg.max_variables) +
            " variables; use the entropic solver");

    std::vector<double> supply(rows.size()), demand(cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i) supply[i] = source.weights[rows[i]];
    for (std::size_t j = 0; j < cols.size(); ++j) demand[j] = target.weights[cols[j]];
    // absorb any residual imbalance so the flow problem is exactly balanced
    {
        double sa = 0.0, sb = 0.0;
        for (double v : supply) sa += v;
        for (double v : demand) sb += v;
        for (double& v : supply) v /= sa;
        for (double& v : demand) v /= sb;
    }

    Matrix sub_cost(rows.size(), cols.size());
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) sub_cost(i, j) = costs(rows[i], cols[j]);

    TransportSimplex simplex(supply, demand, sub_cost);
    const std::int64_t pivots = simplex.run();

    OtSolution sol;
    sol.coupling.plan = Matrix(source.size(), target.size());
    double value = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (std::size_t j = 0; j < cols.size(); ++j) {
            const double f = simplex.flows()[i * cols.size() + j];
            if (f != 0.0) {
                sol.coupling.plan(rows[i], cols[j]) = f;
                value += f * sub_cost(i, j);
            }
        }
    sol.coupling.row_marginal = source;
    sol.coupling.col_marginal = target;
    sol.cost_value = value;
    sol.meta.status = "optimal";
    sol.meta.iterations = pivots;
    sol.meta.marginal_violation = sol.coupling.marginal_violation();
    return sol;
}

double w1(const DiscreteMeasure& source, const DiscreteMeasure& target, const CostMatrix& costs,
          const ExactConfig& cfg) {
    return solve_exact(source, target, costs, cfg).cost_value;
}

double w1(const DiscreteMeasure& source, const DiscreteMeasure& target, const CostSpec& spec,
          const ExactConfig& cfg) {
    return solve_exact(source, target, cost_matrix(source, target, spec), cfg).cost_value;
}

} // namespace otda
