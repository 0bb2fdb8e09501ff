#include "otda/ot_entropic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "otda/errors.hpp"

namespace otda {

void EntropicConfig::validate() const {
    if (!(epsilon_reg > 0.0)) throw std::invalid_argument("epsilon_reg must be > 0");
    if (!(tolerance > 0.0)) throw std::invalid_argument("tolerance must be > 0");
    if (max_iters <= 0) throw std::invalid_argument("max_iters must be > 0");
}

namespace {

constexpr double kLogDomainThreshold = 1e-2;

struct Pruned {
    std::vector<std::size_t> rows, cols;
    std::vector<double> a, b;
    Matrix cost;
};

Pruned prune(const DiscreteMeasure& source, const DiscreteMeasure& target,
             const CostMatrix& costs) {
    Pruned p;
    for (std::size_t i = 0; i < source.size(); ++i)
        if (source.weights[i] > 0.0) p.rows.push_back(i);
    for (std::size_t j = 0; j < target.size(); ++j)
        if (target.weights[j] > 0.0) p.cols.push_back(j);
    p.a.resize(p.rows.size());
    p.b.resize(p.cols.size());
    for (std::size_t i = 0; i < p.rows.size(); ++i) p.a[i] = source.weights[p.rows[i]];
    for (std::size_t j = 0; j < p.cols.size(); ++j) p.b[j] = target.weights[p.cols[j]];
    p.cost = Matrix(p.rows.size(), p.cols.size());
    for (std::size_t i = 0; i < p.rows.size(); ++i)
        for (std::size_t j = 0; j < p.cols.size(); ++j)
            p.cost(i, j) = costs(p.rows[i], p.cols[j]);
    return p;
}

struct ScalingResult {
    Matrix plan; // on the pruned index sets
    std::int64_t iterations = 0;
    bool converged = false;
};

ScalingResult sinkhorn_standard(const std::vector<double>& a, const std::vector<double>& b,
                                const Matrix& C, const EntropicConfig& cfg) {
    const std::size_t m = a.size(), n = b.size();
    Matrix K(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) K(i, j) = std::exp(-C(i, j) / cfg.epsilon_reg);

    const char* underflow_msg =
        "Gibbs kernel underflow: increase epsilon_reg or use log-domain mode";
    for (std::size_t i = 0; i < m; ++i) {
        double mx = 0.0;
        for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, K(i, j));
        if (mx == 0.0) throw NumericalError(underflow_msg);
    }
    for (std::size_t j = 0; j < n; ++j) {
        double mx = 0.0;
        for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, K(i, j));
        if (mx == 0.0) throw NumericalError(underflow_msg);
    }

    std::vector<double> u(m, 1.0), v(n, 1.0), Kv(m), KTu(n);
    ScalingResult res;
    for (std::int64_t it = 0; it < cfg.max_iters; ++it) {
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += K(i, j) * v[j];
            if (s <= 0.0 || !std::isfinite(s)) throw NumericalError(underflow_msg);
            Kv[i] = s;
            u[i] = a[i] / s;
        }
        for (std::size_t j = 0; j < n; ++j) {
            double s = 0.0;
            for (std::size_t i = 0; i < m; ++i) s += K(i, j) * u[i];
            if (s <= 0.0 || !std::isfinite(s)) throw NumericalError(underflow_msg);
            KTu[j] = s;
            v[j] = b[j] / s;
        }
        res.iterations = it + 1;
        // columns are exact after the v-update; measure the row violation
        double viol = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < n; ++j) s += K(i, j) * v[j];
            viol += std::abs(u[i] * s - a[i]);
        }
        if (viol <= cfg.tolerance) {
            res.converged = true;
            break;
        }
    }

    res.plan = Matrix(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) res.plan(i, j) = u[i] * K(i, j) * v[j];
    return res;
}

ScalingResult sinkhorn_log_domain(const std::vector<double>& a, const std::vector<double>& b,
                                  const Matrix& C, const EntropicConfig& cfg) {
    const std::size_t m = a.size(), n = b.size();
    std::vector<double> f(m, 0.0), g(n, 0.0);
    std::vector<double> log_a(m), log_b(n);
    for (std::size_t i = 0; i < m; ++i) log_a[i] = std::log(a[i]);
    for (std::size_t j = 0; j < n; ++j) log_b[j] = std::log(b[j]);

    // log sum_j exp((g_j - C_ij)/eps) for one row
    auto row_lse = [&](std::size_t i, double eps) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, g[j] - C(i, j));
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += std::exp((g[j] - C(i, j) - mx) / eps);
        return mx / eps + std::log(s);
    };
    auto col_lse = [&](std::size_t j, double eps) {
        double mx = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m; ++i) mx = std::max(mx, f[i] - C(i, j));
        double s = 0.0;
        for (std::size_t i = 0; i < m; ++i) s += std::exp((f[i] - C(i, j) - mx) / eps);
        return mx / eps + std::log(s);
    };
    auto sweep = [&](double eps) {
        for (std::size_t i = 0; i < m; ++i) f[i] = eps * (log_a[i] - row_lse(i, eps));
        for (std::size_t j = 0; j < n; ++j) g[j] = eps * (log_b[j] - col_lse(j, eps));
    };
    auto row_violation = [&](double eps) {
        double viol = 0.0;
        for (std::size_t i = 0; i < m; ++i)
            viol += std::abs(std::exp(f[i] / eps + row_lse(i, eps)) - a[i]);
        return viol;
    };

    ScalingResult res;
    if (cfg.anneal && cfg.epsilon_reg < 1.0) {
        double eps = 1.0;
        while (eps > cfg.epsilon_reg) {
            for (int k = 0; k < 10; ++k) sweep(eps);
            res.iterations += 10;
            eps = std::max(cfg.epsilon_reg, eps / 2.0);
        }
    }

    const double eps = cfg.epsilon_reg;
    for (std::int64_t it = 0; it < cfg.max_iters; ++it) {
        sweep(eps);
        ++res.iterations;
        if (it % 5 == 4 || it + 1 == cfg.max_iters) {
            if (row_violation(eps) <= cfg.tolerance) {
                res.converged = true;
                break;
            }
        }
    }
    if (!res.converged && row_violation(eps) <= cfg.tolerance) res.converged = true;

    res.plan = Matrix(m, n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            res.plan(i, j) = std::exp((f[i] + g[j] - C(i, j)) / eps);
    return res;
}

double entropy_term(const Matrix& plan) {
    double s = 0.0;
    for (double g : plan.data())
        if (g > 0.0) s += g * std::log(g);
    return s;
}

OtSolution assemble(const DiscreteMeasure& source, const DiscreteMeasure& target,
                    const CostMatrix& costs, const Pruned& p, const ScalingResult& scaled,
                    double epsilon_reg) {
    OtSolution sol;
    sol.coupling.plan = Matrix(source.size(), target.size());
    for (std::size_t i = 0; i < p.rows.size(); ++i)
        for (std::size_t j = 0; j < p.cols.size(); ++j)
            sol.coupling.plan(p.rows[i], p.cols[j]) = scaled.plan(i, j);
    sol.coupling.row_marginal = source;
    sol.coupling.col_marginal = target;
    sol.cost_value = frobenius_dot(costs, sol.coupling.plan);
    sol.meta.status = scaled.converged ? "converged" : "max_iters";
    sol.meta.iterations = scaled.iterations;
    sol.meta.marginal_violation = sol.coupling.marginal_violation();
    sol.meta.objective = sol.cost_value + epsilon_reg * entropy_term(sol.coupling.plan);
    return sol;
}

} // namespace

OtSolution sinkhorn(const DiscreteMeasure& source, const DiscreteMeasure& target,
                    const CostMatrix& costs, const EntropicConfig& cfg) {
    cfg.validate();
    source.validate();
    target.validate();
    if (costs.rows() != source.size() || costs.cols() != target.size())
        throw std::invalid_argument("cost matrix shape does not match the measures");

    const Pruned p = prune(source, target, costs);
    const bool use_log = cfg.log_domain == LogDomainMode::on ||
                         (cfg.log_domain == LogDomainMode::automatic &&
                          cfg.epsilon_reg < kLogDomainThreshold);
    const ScalingResult scaled = use_log ? sinkhorn_log_domain(p.a, p.b, p.cost, cfg)
                                         : sinkhorn_standard(p.a, p.b, p.cost, cfg);
    return assemble(source, target, costs, p, scaled, cfg.epsilon_reg);
}

void GroupRegConfig::validate(std::size_t n_rows) const {
    if (eta < 0.0) throw std::invalid_argument("eta must be >= 0");
    if (inner_iters <= 0) throw std::invalid_argument("inner_iters must be > 0");
    std::vector<char> seen(n_rows, 0);
    for (const auto& set : class_index_sets)
        for (std::size_t i : set) {
            if (i >= n_rows) throw std::invalid_argument("class index out of range");
            if (seen[i]) throw std::invalid_argument("class index sets overlap");
            seen[i] = 1;
        }
    for (char c : seen)
        if (!c) throw std::invalid_argument("class index sets do not cover all rows");
}

std::vector<std::vector<std::size_t>> class_index_sets_from_labels(const std::vector<int>& labels) {
    std::vector<std::vector<std::size_t>> sets;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int y = labels[i];
        if (y < 0) throw std::invalid_argument("negative label");
        if (static_cast<std::size_t>(y) >= sets.size()) sets.resize(y + 1);
        sets[y].push_back(i);
    }
    // drop empty classes (e.g. single-class data labeled all-1)
    std::erase_if(sets, [](const auto& s) { return s.empty(); });
    return sets;
}

double group_objective(const Matrix& plan, const CostMatrix& costs, double epsilon_reg,
                       double eta, const std::vector<std::vector<std::size_t>>& class_index_sets) {
    double obj = frobenius_dot(costs, plan) + epsilon_reg * entropy_term(plan);
    for (std::size_t j = 0; j < plan.cols(); ++j)
        for (const auto& set : class_index_sets) {
            double mass = 0.0;
            for (std::size_t i : set) mass += plan(i, j);
            obj += eta * std::sqrt(mass);
        }
    return obj;
}

double class_mixing_mass(const Coupling& coupling,
                         const std::vector<std::vector<std::size_t>>& class_index_sets) {
    double mixing = 0.0;
    for (std::size_t j = 0; j < coupling.plan.cols(); ++j) {
        double col = 0.0, dominant = 0.0;
        for (const auto& set : class_index_sets) {
            double mass = 0.0;
            for (std::size_t i : set) mass += coupling.plan(i, j);
            col += mass;
            dominant = std::max(dominant, mass);
        }
        mixing += col - dominant;
    }
    return mixing;
}

OtSolution sinkhorn_group(const LabeledSample& source, const DiscreteMeasure& target,
                          const CostMatrix& costs, const EntropicConfig& cfg,
                          const GroupRegConfig& gcfg) {
    source.validate();
    gcfg.validate(source.measure.size());

    OtSolution current = sinkhorn(source.measure, target, costs, cfg);
    const auto& sets = gcfg.class_index_sets;
    double obj = group_objective(current.coupling.plan, costs, cfg.epsilon_reg, gcfg.eta, sets);
    current.meta.objective = obj;
    current.meta.objective_trace = {obj};
    if (gcfg.eta == 0.0) return current;

    // each round linearizes sqrt(group mass) at the current plan and folds the
    // resulting per-entry slopes into the cost matrix
    constexpr double kMassFloor = 1e-16;
    for (int round = 0; round < gcfg.inner_iters; ++round) {
        CostMatrix majorized = costs;
        for (std::size_t j = 0; j < costs.cols(); ++j)
            for (const auto& set : sets) {
                double mass = 0.0;
                for (std::size_t i : set) mass += current.coupling.plan(i, j);
                const double slope = gcfg.eta / (2.0 * std::sqrt(std::max(mass, kMassFloor)));
                for (std::size_t i : set) majorized(i, j) += slope;
            }

        OtSolution next = sinkhorn(source.measure, target, majorized, cfg);
        const double next_obj =
            group_objective(next.coupling.plan, costs, cfg.epsilon_reg, gcfg.eta, sets);
        if (next_obj > obj + 1e-12) break; // MM stalled; keep the better plan
        next.cost_value = frobenius_dot(costs, next.coupling.plan);
        next.meta.objective_trace = current.meta.objective_trace;
        next.meta.objective_trace.push_back(next_obj);
        next.meta.objective = next_obj;
        const bool tiny_step = obj - next_obj <= 1e-12;
        obj = next_obj;
        current = std::move(next);
        if (tiny_step) break;
    }
    return current;
}

} // namespace otda
