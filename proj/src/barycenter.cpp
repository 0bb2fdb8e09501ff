#include "otda/barycenter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "otda/errors.hpp"
#include "otda/linprog.hpp"
#include "otda/mapping.hpp"

namespace otda {

namespace {

std::vector<Point> union_support(const std::vector<DiscreteMeasure>& inputs) {
    std::vector<Point> support;
    std::map<Point, std::size_t> seen;
    for (const auto& m : inputs)
        for (const auto& p : m.points)
            if (seen.emplace(p, support.size()).second) support.push_back(p);
    return support;
}

std::vector<double> resolve_weights(std::size_t n_inputs, const std::vector<double>& weights_a) {
    if (weights_a.empty())
        return std::vector<double>(n_inputs, 1.0 / static_cast<double>(n_inputs));
    if (weights_a.size() != n_inputs)
        throw std::invalid_argument("weights_a size does not match number of inputs");
    double sum = 0.0;
    for (double a : weights_a) {
        if (!(a >= 0.0)) throw std::invalid_argument("barycenter weights must be >= 0");
        sum += a;
    }
    if (std::abs(sum - 1.0) > 1e-12)
        throw std::invalid_argument("barycenter weights must sum to 1");
    return weights_a;
}

// Joint transportation LP: variables are one coupling per kept input plus the
// support weights b; couplings share b as their row marginal.
BarycenterResult barycenter_exact(const std::vector<DiscreteMeasure>& inputs,
                                  const std::vector<double>& a,
                                  const std::vector<Point>& support,
                                  const BarycenterConfig& cfg) {
    const std::size_t K = support.size();
    std::vector<std::size_t> kept;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        if (a[i] > 0.0) kept.push_back(i);

    std::size_t num_vars = 0;
    std::vector<std::size_t> offset(kept.size());
    for (std::size_t t = 0; t < kept.size(); ++t) {
        offset[t] = num_vars;
        num_vars += K * inputs[kept[t]].size();
    }
    const std::size_t b_offset = num_vars;
    num_vars += K;

    if (num_vars > cfg.max_exact_variables)
        throw std::invalid_argument(
            "joint barycenter LP exceeds " + std::to_string(cfg.max_exact_variables) +
            " variables; use the entropic solver");

    const DiscreteMeasure support_measure{support, std::vector<double>(K, 1.0 / K)};

    lp::Problem prob;
    prob.num_vars = num_vars;
    prob.objective.assign(num_vars, 0.0);

    for (std::size_t t = 0; t < kept.size(); ++t) {
        const auto& input = inputs[kept[t]];
        const std::size_t n = input.size();
        const CostMatrix C = cost_matrix(support_measure, input, cfg.cost);
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t j = 0; j < n; ++j)
                prob.objective[offset[t] + k * n + j] = a[kept[t]] * C(k, j);

        // column marginals match the input weights
        for (std::size_t j = 0; j < n; ++j) {
            lp::Constraint c;
            c.rhs = input.weights[j];
            for (std::size_t k = 0; k < K; ++k) c.terms.push_back({offset[t] + k * n + j, 1.0});
            prob.equalities.push_back(std::move(c));
        }
        // row marginals match the shared b
        for (std::size_t k = 0; k < K; ++k) {
            lp::Constraint c;
            c.rhs = 0.0;
            for (std::size_t j = 0; j < n; ++j) c.terms.push_back({offset[t] + k * n + j, 1.0});
            c.terms.push_back({b_offset + k, -1.0});
            prob.equalities.push_back(std::move(c));
        }
    }

    const lp::Solution sol = lp::solve(prob);

    BarycenterResult res;
    res.barycenter.points = support;
    res.barycenter.weights.assign(sol.x.begin() + b_offset, sol.x.begin() + b_offset + K);
    res.barycenter.renormalize();
    res.objective = sol.objective;
    res.meta.status = "optimal";
    res.meta.iterations = sol.pivots;
    return res;
}

// Log-domain iterative Bregman projections on the fixed support.
BarycenterResult barycenter_entropic(const std::vector<DiscreteMeasure>& inputs,
                                     const std::vector<double>& a,
                                     const std::vector<Point>& support,
                                     const BarycenterConfig& cfg) {
    const double eps = cfg.entropic.epsilon_reg;
    if (!(eps > 0.0)) throw std::invalid_argument("epsilon_reg must be > 0");
    const std::size_t K = support.size();

    std::vector<std::size_t> kept;
    std::vector<double> ka;
    for (std::size_t i = 0; i < inputs.size(); ++i)
        if (a[i] > 0.0) {
            kept.push_back(i);
            ka.push_back(a[i]);
        }
    double ka_sum = 0.0;
    for (double v : ka) ka_sum += v;
    for (double& v : ka) v /= ka_sum; // geometric-mean weights must sum to 1

    const DiscreteMeasure support_measure{support, std::vector<double>(K, 1.0 / K)};
    const std::size_t T = kept.size();
    std::vector<CostMatrix> C(T);
    std::vector<std::vector<double>> f(T), g(T), s(T), log_w(T);
    for (std::size_t t = 0; t < T; ++t) {
        const auto& input = inputs[kept[t]];
        C[t] = cost_matrix(support_measure, input, cfg.cost);
        f[t].assign(K, 0.0);
        g[t].assign(input.size(), 0.0);
        s[t].assign(K, 0.0);
        log_w[t].resize(input.size());
        for (std::size_t j = 0; j < input.size(); ++j) log_w[t][j] = std::log(input.weights[j]);
    }

    std::vector<double> log_b(K, -std::log(static_cast<double>(K)));
    SolverMeta meta;
    meta.status = "max_iters";

    for (int it = 0; it < cfg.max_outer_iters; ++it) {
        for (std::size_t t = 0; t < T; ++t) {
            const std::size_t n = g[t].size();
            // match the column marginals to the input weights
            for (std::size_t j = 0; j < n; ++j) {
                double mx = -std::numeric_limits<double>::infinity();
                for (std::size_t k = 0; k < K; ++k) mx = std::max(mx, f[t][k] - C[t](k, j));
                double acc = 0.0;
                for (std::size_t k = 0; k < K; ++k)
                    acc += std::exp((f[t][k] - C[t](k, j) - mx) / eps);
                g[t][j] = eps * (log_w[t][j] - mx / eps - std::log(acc));
            }
            // row log-masses under the fresh column potentials
            for (std::size_t k = 0; k < K; ++k) {
                double mx = -std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < n; ++j) mx = std::max(mx, g[t][j] - C[t](k, j));
                double acc = 0.0;
                for (std::size_t j = 0; j < n; ++j)
                    acc += std::exp((g[t][j] - C[t](k, j) - mx) / eps);
                s[t][k] = mx / eps + std::log(acc);
            }
        }

        // consensus barycenter: weighted geometric mean of the row masses
        double viol = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
            double lb = 0.0;
            for (std::size_t t = 0; t < T; ++t) lb += ka[t] * (f[t][k] / eps + s[t][k]);
            for (std::size_t t = 0; t < T; ++t)
                viol += ka[t] * std::abs(std::exp(f[t][k] / eps + s[t][k]) - std::exp(lb));
            log_b[k] = lb;
        }
        for (std::size_t t = 0; t < T; ++t)
            for (std::size_t k = 0; k < K; ++k) f[t][k] = eps * (log_b[k] - s[t][k]);

        meta.iterations = it + 1;
        if (viol <= cfg.tolerance) {
            meta.status = "converged";
            break;
        }
    }

    BarycenterResult res;
    res.barycenter.points = support;
    res.barycenter.weights.resize(K);
    for (std::size_t k = 0; k < K; ++k) res.barycenter.weights[k] = std::exp(log_b[k]);
    res.barycenter.renormalize();

    double objective = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
        const std::size_t n = g[t].size();
        double cost = 0.0;
        for (std::size_t k = 0; k < K; ++k)
            for (std::size_t j = 0; j < n; ++j)
                cost += C[t](k, j) * std::exp((f[t][k] + g[t][j] - C[t](k, j)) / eps);
        objective += a[kept[t]] * cost;
    }
    res.objective = objective;
    res.meta = meta;
    return res;
}

} // namespace

BarycenterResult barycenter(const std::vector<DiscreteMeasure>& inputs,
                            const BarycenterConfig& cfg) {
    if (inputs.empty()) throw std::invalid_argument("barycenter needs at least one input");
    for (const auto& m : inputs) m.validate();
    const std::size_t d = inputs.front().dim();
    for (const auto& m : inputs)
        if (m.dim() != d) throw std::invalid_argument("dimension mismatch");

    const std::vector<double> a = resolve_weights(inputs.size(), cfg.weights_a);
    std::vector<Point> support = cfg.support ? *cfg.support : union_support(inputs);
    if (support.empty()) throw std::invalid_argument("empty support");
    for (const auto& p : support)
        if (p.size() != d) throw std::invalid_argument("dimension mismatch");

    return cfg.solver == BarycenterConfig::Solver::exact
               ? barycenter_exact(inputs, a, support, cfg)
               : barycenter_entropic(inputs, a, support, cfg);
}

namespace {

DiscreteMeasure drop_zero_atoms(const DiscreteMeasure& m) {
    DiscreteMeasure out;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.weights[i] > 0.0) {
            out.points.push_back(m.points[i]);
            out.weights.push_back(m.weights[i]);
        }
    out.renormalize();
    return out;
}

OtSolution transport(const DiscreteMeasure& from, const DiscreteMeasure& to,
                     const CostSpec& costs, const BarycenterConfig& cfg) {
    const CostMatrix C = cost_matrix(from, to, costs);
    if (cfg.solver == BarycenterConfig::Solver::exact) {
        ExactConfig ecfg;
        ecfg.max_variables = cfg.max_exact_variables;
        return solve_exact(from, to, C, ecfg);
    }
    return sinkhorn(from, to, C, cfg.entropic);
}

} // namespace

std::pair<LabeledSample, MultisourceReport> multisource_adapt(
    const std::vector<LabeledSample>& sources, const DiscreteMeasure& target,
    const std::vector<double>& alphas, const CostSpec& costs, const BarycenterConfig& cfg) {
    if (sources.empty()) throw std::invalid_argument("multisource_adapt needs sources");
    if (alphas.size() != sources.size())
        throw std::invalid_argument("alphas size does not match sources");
    double alpha_sum = 0.0;
    for (double v : alphas) {
        if (!(v >= 0.0)) throw std::invalid_argument("alphas must be >= 0");
        alpha_sum += v;
    }
    if (std::abs(alpha_sum - 1.0) > 1e-9)
        throw std::invalid_argument("alphas must sum to 1");
    for (const auto& s : sources) s.validate();
    target.validate();

    const std::size_t N = sources.size();

    // Augmented barycenter family: sources at alpha_j / N, target at 1.
    std::vector<DiscreteMeasure> family;
    std::vector<double> raw_weights;
    for (std::size_t j = 0; j < N; ++j) {
        family.push_back(sources[j].measure);
        raw_weights.push_back(alphas[j] / static_cast<double>(N));
    }
    family.push_back(target);
    raw_weights.push_back(1.0);
    double total = 0.0;
    for (double v : raw_weights) total += v;

    BarycenterConfig bcfg = cfg;
    bcfg.cost = costs;
    bcfg.weights_a.clear();
    for (double v : raw_weights) bcfg.weights_a.push_back(v / total);

    const BarycenterResult bary = barycenter(family, bcfg);
    const DiscreteMeasure bary_support = drop_zero_atoms(bary.barycenter);

    MultisourceReport report;
    report.barycenter_objective = bary.objective;
    report.pipeline_objective = bary.objective * total;

    // barycenter -> target leg, shared by all sources
    const OtSolution to_target = transport(bary_support, target, costs, cfg);
    report.w1_bary_to_target = to_target.cost_value;
    const std::vector<Point> bary_image = barycentric_map(to_target.coupling, target.points);

    LabeledSample mapped;
    mapped.domain_tag = "multisource_adapted";
    for (std::size_t j = 0; j < N; ++j) {
        const OtSolution to_bary = transport(sources[j].measure, bary_support, costs, cfg);
        report.per_source_w1_to_bary.push_back(to_bary.cost_value);
        report.per_source_w1_to_target.push_back(
            transport(sources[j].measure, target, costs, cfg).cost_value);
        report.sum_alpha_w1_to_target += alphas[j] * report.per_source_w1_to_target.back();

        const std::vector<Point> pts = barycentric_map(to_bary.coupling, bary_image);
        for (std::size_t i = 0; i < pts.size(); ++i) {
            mapped.measure.points.push_back(pts[i]);
            mapped.measure.weights.push_back(alphas[j] * sources[j].measure.weights[i]);
            mapped.labels.push_back(sources[j].labels[i]);
        }
    }
    mapped.measure.renormalize();
    mapped.validate();
    return {std::move(mapped), std::move(report)};
}

} // namespace otda
