#include "otda/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "otda/ot_exact.hpp"
#include "otda/rng.hpp"

namespace otda {

void ConcentrationParams::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");
    if (!(varsigma_prime > 0.0 && varsigma_prime < std::sqrt(2.0)))
        throw std::invalid_argument("varsigma_prime must be in (0, sqrt(2))");
    if (!(kernel_bound_K > 0.0)) throw std::invalid_argument("kernel_bound_K must be > 0");
}

double concentration_term(std::size_t n_s, std::size_t n_t, const ConcentrationParams& params) {
    params.validate();
    if (n_s < 1 || n_t < 1) throw std::invalid_argument("sample sizes must be >= 1");
    return std::sqrt(2.0 * std::log(1.0 / params.delta) / params.varsigma_prime) *
           (std::sqrt(1.0 / static_cast<double>(n_s)) + std::sqrt(1.0 / static_cast<double>(n_t)));
}

double c2_pair(std::size_t n_s, std::size_t n_t, const ConcentrationParams& params) {
    return concentration_term(n_s, n_t, params);
}

double c1_combined(double alpha, double beta, std::size_t n, double kernel_bound, double delta) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");
    if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("degenerate split");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(kernel_bound > 0.0)) throw std::invalid_argument("kernel_bound must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");

    const double nn = static_cast<double>(n);
    const double bracket = (1.0 - alpha) * (1.0 - alpha) / (1.0 - beta) + alpha * alpha / beta;
    const double first = 2.0 * std::sqrt(2.0 * kernel_bound * bracket * std::log(2.0 / delta) / nn);
    const double second = 4.0 * std::sqrt(kernel_bound / nn) *
                          (alpha / (nn * beta * std::sqrt(beta)) +
                           (1.0 - alpha) / (nn * (1.0 - beta) * std::sqrt(1.0 - beta)));
    return first + second;
}

double c1_multisource(const std::vector<double>& alphas, const std::vector<double>& betas,
                      std::size_t n, double kernel_bound, double delta) {
    if (alphas.size() != betas.size() || alphas.empty())
        throw std::invalid_argument("alphas and betas must be nonempty and equally sized");
    double alpha_sum = 0.0, beta_sum = 0.0;
    for (double a : alphas) {
        if (!(a >= 0.0)) throw std::invalid_argument("alphas must be >= 0");
        alpha_sum += a;
    }
    for (double b : betas) {
        if (!(b > 0.0)) throw std::invalid_argument("betas must be > 0");
        beta_sum += b;
    }
    if (std::abs(alpha_sum - 1.0) > 1e-9) throw std::invalid_argument("alphas must sum to 1");
    if (std::abs(beta_sum - 1.0) > 1e-9) throw std::invalid_argument("betas must sum to 1");
    if (n < 1) throw std::invalid_argument("n must be >= 1");
    if (!(kernel_bound > 0.0)) throw std::invalid_argument("kernel_bound must be > 0");
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must be in (0,1)");

    const double nn = static_cast<double>(n);
    double ratio = 0.0, linear = 0.0;
    for (std::size_t j = 0; j < alphas.size(); ++j) {
        ratio += alphas[j] * alphas[j] / betas[j];
        linear += kernel_bound * alphas[j] / (betas[j] * nn);
    }
    return 2.0 * std::sqrt(2.0 * kernel_bound * ratio * std::log(2.0 / delta) / nn) +
           2.0 * std::sqrt(linear);
}

std::string to_string(Theorem t) {
    switch (t) {
        case Theorem::unsup_thm2: return "unsup_thm2";
        case Theorem::combined_thm3: return "combined_thm3";
        case Theorem::multi_thm4: return "multi_thm4";
    }
    return "?";
}

double BoundReport::recompute_rhs() const {
    switch (theorem) {
        case Theorem::unsup_thm2:
            return terms.at("source_error") + terms.at("w1_hat") + terms.at("concentration") +
                   terms.at("lambda_hat");
        case Theorem::combined_thm3:
            return terms.at("target_best_error") + terms.at("c1") +
                   2.0 * (1.0 - alpha) *
                       (terms.at("w1_hat") + terms.at("lambda_hat") + terms.at("c2"));
        case Theorem::multi_thm4: {
            double rhs = terms.at("target_best_error") + terms.at("c1");
            for (const auto& src : per_source)
                rhs += 2.0 * src.alpha * (src.w1 + src.lambda_hat + src.c2);
            return rhs;
        }
    }
    throw std::logic_error("unknown theorem");
}

nlohmann::json BoundReport::to_json() const {
    nlohmann::json j;
    j["theorem"] = to_string(theorem);
    j["terms"] = terms;
    j["rhs_total"] = rhs_total;
    if (!per_source.empty()) {
        nlohmann::json arr = nlohmann::json::array();
        for (const auto& src : per_source)
            arr.push_back({{"alpha", src.alpha},
                           {"w1", src.w1},
                           {"lambda_hat", src.lambda_hat},
                           {"c2", src.c2}});
        j["per_source"] = arr;
    }
    if (empirical_target_error) j["empirical_target_error"] = *empirical_target_error;
    j["params"] = {{"delta", params.delta},
                   {"varsigma_prime", params.varsigma_prime},
                   {"kernel_bound_K", params.kernel_bound_K}};
    if (theorem != Theorem::unsup_thm2) {
        j["alpha"] = alpha;
        j["beta"] = beta;
        j["n_mixed"] = n_mixed;
    }
    j["lambda_class"] = lambda_class;
    j["asymptotic_regime_unverified"] = asymptotic_regime_unverified;
    return j;
}

BoundReport bound_unsupervised(const Hypothesis& h, const LabeledSample& source,
                               const DiscreteMeasure& target, const CostSpec& costs,
                               const ConcentrationParams& params, double lambda_hat,
                               const std::string& lambda_class,
                               const std::optional<LabeledSample>& labeled_target) {
    params.validate();
    source.validate();
    target.validate();

    ExactConfig ecfg;
    ecfg.max_variables = std::max<std::size_t>(ecfg.max_variables, source.measure.size() *
                                                                       target.size());
    BoundReport rep;
    rep.theorem = Theorem::unsup_thm2;
    rep.params = params;
    rep.lambda_class = lambda_class;
    rep.terms["source_error"] = error(h, source).value;
    rep.terms["w1_hat"] = w1(source.measure, target, costs, ecfg);
    rep.terms["concentration"] = concentration_term(source.measure.size(), target.size(), params);
    rep.terms["lambda_hat"] = lambda_hat;
    rep.rhs_total = rep.recompute_rhs();
    if (labeled_target) rep.empirical_target_error = error(h, *labeled_target).value;
    return rep;
}

BoundReport bound_combined(const Hypothesis& h_alpha_hat, const LabeledSample& source,
                           const LabeledSample& target, std::size_t n_mixed, double alpha,
                           double beta, const CostSpec& costs, const ConcentrationParams& params,
                           double lambda_hat, const std::string& lambda_class,
                           const LearnerSpec& best_target_learner) {
    params.validate();
    source.validate();
    target.validate();
    if (!(alpha >= 0.0 && alpha <= 1.0)) throw std::invalid_argument("alpha must be in [0,1]");

    ExactConfig ecfg;
    ecfg.max_variables = std::max<std::size_t>(ecfg.max_variables, source.measure.size() *
                                                                       target.measure.size());
    BoundReport rep;
    rep.theorem = Theorem::combined_thm3;
    rep.params = params;
    rep.alpha = alpha;
    rep.beta = beta;
    rep.n_mixed = n_mixed;
    rep.lambda_class = lambda_class;

    const Hypothesis h_star = train(target, best_target_learner);
    rep.terms["target_best_error"] = error(h_star, target).value;
    rep.terms["c1"] = c1_combined(alpha, beta, n_mixed, params.kernel_bound_K, params.delta);
    rep.terms["w1_hat"] = w1(source.measure, target.measure, costs, ecfg);
    rep.terms["lambda_hat"] = lambda_hat;
    rep.terms["c2"] = c2_pair(source.measure.size(), target.measure.size(), params);
    rep.rhs_total = rep.recompute_rhs();
    rep.empirical_target_error = error(h_alpha_hat, target).value;
    return rep;
}

BoundReport bound_multisource(const Hypothesis& h_alpha_hat,
                              const std::vector<LabeledSample>& sources,
                              const std::vector<double>& alphas, const std::vector<double>& betas,
                              const LabeledSample& target, const CostSpec& costs,
                              const ConcentrationParams& params,
                              const std::vector<double>& lambda_hats,
                              const std::string& lambda_class,
                              const LearnerSpec& best_target_learner) {
    params.validate();
    target.validate();
    if (sources.empty()) throw std::invalid_argument("no sources");
    if (alphas.size() != sources.size() || betas.size() != sources.size() ||
        lambda_hats.size() != sources.size())
        throw std::invalid_argument("per-source argument sizes do not match");
    for (const auto& s : sources) s.validate();

    std::size_t n = 0;
    for (const auto& s : sources) n += s.measure.size();

    BoundReport rep;
    rep.theorem = Theorem::multi_thm4;
    rep.params = params;
    rep.n_mixed = n;
    rep.lambda_class = lambda_class;

    const Hypothesis h_star = train(target, best_target_learner);
    rep.terms["target_best_error"] = error(h_star, target).value;
    rep.terms["c1"] = c1_multisource(alphas, betas, n, params.kernel_bound_K, params.delta);

    for (std::size_t j = 0; j < sources.size(); ++j) {
        ExactConfig ecfg;
        ecfg.max_variables = std::max<std::size_t>(
            ecfg.max_variables, sources[j].measure.size() * target.measure.size());
        PerSourceTerms src;
        src.alpha = alphas[j];
        src.w1 = w1(sources[j].measure, target.measure, costs, ecfg);
        src.lambda_hat = lambda_hats[j];
        src.c2 = c2_pair(sources[j].measure.size(), target.measure.size(), params);
        rep.per_source.push_back(src);
    }
    rep.rhs_total = rep.recompute_rhs();
    rep.empirical_target_error = error(h_alpha_hat, target).value;
    return rep;
}

DecayFamily decay_family_from_string(const std::string& name) {
    if (name == "gauss2d") return DecayFamily::gauss2d;
    if (name == "point_mass") return DecayFamily::point_mass;
    throw std::invalid_argument("unknown family: " + name);
}

namespace {

DiscreteMeasure draw_family(DecayFamily family, std::size_t n, Rng& rng) {
    std::vector<Point> pts(n);
    for (auto& p : pts) {
        if (family == DecayFamily::gauss2d)
            p = {rng.gaussian(), rng.gaussian()};
        else
            p = {0.0, 0.0};
    }
    return make_empirical(std::move(pts));
}

} // namespace

std::vector<DecayRow> concentration_decay_experiment(DecayFamily family,
                                                     const std::vector<std::size_t>& sizes,
                                                     int trials, std::uint64_t seed) {
    if (sizes.empty()) throw std::invalid_argument("sizes must be nonempty");
    for (std::size_t k = 1; k < sizes.size(); ++k)
        if (sizes[k] <= sizes[k - 1]) throw std::invalid_argument("sizes must be increasing");
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");

    const CostSpec euclid;
    std::vector<DecayRow> table;
    for (std::size_t si = 0; si < sizes.size(); ++si) {
        const std::size_t n = sizes[si];
        std::vector<double> values(trials);
        for (int t = 0; t < trials; ++t) {
            Rng rng(mix_seed(seed, si, static_cast<std::uint64_t>(t)));
            const DiscreteMeasure mu = draw_family(family, n, rng);
            const DiscreteMeasure nu = draw_family(family, n, rng);
            ExactConfig ecfg;
            ecfg.max_variables = std::max<std::size_t>(250000, n * n);
            values[t] = w1(mu, nu, euclid, ecfg);
        }
        std::sort(values.begin(), values.end());
        const double median = trials % 2 ? values[trials / 2]
                                         : 0.5 * (values[trials / 2 - 1] + values[trials / 2]);
        table.push_back({n, median});
    }
    return table;
}

} // namespace otda
