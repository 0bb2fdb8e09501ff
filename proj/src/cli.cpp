#include "otda/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "otda/barycenter.hpp"
#include "otda/bounds.hpp"
#include "otda/cost.hpp"
#include "otda/divergences.hpp"
#include "otda/errors.hpp"
#include "otda/experiment.hpp"
#include "otda/learners.hpp"
#include "otda/mapping.hpp"
#include "otda/measures.hpp"
#include "otda/ot_entropic.hpp"
#include "otda/ot_exact.hpp"
#include "otda/rng.hpp"

namespace otda::cli {

namespace {

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
    if (!out) throw std::runtime_error("cannot write file: " + path);
}

void write_json(const std::string& path, const nlohmann::json& j) {
    write_text(path, j.dump(2) + "\n");
}

nlohmann::json coupling_to_json(const Matrix& plan) {
    nlohmann::json rows = nlohmann::json::array();
    for (std::size_t i = 0; i < plan.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (std::size_t j = 0; j < plan.cols(); ++j) row.push_back(plan(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

CostSpec cost_from_flags(const std::string& kind, double sigma) {
    CostSpec spec;
    spec.kind = cost_kind_from_string(kind);
    if (spec.kind == CostKind::kernel_induced) spec.kernel = GaussianKernel{sigma};
    return spec;
}

LogDomainMode log_domain_from_string(const std::string& mode) {
    if (mode == "auto") return LogDomainMode::automatic;
    if (mode == "on") return LogDomainMode::on;
    if (mode == "off") return LogDomainMode::off;
    throw std::invalid_argument("unknown log-domain mode: " + mode);
}

struct GenOptions {
    std::string generator = "two_moons";
    int n = 100;
    double rotation = 0.0, noise = 0.0;
    std::vector<double> shift;
    double inner = 0.75, outer = 1.25;
    std::uint64_t seed = 0;
    std::string out_src, out_tgt;
};

struct PairOptions {
    std::string source, target;
    std::string cost = "euclidean";
    double sigma = 1.0;
    std::string out;
};

struct SinkhornOptions {
    double eps = 0.01;
    double eta = 0.0;
    double tol = 1e-9;
    std::int64_t max_iters = 200000;
    int inner_iters = 10;
    std::string log_domain = "auto";
};

int run_gen(const GenOptions& opt) {
    DatasetConfig cfg;
    cfg.generator = generator_from_string(opt.generator);
    cfg.n_points = opt.n;
    cfg.rotation_deg = opt.rotation;
    cfg.noise_std = opt.noise;
    cfg.shift_vector = opt.shift;
    cfg.inner_radius = opt.inner;
    cfg.outer_radius = opt.outer;
    cfg.seed = opt.seed;
    const DomainPair pair = generate(cfg);
    save_csv(pair.source, opt.out_src);
    save_csv(pair.target, opt.out_tgt);
    return 0;
}

int run_ot_solve(const PairOptions& opt) {
    const LabeledSample src = load_csv(opt.source);
    const LabeledSample tgt = load_csv(opt.target);
    const CostSpec spec = cost_from_flags(opt.cost, opt.sigma);
    const OtSolution sol =
        solve_exact(src.measure, tgt.measure, cost_matrix(src.measure, tgt.measure, spec));
    nlohmann::json out;
    out["w1"] = sol.cost_value;
    out["coupling"] = coupling_to_json(sol.coupling.plan);
    write_json(opt.out, out);
    return 0;
}

int run_ot_sinkhorn(const PairOptions& opt, const SinkhornOptions& sk) {
    const LabeledSample src = load_csv(opt.source);
    const LabeledSample tgt = load_csv(opt.target);
    const CostSpec spec = cost_from_flags(opt.cost, opt.sigma);
    const CostMatrix C = cost_matrix(src.measure, tgt.measure, spec);

    EntropicConfig cfg;
    cfg.epsilon_reg = sk.eps;
    cfg.tolerance = sk.tol;
    cfg.max_iters = sk.max_iters;
    cfg.log_domain = log_domain_from_string(sk.log_domain);

    OtSolution sol;
    if (sk.eta > 0.0) {
        GroupRegConfig gcfg;
        gcfg.eta = sk.eta;
        gcfg.inner_iters = sk.inner_iters;
        gcfg.class_index_sets = class_index_sets_from_labels(src.labels);
        sol = sinkhorn_group(src, tgt.measure, C, cfg, gcfg);
    } else {
        sol = sinkhorn(src.measure, tgt.measure, C, cfg);
    }

    nlohmann::json out;
    out["w1"] = sol.cost_value;
    out["coupling"] = coupling_to_json(sol.coupling.plan);
    out["marginal_violation"] = sol.meta.marginal_violation;
    out["iterations"] = sol.meta.iterations;
    write_json(opt.out, out);
    if (sol.meta.status != "converged") {
        std::cerr << "sinkhorn did not converge: " << sol.meta.status
                  << " (partial report written to " << opt.out << ")\n";
        return 2;
    }
    return 0;
}

} // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"discrete optimal transport domain adaptation toolkit"};
    app.require_subcommand(1);

    // --- gen ---
    GenOptions gen;
    CLI::App* gen_cmd = app.add_subcommand("gen", "generate a synthetic source/target pair");
    gen_cmd->add_option("--generator", gen.generator)->required();
    gen_cmd->add_option("--n", gen.n)->required();
    gen_cmd->add_option("--rotation", gen.rotation);
    gen_cmd->add_option("--noise", gen.noise);
    gen_cmd->add_option("--shift", gen.shift)->delimiter(',');
    gen_cmd->add_option("--inner", gen.inner);
    gen_cmd->add_option("--outer", gen.outer);
    gen_cmd->add_option("--seed", gen.seed);
    gen_cmd->add_option("--out-src", gen.out_src)->required();
    gen_cmd->add_option("--out-tgt", gen.out_tgt)->required();

    // --- ot solve / ot sinkhorn ---
    CLI::App* ot_cmd = app.add_subcommand("ot", "optimal transport solvers");
    ot_cmd->require_subcommand(1);
    PairOptions solve_opt;
    CLI::App* solve_cmd = ot_cmd->add_subcommand("solve", "exact transport (network simplex)");
    solve_cmd->add_option("--source", solve_opt.source)->required();
    solve_cmd->add_option("--target", solve_opt.target)->required();
    solve_cmd->add_option("--cost", solve_opt.cost);
    solve_cmd->add_option("--sigma", solve_opt.sigma);
    solve_cmd->add_option("--out", solve_opt.out)->required();

    PairOptions sink_opt;
    SinkhornOptions sink;
    CLI::App* sink_cmd = ot_cmd->add_subcommand("sinkhorn", "entropy-regularized transport");
    sink_cmd->add_option("--source", sink_opt.source)->required();
    sink_cmd->add_option("--target", sink_opt.target)->required();
    sink_cmd->add_option("--cost", sink_opt.cost);
    sink_cmd->add_option("--sigma", sink_opt.sigma);
    sink_cmd->add_option("--out", sink_opt.out)->required();
    sink_cmd->add_option("--eps", sink.eps);
    sink_cmd->add_option("--eta", sink.eta);
    sink_cmd->add_option("--tol", sink.tol);
    sink_cmd->add_option("--max-iters", sink.max_iters);
    sink_cmd->add_option("--inner-iters", sink.inner_iters);
    sink_cmd->add_option("--log-domain", sink.log_domain)
        ->check(CLI::IsMember({"auto", "on", "off"}));

    // --- adapt ---
    struct {
        std::string source, target, solver = "exact", cost = "euclidean", out;
        double sigma = 1.0, eps = 0.01;
    } adapt_opt;
    CLI::App* adapt_cmd = app.add_subcommand("adapt", "barycentric-map source onto target");
    adapt_cmd->add_option("--source", adapt_opt.source)->required();
    adapt_cmd->add_option("--target", adapt_opt.target)->required();
    adapt_cmd->add_option("--solver", adapt_opt.solver)->check(CLI::IsMember({"exact", "sinkhorn"}));
    adapt_cmd->add_option("--cost", adapt_opt.cost);
    adapt_cmd->add_option("--sigma", adapt_opt.sigma);
    adapt_cmd->add_option("--eps", adapt_opt.eps);
    adapt_cmd->add_option("--out", adapt_opt.out)->required();

    // --- adapt-multi ---
    struct {
        std::vector<std::string> sources;
        std::vector<double> alphas;
        std::string target, out, report, solver = "exact", cost = "euclidean";
        double eps = 0.05;
    } multi_opt;
    CLI::App* multi_cmd = app.add_subcommand("adapt-multi", "multi-source barycenter adaptation");
    multi_cmd->add_option("--sources", multi_opt.sources)->required()->expected(-1);
    multi_cmd->add_option("--alphas", multi_opt.alphas)->required()->expected(-1);
    multi_cmd->add_option("--target", multi_opt.target)->required();
    multi_cmd->add_option("--solver", multi_opt.solver)
        ->check(CLI::IsMember({"exact", "entropic"}));
    multi_cmd->add_option("--cost", multi_opt.cost);
    multi_cmd->add_option("--eps", multi_opt.eps);
    multi_cmd->add_option("--out", multi_opt.out)->required();
    multi_cmd->add_option("--report", multi_opt.report);

    // --- barycenter ---
    struct {
        std::vector<std::string> inputs;
        std::vector<double> weights;
        std::string grid = "auto", out, solver = "exact";
        double eps = 0.05;
    } bary_opt;
    CLI::App* bary_cmd = app.add_subcommand("barycenter", "fixed-support Wasserstein barycenter");
    bary_cmd->add_option("--inputs", bary_opt.inputs)->required()->expected(-1);
    bary_cmd->add_option("--weights", bary_opt.weights)->expected(-1);
    bary_cmd->add_option("--grid", bary_opt.grid);
    bary_cmd->add_option("--solver", bary_opt.solver)->check(CLI::IsMember({"exact", "entropic"}));
    bary_cmd->add_option("--eps", bary_opt.eps);
    bary_cmd->add_option("--out", bary_opt.out)->required();

    // --- lambda ---
    struct {
        std::string source, target, learner = "knn1", out;
        std::uint64_t seed = 0;
    } lambda_opt;
    CLI::App* lambda_cmd = app.add_subcommand("lambda", "class-restricted joint-error estimate");
    lambda_cmd->add_option("--source", lambda_opt.source)->required();
    lambda_cmd->add_option("--target", lambda_opt.target)->required();
    lambda_cmd->add_option("--class", lambda_opt.learner);
    lambda_cmd->add_option("--seed", lambda_opt.seed);
    lambda_cmd->add_option("--out", lambda_opt.out);

    // --- bound ---
    struct {
        std::string config, out;
    } bound_opt;
    CLI::App* bound_cmd = app.add_subcommand("bound", "assemble a theorem right-hand side");
    bound_cmd->require_subcommand(1);
    std::string bound_theorem;
    for (const char* name : {"unsup", "combined", "multi"}) {
        CLI::App* sub = bound_cmd->add_subcommand(name);
        sub->add_option("--config", bound_opt.config)->required();
        sub->add_option("--out", bound_opt.out)->required();
        sub->callback([&bound_theorem, name]() { bound_theorem = name; });
    }

    // --- divergence chain ---
    struct {
        int grid = 10;
        int pairs = 1000;
        std::uint64_t seed = 0;
        std::string out;
    } chain_opt;
    CLI::App* div_cmd = app.add_subcommand("divergence", "divergence comparisons");
    div_cmd->require_subcommand(1);
    CLI::App* chain_cmd = div_cmd->add_subcommand("chain", "W1 / TV / KL inequality audit");
    chain_cmd->add_option("--grid", chain_opt.grid);
    chain_cmd->add_option("--pairs", chain_opt.pairs);
    chain_cmd->add_option("--seed", chain_opt.seed);
    chain_cmd->add_option("--out", chain_opt.out)->required();

    // --- concentration ---
    struct {
        std::string family = "gauss2d";
        std::vector<std::size_t> sizes = {10, 50, 250, 1250};
        int trials = 50;
        std::uint64_t seed = 0;
        std::string out;
    } conc_opt;
    CLI::App* conc_cmd = app.add_subcommand("concentration", "empirical W1 decay experiment");
    conc_cmd->add_option("--family", conc_opt.family);
    conc_cmd->add_option("--sizes", conc_opt.sizes)->delimiter(',');
    conc_cmd->add_option("--trials", conc_opt.trials);
    conc_cmd->add_option("--seed", conc_opt.seed);
    conc_cmd->add_option("--out", conc_opt.out)->required();

    // --- experiment ---
    struct {
        std::string config, out_dir;
    } exp_opt;
    CLI::App* exp_cmd = app.add_subcommand("experiment", "grid x seed experiment runner");
    exp_cmd->add_option("--config", exp_opt.config)->required();
    exp_cmd->add_option("--out-dir", exp_opt.out_dir)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) { // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n";
        return 1;
    }

    try {
        if (*gen_cmd) return run_gen(gen);
        if (*solve_cmd) return run_ot_solve(solve_opt);
        if (*sink_cmd) return run_ot_sinkhorn(sink_opt, sink);

        if (*adapt_cmd) {
            const LabeledSample src = load_csv(adapt_opt.source);
            const LabeledSample tgt = load_csv(adapt_opt.target);
            AdaptConfig cfg;
            cfg.solver = solver_from_string(adapt_opt.solver);
            cfg.entropic.epsilon_reg = adapt_opt.eps;
            const LabeledSample mapped =
                adapt(src, tgt.measure, cost_from_flags(adapt_opt.cost, adapt_opt.sigma), cfg);
            save_csv(mapped, adapt_opt.out);
            return 0;
        }

        if (*multi_cmd) {
            std::vector<LabeledSample> sources;
            for (const auto& path : multi_opt.sources) sources.push_back(load_csv(path));
            const LabeledSample tgt = load_csv(multi_opt.target);
            BarycenterConfig cfg;
            cfg.solver = multi_opt.solver == "exact" ? BarycenterConfig::Solver::exact
                                                     : BarycenterConfig::Solver::entropic;
            cfg.entropic.epsilon_reg = multi_opt.eps;
            cfg.cost = cost_from_flags(multi_opt.cost, 1.0);
            auto [mapped, report] =
                multisource_adapt(sources, tgt.measure, multi_opt.alphas, cfg.cost, cfg);
            save_csv(mapped, multi_opt.out);
            if (!multi_opt.report.empty()) {
                nlohmann::json j;
                j["pipeline_objective"] = report.pipeline_objective;
                j["barycenter_objective"] = report.barycenter_objective;
                j["sum_alpha_w1_to_target"] = report.sum_alpha_w1_to_target;
                j["per_source_w1_to_bary"] = report.per_source_w1_to_bary;
                j["per_source_w1_to_target"] = report.per_source_w1_to_target;
                j["w1_bary_to_target"] = report.w1_bary_to_target;
                write_json(multi_opt.report, j);
            }
            return 0;
        }

        if (*bary_cmd) {
            std::vector<DiscreteMeasure> inputs;
            for (const auto& path : bary_opt.inputs) inputs.push_back(load_csv(path).measure);
            BarycenterConfig cfg;
            cfg.solver = bary_opt.solver == "exact" ? BarycenterConfig::Solver::exact
                                                    : BarycenterConfig::Solver::entropic;
            cfg.entropic.epsilon_reg = bary_opt.eps;
            cfg.weights_a = bary_opt.weights;
            if (bary_opt.grid != "auto") {
                // 1-D grid "lo:hi:count"
                double lo = 0.0, hi = 1.0;
                int count = 11;
                if (std::sscanf(bary_opt.grid.c_str(), "%lf:%lf:%d", &lo, &hi, &count) != 3 ||
                    count < 2)
                    throw std::invalid_argument("grid must be \"auto\" or \"lo:hi:count\"");
                std::vector<Point> support;
                for (int k = 0; k < count; ++k)
                    support.push_back({lo + (hi - lo) * k / (count - 1)});
                cfg.support = support;
            }
            const BarycenterResult res = barycenter(inputs, cfg);
            nlohmann::json j;
            j["barycenter"] = measure_to_json(res.barycenter);
            j["objective"] = res.objective;
            j["status"] = res.meta.status;
            write_json(bary_opt.out, j);
            return 0;
        }

        if (*lambda_cmd) {
            const LabeledSample src = load_csv(lambda_opt.source);
            const LabeledSample tgt = load_csv(lambda_opt.target);
            const LambdaEstimate est = estimate_lambda_joint(
                src, tgt, learner_from_string(lambda_opt.learner), lambda_opt.seed);
            nlohmann::json j;
            j["lambda_hat"] = est.value;
            j["class"] = est.class_id;
            if (lambda_opt.out.empty())
                std::cout << j.dump(2) << "\n";
            else
                write_json(lambda_opt.out, j);
            return 0;
        }

        if (*bound_cmd) {
            std::ifstream in(bound_opt.config);
            if (!in) throw std::runtime_error("cannot open file: " + bound_opt.config);
            nlohmann::json config = nlohmann::json::parse(in);
            if (config.contains("theorem") &&
                config.at("theorem").get<std::string>() != bound_theorem)
                throw std::invalid_argument("config theorem does not match the subcommand");
            config["theorem"] = bound_theorem;
            write_json(bound_opt.out, run_bound_from_config(config));
            return 0;
        }

        if (*chain_cmd) {
            if (chain_opt.grid < 2) throw std::invalid_argument("--grid must be >= 2");
            std::vector<Point> support;
            for (int k = 0; k < chain_opt.grid; ++k)
                support.push_back({static_cast<double>(k) / (chain_opt.grid - 1)});
            Rng rng(chain_opt.seed);
            auto random_measure = [&]() {
                DiscreteMeasure m;
                m.points = support;
                m.weights.resize(support.size());
                for (auto& w : m.weights) w = -std::log(rng.uniform_pos()); // Dirichlet(1)
                m.renormalize();
                return m;
            };
            std::vector<std::pair<DiscreteMeasure, DiscreteMeasure>> pairs;
            for (int k = 0; k < chain_opt.pairs; ++k)
                pairs.emplace_back(random_measure(), random_measure());
            const ChainAudit audit = ckp_chain_audit(pairs, CostSpec{});

            std::string csv =
                "w1,tv_half,l1,kl,diam,chain_right,w1_le_diam_tv_half,w1_le_diam_l1,"
                "mid_half_le_right,mid_l1_le_right,pinsker_half\n";
            for (const auto& r : audit.rows)
                csv += format_g17(r.w1) + "," + format_g17(r.tv_half) + "," + format_g17(r.l1) +
                       "," + format_g17(r.kl) + "," + format_g17(r.diam) + "," +
                       format_g17(r.chain_right) + "," + std::to_string(r.w1_le_diam_tv_half) +
                       "," + std::to_string(r.w1_le_diam_l1) + "," +
                       std::to_string(r.mid_half_le_right) + "," +
                       std::to_string(r.mid_l1_le_right) + "," + std::to_string(r.pinsker_half) +
                       "\n";
            write_text(chain_opt.out, csv);

            nlohmann::json summary;
            summary["pairs"] = audit.rows.size();
            summary["skipped_infinite_kl"] = audit.skipped_infinite_kl;
            summary["rate_w1_le_diam_tv_half"] = audit.rate_w1_le_diam_tv_half;
            summary["rate_w1_le_diam_l1"] = audit.rate_w1_le_diam_l1;
            summary["rate_mid_half_le_right"] = audit.rate_mid_half_le_right;
            summary["rate_mid_l1_le_right"] = audit.rate_mid_l1_le_right;
            summary["rate_pinsker_half"] = audit.rate_pinsker_half;
            std::cout << summary.dump(2) << "\n";
            return 0;
        }

        if (*conc_cmd) {
            const auto table = concentration_decay_experiment(
                decay_family_from_string(conc_opt.family), conc_opt.sizes, conc_opt.trials,
                conc_opt.seed);
            std::string csv = "n,median_w1\n";
            for (const auto& row : table)
                csv += std::to_string(row.n) + "," + format_g17(row.median_w1) + "\n";
            write_text(conc_opt.out, csv);
            return 0;
        }

        if (*exp_cmd) {
            run_experiment(exp_opt.config, exp_opt.out_dir);
            return 0;
        }
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }

    std::cerr << "no subcommand executed\n";
    return 1;
}

} // namespace otda::cli
