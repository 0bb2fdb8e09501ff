#include "otda/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "otda/rng.hpp"

namespace otda {

UnsupRun run_bound_unsup(const UnsupRunConfig& cfg) {
    const DomainPair pair = generate(cfg.dataset);
    const Hypothesis h = train(pair.source, cfg.learner);
    const LambdaEstimate lambda =
        estimate_lambda_joint(pair.source, pair.target, cfg.learner, cfg.dataset.seed);

    UnsupRun run;
    run.report = bound_unsupervised(h, pair.source, pair.target.measure, cfg.cost, cfg.params,
                                    lambda.value, lambda.class_id, pair.target);
    run.target_error = *run.report.empirical_target_error;
    return run;
}

namespace {

LabeledSample head(const LabeledSample& sample, std::size_t count, const std::string& tag) {
    if (count < 1 || count > sample.measure.size())
        throw std::invalid_argument("mixed split does not fit the sample");
    LabeledSample out;
    out.domain_tag = tag;
    out.measure.points.assign(sample.measure.points.begin(),
                              sample.measure.points.begin() + count);
    out.labels.assign(sample.labels.begin(), sample.labels.begin() + count);
    out.measure.weights.assign(count, 1.0 / static_cast<double>(count));
    return out;
}

LabeledSample concat(const LabeledSample& a, const LabeledSample& b, const std::string& tag) {
    LabeledSample out;
    out.domain_tag = tag;
    out.measure.points = a.measure.points;
    out.measure.points.insert(out.measure.points.end(), b.measure.points.begin(),
                              b.measure.points.end());
    out.labels = a.labels;
    out.labels.insert(out.labels.end(), b.labels.begin(), b.labels.end());
    out.measure.weights.assign(out.measure.points.size(),
                               1.0 / static_cast<double>(out.measure.points.size()));
    return out;
}

} // namespace

CombinedRun run_bound_combined(const CombinedRunConfig& cfg) {
    if (!(cfg.beta > 0.0 && cfg.beta < 1.0)) throw std::invalid_argument("degenerate split");
    const DomainPair pair = generate(cfg.dataset);

    const std::size_t n_target_part =
        std::max<std::size_t>(1, std::llround(cfg.beta * cfg.n_mixed));
    const std::size_t n_source_part = cfg.n_mixed - n_target_part;
    const LabeledSample target_part = head(pair.target, n_target_part, "mixed_target");
    const LabeledSample source_part = head(pair.source, n_source_part, "mixed_source");
    const LabeledSample mixed = concat(source_part, target_part, "mixed");

    // ERM for the combined error over the in-class candidates
    struct Candidate {
        const char* name;
        Hypothesis h;
    };
    std::vector<Candidate> candidates;
    candidates.push_back({"source_part", train(source_part, cfg.learner)});
    candidates.push_back({"target_part", train(target_part, cfg.learner)});
    candidates.push_back({"union", train(mixed, cfg.learner)});

    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double value = combined_error(candidates[c].h, target_part, source_part, cfg.alpha);
        if (value < best_value) {
            best_value = value;
            best = c;
        }
    }

    const LambdaEstimate lambda =
        estimate_lambda_joint(pair.source, pair.target, cfg.learner, cfg.dataset.seed);

    CombinedRun run;
    run.report = bound_combined(candidates[best].h, pair.source, pair.target, cfg.n_mixed,
                                cfg.alpha, cfg.beta, cfg.cost, cfg.params, lambda.value,
                                lambda.class_id, cfg.learner);
    run.combined_error_value = best_value;
    run.target_error_alpha = error(candidates[best].h, pair.target).value;
    run.target_error_target_only = error(candidates[1].h, pair.target).value;
    return run;
}

MultiRun run_bound_multi(const MultiRunConfig& cfg) {
    if (cfg.source_rotations.empty()) throw std::invalid_argument("no sources");
    if (cfg.alphas.size() != cfg.source_rotations.size())
        throw std::invalid_argument("alphas size does not match source_rotations");

    const std::size_t N = cfg.source_rotations.size();

    auto moons = [&](double rotation, std::uint64_t sub) {
        DatasetConfig d;
        d.generator = GeneratorKind::two_moons;
        d.n_points = cfg.n_per_domain;
        d.rotation_deg = rotation;
        d.noise_std = cfg.noise_std;
        d.seed = mix_seed(cfg.seed, sub);
        return generate(d);
    };

    // independent clouds: target unrotated, source j rotated by its angle
    const LabeledSample target = moons(0.0, N).source;
    std::vector<LabeledSample> sources;
    std::vector<double> betas, lambda_hats;
    for (std::size_t j = 0; j < N; ++j) {
        LabeledSample s = moons(cfg.source_rotations[j], j).target;
        s.domain_tag = "source_" + std::to_string(j);
        lambda_hats.push_back(
            estimate_lambda_joint(s, target, cfg.learner, mix_seed(cfg.seed, j, 77)).value);
        sources.push_back(std::move(s));
        betas.push_back(1.0 / static_cast<double>(N));
    }

    // ERM for the weighted multi-source error
    std::vector<Hypothesis> candidates;
    for (const auto& s : sources) candidates.push_back(train(s, cfg.learner));
    LabeledSample pooled = sources.front();
    for (std::size_t j = 1; j < N; ++j) pooled = concat(pooled, sources[j], "pooled_sources");
    candidates.push_back(train(pooled, cfg.learner));

    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const double value = weighted_multisource_error(candidates[c], sources, cfg.alphas);
        if (value < best_value) {
            best_value = value;
            best = c;
        }
    }

    MultiRun run;
    run.report = bound_multisource(candidates[best], sources, cfg.alphas, betas, target, cfg.cost,
                                   cfg.params, lambda_hats,
                                   cfg.learner.id() + " (class-restricted)", cfg.learner);
    return run;
}

namespace {

void require_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
    std::string offending;
    for (const auto& [key, value] : obj.items())
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            offending += (offending.empty() ? "" : ", ") + key;
    if (!offending.empty())
        throw std::invalid_argument("unknown key(s) in " + where + ": " + offending);
}

DatasetConfig dataset_from_json(const nlohmann::json& j) {
    require_keys(j,
                 {"name", "n", "rotation_deg", "noise_std", "shift", "class_separation", "inner",
                  "outer"},
                 "generator");
    DatasetConfig d;
    d.generator = generator_from_string(j.at("name").get<std::string>());
    d.n_points = j.value("n", 200);
    d.rotation_deg = j.value("rotation_deg", 0.0);
    d.noise_std = j.value("noise_std", 0.0);
    if (j.contains("shift")) d.shift_vector = j.at("shift").get<std::vector<double>>();
    d.class_separation = j.value("class_separation", 4.0);
    d.inner_radius = j.value("inner", 0.75);
    d.outer_radius = j.value("outer", 1.25);
    return d;
}

CostSpec cost_from_json(const nlohmann::json& j) {
    require_keys(j, {"kind", "sigma", "kernel_bound"}, "cost");
    CostSpec spec;
    spec.kind = cost_kind_from_string(j.value("kind", std::string("euclidean")));
    if (spec.kind == CostKind::kernel_induced) spec.kernel = GaussianKernel{j.value("sigma", 1.0)};
    spec.kernel_bound = j.value("kernel_bound", 1.0);
    return spec;
}

} // namespace

nlohmann::json run_bound_from_config(const nlohmann::json& config) {
    require_keys(config,
                 {"schema", "theorem", "generator", "seed", "learner", "delta", "varsigma_prime",
                  "kernel_bound", "cost", "alpha", "beta", "n_mixed", "source_rotations",
                  "alphas"},
                 "config");
    if (config.value("schema", 0) != 1)
        throw std::invalid_argument("unsupported or missing schema (expected \"schema\": 1)");
    const std::string theorem = config.at("theorem").get<std::string>();
    if (theorem != "unsup" && theorem != "combined" && theorem != "multi")
        throw std::invalid_argument("unknown theorem: " + theorem);

    ConcentrationParams params;
    params.delta = config.value("delta", 0.05);
    params.varsigma_prime = config.value("varsigma_prime", 1.0);
    params.kernel_bound_K = config.value("kernel_bound", 1.0);
    const LearnerSpec learner = learner_from_string(config.value("learner", std::string("knn1")));
    const CostSpec cost =
        config.contains("cost") ? cost_from_json(config.at("cost")) : CostSpec{};
    const std::uint64_t seed = config.value("seed", 0);

    nlohmann::json out;
    if (theorem == "unsup") {
        UnsupRunConfig rc;
        rc.dataset = dataset_from_json(config.at("generator"));
        rc.dataset.seed = seed;
        rc.learner = learner;
        rc.params = params;
        rc.cost = cost;
        const UnsupRun run = run_bound_unsup(rc);
        out = run.report.to_json();
        out["bound_holds"] = run.target_error <= run.report.rhs_total;
    } else if (theorem == "combined") {
        CombinedRunConfig rc;
        rc.dataset = dataset_from_json(config.at("generator"));
        rc.dataset.seed = seed;
        rc.alpha = config.value("alpha", 0.5);
        rc.beta = config.value("beta", 0.1);
        rc.n_mixed = config.value("n_mixed", rc.dataset.n_points);
        rc.learner = learner;
        rc.params = params;
        rc.cost = cost;
        const CombinedRun run = run_bound_combined(rc);
        out = run.report.to_json();
        out["combined_error"] = run.combined_error_value;
        out["target_error_alpha"] = run.target_error_alpha;
        out["target_error_target_only"] = run.target_error_target_only;
        out["bound_holds"] = run.target_error_alpha <= run.report.rhs_total;
    } else {
        MultiRunConfig rc;
        if (config.contains("generator")) {
            const auto& gen = config.at("generator");
            if (gen.value("name", std::string("two_moons")) != "two_moons")
                throw std::invalid_argument("multi-source runs use the two_moons generator");
            rc.n_per_domain = gen.value("n", 200);
            rc.noise_std = gen.value("noise_std", 0.0);
        }
        rc.source_rotations =
            config.value("source_rotations", std::vector<double>{10.0, 60.0});
        rc.alphas = config.value("alphas", std::vector<double>{0.5, 0.5});
        rc.seed = seed;
        rc.learner = learner;
        rc.params = params;
        rc.cost = cost;
        const MultiRun run = run_bound_multi(rc);
        out = run.report.to_json();
        out["bound_holds"] = *run.report.empirical_target_error <= run.report.rhs_total;
    }
    out["config"] = config; // audit trail
    return out;
}

namespace {

std::size_t worker_count(std::size_t cells) {
    std::size_t n = std::thread::hardware_concurrency();
    if (const char* env = std::getenv("OTDA_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) n = static_cast<std::size_t>(v);
    }
    if (n < 1) n = 1;
    return std::min(n, cells);
}

std::string format_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void run_experiment(const std::string& config_path, const std::string& out_dir) {
    std::ifstream in(config_path);
    if (!in) throw std::runtime_error("cannot open file: " + config_path);
    nlohmann::json config = nlohmann::json::parse(in);

    require_keys(config, {"schema", "base", "grid", "seeds"}, "experiment config");
    if (config.value("schema", 0) != 1)
        throw std::invalid_argument("unsupported or missing schema (expected \"schema\": 1)");
    if (!config.contains("base") || !config.contains("seeds"))
        throw std::invalid_argument("experiment config needs \"base\" and \"seeds\"");

    const nlohmann::json base = config.at("base");
    const std::vector<std::uint64_t> seeds = config.at("seeds").get<std::vector<std::uint64_t>>();
    if (seeds.empty()) throw std::invalid_argument("seeds must be nonempty");

    // the grid patches one scalar field of the base config per point
    std::string grid_key;
    std::vector<nlohmann::json> grid_values;
    if (config.contains("grid")) {
        const auto& grid = config.at("grid");
        if (!grid.is_object() || grid.size() != 1)
            throw std::invalid_argument("grid must map exactly one key to a value list");
        grid_key = grid.begin().key();
        for (const auto& v : grid.begin().value()) grid_values.push_back(v);
        if (grid_values.empty()) throw std::invalid_argument("grid value list is empty");
    } else {
        grid_values.push_back(nlohmann::json()); // single cell, no patch
    }

    std::filesystem::create_directories(out_dir);

    struct Cell {
        std::size_t gi = 0;
        std::uint64_t seed = 0;
        nlohmann::json report;
        std::string error;
    };
    std::vector<Cell> cells;
    for (std::size_t gi = 0; gi < grid_values.size(); ++gi)
        for (std::uint64_t seed : seeds) cells.push_back({gi, seed, {}, {}});

    std::atomic<std::size_t> next{0};
    auto work = [&]() {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= cells.size()) break;
            Cell& cell = cells[k];
            nlohmann::json cfg = base;
            if (!grid_key.empty()) cfg[grid_key] = grid_values[cell.gi];
            cfg["seed"] = cell.seed;
            try {
                cell.report = run_bound_from_config(cfg);
            } catch (const std::exception& e) {
                cell.error = e.what();
            }
        }
    };
    std::vector<std::thread> workers;
    const std::size_t n_workers = worker_count(cells.size());
    for (std::size_t w = 0; w + 1 < n_workers; ++w) workers.emplace_back(work);
    work();
    for (auto& t : workers) t.join();

    for (const Cell& cell : cells)
        if (!cell.error.empty())
            throw std::invalid_argument("cell (grid " + std::to_string(cell.gi) + ", seed " +
                                        std::to_string(cell.seed) + ") failed: " + cell.error);

    std::string csv = "grid_index,grid_key,grid_value,seed,rhs_total,empirical_target_error,"
                      "bound_holds\n";
    for (const Cell& cell : cells) {
        char name[128];
        std::snprintf(name, sizeof(name), "report_g%03zu_s%llu.json", cell.gi,
                      static_cast<unsigned long long>(cell.seed));
        std::ofstream out(std::filesystem::path(out_dir) / name);
        out << cell.report.dump(2) << "\n";
        if (!out) throw std::runtime_error("write failed in " + out_dir);

        const std::string gv = grid_key.empty() ? "" : grid_values[cell.gi].dump();
        const double rhs = cell.report.at("rhs_total").get<double>();
        const double target_err = cell.report.contains("empirical_target_error")
                                      ? cell.report.at("empirical_target_error").get<double>()
                                      : std::nan("");
        csv += std::to_string(cell.gi) + "," + grid_key + "," + gv + "," +
               std::to_string(cell.seed) + "," + format_g17(rhs) + "," +
               (std::isnan(target_err) ? "" : format_g17(target_err)) + "," +
               (cell.report.value("bound_holds", false) ? "1" : "0") + "\n";
    }
    std::ofstream agg(std::filesystem::path(out_dir) / "aggregate.csv");
    agg << csv;
    if (!agg) throw std::runtime_error("write failed in " + out_dir);
}

} // namespace otda
