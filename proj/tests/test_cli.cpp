#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() / ("otda_cli_" + std::to_string(::getpid()));
        fs::remove_all(dir);
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(OTDA_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string run_cli_stderr(const std::string& args, const Sandbox& box) {
    const std::string errfile = box.path("stderr.txt");
    const std::string cmd = std::string(OTDA_CLI_PATH) + " " + args + " 2>" + errfile;
    [[maybe_unused]] const int status = std::system(cmd.c_str());
    std::ifstream in(errfile);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json slurp_json(const std::string& path) { return nlohmann::json::parse(slurp(path)); }

} // namespace

TEST_CASE("gen then solve emits a w1 report") {
    Sandbox box;
    CHECK(run_cli("gen --generator two_moons --n 40 --rotation 30 --seed 1 --out-src " +
                  box.path("s.csv") + " --out-tgt " + box.path("t.csv")) == 0);
    CHECK(run_cli("ot solve --source " + box.path("s.csv") + " --target " + box.path("t.csv") +
                  " --cost euclidean --out " + box.path("plan.json")) == 0);
    const nlohmann::json plan = slurp_json(box.path("plan.json"));
    CHECK(plan.contains("w1"));
    CHECK(plan.at("w1").get<double>() > 0.0);
    CHECK(plan.at("coupling").size() == 40);
}

TEST_CASE("missing input exits 1 and names the path") {
    Sandbox box;
    const std::string err = run_cli_stderr("ot solve --source " + box.path("absent.csv") +
                                               " --target " + box.path("absent.csv") +
                                               " --out " + box.path("x.json"),
                                           box);
    CHECK(run_cli("ot solve --source " + box.path("absent.csv") + " --target " +
                  box.path("absent.csv") + " --out " + box.path("x.json")) == 1);
    CHECK(err.find("absent.csv") != std::string::npos);
}

TEST_CASE("unknown flags are usage errors") {
    Sandbox box;
    CHECK(run_cli("gen --generator two_moons --n 10 --frobnicate 1 --out-src " + box.path("a") +
                  " --out-tgt " + box.path("b")) == 1);
}

TEST_CASE("sinkhorn without log-domain underflows to exit 2") {
    Sandbox box;
    REQUIRE(run_cli("gen --generator gaussian_shift --n 12 --shift 80,0 --seed 2 --out-src " +
                    box.path("s.csv") + " --out-tgt " + box.path("t.csv")) == 0);
    CHECK(run_cli("ot sinkhorn --source " + box.path("s.csv") + " --target " + box.path("t.csv") +
                  " --eps 1e-9 --log-domain off --out " + box.path("sink.json")) == 2);
}

TEST_CASE("sinkhorn pipeline emits marginal violation and iterations") {
    Sandbox box;
    REQUIRE(run_cli("gen --generator two_moons --n 25 --rotation 15 --seed 3 --out-src " +
                    box.path("s.csv") + " --out-tgt " + box.path("t.csv")) == 0);
    CHECK(run_cli("ot sinkhorn --source " + box.path("s.csv") + " --target " + box.path("t.csv") +
                  " --eps 0.05 --out " + box.path("sink.json")) == 0);
    const nlohmann::json sink = slurp_json(box.path("sink.json"));
    CHECK(sink.at("marginal_violation").get<double>() <= 1e-9);
    CHECK(sink.at("iterations").get<std::int64_t>() > 0);
}

TEST_CASE("adapt and adapt-multi write label-preserving csv files") {
    Sandbox box;
    REQUIRE(run_cli("gen --generator two_moons --n 30 --rotation 20 --seed 4 --out-src " +
                    box.path("s.csv") + " --out-tgt " + box.path("t.csv")) == 0);
    CHECK(run_cli("adapt --source " + box.path("s.csv") + " --target " + box.path("t.csv") +
                  " --solver exact --out " + box.path("mapped.csv")) == 0);
    CHECK(slurp(box.path("mapped.csv")).rfind("x1,x2,label", 0) == 0);

    CHECK(run_cli("adapt-multi --sources " + box.path("s.csv") + " " + box.path("s.csv") +
                  " --alphas 0.5 0.5 --target " + box.path("t.csv") + " --out " +
                  box.path("multi.csv") + " --report " + box.path("rep.json")) == 0);
    const nlohmann::json rep = slurp_json(box.path("rep.json"));
    CHECK(rep.contains("pipeline_objective"));
    CHECK(rep.at("per_source_w1_to_target").size() == 2);
}

TEST_CASE("barycenter grid mode reproduces the weighted median") {
    Sandbox box;
    {
        std::ofstream a(box.path("a.csv")), b(box.path("b.csv"));
        a << "x1,label\n0,0\n";
        b << "x1,label\n1,0\n";
    }
    CHECK(run_cli("barycenter --inputs " + box.path("a.csv") + " " + box.path("b.csv") +
                  " --weights 0.3 0.7 --grid 0:1:11 --out " + box.path("bary.json")) == 0);
    const nlohmann::json bary = slurp_json(box.path("bary.json"));
    CHECK(bary.at("objective").get<double>() == doctest::Approx(0.3).epsilon(1e-9));
}

TEST_CASE("lambda subcommand reports the class") {
    Sandbox box;
    REQUIRE(run_cli("gen --generator two_moons --n 30 --rotation 10 --seed 5 --out-src " +
                    box.path("s.csv") + " --out-tgt " + box.path("t.csv")) == 0);
    CHECK(run_cli("lambda --source " + box.path("s.csv") + " --target " + box.path("t.csv") +
                  " --class knn1 --out " + box.path("lambda.json")) == 0);
    const nlohmann::json lam = slurp_json(box.path("lambda.json"));
    CHECK(lam.at("class").get<std::string>().find("knn1") != std::string::npos);
    CHECK(lam.at("lambda_hat").get<double>() >= 0.0);
}

TEST_CASE("bound subcommand validates the schema") {
    Sandbox box;
    {
        std::ofstream cfg(box.path("bad.json"));
        cfg << R"({"schema": 1, "theorem": "thm5", "generator": {"name": "two_moons"}})";
    }
    CHECK(run_cli("bound unsup --config " + box.path("bad.json") + " --out " +
                  box.path("rep.json")) == 1);
    {
        std::ofstream cfg(box.path("unknown.json"));
        cfg << R"({"schema": 1, "theorem": "unsup", "generator": {"name": "two_moons"},
                   "turbo": true})";
    }
    const std::string err = run_cli_stderr("bound unsup --config " + box.path("unknown.json") +
                                               " --out " + box.path("rep.json"),
                                           box);
    CHECK(err.find("turbo") != std::string::npos);
}

TEST_CASE("bound unsup produces a decomposed report") {
    Sandbox box;
    {
        std::ofstream cfg(box.path("cfg.json"));
        cfg << R"({"schema": 1, "theorem": "unsup", "seed": 11, "learner": "knn1",
                   "delta": 0.05, "varsigma_prime": 1.0,
                   "generator": {"name": "two_moons", "n": 60, "rotation_deg": 30}})";
    }
    CHECK(run_cli("bound unsup --config " + box.path("cfg.json") + " --out " +
                  box.path("rep.json")) == 0);
    const nlohmann::json rep = slurp_json(box.path("rep.json"));
    CHECK(rep.at("terms").contains("w1_hat"));
    CHECK(rep.at("terms").contains("concentration"));
    CHECK(rep.at("terms").contains("lambda_hat"));
    CHECK(rep.at("config").at("seed") == 11);
}

TEST_CASE("divergence chain and concentration emit csv tables") {
    Sandbox box;
    CHECK(run_cli("divergence chain --grid 6 --pairs 40 --seed 1 --out " +
                  box.path("chain.csv")) == 0);
    const std::string chain = slurp(box.path("chain.csv"));
    CHECK(chain.rfind("w1,", 0) == 0);
    CHECK(std::count(chain.begin(), chain.end(), '\n') == 41); // header + 40 rows

    CHECK(run_cli("concentration --family gauss2d --sizes 8,24 --trials 4 --seed 2 --out " +
                  box.path("decay.csv")) == 0);
    const std::string decay = slurp(box.path("decay.csv"));
    CHECK(decay.rfind("n,median_w1", 0) == 0);
    CHECK(std::count(decay.begin(), decay.end(), '\n') == 3);
}

TEST_CASE("experiment runner is deterministic and counts cells") {
    Sandbox box;
    {
        std::ofstream cfg(box.path("exp.json"));
        cfg << R"({"schema": 1,
                   "base": {"schema": 1, "theorem": "unsup", "learner": "knn1",
                            "generator": {"name": "two_moons", "n": 40, "rotation_deg": 25}},
                   "grid": {"alpha": [0.25, 0.5]},
                   "seeds": [1, 2, 3]})";
    }
    CHECK(run_cli("experiment --config " + box.path("exp.json") + " --out-dir " +
                  box.path("run1")) == 0);
    CHECK(run_cli("experiment --config " + box.path("exp.json") + " --out-dir " +
                  box.path("run2")) == 0);

    std::size_t reports = 0;
    for (const auto& entry : fs::directory_iterator(box.path("run1")))
        if (entry.path().extension() == ".json") ++reports;
    CHECK(reports == 6);

    CHECK(slurp(box.path("run1") + "/aggregate.csv") == slurp(box.path("run2") + "/aggregate.csv"));
    CHECK(slurp(box.path("run1") + "/report_g000_s1.json") ==
          slurp(box.path("run2") + "/report_g000_s1.json"));
    CHECK(slurp(box.path("run1") + "/report_g001_s3.json") ==
          slurp(box.path("run2") + "/report_g001_s3.json"));
}
