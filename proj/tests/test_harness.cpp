#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "pfopt/harness.hpp"

using namespace pfopt;
using nlohmann::json;

namespace {

json base_config() {
    return json::parse(R"({
      "problem": {"kind": "logistic", "d": 5, "m": 60, "seed": 2, "l2_reg": 0.1},
      "noise": {"kind": "minibatch", "batch_size": 8, "seed": 3},
      "optimizer": {"algorithm": "adagrad++", "eta0": 1e-6, "eta0_rule": "absolute"},
      "total_steps": 300,
      "eval_every": 50
    })");
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir(const char* name) {
    auto dir = std::filesystem::temp_directory_path() / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("repeated runs write identical files") {
    auto dir = scratch_dir("pfopt_harness_det");
    json j = base_config();
    j["output"] = {{"trace_csv", (dir / "a.csv").string()}, {"summary_json", (dir / "a.json").string()}};
    run(experiment_config_from_json(j));
    j["output"] = {{"trace_csv", (dir / "b.csv").string()}, {"summary_json", (dir / "b.json").string()}};
    run(experiment_config_from_json(j));
    CHECK(slurp(dir / "a.csv") == slurp(dir / "b.csv"));
    CHECK(slurp(dir / "a.json") == slurp(dir / "b.json"));
    CHECK_FALSE(slurp(dir / "a.csv").empty());
    std::filesystem::remove_all(dir);
}

TEST_CASE("trace cadence") {
    json j = base_config();
    j["eval_every"] = 1;
    j["total_steps"] = 40;
    auto r = run(experiment_config_from_json(j));
    CHECK(r.trace.size() == 40);
    for (std::size_t i = 0; i < r.trace.size(); ++i) CHECK(r.trace[i].step == i);
    j["eval_every"] = 50;
    j["total_steps"] = 300;
    r = run(experiment_config_from_json(j));
    CHECK(r.trace.size() == 6);
    CHECK(r.trace.front().step == 0);
    CHECK(r.summary.total_steps == 300);
}

TEST_CASE("trace CSV layout and round trip") {
    auto r = run(experiment_config_from_json(base_config()));
    const std::string csv = trace_csv(r.trace);
    std::istringstream in(csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "step,loss,eta,r,grad_l2,s_l2,dist_x0,dist_xstar_inf,lr_mult");
    std::size_t row = 0;
    while (std::getline(in, line)) {
        REQUIRE(row < r.trace.size());
        std::istringstream fields(line);
        std::string f;
        std::vector<std::string> cols;
        while (std::getline(fields, f, ',')) cols.push_back(f);
        REQUIRE(cols.size() == 9);
        const auto& rec = r.trace[row];
        CHECK(std::stoull(cols[0]) == rec.step);
        CHECK(std::strtod(cols[1].c_str(), nullptr) == rec.loss);
        CHECK(std::strtod(cols[2].c_str(), nullptr) == rec.eta);
        CHECK(std::strtod(cols[6].c_str(), nullptr) == rec.dist_x0);
        REQUIRE(rec.dist_xstar_inf.has_value());
        CHECK(std::strtod(cols[7].c_str(), nullptr) == *rec.dist_xstar_inf);
        ++row;
    }
    CHECK(row == r.trace.size());
    CHECK(trace_csv({}) == "step,loss,eta,r,grad_l2,s_l2,dist_x0,dist_xstar_inf,lr_mult\n");
}

TEST_CASE("summary JSON") {
    auto r = run(experiment_config_from_json(base_config()));
    auto j = to_json(r.summary);
    for (const char* key : {"config_hash", "total_steps", "final_loss", "f_star", "gap_final", "gap_avg", "tau",
                            "report", "diverged"})
        CHECK(j.contains(key));
    CHECK_FALSE(j.contains("wall_seconds"));
    CHECK(to_json(r.summary, true).contains("wall_seconds"));
    CHECK(*r.summary.gap_final >= -1e-12);
    CHECK(*r.summary.gap_avg >= -1e-12);
    CHECK(r.summary.report->tau == *r.summary.tau);
}

TEST_CASE("config hash ignores outputs only") {
    auto a = experiment_config_from_json(base_config());
    auto b = a;
    b.output.trace_csv = "elsewhere.csv";
    CHECK(config_hash(a) == config_hash(b));
    b.optimizer.base_factor = 2.0;
    CHECK(config_hash(a) != config_hash(b));
}

TEST_CASE("config parsing and overrides") {
    json j = base_config();
    apply_override(j, "optimizer.base_factor=0.5");
    apply_override(j, "optimizer.algorithm=adam++");
    auto cfg = experiment_config_from_json(j);
    CHECK(cfg.optimizer.base_factor == 0.5);
    CHECK(cfg.optimizer.algorithm == Algorithm::adampp);
    j["total_steps"] = 1;
    CHECK_THROWS_AS(experiment_config_from_json(j), std::invalid_argument);
    j = base_config();
    j["optimizer"]["algorithm"] = "nadam";
    CHECK_THROWS_AS(experiment_config_from_json(j), std::invalid_argument);
    auto back = experiment_config_from_json(to_json(cfg));
    CHECK(config_hash(back) == config_hash(cfg));
}

TEST_CASE("quadratic AdaGrad++ improves the gap by three orders") {
    json j = json::parse(R"({
      "problem": {"kind": "quadratic", "d": 50, "seed": 11, "mu": 0.1, "condition": 100},
      "optimizer": {"algorithm": "adagrad++"},
      "total_steps": 10000, "eval_every": 10000
    })");
    auto cfg = experiment_config_from_json(j);
    auto problem = build_problem(cfg);
    auto min = solve_minimizer(problem);
    const double gap0 = loss(problem, initial_point(cfg, problem.dim).span()) - min.f_star;
    auto r = run(cfg, problem, min);
    CHECK(*r.summary.gap_final <= gap0 * 1e-3);
}

TEST_CASE("grid search contains every value and ranks them") {
    auto rows = grid_search(base_config(), "optimizer.base_factor", {0.5, 1.0, 2.0});
    REQUIRE(rows.size() == 3);
    std::set<double> seen;
    for (const auto& r : rows) seen.insert(r.value.get<double>());
    CHECK(seen == std::set<double>{0.5, 1.0, 2.0});
    for (std::size_t i = 1; i < rows.size(); ++i)
        CHECK(ranking_score(rows[i - 1].summary) <= ranking_score(rows[i].summary));
}

TEST_CASE("ablation rows match plain runs") {
    auto table = ablation_base_factor(base_config(), {0.5, 1.0});
    REQUIRE(table.rows.size() == 2);
    auto plain = run(experiment_config_from_json(base_config()));
    CHECK(to_json(table.rows[1].summary).dump() == to_json(plain.summary).dump());
    CHECK(table.gap_ratio.has_value());
    const std::string csv = ablation_table_csv(table);
    CHECK(csv.find("# max/min gap_final") != std::string::npos);
}

TEST_CASE("parallel and sequential sweeps agree") {
    std::vector<json> values{1e-6, 1e-4, 1e-2, 1.0};
    auto seq = sweep(base_config(), "optimizer.eta0", values, {1});
    auto par = sweep(base_config(), "optimizer.eta0", values, {4});
    REQUIRE(seq.size() == par.size());
    for (std::size_t i = 0; i < seq.size(); ++i) {
        CHECK(seq[i].value == par[i].value);
        CHECK(to_json(seq[i].summary).dump() == to_json(par[i].summary).dump());
    }
}

TEST_CASE("divergence is flagged, not thrown") {
    json j = base_config();
    j["optimizer"]["algorithm"] = "sgd";
    j["optimizer"]["lr"] = 1e6;
    j["problem"]["kind"] = "quadratic";
    j["problem"]["condition"] = 100;
    j["noise"] = {{"kind", "none"}};
    auto r = run(experiment_config_from_json(j));
    CHECK(r.summary.diverged);
    CHECK(r.summary.diverged_step.has_value());
    CHECK(std::isinf(ranking_score(r.summary)));
}

TEST_CASE("rates fit a decreasing gap on abs_sum") {
    json j = json::parse(R"({
      "problem": {"kind": "abs_sum", "d": 5},
      "noise": {"kind": "additive_gaussian", "sigma": 0.1, "seed": 1},
      "optimizer": {"algorithm": "adagrad++"},
      "init": {"kind": "constant", "value": 1.0},
      "total_steps": 100, "eval_every": 100
    })");
    auto res = rates(j, {100, 1000, 10000}, 2);
    CHECK(res.median_gaps.size() == 3);
    REQUIRE(res.fit.has_value());
    CHECK(res.fit->slope < 0.0);
}
