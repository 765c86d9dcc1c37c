/*
 Copyright 2026 The OLC Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/
#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "olc/cli.hpp"
#include "test_support.hpp"

#ifndef OLC_SOURCE_DIR
#error "OLC_SOURCE_DIR must point at the source tree"
#endif

namespace olc {
namespace {

namespace fs = std::filesystem;

const std::string kScalarConfig = R"({
  "seed": 7, "T": 10, "n_runs": 1,
  "system": {"A": [[0.5]], "B": [[1.0]]},
  "u_box": {"lower": [-1], "upper": [1]},
  "w_box": {"lower": [-0.1], "upper": [0.1]},
  "cost_gen": {"q_scale": 1.0, "q_ridge": 0.1, "c_max": 1.0},
  "dac": {"H_mem": 2}
})";

fs::path config_path(const std::string& name) { return fs::path(OLC_SOURCE_DIR) / "configs" / name; }

fs::path scratch_dir(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("olc_test_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    args.insert(args.begin(), "olc_sim");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

TEST(Rng, SameSeedSameStream) {
    SeededRng a(99), b(99);
    for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, SplitStreamsDiffer) {
    const SeededRng root(5);
    SeededRng a = root.split(0), b = root.split(1);
    int same = 0;
    for (int i = 0; i < 100; ++i) same += a() == b();
    EXPECT_EQ(same, 0);
}

TEST(Rng, UniformAndNormalMoments) {
    SeededRng rng(3);
    double su = 0, sn = 0, sn2 = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        su += u;
        const double z = rng.normal();
        sn += z;
        sn2 += z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 3.0 * std::sqrt(1.0 / 12.0 / n) * 2);
    EXPECT_NEAR(sn / n, 0.0, 3.0 / std::sqrt(n) * 2);
    EXPECT_NEAR(sn2 / n, 1.0, 0.02);
}

TEST(Config, ParsesDefaultFile) {
    const auto cfg = load_config(config_path("default.json"));
    EXPECT_EQ(cfg.T, 1000);
    EXPECT_EQ(cfg.n_runs, 20);
    EXPECT_EQ(cfg.state_dim(), 3u);
    EXPECT_EQ(cfg.input_dim(), 2u);
    EXPECT_TRUE(cfg.disturbances_on);
    EXPECT_EQ(cfg.dac.H_mem, 10u);
    EXPECT_LT(spectral_norm(cfg.A - testing::section_a()), 1e-15);
}

TEST(Config, RejectsUnknownKeys) {
    EXPECT_THROW(parse_config_text(R"({"system": {"A": [[0.5]], "B": [[1]]}, "u_box": {"lower": [-1], "upper": [1]},
                                      "w_box": {"lower": [0], "upper": [0]}, "bogus": 1})"),
                 ConfigError);
    auto j = nlohmann::json::parse(kScalarConfig);
    j["cost_gen"]["extra"] = 2;
    EXPECT_THROW(parse_config(j), ConfigError);
}

TEST(Config, ValidationErrors) {
    auto j = nlohmann::json::parse(kScalarConfig);
    auto bad = j;
    bad["T"] = 1;
    EXPECT_THROW(parse_config(bad), ConfigError);
    bad = j;
    bad["cost_gen"]["q_scale"] = 0.0;
    EXPECT_THROW(parse_config(bad), ConfigError);
    bad = j;
    bad["system"]["A"] = {{1.5}};
    EXPECT_THROW(parse_config(bad), ConfigError);
    bad = j;
    bad["u_box"]["lower"] = {2};
    EXPECT_THROW(parse_config(bad), ConfigError);
    bad = j;
    bad["x1"] = {1, 2};
    EXPECT_THROW(parse_config(bad), ConfigError);
}

TEST(Config, RoundTripsThroughJson) {
    const auto cfg = load_config(config_path("default.json"));
    const auto again = parse_config(to_json(cfg));
    EXPECT_EQ(to_json(again).dump(), to_json(cfg).dump());
}

TEST(Config, MissingFileNamesPath) {
    try {
        load_config("/nonexistent/olc.json");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("/nonexistent/olc.json"), std::string::npos);
    }
}

TEST(Generation, CostsArePositiveDefiniteAndDeterministic) {
    auto cfg = load_config(config_path("default.json"));
    cfg.T = 200;
    const auto a = realize(cfg, 3);
    const auto b = realize(cfg, 3);
    ASSERT_EQ(a.costs.size(), 200u);
    SeededRng probe(1);
    for (std::size_t t = 0; t < a.costs.size(); ++t) {
        EXPECT_EQ(a.costs[t].Q().values()[0], b.costs[t].Q().values()[0]);
        EXPECT_EQ(a.costs[t].c(), b.costs[t].c());
        for (int k = 0; k < 10; ++k) {
            const Vector v = testing::random_vector(probe, 3);
            EXPECT_GE(dot(v, a.costs[t].Q() * v), 0.1 * dot(v, v) * (1 - 1e-12));
        }
        for (std::size_t i = 0; i < 3; ++i) {
            EXPECT_LE(std::abs(a.costs[t].c()[i] - 1.0), cfg.cost_gen.c_max);
        }
    }
    for (std::size_t t = 0; t < a.disturbances.size(); ++t) EXPECT_EQ(a.disturbances[t], b.disturbances[t]);
}

TEST(Generation, DisturbancesOffAreZero) {
    auto cfg = load_config(config_path("no_disturbance.json"));
    cfg.T = 50;
    for (const auto& w : realize(cfg, 0).disturbances) EXPECT_EQ(norm(w), 0.0);
}

TEST(Generation, DisturbanceMeanNearBoxCenter) {
    auto cfg = load_config(config_path("default.json"));
    cfg.T = 100000;
    SeededRng rng(8);
    const auto ws = generate_disturbances(cfg, rng);
    const double sigma = 1.0 / std::sqrt(12.0) / std::sqrt(static_cast<double>(ws.size()));
    for (std::size_t i = 0; i < 3; ++i) {
        double s = 0.0;
        for (const auto& w : ws) {
            ASSERT_LE(std::abs(w[i]), 0.5);
            s += w[i];
        }
        EXPECT_LE(std::abs(s / static_cast<double>(ws.size())), 3.0 * sigma);
    }
}

TEST(Generation, StreamsArePrefixConsistentAcrossHorizons) {
    auto cfg = load_config(config_path("default.json"));
    cfg.T = 100;
    const auto shortr = realize(cfg, 0);
    cfg.T = 300;
    const auto longr = realize(cfg, 0);
    for (std::size_t t = 0; t < 100; ++t) EXPECT_EQ(shortr.costs[t].c(), longr.costs[t].c());
    for (std::size_t t = 0; t < 99; ++t) EXPECT_EQ(shortr.disturbances[t], longr.disturbances[t]);
}

TEST(RunSingle, ZeroProblemStaysAtRest) {
    auto cfg = parse_config_text(kScalarConfig);
    cfg.disturbances_on = false;
    const std::vector<QuadraticCost> costs(10, QuadraticCost(Matrix{{0.0}}, Vector{0.0}));
    const std::vector<Vector> ws(9, Vector(1));
    for (auto kind : {ControllerKind::Olc, ControllerKind::Dac}) {
        const auto rec = run_single(cfg, kind, costs, ws);
        const auto& tr = kind == ControllerKind::Olc ? *rec.olc : *rec.dac;
        ASSERT_EQ(tr.states.size(), 10u);
        ASSERT_EQ(tr.inputs.size(), 9u);
        for (const auto& x : tr.states) EXPECT_EQ(norm(x), 0.0);
        for (const auto& u : tr.inputs) EXPECT_EQ(norm(u), 0.0);
        for (double c : tr.costs) EXPECT_EQ(c, 0.0);
    }
}

TEST(RunSingle, StepSizeDefaultsAndOverride) {
    auto cfg = load_config(config_path("default.json"));
    cfg.T = 50;
    const auto r = realize(cfg, 0);
    const auto rec = run_single(cfg, ControllerKind::Olc, r.costs, r.disturbances);
    EXPECT_NEAR(rec.setup.eta, theorem1_step_size(rec.setup.smooth.L, 50, rec.setup.cert), 1e-15);
    cfg.olc.eta_override = 0.25;
    EXPECT_EQ(run_single(cfg, ControllerKind::Olc, r.costs, r.disturbances).setup.eta, 0.25);
}

TEST(Regret, ReplayingBestInputGivesZeroRegret) {
    auto cfg = load_config(config_path("default.json"));
    cfg.T = 80;
    const auto r = realize(cfg, 1);
    auto rec = run_full(cfg, r.costs, r.disturbances);
    // Replace the tracker's trace with a replay of the best fixed input.
    const LtiSystem sys(cfg.A, cfg.B);
    const auto& u = rec.benchmarks->fixed_input.optimizer;
    const auto xs = simulate(sys, cfg.initial_state(), std::vector<Vector>(79, u), r.disturbances);
    rec.olc->costs = per_step_costs(xs, r.costs);
    const auto reg = compute_regret(rec);
    EXPECT_NEAR(reg.olc_u.back(), 0.0, 1e-9);
    // Final regret equals cumulative cost minus the benchmark value.
    EXPECT_NEAR(reg.dac_u.back(), reg.cum_dac.back() - rec.benchmarks->fixed_input.value,
                1e-9 * rec.benchmarks->fixed_input.value);
    EXPECT_NEAR(reg.dac_m.back(), reg.cum_dac.back() - rec.benchmarks->dac.value, 1e-9 * rec.benchmarks->dac.value);
}

TEST(Regret, FixedInputRegretNonNegativeForOpenLoopInputs) {
    auto cfg = load_config(config_path("default.json"));
    cfg.T = 60;
    const auto r = realize(cfg, 2);
    const LtiSystem sys(cfg.A, cfg.B);
    const auto best = best_fixed_input(sys, cfg.initial_state(), r.disturbances, r.costs, cfg.u_box);
    SeededRng rng(9);
    for (int i = 0; i < 50; ++i) {
        const Vector u = cfg.u_box.clamp(testing::random_vector(rng, 2, 4.0));
        EXPECT_GE(trajectory_cost(sys, cfg.initial_state(), std::vector<Vector>(59, u), r.disturbances, r.costs) -
                      best.value,
                  -1e-9 * best.value);
    }
}

TEST(Regret, MissingBenchmarksThrow) {
    auto cfg = parse_config_text(kScalarConfig);
    const auto r = realize(cfg, 0);
    auto rec = run_single(cfg, ControllerKind::Olc, r.costs, r.disturbances);
    EXPECT_THROW(compute_regret(rec), InvalidState);
}

TEST(Experiment, ScalarSmokeWritesWellFormedCsv) {
    auto cfg = parse_config_text(kScalarConfig);
    cfg.output_dir = scratch_dir("smoke").string();
    const auto res = run_experiment(cfg);
    EXPECT_EQ(res.failures(), 0u);
    std::ifstream in(fs::path(cfg.output_dir) / "run_0.csv");
    std::string line;
    std::vector<std::string> lines;
    while (std::getline(in, line)) lines.push_back(line);
    ASSERT_EQ(lines.size(), 11u);
    EXPECT_EQ(lines[0].rfind("t,cost_olc,cost_dac,", 0), 0u);
    const auto commas = std::count(lines[0].begin(), lines[0].end(), ',');
    for (const auto& l : lines) EXPECT_EQ(std::count(l.begin(), l.end(), ','), commas);
    EXPECT_TRUE(fs::exists(fs::path(cfg.output_dir) / "summary.csv"));
    EXPECT_TRUE(fs::exists(fs::path(cfg.output_dir) / "benchmarks.csv"));
    EXPECT_FALSE(fs::exists(fs::path(cfg.output_dir) / "failures.csv"));
}

TEST(Experiment, DisturbanceFreeModeAddsSteadyStateColumns) {
    auto cfg = parse_config_text(kScalarConfig);
    cfg.disturbances_on = false;
    cfg.output_dir = scratch_dir("steady").string();
    run_experiment(cfg);
    const std::string head = slurp(fs::path(cfg.output_dir) / "run_0.csv").substr(0, 200);
    EXPECT_NE(head.find("regret_olc_x"), std::string::npos);
    EXPECT_NE(slurp(fs::path(cfg.output_dir) / "benchmarks.csv").find("bench_x"), std::string::npos);
}

TEST(Experiment, StatesStayWithinBound) {
    auto cfg = load_config(config_path("default.json"));
    cfg.T = 300;
    cfg.n_runs = 3;
    for (const auto& o : execute_runs(cfg)) {
        ASSERT_TRUE(o.ok()) << o.error;
        for (const auto* tr : {&*o.record->olc, &*o.record->dac})
            for (const auto& x : tr->states) EXPECT_LE(norm(x), o.record->setup.bound.D);
    }
}

TEST(Cli, MissingConfigExitsWithPath) {
    std::string err;
    EXPECT_EQ(run_cli({"run", "--config", "/nonexistent/cfg.json"}, nullptr, &err), EXIT_CONFIG);
    EXPECT_NE(err.find("/nonexistent/cfg.json"), std::string::npos);
}

TEST(Cli, UnknownFlagIsUsageError) {
    std::string err;
    EXPECT_EQ(run_cli({"run", "--config", config_path("default.json").string(), "--bogus"}, nullptr, &err), EXIT_CONFIG);
    EXPECT_FALSE(err.empty());
    EXPECT_EQ(run_cli({}), EXIT_CONFIG);
}

TEST(Cli, CheckPrintsCertificate) {
    std::string out;
    ASSERT_EQ(run_cli({"check", "--config", config_path("default.json").string()}, &out), EXIT_OK);
    std::istringstream in(out);
    std::string key;
    double value = 0.0;
    std::map<std::string, double> kv;
    while (in >> key >> value) kv[key] = value;
    EXPECT_NEAR(kv.at("spectral_radius_estimate"), 1.0 / 3.0, 1e-3);
    EXPECT_NEAR(kv.at("gamma"), 0.95 * 2.0 / 3.0, 1e-3);
    EXPECT_GE(kv.at("kappa"), 1.0);
    EXPECT_GT(kv.at("L"), 0.0);
    EXPECT_GT(kv.at("D"), 0.0);
}

TEST(Cli, RunIsDeterministic) {
    const fs::path a = scratch_dir("det_a"), b = scratch_dir("det_b");
    const std::string cfg = config_path("default.json").string();
    ASSERT_EQ(run_cli({"run", "--config", cfg, "--out", a.string(), "--runs", "2", "--horizon", "200"}), EXIT_OK);
    ASSERT_EQ(run_cli({"run", "--config", cfg, "--out", b.string(), "--runs", "2", "--horizon", "200"}), EXIT_OK);
    for (const char* f : {"run_0.csv", "run_1.csv", "summary.csv", "benchmarks.csv"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, BenchPrintsOneLinePerRun) {
    const fs::path dir = scratch_dir("bench_cfg");
    fs::create_directories(dir);
    {
        std::ofstream out(dir / "cfg.json");
        out << kScalarConfig;
    }
    std::string out;
    ASSERT_EQ(run_cli({"bench", "--config", (dir / "cfg.json").string()}, &out), EXIT_OK);
    EXPECT_EQ(std::count(out.begin(), out.end(), '\n'), 2);
    EXPECT_NE(out.find(",yes"), std::string::npos);
}

} // namespace
} // namespace olc
