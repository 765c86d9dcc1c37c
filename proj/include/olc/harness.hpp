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
#pragma once

// Experiment orchestration: seeded problem generation, the online control
// loop, hindsight benchmarks, regret curves and CSV output.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "olc/benchmarks.hpp"
#include "olc/config.hpp"
#include "olc/controllers.hpp"
#include "olc/costs.hpp"
#include "olc/rng.hpp"
#include "olc/system.hpp"

namespace olc {

inline constexpr std::uint64_t COST_STREAM = 0;
inline constexpr std::uint64_t DISTURBANCE_STREAM = 1;
inline constexpr double STATE_BOUND_SLACK = 1e-9;

enum class ControllerKind { Olc, Dac };

inline std::string_view to_string(ControllerKind k) { return k == ControllerKind::Olc ? "olc" : "dac"; }

/// Q_t = q_scale (G^T G / N + q_ridge I), G with i.i.d. standard normal
/// entries; c_t uniform on c_center + [-c_max, c_max]^N.
inline std::vector<QuadraticCost> generate_costs(const ExperimentConfig& cfg, SeededRng& rng) {
    if (cfg.T < 1) throw InvalidInput("generate_costs: T must be at least 1");
    if (!(cfg.cost_gen.q_scale > 0.0)) throw ConfigError("cost_gen.q_scale must be positive");
    const std::size_t n = cfg.state_dim();
    const Vector center = cfg.target_center();
    std::vector<QuadraticCost> costs;
    costs.reserve(static_cast<std::size_t>(cfg.T));
    for (long t = 0; t < cfg.T; ++t) {
        Matrix g(n, n);
        for (auto& v : g.values()) v = rng.normal();
        Matrix q(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i; j < n; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < n; ++k) s += g(k, i) * g(k, j);
                s /= static_cast<double>(n);
                if (i == j) s += cfg.cost_gen.q_ridge;
                q(i, j) = q(j, i) = cfg.cost_gen.q_scale * s;
            }
        Vector c(n);
        for (std::size_t i = 0; i < n; ++i) c[i] = center[i] + rng.uniform(-cfg.cost_gen.c_max, cfg.cost_gen.c_max);
        costs.emplace_back(std::move(q), std::move(c));
    }
    return costs;
}

/// w_t uniform on the disturbance box for t = 1..T-1; zeros when disturbances are off.
inline std::vector<Vector> generate_disturbances(const ExperimentConfig& cfg, SeededRng& rng) {
    const std::size_t count = static_cast<std::size_t>(std::max(0L, cfg.T - 1));
    std::vector<Vector> ws(count, Vector(cfg.state_dim()));
    if (!cfg.disturbances_on) return ws;
    for (auto& w : ws)
        for (std::size_t i = 0; i < w.dim(); ++i) w[i] = rng.uniform(cfg.w_box.lower()[i], cfg.w_box.upper()[i]);
    return ws;
}

/// Bound on ||c_t|| implied by the target distribution.
inline double target_norm_bound(const ExperimentConfig& cfg) {
    return norm(cfg.target_center()) + cfg.cost_gen.c_max * std::sqrt(static_cast<double>(cfg.state_dim()));
}

/// Constants fixed before a run starts.
struct RunSetup {
    StabilityCert cert;
    StateBound bound;
    SmoothnessParams smooth;
    double eta = 0.0;
    double eta_g = 0.0;
    double radius = 0.0;
};

inline RunSetup make_setup(const ExperimentConfig& cfg, const LtiSystem& sys, std::span<const QuadraticCost> costs) {
    RunSetup s;
    s.cert = certify_strong_stability(sys.A());
    const BoxSet w_set = cfg.disturbances_on ? cfg.w_box : BoxSet::point(Vector(cfg.state_dim()));
    s.bound = state_bound(s.cert, sys, cfg.initial_state(), cfg.u_box, w_set);
    s.smooth = smoothness_constant(costs, s.bound, target_norm_bound(cfg));
    s.eta = cfg.olc.eta_override ? *cfg.olc.eta_override : theorem1_step_size(s.smooth.L, cfg.T, s.cert);
    s.eta_g = cfg.dac.eta_g ? *cfg.dac.eta_g : 1.0 / std::sqrt(static_cast<double>(cfg.T));
    s.radius = cfg.dac.radius ? *cfg.dac.radius
                              : std::pow(s.cert.kappa, 3) * spectral_norm(sys.B());
    return s;
}

struct ControllerTrace {
    std::vector<Vector> states;  // x_1..x_T
    std::vector<Vector> inputs;  // u_1..u_{T-1}
    std::vector<double> costs;   // f_t(x_t), t = 1..T
    std::vector<Vector> targets; // z_1..z_T (target-state tracker only)
};

struct Benchmarks {
    BenchmarkResult<Vector> fixed_input;
    BenchmarkResult<std::vector<Matrix>> dac;
    std::optional<BenchmarkResult<Vector>> steady_state;
    std::vector<double> fixed_input_costs; // f_t(x_t^{u*})
    std::vector<double> dac_costs;         // f_t along the best DAC policy
    std::vector<double> steady_state_costs; // f_t(x*), disturbance-free runs only
};

struct RunRecord {
    long T = 0;
    std::uint64_t seed = 0;
    RunSetup setup;
    std::vector<Vector> disturbances;
    std::optional<ControllerTrace> olc;
    std::optional<ControllerTrace> dac;
    std::optional<Benchmarks> benchmarks;
};

/// Plays one controller against (costs, w_seq) following the protocol:
/// observe x_t, act u_t, incur f_t(x_t), feed back, then transition.
inline ControllerTrace play(const LtiSystem& sys, Controller& controller, const Vector& x1,
                            std::span<const QuadraticCost> costs, const std::vector<Vector>& w_seq,
                            const StateBound& bound, const std::function<void(ControllerTrace&)>& after_round = {}) {
    const std::size_t T = costs.size();
    if (w_seq.size() + 1 != T) throw InvalidInput("play: need T costs and T-1 disturbances");
    ControllerTrace tr;
    tr.states.reserve(T);
    tr.inputs.reserve(T - 1);
    tr.costs.reserve(T);
    Vector x = x1;
    auto check_bound = [&](const Vector& s, std::size_t t) {
        if (norm(s) > bound.D * (1.0 + STATE_BOUND_SLACK))
            throw InvalidState("state bound violated at t=" + std::to_string(t + 1) + ": ||x|| = " +
                               std::to_string(norm(s)) + " > D = " + std::to_string(bound.D));
    };
    for (std::size_t t = 0; t + 1 < T; ++t) {
        check_bound(x, t);
        tr.states.push_back(x);
        if (after_round) after_round(tr);
        Vector u = controller.act(x);
        tr.costs.push_back(costs[t].value(x));
        Vector next = step(sys, x, u, w_seq[t]);
        controller.observe(costs[t], x, next);
        tr.inputs.push_back(std::move(u));
        x = std::move(next);
    }
    check_bound(x, T - 1);
    tr.states.push_back(x);
    if (after_round) after_round(tr);
    tr.costs.push_back(costs[T - 1].value(x));
    return tr;
}

inline ControllerTrace run_controller(const ExperimentConfig& cfg, const LtiSystem& sys, const RunSetup& setup,
                                      ControllerKind kind, std::span<const QuadraticCost> costs,
                                      const std::vector<Vector>& w_seq) {
    const Vector x1 = cfg.initial_state();
    if (kind == ControllerKind::Olc) {
        OlcController ctl(sys, cfg.u_box, setup.eta, x1);
        return play(sys, ctl, x1, costs, w_seq, setup.bound,
                    [&](ControllerTrace& tr) { tr.targets.push_back(ctl.state().z); });
    }
    DacController ctl(sys, cfg.u_box, cfg.dac.H_mem, setup.eta_g, setup.radius, setup.cert.gamma);
    return play(sys, ctl, x1, costs, w_seq, setup.bound);
}

/// One controller on one cost/disturbance realization.
inline RunRecord run_single(const ExperimentConfig& cfg, ControllerKind kind, const std::vector<QuadraticCost>& costs,
                            const std::vector<Vector>& w_seq) {
    const LtiSystem sys(cfg.A, cfg.B);
    RunRecord rec;
    rec.T = static_cast<long>(costs.size());
    rec.seed = cfg.seed;
    rec.setup = make_setup(cfg, sys, costs);
    rec.disturbances = w_seq;
    auto trace = run_controller(cfg, sys, rec.setup, kind, costs, w_seq);
    (kind == ControllerKind::Olc ? rec.olc : rec.dac) = std::move(trace);
    return rec;
}

inline std::vector<double> per_step_costs(const std::vector<Vector>& xs, std::span<const QuadraticCost> costs) {
    std::vector<double> out(xs.size());
    for (std::size_t t = 0; t < xs.size(); ++t) out[t] = costs[t].value(xs[t]);
    return out;
}

inline Benchmarks solve_benchmarks(const ExperimentConfig& cfg, const LtiSystem& sys, const RunSetup& setup,
                                   const std::vector<QuadraticCost>& costs, const std::vector<Vector>& w_seq) {
    const Vector x1 = cfg.initial_state();
    const std::size_t T = costs.size();
    Benchmarks b;
    b.fixed_input = best_fixed_input(sys, x1, w_seq, costs, cfg.u_box);
    b.dac = best_dac(sys, x1, w_seq, costs, cfg.dac.H_mem, setup.radius, setup.cert.gamma);
    if (!cfg.disturbances_on) {
        b.steady_state = best_steady_state(costs, sys, cfg.u_box);
        b.steady_state_costs = per_step_costs(std::vector<Vector>(T, b.steady_state->optimizer), costs);
    }
    b.fixed_input_costs =
        per_step_costs(simulate(sys, x1, std::vector<Vector>(T - 1, b.fixed_input.optimizer), w_seq), costs);
    b.dac_costs = per_step_costs(simulate(sys, x1, dac_policy_inputs(b.dac.optimizer, w_seq), w_seq), costs);
    return b;
}

/// Both controllers plus all benchmarks on one realization.
inline RunRecord run_full(const ExperimentConfig& cfg, const std::vector<QuadraticCost>& costs,
                          const std::vector<Vector>& w_seq) {
    const LtiSystem sys(cfg.A, cfg.B);
    RunRecord rec;
    rec.T = static_cast<long>(costs.size());
    rec.seed = cfg.seed;
    rec.setup = make_setup(cfg, sys, costs);
    rec.disturbances = w_seq;
    rec.olc = run_controller(cfg, sys, rec.setup, ControllerKind::Olc, costs, w_seq);
    rec.dac = run_controller(cfg, sys, rec.setup, ControllerKind::Dac, costs, w_seq);
    rec.benchmarks = solve_benchmarks(cfg, sys, rec.setup, costs, w_seq);
    return rec;
}

/// Realization for run k: seed + k, with separate streams for costs and
/// disturbances so that a shorter horizon sees a prefix of a longer one.
struct Realization {
    std::uint64_t seed = 0;
    std::vector<QuadraticCost> costs;
    std::vector<Vector> disturbances;
};

inline Realization realize(const ExperimentConfig& cfg, int run_index) {
    Realization r;
    r.seed = cfg.seed + static_cast<std::uint64_t>(run_index);
    const SeededRng root(r.seed);
    SeededRng cost_rng = root.split(COST_STREAM);
    SeededRng w_rng = root.split(DISTURBANCE_STREAM);
    r.costs = generate_costs(cfg, cost_rng);
    r.disturbances = generate_disturbances(cfg, w_rng);
    return r;
}

struct RegretReport {
    std::vector<double> cum_olc, cum_dac;
    std::vector<double> olc_u, dac_u; // vs best fixed input
    std::vector<double> olc_m, dac_m; // vs best DAC policy
    std::vector<double> olc_x, dac_x; // vs best steady state; disturbance-free runs only

    bool has_steady_state() const noexcept { return !olc_x.empty(); }
};

namespace detail {

inline std::vector<double> prefix_sums(const std::vector<double>& v) {
    std::vector<double> out(v.size());
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = (s += v[i]);
    return out;
}

inline std::vector<double> difference(const std::vector<double>& a, const std::vector<double>& b) {
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

} // namespace detail

/// Cumulative regret curves against the full-horizon benchmark optimizers.
inline RegretReport compute_regret(const RunRecord& rec) {
    if (!rec.benchmarks) throw InvalidState("compute_regret: benchmarks have not been solved for this run");
    if (!rec.olc || !rec.dac) throw InvalidState("compute_regret: record needs both controller traces");
    const auto& b = *rec.benchmarks;
    RegretReport r;
    r.cum_olc = detail::prefix_sums(rec.olc->costs);
    r.cum_dac = detail::prefix_sums(rec.dac->costs);
    const auto bench_u = detail::prefix_sums(b.fixed_input_costs);
    const auto bench_m = detail::prefix_sums(b.dac_costs);
    r.olc_u = detail::difference(r.cum_olc, bench_u);
    r.dac_u = detail::difference(r.cum_dac, bench_u);
    r.olc_m = detail::difference(r.cum_olc, bench_m);
    r.dac_m = detail::difference(r.cum_dac, bench_m);
    if (b.steady_state) {
        const auto bench_x = detail::prefix_sums(b.steady_state_costs);
        r.olc_x = detail::difference(r.cum_olc, bench_x);
        r.dac_x = detail::difference(r.cum_dac, bench_x);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Output
// ---------------------------------------------------------------------------

/// %.12g formatting used for every float in the CSV files.
inline std::string format_real(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

inline std::vector<std::string> regret_columns(bool steady_state) {
    std::vector<std::string> cols = {"regret_olc_u", "regret_dac_u", "regret_olc_m", "regret_dac_m"};
    if (steady_state) {
        cols.emplace_back("regret_olc_x");
        cols.emplace_back("regret_dac_x");
    }
    return cols;
}

inline std::vector<const std::vector<double>*> regret_series(const RegretReport& r) {
    std::vector<const std::vector<double>*> s = {&r.olc_u, &r.dac_u, &r.olc_m, &r.dac_m};
    if (r.has_steady_state()) {
        s.push_back(&r.olc_x);
        s.push_back(&r.dac_x);
    }
    return s;
}

inline void write_run_csv(std::ostream& out, const RunRecord& rec, const RegretReport& r) {
    out << "t,cost_olc,cost_dac,cum_olc,cum_dac";
    for (const auto& c : regret_columns(r.has_steady_state())) out << ',' << c;
    out << '\n';
    const auto series = regret_series(r);
    for (std::size_t t = 0; t < r.cum_olc.size(); ++t) {
        out << (t + 1) << ',' << format_real(rec.olc->costs[t]) << ',' << format_real(rec.dac->costs[t]) << ','
            << format_real(r.cum_olc[t]) << ',' << format_real(r.cum_dac[t]);
        for (const auto* col : series) out << ',' << format_real((*col)[t]);
        out << '\n';
    }
}

struct RunOutcome {
    int index = 0;
    std::uint64_t seed = 0;
    std::optional<RunRecord> record;
    std::optional<RegretReport> regret;
    std::string error;

    bool ok() const noexcept { return record.has_value(); }
};

struct ExperimentResult {
    std::vector<RunOutcome> runs;
    std::vector<std::filesystem::path> files;

    std::size_t failures() const {
        return static_cast<std::size_t>(std::count_if(runs.begin(), runs.end(), [](const auto& r) { return !r.ok(); }));
    }
};

/// Runs `cfg.n_runs` independent realizations (seed + k) concurrently and
/// returns them in index order. A failing run is recorded, not rethrown.
inline std::vector<RunOutcome> execute_runs(const ExperimentConfig& cfg, unsigned threads = 0) {
    validate(cfg);
    std::vector<RunOutcome> runs(static_cast<std::size_t>(cfg.n_runs));
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int k = next++; k < cfg.n_runs; k = next++) {
            RunOutcome& o = runs[static_cast<std::size_t>(k)];
            o.index = k;
            o.seed = cfg.seed + static_cast<std::uint64_t>(k);
            try {
                Realization real = realize(cfg, k);
                RunRecord rec = run_full(cfg, real.costs, real.disturbances);
                rec.seed = real.seed;
                o.regret = compute_regret(rec);
                o.record = std::move(rec);
            } catch (const std::exception& e) {
                o.error = e.what();
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.n_runs));
    std::vector<std::thread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return runs;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + p.string());
    return out;
}

} // namespace detail

/// Writes run_<k>.csv, summary.csv, benchmarks.csv (and failures.csv when a
/// run failed) into `dir`.
inline std::vector<std::filesystem::path> write_outputs(const ExperimentConfig& cfg, const std::vector<RunOutcome>& runs,
                                                        const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> files;
    const bool steady = !cfg.disturbances_on;

    for (const auto& o : runs) {
        if (!o.ok()) continue;
        auto p = dir / ("run_" + std::to_string(o.index) + ".csv");
        auto out = detail::open_output(p);
        write_run_csv(out, *o.record, *o.regret);
        files.push_back(p);
    }

    // Per-t mean and sample standard deviation over completed runs.
    {
        auto p = dir / "summary.csv";
        auto out = detail::open_output(p);
        const auto cols = regret_columns(steady);
        out << "t";
        for (const auto& c : cols) out << ',' << c << "_mean," << c << "_std";
        out << '\n';
        std::vector<const RegretReport*> done;
        for (const auto& o : runs)
            if (o.ok()) done.push_back(&*o.regret);
        const std::size_t T = static_cast<std::size_t>(cfg.T);
        if (!done.empty()) {
            for (std::size_t t = 0; t < T; ++t) {
                out << (t + 1);
                for (std::size_t c = 0; c < cols.size(); ++c) {
                    double mean = 0.0;
                    for (const auto* r : done) mean += (*regret_series(*r)[c])[t];
                    mean /= static_cast<double>(done.size());
                    double var = 0.0;
                    for (const auto* r : done) {
                        const double d = (*regret_series(*r)[c])[t] - mean;
                        var += d * d;
                    }
                    var = done.size() > 1 ? var / static_cast<double>(done.size() - 1) : 0.0;
                    out << ',' << format_real(mean) << ',' << format_real(std::sqrt(var));
                }
                out << '\n';
            }
        }
        files.push_back(p);
    }
    {
        auto p = dir / "benchmarks.csv";
        auto out = detail::open_output(p);
        out << "run,seed,bench_u,bench_m" << (steady ? ",bench_x" : "") << '\n';
        for (const auto& o : runs) {
            if (!o.ok()) continue;
            const auto& b = *o.record->benchmarks;
            out << o.index << ',' << o.seed << ',' << format_real(b.fixed_input.value) << ','
                << format_real(b.dac.value);
            if (steady) out << ',' << format_real(b.steady_state->value);
            out << '\n';
        }
        files.push_back(p);
    }
    std::error_code ec;
    std::filesystem::remove(dir / "failures.csv", ec);
    if (std::any_of(runs.begin(), runs.end(), [](const auto& o) { return !o.ok(); })) {
        auto p = dir / "failures.csv";
        auto out = detail::open_output(p);
        out << "run,seed,error\n";
        for (const auto& o : runs) {
            if (o.ok()) continue;
            std::string msg = o.error;
            std::replace(msg.begin(), msg.end(), '"', '\'');
            out << o.index << ',' << o.seed << ",\"" << msg << "\"\n";
        }
        files.push_back(p);
    }
    return files;
}

/// Full experiment: all runs, then every CSV under cfg.output_dir.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg, unsigned threads = 0) {
    ExperimentResult res;
    res.runs = execute_runs(cfg, threads);
    res.files = write_outputs(cfg, res.runs, cfg.output_dir);
    return res;
}

} // namespace olc
