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

// Command-line front end:
//   run   --config PATH [--out DIR] [--seed INT] [--runs INT] [--horizon INT]
//   bench --config PATH
//   check --config PATH
// Exit codes: 0 success, 1 usage or configuration error, 2 runtime failure.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "olc/config.hpp"
#include "olc/harness.hpp"

namespace olc {

inline constexpr int EXIT_OK = 0;
inline constexpr int EXIT_CONFIG = 1;
inline constexpr int EXIT_RUNTIME = 2;

namespace detail {

inline void print_check(const ExperimentConfig& cfg, std::ostream& out) {
    const LtiSystem sys(cfg.A, cfg.B);
    const Realization real = realize(cfg, 0);
    const RunSetup s = make_setup(cfg, sys, real.costs);
    out << "spectral_radius_estimate " << format_real(s.cert.radius_estimate) << '\n'
        << "gamma " << format_real(s.cert.gamma) << '\n'
        << "kappa " << format_real(s.cert.kappa) << '\n'
        << "norm_I_minus_A " << format_real(spectral_norm(sys.i_minus_a())) << '\n'
        << "D " << format_real(s.bound.D) << '\n'
        << "L " << format_real(s.smooth.L) << '\n'
        << "eta " << format_real(s.eta) << '\n'
        << "eta_g " << format_real(s.eta_g) << '\n'
        << "dac_radius " << format_real(s.radius) << '\n';
}

inline int print_bench(const ExperimentConfig& cfg, std::ostream& out) {
    const LtiSystem sys(cfg.A, cfg.B);
    int failed = 0;
    out << "run,seed,bench_u,bench_m" << (cfg.disturbances_on ? "" : ",bench_x") << ",converged\n";
    for (int k = 0; k < cfg.n_runs; ++k) {
        const Realization real = realize(cfg, k);
        const RunSetup s = make_setup(cfg, sys, real.costs);
        const Benchmarks b = solve_benchmarks(cfg, sys, s, real.costs, real.disturbances);
        bool converged = b.fixed_input.converged && b.dac.converged;
        out << k << ',' << real.seed << ',' << format_real(b.fixed_input.value) << ',' << format_real(b.dac.value);
        if (b.steady_state) {
            out << ',' << format_real(b.steady_state->value);
            converged = converged && b.steady_state->converged;
        }
        out << ',' << (converged ? "yes" : "no") << '\n';
        if (!converged) ++failed;
    }
    return failed == 0 ? EXIT_OK : EXIT_RUNTIME;
}

} // namespace detail

inline int cli_main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"Online control of linear systems: simulator and benchmarks", "olc_sim"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<int> runs;
    std::optional<long> horizon;

    auto* run = app.add_subcommand("run", "run the experiment and write CSVs");
    run->add_option("--config", config_path, "JSON configuration")->required();
    run->add_option("--out", out_dir, "output directory (overrides output_dir)");
    run->add_option("--seed", seed, "base seed (overrides seed)");
    run->add_option("--runs", runs, "number of runs (overrides n_runs)");
    run->add_option("--horizon", horizon, "horizon T (overrides T)");

    auto* bench = app.add_subcommand("bench", "solve the hindsight benchmarks and print their values");
    bench->add_option("--config", config_path, "JSON configuration")->required();

    auto* check = app.add_subcommand("check", "print the stability certificate and derived constants");
    check->add_option("--config", config_path, "JSON configuration")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return EXIT_OK;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n' << app.help();
        return EXIT_CONFIG;
    }

    ExperimentConfig cfg;
    try {
        cfg = load_config(config_path);
        if (out_dir) cfg.output_dir = *out_dir;
        if (seed) cfg.seed = *seed;
        if (runs) cfg.n_runs = *runs;
        if (horizon) cfg.T = *horizon;
        validate(cfg);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return EXIT_CONFIG;
    }

    try {
        if (check->parsed()) {
            detail::print_check(cfg, out);
            return EXIT_OK;
        }
        if (bench->parsed()) return detail::print_bench(cfg, out);

        const ExperimentResult res = run_experiment(cfg);
        for (const auto& o : res.runs) {
            if (o.ok()) {
                const auto& b = *o.record->benchmarks;
                out << "run " << o.index << " seed " << o.seed << ": bench_u " << format_real(b.fixed_input.value)
                    << " bench_m " << format_real(b.dac.value) << " regret_olc_u "
                    << format_real(o.regret->olc_u.back()) << " regret_dac_u " << format_real(o.regret->dac_u.back())
                    << '\n';
            } else {
                err << "run " << o.index << " seed " << o.seed << " failed: " << o.error << '\n';
            }
        }
        out << "wrote " << res.files.size() << " files to " << cfg.output_dir << '\n';
        return res.failures() == 0 ? EXIT_OK : EXIT_RUNTIME;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return EXIT_CONFIG;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << '\n';
        return EXIT_RUNTIME;
    }
}

} // namespace olc
