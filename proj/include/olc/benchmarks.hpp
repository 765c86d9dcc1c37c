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

// Offline best-in-hindsight comparators. Every problem here is convex in its
// decision variable (the trajectory is affine in it), and is solved by
// accelerated projected gradient descent with backtracking; gradients flow
// backwards through the dynamics with an adjoint recursion.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ranges>
#include <vector>

#include "olc/controllers.hpp"
#include "olc/costs.hpp"
#include "olc/errors.hpp"
#include "olc/linalg.hpp"
#include "olc/system.hpp"

namespace olc {

template <class R>
concept CostSequence = std::ranges::random_access_range<R> && std::ranges::sized_range<R> &&
                       CostFunction<std::ranges::range_value_t<R>>;

template <class Optimizer>
struct BenchmarkResult {
    Optimizer optimizer{};
    double value = 0.0;         // cumulative cost, evaluated on the disturbed trajectory
    double nominal_value = 0.0; // same, evaluated as sum g_t on the nominal trajectory
    int iterations = 0;
    bool converged = false;
};

struct SolverOptions {
    double stop_move = 1e-9;
    int max_iter = 20000;
    double initial_step = 1.0;
};

namespace detail {

inline void check_lengths(std::size_t n_costs, std::size_t n_u, std::size_t n_w) {
    if (n_costs < 1) throw InvalidInput("need at least one cost");
    if (n_u + 1 != n_costs || n_w + 1 != n_costs)
        throw InvalidInput("length mismatch: " + std::to_string(n_costs) + " costs, " +
                           std::to_string(n_u) + " inputs, " + std::to_string(n_w) +
                           " disturbances (expected T, T-1, T-1)");
}

/// Co-states lambda_t = grad f_t(x_t) + A^T lambda_{t+1}, lambda_T = grad f_T(x_T).
/// Returns B^T lambda_{t+1} for t = 1..T-1.
template <CostSequence Costs>
std::vector<Vector> input_sensitivities(const LtiSystem& sys, const std::vector<Vector>& xs, const Costs& costs) {
    const std::size_t T = xs.size();
    std::vector<Vector> grads(T - 1);
    Vector lambda = costs[T - 1].gradient(xs[T - 1]);
    for (std::size_t t = T - 1; t-- > 0;) {
        grads[t] = transpose_times(sys.B(), lambda);
        Vector next = costs[t].gradient(xs[t]);
        next += transpose_times(sys.A(), lambda);
        lambda = std::move(next);
    }
    return grads;
}

template <CostSequence Costs>
double sum_costs(const std::vector<Vector>& xs, const Costs& costs) {
    double s = 0.0;
    for (std::size_t t = 0; t < xs.size(); ++t) s += costs[t].value(xs[t]);
    return s;
}

/// sum_t f_t(xbar_t + xd_t), i.e. the nominal costs g_t along the nominal trajectory.
template <CostSequence Costs>
double sum_nominal_costs(const DecomposedTrajectory& traj, const Costs& costs) {
    double s = 0.0;
    using F = std::ranges::range_value_t<Costs>;
    for (std::size_t t = 0; t < traj.nominal.size(); ++t) {
        const ShiftedCost<CostRef<F>> g(CostRef<F>{&costs[t]}, traj.disturbance[t]);
        s += g.value(traj.nominal[t]);
    }
    return s;
}

struct DescentOutcome {
    Vector params;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

/// Accelerated projected gradient (FISTA) with adaptive restart.
///
/// The step is found by backtracking on a local Lipschitz estimate of the
/// gradient, step * ||grad(p) - grad(y)|| <= ||p - y||, which stays reliable
/// near the optimum where objective differences drop below rounding noise.
/// Momentum restarts when the gradient-mapping direction opposes the last
/// move. Stops once an accepted step moves the iterate by less than
/// `stop_move`.
inline DescentOutcome projected_descent(const std::function<double(const Vector&)>& objective,
                                        const std::function<Vector(const Vector&)>& gradient,
                                        const std::function<Vector(Vector)>& project, Vector start,
                                        const SolverOptions& opt) {
    Vector x = project(std::move(start));
    Vector y = x;
    Vector gy = gradient(y);
    double momentum = 1.0;
    double step = opt.initial_step;
    DescentOutcome out;
    for (int it = 1; it <= opt.max_iter; ++it) {
        Vector next;
        Vector gnext;
        step *= 2.0;
        for (;;) {
            next = project(y - step * gy);
            gnext = gradient(next);
            const double d = distance(next, y);
            if (step * distance(gnext, gy) <= d * (1.0 + 1e-12) || d == 0.0) break;
            step *= 0.5;
            if (step < 1e-300) {
                out.params = std::move(x);
                out.value = objective(out.params);
                out.iterations = it;
                return out;
            }
        }
        const double move = distance(next, x);
        out.iterations = it;
        if (move < opt.stop_move) {
            x = std::move(next);
            out.converged = true;
            break;
        }
        if (dot(y - next, next - x) > 0.0) {
            // Restart from the new point without momentum.
            momentum = 1.0;
            x = std::move(next);
            y = x;
            gy = std::move(gnext);
            continue;
        }
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double beta = (momentum - 1.0) / next_momentum;
        momentum = next_momentum;
        if (beta == 0.0) {
            y = next;
            gy = std::move(gnext);
        } else {
            y = project(next + beta * (next - x));
            gy = gradient(y);
        }
        x = std::move(next);
    }
    out.params = std::move(x);
    out.value = objective(out.params);
    return out;
}

inline std::vector<Vector> constant_inputs(const Vector& u, std::size_t count) {
    return std::vector<Vector>(count, u);
}

} // namespace detail

/// Gradient of sum_t f_t(x_t) with respect to each u_t (t = 1..T-1).
template <CostSequence Costs>
std::vector<Vector> adjoint_input_gradients(const LtiSystem& sys, const Vector& x1, const std::vector<Vector>& u_seq,
                                            const std::vector<Vector>& w_seq, const Costs& costs) {
    detail::check_lengths(std::ranges::size(costs), u_seq.size(), w_seq.size());
    return detail::input_sensitivities(sys, simulate(sys, x1, u_seq, w_seq), costs);
}

/// Cumulative cost sum_t f_t(x_t) of an open-loop input sequence.
template <CostSequence Costs>
double trajectory_cost(const LtiSystem& sys, const Vector& x1, const std::vector<Vector>& u_seq,
                       const std::vector<Vector>& w_seq, const Costs& costs) {
    detail::check_lengths(std::ranges::size(costs), u_seq.size(), w_seq.size());
    return detail::sum_costs(simulate(sys, x1, u_seq, w_seq), costs);
}

/// Same total computed as sum_t g_t(xbar_t) on the disturbance-free copy.
template <CostSequence Costs>
double nominal_trajectory_cost(const LtiSystem& sys, const Vector& x1, const std::vector<Vector>& u_seq,
                               const std::vector<Vector>& w_seq, const Costs& costs) {
    detail::check_lengths(std::ranges::size(costs), u_seq.size(), w_seq.size());
    return detail::sum_nominal_costs(simulate_decomposed(sys, x1, u_seq, w_seq), costs);
}

/// Best constant input in hindsight, min_{u in U} sum_t f_t(x_t^u).
template <CostSequence Costs>
BenchmarkResult<Vector> best_fixed_input(const LtiSystem& sys, const Vector& x1, const std::vector<Vector>& w_seq,
                                         const Costs& costs, const BoxSet& u_set, const SolverOptions& opt = {}) {
    const std::size_t T = std::ranges::size(costs);
    detail::check_lengths(T, T - 1, w_seq.size());
    if (u_set.dim() != sys.input_dim()) throw InvalidInput("best_fixed_input: input box dimension mismatch");

    auto objective = [&](const Vector& u) {
        return detail::sum_costs(simulate(sys, x1, detail::constant_inputs(u, T - 1), w_seq), costs);
    };
    auto gradient = [&](const Vector& u) {
        const auto xs = simulate(sys, x1, detail::constant_inputs(u, T - 1), w_seq);
        Vector g(sys.input_dim());
        for (const auto& gt : detail::input_sensitivities(sys, xs, costs)) g += gt;
        return g;
    };
    auto project = [&](Vector u) { return u_set.clamp(std::move(u)); };

    auto r = detail::projected_descent(objective, gradient, project, Vector(sys.input_dim()), opt);
    BenchmarkResult<Vector> out;
    out.value = r.value;
    out.iterations = r.iterations;
    out.converged = r.converged;
    out.nominal_value = nominal_trajectory_cost(sys, x1, detail::constant_inputs(r.params, T - 1), w_seq, costs);
    out.optimizer = std::move(r.params);
    return out;
}

/// Best steady state in hindsight, min_{x in X} sum_t f_t(x), through x = S u, u in U.
template <CostSequence Costs>
BenchmarkResult<Vector> best_steady_state(const Costs& costs, const LtiSystem& sys, const BoxSet& u_set,
                                          const SolverOptions& opt = {}) {
    if (std::ranges::size(costs) == 0) throw InvalidInput("best_steady_state: empty cost sequence");
    if (u_set.dim() != sys.input_dim()) throw InvalidInput("best_steady_state: input box dimension mismatch");
    const Matrix& S = sys.steady_state_map();
    auto total = [&](const Vector& x) {
        double s = 0.0;
        for (const auto& f : costs) s += f.value(x);
        return s;
    };
    auto objective = [&](const Vector& u) { return total(S * u); };
    auto gradient = [&](const Vector& u) {
        const Vector x = S * u;
        Vector g(x.dim());
        for (const auto& f : costs) g += f.gradient(x);
        return transpose_times(S, g);
    };
    auto project = [&](Vector u) { return u_set.clamp(std::move(u)); };

    auto r = detail::projected_descent(objective, gradient, project, Vector(sys.input_dim()), opt);
    BenchmarkResult<Vector> out;
    out.optimizer = S * r.params;
    out.value = total(out.optimizer);
    out.nominal_value = out.value;
    out.iterations = r.iterations;
    out.converged = r.converged;
    return out;
}

/// Inputs of a disturbance-action policy, u_t = sum_{i=1}^{H} M^{[i-1]} w_{t-i}
/// (w_tau = 0 for tau <= 0), for t = 1..|w_seq|.
inline std::vector<Vector> dac_policy_inputs(const std::vector<Matrix>& blocks, const std::vector<Vector>& w_seq) {
    if (blocks.empty()) throw InvalidInput("DAC policy needs at least one block");
    std::vector<Vector> us(w_seq.size(), Vector(blocks.front().rows()));
    for (std::size_t t = 0; t < w_seq.size(); ++t)
        for (std::size_t i = 1; i <= blocks.size() && i <= t; ++i) us[t] += blocks[i - 1] * w_seq[t - i];
    return us;
}

namespace detail {

inline std::vector<Matrix> unflatten_blocks(const Vector& p, std::size_t memory, std::size_t rows, std::size_t cols) {
    std::vector<Matrix> blocks(memory, Matrix(rows, cols));
    std::size_t k = 0;
    for (auto& b : blocks)
        for (auto& v : b.values()) v = p[k++];
    return blocks;
}

inline Vector flatten_blocks(const std::vector<Matrix>& blocks) {
    std::vector<double> out;
    for (const auto& b : blocks) out.insert(out.end(), b.values().begin(), b.values().end());
    return Vector(std::move(out));
}

} // namespace detail

/// Gradient of sum_t f_t(x_t) with respect to each block M^{[i]} when the
/// inputs follow the disturbance-action policy of `blocks`.
template <CostSequence Costs>
std::vector<Matrix> dac_policy_gradient(const LtiSystem& sys, const Vector& x1, const std::vector<Matrix>& blocks,
                                        const std::vector<Vector>& w_seq, const Costs& costs) {
    const std::size_t T = std::ranges::size(costs);
    detail::check_lengths(T, T - 1, w_seq.size());
    const auto du = adjoint_input_gradients(sys, x1, dac_policy_inputs(blocks, w_seq), w_seq, costs);
    std::vector<Matrix> grads(blocks.size(), Matrix(sys.input_dim(), sys.state_dim()));
    for (std::size_t t = 0; t + 1 < T; ++t)
        for (std::size_t i = 1; i <= blocks.size() && i <= t; ++i) grads[i - 1] += outer(du[t], w_seq[t - i]);
    return grads;
}

/// Best disturbance-action policy in hindsight over the per-block Frobenius
/// balls ||M^{[i]}||_F <= radius (1-gamma)^i, scored with the nominal costs.
template <CostSequence Costs>
BenchmarkResult<std::vector<Matrix>> best_dac(const LtiSystem& sys, const Vector& x1, const std::vector<Vector>& w_seq,
                                              const Costs& costs, std::size_t memory, double radius, double gamma,
                                              const SolverOptions& opt = {}) {
    const std::size_t T = std::ranges::size(costs);
    detail::check_lengths(T, T - 1, w_seq.size());
    if (memory == 0) throw InvalidInput("best_dac: memory must be at least 1");
    const std::size_t m = sys.input_dim();
    const std::size_t n = sys.state_dim();
    const Vector zero_u(m);

    // x^d_t does not depend on M; precompute it once.
    const auto base = simulate_decomposed(sys, x1, std::vector<Vector>(T - 1, zero_u), w_seq);

    auto nominal_states = [&](const std::vector<Vector>& us) {
        std::vector<Vector> xs;
        xs.reserve(T);
        xs.push_back(x1);
        for (std::size_t t = 0; t + 1 < T; ++t) {
            Vector next = sys.A() * xs.back();
            next += sys.B() * us[t];
            xs.push_back(std::move(next));
        }
        return xs;
    };
    auto objective = [&](const Vector& p) {
        const auto xbar = nominal_states(dac_policy_inputs(detail::unflatten_blocks(p, memory, m, n), w_seq));
        double s = 0.0;
        for (std::size_t t = 0; t < T; ++t) s += costs[t].value(xbar[t] + base.disturbance[t]);
        return s;
    };
    auto gradient = [&](const Vector& p) {
        return detail::flatten_blocks(
            dac_policy_gradient(sys, x1, detail::unflatten_blocks(p, memory, m, n), w_seq, costs));
    };
    auto project = [&](Vector p) {
        std::size_t k = 0;
        for (std::size_t i = 0; i < memory; ++i) {
            const std::size_t len = m * n;
            double sq = 0.0;
            for (std::size_t j = 0; j < len; ++j) sq += p[k + j] * p[k + j];
            const double r = radius * std::pow(1.0 - gamma, static_cast<double>(i));
            const double nrm = std::sqrt(sq);
            if (nrm > r) {
                const double f = r > 0.0 ? r / nrm : 0.0;
                for (std::size_t j = 0; j < len; ++j) p[k + j] *= f;
            }
            k += len;
        }
        return p;
    };

    auto r = detail::projected_descent(objective, gradient, project, Vector(memory * m * n), opt);
    BenchmarkResult<std::vector<Matrix>> out;
    out.optimizer = detail::unflatten_blocks(r.params, memory, m, n);
    out.nominal_value = r.value;
    out.value = trajectory_cost(sys, x1, dac_policy_inputs(out.optimizer, w_seq), w_seq, costs);
    out.iterations = r.iterations;
    out.converged = r.converged;
    return out;
}

inline constexpr int GRID_MAX_RESOLUTION = 400;

/// Exhaustive search over a regular grid of U with `resolution` intervals
/// per axis (resolution + 1 points). Input dimension at most 2.
template <CostSequence Costs>
BenchmarkResult<Vector> grid_oracle_fixed_input(const LtiSystem& sys, const Vector& x1,
                                                const std::vector<Vector>& w_seq, const Costs& costs,
                                                const BoxSet& u_set, int resolution) {
    const std::size_t T = std::ranges::size(costs);
    detail::check_lengths(T, T - 1, w_seq.size());
    const std::size_t m = sys.input_dim();
    if (m > 2) throw Unsupported("grid oracle supports at most 2 inputs, got " + std::to_string(m));
    if (resolution < 1 || resolution > GRID_MAX_RESOLUTION)
        throw InvalidInput("grid resolution must be in [1, " + std::to_string(GRID_MAX_RESOLUTION) + "]");
    const int n1 = resolution + 1;
    const int n2 = m == 2 ? resolution + 1 : 1;
    auto coord = [&](std::size_t axis, int i) {
        const double lo = u_set.lower()[axis];
        const double hi = u_set.upper()[axis];
        return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(resolution);
    };
    BenchmarkResult<Vector> best;
    best.value = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n1; ++i)
        for (int j = 0; j < n2; ++j) {
            Vector u(m);
            u[0] = coord(0, i);
            if (m == 2) u[1] = coord(1, j);
            Vector x = x1;
            double s = costs[0].value(x);
            for (std::size_t t = 0; t + 1 < T; ++t) {
                x = step(sys, x, u, w_seq[t]);
                s += costs[t + 1].value(x);
            }
            ++best.iterations;
            if (s < best.value) {
                best.value = s;
                best.optimizer = std::move(u);
            }
        }
    best.nominal_value = best.value;
    best.converged = true;
    return best;
}

} // namespace olc
