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

// Online policies: the target-state tracker (online gradient descent on the
// steady-state manifold), its joint state/input variant, and the
// disturbance-action baseline.

#include <cmath>
#include <deque>
#include <string>
#include <string_view>
#include <vector>

#include "olc/costs.hpp"
#include "olc/errors.hpp"
#include "olc/linalg.hpp"
#include "olc/system.hpp"

namespace olc {

inline constexpr double PROJ_STOP_MOVE = 1e-10;
inline constexpr int PROJ_MAX_ITER = 5000;
inline constexpr double PROJ_FAIL_MOVE = 1e-6;
inline constexpr double MANIFOLD_MEMBER_TOL = 1e-12;

struct ProjectionResult {
    Vector z; // manifold point S u
    Vector u; // input in U holding z
    int iterations = 0;
};

/// Euclidean projection onto the steady-state manifold X = { S u : u in U }.
///
/// X is the image of the input box under S = (I - A)^{-1} B, so the
/// projection is the box-constrained least-squares problem
/// min_{u in U} ||S u - a||^2 + mu ||u - b||^2, solved by projected gradient
/// descent with step 1 / (||S||^2 + mu). Plain projection uses mu = 0; the
/// joint (state, input) projection uses mu = 1.
class ManifoldProjector {
public:
    ManifoldProjector(const LtiSystem& sys, BoxSet u_set)
        : s_(sys.steady_state_map()), u_set_(std::move(u_set)) {
        if (u_set_.dim() != sys.input_dim()) throw InvalidInput("input box dimension mismatch");
        s_norm_sq_ = spectral_norm(s_);
        s_norm_sq_ *= s_norm_sq_;
    }

    const BoxSet& input_set() const noexcept { return u_set_; }
    const Matrix& steady_state_map() const noexcept { return s_; }

    ProjectionResult project(const Vector& y) const {
        if (y.dim() != s_.rows()) throw InvalidInput("projection: state dimension mismatch");
        Vector u0 = u_set_.clamp(solve_least_squares(s_, y));
        // Points already on X are returned unchanged, so repeated projection
        // of a fixed target does not accumulate rounding drift.
        if (distance(s_ * u0, y) <= MANIFOLD_MEMBER_TOL * (1.0 + norm(y))) {
            ProjectionResult out;
            out.z = y;
            out.u = std::move(u0);
            return out;
        }
        return run(y, nullptr, 0.0, std::move(u0));
    }

    /// Joint projection of (a, b) onto {(S u, u) : u in U}.
    ProjectionResult project_joint(const Vector& a, const Vector& b) const {
        if (a.dim() != s_.rows() || b.dim() != s_.cols())
            throw InvalidInput("joint projection: dimension mismatch");
        return run(a, &b, 1.0, u_set_.clamp(b));
    }

private:
    ProjectionResult run(const Vector& a, const Vector* b, double mu, Vector u) const {
        const double lipschitz = s_norm_sq_ + mu;
        ProjectionResult out;
        if (lipschitz == 0.0) {
            out.u = std::move(u);
            out.z = s_ * out.u;
            return out;
        }
        const double step = 1.0 / lipschitz;
        double move = 0.0;
        int it = 0;
        for (; it < PROJ_MAX_ITER; ++it) {
            Vector grad = transpose_times(s_, s_ * u - a);
            if (b != nullptr) grad.axpy(mu, u - *b);
            Vector next = u_set_.clamp(u - step * grad);
            move = distance(next, u);
            u = std::move(next);
            if (move < PROJ_STOP_MOVE) break;
        }
        if (it == PROJ_MAX_ITER && move > PROJ_FAIL_MOVE) throw ProjectionFailure(it, move);
        out.iterations = it;
        out.z = s_ * u;
        out.u = std::move(u);
        return out;
    }

    Matrix s_;
    BoxSet u_set_;
    double s_norm_sq_ = 0.0;
};

inline Vector project_steady_state(const LtiSystem& sys, const BoxSet& u_set, const Vector& y) {
    return ManifoldProjector(sys, u_set).project(y).z;
}

/// eta = 2 gamma / (L sqrt(T (1 + 4 kappa^2))).
inline double theorem1_step_size(double L, long T, const StabilityCert& cert) {
    if (!(L > 0.0)) throw InvalidInput("step size: L must be positive");
    if (T < 1) throw InvalidInput("step size: T must be at least 1");
    return 2.0 * cert.gamma /
           (L * std::sqrt(static_cast<double>(T) * (1.0 + 4.0 * cert.kappa * cert.kappa)));
}

// ---------------------------------------------------------------------------
// Target-state tracker
// ---------------------------------------------------------------------------

struct OlcState {
    Vector z;
    double eta = 0.0;
};

/// Input that holds the target z; independent of the current state.
inline Vector olc_act(const OlcState& state, const LtiSystem& sys) {
    return input_for_steady_state(sys, state.z);
}

/// z' = Pi_X(z - eta * delta).
inline OlcState olc_update(const OlcState& state, const Vector& delta, const ManifoldProjector& proj) {
    Vector pre = state.z;
    pre.axpy(-state.eta, delta);
    return OlcState{proj.project(pre).z, state.eta};
}

inline OlcState olc_update(const OlcState& state, const Vector& delta, const LtiSystem& sys,
                           const BoxSet& u_set) {
    return olc_update(state, delta, ManifoldProjector(sys, u_set));
}

/// Joint target for costs that also depend on the input.
struct OlcXuState {
    Vector z;
    Vector u;
    double eta = 0.0;
};

/// (z', u') = Pi_{X_u}((z - eta delta_x, u - eta delta_u)), X_u = {(S u, u) : u in U}.
inline OlcXuState olcxu_update(const OlcXuState& state, const Vector& delta_x, const Vector& delta_u,
                               const ManifoldProjector& proj) {
    Vector a = state.z;
    a.axpy(-state.eta, delta_x);
    Vector b = state.u;
    b.axpy(-state.eta, delta_u);
    auto r = proj.project_joint(a, b);
    return OlcXuState{std::move(r.z), std::move(r.u), state.eta};
}

inline OlcXuState olcxu_update(const OlcXuState& state, const Vector& delta_x, const Vector& delta_u,
                               const LtiSystem& sys, const BoxSet& u_set) {
    return olcxu_update(state, delta_x, delta_u, ManifoldProjector(sys, u_set));
}

// ---------------------------------------------------------------------------
// Disturbance-action baseline
// ---------------------------------------------------------------------------

/// M^{[0]}..M^{[H-1]} plus the disturbance history, most recent first:
/// history[k] = w_{t-1-k}, zero before the first round.
struct DacState {
    std::vector<Matrix> blocks;
    std::deque<Vector> history;
    double eta_g = 0.0;
    double radius = 1.0;
    double gamma = 1.0;

    DacState() = default;
    DacState(std::size_t memory, std::size_t input_dim, std::size_t state_dim, double eta_g_,
             double radius_, double gamma_)
        : blocks(memory, Matrix(input_dim, state_dim)),
          history(2 * memory + 1, Vector(state_dim)),
          eta_g(eta_g_), radius(radius_), gamma(gamma_) {
        if (memory == 0) throw InvalidInput("DAC memory must be at least 1");
    }

    std::size_t memory() const noexcept { return blocks.size(); }
    double block_radius(std::size_t i) const { return radius * std::pow(1.0 - gamma, static_cast<double>(i)); }

    void push_disturbance(Vector w) {
        history.push_front(std::move(w));
        history.pop_back();
    }
};

/// sum_{i=1}^{H} M^{[i-1]} w_{t-i}, before clamping.
inline Vector dac_raw_action(const DacState& state) {
    Vector u(state.blocks.front().rows());
    for (std::size_t i = 0; i < state.memory(); ++i) u += state.blocks[i] * state.history[i];
    return u;
}

inline Vector dac_act(const DacState& state, const BoxSet& u_set) { return u_set.clamp(dac_raw_action(state)); }

/// w_t = x_{t+1} - A x_t - B u_t.
inline Vector dac_estimate_disturbance(const LtiSystem& sys, const Vector& x, const Vector& u,
                                       const Vector& x_next) {
    if (x_next.dim() != sys.state_dim()) throw InvalidInput("disturbance estimate: dimension mismatch");
    return x_next - step(sys, x, u, Vector(sys.state_dim()));
}

/// A^i and A^i B for i = 0..H, shared by the surrogate loss and its gradient.
struct PowerTable {
    std::vector<Matrix> a_pow;
    std::vector<Matrix> a_pow_b;

    PowerTable() = default;
    PowerTable(const LtiSystem& sys, std::size_t memory) {
        a_pow.reserve(memory + 1);
        a_pow_b.reserve(memory + 1);
        a_pow.push_back(Matrix::identity(sys.state_dim()));
        for (std::size_t i = 1; i <= memory; ++i) a_pow.push_back(a_pow.back() * sys.A());
        for (const auto& p : a_pow) a_pow_b.push_back(p * sys.B());
    }
};

/// Counterfactual state y_t(M): where the plant would be had the current M
/// been played for the last H + 1 rounds (truncated memory).
inline Vector dac_surrogate_state(const DacState& state, const PowerTable& powers) {
    const std::size_t H = state.memory();
    Vector y(state.history.front().dim());
    for (std::size_t i = 0; i <= H; ++i) {
        y += powers.a_pow[i] * state.history[i];
        Vector u(state.blocks.front().rows());
        for (std::size_t j = 1; j <= H; ++j) u += state.blocks[j - 1] * state.history[i + j];
        y += powers.a_pow_b[i] * u;
    }
    return y;
}

/// Gradient of f(y_t(M)) with respect to every block.
template <CostFunction F>
std::vector<Matrix> dac_surrogate_gradient(const DacState& state, const F& cost, const PowerTable& powers) {
    const std::size_t H = state.memory();
    const Vector g = cost.gradient(dac_surrogate_state(state, powers));
    std::vector<Matrix> grads(H, Matrix(state.blocks.front().rows(), state.blocks.front().cols()));
    for (std::size_t i = 0; i <= H; ++i) {
        const Vector back = transpose_times(powers.a_pow_b[i], g);
        for (std::size_t j = 1; j <= H; ++j) grads[j - 1] += outer(back, state.history[i + j]);
    }
    return grads;
}

/// Scales each block into its Frobenius ball of radius radius * (1-gamma)^i.
inline void dac_project(DacState& state) {
    for (std::size_t i = 0; i < state.memory(); ++i) {
        const double r = state.block_radius(i);
        const double n = state.blocks[i].frobenius_norm();
        if (n > r) state.blocks[i] *= (r > 0.0 ? r / n : 0.0);
    }
}

/// One projected online-gradient step on the surrogate loss f_t(y_t(M)).
template <CostFunction F>
DacState dac_update(DacState state, const F& cost, const PowerTable& powers) {
    const auto grads = dac_surrogate_gradient(state, cost, powers);
    for (std::size_t i = 0; i < state.memory(); ++i) {
        Matrix g = grads[i];
        g *= state.eta_g;
        state.blocks[i] -= g;
    }
    dac_project(state);
    return state;
}

template <CostFunction F>
DacState dac_update(DacState state, const F& cost, const LtiSystem& sys) {
    const PowerTable powers(sys, state.memory());
    return dac_update(std::move(state), cost, powers);
}

// ---------------------------------------------------------------------------
// Controller protocol
// ---------------------------------------------------------------------------

/// One round: act(x_t) -> u_t, then observe(f_t, x_t, x_{t+1}) once the cost
/// is revealed and the plant has moved. Inputs are always inside U.
class Controller {
public:
    virtual ~Controller() = default;
    virtual std::string_view name() const = 0;
    virtual Vector act(const Vector& x) = 0;
    virtual void observe(const CostOracle& cost, const Vector& x, const Vector& x_next) = 0;
};

class OlcController final : public Controller {
public:
    /// Starts at z_1 = Pi_X(x_1).
    OlcController(const LtiSystem& sys, BoxSet u_set, double eta, const Vector& x1)
        : sys_(&sys), proj_(sys, std::move(u_set)) {
        if (!(eta > 0.0)) throw InvalidInput("OLC step size must be positive");
        state_ = OlcState{proj_.project(x1).z, eta};
    }

    std::string_view name() const override { return "olc"; }
    const OlcState& state() const noexcept { return state_; }

    Vector act(const Vector&) override { return proj_.input_set().clamp(olc_act(state_, *sys_)); }

    void observe(const CostOracle& cost, const Vector& x, const Vector&) override {
        state_ = olc_update(state_, cost.gradient(x), proj_);
    }

private:
    const LtiSystem* sys_;
    ManifoldProjector proj_;
    OlcState state_;
};

class DacController final : public Controller {
public:
    DacController(const LtiSystem& sys, BoxSet u_set, std::size_t memory, double eta_g, double radius,
                  double gamma)
        : sys_(&sys), u_set_(std::move(u_set)),
          state_(memory, sys.input_dim(), sys.state_dim(), eta_g, radius, gamma),
          powers_(sys, memory) {}

    std::string_view name() const override { return "dac"; }
    const DacState& state() const noexcept { return state_; }

    Vector act(const Vector&) override {
        last_u_ = dac_act(state_, u_set_);
        return last_u_;
    }

    void observe(const CostOracle& cost, const Vector& x, const Vector& x_next) override {
        state_ = dac_update(std::move(state_), cost, powers_);
        state_.push_disturbance(dac_estimate_disturbance(*sys_, x, last_u_, x_next));
    }

private:
    const LtiSystem* sys_;
    BoxSet u_set_;
    DacState state_;
    PowerTable powers_;
    Vector last_u_;
};

} // namespace olc
