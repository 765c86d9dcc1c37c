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

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "olc/errors.hpp"
#include "olc/linalg.hpp"

namespace olc {

inline constexpr int STABILITY_SCREEN_POWER = 64;
inline constexpr int STABILITY_CHECK_HORIZON = 200;
inline constexpr double STABILITY_MARGIN = 0.05;
inline constexpr double MIN_STATE_BOUND = 1e-12;

/// Plant x_{t+1} = A x_t + B u_t + w_t with A strongly stable.
///
/// Construction rejects any A whose spectral-radius estimate
/// ||A^64||^(1/64) is not below one. The steady-state map
/// S = (I - A)^{-1} B is computed once and cached.
class LtiSystem {
public:
    LtiSystem(Matrix a, Matrix b) : a_(std::move(a)), b_(std::move(b)) {
        if (!a_.is_square()) throw InvalidInput("A must be square");
        if (b_.rows() != a_.rows())
            throw InvalidInput("B must have " + std::to_string(a_.rows()) + " rows, got " +
                               std::to_string(b_.rows()));
        if (b_.cols() == 0) throw InvalidInput("B must have at least one column");
        if (!a_.is_finite() || !b_.is_finite()) throw InvalidInput("system matrices must be finite");
        const double rho = spectral_radius_estimate(a_, STABILITY_SCREEN_POWER);
        if (!(rho < 1.0)) throw NotStronglyStable(rho);
        i_minus_a_ = Matrix::identity(a_.rows()) - a_;
        steady_map_ = solve(i_minus_a_, b_);
    }

    const Matrix& A() const noexcept { return a_; }
    const Matrix& B() const noexcept { return b_; }
    std::size_t state_dim() const noexcept { return a_.rows(); }
    std::size_t input_dim() const noexcept { return b_.cols(); }

    const Matrix& i_minus_a() const noexcept { return i_minus_a_; }
    /// S = (I - A)^{-1} B; maps an input to the state it holds indefinitely.
    const Matrix& steady_state_map() const noexcept { return steady_map_; }

private:
    Matrix a_;
    Matrix b_;
    Matrix i_minus_a_;
    Matrix steady_map_;
};

/// ||A^k|| <= kappa (1 - gamma)^k.
struct StabilityCert {
    double gamma = 1.0;
    double kappa = 1.0;
    double radius_estimate = 0.0;
};

/// Axis-aligned box {v : lower <= v <= upper}.
class BoxSet {
public:
    BoxSet() = default;
    BoxSet(Vector lower, Vector upper) : lower_(std::move(lower)), upper_(std::move(upper)) {
        if (lower_.dim() != upper_.dim()) throw InvalidInput("box bounds have different dimensions");
        if (!lower_.is_finite() || !upper_.is_finite()) throw InvalidInput("box must be bounded");
        for (std::size_t i = 0; i < lower_.dim(); ++i)
            if (lower_[i] > upper_[i])
                throw InvalidInput("box lower bound exceeds upper bound at coordinate " +
                                   std::to_string(i));
    }
    static BoxSet symmetric(std::size_t dim, double half_width) {
        return BoxSet(Vector(dim, -half_width), Vector(dim, half_width));
    }
    static BoxSet point(const Vector& p) { return BoxSet(p, p); }

    std::size_t dim() const noexcept { return lower_.dim(); }
    const Vector& lower() const noexcept { return lower_; }
    const Vector& upper() const noexcept { return upper_; }

    Vector clamp(Vector v) const {
        if (v.dim() != dim()) throw InvalidInput("box clamp dimension mismatch");
        for (std::size_t i = 0; i < dim(); ++i) v[i] = std::clamp(v[i], lower_[i], upper_[i]);
        return v;
    }
    bool contains(const Vector& v, double tol = 0.0) const {
        if (v.dim() != dim()) return false;
        for (std::size_t i = 0; i < dim(); ++i)
            if (v[i] < lower_[i] - tol || v[i] > upper_[i] + tol) return false;
        return true;
    }
    /// Largest Euclidean norm over the box, attained at a corner.
    double max_norm() const {
        double s = 0.0;
        for (std::size_t i = 0; i < dim(); ++i) {
            const double m = std::max(std::abs(lower_[i]), std::abs(upper_[i]));
            s += m * m;
        }
        return std::sqrt(s);
    }
    Vector center() const { return 0.5 * (lower_ + upper_); }

private:
    Vector lower_;
    Vector upper_;
};

struct StateBound {
    double D = MIN_STATE_BOUND;
};

inline Vector step(const LtiSystem& sys, const Vector& x, const Vector& u, const Vector& w) {
    if (x.dim() != sys.state_dim() || u.dim() != sys.input_dim() || w.dim() != sys.state_dim())
        throw InvalidInput("step: dimension mismatch (x " + std::to_string(x.dim()) + ", u " +
                           std::to_string(u.dim()) + ", w " + std::to_string(w.dim()) + ")");
    Vector next = sys.A() * x;
    next += sys.B() * u;
    next += w;
    return next;
}

/// Certifies ||A^k|| <= kappa (1-gamma)^k from the decay of matrix powers.
///
/// gamma = (1 - rho) - 0.05 (1 - rho) with rho = ||A^64||^(1/64), and kappa is
/// the smallest constant satisfying the decay bound for k = 0..200. The zero
/// matrix certifies with gamma = kappa = 1.
inline StabilityCert certify_strong_stability(const Matrix& a) {
    if (!a.is_square()) throw InvalidInput("certify_strong_stability: A must be square");
    const double rho = spectral_radius_estimate(a, STABILITY_SCREEN_POWER);
    if (!(rho < 1.0)) throw NotStronglyStable(rho);
    StabilityCert cert;
    cert.radius_estimate = rho;
    if (a.frobenius_norm() == 0.0) {
        cert.gamma = 1.0;
        cert.kappa = 1.0;
        return cert;
    }
    const double margin = STABILITY_MARGIN * (1.0 - rho);
    cert.gamma = std::clamp(1.0 - rho - margin, std::numeric_limits<double>::min(), 1.0);
    const double log_decay = std::log1p(-cert.gamma);
    double log_kappa = 0.0;
    for_each_power_log_norm(a, STABILITY_CHECK_HORIZON, [&](int k, double log_norm) {
        if (std::isinf(log_norm)) return;
        log_kappa = std::max(log_kappa, log_norm - k * log_decay);
    });
    cert.kappa = std::max(1.0, std::exp(log_kappa));
    return cert;
}

/// Largest k <= horizon violating ||A^k|| <= kappa (1-gamma)^k (relative
/// slack `tol`), or -1 when the certificate holds.
inline int certificate_violation(const Matrix& a, const StabilityCert& cert,
                                 int horizon = STABILITY_CHECK_HORIZON, double tol = 1e-12) {
    int bad = -1;
    const double log_decay = std::log1p(-cert.gamma);
    for_each_power_log_norm(a, horizon, [&](int k, double log_norm) {
        if (std::isinf(log_norm)) return;
        if (cert.gamma >= 1.0 && k > 0) {
            bad = k;
            return;
        }
        const double log_bound = std::log(cert.kappa) + (k == 0 ? 0.0 : k * log_decay);
        if (log_norm > log_bound + std::log1p(tol)) bad = k;
    });
    return bad;
}

/// Steady state held by a constant input: solves (I - A) x = B u.
inline Vector steady_state_of_input(const LtiSystem& sys, const Vector& u) {
    if (u.dim() != sys.input_dim()) throw InvalidInput("steady_state_of_input: input dimension mismatch");
    return solve(sys.i_minus_a(), sys.B() * u);
}

inline double default_reach_tol(const Vector& z) { return 1e-8 * (1.0 + norm(z)); }

/// Minimum-norm u with B u = (I - A) z. Throws UnreachableTarget when z is
/// not on the steady-state manifold (residual above `tol`).
inline Vector input_for_steady_state(const LtiSystem& sys, const Vector& z, double tol) {
    if (z.dim() != sys.state_dim()) throw InvalidInput("input_for_steady_state: state dimension mismatch");
    const Vector rhs = sys.i_minus_a() * z;
    Vector u = solve_least_squares(sys.B(), rhs);
    const double residual = norm(sys.B() * u - rhs);
    if (residual > tol) throw UnreachableTarget(residual, tol);
    return u;
}

inline Vector input_for_steady_state(const LtiSystem& sys, const Vector& z) {
    return input_for_steady_state(sys, z, default_reach_tol(z));
}

/// Trajectory split into the input-driven and disturbance-driven parts.
struct DecomposedTrajectory {
    std::vector<Vector> nominal;     // x̄_t: x̄_1 = x_1, x̄_{t+1} = A x̄_t + B u_t
    std::vector<Vector> disturbance; // x^d_t: x^d_1 = 0, x^d_{t+1} = A x^d_t + w_t
    std::vector<Vector> full;        // x_t = x̄_t + x^d_t
};

/// Simulates T = |u_seq| + 1 steps and returns all three sequences (length T).
inline DecomposedTrajectory simulate_decomposed(const LtiSystem& sys, const Vector& x1,
                                                const std::vector<Vector>& u_seq,
                                                const std::vector<Vector>& w_seq) {
    if (u_seq.size() != w_seq.size())
        throw InvalidInput("simulate_decomposed: " + std::to_string(u_seq.size()) + " inputs but " +
                           std::to_string(w_seq.size()) + " disturbances");
    if (x1.dim() != sys.state_dim()) throw InvalidInput("simulate_decomposed: x1 dimension mismatch");
    const Vector zero_u(sys.input_dim());
    const Vector zero_x(sys.state_dim());
    DecomposedTrajectory out;
    const std::size_t T = u_seq.size() + 1;
    out.nominal.reserve(T);
    out.disturbance.reserve(T);
    out.full.reserve(T);
    out.nominal.push_back(x1);
    out.disturbance.push_back(zero_x);
    out.full.push_back(x1);
    for (std::size_t t = 0; t + 1 < T; ++t) {
        out.nominal.push_back(step(sys, out.nominal.back(), u_seq[t], zero_x));
        out.disturbance.push_back(step(sys, out.disturbance.back(), zero_u, w_seq[t]));
        out.full.push_back(out.nominal.back() + out.disturbance.back());
    }
    return out;
}

/// Plain forward simulation of x_{t+1} = A x_t + B u_t + w_t.
inline std::vector<Vector> simulate(const LtiSystem& sys, const Vector& x1,
                                    const std::vector<Vector>& u_seq,
                                    const std::vector<Vector>& w_seq) {
    if (u_seq.size() != w_seq.size()) throw InvalidInput("simulate: length mismatch");
    std::vector<Vector> xs;
    xs.reserve(u_seq.size() + 1);
    xs.push_back(x1);
    for (std::size_t t = 0; t < u_seq.size(); ++t) xs.push_back(step(sys, xs.back(), u_seq[t], w_seq[t]));
    return xs;
}

/// Uniform state bound D = kappa ||x1|| + (kappa/gamma)(||B|| u_max + w_max),
/// clamped below at 1e-12.
inline StateBound state_bound(const StabilityCert& cert, const LtiSystem& sys, const Vector& x1,
                              const BoxSet& u_set, const BoxSet& w_set) {
    const double u_max = u_set.max_norm();
    const double w_max = w_set.max_norm();
    const double d = cert.kappa * norm(x1) +
                     (cert.kappa / cert.gamma) * (spectral_norm(sys.B()) * u_max + w_max);
    return StateBound{std::max(d, MIN_STATE_BOUND)};
}

} // namespace olc
