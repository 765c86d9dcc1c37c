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
#include <concepts>
#include <memory>
#include <span>
#include <vector>

#include "olc/errors.hpp"
#include "olc/linalg.hpp"
#include "olc/rng.hpp"
#include "olc/system.hpp"

namespace olc {

/// Anything with a value and a gradient at a state.
template <class F>
concept CostFunction = requires(const F& f, const Vector& x) {
    { f.value(x) } -> std::convertible_to<double>;
    { f.gradient(x) } -> std::convertible_to<Vector>;
};

/// Type-erased convex cost f(x) with gradient feedback.
class CostOracle {
public:
    virtual ~CostOracle() = default;
    virtual double value(const Vector& x) const = 0;
    virtual Vector gradient(const Vector& x) const = 0;
};

inline constexpr double QUAD_SYMMETRY_TOL = 1e-12;
inline constexpr double QUAD_PSD_TOL = 1e-10;
inline constexpr int QUAD_PSD_SAMPLES = 50;

/// f(x) = (x - c)^T Q (x - c) with Q symmetric positive semidefinite.
class QuadraticCost final : public CostOracle {
public:
    QuadraticCost(Matrix q, Vector c) : q_(std::move(q)), c_(std::move(c)) {
        if (!q_.is_square() || q_.rows() != c_.dim())
            throw InvalidInput("quadratic cost: Q must be square with the dimension of c");
        if (!q_.is_finite() || !c_.is_finite()) throw InvalidInput("quadratic cost: non-finite entries");
        const double scale = std::max(1.0, q_.frobenius_norm());
        for (std::size_t i = 0; i < q_.rows(); ++i)
            for (std::size_t j = i + 1; j < q_.cols(); ++j)
                if (std::abs(q_(i, j) - q_(j, i)) > QUAD_SYMMETRY_TOL * scale)
                    throw InvalidInput("quadratic cost: Q is not symmetric");
        // Rayleigh-quotient spot check for positive semidefiniteness.
        SeededRng rng(0x5eedULL + q_.rows());
        for (int s = 0; s < QUAD_PSD_SAMPLES; ++s) {
            Vector v(q_.rows());
            for (auto& e : v) e = rng.normal();
            const double nv = dot(v, v);
            if (nv == 0.0) continue;
            if (dot(v, q_ * v) / nv < -QUAD_PSD_TOL * scale)
                throw InvalidInput("quadratic cost: Q is not positive semidefinite");
        }
    }

    const Matrix& Q() const noexcept { return q_; }
    const Vector& c() const noexcept { return c_; }
    std::size_t dim() const noexcept { return c_.dim(); }

    double value(const Vector& x) const override {
        check(x);
        const Vector d = x - c_;
        return dot(d, q_ * d);
    }
    Vector gradient(const Vector& x) const override {
        check(x);
        return 2.0 * (q_ * (x - c_));
    }

private:
    void check(const Vector& x) const {
        if (x.dim() != c_.dim())
            throw InvalidInput("quadratic cost: state dimension " + std::to_string(x.dim()) +
                               " does not match " + std::to_string(c_.dim()));
    }

    Matrix q_;
    Vector c_;
};

inline double quad_eval(const QuadraticCost& cost, const Vector& x) { return cost.value(x); }
inline Vector quad_grad(const QuadraticCost& cost, const Vector& x) { return cost.gradient(x); }

/// f(x) = constant; zero gradient.
class ConstantCost final : public CostOracle {
public:
    ConstantCost(std::size_t dim, double level) : dim_(dim), level_(level) {}
    double value(const Vector&) const override { return level_; }
    Vector gradient(const Vector&) const override { return Vector(dim_); }

private:
    std::size_t dim_;
    double level_;
};

/// g(x̄) = f(x̄ + x_d): the cost seen by the disturbance-free copy of the plant.
template <CostFunction F>
class ShiftedCost final : public CostOracle {
public:
    ShiftedCost(F base, Vector shift) : base_(std::move(base)), shift_(std::move(shift)) {}
    double value(const Vector& x) const override { return base_.value(x + shift_); }
    Vector gradient(const Vector& x) const override { return base_.gradient(x + shift_); }
    const Vector& shift() const noexcept { return shift_; }

private:
    F base_;
    Vector shift_;
};

/// Non-owning handle so a cost (possibly abstract) can be stored by value in ShiftedCost.
template <class F>
struct CostRef {
    const F* cost;
    double value(const Vector& x) const { return cost->value(x); }
    Vector gradient(const Vector& x) const { return cost->gradient(x); }
};

using OracleRef = CostRef<CostOracle>;

/// Nominal cost for a disturbance offset x_d. The gradient at x̄ equals the
/// gradient of f at x̄ + x_d, so gradient feedback transfers unchanged.
inline ShiftedCost<OracleRef> nominal_cost(const CostOracle& cost, const Vector& x_d) {
    return ShiftedCost<OracleRef>(OracleRef{&cost}, x_d);
}

/// Quadratic specialization: the nominal cost is again quadratic, centred at c - x_d.
inline QuadraticCost nominal_cost(const QuadraticCost& cost, const Vector& x_d) {
    if (x_d.dim() != cost.dim()) throw InvalidInput("nominal_cost: shift dimension mismatch");
    return QuadraticCost(cost.Q(), cost.c() - x_d);
}

struct SmoothnessParams {
    double L = 0.0;
    double D = 0.0;
};

/// L = 2 max_t ||Q_t|| (D + c_bound) / D, so that ||grad f_t(x)|| <= L D on
/// the ball ||x|| <= D whenever ||c_t|| <= c_bound.
inline SmoothnessParams smoothness_constant(std::span<const QuadraticCost> costs, const StateBound& bound,
                                            double c_bound) {
    if (costs.empty()) throw InvalidInput("smoothness_constant: empty cost sequence");
    if (!(bound.D > 0.0)) throw InvalidInput("smoothness_constant: D must be positive");
    if (c_bound < 0.0) throw InvalidInput("smoothness_constant: c bound must be non-negative");
    double q_max = 0.0;
    for (const auto& f : costs) q_max = std::max(q_max, spectral_norm(f.Q()));
    SmoothnessParams p;
    p.D = bound.D;
    p.L = 2.0 * q_max * (bound.D + c_bound) / bound.D;
    if (!(p.L > 0.0)) p.L = std::numeric_limits<double>::min();
    return p;
}

inline double default_fd_step(const Vector& x) { return 1e-5 * (1.0 + norm(x)); }

/// Central finite-difference gradient; used as a test oracle.
template <CostFunction F>
Vector finite_diff_grad(const F& f, const Vector& x, double h) {
    if (!(h > 0.0)) throw InvalidInput("finite_diff_grad: step must be positive");
    Vector g(x.dim());
    Vector probe = x;
    for (std::size_t i = 0; i < x.dim(); ++i) {
        probe[i] = x[i] + h;
        const double fp = f.value(probe);
        probe[i] = x[i] - h;
        const double fm = f.value(probe);
        probe[i] = x[i];
        g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
}

template <CostFunction F>
Vector finite_diff_grad(const F& f, const Vector& x) {
    return finite_diff_grad(f, x, default_fd_step(x));
}

} // namespace olc
