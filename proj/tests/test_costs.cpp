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

#include "test_support.hpp"

namespace olc {
namespace {

using testing::random_quadratic;
using testing::random_vector;

TEST(QuadraticCost, ValueExamples) {
    EXPECT_DOUBLE_EQ(quad_eval(QuadraticCost(Matrix::identity(2), Vector(2)), Vector{3, 4}), 25.0);
    const QuadraticCost f(Matrix::diag(Vector{1, 2}), Vector{1, 0});
    EXPECT_DOUBLE_EQ(quad_eval(f, Vector{1, 0}), 0.0);
    EXPECT_DOUBLE_EQ(quad_eval(f, Vector{0, 1}), 3.0);
}

TEST(QuadraticCost, GradientExamples) {
    const QuadraticCost f(Matrix::diag(Vector{1, 2}), Vector{1, 0});
    EXPECT_EQ(norm(quad_grad(f, Vector{1, 0})), 0.0);
    EXPECT_EQ(quad_grad(QuadraticCost(Matrix::identity(2), Vector(2)), Vector{1, 1}), (Vector{2, 2}));
    EXPECT_EQ(quad_grad(QuadraticCost(Matrix::diag(Vector{1, 2}), Vector(2)), Vector{1, 1}), (Vector{2, 4}));
}

TEST(QuadraticCost, DimensionMismatchThrows) {
    const QuadraticCost f(Matrix::identity(2), Vector(2));
    EXPECT_THROW(quad_eval(f, Vector(3)), InvalidInput);
    EXPECT_THROW(quad_grad(f, Vector(1)), InvalidInput);
}

TEST(QuadraticCost, RejectsAsymmetricOrIndefinite) {
    EXPECT_THROW(QuadraticCost(Matrix{{1, 1}, {0, 1}}, Vector(2)), InvalidInput);
    EXPECT_THROW(QuadraticCost(Matrix::diag(Vector{1, -1}), Vector(2)), InvalidInput);
    EXPECT_NO_THROW(QuadraticCost(Matrix(2, 2), Vector(2)));
}

TEST(QuadraticCost, ConvexAlongRandomTriples) {
    SeededRng rng(31);
    for (int i = 0; i < 20; ++i) {
        const auto f = random_quadratic(rng, 3, 5.0);
        for (int j = 0; j < 50; ++j) {
            const Vector x = random_vector(rng, 3, 10.0);
            const Vector y = random_vector(rng, 3, 10.0);
            const double l = rng.uniform();
            const double lhs = f.value(l * x + (1.0 - l) * y);
            const double rhs = l * f.value(x) + (1.0 - l) * f.value(y);
            EXPECT_LE(lhs, rhs + 1e-9 * (1.0 + std::abs(rhs)));
        }
    }
}

TEST(NominalCost, ZeroShiftIsIdentity) {
    SeededRng rng(32);
    const auto f = random_quadratic(rng, 3);
    const auto g = nominal_cost(static_cast<const CostOracle&>(f), Vector(3));
    for (int i = 0; i < 20; ++i) {
        const Vector x = random_vector(rng, 3, 5.0);
        EXPECT_EQ(g.value(x), f.value(x));
        EXPECT_EQ(g.gradient(x), f.gradient(x));
    }
}

TEST(NominalCost, QuadraticShiftMovesCenter) {
    SeededRng rng(33);
    const auto f = random_quadratic(rng, 3);
    const Vector xd = random_vector(rng, 3, 2.0);
    const QuadraticCost g = nominal_cost(f, xd);
    EXPECT_LT(distance(g.c(), f.c() - xd), 1e-15);
    for (int i = 0; i < 50; ++i) {
        const Vector xbar = random_vector(rng, 3, 5.0);
        const double fx = f.value(xbar + xd);
        EXPECT_NEAR(g.value(xbar), fx, 1e-12 * std::max(1.0, std::abs(fx)));
        EXPECT_LE(distance(g.gradient(xbar), f.gradient(xbar + xd)), 1e-12 * std::max(1.0, norm(f.gradient(xbar + xd))));
    }
}

TEST(NominalCost, GenericOracleShift) {
    SeededRng rng(34);
    const auto f = random_quadratic(rng, 3);
    const Vector xd = random_vector(rng, 3);
    const auto g = nominal_cost(static_cast<const CostOracle&>(f), xd);
    const Vector xbar = random_vector(rng, 3);
    EXPECT_EQ(g.value(xbar), f.value(xbar + xd));
    EXPECT_EQ(g.gradient(xbar), f.gradient(xbar + xd));
}

TEST(Smoothness, UnitExample) {
    const std::vector<QuadraticCost> costs{QuadraticCost(Matrix::identity(2), Vector(2))};
    const auto p = smoothness_constant(costs, StateBound{1.0}, 0.0);
    EXPECT_NEAR(p.L, 2.0, 1e-10);
    EXPECT_DOUBLE_EQ(p.D, 1.0);
}

TEST(Smoothness, EmptySequenceThrows) {
    EXPECT_THROW(smoothness_constant(std::vector<QuadraticCost>{}, StateBound{1.0}, 0.0), InvalidInput);
}

TEST(Smoothness, GradientBoundOnBall) {
    SeededRng rng(35);
    const double c_bound = 3.0 * std::sqrt(3.0);
    std::vector<QuadraticCost> costs;
    for (int i = 0; i < 20; ++i) costs.push_back(random_quadratic(rng, 3, 3.0));
    const StateBound bound{4.0};
    const auto p = smoothness_constant(costs, bound, c_bound);
    for (const auto& f : costs)
        for (int j = 0; j < 100; ++j) {
            Vector x = random_vector(rng, 3);
            x *= bound.D * rng.uniform() / std::max(norm(x), 1e-12);
            EXPECT_LE(norm(f.gradient(x)), p.L * p.D * (1.0 + 1e-12));
        }
}

TEST(FiniteDiff, QuadraticExact) {
    const QuadraticCost f(Matrix::identity(2), Vector(2));
    const Vector g = finite_diff_grad(f, Vector{1, 0}, 1e-5);
    EXPECT_NEAR(g[0], 2.0, 1e-8);
    EXPECT_NEAR(g[1], 0.0, 1e-8);
}

TEST(FiniteDiff, ConstantOracle) {
    const ConstantCost f(3, 7.5);
    EXPECT_EQ(norm(finite_diff_grad(f, Vector{1, 2, 3})), 0.0);
    EXPECT_EQ(norm(f.gradient(Vector{1, 2, 3})), 0.0);
}

TEST(FiniteDiff, MatchesAnalyticGradient) {
    SeededRng rng(36);
    for (int i = 0; i < 50; ++i) {
        const auto f = random_quadratic(rng, 4, 5.0);
        const Vector x = random_vector(rng, 4, 5.0);
        EXPECT_LE(testing::rel_error(finite_diff_grad(f, x), f.gradient(x)), 1e-6);
    }
}

TEST(FiniteDiff, RejectsNonPositiveStep) {
    const ConstantCost f(1, 0.0);
    EXPECT_THROW(finite_diff_grad(f, Vector{0.0}, 0.0), InvalidInput);
}

} // namespace
} // namespace olc
