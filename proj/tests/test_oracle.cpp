// Copyright 2026 The gcg-l1 Authors
//
//    Licensed under the Apache License, Version 2.0 (the "License");
//    you may not use this file except in compliance with the License.
//    You may obtain a copy of the License at
//
//        http://www.apache.org/licenses/LICENSE-2.0
//
//    Unless required by applicable law or agreed to in writing, software
//    distributed under the License is distributed on an "AS IS" BASIS,
//    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
//    See the License for the specific language governing permissions and
//    limitations under the License.

#include <cmath>

#include <gtest/gtest.h>

#include "fixtures.hpp"

using namespace gcg;
using gcg::fx::vec;

TEST(Oracle, E1) {
    const OracleResult o = oracle_solve(fx::e1());
    ASSERT_EQ(o.status, OracleResult::Status::Finite);
    EXPECT_DOUBLE_EQ(o.fStar, -2.25);
    EXPECT_LE((o.xStar - vec({1.5, 0})).norm(), 1e-14);
}

TEST(Oracle, E2IsZero) {
    const OracleResult o = oracle_solve(fx::e2());
    EXPECT_EQ(o.status, OracleResult::Status::Finite);
    EXPECT_EQ(o.fStar, 0.0);
    EXPECT_EQ(o.xStar, VectorXd::Zero(1));
}

TEST(Oracle, E3Ray) {
    const OracleResult o = oracle_solve(fx::e3());
    ASSERT_EQ(o.status, OracleResult::Status::UnboundedBelow);
    EXPECT_EQ(o.ray, vec({1}));
    EXPECT_TRUE(std::isinf(o.fStar));
}

TEST(Oracle, E5) {
    const OracleResult o = oracle_solve(fx::e5().problem());
    EXPECT_NEAR(o.fStar, 3.375 - 6.5, 1e-14);
    EXPECT_LE((o.xStar - vec({2, 0.75})).norm(), 1e-14);
}

TEST(Oracle, TooLarge) {
    EXPECT_THROW(oracle_solve(MatrixXd::Identity(15, 15), VectorXd::Zero(15), 1.0), Error);
    EXPECT_THROW(oracle_solve(MatrixXd::Identity(2, 2), VectorXd::Zero(3), 1.0), Error);
    EXPECT_THROW(oracle_solve(MatrixXd::Identity(2, 2), VectorXd::Zero(2), -1.0), Error);
}

TEST(Oracle, RayWithMixedSigns) {
    // A = 0 on the last two coordinates; b there exceeds tau with opposite signs.
    MatrixXd a = MatrixXd::Zero(3, 3);
    a(0, 0) = 1.0;
    const OracleResult o = oracle_solve(a, vec({1, 3, -2}), 1.0);
    ASSERT_EQ(o.status, OracleResult::Status::UnboundedBelow);
    EXPECT_LE((a * o.ray).norm(), 1e-14);
    // Either unbounded coordinate alone is a valid ray; signs must follow b.
    EXPECT_GE(o.ray[1], 0.0);
    EXPECT_LE(o.ray[2], 0.0);
    // F decreases affinely along the ray.
    const double f1 = fx::qp_value(a, vec({1, 3, -2}), 1.0, o.ray);
    const double f2 = fx::qp_value(a, vec({1, 3, -2}), 1.0, 2.0 * o.ray);
    EXPECT_LT(f1, 0.0);
    EXPECT_NEAR(f2, 2.0 * f1, 1e-12);
}

TEST(Oracle, BoundedWhenLinearTermIsDominated) {
    // Null direction (1, -1) but |b| <= tau keeps F bounded.
    MatrixXd a(2, 2);
    a << 1, 1, 1, 1;
    const OracleResult o = oracle_solve(a, vec({0.5, 0.5}), 1.0);
    EXPECT_EQ(o.status, OracleResult::Status::Finite);
    EXPECT_EQ(o.fStar, 0.0);
}

TEST(FaceOptimalValue, Examples) {
    EXPECT_DOUBLE_EQ(face_optimal_value(fx::e1(), {0}), -2.25);
    EXPECT_EQ(face_optimal_value(fx::e1(), {}), 0.0);
    EXPECT_EQ(face_optimal_value(fx::e1(), {1}), 0.0);
    EXPECT_TRUE(std::isinf(face_optimal_value(fx::e3(), {0})));
    EXPECT_THROW(face_optimal_value(fx::e1(), {2}), Error);
}

TEST(OracleProperty, SeparableMatchesClosedForm) {
    Rng rng(70);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 1 + trial % 8;
        VectorXd d(n);
        for (Index i = 0; i < n; ++i) d[i] = 0.5 + 2.0 * rng.uniform();
        const VectorXd b = rng.normal_vector(n) * 2.0;
        const double tau = 0.7;
        const OracleResult o = oracle_solve(d.asDiagonal().toDenseMatrix(), b, tau);
        const VectorXd x = fx::separable_solution(d, b, tau);
        EXPECT_LE((o.xStar - x).lpNorm<Eigen::Infinity>(), 1e-12);
        EXPECT_NEAR(o.fStar, fx::qp_value(d.asDiagonal().toDenseMatrix(), b, tau, x), 1e-12);
    }
}

TEST(OracleProperty, SmoothCaseMatchesLinearSolve) {
    Rng rng(71);
    for (int trial = 0; trial < 20; ++trial) {
        const Index n = 1 + trial % 7;
        const MatrixXd a = fx::random_psd(rng, n, n) + MatrixXd::Identity(n, n);
        const VectorXd b = rng.normal_vector(n);
        const OracleResult o = oracle_solve(a, b, 0.0);
        const VectorXd x = a.ldlt().solve(b);
        EXPECT_LE((o.xStar - x).lpNorm<Eigen::Infinity>(), 1e-9);
        EXPECT_NEAR(o.fStar, -0.5 * b.dot(x), 1e-9 * (1 + std::abs(o.fStar)));
    }
}

TEST(OracleProperty, MinimumAndStationarity) {
    Rng rng(72);
    for (int trial = 0; trial < 30; ++trial) {
        const Index n = 2 + trial % 8;
        const MatrixXd a = fx::random_psd(rng, n, 1 + trial % n);
        const VectorXd b = a * rng.normal_vector(n) + 0.05 * rng.normal_vector(n);
        const double tau = 0.3;
        const OracleResult o = oracle_solve(a, b, tau);
        if (o.status == OracleResult::Status::UnboundedBelow) {
            EXPECT_LE((a * o.ray).lpNorm<Eigen::Infinity>(), 1e-8 * (1 + a.norm()));
            EXPECT_LT(fx::qp_value(a, b, tau, o.ray), 0.0);
            continue;
        }
        EXPECT_LE(fx::reference_v(a, b, tau, o.xStar).lpNorm<Eigen::Infinity>(), 1e-9);
        for (int k = 0; k < 1000; ++k) {
            const VectorXd x = rng.normal_vector(n) * (k % 2 ? 0.1 : 3.0) + o.xStar;
            EXPECT_LE(o.fStar, fx::qp_value(a, b, tau, x) + 1e-10 * (1 + std::abs(o.fStar)));
        }
    }
}
