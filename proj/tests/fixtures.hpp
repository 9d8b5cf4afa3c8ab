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

#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "gcg/all.hpp"

namespace gcg::fx {

inline VectorXd vec(std::initializer_list<double> v) {
    VectorXd out(static_cast<Index>(v.size()));
    Index i = 0;
    for (double x : v) out[i++] = x;
    return out;
}

inline QpProblem e1() { return QpProblem(SymPsdOperator::diagonal(vec({2, 2})), vec({4, -1}), 1.0); }
inline QpProblem e2() { return QpProblem(SymPsdOperator::dense(MatrixXd::Zero(1, 1)), vec({0.5}), 1.0); }
inline QpProblem e3() { return QpProblem(SymPsdOperator::dense(MatrixXd::Zero(1, 1)), vec({2}), 1.0); }
inline SymPsdOperator e4_op() { return SymPsdOperator::diagonal(vec({1, 0})); }

inline LsqInstance e5() {
    MatrixXd a = MatrixXd::Zero(2, 2);
    a(0, 0) = 1;
    a(1, 1) = 2;
    return LsqInstance(a, vec({3, 2}), 1.0);
}

/// G G' with G n x r standard normal.
inline MatrixXd random_psd(Rng& rng, Index n, Index r) {
    const MatrixXd g = rng.normal_matrix(n, r);
    MatrixXd a = g * g.transpose();
    return 0.5 * (a + a.transpose());
}

/// Q diag(lambda) Q' with Q n x r orthonormal and lambda uniform in [1, 10];
/// *null gets a unit vector orthogonal to range(Q).
inline MatrixXd singular_psd(Rng& rng, Index n, Index r, VectorXd* null = nullptr) {
    const MatrixXd q = orthonormal_basis(rng.normal_matrix(n, r)).transpose();
    VectorXd lam(r);
    for (Index i = 0; i < r; ++i) lam[i] = 1.0 + 9.0 * rng.uniform();
    MatrixXd a = q * lam.asDiagonal() * q.transpose();
    if (null) {
        VectorXd g = rng.normal_vector(n);
        g -= q * (q.transpose() * g);
        g -= q * (q.transpose() * g);
        *null = g.normalized();
    }
    return 0.5 * (a + a.transpose());
}

/// Minimizer of sum_i (a_i/2 x_i^2 - b_i x_i + tau |x_i|) for a_i > 0.
inline VectorXd separable_solution(const VectorXd& a, const VectorXd& b, double tau) {
    VectorXd x(a.size());
    for (Index i = 0; i < a.size(); ++i) {
        const double m = std::abs(b[i]) - tau;
        x[i] = m > 0 ? std::copysign(m, b[i]) / a[i] : 0.0;
    }
    return x;
}

inline double qp_value(const MatrixXd& a, const VectorXd& b, double tau, const VectorXd& x) {
    return 0.5 * x.dot(a * x) - b.dot(x) + tau * x.lpNorm<1>();
}

/// Independent minimum-norm subgradient, written from the definition
/// argmin{|s| : s in grad + tau * d|x|_1}.
inline VectorXd reference_v(const MatrixXd& a, const VectorXd& b, double tau, const VectorXd& x) {
    const VectorXd g = a * x - b;
    VectorXd v(x.size());
    for (Index i = 0; i < x.size(); ++i) {
        if (x[i] != 0.0) {
            v[i] = g[i] + (x[i] > 0 ? tau : -tau);
        } else {
            const double lo = g[i] - tau, hi = g[i] + tau;
            v[i] = lo > 0 ? lo : (hi < 0 ? hi : 0.0);
        }
    }
    return v;
}

}  // namespace gcg::fx
