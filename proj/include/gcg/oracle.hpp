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
#include <limits>
#include <vector>

#include <Eigen/Eigenvalues>

#include "gcg/subgrad.hpp"

namespace gcg {

inline constexpr Index kOracleMaxDim = 14;

struct OracleResult {
    enum class Status { Finite, UnboundedBelow };
    Status status = Status::Finite;
    double fStar = 0.0;
    VectorXd xStar;
    long facesEvaluated = 0;
    /// UnboundedBelow only: A d = 0 and F(x + a d) decreases linearly in a.
    VectorXd ray;
};

namespace detail {

struct SubsetSolver {
    MatrixXd pinv;
    MatrixXd nullProj;
};

/// Pseudo-inverse and null-space projector of a small symmetric PSD block.
inline SubsetSolver subset_solver(const MatrixXd& block, double zero_cut) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(block);
    const MatrixXd& v = es.eigenvectors();
    const VectorXd& lam = es.eigenvalues();
    const Index k = block.rows();
    SubsetSolver s;
    s.pinv = MatrixXd::Zero(k, k);
    s.nullProj = MatrixXd::Zero(k, k);
    for (Index j = 0; j < k; ++j) {
        if (lam[j] > zero_cut)
            s.pinv += (1.0 / lam[j]) * v.col(j) * v.col(j).transpose();
        else
            s.nullProj += v.col(j) * v.col(j).transpose();
    }
    return s;
}

}  // namespace detail

/// Exact minimum by enumeration of every sign pattern. For a pattern s on a
/// support S the objective is a quadratic with linear term b_S - tau*s; its
/// minimizer is kept only when it matches s strictly. A pattern whose
/// linear term has a null-space component d that matches s certifies an
/// unbounded ray. Minimal-support arguments make both searches complete.
inline OracleResult oracle_solve(const MatrixXd& a, const VectorXd& b, double tau) {
    const Index n = a.rows();
    if (a.cols() != n || b.size() != n) throw Error(ErrorKind::InvalidInput, "oracle: dimension mismatch");
    if (n > kOracleMaxDim) throw Error(ErrorKind::InvalidInput, "oracle: n is limited to 14");
    if (!(tau >= 0.0)) throw Error(ErrorKind::InvalidInput, "oracle: tau must be >= 0");

    double scale = 0.0;
    if (n > 0) scale = Eigen::SelfAdjointEigenSolver<MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues().cwiseAbs().maxCoeff();
    const double zero_cut = kZeroEigenvalueRel * std::max(scale, 1e-300);
    const double null_tol = 1e-9 * (1.0 + b.lpNorm<Eigen::Infinity>() + tau);

    auto full_obj = [&](const VectorXd& x) { return 0.5 * x.dot(a * x) - b.dot(x) + tau * x.lpNorm<1>(); };

    OracleResult out;
    out.xStar = VectorXd::Zero(n);
    out.fStar = 0.0;
    out.facesEvaluated = 1;
    const unsigned long subsets = 1ul << n;
    for (unsigned long mask = 1; mask < subsets; ++mask) {
        IndexSet s_idx;
        for (Index i = 0; i < n; ++i)
            if (mask >> i & 1ul) s_idx.push_back(i);
        const Index k = static_cast<Index>(s_idx.size());
        MatrixXd block(k, k);
        VectorXd bs(k);
        for (Index p = 0; p < k; ++p) {
            bs[p] = b[s_idx[p]];
            for (Index q = 0; q < k; ++q) block(p, q) = a(s_idx[p], s_idx[q]);
        }
        const detail::SubsetSolver sol = detail::subset_solver(block, zero_cut);
        const unsigned long patterns = 1ul << k;
        VectorXd sign(k);
        for (unsigned long sp = 0; sp < patterns; ++sp) {
            ++out.facesEvaluated;
            for (Index p = 0; p < k; ++p) sign[p] = (sp >> p & 1ul) ? -1.0 : 1.0;
            const VectorXd c = bs - tau * sign;
            const VectorXd d = sol.nullProj * c;
            if (d.lpNorm<Eigen::Infinity>() > null_tol) {
                bool compatible = c.dot(d) > 0.0;
                for (Index p = 0; p < k && compatible; ++p) compatible = sign[p] * d[p] > 0.0;
                if (compatible) {
                    out.status = OracleResult::Status::UnboundedBelow;
                    out.fStar = -std::numeric_limits<double>::infinity();
                    out.ray = VectorXd::Zero(n);
                    for (Index p = 0; p < k; ++p) out.ray[s_idx[p]] = d[p];
                    out.ray /= out.ray.norm();
                    return out;
                }
                continue;
            }
            const VectorXd xs = sol.pinv * c;
            bool feasible = true;
            for (Index p = 0; p < k && feasible; ++p) feasible = sign[p] * xs[p] > 0.0;
            if (!feasible) continue;
            VectorXd x = VectorXd::Zero(n);
            for (Index p = 0; p < k; ++p) x[s_idx[p]] = xs[p];
            const double f = full_obj(x);
            if (f < out.fStar) {
                out.fStar = f;
                out.xStar = std::move(x);
            }
        }
    }
    return out;
}

inline OracleResult oracle_solve(const QpProblem& prob) {
    return oracle_solve(prob.op->to_dense(), prob.b, prob.tau);
}

/// min F over {y : y_i = 0 outside support}; -inf when unbounded there.
inline double face_optimal_value(const QpProblem& prob, const IndexSet& support) {
    const Index k = static_cast<Index>(support.size());
    if (k > kOracleMaxDim) throw Error(ErrorKind::InvalidInput, "face_optimal_value: support is limited to 14");
    const MatrixXd a = prob.op->to_dense();
    MatrixXd block(k, k);
    VectorXd bs(k);
    for (Index p = 0; p < k; ++p) {
        const Index i = support[static_cast<std::size_t>(p)];
        if (i < 0 || i >= prob.dim()) throw Error(ErrorKind::InvalidInput, "face_optimal_value: bad index");
        bs[p] = prob.b[i];
        for (Index q = 0; q < k; ++q) block(p, q) = a(i, support[static_cast<std::size_t>(q)]);
    }
    const OracleResult r = oracle_solve(block, bs, prob.tau);
    return r.fStar;
}

}  // namespace gcg
