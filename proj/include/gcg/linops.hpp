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

#include <algorithm>
#include <cmath>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "gcg/error.hpp"
#include "gcg/random.hpp"

namespace gcg {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using IndexSet = std::vector<Index>;

/// Eigenvalues below this fraction of lambda_max count as zero.
inline constexpr double kZeroEigenvalueRel = 1e-10;

struct SpectralInfo {
    double lambdaMax = 0.0;
    std::optional<double> lambdaMinPos;
    std::optional<double> kappa;
};

/// Symmetric positive semidefinite operator, either stored densely or as the
/// Gram form AbarT*Abar of an m x n matrix that is never materialized.
///
/// The operator is immutable except for a cached spectral-norm estimate.
/// Prime the cache (spectral_norm or norm_estimate) before sharing one
/// instance between threads.
class SymPsdOperator {
public:
    struct DenseSymmetric {
        MatrixXd values;
    };
    struct GramOfMatrix {
        MatrixXd factor;
    };

    static SymPsdOperator dense(MatrixXd a) {
        if (a.rows() != a.cols())
            throw Error(ErrorKind::InvalidInput, "dense operator must be square");
        for (Index j = 0; j < a.cols(); ++j)
            for (Index i = j + 1; i < a.rows(); ++i)
                if (a(i, j) != a(j, i))
                    throw Error(ErrorKind::InvalidInput, "dense operator must be exactly symmetric");
        if (!a.allFinite()) throw Error(ErrorKind::InvalidInput, "operator has non-finite entries");
        return SymPsdOperator(DenseSymmetric{std::move(a)});
    }

    static SymPsdOperator gram(MatrixXd abar) {
        if (!abar.allFinite()) throw Error(ErrorKind::InvalidInput, "matrix has non-finite entries");
        return SymPsdOperator(GramOfMatrix{std::move(abar)});
    }

    static SymPsdOperator identity(Index n) { return dense(MatrixXd::Identity(n, n)); }

    static SymPsdOperator diagonal(const VectorXd& d) { return dense(d.asDiagonal().toDenseMatrix()); }

    Index dim() const {
        return std::visit(
            [](const auto& rep) -> Index {
                using T = std::decay_t<decltype(rep)>;
                if constexpr (std::is_same_v<T, DenseSymmetric>)
                    return rep.values.rows();
                else
                    return rep.factor.cols();
            },
            rep_);
    }

    bool is_gram() const { return std::holds_alternative<GramOfMatrix>(rep_); }

    /// The stored matrix: A itself for dense operators, Abar for Gram ones.
    const MatrixXd& stored() const {
        if (const auto* d = std::get_if<DenseSymmetric>(&rep_)) return d->values;
        return std::get<GramOfMatrix>(rep_).factor;
    }

    void apply(const VectorXd& x, VectorXd& out) const {
        if (x.size() != dim())
            throw Error(ErrorKind::InvalidInput, "matvec dimension mismatch: got " +
                                                     std::to_string(x.size()) + ", expected " +
                                                     std::to_string(dim()));
        if (const auto* d = std::get_if<DenseSymmetric>(&rep_)) {
            out.noalias() = d->values * x;
        } else {
            const auto& f = std::get<GramOfMatrix>(rep_).factor;
            VectorXd inner = f * x;
            out.noalias() = f.transpose() * inner;
        }
    }

    VectorXd matvec(const VectorXd& x) const {
        VectorXd out(dim());
        apply(x, out);
        return out;
    }

    /// Materialized A (tests and small-scale oracles only).
    MatrixXd to_dense() const {
        if (const auto* d = std::get_if<DenseSymmetric>(&rep_)) return d->values;
        const auto& f = std::get<GramOfMatrix>(rep_).factor;
        MatrixXd a = f.transpose() * f;
        // Force exact symmetry so the result is a valid dense operator.
        return 0.5 * (a + a.transpose());
    }

    /// Power iteration estimate of lambda_max from a fixed-seed start vector.
    /// Caches the estimate on the operator.
    double spectral_norm(double tol = 1e-6, int max_iter = 1000) const {
        if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "spectral_norm: tol must be positive");
        const Index n = dim();
        if (n == 0) throw Error(ErrorKind::InvalidInput, "spectral_norm: operator has dimension 0");
        Rng rng(0x5eed5eedULL);
        VectorXd x = rng.normal_vector(n);
        x.normalize();
        VectorXd ax(n);
        double lambda = 0.0;
        for (int it = 0; it < max_iter; ++it) {
            apply(x, ax);
            const double next = x.dot(ax);
            const double axn = ax.norm();
            if (axn == 0.0) {
                lambda = 0.0;
                break;
            }
            const bool settled = it > 0 && std::abs(next - lambda) <= 0.1 * tol * std::max(next, 1.0);
            lambda = next;
            if (settled) break;
            x = ax / axn;
        }
        lambda = std::max(lambda, 0.0);
        norm_cache_ = lambda;
        return lambda;
    }

    /// Cached spectral norm, computed with default settings on first use.
    double norm_estimate() const {
        if (!norm_cache_) spectral_norm();
        return *norm_cache_;
    }

    std::optional<double> cached_norm() const { return norm_cache_; }

    /// Smallest positive eigenvalue, via a full symmetric eigendecomposition
    /// (dense) or the singular values of Abar (Gram).
    double min_positive_eig(double zero_rel = kZeroEigenvalueRel) const {
        const VectorXd eig = eigenvalues();
        const double top = eig.size() > 0 ? eig.maxCoeff() : 0.0;
        if (!(top > 0.0)) throw Error(ErrorKind::DegenerateOperator, "operator is zero");
        double best = top;
        for (Index i = 0; i < eig.size(); ++i)
            if (eig[i] > zero_rel * top) best = std::min(best, eig[i]);
        return best;
    }

    /// All eigenvalues of A in ascending order (dense work, desk scale).
    VectorXd eigenvalues() const {
        if (const auto* d = std::get_if<DenseSymmetric>(&rep_)) {
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(d->values, Eigen::EigenvaluesOnly);
            return es.eigenvalues();
        }
        const auto& f = std::get<GramOfMatrix>(rep_).factor;
        const Index n = f.cols();
        VectorXd sv = Eigen::BDCSVD<MatrixXd>(f).singularValues();
        VectorXd eig = VectorXd::Zero(n);
        for (Index i = 0; i < sv.size(); ++i) eig[i] = sv[i] * sv[i];
        std::sort(eig.data(), eig.data() + n);
        return eig;
    }

    SpectralInfo spectral_info() const {
        SpectralInfo info;
        info.lambdaMax = norm_estimate();
        if (info.lambdaMax > 0.0) {
            info.lambdaMinPos = min_positive_eig();
            info.lambdaMax = std::max(info.lambdaMax, *info.lambdaMinPos);
            info.kappa = std::max(1.0, info.lambdaMax / *info.lambdaMinPos);
        }
        return info;
    }

private:
    using Rep = std::variant<DenseSymmetric, GramOfMatrix>;
    explicit SymPsdOperator(Rep rep) : rep_(std::move(rep)) {}

    Rep rep_;
    mutable std::optional<double> norm_cache_;
};

/// Rows of the returned m x n matrix are an orthonormal basis of range(W),
/// i.e. the result is B^T for an orthonormal basis B of the columns of W.
inline MatrixXd orthonormal_basis(const MatrixXd& w) {
    const Index n = w.rows();
    const Index m = w.cols();
    if (m == 0 || m > n) throw Error(ErrorKind::InvalidInput, "orthonormal_basis: need 0 < cols <= rows");
    Eigen::ColPivHouseholderQR<MatrixXd> qr(w);
    const auto diag = qr.matrixR().diagonal().cwiseAbs();
    const double scale = diag.maxCoeff();
    if (!(scale > 0.0) || diag.minCoeff() < 1e-12 * scale)
        throw Error(ErrorKind::RankDeficient, "orthonormal_basis: columns are numerically dependent");
    MatrixXd q = qr.householderQ() * MatrixXd::Identity(n, m);
    return q.transpose();
}

}  // namespace gcg
