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
#include <cstdint>
#include <memory>
#include <vector>

#include "gcg/face.hpp"
#include "gcg/linops.hpp"

namespace gcg {

/// min 1/2 x'Ax - b'x + tau*||x||_1 with A symmetric PSD.
struct QpProblem {
    std::shared_ptr<const SymPsdOperator> op;
    VectorXd b;
    double tau = 0.0;

    QpProblem() = default;
    QpProblem(std::shared_ptr<const SymPsdOperator> a, VectorXd rhs, double t)
        : op(std::move(a)), b(std::move(rhs)), tau(t) {
        if (!op) throw Error(ErrorKind::InvalidInput, "problem needs an operator");
        if (b.size() != op->dim()) throw Error(ErrorKind::InvalidInput, "length(b) must equal n");
        if (!(tau >= 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidInput, "tau must be >= 0");
        if (!b.allFinite()) throw Error(ErrorKind::InvalidInput, "b has non-finite entries");
    }

    QpProblem(SymPsdOperator a, VectorXd rhs, double t)
        : QpProblem(std::make_shared<const SymPsdOperator>(std::move(a)), std::move(rhs), t) {}

    Index dim() const { return op->dim(); }

    /// F(x), one matvec.
    double objective(const VectorXd& x) const {
        const VectorXd ax = op->matvec(x);
        return 0.5 * x.dot(ax) - b.dot(x) + tau * x.lpNorm<1>();
    }
};

/// Coordinate classes at a point: I-, I+ for nonzeros, and the split of I0
/// into I0^0, I0^+, I0^- by where 0 sits relative to [grad - tau, grad + tau].
enum class CoordClass : std::uint8_t { Minus, Plus, ZeroInside, ZeroPlus, ZeroMinus };

class IndexPartition {
public:
    IndexPartition() = default;
    explicit IndexPartition(std::vector<CoordClass> cls) : cls_(std::move(cls)) {}

    Index dim() const { return static_cast<Index>(cls_.size()); }
    CoordClass at(Index i) const { return cls_[static_cast<std::size_t>(i)]; }
    bool is_zero(Index i) const { return at(i) != CoordClass::Minus && at(i) != CoordClass::Plus; }

    IndexSet i_minus() const { return collect([](CoordClass c) { return c == CoordClass::Minus; }); }
    IndexSet i_plus() const { return collect([](CoordClass c) { return c == CoordClass::Plus; }); }
    IndexSet i_zero() const {
        return collect([](CoordClass c) { return c != CoordClass::Minus && c != CoordClass::Plus; });
    }
    IndexSet i_nonzero() const {
        return collect([](CoordClass c) { return c == CoordClass::Minus || c == CoordClass::Plus; });
    }
    IndexSet i_zero_inside() const { return collect([](CoordClass c) { return c == CoordClass::ZeroInside; }); }
    IndexSet i_zero_plus() const { return collect([](CoordClass c) { return c == CoordClass::ZeroPlus; }); }
    IndexSet i_zero_minus() const { return collect([](CoordClass c) { return c == CoordClass::ZeroMinus; }); }

    Index zero_count() const {
        Index c = 0;
        for (Index i = 0; i < dim(); ++i) c += is_zero(i);
        return c;
    }

private:
    template <class Pred>
    IndexSet collect(Pred pred) const {
        IndexSet out;
        for (Index i = 0; i < dim(); ++i)
            if (pred(at(i))) out.push_back(i);
        return out;
    }

    std::vector<CoordClass> cls_;
};

/// Everything the solvers need at one point: Ax is kept so later steps can
/// reuse it instead of paying another matvec.
struct EvalPoint {
    VectorXd x;
    VectorXd ax;
    VectorXd grad;
    double fVal = 0.0;
    double fullVal = 0.0;
    VectorXd v;
    IndexPartition partition;
    double tau = 0.0;

    double v_inf() const { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }
};

/// Builds the evaluation from a known product Ax (no matvec).
inline EvalPoint evaluate_with_product(const QpProblem& prob, VectorXd x, VectorXd ax) {
    const Index n = prob.dim();
    if (x.size() != n || ax.size() != n) throw Error(ErrorKind::InvalidInput, "evaluate: dimension mismatch");
    const double tau = prob.tau;
    EvalPoint ep;
    ep.tau = tau;
    ep.grad = ax - prob.b;
    ep.fVal = 0.5 * x.dot(ax) - prob.b.dot(x);
    ep.fullVal = ep.fVal + tau * x.lpNorm<1>();
    ep.v.resize(n);
    std::vector<CoordClass> cls(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) {
        const double g = ep.grad[i];
        CoordClass c;
        if (x[i] > 0.0) {
            c = CoordClass::Plus;
            ep.v[i] = g + tau;
        } else if (x[i] < 0.0) {
            c = CoordClass::Minus;
            ep.v[i] = g - tau;
        } else {
            ep.v[i] = std::min(g + tau, std::max(0.0, g - tau));
            if (g + tau < 0.0)
                c = CoordClass::ZeroPlus;
            else if (g - tau > 0.0)
                c = CoordClass::ZeroMinus;
            else
                c = CoordClass::ZeroInside;
        }
        cls[static_cast<std::size_t>(i)] = c;
    }
    ep.partition = IndexPartition(std::move(cls));
    ep.x = std::move(x);
    ep.ax = std::move(ax);
    return ep;
}

/// One matvec; classifies coordinates with exact comparisons against 0.0.
inline EvalPoint evaluate(const QpProblem& prob, VectorXd x, long* matvecs = nullptr) {
    if (x.size() != prob.dim()) throw Error(ErrorKind::InvalidInput, "evaluate: dimension mismatch");
    VectorXd ax(prob.dim());
    prob.op->apply(x, ax);
    if (matvecs) ++*matvecs;
    return evaluate_with_product(prob, std::move(x), std::move(ax));
}

/// v restricted to the zero coordinates of x.
inline VectorXd projected_subgrad(const EvalPoint& ep) {
    VectorXd vp = VectorXd::Zero(ep.v.size());
    for (Index i = 0; i < vp.size(); ++i)
        if (ep.partition.is_zero(i)) vp[i] = ep.v[i];
    return vp;
}

/// c(x; tau) in {-tau, 0, tau}^n.
inline VectorXd sign_vector_c(const EvalPoint& ep) {
    VectorXd c(ep.v.size());
    for (Index i = 0; i < c.size(); ++i) {
        switch (ep.partition.at(i)) {
            case CoordClass::Plus:
            case CoordClass::ZeroPlus: c[i] = ep.tau; break;
            case CoordClass::Minus:
            case CoordClass::ZeroMinus: c[i] = -ep.tau; break;
            case CoordClass::ZeroInside: c[i] = 0.0; break;
        }
    }
    return c;
}

enum class FaceStyle {
    Released,  ///< (I0^0, I- u I0^-, I+ u I0^+): zeros with a descent sign may move
    Frozen,    ///< (I0, I-, I+): all current zeros stay fixed
};

inline FaceDescriptor face_from_partition(const IndexPartition& p, FaceStyle style) {
    std::vector<FaceRole> roles(static_cast<std::size_t>(p.dim()));
    for (Index i = 0; i < p.dim(); ++i) {
        FaceRole r = FaceRole::Fixed;
        switch (p.at(i)) {
            case CoordClass::Minus: r = FaceRole::NonPos; break;
            case CoordClass::Plus: r = FaceRole::NonNeg; break;
            case CoordClass::ZeroInside: r = FaceRole::Fixed; break;
            case CoordClass::ZeroPlus: r = style == FaceStyle::Released ? FaceRole::NonNeg : FaceRole::Fixed; break;
            case CoordClass::ZeroMinus: r = style == FaceStyle::Released ? FaceRole::NonPos : FaceRole::Fixed; break;
        }
        roles[static_cast<std::size_t>(i)] = r;
    }
    return FaceDescriptor(std::move(roles));
}

}  // namespace gcg
