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
#include <optional>
#include <vector>

#include "gcg/face.hpp"
#include "gcg/linops.hpp"

namespace gcg {

/// Curvature d'Ad at or below kCurvatureRel * ||A|| * ||d||^2 is treated as 0.
inline constexpr double kCurvatureRel = 1e-12;
/// cg_solve certifies unboundedness with a unit d, ||Ad||_inf <= kUnboundRel * ||A||.
inline constexpr double kUnboundRel = 1e-9;
/// ||Ap||_inf below this (relative) makes cg_solve try to certify p.
inline constexpr double kUnboundTrigger = 1e-6;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// Tolerance used wherever a caller asks for eps = 0.
inline double machine_tolerance(const VectorXd& b) {
    return 1e-13 * (1.0 + (b.size() ? b.lpNorm<Eigen::Infinity>() : 0.0));
}

/// Raised when a quadratic on a face decreases without bound; carries the
/// direction of decrease.
class UnboundedError : public Error {
public:
    UnboundedError(const std::string& what, VectorXd direction)
        : Error(ErrorKind::UnboundedObjective, what), direction_(std::move(direction)) {}

    const VectorXd& direction() const { return direction_; }

private:
    VectorXd direction_;
};

struct CgOutcome {
    enum class Kind { Converged, Unbounded, CapReached };
    Kind kind = Kind::Converged;
    VectorXd x;
    /// Unit-norm direction with A d ~ 0 and r'd < 0 (Unbounded only).
    VectorXd direction;
    /// Residual Ax - b at the returned x.
    VectorXd residual;
    Index iterations = 0;
    double residualNormInf = 0.0;
    long matvecs = 0;
};

namespace detail {

/// Removes the range(A) part of p: z = A^+ (Ap) by CG on the consistent
/// system Az = Ap from 0, then p - z. Empty when nothing is left.
inline std::optional<VectorXd> null_component(const SymPsdOperator& op, const VectorXd& p, const VectorXd& ap,
                                              double norm_a, long& matvecs) {
    const Index n = p.size();
    const double tol = 0.1 * kUnboundRel * norm_a * p.lpNorm<Eigen::Infinity>();
    VectorXd z = VectorXd::Zero(n);
    VectorXd r = -ap;
    VectorXd q = ap;
    VectorXd aq(n);
    double rr = r.squaredNorm();
    for (Index k = 0; k < 2 * (n + 1) && r.lpNorm<Eigen::Infinity>() > tol; ++k) {
        op.apply(q, aq);
        ++matvecs;
        const double curv = q.dot(aq);
        if (!(curv > 0.0)) break;
        const double alpha = rr / curv;
        z += alpha * q;
        r += alpha * aq;
        const double rr_next = r.squaredNorm();
        q = -r + (rr_next / rr) * q;
        rr = rr_next;
    }
    VectorXd d = p - z;
    if (!(d.norm() > 0.5 * p.norm())) return std::nullopt;
    return d;
}

}  // namespace detail

/// CG for min 1/2 x'Ax - b'x with A PSD. Stops with Converged when
/// ||r||_inf <= tol and with Unbounded when the search direction falls into
/// null(A) while the residual is still nonzero.
inline CgOutcome cg_solve(const SymPsdOperator& op, const VectorXd& b, const VectorXd& x0, double tol,
                          Index max_iter = -1) {
    const Index n = op.dim();
    if (b.size() != n || x0.size() != n) throw Error(ErrorKind::InvalidInput, "cg_solve: dimension mismatch");
    if (!(tol > 0.0)) throw Error(ErrorKind::InvalidInput, "cg_solve: tol must be positive");
    if (max_iter < 0) max_iter = 2 * (n + 1);
    const double norm_a = op.norm_estimate();

    CgOutcome out;
    out.x = x0;
    VectorXd r = op.matvec(x0) - b;
    ++out.matvecs;
    VectorXd p = -r;
    VectorXd ap(n);
    double rr = r.squaredNorm();
    for (Index k = 0;; ++k) {
        out.iterations = k;
        out.residualNormInf = r.lpNorm<Eigen::Infinity>();
        if (out.residualNormInf <= tol) {
            out.kind = CgOutcome::Kind::Converged;
            break;
        }
        if (k >= max_iter) {
            out.kind = CgOutcome::Kind::CapReached;
            break;
        }
        op.apply(p, ap);
        ++out.matvecs;
        const double curvature = p.dot(ap);
        const double ap_rel = ap.lpNorm<Eigen::Infinity>() / (norm_a * p.lpNorm<Eigen::Infinity>());
        if (ap_rel <= kUnboundTrigger || !(curvature > 0.0)) {
            // Rounding keeps a small range(A) part in p, so project it out
            // and accept only a direction that passes the certificate.
            VectorXd d = p;
            if (ap_rel > kUnboundRel) {
                if (auto proj = detail::null_component(op, p, ap, norm_a, out.matvecs)) d = std::move(*proj);
            }
            d /= d.norm();
            const VectorXd ad = op.matvec(d);
            ++out.matvecs;
            if ((ad.lpNorm<Eigen::Infinity>() <= kUnboundRel * norm_a && r.dot(d) < 0.0) || !(curvature > 0.0)) {
                out.kind = CgOutcome::Kind::Unbounded;
                out.direction = std::move(d);
                break;
            }
        }
        const double alpha = rr / curvature;
        out.x += alpha * p;
        r += alpha * ap;
        const double rr_next = r.squaredNorm();
        p = -r + (rr_next / rr) * p;
        rr = rr_next;
    }
    out.residual = std::move(r);
    return out;
}

struct RatioTest {
    double alpha = kInf;
    IndexSet blockers;
};

/// Largest alpha with x + alpha*d still on the face; every coordinate that
/// attains the minimum is reported as a blocker.
inline RatioTest ratio_test(const VectorXd& x, const VectorXd& d, const FaceDescriptor& face) {
    if (!face.contains(x)) throw Error(ErrorKind::InvalidState, "ratio_test: x is not on the face");
    if (d.size() != x.size()) throw Error(ErrorKind::InvalidInput, "ratio_test: dimension mismatch");
    RatioTest out;
    for (Index j = 0; j < x.size(); ++j) {
        double ratio = kInf;
        switch (face.role(j)) {
            case FaceRole::Fixed:
                if (d[j] != 0.0) throw Error(ErrorKind::InvalidInput, "ratio_test: d moves a fixed coordinate");
                continue;
            case FaceRole::NonNeg:
                if (d[j] < 0.0) ratio = -x[j] / d[j];
                break;
            case FaceRole::NonPos:
                if (d[j] > 0.0) ratio = -x[j] / d[j];
                break;
        }
        if (ratio == kInf) continue;
        if (ratio < out.alpha) {
            out.alpha = ratio;
            out.blockers.assign(1, j);
        } else if (ratio == out.alpha) {
            out.blockers.push_back(j);
        }
    }
    return out;
}

enum class TpcgStop { BoundaryHit, InteriorTolMet, IterCap };

inline const char* to_string(TpcgStop s) {
    switch (s) {
        case TpcgStop::BoundaryHit: return "BoundaryHit";
        case TpcgStop::InteriorTolMet: return "InteriorTolMet";
        case TpcgStop::IterCap: return "IterCap";
    }
    return "?";
}

struct TpcgRound {
    TpcgStop stop = TpcgStop::InteriorTolMet;
    Index cgIterations = 0;
    Index zeroCount = 0;  ///< |I0(y)| after the round
};

struct TpcgResult {
    VectorXd y;
    TpcgStop stopReason = TpcgStop::InteriorTolMet;
    Index cgIterations = 0;
    /// A y - b + c, updated recursively along the CG steps.
    VectorXd residual;
    /// Coordinates written to exact zero by the final boundary step.
    IndexSet blockers;
    long matvecs = 0;
    /// Per inner TPCG1 call (TPCG2 only; TPCG1 reports itself as one round).
    std::vector<TpcgRound> rounds;
    Index initialFixed = 0;
};

namespace detail {

inline Index zero_count(const VectorXd& x) {
    Index c = 0;
    for (Index i = 0; i < x.size(); ++i) c += x[i] == 0.0;
    return c;
}

}  // namespace detail

/// Truncated projected CG for min q(x) = f(x) + c'x over a face of an orthant.
/// Runs CG on H = {x : x_J0 = 0} from x0 and stops at the first boundary
/// crossing (blocked coordinates become exact zeros) or once the projected
/// residual drops to eps. eps <= 0 means machine_tolerance(b).
inline TpcgResult tpcg1(const SymPsdOperator& op, const VectorXd& b, const VectorXd& c,
                        const FaceDescriptor& face, const VectorXd& x0, double eps, Index max_iter = -1,
                        const VectorXd* initial_residual = nullptr) {
    const Index n = op.dim();
    if (b.size() != n || c.size() != n || x0.size() != n || face.dim() != n)
        throw Error(ErrorKind::InvalidInput, "tpcg1: dimension mismatch");
    if (!face.contains(x0)) throw Error(ErrorKind::InvalidState, "tpcg1: x0 is not on the face");
    if (max_iter < 0) max_iter = 2 * (n + 1);
    const double tol = eps > 0.0 ? eps : machine_tolerance(b);
    const double norm_a = op.norm_estimate();

    TpcgResult out;
    out.initialFixed = face.fixed_count();
    VectorXd x = x0;
    VectorXd r;
    if (initial_residual) {
        r = *initial_residual;
    } else {
        r = op.matvec(x) - b + c;
        ++out.matvecs;
    }
    VectorXd p = r;
    face.project(p);
    auto finish = [&](TpcgStop stop, Index iters) {
        out.stopReason = stop;
        out.cgIterations = iters;
        out.y = std::move(x);
        out.residual = std::move(r);
        out.rounds.push_back({stop, iters, detail::zero_count(out.y)});
        return out;
    };
    if (p.lpNorm<Eigen::Infinity>() <= tol) return finish(TpcgStop::InteriorTolMet, 0);

    VectorXd d = -p;
    VectorXd ad(n);
    double pp = p.squaredNorm();
    for (Index k = 0;; ++k) {
        if (k >= max_iter) return finish(TpcgStop::IterCap, k);
        op.apply(d, ad);
        ++out.matvecs;
        const double curvature = d.dot(ad);
        const double alpha_cg = curvature > kCurvatureRel * norm_a * d.squaredNorm() ? pp / curvature : kInf;
        RatioTest rt = ratio_test(x, d, face);
        if (alpha_cg == kInf && rt.alpha == kInf)
            throw UnboundedError("tpcg1: objective decreases without bound along a direction inside the face",
                                 d / d.norm());
        const double alpha = std::min(alpha_cg, rt.alpha);
        x += alpha * d;
        out.blockers.clear();
        if (alpha == rt.alpha) {
            for (Index j : rt.blockers) x[j] = 0.0;
            out.blockers = rt.blockers;
        }
        // Near-ties can leave a rounding-level value on the wrong side.
        for (Index j = 0; j < n; ++j) {
            const FaceRole role = face.role(j);
            if ((role == FaceRole::NonNeg && x[j] < 0.0) || (role == FaceRole::NonPos && x[j] > 0.0)) {
                x[j] = 0.0;
                out.blockers.push_back(j);
            }
        }
        r += alpha * ad;
        if (alpha_cg > alpha) return finish(TpcgStop::BoundaryHit, k + 1);
        VectorXd p_next = r;
        face.project(p_next);
        if (p_next.lpNorm<Eigen::Infinity>() <= tol) return finish(TpcgStop::InteriorTolMet, k + 1);
        const double pp_next = p_next.squaredNorm();
        d = -p_next + (pp_next / pp) * d;
        pp = pp_next;
    }
}

/// Active-set refinement: repeats TPCG1, shrinking the face to the zero set
/// of the last iterate, until the projected residual is at most eps.
inline TpcgResult tpcg2(const SymPsdOperator& op, const VectorXd& b, const VectorXd& c,
                        const FaceDescriptor& face, const VectorXd& x0, double eps, Index max_iter = -1,
                        const VectorXd* initial_residual = nullptr) {
    const Index n = op.dim();
    if (b.size() != n || c.size() != n || x0.size() != n || face.dim() != n)
        throw Error(ErrorKind::InvalidInput, "tpcg2: dimension mismatch");
    if (!face.contains(x0)) throw Error(ErrorKind::InvalidState, "tpcg2: x0 is not on the face");
    const double tol = eps > 0.0 ? eps : machine_tolerance(b);

    TpcgResult out;
    out.initialFixed = face.fixed_count();
    out.y = x0;
    if (initial_residual) {
        out.residual = *initial_residual;
    } else {
        out.residual = op.matvec(x0) - b + c;
        ++out.matvecs;
    }
    FaceDescriptor current = face;
    const Index round_limit = n + 1 - face.fixed_count();
    for (Index k = 0;; ++k) {
        VectorXd p = out.residual;
        current.project(p);
        if (p.lpNorm<Eigen::Infinity>() <= tol) {
            out.stopReason = TpcgStop::InteriorTolMet;
            return out;
        }
        if (k >= round_limit) {
            out.stopReason = TpcgStop::IterCap;
            return out;
        }
        TpcgResult inner = tpcg1(op, b, c, current, out.y, tol, max_iter, &out.residual);
        out.matvecs += inner.matvecs;
        out.cgIterations += inner.cgIterations;
        out.rounds.push_back(inner.rounds.front());
        out.y = std::move(inner.y);
        out.residual = std::move(inner.residual);
        out.blockers = std::move(inner.blockers);
        if (inner.stopReason != TpcgStop::BoundaryHit) {
            out.stopReason = inner.stopReason;
            return out;
        }
        current = FaceDescriptor::of_point(out.y);
    }
}

/// Iteration bound for one TPCG1 call when the face problem is bounded,
/// using the (sqrt(kappa)-1)/(sqrt(kappa)+1) contraction. Diagnostic only.
inline double tpcg1_iteration_bound(double kappa, double eps, double p0_norm) {
    if (!(eps > 0.0) || !(p0_norm > 0.0)) return -kInf;
    if (kappa <= 1.0) return 1.0;
    const double s = std::sqrt(kappa);
    const double rho = (s - 1.0) / (s + 1.0);
    return std::ceil((std::log(eps) - std::log(2.0 * s * p0_norm)) / std::log(rho));
}

}  // namespace gcg
