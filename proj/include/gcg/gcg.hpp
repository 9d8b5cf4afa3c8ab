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
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gcg/cg_core.hpp"
#include "gcg/solve_result.hpp"
#include "gcg/subgrad.hpp"

namespace gcg {

enum class GcgMethod { Gcg1, Gcg2, Gcg2v, Gcg3, Gcg4 };

inline const char* to_string(GcgMethod m) {
    switch (m) {
        case GcgMethod::Gcg1: return "gcg1";
        case GcgMethod::Gcg2: return "gcg2";
        case GcgMethod::Gcg2v: return "gcg2v";
        case GcgMethod::Gcg3: return "gcg3";
        case GcgMethod::Gcg4: return "gcg4";
    }
    return "?";
}

struct GcgConfig {
    /// Stop once ||v||_inf <= eps; 0 means epsMachine.
    double eps = 1e-8;
    /// Starting eta (fixed eta for Gcg2). Defaults to kappa(A), or 1 for A = 0.
    std::optional<double> eta0;
    double rho = 10.0;
    double xi = 0.5;
    /// Gcg4 step. Defaults to 2 / (||A|| + 1e-4 * max(1, ||A||)).
    std::optional<double> t;
    /// 0 means 50 * (n + 1).
    long iterCap = 0;
    /// Defaults to machine_tolerance(b).
    std::optional<double> epsMachine;
    int maxEtaRaises = 60;
    bool recordTrace = true;
    /// Keeps zero sets and per-round TPCG zero counts in the trace.
    bool recordSupports = false;

    void validate() const {
        if (!(eps >= 0.0) || !std::isfinite(eps)) throw Error(ErrorKind::InvalidInput, "eps must be >= 0");
        if (eta0 && !(*eta0 > 0.0 && std::isfinite(*eta0))) throw Error(ErrorKind::InvalidInput, "eta0 must be > 0");
        if (!(rho > 1.0) || !std::isfinite(rho)) throw Error(ErrorKind::InvalidInput, "rho must be > 1");
        if (!(xi > 0.0 && xi < 1.0)) throw Error(ErrorKind::InvalidInput, "xi must lie in (0, 1)");
        if (t && !(*t > 0.0 && std::isfinite(*t))) throw Error(ErrorKind::InvalidInput, "t must be > 0");
        if (iterCap < 0) throw Error(ErrorKind::InvalidInput, "iterCap must be >= 1");
        if (epsMachine && !(*epsMachine > 0.0)) throw Error(ErrorKind::InvalidInput, "epsMachine must be > 0");
        if (maxEtaRaises < 0) throw Error(ErrorKind::InvalidInput, "maxEtaRaises must be >= 0");
    }
};

/// The family C of zero sets seen since the last eta raise.
class SupportFamily {
public:
    explicit SupportFamily(Index n) : n_(n), words_(static_cast<std::size_t>((n + 63) / 64)) {}

    Index dim() const { return n_; }
    std::size_t size() const { return members_.size(); }
    bool empty() const { return members_.empty(); }
    void clear() { members_.clear(); }

    /// Returns false when the set is already a member.
    bool insert(const IndexSet& s) {
        Mask m = to_mask(s);
        for (const Mask& e : members_)
            if (e == m) return false;
        members_.push_back(std::move(m));
        return true;
    }

    /// True iff some member is a subset of s.
    bool any_subset_of(const IndexSet& s) const {
        const Mask m = to_mask(s);
        for (const Mask& e : members_) {
            bool sub = true;
            for (std::size_t w = 0; w < words_ && sub; ++w) sub = (e[w] & m[w]) == e[w];
            if (sub) return true;
        }
        return false;
    }

private:
    using Mask = std::vector<std::uint64_t>;

    Mask to_mask(const IndexSet& s) const {
        Mask m(words_, 0);
        for (Index i : s) {
            if (i < 0 || i >= n_) throw Error(ErrorKind::InvalidInput, "SupportFamily: index out of range");
            m[static_cast<std::size_t>(i / 64)] |= std::uint64_t{1} << (i % 64);
        }
        return m;
    }

    Index n_;
    std::size_t words_;
    std::vector<Mask> members_;
};

/// Strict: ||v_I0|| > sqrt(eta) * ||v_I0c||.
inline bool measure_test(const EvalPoint& ep, double eta) {
    if (!(eta > 0.0)) throw Error(ErrorKind::InvalidInput, "measure_test: eta must be > 0");
    double zero_sq = 0.0;
    double rest_sq = 0.0;
    for (Index i = 0; i < ep.v.size(); ++i) {
        const double s = ep.v[i] * ep.v[i];
        (ep.partition.is_zero(i) ? zero_sq : rest_sq) += s;
    }
    return std::sqrt(zero_sq) > std::sqrt(eta) * std::sqrt(rest_sq);
}

struct LineSearchOutcome {
    bool unbounded = false;
    double alpha = 0.0;
    /// ||vp||^4 / (2 vp'A vp)
    double predictedDecrease = 0.0;
    VectorXd vp;
    std::optional<EvalPoint> next;
};

/// Exact minimization of F along -vp. Ax at the new point comes from
/// linearity, so the only matvec is A*vp.
inline LineSearchOutcome line_search_step(const QpProblem& prob, const EvalPoint& ep, long* matvecs = nullptr) {
    LineSearchOutcome out;
    out.vp = projected_subgrad(ep);
    const double vv = out.vp.squaredNorm();
    if (!(vv > 0.0)) throw Error(ErrorKind::InvalidInput, "line_search_step: vp is zero");
    const VectorXd avp = prob.op->matvec(out.vp);
    if (matvecs) ++*matvecs;
    const double curvature = out.vp.dot(avp);
    if (!(curvature > kCurvatureRel * prob.op->norm_estimate() * vv)) {
        out.unbounded = true;
        return out;
    }
    out.alpha = vv / curvature;
    out.predictedDecrease = vv * vv / (2.0 * curvature);
    VectorXd x = ep.x;
    for (Index i = 0; i < x.size(); ++i)
        if (out.vp[i] != 0.0) x[i] -= out.alpha * out.vp[i];
    VectorXd ax = ep.ax - out.alpha * avp;
    out.next = evaluate_with_product(prob, std::move(x), std::move(ax));
    return out;
}

/// Soft-threshold of y - t*grad on the support, exact zeros elsewhere.
inline VectorXd subspace_soft_threshold(const VectorXd& y, const VectorXd& grad, double t, double tau,
                                        const IndexSet& support) {
    if (y.size() != grad.size()) throw Error(ErrorKind::InvalidInput, "soft-threshold: dimension mismatch");
    if (!(t > 0.0)) throw Error(ErrorKind::InvalidInput, "soft-threshold: t must be > 0");
    VectorXd x = VectorXd::Zero(y.size());
    const double thr = t * tau;
    for (Index i : support) {
        const double a = y[i] - t * grad[i];
        const double mag = std::abs(a) - thr;
        x[i] = mag > 0.0 ? std::copysign(mag, a) : 0.0;
    }
    return x;
}

/// Largest valid default step for Gcg4 given ||A||.
inline double default_prox_step(double norm_a) { return 2.0 / (norm_a + 1e-4 * std::max(1.0, norm_a)); }

/// kappa(A) = lambda_max / lambda_min^+, or 1 for the zero operator.
inline double default_eta0(const SymPsdOperator& op) {
    const SpectralInfo info = op.spectral_info();
    return info.kappa ? std::max(1.0, *info.kappa) : 1.0;
}

/// Called once per outer iteration before the step; returning true stops the
/// run with TolReached.
using OuterHook = std::function<bool(const EvalPoint&)>;

namespace detail {

inline void count_tpcg(SolveCounters& c, const TpcgResult& tp) {
    ++c.tpcgCalls;
    c.tpcgRounds += static_cast<long>(tp.rounds.size());
    c.cgIters += static_cast<long>(tp.cgIterations);
    c.matvecs += tp.matvecs;
    bool capped = tp.stopReason == TpcgStop::IterCap;
    for (const auto& r : tp.rounds) capped = capped || r.stop == TpcgStop::IterCap;
    c.tpcgIterCaps += capped;
}

}  // namespace detail

inline SolveResult solve_gcg(GcgMethod method, const QpProblem& prob, const VectorXd& x0, const GcgConfig& cfg,
                             const OuterHook& hook = {}) {
    cfg.validate();
    const Index n = prob.dim();
    if (x0.size() != n) throw Error(ErrorKind::InvalidInput, "x0 has the wrong length");
    if (!x0.allFinite()) throw Error(ErrorKind::InvalidInput, "x0 has non-finite entries");
    const SymPsdOperator& op = *prob.op;
    const double norm_a = n > 0 ? op.norm_estimate() : 0.0;
    const double eps_machine = cfg.epsMachine.value_or(machine_tolerance(prob.b));
    const double eps = cfg.eps > 0.0 ? cfg.eps : eps_machine;
    const long cap = cfg.iterCap > 0 ? cfg.iterCap : 50 * (static_cast<long>(n) + 1);
    double eta = 0.0;
    if (method != GcgMethod::Gcg1 && n > 0) eta = cfg.eta0 ? *cfg.eta0 : default_eta0(op);
    double t = 0.0;
    if (method == GcgMethod::Gcg4) {
        t = cfg.t.value_or(default_prox_step(norm_a));
        if (norm_a > 0.0 && !(t < 2.0 / norm_a))
            throw Error(ErrorKind::InvalidInput, "t must lie in (0, 2/||A||)");
    }
    double eps_hat = eps;
    const bool uses_family = method == GcgMethod::Gcg2v || method == GcgMethod::Gcg3 || method == GcgMethod::Gcg4;
    SupportFamily family(n);

    SolveResult res;
    SolveCounters& cnt = res.counters;
    EvalPoint ep = evaluate(prob, x0, &cnt.matvecs);
    res.F0 = ep.fullVal;

    auto push = [&](StepKind kind, const EvalPoint& at, double f_prev, double detail,
                    const TpcgResult* tp) {
        if (!cfg.recordTrace) return;
        IterRecord r;
        r.k = cnt.outerIters;
        r.step = kind;
        r.F = at.fullVal;
        r.vInf = at.v_inf();
        r.supp = at.partition.zero_count();
        r.eta = eta;
        r.epsHat = eps_hat;
        r.fPrev = f_prev;
        r.detail = detail;
        if (cfg.recordSupports) {
            r.zeroSet = at.partition.i_zero();
            if (tp) {
                for (const auto& round : tp->rounds) {
                    r.tpcgZeroCounts.push_back(round.zeroCount);
                    r.tpcgBoundary.push_back(round.stop == TpcgStop::BoundaryHit);
                }
                r.tpcgInitialFixed = tp->initialFixed;
            }
        }
        res.trace.push_back(std::move(r));
    };
    auto finish = [&](Status s, std::string msg = {}) {
        res.x = ep.x;
        res.FValue = ep.fullVal;
        res.vInfNorm = ep.v_inf();
        res.status = s;
        res.etaFinal = eta;
        res.message = std::move(msg);
        return res;
    };

    for (;;) {
        const double v_inf = ep.v_inf();
        if (v_inf <= eps) return finish(v_inf <= eps_machine ? Status::Optimal : Status::TolReached);
        if (hook && hook(ep)) return finish(Status::TolReached, "stopped by caller");
        if (cnt.outerIters >= cap) return finish(Status::CapReached, "outer iteration cap reached");
        ++cnt.outerIters;
        try {
            const VectorXd c = sign_vector_c(ep);
            const VectorXd r0 = ep.grad + c;
            if (method == GcgMethod::Gcg1) {
                const FaceDescriptor face = face_from_partition(ep.partition, FaceStyle::Released);
                const TpcgResult tp = tpcg2(op, prob.b, c, face, ep.x, eps_machine, -1, &r0);
                detail::count_tpcg(cnt, tp);
                const double f_prev = ep.fullVal;
                ep = evaluate(prob, tp.y, &cnt.matvecs);
                push(StepKind::Tpcg, ep, f_prev, 0.0, &tp);
                continue;
            }
            if (measure_test(ep, eta)) {
                if (method == GcgMethod::Gcg4) eps_hat = eps;
                if (uses_family) {
                    const IndexSet zeros = ep.partition.i_zero();
                    if (family.any_subset_of(zeros)) {
                        if (cnt.etaRaises >= cfg.maxEtaRaises)
                            return finish(Status::CapReached, "eta raise cap reached");
                        eta *= cfg.rho;
                        family.clear();
                        ++cnt.etaRaises;
                        push(StepKind::EtaRaise, ep, ep.fullVal, 0.0, nullptr);
                        continue;
                    }
                    family.insert(zeros);
                }
                LineSearchOutcome ls = line_search_step(prob, ep, &cnt.matvecs);
                if (ls.unbounded) {
                    res.ray = -ls.vp / ls.vp.norm();
                    return finish(Status::Unbounded, "objective unbounded along -vp");
                }
                ++cnt.lineSearchSteps;
                const double f_prev = ep.fullVal;
                ep = std::move(*ls.next);
                push(StepKind::LineSearch, ep, f_prev, ls.predictedDecrease, nullptr);
                continue;
            }
            const double scale = std::max(std::sqrt(static_cast<double>(n) * eta), 1.0);
            const double f_prev = ep.fullVal;
            if (method == GcgMethod::Gcg2 || method == GcgMethod::Gcg2v) {
                const FaceDescriptor face = face_from_partition(ep.partition, FaceStyle::Released);
                const TpcgResult tp = tpcg2(op, prob.b, c, face, ep.x, eps / scale, -1, &r0);
                detail::count_tpcg(cnt, tp);
                ep = evaluate(prob, tp.y, &cnt.matvecs);
                push(StepKind::Tpcg, ep, f_prev, 0.0, &tp);
            } else if (method == GcgMethod::Gcg3) {
                const FaceDescriptor face = face_from_partition(ep.partition, FaceStyle::Frozen);
                const TpcgResult tp = tpcg1(op, prob.b, c, face, ep.x, eps / scale, -1, &r0);
                detail::count_tpcg(cnt, tp);
                ep = evaluate(prob, tp.y, &cnt.matvecs);
                push(StepKind::Tpcg, ep, f_prev, 0.0, &tp);
            } else {
                const double inner = std::sqrt((2.0 / t - norm_a) * norm_a) * eps_hat /
                                     ((1.0 / t + norm_a) * std::sqrt(static_cast<double>(n) * eta));
                const FaceDescriptor face = face_from_partition(ep.partition, FaceStyle::Frozen);
                const TpcgResult tp = tpcg1(op, prob.b, c, face, ep.x, inner, -1, &r0);
                detail::count_tpcg(cnt, tp);
                EvalPoint y = evaluate(prob, tp.y, &cnt.matvecs);
                push(StepKind::Tpcg, y, f_prev, 0.0, &tp);
                VectorXd xn = subspace_soft_threshold(y.x, y.grad, t, prob.tau, y.partition.i_nonzero());
                const double moved = (xn - y.x).squaredNorm();
                const double f_y = y.fullVal;
                ep = evaluate(prob, std::move(xn), &cnt.matvecs);
                ++cnt.proxSteps;
                eps_hat *= cfg.xi;
                push(StepKind::Prox, ep, f_y, moved, nullptr);
            }
        } catch (const UnboundedError& e) {
            res.ray = e.direction();
            return finish(Status::Unbounded, e.what());
        }
    }
}

inline SolveResult gcg1(const QpProblem& prob, const VectorXd& x0, double eps, GcgConfig cfg = {}) {
    cfg.eps = eps;
    return solve_gcg(GcgMethod::Gcg1, prob, x0, cfg);
}

inline SolveResult gcg2(const QpProblem& prob, const VectorXd& x0, double eta, double eps, GcgConfig cfg = {}) {
    cfg.eps = eps;
    cfg.eta0 = eta;
    return solve_gcg(GcgMethod::Gcg2, prob, x0, cfg);
}

inline SolveResult gcg2v(const QpProblem& prob, const VectorXd& x0, double eta0, double rho, double eps,
                         GcgConfig cfg = {}) {
    cfg.eps = eps;
    cfg.eta0 = eta0;
    cfg.rho = rho;
    return solve_gcg(GcgMethod::Gcg2v, prob, x0, cfg);
}

inline SolveResult gcg3(const QpProblem& prob, const VectorXd& x0, double eta0, double rho, double eps,
                        GcgConfig cfg = {}) {
    cfg.eps = eps;
    cfg.eta0 = eta0;
    cfg.rho = rho;
    return solve_gcg(GcgMethod::Gcg3, prob, x0, cfg);
}

inline SolveResult gcg4(const QpProblem& prob, const VectorXd& x0, const GcgConfig& cfg) {
    return solve_gcg(GcgMethod::Gcg4, prob, x0, cfg);
}

}  // namespace gcg
