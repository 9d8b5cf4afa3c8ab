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
#include <deque>
#include <string>

#include "gcg/gcg.hpp"
#include "gcg/solve_result.hpp"
#include "gcg/subgrad.hpp"

namespace gcg {

struct FistaConfig {
    /// Lipschitz constant of grad f, e.g. ||Abar||^2.
    double L = 0.0;
    long iterCap = 100000;

    void validate() const {
        if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidInput, "FISTA: L must be > 0");
        if (iterCap < 1) throw Error(ErrorKind::InvalidInput, "FISTA: iterCap must be >= 1");
    }
};

struct NpgConfig {
    double sigma = 1e-2;
    double alphaMax = 1e30;
    double alphaMin = 1e-30;
    /// Step shrink factor used while backtracking.
    double etaLs = 2.0;
    int M = 5;
    /// Sets the first step 1/L and the fallback when s'y <= 0.
    double L = 0.0;
    long iterCap = 100000;
    int maxBacktracks = 60;

    void validate() const {
        if (!(sigma > 0.0 && sigma < 1.0)) throw Error(ErrorKind::InvalidInput, "NPG: sigma must lie in (0, 1)");
        if (!(alphaMin > 0.0 && alphaMin <= alphaMax)) throw Error(ErrorKind::InvalidInput, "NPG: bad step bounds");
        if (!(etaLs > 1.0)) throw Error(ErrorKind::InvalidInput, "NPG: etaLs must be > 1");
        if (M < 1) throw Error(ErrorKind::InvalidInput, "NPG: M must be >= 1");
        if (!(L > 0.0) || !std::isfinite(L)) throw Error(ErrorKind::InvalidInput, "NPG: L must be > 0");
        if (iterCap < 1) throw Error(ErrorKind::InvalidInput, "NPG: iterCap must be >= 1");
    }
};

/// Stop once ||v||_inf <= eps, or when the hook says so.
struct StopRule {
    double eps = 0.0;
    OuterHook hook;
};

namespace detail {

inline VectorXd soft_threshold(const VectorXd& a, double thr) {
    VectorXd x(a.size());
    for (Index i = 0; i < a.size(); ++i) {
        const double mag = std::abs(a[i]) - thr;
        x[i] = mag > 0.0 ? std::copysign(mag, a[i]) : 0.0;
    }
    return x;
}

inline void record_baseline(SolveResult& res, const EvalPoint& ep, double f_prev, double detail) {
    IterRecord r;
    r.k = res.counters.outerIters;
    r.step = StepKind::Prox;
    r.F = ep.fullVal;
    r.vInf = ep.v_inf();
    r.supp = ep.partition.zero_count();
    r.fPrev = f_prev;
    r.detail = detail;
    res.trace.push_back(std::move(r));
}

/// Shared stop logic; returns true when res has been finalized.
inline bool baseline_should_stop(SolveResult& res, const EvalPoint& ep, const StopRule& stop, double eps_machine,
                                 long cap) {
    const double v_inf = ep.v_inf();
    auto done = [&](Status s, const char* msg) {
        res.x = ep.x;
        res.FValue = ep.fullVal;
        res.vInfNorm = v_inf;
        res.status = s;
        res.message = msg;
        return true;
    };
    const double eps = stop.eps > 0.0 ? stop.eps : eps_machine;
    if (v_inf <= eps) return done(v_inf <= eps_machine ? Status::Optimal : Status::TolReached, "");
    if (stop.hook && stop.hook(ep)) return done(Status::TolReached, "stopped by caller");
    if (res.counters.outerIters >= cap) return done(Status::CapReached, "iteration cap reached");
    return false;
}

}  // namespace detail

/// FISTA with constant step 1/L. Ax is kept fresh at every iterate and
/// A*y is formed from it by the momentum combination, so each iteration
/// costs one matvec and v(x) needs no extra one.
inline SolveResult fista(const QpProblem& prob, const VectorXd& x0, const FistaConfig& cfg, const StopRule& stop,
                         bool record_trace = true) {
    cfg.validate();
    if (x0.size() != prob.dim()) throw Error(ErrorKind::InvalidInput, "x0 has the wrong length");
    const double eps_machine = machine_tolerance(prob.b);
    SolveResult res;
    EvalPoint ep = evaluate(prob, x0, &res.counters.matvecs);
    res.F0 = ep.fullVal;
    VectorXd y = ep.x;
    VectorXd ay = ep.ax;
    double tk = 1.0;
    for (;;) {
        if (detail::baseline_should_stop(res, ep, stop, eps_machine, cfg.iterCap)) return res;
        ++res.counters.outerIters;
        VectorXd xn = detail::soft_threshold(y - (ay - prob.b) / cfg.L, prob.tau / cfg.L);
        VectorXd axn = prob.op->matvec(xn);
        ++res.counters.matvecs;
        ++res.counters.proxSteps;
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * tk * tk));
        const double beta = (tk - 1.0) / t_next;
        y = xn + beta * (xn - ep.x);
        ay = axn + beta * (axn - ep.ax);
        tk = t_next;
        const double f_prev = ep.fullVal;
        const double moved = (xn - ep.x).squaredNorm();
        ep = evaluate_with_product(prob, std::move(xn), std::move(axn));
        if (record_trace) detail::record_baseline(res, ep, f_prev, moved);
    }
}

/// Nonmonotone proximal gradient with Barzilai-Borwein steps.
inline SolveResult npg(const QpProblem& prob, const VectorXd& x0, const NpgConfig& cfg, const StopRule& stop,
                       bool record_trace = true) {
    cfg.validate();
    if (x0.size() != prob.dim()) throw Error(ErrorKind::InvalidInput, "x0 has the wrong length");
    const double eps_machine = machine_tolerance(prob.b);
    SolveResult res;
    EvalPoint ep = evaluate(prob, x0, &res.counters.matvecs);
    res.F0 = ep.fullVal;
    std::deque<double> window{ep.fullVal};
    double alpha = std::clamp(1.0 / cfg.L, cfg.alphaMin, cfg.alphaMax);
    for (;;) {
        if (detail::baseline_should_stop(res, ep, stop, eps_machine, cfg.iterCap)) return res;
        ++res.counters.outerIters;
        const double f_ref = *std::max_element(window.begin(), window.end());
        VectorXd xn;
        VectorXd axn;
        double fn = 0.0;
        for (int bt = 0;; ++bt) {
            if (bt > cfg.maxBacktracks) {
                res.x = ep.x;
                res.FValue = ep.fullVal;
                res.vInfNorm = ep.v_inf();
                res.status = Status::CapReached;
                res.message = "backtracking limit reached";
                return res;
            }
            xn = detail::soft_threshold(ep.x - alpha * ep.grad, alpha * prob.tau);
            axn = prob.op->matvec(xn);
            ++res.counters.matvecs;
            fn = 0.5 * xn.dot(axn) - prob.b.dot(xn) + prob.tau * xn.lpNorm<1>();
            if (fn <= f_ref - cfg.sigma / (2.0 * alpha) * (xn - ep.x).squaredNorm()) break;
            alpha = std::max(alpha / cfg.etaLs, cfg.alphaMin);
            ++res.counters.backtracks;
        }
        ++res.counters.proxSteps;
        const VectorXd s = xn - ep.x;
        if (!(s.squaredNorm() > 0.0)) {
            // Backtracking shrank the step below the rounding of x.
            res.x = ep.x;
            res.FValue = ep.fullVal;
            res.vInfNorm = ep.v_inf();
            res.status = Status::CapReached;
            res.message = "stalled: no representable step";
            return res;
        }
        const VectorXd yv = axn - ep.ax;
        const double sty = s.dot(yv);
        alpha = sty > 0.0 ? std::clamp(s.squaredNorm() / sty, cfg.alphaMin, cfg.alphaMax)
                          : std::clamp(1.0 / cfg.L, cfg.alphaMin, cfg.alphaMax);
        const double f_prev = ep.fullVal;
        const double moved = s.squaredNorm();
        ep = evaluate_with_product(prob, std::move(xn), std::move(axn));
        window.push_back(ep.fullVal);
        while (static_cast<int>(window.size()) > cfg.M) window.pop_front();
        if (record_trace) detail::record_baseline(res, ep, f_prev, moved);
    }
}

}  // namespace gcg
