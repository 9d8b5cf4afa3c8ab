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
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gcg/baselines.hpp"
#include "gcg/gcg.hpp"
#include "gcg/subgrad.hpp"

namespace gcg {

/// Fbar(x) = 1/2 ||Abar x - bbar||^2 + tau ||x||_1, seen as a QP with
/// A = Abar'Abar (applied implicitly) and b = Abar' bbar.
class LsqInstance {
public:
    LsqInstance(MatrixXd abar, VectorXd bbar, double tau, std::optional<double> kappa_hint = std::nullopt)
        : bbar_(std::move(bbar)), kappaHint_(kappa_hint) {
        if (abar.rows() != bbar_.size()) throw Error(ErrorKind::InvalidInput, "length(bbar) must equal rows(Abar)");
        if (!(tau > 0.0) || !std::isfinite(tau)) throw Error(ErrorKind::InvalidInput, "tau must be > 0");
        if (!abar.allFinite() || !bbar_.allFinite()) throw Error(ErrorKind::InvalidInput, "non-finite data");
        if (kappa_hint && !(*kappa_hint >= 1.0)) throw Error(ErrorKind::InvalidInput, "kappa hint must be >= 1");
        VectorXd b = abar.transpose() * bbar_;
        auto op = std::make_shared<const SymPsdOperator>(SymPsdOperator::gram(std::move(abar)));
        prob_ = QpProblem(std::move(op), std::move(b), tau);
    }

    const MatrixXd& abar() const { return prob_.op->stored(); }
    const VectorXd& bbar() const { return bbar_; }
    double tau() const { return prob_.tau; }
    Index rows() const { return bbar_.size(); }
    Index dim() const { return prob_.dim(); }
    const QpProblem& problem() const { return prob_; }
    /// kappa(Abar) when known analytically.
    std::optional<double> kappa_hint() const { return kappaHint_; }

    /// ||Abar||^2, cached on the operator.
    double norm_sq() const { return prob_.op->norm_estimate(); }

    /// kappa(Abar)^2: the hint squared when present, else kappa(Abar'Abar).
    double kappa_sq() const {
        if (kappaHint_) return *kappaHint_ * *kappaHint_;
        return default_eta0(*prob_.op);
    }

    VectorXd residual(const VectorXd& x) const { return abar() * x - bbar_; }

    double objective(const VectorXd& x) const {
        return 0.5 * residual(x).squaredNorm() + tau() * x.lpNorm<1>();
    }

private:
    VectorXd bbar_;
    std::optional<double> kappaHint_;
    QpProblem prob_;
};

struct LowerBoundRecord {
    double F = 0.0;  ///< Fbar(x)
    double fLow1 = 0.0;
    double fLow2 = 0.0;
    double best = 0.0;
    double gap = 0.0;
};

namespace detail {

inline double min_norm_subgrad_inf(const VectorXd& g, const VectorXd& x, double tau, double* vx) {
    double vinf = 0.0;
    double dot = 0.0;
    for (Index i = 0; i < x.size(); ++i) {
        double v;
        if (x[i] > 0.0)
            v = g[i] + tau;
        else if (x[i] < 0.0)
            v = g[i] - tau;
        else
            v = std::min(g[i] + tau, std::max(0.0, g[i] - tau));
        vinf = std::max(vinf, std::abs(v));
        dot += v * x[i];
    }
    if (vx) *vx = dot;
    return vinf;
}

}  // namespace detail

/// Both bounds from one residual: r = Abar x - bbar, g = Abar' r. The
/// gradient is taken in residual form so it does not lose digits to the
/// cancellation in Abar'Abar x - Abar' bbar.
inline LowerBoundRecord lower_bounds(const LsqInstance& inst, const VectorXd& x) {
    if (x.size() != inst.dim()) throw Error(ErrorKind::InvalidInput, "lower_bounds: dimension mismatch");
    const VectorXd r = inst.residual(x);
    const VectorXd g = inst.abar().transpose() * r;
    const double tau = inst.tau();
    const double l1 = x.lpNorm<1>();
    LowerBoundRecord lb;
    lb.F = 0.5 * r.squaredNorm() + tau * l1;
    const double g_inf = g.size() ? g.lpNorm<Eigen::Infinity>() : 0.0;
    lb.fLow1 = lb.F - g.dot(x) - tau * l1 + std::min(1.0 - g_inf / tau, 0.0) * lb.F;
    double vx = 0.0;
    const double v_inf = detail::min_norm_subgrad_inf(g, x, tau, &vx);
    lb.fLow2 = lb.F * (1.0 - v_inf / tau) - vx;
    lb.best = std::max(lb.fLow1, lb.fLow2);
    lb.gap = lb.F - lb.best;
    return lb;
}

inline double f_low1(const LsqInstance& inst, const VectorXd& x) { return lower_bounds(inst, x).fLow1; }
inline double f_low2(const LsqInstance& inst, const VectorXd& x) { return lower_bounds(inst, x).fLow2; }

enum class SolverKind { Gcg1, Gcg2v, Gcg3, Gcg4, Fista, Npg };

inline const char* to_string(SolverKind s) {
    switch (s) {
        case SolverKind::Gcg1: return "gcg1";
        case SolverKind::Gcg2v: return "gcg2v";
        case SolverKind::Gcg3: return "gcg3";
        case SolverKind::Gcg4: return "gcg4";
        case SolverKind::Fista: return "fista";
        case SolverKind::Npg: return "npg";
    }
    return "?";
}

inline std::optional<SolverKind> solver_from_string(const std::string& s) {
    for (SolverKind k : {SolverKind::Gcg1, SolverKind::Gcg2v, SolverKind::Gcg3, SolverKind::Gcg4, SolverKind::Fista,
                         SolverKind::Npg})
        if (s == to_string(k)) return k;
    return std::nullopt;
}

/// Overrides for the defaults of the least-squares driver. Unset fields
/// take the usual lasso choices (eta0 = kappa(Abar)^2, t from ||Abar||^2,
/// L = ||Abar||^2).
struct DeltaOptions {
    GcgConfig gcg;
    long baselineIterCap = 100000;
    int npgWindow = 5;
    /// Overrides the tolerance derived from delta.
    std::optional<double> eps;
    bool recordTrace = true;
    /// Keep a LowerBoundRecord for every outer iteration.
    bool recordBounds = true;
    /// Sees every bound record as it is made, whether or not it is kept.
    std::function<void(const LowerBoundRecord&)> onBound;
};

struct DeltaResult {
    SolveResult result;
    /// Objective of the returned point in least-squares form.
    double FBar = 0.0;
    double FBar0 = 0.0;
    double eps = 0.0;
    std::vector<LowerBoundRecord> bounds;
    /// Extra matvec pairs spent on the bounds (not in result.counters).
    long boundMatvecs = 0;
    /// Bound record at the returned point.
    LowerBoundRecord last;
};

/// Runs a solver until ||v||_inf <= tau*delta/(2 Fbar(x0)) or the bound gap
/// drops to delta. Both stops are checked once per outer iteration.
inline DeltaResult solve_to_delta(const LsqInstance& inst, double delta, SolverKind solver,
                                  std::optional<VectorXd> x0 = std::nullopt, const DeltaOptions& opt = {}) {
    if (!(delta > 0.0)) throw Error(ErrorKind::InvalidInput, "delta must be > 0");
    const QpProblem& prob = inst.problem();
    const VectorXd start = x0 ? *x0 : VectorXd::Zero(inst.dim());
    if (start.size() != inst.dim()) throw Error(ErrorKind::InvalidInput, "x0 has the wrong length");

    DeltaResult out;
    out.FBar0 = inst.objective(start);
    const double eps_machine = opt.gcg.epsMachine.value_or(machine_tolerance(prob.b));
    if (opt.eps)
        out.eps = *opt.eps;
    else
        out.eps = out.FBar0 > 0.0 ? inst.tau() * delta / (2.0 * out.FBar0) : eps_machine;

    OuterHook hook = [&](const EvalPoint& ep) {
        LowerBoundRecord lb = lower_bounds(inst, ep.x);
        ++out.boundMatvecs;
        if (opt.onBound) opt.onBound(lb);
        if (opt.recordBounds) out.bounds.push_back(lb);
        return lb.gap <= delta;
    };

    const double norm_sq = inst.norm_sq();
    switch (solver) {
        case SolverKind::Fista: {
            FistaConfig fc;
            fc.L = norm_sq > 0.0 ? norm_sq : 1.0;
            fc.iterCap = opt.baselineIterCap;
            out.result = fista(prob, start, fc, StopRule{out.eps, hook}, opt.recordTrace);
            break;
        }
        case SolverKind::Npg: {
            NpgConfig nc;
            nc.L = norm_sq > 0.0 ? norm_sq : 1.0;
            nc.M = opt.npgWindow;
            nc.iterCap = opt.baselineIterCap;
            out.result = npg(prob, start, nc, StopRule{out.eps, hook}, opt.recordTrace);
            break;
        }
        default: {
            GcgConfig cfg = opt.gcg;
            cfg.eps = out.eps;
            cfg.recordTrace = opt.recordTrace;
            if (!cfg.eta0 && norm_sq > 0.0) cfg.eta0 = inst.kappa_sq();
            const GcgMethod m = solver == SolverKind::Gcg1    ? GcgMethod::Gcg1
                                : solver == SolverKind::Gcg2v ? GcgMethod::Gcg2v
                                : solver == SolverKind::Gcg3  ? GcgMethod::Gcg3
                                                              : GcgMethod::Gcg4;
            out.result = solve_gcg(m, prob, start, cfg, hook);
            break;
        }
    }
    out.last = lower_bounds(inst, out.result.x);
    ++out.boundMatvecs;
    out.FBar = out.last.F;
    return out;
}

}  // namespace gcg
