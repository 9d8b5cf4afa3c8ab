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

// Acceptance run. Prints one "criterion N PASS|FAIL: ..." line per
// criterion and exits nonzero if any fails. Arguments restrict the run to
// the listed criterion numbers (criterion 10 is only judged on a full run).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fixtures.hpp"
#include "gcg/all.hpp"

using namespace gcg;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

bool ok_status(Status s) { return s == Status::Optimal || s == Status::TolReached; }

struct Verdict {
    bool pass = true;
    std::string detail;
};

void report(int id, const Verdict& v) {
    std::printf("criterion %d %s: %s\n", id, v.pass ? "PASS" : "FAIL", v.detail.c_str());
    std::fflush(stdout);
}

/// CapReached tallies per corpus, for the last criterion.
std::map<std::string, long> g_caps;

void note_cap(const std::string& where, Status s) {
    if (s == Status::CapReached) ++g_caps[where];
}

// Small QP corpus shared by criteria 1, 6 and 8.

struct SmallRun {
    GcgMethod method;
    SolveResult res;
    double normA = 0.0;
    double t = 0.0;
};

struct SmallCase {
    QpProblem prob;
    OracleResult oracle;
    std::vector<SmallRun> runs;
};

std::vector<SmallCase> g_small;

/// A = G G' (G n x r, r in [ceil(n/2), n]). With r = n, b is Gaussian.
/// Otherwise b = A z + w with w in null(A), ||w||_2 = tau/2, which keeps F
/// bounded below (b'd = w'd < tau ||d||_1 for d in null(A)).
void build_small_corpus() {
    if (!g_small.empty()) return;
    Rng rng(20260101);
    const std::vector<GcgMethod> methods{GcgMethod::Gcg1, GcgMethod::Gcg2v, GcgMethod::Gcg3, GcgMethod::Gcg4};
    for (int i = 0; i < 200; ++i) {
        const Index n = 1 + static_cast<Index>(rng.below(10));
        const Index rlo = (n + 1) / 2;
        const Index r = rlo + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - rlo + 1)));
        const double tau = i % 2 == 0 ? 0.1 : 1.0;
        const MatrixXd a = fx::random_psd(rng, n, r);
        VectorXd b;
        if (r == n) {
            b = rng.normal_vector(n);
        } else {
            const Eigen::SelfAdjointEigenSolver<MatrixXd> es(a);
            const MatrixXd nullb = es.eigenvectors().leftCols(n - r);
            VectorXd w = nullb * rng.normal_vector(n - r);
            w *= 0.5 * tau / w.norm();
            b = a * rng.normal_vector(n) + w;
        }
        SmallCase c{QpProblem(SymPsdOperator::dense(a), b, tau), oracle_solve(a, b, tau), {}};
        const double norm_a = c.prob.op->norm_estimate();
        for (GcgMethod m : methods) {
            GcgConfig cfg;
            cfg.eps = 1e-10;
            cfg.recordSupports = true;
            SmallRun run{m, solve_gcg(m, c.prob, VectorXd::Zero(n), cfg), norm_a,
                         default_prox_step(norm_a)};
            note_cap("criterion 1 corpus", run.res.status);
            c.runs.push_back(std::move(run));
        }
        g_small.push_back(std::move(c));
    }
}

Verdict criterion1() {
    const auto t0 = Clock::now();
    build_small_corpus();
    long runs = 0, bad = 0, unb = 0;
    double worst_f = 0.0, worst_v = 0.0;
    std::string first;
    for (std::size_t i = 0; i < g_small.size(); ++i) {
        const SmallCase& c = g_small[i];
        if (c.oracle.status != OracleResult::Status::Finite) {
            ++unb;
            continue;
        }
        for (const SmallRun& run : c.runs) {
            ++runs;
            const double df = std::abs(run.res.FValue - c.oracle.fStar) / (1.0 + std::abs(c.oracle.fStar));
            worst_f = std::max(worst_f, df);
            worst_v = std::max(worst_v, run.res.vInfNorm);
            if (!ok_status(run.res.status) || df > 1e-7 || run.res.vInfNorm > 1e-9) {
                if (bad++ == 0) {
                    std::ostringstream os;
                    os << "; first failure instance " << i << " " << to_string(run.method) << " "
                       << to_string(run.res.status);
                    first = os.str();
                }
            }
        }
    }
    const double sec = seconds_since(t0);
    std::ostringstream os;
    os << runs << " runs on " << g_small.size() << " instances, " << bad << " failures, max rel dF " << worst_f
       << ", max |v|_inf " << worst_v << ", oracle-unbounded instances " << unb << ", " << sec << " s" << first;
    return {bad == 0 && unb == 0 && sec < 60.0, os.str()};
}

Verdict criterion6() {
    build_small_corpus();
    long ls = 0, prox = 0, bad = 0;
    double worst_ls = 0.0, worst_prox = 0.0;
    for (const SmallCase& c : g_small)
        for (const SmallRun& run : c.runs)
            for (const IterRecord& r : run.res.trace) {
                if (r.step == StepKind::LineSearch) {
                    ++ls;
                    const double rel = std::abs((r.fPrev - r.detail) - r.F) / std::max(1.0, std::abs(r.fPrev));
                    worst_ls = std::max(worst_ls, rel);
                    if (rel > 1e-10) ++bad;
                } else if (r.step == StepKind::Prox) {
                    ++prox;
                    const double need = 0.5 * (2.0 / run.t - run.normA) * r.detail;
                    // Relative to |F|, so the two objective roundings stay below 1e-12.
                    const double shortfall = (need - (r.fPrev - r.F)) / (1.0 + std::abs(r.fPrev));
                    worst_prox = std::max(worst_prox, shortfall);
                    if (shortfall > 1e-12) ++bad;
                }
            }
    std::ostringstream os;
    os << ls << " line-search records (max rel error " << worst_ls << "), " << prox
       << " prox records (max relative shortfall " << worst_prox << "), " << bad << " violations";
    return {bad == 0 && ls > 0 && prox > 0, os.str()};
}

Verdict criterion8() {
    build_small_corpus();
    long gcg1_runs = 0, repeats = 0, rounds = 0, nongrowth = 0;
    for (const SmallCase& c : g_small)
        for (const SmallRun& run : c.runs) {
            if (run.method == GcgMethod::Gcg1) {
                ++gcg1_runs;
                std::vector<IndexSet> seen;
                for (const IterRecord& r : run.res.trace) {
                    if (!seen.empty() && r.zeroSet == seen.back()) continue;
                    if (std::find(seen.begin(), seen.end(), r.zeroSet) != seen.end()) ++repeats;
                    seen.push_back(r.zeroSet);
                }
            }
            if (run.method != GcgMethod::Gcg1 && run.method != GcgMethod::Gcg2v) continue;
            for (const IterRecord& r : run.res.trace) {
                if (r.step != StepKind::Tpcg) continue;
                Index prev = r.tpcgInitialFixed;
                for (std::size_t j = 0; j < r.tpcgZeroCounts.size(); ++j) {
                    if (r.tpcgBoundary[j]) {
                        ++rounds;
                        if (!(r.tpcgZeroCounts[j] > prev)) ++nongrowth;
                    }
                    prev = r.tpcgZeroCounts[j];
                }
            }
        }
    std::ostringstream os;
    os << gcg1_runs << " gcg1 runs with " << repeats << " repeated zero sets; " << rounds
       << " tpcg2 boundary rounds, " << nongrowth << " without strict zero-set growth";
    return {repeats == 0 && nongrowth == 0 && rounds > 0, os.str()};
}

// Least-squares corpus for criteria 2 and 3.

struct LsqOutcome {
    bool run = false;
    long instances = 0;
    std::map<std::string, long> failures;
    std::map<std::string, double> worst;
    long boundViolations = 0;
    long boundRecords = 0;
    double worstBound = -1e300;
    long refCaps = 0;
    double seconds = 0.0;
};

LsqOutcome g_lsq;

constexpr long kBaselineCap = 1000000;

void run_lsq_corpus() {
    if (g_lsq.run) return;
    g_lsq.run = true;
    const auto t0 = Clock::now();
    const double delta = 1e-2;
    const std::vector<SolverKind> solvers{SolverKind::Gcg1, SolverKind::Gcg2v, SolverKind::Gcg3,
                                          SolverKind::Gcg4, SolverKind::Fista, SolverKind::Npg};
    for (Conditioning cond : {Conditioning::Well, Conditioning::Ill}) {
        for (int i = 0; i < 25; ++i) {
            GenSpec g;
            g.m = 40;
            g.n = 128;
            g.s = 8;
            g.cond = cond;
            g.seed = 3000 + static_cast<std::uint64_t>(i);
            const Generated gen = generate(g);
            const LsqInstance& inst = *gen.inst;
            GcgConfig rc;
            rc.eps = 1e-12;
            rc.eta0 = inst.kappa_sq();
            rc.recordTrace = false;
            const SolveResult ref = solve_gcg(GcgMethod::Gcg4, inst.problem(), VectorXd::Zero(g.n), rc);
            g_lsq.refCaps += ref.status == Status::CapReached;
            note_cap("criterion 2 reference runs", ref.status);
            const double fref = inst.objective(ref.x);
            ++g_lsq.instances;
            for (SolverKind s : solvers) {
                const std::string name = std::string(to_string(cond)) + "/" + to_string(s);
                DeltaOptions o;
                o.recordTrace = false;
                o.recordBounds = false;
                o.baselineIterCap = kBaselineCap;
                if (s == SolverKind::Npg) o.npgWindow = cond == Conditioning::Well ? 5 : 15;
                const double lim = fref + 1e-9 * (1.0 + fref);
                auto check = [&](const LowerBoundRecord& lb) {
                    ++g_lsq.boundRecords;
                    g_lsq.worstBound = std::max(g_lsq.worstBound, lb.best - fref);
                    if (lb.best > lim) ++g_lsq.boundViolations;
                };
                o.onBound = check;
                const DeltaResult r = solve_to_delta(inst, delta, s, std::nullopt, o);
                check(r.last);
                note_cap("criterion 2 solver runs", r.result.status);
                const double df = r.FBar - fref;
                auto it = g_lsq.worst.find(name);
                g_lsq.worst[name] = it == g_lsq.worst.end() ? df : std::max(it->second, df);
                g_lsq.failures[name] += df > delta ? 1 : 0;
            }
        }
    }
    g_lsq.seconds = seconds_since(t0);
}

Verdict criterion2() {
    run_lsq_corpus();
    long bad = 0;
    std::ostringstream os;
    os << g_lsq.instances << " instances, baseline cap " << kBaselineCap << ", " << g_lsq.seconds << " s;";
    for (const auto& [name, fails] : g_lsq.failures) {
        bad += fails;
        os << " " << name << " " << fails << "/25 over delta (max dF " << g_lsq.worst[name] << ")";
    }
    os << "; reference runs at CapReached " << g_lsq.refCaps;
    return {bad == 0 && g_lsq.seconds < 120.0, os.str()};
}

Verdict criterion3() {
    run_lsq_corpus();
    std::ostringstream os;
    os << g_lsq.boundRecords << " bound records, " << g_lsq.boundViolations
       << " above the reference, max(bound - Fref) " << g_lsq.worstBound;
    return {g_lsq.boundViolations == 0 && g_lsq.boundRecords > 0, os.str()};
}

Verdict criterion4() {
    const auto t0 = Clock::now();
    Rng rng(20260104);
    long bad_cons = 0, bad_inc = 0;
    Index worst_extra = -1000;
    for (int i = 0; i < 200; ++i) {
        const bool consistent = i < 100;
        const Index n = 2 + static_cast<Index>(rng.below(39));
        const Index r = 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(n - 1)));
        VectorXd null;
        const MatrixXd a = fx::singular_psd(rng, n, r, &null);
        const SymPsdOperator op = SymPsdOperator::dense(a);
        VectorXd b = a * rng.normal_vector(n);
        if (consistent) {
            const double binf = b.lpNorm<Eigen::Infinity>();
            const CgOutcome out = cg_solve(op, b, VectorXd::Zero(n), 1e-8 * binf);
            const double res = (a * out.x - b).lpNorm<Eigen::Infinity>();
            worst_extra = std::max(worst_extra, out.iterations - (r + 1));
            if (out.kind != CgOutcome::Kind::Converged || out.iterations > r + 1 || res > 1e-8 * binf) ++bad_cons;
        } else {
            b += (0.1 + rng.uniform()) * null;
            const CgOutcome out = cg_solve(op, b, VectorXd::Zero(n), 1e-8 * b.lpNorm<Eigen::Infinity>());
            bool good = out.kind == CgOutcome::Kind::Unbounded;
            if (good) {
                const double norm_a = op.norm_estimate();
                good = (a * out.direction).lpNorm<Eigen::Infinity>() <= 1e-9 * norm_a &&
                       out.residual.dot(out.direction) < 0.0;
            }
            bad_inc += !good;
        }
    }
    const double sec = seconds_since(t0);
    std::ostringstream os;
    os << "consistent: " << bad_cons << "/100 failures (max iterations minus rank+1: " << worst_extra
       << "); inconsistent: " << bad_inc << "/100 failures; " << sec << " s";
    return {bad_cons == 0 && bad_inc == 0 && sec < 10.0, os.str()};
}

Verdict criterion5() {
    Rng rng(20260105);
    long checks = 0, bad = 0;
    double worst = 0.0;
    for (int i = 0; i < 50; ++i) {
        const Index n = 5 + static_cast<Index>(rng.below(26));
        const double kappa = std::pow(10.0, 1.0 + 3.0 * rng.uniform());
        const MatrixXd q = orthonormal_basis(rng.normal_matrix(n, n));
        VectorXd lam(n);
        for (Index j = 0; j < n; ++j) lam[j] = std::pow(kappa, n > 1 ? static_cast<double>(j) / (n - 1) : 0.0);
        const MatrixXd a0 = q.transpose() * lam.asDiagonal() * q;
        const MatrixXd a = 0.5 * (a0 + a0.transpose());
        const VectorXd b = rng.normal_vector(n);
        const SymPsdOperator op = SymPsdOperator::dense(a);
        const VectorXd xs = a.ldlt().solve(b);
        const double e0 = 0.5 * xs.dot(a * xs);
        const double kap = lam.maxCoeff() / lam.minCoeff();
        const double rho = (std::sqrt(kap) - 1.0) / (std::sqrt(kap) + 1.0);
        const double tol = 1e-12 * b.lpNorm<Eigen::Infinity>();
        for (Index k = 0; k <= 2 * (n + 1); ++k) {
            const CgOutcome out = cg_solve(op, b, VectorXd::Zero(n), tol, k);
            const VectorXd e = out.x - xs;
            const double err = 0.5 * e.dot(a * e);
            const double bound = 4.0 * std::pow(rho, 2.0 * static_cast<double>(k)) * e0;
            ++checks;
            if (bound > 0.0) worst = std::max(worst, err / bound);
            if (err > bound * (1.0 + 1e-6)) ++bad;
            if (out.kind == CgOutcome::Kind::Converged) break;
        }
    }
    std::ostringstream os;
    os << checks << " (instance, k) checks, " << bad << " violations, max error/bound " << worst;
    return {bad == 0, os.str()};
}

Verdict criterion7() {
    Rng rng(20260107);
    long checks = 0, bad = 0;
    double worst = -1e300;
    for (int i = 0; i < 50; ++i) {
        const Index n = 1 + static_cast<Index>(rng.below(8));
        const MatrixXd a = fx::random_psd(rng, n, n) + 0.05 * MatrixXd::Identity(n, n);
        const double tau = i % 2 == 0 ? 0.1 : 1.0;
        const QpProblem p(SymPsdOperator::dense(a), rng.normal_vector(n), tau);
        const double lam_min = Eigen::SelfAdjointEigenSolver<MatrixXd>(a).eigenvalues().minCoeff();
        for (int k = 0; k < 20; ++k) {
            VectorXd x = rng.normal_vector(n);
            for (Index j = 0; j < n; ++j)
                if (rng.uniform() < 0.3) x[j] = 0.0;
            const EvalPoint ep = evaluate(p, x);
            const IndexSet s = ep.partition.i_nonzero();
            double vs = 0.0;
            for (Index j : s) vs += ep.v[j] * ep.v[j];
            const double lhs = ep.fullVal - face_optimal_value(p, s);
            const double rhs = 0.5 / lam_min * vs;
            ++checks;
            worst = std::max(worst, lhs - rhs);
            if (lhs > rhs + 1e-8) ++bad;
        }
    }
    std::ostringstream os;
    os << checks << " points, " << bad << " violations, max(lhs - rhs) " << worst;
    return {bad == 0, os.str()};
}

Verdict criterion9() {
    const auto t0 = Clock::now();
    const double delta = 1e-2;
    const std::vector<SolverKind> solvers{SolverKind::Gcg2v, SolverKind::Gcg3, SolverKind::Gcg4, SolverKind::Fista,
                                          SolverKind::Npg};
    std::vector<GenSpec> specs;
    for (Conditioning cond : {Conditioning::Well, Conditioning::Ill})
        for (std::uint64_t seed = 1; seed <= 3; ++seed) specs.push_back(table_preset(cond, seed, 1).front());
    BenchOptions opt;
    opt.delta = delta;
    opt.solver.baselineIterCap = kBaselineCap;
    const BenchReport rep = run_benchmark(specs, solvers, opt);
    const double sec = seconds_since(t0);

    bool pass = sec < 600.0;
    std::ostringstream os;
    std::map<std::string, double> ill_mv;
    for (std::size_t g = 0; g < specs.size(); ++g) {
        double fmin = 1e300, fmax = -1e300;
        Index cmin = 1 << 30, cmax = -1;
        std::vector<std::string> unfinished;
        for (std::size_t j = 0; j < solvers.size(); ++j) {
            const BenchRow& r = rep.rows[g * solvers.size() + j];
            if (r.status == "CapReached") ++g_caps["criterion 9 runs"];
            if (!r.error.empty() || (r.status != "Optimal" && r.status != "TolReached"))
                unfinished.push_back(r.solver + "=" + (r.error.empty() ? r.status : r.error));
            fmin = std::min(fmin, r.F);
            fmax = std::max(fmax, r.F);
            cmin = std::min(cmin, r.card);
            cmax = std::max(cmax, r.card);
            if (specs[g].cond == Conditioning::Ill) ill_mv[r.solver] += static_cast<double>(r.matvecs) / 3.0;
        }
        const bool row_ok = unfinished.empty() && fmax - fmin <= 2.0 * delta && cmax - cmin <= 5;
        pass = pass && row_ok;
        os << to_string(specs[g].cond) << " seed " << specs[g].seed << ": F spread " << fmax - fmin
           << ", card " << cmin << ".." << cmax;
        for (const auto& u : unfinished) os << ", " << u;
        os << "; ";
    }
    std::vector<std::pair<double, std::string>> rank;
    for (const auto& [name, mv] : ill_mv) rank.emplace_back(mv, name);
    std::sort(rank.begin(), rank.end());
    os << "ill mean matvecs:";
    for (const auto& [mv, name] : rank) os << " " << name << "=" << static_cast<long>(mv);
    os << "; " << sec << " s";
    return {pass, os.str()};
}

Verdict criterion10(bool c1, bool c6, bool c8) {
    long caps = 0;
    std::ostringstream os;
    os << "criteria 1/6/8 " << (c1 ? "pass" : "fail") << "/" << (c6 ? "pass" : "fail") << "/"
       << (c8 ? "pass" : "fail") << "; CapReached counts:";
    for (const auto& [where, n] : g_caps) {
        caps += n;
        os << " " << where << "=" << n;
    }
    if (g_caps.empty()) os << " none";
    return {c1 && c6 && c8 && caps == 0, os.str()};
}

}  // namespace

int main(int argc, char** argv) {
    std::set<int> want;
    for (int i = 1; i < argc; ++i) want.insert(std::atoi(argv[i]));
    const bool all = want.empty();
    auto on = [&](int id) { return all || want.count(id) > 0; };

    std::map<int, bool> passed;
    auto run = [&](int id, Verdict (*fn)()) {
        if (!on(id)) return;
        Verdict v;
        try {
            v = fn();
        } catch (const std::exception& e) {
            v = {false, std::string("exception: ") + e.what()};
        }
        passed[id] = v.pass;
        report(id, v);
    };
    run(1, criterion1);
    run(2, criterion2);
    run(3, criterion3);
    run(4, criterion4);
    run(5, criterion5);
    run(6, criterion6);
    run(7, criterion7);
    run(8, criterion8);
    run(9, criterion9);
    if (all) {
        const Verdict v = criterion10(passed[1], passed[6], passed[8]);
        passed[10] = v.pass;
        report(10, v);
    }
    bool ok = true;
    for (const auto& [id, p] : passed) ok = ok && p;
    return ok ? 0 : 1;
}
