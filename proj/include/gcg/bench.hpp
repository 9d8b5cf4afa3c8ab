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
#include <atomic>
#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <memory>
#include <mutex>
#include <optional>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "gcg/linops.hpp"
#include "gcg/lsq.hpp"
#include "gcg/random.hpp"

namespace gcg {

enum class Conditioning { Well, Ill };

inline const char* to_string(Conditioning c) { return c == Conditioning::Well ? "well" : "ill"; }

inline std::optional<Conditioning> conditioning_from_string(const std::string& s) {
    if (s == "well") return Conditioning::Well;
    if (s == "ill") return Conditioning::Ill;
    return std::nullopt;
}

struct GenSpec {
    Index m = 0;
    Index n = 0;
    Index s = 0;
    double sigma = 1e-5;
    Conditioning cond = Conditioning::Well;
    std::uint64_t seed = 1;

    void validate() const {
        if (!(m > 0 && m < n)) throw Error(ErrorKind::InvalidInput, "GenSpec: need 0 < m < n");
        if (!(s > 0 && s < n)) throw Error(ErrorKind::InvalidInput, "GenSpec: need 0 < s < n");
        if (!(sigma >= 0.0) || !std::isfinite(sigma)) throw Error(ErrorKind::InvalidInput, "GenSpec: sigma must be >= 0");
    }
};

/// Default tau per conditioning: 0.1 well, 1 ill.
inline double default_tau(Conditioning c) { return c == Conditioning::Well ? 0.1 : 1.0; }

/// Diagonal scaling of the ill-conditioned generator, D_ii = min(i^2, 1e6) (1-based i).
inline VectorXd ill_scaling(Index n) {
    VectorXd d(n);
    for (Index i = 0; i < n; ++i) {
        const double k = static_cast<double>(i + 1);
        d[i] = std::min(k * k, 1e6);
    }
    return d;
}

struct Generated {
    std::shared_ptr<const LsqInstance> inst;
    VectorXd xTilde;
    IndexSet support;
    /// Seed that produced the instance (differs from the request after retries).
    std::uint64_t seedUsed = 0;
};

/// Random lasso instance: Abar has orthonormal rows spanning range(W) for a
/// Gaussian n x m W (times D in the ill case); bbar = Abar xt + sigma*noise
/// with xt having s entries of +-1.
inline Generated generate(const GenSpec& spec, std::optional<double> tau = std::nullopt) {
    spec.validate();
    const double tau_used = tau.value_or(default_tau(spec.cond));
    for (int attempt = 0;; ++attempt) {
        const std::uint64_t seed = spec.seed + static_cast<std::uint64_t>(attempt);
        Rng rng(seed);
        const MatrixXd w = rng.normal_matrix(spec.n, spec.m);
        MatrixXd abar;
        try {
            abar = orthonormal_basis(w);
        } catch (const Error& e) {
            if (e.kind() == ErrorKind::RankDeficient && attempt < 3) continue;
            throw;
        }
        // Rows are orthonormal, so kappa(Abar) = 1 exactly in the well case.
        // With D applied the singular values only sit somewhere inside
        // [min D, max D], so kappa is left to the operator's own spectrum.
        std::optional<double> kappa;
        if (spec.cond == Conditioning::Ill)
            abar = abar * ill_scaling(spec.n).asDiagonal();
        else
            kappa = 1.0;
        Generated g;
        g.seedUsed = seed;
        g.support = rng.sample_indices(spec.n, spec.s);
        std::sort(g.support.begin(), g.support.end());
        g.xTilde = VectorXd::Zero(spec.n);
        for (Index i : g.support) g.xTilde[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
        const VectorXd noise = rng.normal_vector(spec.m);
        VectorXd bbar = abar * g.xTilde;
        if (spec.sigma != 0.0) bbar += spec.sigma * noise;
        g.inst = std::make_shared<const LsqInstance>(std::move(abar), std::move(bbar), tau_used, kappa);
        return g;
    }
}

/// The ten (m, n, s) rows of the benchmark tables: k * (120, 512, 20).
inline std::vector<GenSpec> table_preset(Conditioning cond, std::uint64_t seed, int rows = 10) {
    std::vector<GenSpec> out;
    for (int k = 1; k <= rows; ++k) {
        GenSpec g;
        g.m = 120 * k;
        g.n = 512 * k;
        g.s = 20 * k;
        g.sigma = 1e-5;
        g.cond = cond;
        g.seed = seed;
        out.push_back(g);
    }
    return out;
}

struct BenchRow {
    Index m = 0, n = 0, s = 0;
    Conditioning cond = Conditioning::Well;
    std::uint64_t seed = 0;
    std::string solver;
    Index card = 0;
    double F = 0.0;
    double gap = 0.0;
    long matvecs = 0;
    long cgIters = 0;
    double seconds = 0.0;
    std::string status;
    /// Empty unless the run failed.
    std::string error;
};

struct BenchReport {
    std::vector<BenchRow> rows;
    double delta = 0.0;

    bool all_completed() const {
        for (const auto& r : rows)
            if (!r.error.empty() || (r.status != "Optimal" && r.status != "TolReached")) return false;
        return true;
    }
};

struct BenchOptions {
    double delta = 1e-2;
    double tauWell = 0.1;
    double tauIll = 1.0;
    int jobs = 1;
    DeltaOptions solver;
};

/// Runs every solver on one shared instance per spec. Spectral quantities
/// are computed before the clock starts. A failing run is recorded in its
/// row and does not stop the sweep.
inline BenchReport run_benchmark(const std::vector<GenSpec>& specs, const std::vector<SolverKind>& solvers,
                                 const BenchOptions& opt = {}) {
    BenchReport rep;
    rep.delta = opt.delta;
    if (specs.empty()) throw Error(ErrorKind::InvalidInput, "run_benchmark: no specs");
    if (solvers.empty()) return rep;

    struct Task {
        std::size_t spec;
        SolverKind solver;
    };
    std::vector<std::shared_ptr<const LsqInstance>> instances(specs.size());
    std::vector<std::string> gen_errors(specs.size());
    for (std::size_t i = 0; i < specs.size(); ++i) {
        try {
            const double tau = specs[i].cond == Conditioning::Well ? opt.tauWell : opt.tauIll;
            instances[i] = generate(specs[i], tau).inst;
            instances[i]->norm_sq();
            instances[i]->kappa_sq();
        } catch (const std::exception& e) {
            gen_errors[i] = e.what();
        }
    }
    std::vector<Task> tasks;
    for (std::size_t i = 0; i < specs.size(); ++i)
        for (SolverKind s : solvers) tasks.push_back({i, s});
    rep.rows.resize(tasks.size());

    DeltaOptions dopt = opt.solver;
    dopt.recordTrace = false;
    dopt.recordBounds = false;
    auto run = [&](std::size_t t) {
        const Task& task = tasks[t];
        const GenSpec& g = specs[task.spec];
        BenchRow& row = rep.rows[t];
        row.m = g.m;
        row.n = g.n;
        row.s = g.s;
        row.cond = g.cond;
        row.seed = g.seed;
        row.solver = to_string(task.solver);
        if (!gen_errors[task.spec].empty()) {
            row.error = gen_errors[task.spec];
            return;
        }
        try {
            DeltaOptions o = dopt;
            if (task.solver == SolverKind::Npg) o.npgWindow = g.cond == Conditioning::Well ? 5 : 15;
            const auto start = std::chrono::steady_clock::now();
            const DeltaResult r = solve_to_delta(*instances[task.spec], opt.delta, task.solver, std::nullopt, o);
            row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
            row.F = r.FBar;
            row.gap = r.last.gap;
            row.card = static_cast<Index>((r.result.x.array() != 0.0).count());
            row.matvecs = r.result.counters.matvecs + r.boundMatvecs;
            row.cgIters = r.result.counters.cgIters;
            row.status = to_string(r.result.status);
        } catch (const std::exception& e) {
            row.error = e.what();
        }
    };

    const int jobs = std::max(1, opt.jobs);
    if (jobs == 1) {
        for (std::size_t t = 0; t < tasks.size(); ++t) run(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (int j = 0; j < jobs; ++j)
            pool.emplace_back([&] {
                for (std::size_t t = next++; t < tasks.size(); t = next++) run(t);
            });
        for (auto& th : pool) th.join();
    }
    return rep;
}

inline void write_csv(std::ostream& out, const BenchReport& rep) {
    out << "m,n,s,cond,solver,card,F,gap,matvecs,cg_iters,seconds\n";
    char buf[512];
    for (const auto& r : rep.rows) {
        std::snprintf(buf, sizeof buf, "%ld,%ld,%ld,%s,%s,%ld,%.17g,%.17g,%ld,%ld,%.6f\n", static_cast<long>(r.m),
                      static_cast<long>(r.n), static_cast<long>(r.s), to_string(r.cond), r.solver.c_str(),
                      static_cast<long>(r.card), r.F, r.gap, r.matvecs, r.cgIters, r.seconds);
        out << buf;
    }
}

namespace detail {

inline std::string json_escape(const std::string& s) {
    std::string o;
    for (char ch : s) {
        switch (ch) {
            case '"': o += "\\\""; break;
            case '\\': o += "\\\\"; break;
            case '\n': o += "\\n"; break;
            default:
                if (static_cast<unsigned char>(ch) < 0x20) {
                    char b[8];
                    std::snprintf(b, sizeof b, "\\u%04x", ch);
                    o += b;
                } else {
                    o += ch;
                }
        }
    }
    return o;
}

}  // namespace detail

inline void write_json(std::ostream& out, const BenchReport& rep) {
    char buf[768];
    std::snprintf(buf, sizeof buf, "{\"delta\":%.17g,\"rows\":[", rep.delta);
    out << buf;
    for (std::size_t i = 0; i < rep.rows.size(); ++i) {
        const auto& r = rep.rows[i];
        std::snprintf(buf, sizeof buf, "%s{\"cg_iters\":%ld,\"card\":%ld,\"cond\":\"%s\",\"error\":\"", i ? "," : "",
                      r.cgIters, static_cast<long>(r.card), to_string(r.cond));
        out << buf << detail::json_escape(r.error);
        std::snprintf(buf, sizeof buf,
                      "\",\"F\":%.17g,\"gap\":%.17g,\"m\":%ld,\"matvecs\":%ld,\"n\":%ld,\"s\":%ld,\"seconds\":%.6f,"
                      "\"seed\":%" PRIu64 ",\"solver\":\"%s\",\"status\":\"%s\"}",
                      r.F, r.gap, static_cast<long>(r.m), r.matvecs, static_cast<long>(r.n), static_cast<long>(r.s),
                      r.seconds, r.seed, r.solver.c_str(), r.status.c_str());
        out << buf;
    }
    out << "]}\n";
}

}  // namespace gcg
