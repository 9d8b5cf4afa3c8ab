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

// Command-line front end: solve, gen, bench, oracle.
//
// Exit codes: 0 success, 1 bad input, 2 unbounded, 3 iteration cap,
// 4 benchmark rows that did not complete.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gcg/all.hpp"

namespace {

using gcg::Index;
using gcg::VectorXd;
using nlohmann::json;

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

LogLevel log_level() {
    const char* env = std::getenv("GCG_LOG");
    if (!env) return LogLevel::Error;
    const std::string v = env;
    if (v == "debug") return LogLevel::Debug;
    if (v == "info") return LogLevel::Info;
    return LogLevel::Error;
}

void log(LogLevel at, const std::string& msg) {
    if (log_level() >= at) std::cerr << "gcg: " << msg << '\n';
}

/// Input problems that should exit 1 rather than look like solver results.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

json to_json(const VectorXd& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json counters_json(const gcg::SolveCounters& c) {
    return {{"outerIters", c.outerIters}, {"lineSearchSteps", c.lineSearchSteps}, {"tpcgCalls", c.tpcgCalls},
            {"tpcgRounds", c.tpcgRounds}, {"cgIters", c.cgIters},             {"matvecs", c.matvecs},
            {"etaRaises", c.etaRaises},   {"proxSteps", c.proxSteps},         {"backtracks", c.backtracks}};
}

int status_exit(gcg::Status s) {
    switch (s) {
        case gcg::Status::Optimal:
        case gcg::Status::TolReached: return 0;
        case gcg::Status::Unbounded: return 2;
        case gcg::Status::CapReached: return 3;
    }
    return 1;
}

void emit(const json& j, const std::string& path) {
    if (path.empty()) {
        std::cout << j.dump(2) << '\n';
        return;
    }
    std::ofstream out(path);
    if (!out) throw gcg::Error(gcg::ErrorKind::Io, "cannot write " + path);
    out << j.dump(2) << '\n';
}

// ---- solve ---------------------------------------------------------------

struct SolveArgs {
    std::string a, b, x0, trace, out;
    bool lsq = false;
    std::optional<double> tau, delta, eps, eta0, rho, xi, t;
    std::optional<std::uint64_t> seed;
    std::string solver = "gcg3";
    long iterCap = 0;
};

int cmd_solve(const SolveArgs& args) {
    const auto kind = gcg::solver_from_string(args.solver);
    if (!kind) throw UsageError("unknown solver '" + args.solver + "'");
    if (!args.tau) throw UsageError("--tau is required");
    if (args.delta && args.eps) throw UsageError("give --delta or --eps, not both");
    if (args.delta && !args.lsq) throw UsageError("--delta needs least-squares input (--lsq)");

    const gcg::MatrixXd a = gcg::io::read_matrix_market(args.a);
    const VectorXd b = gcg::io::read_vector(args.b);
    log(LogLevel::Info, "read " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) + " matrix");

    std::optional<gcg::LsqInstance> inst;
    std::optional<gcg::QpProblem> qp;
    if (args.lsq) {
        inst.emplace(a, b, *args.tau);
    } else {
        qp.emplace(gcg::SymPsdOperator::dense(a), b, *args.tau);
    }
    const gcg::QpProblem& prob = inst ? inst->problem() : *qp;
    const Index n = prob.dim();

    VectorXd x0 = VectorXd::Zero(n);
    if (!args.x0.empty()) {
        x0 = gcg::io::read_vector(args.x0);
        if (x0.size() != n) throw UsageError("x0 has the wrong length");
    } else if (args.seed) {
        gcg::Rng rng(*args.seed);
        x0 = rng.normal_vector(n);
    }

    gcg::GcgConfig cfg;
    if (args.eta0) cfg.eta0 = *args.eta0;
    if (args.rho) cfg.rho = *args.rho;
    if (args.xi) cfg.xi = *args.xi;
    if (args.t) cfg.t = *args.t;
    cfg.iterCap = args.iterCap;
    if (inst && !cfg.eta0) cfg.eta0 = inst->kappa_sq();

    gcg::SolveResult res;
    json extra;
    if (inst && !args.eps) {
        gcg::DeltaOptions opt;
        opt.gcg = cfg;
        if (args.iterCap > 0) opt.baselineIterCap = args.iterCap;
        const double delta = args.delta.value_or(1e-2);
        gcg::DeltaResult dr = gcg::solve_to_delta(*inst, delta, *kind, x0, opt);
        res = std::move(dr.result);
        extra = {{"delta", delta}, {"eps", dr.eps}, {"gap", dr.last.gap}, {"fLow", dr.last.best}};
    } else {
        const double eps = args.eps.value_or(1e-8);
        const double L = prob.op->norm_estimate() > 0.0 ? prob.op->norm_estimate() : 1.0;
        switch (*kind) {
            case gcg::SolverKind::Fista: {
                gcg::FistaConfig fc;
                fc.L = L;
                if (args.iterCap > 0) fc.iterCap = args.iterCap;
                res = gcg::fista(prob, x0, fc, gcg::StopRule{eps, {}});
                break;
            }
            case gcg::SolverKind::Npg: {
                gcg::NpgConfig nc;
                nc.L = L;
                if (args.iterCap > 0) nc.iterCap = args.iterCap;
                res = gcg::npg(prob, x0, nc, gcg::StopRule{eps, {}});
                break;
            }
            default: {
                cfg.eps = eps;
                const gcg::GcgMethod m = *kind == gcg::SolverKind::Gcg1    ? gcg::GcgMethod::Gcg1
                                         : *kind == gcg::SolverKind::Gcg2v ? gcg::GcgMethod::Gcg2v
                                         : *kind == gcg::SolverKind::Gcg3  ? gcg::GcgMethod::Gcg3
                                                                           : gcg::GcgMethod::Gcg4;
                res = gcg::solve_gcg(m, prob, x0, cfg);
                break;
            }
        }
        extra = {{"eps", eps}};
    }

    if (!args.trace.empty()) {
        std::ofstream tr(args.trace);
        if (!tr) throw gcg::Error(gcg::ErrorKind::Io, "cannot write " + args.trace);
        gcg::write_trace_jsonl(tr, res.trace);
    }
    if (log_level() >= LogLevel::Debug) gcg::write_trace_jsonl(std::cerr, res.trace);

    // Least-squares runs report Fbar; the QP value differs by |bbar|^2 / 2.
    const double shift = inst ? 0.5 * inst->bbar().squaredNorm() : 0.0;
    json j = {{"solver", args.solver},
              {"status", gcg::to_string(res.status)},
              {"F", res.FValue + shift},
              {"F0", res.F0 + shift},
              {"vInf", res.vInfNorm},
              {"card", (res.x.array() != 0.0).count()},
              {"x", to_json(res.x)},
              {"counters", counters_json(res.counters)},
              {"message", res.message}};
    for (auto& [k, v] : extra.items()) j[k] = v;
    if (res.status == gcg::Status::Unbounded) j["ray"] = to_json(res.ray);
    emit(j, args.out);
    log(LogLevel::Info, std::string("status ") + gcg::to_string(res.status));
    return status_exit(res.status);
}

// ---- gen -----------------------------------------------------------------

struct GenArgs {
    gcg::GenSpec spec;
    std::string cond = "well";
    std::optional<double> tau;
    std::string outDir;
};

int cmd_gen(GenArgs args) {
    const auto cond = gcg::conditioning_from_string(args.cond);
    if (!cond) throw UsageError("--cond must be well or ill");
    args.spec.cond = *cond;
    const gcg::Generated g = gcg::generate(args.spec, args.tau);
    namespace fs = std::filesystem;
    fs::create_directories(args.outDir);
    const fs::path dir(args.outDir);
    gcg::io::write_matrix_market((dir / "A.mtx").string(), g.inst->abar());
    gcg::io::write_vector((dir / "b.txt").string(), g.inst->bbar());
    gcg::io::write_vector((dir / "xtilde.txt").string(), g.xTilde);
    const json meta = {{"m", args.spec.m},         {"n", args.spec.n},        {"s", args.spec.s},
                       {"sigma", args.spec.sigma}, {"cond", args.cond},       {"seed", args.spec.seed},
                       {"seedUsed", g.seedUsed},   {"tau", g.inst->tau()},    {"support", g.support},
                       {"A", "A.mtx"},             {"b", "b.txt"},            {"xtilde", "xtilde.txt"}};
    emit(meta, (dir / "instance.json").string());
    log(LogLevel::Info, "wrote instance to " + args.outDir);
    return 0;
}

// ---- bench ---------------------------------------------------------------

struct BenchArgs {
    bool table1 = false, table2 = false;
    std::string specFile;
    std::string solvers = "gcg2v,gcg3,gcg4,fista,npg";
    double delta = 1e-2;
    std::uint64_t seed = 1;
    int rows = 10;
    int jobs = 1;
    double tauWell = 0.1, tauIll = 1.0;
    long baselineCap = 100000;
    std::string outCsv, outJson;
};

std::vector<gcg::GenSpec> read_spec_file(const std::string& path, std::uint64_t default_seed) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot open " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw UsageError(path + ": " + e.what());
    }
    if (!j.is_array()) j = json::array({j});
    std::vector<gcg::GenSpec> out;
    for (const auto& e : j) {
        gcg::GenSpec g;
        try {
            g.m = e.at("m").get<Index>();
            g.n = e.at("n").get<Index>();
            g.s = e.at("s").get<Index>();
            g.sigma = e.value("sigma", 1e-5);
            g.seed = e.value("seed", default_seed);
            const auto c = gcg::conditioning_from_string(e.value("cond", std::string("well")));
            if (!c) throw UsageError(path + ": cond must be well or ill");
            g.cond = *c;
        } catch (const json::exception& ex) {
            throw UsageError(path + ": " + ex.what());
        }
        g.validate();
        out.push_back(g);
    }
    return out;
}

int cmd_bench(const BenchArgs& args) {
    const int sources = int(args.table1) + int(args.table2) + int(!args.specFile.empty());
    if (sources != 1) throw UsageError("give exactly one of --table1, --table2, --spec");
    if (args.rows < 1 || args.rows > 10) throw UsageError("--rows must lie in 1..10");
    std::vector<gcg::GenSpec> specs;
    if (args.table1) specs = gcg::table_preset(gcg::Conditioning::Well, args.seed, args.rows);
    if (args.table2) specs = gcg::table_preset(gcg::Conditioning::Ill, args.seed, args.rows);
    if (!args.specFile.empty()) specs = read_spec_file(args.specFile, args.seed);

    std::vector<gcg::SolverKind> solvers;
    std::stringstream ss(args.solvers);
    for (std::string tok; std::getline(ss, tok, ',');) {
        if (tok.empty()) continue;
        const auto k = gcg::solver_from_string(tok);
        if (!k) throw UsageError("unknown solver '" + tok + "'");
        solvers.push_back(*k);
    }

    gcg::BenchOptions opt;
    opt.delta = args.delta;
    opt.jobs = args.jobs;
    opt.tauWell = args.tauWell;
    opt.tauIll = args.tauIll;
    opt.solver.baselineIterCap = args.baselineCap;
    if (!(opt.delta > 0.0)) throw UsageError("--delta must be > 0");
    if (args.baselineCap < 1) throw UsageError("--baseline-cap must be >= 1");
    const gcg::BenchReport rep = gcg::run_benchmark(specs, solvers, opt);

    if (!args.outCsv.empty()) {
        std::ofstream out(args.outCsv);
        if (!out) throw gcg::Error(gcg::ErrorKind::Io, "cannot write " + args.outCsv);
        gcg::write_csv(out, rep);
    } else {
        gcg::write_csv(std::cout, rep);
    }
    if (!args.outJson.empty()) {
        std::ofstream out(args.outJson);
        if (!out) throw gcg::Error(gcg::ErrorKind::Io, "cannot write " + args.outJson);
        gcg::write_json(out, rep);
    }
    for (const auto& r : rep.rows) {
        std::ostringstream line;
        line << r.m << "x" << r.n << " " << gcg::to_string(r.cond) << " " << r.solver << " " << r.status << " F="
             << r.F << " gap=" << r.gap << " card=" << r.card << " " << r.seconds << "s";
        if (!r.error.empty()) line << " error: " << r.error;
        log(LogLevel::Info, line.str());
    }
    return rep.all_completed() ? 0 : 4;
}

// ---- oracle --------------------------------------------------------------

struct OracleArgs {
    std::string a, b;
    std::optional<double> tau;
    bool lsq = false;
};

int cmd_oracle(const OracleArgs& args) {
    if (!args.tau) throw UsageError("--tau is required");
    const gcg::MatrixXd a = gcg::io::read_matrix_market(args.a);
    const VectorXd b = gcg::io::read_vector(args.b);
    gcg::OracleResult r;
    double shift = 0.0;
    if (args.lsq) {
        const gcg::LsqInstance inst(a, b, *args.tau);
        if (inst.dim() > gcg::kOracleMaxDim) throw UsageError("oracle: n is limited to 14");
        r = gcg::oracle_solve(inst.problem());
        shift = 0.5 * b.squaredNorm();
    } else {
        if (a.rows() > gcg::kOracleMaxDim) throw UsageError("oracle: n is limited to 14");
        r = gcg::oracle_solve(gcg::QpProblem(gcg::SymPsdOperator::dense(a), b, *args.tau));
    }
    const bool finite = r.status == gcg::OracleResult::Status::Finite;
    json j = {{"status", finite ? "Finite" : "UnboundedBelow"},
              {"fStar", finite ? json(r.fStar + shift) : json(nullptr)},
              {"xStar", to_json(r.xStar)},
              {"facesEvaluated", r.facesEvaluated}};
    if (!finite) j["ray"] = to_json(r.ray);
    emit(j, "");
    return finite ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Active-set solvers for l1-regularized convex quadratic programs"};
    app.require_subcommand(1);

    SolveArgs sa;
    auto* solve = app.add_subcommand("solve", "Solve one instance");
    solve->add_option("--A", sa.a, "MatrixMarket file: A, or Abar with --lsq")->required()->check(CLI::ExistingFile);
    solve->add_option("--b", sa.b, "Vector file: b, or bbar with --lsq")->required()->check(CLI::ExistingFile);
    solve->add_option("--tau", sa.tau, "l1 weight");
    solve->add_flag("--lsq", sa.lsq, "Inputs are Abar and bbar of 1/2|Abar x - bbar|^2 + tau|x|_1");
    solve->add_option("--solver", sa.solver, "gcg1, gcg2v, gcg3, gcg4, fista or npg")->capture_default_str();
    solve->add_option("--delta", sa.delta, "Target objective gap (least-squares input)");
    solve->add_option("--eps", sa.eps, "Stop once |v|_inf <= eps");
    solve->add_option("--eta0", sa.eta0, "Initial eta");
    solve->add_option("--rho", sa.rho, "Eta growth factor");
    solve->add_option("--xi", sa.xi, "Decay of the gcg4 inner tolerance");
    solve->add_option("--t", sa.t, "gcg4 prox step");
    solve->add_option("--seed", sa.seed, "Start from a standard normal x0 drawn with this seed");
    solve->add_option("--x0", sa.x0, "Start point file")->check(CLI::ExistingFile);
    solve->add_option("--iter-cap", sa.iterCap, "Outer iteration cap (0 = solver default)");
    solve->add_option("--trace", sa.trace, "Write the iteration trace as JSON lines");
    solve->add_option("--out", sa.out, "Write the result JSON here instead of stdout");

    GenArgs ga;
    auto* gen = app.add_subcommand("gen", "Generate a random least-squares instance");
    gen->add_option("--m", ga.spec.m)->required();
    gen->add_option("--n", ga.spec.n)->required();
    gen->add_option("--s", ga.spec.s)->required();
    gen->add_option("--sigma", ga.spec.sigma)->capture_default_str();
    gen->add_option("--cond", ga.cond, "well or ill")->capture_default_str();
    gen->add_option("--seed", ga.spec.seed)->capture_default_str();
    gen->add_option("--tau", ga.tau, "Recorded tau (default 0.1 well, 1 ill)");
    gen->add_option("--out-dir", ga.outDir)->required();

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Run the solver comparison sweep");
    bench->add_flag("--table1", ba.table1, "Ten well-conditioned rows k*(120, 512, 20)");
    bench->add_flag("--table2", ba.table2, "Ten ill-conditioned rows k*(120, 512, 20)");
    bench->add_option("--spec", ba.specFile, "JSON list of {m, n, s, sigma, cond, seed}");
    bench->add_option("--rows", ba.rows, "Use only the first rows of a table preset")->capture_default_str();
    bench->add_option("--solvers", ba.solvers)->capture_default_str();
    bench->add_option("--delta", ba.delta)->capture_default_str();
    bench->add_option("--seed", ba.seed)->capture_default_str();
    bench->add_option("--jobs", ba.jobs)->capture_default_str();
    bench->add_option("--tau-well", ba.tauWell)->capture_default_str();
    bench->add_option("--tau-ill", ba.tauIll)->capture_default_str();
    bench->add_option("--baseline-cap", ba.baselineCap, "Iteration cap for fista and npg")->capture_default_str();
    bench->add_option("--out-csv", ba.outCsv, "CSV report (stdout when omitted)");
    bench->add_option("--out-json", ba.outJson, "JSON report");

    OracleArgs oa;
    auto* oracle = app.add_subcommand("oracle", "Exact minimum by enumeration (n <= 14)");
    oracle->add_option("--A", oa.a)->required()->check(CLI::ExistingFile);
    oracle->add_option("--b", oa.b)->required()->check(CLI::ExistingFile);
    oracle->add_option("--tau", oa.tau);
    oracle->add_flag("--lsq", oa.lsq);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*solve) return cmd_solve(sa);
        if (*gen) return cmd_gen(ga);
        if (*bench) return cmd_bench(ba);
        if (*oracle) return cmd_oracle(oa);
    } catch (const UsageError& e) {
        std::cerr << "gcg: " << e.what() << '\n';
        return 1;
    } catch (const gcg::Error& e) {
        std::cerr << "gcg: " << e.what() << '\n';
        return e.kind() == gcg::ErrorKind::UnboundedObjective ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "gcg: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
