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

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "gcg/linops.hpp"

namespace gcg {

enum class Status { Optimal, TolReached, Unbounded, CapReached };

inline const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "Optimal";
        case Status::TolReached: return "TolReached";
        case Status::Unbounded: return "Unbounded";
        case Status::CapReached: return "CapReached";
    }
    return "?";
}

enum class StepKind { LineSearch, Tpcg, EtaRaise, Prox };

inline const char* to_string(StepKind s) {
    switch (s) {
        case StepKind::LineSearch: return "LineSearch";
        case StepKind::Tpcg: return "Tpcg";
        case StepKind::EtaRaise: return "EtaRaise";
        case StepKind::Prox: return "Prox";
    }
    return "?";
}

struct IterRecord {
    long k = 0;
    StepKind step = StepKind::LineSearch;
    double F = 0.0;          ///< objective after the step
    double vInf = 0.0;       ///< ||v||_inf after the step
    Index supp = 0;          ///< |I0| after the step
    double eta = 0.0;
    double epsHat = 0.0;
    double fPrev = 0.0;      ///< objective before the step
    /// LineSearch: predicted decrease ||vp||^4 / (2 vp'A vp).
    /// Prox: ||x_next - y||^2 for the prox move.
    double detail = 0.0;
    /// Filled only when support recording is requested.
    IndexSet zeroSet;
    IndexSet tpcgZeroCounts;
    std::vector<bool> tpcgBoundary;  ///< per round: ended on a boundary hit
    Index tpcgInitialFixed = 0;
};

struct SolveCounters {
    long outerIters = 0;
    long lineSearchSteps = 0;
    long tpcgCalls = 0;
    long tpcgRounds = 0;
    long tpcgIterCaps = 0;
    long cgIters = 0;
    long matvecs = 0;
    long etaRaises = 0;
    long proxSteps = 0;
    long backtracks = 0;
};

struct SolveResult {
    VectorXd x;
    double FValue = 0.0;
    double vInfNorm = 0.0;
    Status status = Status::CapReached;
    SolveCounters counters;
    std::vector<IterRecord> trace;
    double F0 = 0.0;
    double etaFinal = 0.0;
    std::string message;
    /// Unbounded only: a direction along which F decreases without bound.
    VectorXd ray;
};

/// One JSON object per trace record.
inline void write_trace_jsonl(std::ostream& out, const std::vector<IterRecord>& trace) {
    char buf[256];
    for (const auto& r : trace) {
        std::snprintf(buf, sizeof buf,
                      "{\"k\":%ld,\"step\":\"%s\",\"F\":%.17g,\"vInf\":%.17g,\"supp\":%ld,\"eta\":%.17g,"
                      "\"epsHat\":%.17g}\n",
                      r.k, to_string(r.step), r.F, r.vInf, static_cast<long>(r.supp), r.eta, r.epsHat);
        out << buf;
    }
}

}  // namespace gcg
