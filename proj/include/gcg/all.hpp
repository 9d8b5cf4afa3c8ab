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

#include "gcg/baselines.hpp"
#include "gcg/bench.hpp"
#include "gcg/cg_core.hpp"
#include "gcg/error.hpp"
#include "gcg/face.hpp"
#include "gcg/gcg.hpp"
#include "gcg/linops.hpp"
#include "gcg/lsq.hpp"
#include "gcg/matrix_market.hpp"
#include "gcg/oracle.hpp"
#include "gcg/random.hpp"
#include "gcg/solve_result.hpp"
#include "gcg/subgrad.hpp"
