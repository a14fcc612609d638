// Copyright 2026 The nvqoc Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <functional>
#include <vector>

#include "nvqoc/linalg.hpp"
#include "nvqoc/optimization.hpp"

namespace nvqoc {

struct NelderMeadOptions {
  int max_evaluations = 1000;
  double initial_step = 0.1;  // axis-aligned simplex edge length
  double x_tol = 1e-10;       // simplex diameter (max vertex distance from the best)
  double f_tol = 1e-10;       // f_worst - f_best <= f_tol * (1 + |f_best|)
  bool adaptive = true;       // dimension-dependent coefficients (Gao & Han)

  void validate() const;
};

struct NelderMeadResult {
  RVector x;
  double f = 0.0;
  std::vector<double> trace;  // best-so-far value after every evaluation
  int evaluations = 0;
  int iterations = 0;
  int nan_evaluations = 0;    // objective values replaced by +inf
  StopReason stop_reason = StopReason::budget_exhausted;
};

/// Reflect / expand / contract / shrink simplex search. Deterministic for a
/// given start and options. NaN objective values rank as +inf. Requires
/// max_evaluations >= x0.size() + 1.
NelderMeadResult nelder_mead(const std::function<double(const RVector&)>& f, const RVector& x0,
                             const NelderMeadOptions& opts = {});

}  // namespace nvqoc
