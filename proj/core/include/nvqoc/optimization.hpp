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

#include <cstdint>
#include <string_view>
#include <vector>

#include "nvqoc/propagate.hpp"

namespace nvqoc {

enum class StopReason {
  cost_tolerance,
  gradient_tolerance,
  max_iterations,
  line_search_failed,
  simplex_converged,
  budget_exhausted,
};

std::string_view to_string(StopReason r);

/// Result shared by every optimizer.
struct OptimizationReport {
  std::vector<double> cost_trace;  // accepted / best-so-far cost per iteration
  PulseSet pulses;                 // final physical pulses
  double final_cost = 0.0;
  StopReason stop_reason = StopReason::max_iterations;
  std::uint64_t seed = 0;
  int iterations = 0;
  int evaluations = 0;
};

}  // namespace nvqoc
