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

#include "nvqoc/optimization.hpp"

namespace nvqoc {

std::string_view to_string(StopReason r) {
  switch (r) {
    case StopReason::cost_tolerance: return "cost_tolerance";
    case StopReason::gradient_tolerance: return "gradient_tolerance";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::line_search_failed: return "line_search_failed";
    case StopReason::simplex_converged: return "simplex_converged";
    case StopReason::budget_exhausted: return "budget_exhausted";
  }
  return "unknown";
}

}  // namespace nvqoc
