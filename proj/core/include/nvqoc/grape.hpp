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

// GRAPE: concurrent gradient descent over piecewise-constant control slices.
//
// The gradient is assembled from forward states phi_k (before slice k) and
// adjoint states xi_k (target propagated back through slices N-1 .. k+1):
//
//   dJ/du_i^(k) = chain( <xi_k| dU_k/du_i^(k) |phi_k> )
//
// dU_k/du is exact. With H_k = V diag(l) V^dagger,
//
//   dU_k/du = V (G o (V^dagger H_i V)) V^dagger,
//   G_ab = -i dt exp(-i (l_a + l_b) dt / 2) sinc((l_a - l_b) dt / 2),
//
// which is the divided difference of exp(-i l dt) written in a form that
// stays accurate through degenerate eigenvalues.

#pragma once

#include <optional>

#include "nvqoc/costs.hpp"
#include "nvqoc/optimization.hpp"

namespace nvqoc {

struct GradientReport {
  RMatrix grad;  // n_controls x n_slices, with respect to raw amplitudes
  double cost = 0.0;
  std::optional<double> fd_check;
};

/// d exp(-i H dt) / du for the direction `direction`, given the eigensystem of H.
CMatrix expm_derivative(const EigenSystem& eig, const CMatrix& direction, double dt);

/// Analytic gradient of evaluate_cost with respect to the raw pulses.
/// Throws UnsupportedError for a Fisher terminal cost.
GradientReport grape_gradient(const Hamiltonian& sys, const PulseSet& pulses, const CostSpec& spec,
                              const ControlMapping* mapping = nullptr);

/// Central-difference gradient of evaluate_cost, for verification.
RMatrix finite_difference_gradient(const Hamiltonian& sys, const PulseSet& pulses, const CostSpec& spec,
                                   double h = 1e-6, const ControlMapping* mapping = nullptr);

/// max |g - g_fd| / max|g_fd|.
double gradient_deviation(const RMatrix& analytic, const RMatrix& numeric);

/// grape_gradient with fd_check filled in.
GradientReport checked_gradient(const Hamiltonian& sys, const PulseSet& pulses, const CostSpec& spec,
                                double h = 1e-6, const ControlMapping* mapping = nullptr);

enum class UpdateRule {
  descent,  // u' = u - eps * grad with backtracking on eps
  lbfgs,    // limited-memory quasi-Newton direction, same line search
};

struct GrapeOptions {
  int max_iters = 200;
  double step = 1.0;  // initial eps
  double tol_cost = 1e-10;
  double tol_grad = 1e-10;
  UpdateRule update = UpdateRule::lbfgs;
  int lbfgs_memory = 10;
  std::optional<ControlMapping> mapping;
  double shrink = 0.5;
  double sufficient_decrease = 1e-4;
  int max_backtracks = 60;

  void validate() const;
};

/// Iterates concurrent updates of every slice until the cost or gradient
/// tolerance is met or max_iters is reached. The accepted-cost trace is
/// non-increasing. With a clip mapping the iterate is projected onto the box
/// after each step.
OptimizationReport grape_optimize(const Hamiltonian& sys, const PulseSet& init, const CostSpec& spec,
                                  const GrapeOptions& opts = {});

}  // namespace nvqoc
