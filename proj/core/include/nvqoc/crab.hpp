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

// Chopped random-basis optimization.
//
// Each control is expanded as
//   u(t) = base(t) + sum_l [A_l sin(w_l t) + B_l cos(w_l t)],
// with w_l = (w_max / N_be)(l + r_l - 1/2), r_l uniform in (-1/2, 1/2), so
// every frequency sits in its own sub-band of (0, w_max). The 2 N_be
// coefficients per control are searched with Nelder-Mead. dCRAB repeats this
// with fresh bases, freezing each superiteration's result into `base`.

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "nvqoc/costs.hpp"
#include "nvqoc/nelder_mead.hpp"
#include "nvqoc/optimization.hpp"
#include "nvqoc/rng.hpp"

namespace nvqoc {

struct TimeGrid {
  double t_final = 1.0;
  int n_slices = 1;

  void validate() const;
};

struct CrabBasis {
  std::vector<double> omegas;  // rad/us, one per sub-band
  double omega_max = 0.0;
  std::uint64_t seed = 0;

  int size() const { return static_cast<int>(omegas.size()); }
};

/// The customary bandwidth 2 pi N_be / T.
double default_omega_max(int n_be, double t_final);

CrabBasis sample_basis(int n_be, double omega_max, std::uint64_t seed);

/// Deterministic basis with explicit offsets r_l in [-1/2, 1/2].
CrabBasis basis_from_offsets(double omega_max, std::span<const double> offsets);

/// Coefficients, one row per control, one column per basis element.
struct CrabParams {
  RMatrix a;  // sine
  RMatrix b;  // cosine

  static CrabParams zeros(int n_controls, int n_be);
  /// Packs as [a row 0, b row 0, a row 1, b row 1, ...].
  RVector flatten() const;
  static CrabParams unflatten(const RVector& x, int n_controls, int n_be);
};

/// Raw (unmapped) expansion sampled at slice midpoints, added to `base`.
PulseSet expand_raw(const CrabParams& params, const CrabBasis& basis, const TimeGrid& grid,
                    const PulseSet* base = nullptr);

/// expand_raw followed by the optional mapping.
PulseSet expand_pulse(const CrabParams& params, const CrabBasis& basis, const TimeGrid& grid,
                      const ControlMapping* mapping = nullptr, const PulseSet* base = nullptr);

/// Cost of physical pulses.
using PulseObjective = std::function<double(const PulseSet&)>;

struct CrabOptions {
  int max_evaluations = 2000;  // 0 evaluates the initial guess only
  double simplex_step = 0.1;   // rad/us
  double f_tol = 1e-10;
  double x_tol = 1e-12;
  std::optional<ControlMapping> mapping;
  std::optional<PulseSet> guess;  // raw pulses the expansion is added to

  void validate() const;
};

OptimizationReport crab_optimize(const PulseObjective& cost, const TimeGrid& grid, int n_controls,
                                 const CrabBasis& basis, const CrabOptions& opts = {});

OptimizationReport crab_optimize(const Hamiltonian& sys, const TimeGrid& grid, const CostSpec& spec,
                                 const CrabBasis& basis, const CrabOptions& opts = {});

struct DcrabOptions {
  int n_superiterations = 5;
  int n_basis = 5;
  double omega_max = 0.0;  // <= 0 selects default_omega_max
  int evaluations_per_superiteration = 400;
  double simplex_step = 0.1;
  double f_tol = 1e-10;
  double x_tol = 1e-12;
  std::uint64_t seed = kDefaultSeed;
  std::optional<ControlMapping> mapping;
  std::optional<PulseSet> guess;

  void validate(int n_controls) const;
};

OptimizationReport dcrab_optimize(const PulseObjective& cost, const TimeGrid& grid, int n_controls,
                                  const DcrabOptions& opts = {});

OptimizationReport dcrab_optimize(const Hamiltonian& sys, const TimeGrid& grid, const CostSpec& spec,
                                  const DcrabOptions& opts = {});

}  // namespace nvqoc
