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

// Cost functions and control-space mappings.
//
// Every cost is zero when its objective is met and positive otherwise. A
// CostSpec combines one terminal cost, any number of running costs on the
// (mapped) pulses and an optional weighted ensemble of Hamiltonian variants.

#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "nvqoc/linalg.hpp"
#include "nvqoc/propagate.hpp"
#include "nvqoc/spinsys.hpp"

namespace nvqoc {

/// Stand-in for +infinity so rankings stay arithmetic-safe.
inline constexpr double kInfiniteCost = 1e18;

enum class PhaseMode {
  modulus,  // global-phase invariant: 1 - |overlap|^2
  fixed,    // phase sensitive:         1 - Re(overlap)
};

/// 1 - |<target|final>|^2, or 1 - Re<final|target> for PhaseMode::fixed.
/// Both states must be normalized to 1e-8.
double j_state(const CVector& final_state, const CVector& target, PhaseMode mode = PhaseMode::modulus);

/// 1 - |Tr(target^dagger U)|^2 / N^2, or 1 - Re Tr(target^dagger U) / N.
double j_gate(const CMatrix& u, const CMatrix& target, PhaseMode mode = PhaseMode::modulus);

/// Discrete outcome distribution p(x | theta).
struct MeasurementModel {
  std::function<RVector(double)> probabilities;
};

struct FisherOptions {
  double step = 1e-4;      // central-difference step in parameter units
  double p_floor = 1e-12;  // outcomes at or below this probability are skipped
};

/// sum_x (dp/dtheta)^2 / p, derivatives by central differences.
double fisher_information(const MeasurementModel& model, double theta0, const FisherOptions& opts = {});

/// 1 / (n_measurements F(theta0)); kInfiniteCost when F == 0.
double j_fisher(const MeasurementModel& model, double theta0, double n_measurements,
                const FisherOptions& opts = {});

/// Squared-hinge power penalty weight * max(0, P/P_lim - 1)^2 with the
/// left-Riemann power P = sum u_k^2 dt.
double j_power(const RVector& pulse, double dt, double p_lim, double weight);

/// eps * sum_k ((u_{k+1} - u_k)/dt)^2 dt.
double j_bandwidth(const RVector& pulse, double dt, double eps);

// --- composite specification -------------------------------------------------

struct StateTransfer {
  CVector initial;
  CVector target;
  PhaseMode phase = PhaseMode::modulus;
};

struct GateTarget {
  CMatrix target;
  PhaseMode phase = PhaseMode::modulus;
};

/// Estimation of a parameter theta entering the drift as H_d + theta * generator.
/// Outcome probabilities come from the projective measurement `povm` applied to
/// the state reached from `initial`.
struct FisherTarget {
  CVector initial;
  CMatrix generator;
  std::vector<CMatrix> povm;
  double theta0 = 0.0;
  double n_measurements = 1.0;
  FisherOptions fisher;
};

using TerminalCost = std::variant<StateTransfer, GateTarget, FisherTarget>;

struct RunningCost {
  enum class Kind { power, bandwidth };
  Kind kind = Kind::power;
  double weight = 0.0;       // power: penalty weight; bandwidth: eps
  double power_limit = 1.0;  // P_lim, power only
  int control = -1;          // -1 applies the term to every control
};

struct EnsembleMember {
  Hamiltonian system;
  double weight = 1.0;
};

struct CostSpec {
  TerminalCost terminal;
  std::vector<RunningCost> running;
  std::vector<EnsembleMember> ensemble;  // empty: evaluate on the nominal system

  /// Throws std::invalid_argument on negative weights, an unnormalized
  /// ensemble, or dimensions inconsistent with `dim`.
  void validate(Eigen::Index dim) const;
};

// --- control mappings ----------------------------------------------------------

struct ClipMapping {
  double u_max = 1.0;
};
struct SineMapping {
  double u_max = 1.0;
};
/// Pointwise envelope; one sample per slice shared by every control.
struct ShapeMapping {
  RVector envelope;
};

using ControlMapping = std::variant<ClipMapping, SineMapping, ShapeMapping>;

PulseSet map_controls(const PulseSet& raw, const ControlMapping& mapping);

/// Element-wise d(mapped)/d(raw). Clip contributes 1 inside [-u_max, u_max]
/// and 0 beyond it.
RMatrix mapping_derivative(const PulseSet& raw, const ControlMapping& mapping);

// --- evaluation ------------------------------------------------------------------

/// Outcome model for a FisherTarget under fixed pulses.
MeasurementModel fisher_model(const Hamiltonian& sys, const PulseSet& pulses, const FisherTarget& target);

/// Terminal cost of physical (already mapped) pulses on one system.
double terminal_cost(const Hamiltonian& sys, const PulseSet& pulses, const TerminalCost& terminal);

/// Sum of running costs on physical pulses.
double running_cost(const PulseSet& pulses, const std::vector<RunningCost>& running);

/// sum_i w_i J(H_i) over the ensemble; throws on an empty ensemble.
double j_robust(const CostSpec& spec, const PulseSet& pulses);

struct CostBreakdown {
  double terminal = 0.0;
  double running = 0.0;
  double total = 0.0;
};

/// Full objective for raw pulses: optional mapping, then the terminal cost
/// (ensemble-averaged when an ensemble is present) plus running costs.
CostBreakdown evaluate_cost(const Hamiltonian& sys, const PulseSet& raw, const CostSpec& spec,
                            const ControlMapping* mapping = nullptr);

/// Ensemble members H_d + offset * detuning_op with controls scaled by
/// `control_scale`, all sharing `base`'s structure.
EnsembleMember ensemble_member(const Hamiltonian& base, const CMatrix& detuning_op, double offset,
                               double control_scale, double weight);

}  // namespace nvqoc
