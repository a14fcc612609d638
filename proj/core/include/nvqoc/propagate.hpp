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

// Piecewise-constant closed-system propagation.
//
// Slice k (0-based) spans [k dt, (k+1) dt) and evolves under
//   H_k = H_d + sum_i u_i^(k) H_i.
// The total propagator is U = U_{N-1} ... U_1 U_0: the rightmost factor acts
// first.

#pragma once

#include <vector>

#include "nvqoc/linalg.hpp"
#include "nvqoc/spinsys.hpp"

namespace nvqoc {

/// Uniform time grid plus one amplitude row per control. Column k holds the
/// amplitudes of slice k, in rad/us.
class PulseSet {
 public:
  PulseSet() = default;
  /// Zero amplitudes.
  PulseSet(double t_final, int n_slices, int n_controls);
  PulseSet(double t_final, RMatrix amplitudes);

  double t_final() const { return t_final_; }
  int n_slices() const { return n_slices_; }
  int n_controls() const { return static_cast<int>(amplitudes_.rows()); }
  double dt() const { return t_final_ / n_slices_; }

  const RMatrix& amplitudes() const { return amplitudes_; }
  RMatrix& amplitudes() { return amplitudes_; }

  /// Slice boundaries t_0 = 0, ..., t_N = t_final.
  std::vector<double> boundaries() const;
  /// Slice midpoints, the instants at which analytic waveforms are sampled.
  std::vector<double> midpoints() const;

  /// Throws std::invalid_argument on a non-positive duration / slice count or
  /// non-finite amplitudes.
  void validate() const;

  bool operator==(const PulseSet&) const = default;

 private:
  double t_final_ = 1.0;
  int n_slices_ = 1;
  RMatrix amplitudes_;
};

struct Trajectory {
  std::vector<double> times;    // n_slices + 1 instants
  std::vector<CVector> states;  // state at each instant
};

/// exp(-i H dt) via Hermitian eigendecomposition.
CMatrix expm_slice(const CMatrix& h, double dt);

/// Same, reusing an existing eigensystem of H.
CMatrix expm_slice(const EigenSystem& eig, double dt);

/// H_d + sum_i u_i^(k) H_i for slice k.
CMatrix slice_hamiltonian(const Hamiltonian& sys, const PulseSet& pulses, int k);

Trajectory propagate(const Hamiltonian& sys, const PulseSet& pulses, const CVector& psi0);

/// Final state only; avoids storing the trajectory.
CVector propagate_final(const Hamiltonian& sys, const PulseSet& pulses, const CVector& psi0);

CMatrix total_propagator(const Hamiltonian& sys, const PulseSet& pulses);

/// Per-slice propagators U_0 .. U_{N-1}.
std::vector<CMatrix> slice_propagators(const Hamiltonian& sys, const PulseSet& pulses);

/// <psi|O|psi>
double expectation(const CMatrix& op, const CVector& psi);

/// Throws std::invalid_argument unless sys and pulses agree on control count
/// and dimension, and std::invalid_argument for non-finite amplitudes.
void check_compatible(const Hamiltonian& sys, const PulseSet& pulses);

}  // namespace nvqoc
