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

// Speed limits and controllability.

#pragma once

#include <vector>

#include "nvqoc/linalg.hpp"
#include "nvqoc/propagate.hpp"
#include "nvqoc/spinsys.hpp"

namespace nvqoc {

struct QslReport {
  double delta_e = 0.0;  // sqrt(<H^2> - <H>^2) on the initial state, rad/us
  double angle = 0.0;    // arccos |<psi0|psit>|
  double t_qsl = 0.0;    // angle / delta_e, us
  bool infinite = false;
};

/// Bhattacharyya bound angle / dE for a time-independent H (hbar = 1).
/// `infinite` is set when dE vanishes (below 1e-12 relative to the scale of
/// H) while the states differ.
QslReport qsl_bhattacharyya(const CMatrix& h, const CVector& psi0, const CVector& psit);

/// Constant-drive surrogate: each control held at its largest-magnitude
/// amplitude. The resulting bound is indicative only for shaped pulses.
CMatrix qsl_surrogate(const Hamiltonian& sys, const PulseSet& pulses);

struct ControllabilityReport {
  int lie_dim = 0;
  int full_dim = 0;  // N^2 - 1
  bool controllable = false;
};

inline constexpr Eigen::Index kMaxControllabilityDimension = 9;

/// Dimension of the real Lie algebra generated by the traceless parts of
/// i H_d and i H_c, via commutator closure with Hilbert-Schmidt
/// orthogonalization.
ControllabilityReport controllability_rank(const CMatrix& drift, const std::vector<CMatrix>& controls);

inline ControllabilityReport controllability_rank(const Hamiltonian& sys) {
  return controllability_rank(sys.drift, sys.controls);
}

}  // namespace nvqoc
