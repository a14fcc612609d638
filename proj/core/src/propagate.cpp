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

#include "nvqoc/propagate.hpp"

#include <cmath>
#include <string>

namespace nvqoc {

PulseSet::PulseSet(double t_final, int n_slices, int n_controls)
    : t_final_(t_final), n_slices_(n_slices), amplitudes_(RMatrix::Zero(n_controls, n_slices > 0 ? n_slices : 0)) {
  validate();
}

PulseSet::PulseSet(double t_final, RMatrix amplitudes)
    : t_final_(t_final), n_slices_(static_cast<int>(amplitudes.cols())), amplitudes_(std::move(amplitudes)) {
  validate();
}

std::vector<double> PulseSet::boundaries() const {
  std::vector<double> t(static_cast<std::size_t>(n_slices_) + 1);
  for (int k = 0; k <= n_slices_; ++k) t[static_cast<std::size_t>(k)] = t_final_ * k / n_slices_;
  return t;
}

std::vector<double> PulseSet::midpoints() const {
  std::vector<double> t(static_cast<std::size_t>(n_slices_));
  for (int k = 0; k < n_slices_; ++k) t[static_cast<std::size_t>(k)] = t_final_ * (k + 0.5) / n_slices_;
  return t;
}

void PulseSet::validate() const {
  if (!(t_final_ > 0.0) || !std::isfinite(t_final_)) {
    throw std::invalid_argument("PulseSet: t_final must be positive and finite");
  }
  if (n_slices_ < 1) throw std::invalid_argument("PulseSet: n_slices must be positive");
  if (amplitudes_.cols() != n_slices_) {
    throw std::invalid_argument("PulseSet: every control needs n_slices amplitudes");
  }
  if (!amplitudes_.allFinite()) throw std::invalid_argument("PulseSet: non-finite amplitude");
}

CMatrix expm_slice(const EigenSystem& eig, double dt) {
  const CVector phases = (eig.values.cast<Complex>() * Complex(0.0, -dt)).array().exp();
  return eig.vectors * phases.asDiagonal() * eig.vectors.adjoint();
}

CMatrix expm_slice(const CMatrix& h, double dt) {
  require_hermitian(h, "expm_slice");
  if (!(dt >= 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("expm_slice: dt must be finite and non-negative");
  }
  if (dt == 0.0) return CMatrix::Identity(h.rows(), h.cols());
  return expm_slice(hermitian_eigen(h), dt);
}

void check_compatible(const Hamiltonian& sys, const PulseSet& pulses) {
  pulses.validate();
  if (static_cast<std::size_t>(pulses.n_controls()) != sys.n_controls()) {
    throw std::invalid_argument("pulse set has " + std::to_string(pulses.n_controls()) +
                                " controls but the Hamiltonian has " + std::to_string(sys.n_controls()));
  }
}

CMatrix slice_hamiltonian(const Hamiltonian& sys, const PulseSet& pulses, int k) {
  return sys.at(pulses.amplitudes().col(k));
}

std::vector<CMatrix> slice_propagators(const Hamiltonian& sys, const PulseSet& pulses) {
  check_compatible(sys, pulses);
  std::vector<CMatrix> out;
  out.reserve(static_cast<std::size_t>(pulses.n_slices()));
  const double dt = pulses.dt();
  for (int k = 0; k < pulses.n_slices(); ++k) {
    out.push_back(expm_slice(hermitian_eigen(slice_hamiltonian(sys, pulses, k)), dt));
  }
  return out;
}

namespace {

void check_state(const Hamiltonian& sys, const CVector& psi0) {
  if (psi0.size() != sys.dim()) throw std::invalid_argument("initial state dimension mismatch");
  if (!all_finite(CMatrix(psi0))) throw std::invalid_argument("initial state has non-finite entries");
  if (std::abs(psi0.norm() - 1.0) > 1e-8) throw std::invalid_argument("initial state is not normalized");
}

}  // namespace

Trajectory propagate(const Hamiltonian& sys, const PulseSet& pulses, const CVector& psi0) {
  sys.validate();
  check_compatible(sys, pulses);
  check_state(sys, psi0);
  Trajectory traj;
  traj.times = pulses.boundaries();
  traj.states.reserve(traj.times.size());
  traj.states.push_back(psi0);
  const double dt = pulses.dt();
  for (int k = 0; k < pulses.n_slices(); ++k) {
    const CMatrix u = expm_slice(hermitian_eigen(slice_hamiltonian(sys, pulses, k)), dt);
    traj.states.push_back(u * traj.states.back());
  }
  if (std::abs(traj.states.back().norm() - 1.0) > 1e-10) {
    throw NumericError("propagate: norm drifted beyond 1e-10");
  }
  return traj;
}

CVector propagate_final(const Hamiltonian& sys, const PulseSet& pulses, const CVector& psi0) {
  check_compatible(sys, pulses);
  check_state(sys, psi0);
  CVector psi = psi0;
  const double dt = pulses.dt();
  for (int k = 0; k < pulses.n_slices(); ++k) {
    psi = expm_slice(hermitian_eigen(slice_hamiltonian(sys, pulses, k)), dt) * psi;
  }
  return psi;
}

CMatrix total_propagator(const Hamiltonian& sys, const PulseSet& pulses) {
  sys.validate();
  check_compatible(sys, pulses);
  CMatrix u = CMatrix::Identity(sys.dim(), sys.dim());
  const double dt = pulses.dt();
  for (int k = 0; k < pulses.n_slices(); ++k) {
    u = expm_slice(hermitian_eigen(slice_hamiltonian(sys, pulses, k)), dt) * u;
  }
  return u;
}

double expectation(const CMatrix& op, const CVector& psi) { return psi.dot(op * psi).real(); }

}  // namespace nvqoc
