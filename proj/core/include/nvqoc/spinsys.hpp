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

// Spin operators and NV-center spin Hamiltonians.
//
// Unit conventions used throughout the library (hbar = 1):
//   energies / frequencies   rad/us  (angular frequency; 1 MHz -> 2*pi rad/us)
//   time                     us
//   magnetic field           mT
//   electric field           V/m
//   distance                 nm
//
// Spin-1 S_z is diag(1, 0, -1). Some references print a 1/sqrt(2) prefactor on
// the spin-1 S_z matrix; that form violates [S_x, S_y] = i S_z and is not used.

#pragma once

#include <array>
#include <numbers>
#include <vector>

#include "nvqoc/linalg.hpp"

namespace nvqoc {

namespace units {
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
/// Converts a frequency in MHz to angular frequency in rad/us.
constexpr double mhz(double f) { return kTwoPi * f; }
constexpr double ghz(double f) { return kTwoPi * 1e3 * f; }
constexpr double hz(double f) { return kTwoPi * 1e-6 * f; }
}  // namespace units

using Vec3 = std::array<double, 3>;

struct SpinOperators {
  double s = 0.5;
  CMatrix sx, sy, sz;

  Eigen::Index dim() const { return sz.rows(); }
  CMatrix identity() const { return CMatrix::Identity(dim(), dim()); }
};

/// Standard angular-momentum matrices for s = 1/2 or s = 1.
SpinOperators spin_operators(double s);

struct NucleusSpec {
  double spin = 1.0;         // nuclear spin quantum number
  double axial = 0.0;        // N_axial, rad/us
  double transverse = 0.0;   // N_tran, rad/us
  double gamma = 0.0;        // nuclear gyromagnetic ratio, rad/(us mT)
  double quadrupole = 0.0;   // Q, rad/us

  double fermi_contact() const { return (axial + 2.0 * transverse) / 3.0; }
  double dipolar() const { return (axial - transverse) / 3.0; }
};

/// Ground-state NV parameters. The electric couplings are documented
/// approximations: delta_par ~ 0.17 Hz/(V/m); delta_perp is only known to
/// order 1e-3 Hz/(V/m). Override as needed.
struct NVParameters {
  double D = units::ghz(2.87);
  double E = 0.0;
  double gamma_nv = units::mhz(28.0);  // rad/(us mT)
  Vec3 B{0.0, 0.0, 0.0};
  Vec3 efield{0.0, 0.0, 0.0};
  double delta_par = units::hz(0.17);   // rad/us per V/m
  double delta_perp = units::hz(1e-3);  // rad/us per V/m
  std::vector<NucleusSpec> nuclei;

  void validate() const;
};

/// Drift plus a list of control couplings. Control matrices are dimensionless
/// and scaled at run time by amplitudes in rad/us.
struct Hamiltonian {
  CMatrix drift;
  std::vector<CMatrix> controls;

  Eigen::Index dim() const { return drift.rows(); }
  std::size_t n_controls() const { return controls.size(); }

  /// drift + sum_i amplitudes[i] * controls[i]
  CMatrix at(const Eigen::Ref<const RVector>& amplitudes) const;

  /// Throws std::invalid_argument unless every matrix is Hermitian with the
  /// same dimension.
  void validate() const;
};

inline constexpr Eigen::Index kMaxNvDimension = 81;

/// Full ground-state Hamiltonian: zero-field, electron Zeeman, electric and
/// per-nucleus hyperfine / nuclear Zeeman / quadrupole terms. The electron is
/// the first tensor factor, nuclei follow in declaration order. Controls are
/// the electron S_x and S_y couplings (transverse microwave drive).
Hamiltonian nv_ground_hamiltonian(const NVParameters& p);

/// Point-dipole coupling constant mu0/(4 pi) * gamma^2 / |r|^3 in rad/us for
/// a separation in nm and gamma in rad/(us mT).
double dipolar_coupling(double distance_nm, double gamma);

/// 9x9 NV-NV dipole-dipole Hamiltonian
///   J(r) * (S1.S2 - 3 (S1.r_hat)(S2.r_hat)),  J = dipolar_coupling(|r|, gamma).
Hamiltonian nv_nv_dipole_hamiltonian(const Vec3& r_nm, double gamma = units::mhz(28.0));

/// Two-level rotating-frame Hamiltonian with drift delta * s_z and controls
/// (s_x, s_y). `amplitudes` holds (omega cos phi, omega sin phi).
struct RwaQubit {
  Hamiltonian system;
  std::array<double, 2> amplitudes{0.0, 0.0};

  CMatrix matrix() const;
};

RwaQubit rwa_qubit_hamiltonian(double delta, double omega, double phi);

}  // namespace nvqoc
