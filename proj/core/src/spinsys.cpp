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

#include "nvqoc/spinsys.hpp"

#include <cmath>
#include <string>

namespace nvqoc {

namespace {

// SI constants for the dipolar prefactor.
constexpr double kMu0Over4Pi = 1e-7;              // T m / A
constexpr double kHbar = 1.054571817e-34;         // J s
constexpr double kGammaToSi = 1e9;                // rad/(us mT) -> rad/(s T)

bool is_half(double s) { return std::abs(s - 0.5) < 1e-12; }
bool is_one(double s) { return std::abs(s - 1.0) < 1e-12; }

bool finite3(const Vec3& v) {
  return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]);
}

// Embeds `op` acting on factor `slot` into the full product space.
CMatrix embed(const CMatrix& op, std::size_t slot, const std::vector<Eigen::Index>& dims) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    out = kron(out, i == slot ? op : CMatrix::Identity(dims[i], dims[i]));
  }
  return out;
}

CMatrix embed_pair(const CMatrix& a, std::size_t slot_a, const CMatrix& b, std::size_t slot_b,
                   const std::vector<Eigen::Index>& dims) {
  CMatrix out = CMatrix::Identity(1, 1);
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (i == slot_a) {
      out = kron(out, a);
    } else if (i == slot_b) {
      out = kron(out, b);
    } else {
      out = kron(out, CMatrix::Identity(dims[i], dims[i]));
    }
  }
  return out;
}

}  // namespace

SpinOperators spin_operators(double s) {
  SpinOperators ops;
  ops.s = s;
  if (is_half(s)) {
    ops.sx = CMatrix::Zero(2, 2);
    ops.sy = CMatrix::Zero(2, 2);
    ops.sz = CMatrix::Zero(2, 2);
    ops.sx << 0.0, 0.5, 0.5, 0.0;
    ops.sy << 0.0, Complex(0.0, -0.5), Complex(0.0, 0.5), 0.0;
    ops.sz << 0.5, 0.0, 0.0, -0.5;
    return ops;
  }
  if (is_one(s)) {
    const double r = 1.0 / std::sqrt(2.0);
    ops.sx = CMatrix::Zero(3, 3);
    ops.sy = CMatrix::Zero(3, 3);
    ops.sz = CMatrix::Zero(3, 3);
    ops.sx(0, 1) = ops.sx(1, 0) = ops.sx(1, 2) = ops.sx(2, 1) = r;
    ops.sy(0, 1) = ops.sy(1, 2) = Complex(0.0, -r);
    ops.sy(1, 0) = ops.sy(2, 1) = Complex(0.0, r);
    ops.sz(0, 0) = 1.0;
    ops.sz(2, 2) = -1.0;
    return ops;
  }
  throw std::invalid_argument("spin_operators: only s = 1/2 and s = 1 are supported, got " +
                              std::to_string(s));
}

void NVParameters::validate() const {
  for (double v : {D, E, gamma_nv, delta_par, delta_perp}) {
    if (!std::isfinite(v)) throw std::invalid_argument("NVParameters: non-finite scalar parameter");
  }
  if (!finite3(B) || !finite3(efield)) {
    throw std::invalid_argument("NVParameters: non-finite field vector");
  }
  Eigen::Index dim = 3;
  for (const auto& n : nuclei) {
    if (!is_half(n.spin) && !is_one(n.spin)) {
      throw std::invalid_argument("NVParameters: nuclear spin must be 1/2 or 1");
    }
    for (double v : {n.axial, n.transverse, n.gamma, n.quadrupole}) {
      if (!std::isfinite(v)) throw std::invalid_argument("NVParameters: non-finite nucleus parameter");
    }
    dim *= static_cast<Eigen::Index>(std::lround(2.0 * n.spin + 1.0));
  }
  if (dim > kMaxNvDimension) {
    throw std::invalid_argument("NVParameters: Hilbert dimension " + std::to_string(dim) +
                                " exceeds the cap of " + std::to_string(kMaxNvDimension));
  }
}

CMatrix Hamiltonian::at(const Eigen::Ref<const RVector>& amplitudes) const {
  if (static_cast<std::size_t>(amplitudes.size()) != controls.size()) {
    throw std::invalid_argument("Hamiltonian::at: amplitude count does not match control count");
  }
  CMatrix h = drift;
  for (std::size_t i = 0; i < controls.size(); ++i) {
    h += amplitudes[static_cast<Eigen::Index>(i)] * controls[i];
  }
  return h;
}

void Hamiltonian::validate() const {
  require_hermitian(drift, "drift");
  for (std::size_t i = 0; i < controls.size(); ++i) {
    if (controls[i].rows() != drift.rows() || controls[i].cols() != drift.cols()) {
      throw std::invalid_argument("control " + std::to_string(i) + ": dimension differs from drift");
    }
    require_hermitian(controls[i], "control " + std::to_string(i));
  }
}

Hamiltonian nv_ground_hamiltonian(const NVParameters& p) {
  p.validate();
  const SpinOperators s = spin_operators(1.0);
  std::vector<Eigen::Index> dims{3};
  std::vector<SpinOperators> nuc;
  for (const auto& n : p.nuclei) {
    nuc.push_back(spin_operators(n.spin));
    dims.push_back(nuc.back().dim());
  }

  const CMatrix id3 = s.identity();
  const CMatrix sz2 = s.sz * s.sz;
  const CMatrix sx2_minus_sy2 = s.sx * s.sx - s.sy * s.sy;
  const CMatrix axial_form = sz2 - (2.0 / 3.0) * id3;

  CMatrix electron = p.D * axial_form + p.E * sx2_minus_sy2;
  electron += p.gamma_nv * (p.B[0] * s.sx + p.B[1] * s.sy + p.B[2] * s.sz);
  electron += p.delta_par * p.efield[2] * axial_form;
  electron -= p.delta_perp * (p.efield[0] * (s.sx * s.sy + s.sy * s.sx) + p.efield[1] * sx2_minus_sy2);

  Hamiltonian h;
  h.drift = embed(electron, 0, dims);
  for (std::size_t i = 0; i < nuc.size(); ++i) {
    const auto& n = p.nuclei[i];
    const auto& I = nuc[i];
    const std::size_t slot = i + 1;
    h.drift += n.transverse * (embed_pair(s.sx, 0, I.sx, slot, dims) + embed_pair(s.sy, 0, I.sy, slot, dims));
    h.drift += n.axial * embed_pair(s.sz, 0, I.sz, slot, dims);
    h.drift += n.gamma * embed(p.B[0] * I.sx + p.B[1] * I.sy + p.B[2] * I.sz, slot, dims);
    h.drift += n.quadrupole * embed(I.sz * I.sz, slot, dims);
  }
  h.controls = {embed(s.sx, 0, dims), embed(s.sy, 0, dims)};
  h.validate();
  return h;
}

double dipolar_coupling(double distance_nm, double gamma) {
  if (!(distance_nm > 0.0) || !std::isfinite(distance_nm)) {
    throw std::invalid_argument("dipolar_coupling: distance must be positive and finite");
  }
  const double g = gamma * kGammaToSi;
  const double r = distance_nm * 1e-9;
  const double rad_per_s = kMu0Over4Pi * kHbar * g * g / (r * r * r);
  return rad_per_s * 1e-6;
}

Hamiltonian nv_nv_dipole_hamiltonian(const Vec3& r_nm, double gamma) {
  if (!finite3(r_nm)) throw std::invalid_argument("nv_nv_dipole_hamiltonian: non-finite displacement");
  const double norm = std::sqrt(r_nm[0] * r_nm[0] + r_nm[1] * r_nm[1] + r_nm[2] * r_nm[2]);
  if (norm == 0.0) {
    throw std::invalid_argument("nv_nv_dipole_hamiltonian: zero displacement is singular");
  }
  const SpinOperators s = spin_operators(1.0);
  const std::array<const CMatrix*, 3> ops{&s.sx, &s.sy, &s.sz};
  const Vec3 n{r_nm[0] / norm, r_nm[1] / norm, r_nm[2] / norm};

  CMatrix dot = CMatrix::Zero(9, 9);
  CMatrix s1r = CMatrix::Zero(3, 3);
  for (int a = 0; a < 3; ++a) {
    dot += kron(*ops[a], *ops[a]);
    s1r += n[a] * *ops[a];
  }
  const CMatrix proj = kron(s1r, s1r);

  Hamiltonian h;
  h.drift = dipolar_coupling(norm, gamma) * (dot - 3.0 * proj);
  h.validate();
  return h;
}

CMatrix RwaQubit::matrix() const {
  return system.at(Eigen::Map<const RVector>(amplitudes.data(), 2));
}

RwaQubit rwa_qubit_hamiltonian(double delta, double omega, double phi) {
  const SpinOperators s = spin_operators(0.5);
  RwaQubit q;
  q.system.drift = delta * s.sz;
  q.system.controls = {s.sx, s.sy};
  q.amplitudes = {omega * std::cos(phi), omega * std::sin(phi)};
  return q;
}

}  // namespace nvqoc
