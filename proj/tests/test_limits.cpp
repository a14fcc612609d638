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
#include <gtest/gtest.h>

#include <chrono>
#include <random>

#include "nvqoc/limits.hpp"
#include "oracles.hpp"

namespace nvqoc {
namespace {

using testing::basis_state;
using testing::kPi;

TEST(Qsl, IdenticalStatesGiveZero) {
  std::mt19937_64 rng(1);
  const CVector psi = testing::random_state(3, rng);
  const QslReport r = qsl_bhattacharyya(testing::random_hermitian(3, rng), psi, psi);
  EXPECT_NEAR(r.t_qsl, 0.0, 1e-12);
  EXPECT_FALSE(r.infinite);
}

TEST(Qsl, EigenstateIsInfinite) {
  const auto s = spin_operators(0.5);
  const QslReport r = qsl_bhattacharyya(2.0 * s.sz, basis_state(2, 0), basis_state(2, 1));
  EXPECT_TRUE(r.infinite);
  EXPECT_TRUE(std::isinf(r.t_qsl));
  // Large-norm drift: round-off must not mask the eigenstate.
  NVParameters p;
  const Hamiltonian nv = nv_ground_hamiltonian(p);
  EXPECT_TRUE(qsl_bhattacharyya(nv.drift, basis_state(3, 1), basis_state(3, 0)).infinite);
}

TEST(Qsl, PiPulseBound) {
  const auto s = spin_operators(0.5);
  for (double omega : {0.5, 2.0, 2.0 * kPi * 10.0}) {
    const QslReport r = qsl_bhattacharyya(omega * s.sx, basis_state(2, 0), basis_state(2, 1));
    EXPECT_NEAR(r.delta_e, omega / 2.0, 1e-12 * omega);
    EXPECT_NEAR(r.angle, kPi / 2.0, 1e-12);
    EXPECT_NEAR(r.t_qsl, kPi / omega, 1e-10);
  }
}

TEST(Qsl, PhaseAndShiftInvariance) {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 10; ++i) {
    const CMatrix h = testing::random_hermitian(4, rng);
    const CVector a = testing::random_state(4, rng), b = testing::random_state(4, rng);
    const double t = qsl_bhattacharyya(h, a, b).t_qsl;
    EXPECT_GE(t, 0.0);
    EXPECT_NEAR(qsl_bhattacharyya(h, std::polar(1.0, 0.7) * a, b).t_qsl, t, 1e-12 * t);
    EXPECT_NEAR(qsl_bhattacharyya(h, a, std::polar(1.0, -2.1) * b).t_qsl, t, 1e-12 * t);
    EXPECT_NEAR(qsl_bhattacharyya(CMatrix(h + 3.7 * CMatrix::Identity(4, 4)), a, b).t_qsl, t, 1e-10 * t);
    const double angle = qsl_bhattacharyya(h, a, b).angle;
    EXPECT_GE(angle, 0.0);
    EXPECT_LE(angle, kPi / 2);
  }
}

TEST(Qsl, Preconditions) {
  EXPECT_THROW(qsl_bhattacharyya(CMatrix::Identity(2, 2), 2.0 * basis_state(2, 0), basis_state(2, 1)),
               std::invalid_argument);
  CMatrix nh = CMatrix::Zero(2, 2);
  nh(0, 1) = 1.0;
  EXPECT_THROW(qsl_bhattacharyya(nh, basis_state(2, 0), basis_state(2, 1)), std::invalid_argument);
}

TEST(Qsl, SurrogateUsesPeakAmplitudes) {
  PulseSet p(1.0, 3, 2);
  p.amplitudes() << 0.5, -2.0, 1.0, 0.1, 0.2, -0.3;
  const auto s = spin_operators(0.5);
  const CMatrix h = qsl_surrogate(testing::qubit(0.4), p);
  EXPECT_LT((h - (0.4 * s.sz - 2.0 * s.sx - 0.3 * s.sy)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Controllability, Qubit) {
  const auto s = spin_operators(0.5);
  const auto r = controllability_rank(s.sz, {s.sx, s.sy});
  EXPECT_EQ(r.lie_dim, 3);
  EXPECT_EQ(r.full_dim, 3);
  EXPECT_TRUE(r.controllable);
  // One control already suffices with a non-commuting drift.
  EXPECT_EQ(controllability_rank(s.sz, {s.sx}).lie_dim, 3);
}

TEST(Controllability, DriftOnly) {
  const auto s = spin_operators(0.5);
  const auto r = controllability_rank(s.sz, {});
  EXPECT_EQ(r.lie_dim, 1);
  EXPECT_FALSE(r.controllable);
  EXPECT_EQ(controllability_rank(CMatrix::Zero(2, 2), {}).lie_dim, 0);
  // Identity drift is pure global phase.
  EXPECT_EQ(controllability_rank(CMatrix::Identity(3, 3), {}).lie_dim, 0);
}

TEST(Controllability, SpinOne) {
  const auto start = std::chrono::steady_clock::now();
  const Hamiltonian q = testing::qutrit(units::ghz(2.87));
  const auto r = controllability_rank(q);
  EXPECT_EQ(r.lie_dim, 8);
  EXPECT_TRUE(r.controllable);
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(), 1.0);
  // Without the zero-field drift, S_x and S_y only generate so(3).
  const auto s = spin_operators(1.0);
  EXPECT_EQ(controllability_rank(CMatrix::Zero(3, 3), {s.sx, s.sy}).lie_dim, 3);
}

// Oracle: real rank of the span of random nested commutator words.
int random_word_rank(const std::vector<CMatrix>& gens, std::mt19937_64& rng, int words) {
  const Eigen::Index n = gens[0].rows();
  std::uniform_int_distribution<std::size_t> pick(0, gens.size() - 1);
  std::uniform_int_distribution<int> depth(0, 5);
  RMatrix m(2 * n * n, words);
  for (int w = 0; w < words; ++w) {
    CMatrix x = kI * gens[pick(rng)];
    for (int d = depth(rng); d > 0; --d) x = commutator(kI * gens[pick(rng)], x);
    x -= (x.trace() / static_cast<double>(n)) * CMatrix::Identity(n, n);
    for (Eigen::Index i = 0; i < n * n; ++i) {
      m(2 * i, w) = x.data()[i].real();
      m(2 * i + 1, w) = x.data()[i].imag();
    }
    if (m.col(w).norm() > 0) m.col(w).normalize();
  }
  Eigen::ColPivHouseholderQR<RMatrix> qr(m);
  qr.setThreshold(1e-9);
  return static_cast<int>(qr.rank());
}

TEST(Controllability, MatchesRandomWordOracle) {
  std::mt19937_64 rng(3);
  const auto s1 = spin_operators(1.0);
  const std::vector<std::vector<CMatrix>> cases = {
      {testing::qutrit().drift, s1.sx, s1.sy},
      {CMatrix(s1.sz), s1.sx},
      {CMatrix(s1.sz * s1.sz), CMatrix(s1.sz)},
      {testing::random_hermitian(4, rng), testing::random_hermitian(4, rng)},
  };
  for (const auto& gens : cases) {
    const auto r = controllability_rank(gens[0], std::vector<CMatrix>(gens.begin() + 1, gens.end()));
    EXPECT_EQ(r.lie_dim, random_word_rank(gens, rng, 400));
  }
}

TEST(Controllability, OrderAndScaleInvariant) {
  const auto s = spin_operators(1.0);
  const CMatrix drift = testing::qutrit().drift;
  const int a = controllability_rank(drift, {s.sx, s.sz}).lie_dim;
  EXPECT_EQ(controllability_rank(drift, {s.sz, s.sx}).lie_dim, a);
  EXPECT_EQ(controllability_rank(CMatrix(5.0 * drift), {CMatrix(0.01 * s.sz), CMatrix(300.0 * s.sx)}).lie_dim, a);
}

TEST(Controllability, DimensionCap) {
  const CMatrix big = CMatrix::Identity(10, 10);
  EXPECT_THROW(controllability_rank(big, {}), std::invalid_argument);
  std::mt19937_64 rng(4);
  const auto r = controllability_rank(testing::random_hermitian(9, rng), {testing::random_hermitian(9, rng)});
  EXPECT_EQ(r.lie_dim, 80);
}

}  // namespace
}  // namespace nvqoc
