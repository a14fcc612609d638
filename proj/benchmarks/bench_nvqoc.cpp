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

// Throughput of the hot paths: slice propagation, GRAPE gradients, CRAB
// objective evaluation, filter functions and Lie closure.

#include <benchmark/benchmark.h>

#include <random>

#include "nvqoc/crab.hpp"
#include "nvqoc/grape.hpp"
#include "nvqoc/limits.hpp"
#include "nvqoc/sensing.hpp"

namespace {

using namespace nvqoc;

constexpr double kOmega = units::kTwoPi;

RMatrix random_pulses(int rows, int cols, std::uint64_t seed) {
  Rng rng(seed);
  RMatrix m(rows, cols);
  for (int c = 0; c < rows; ++c) {
    for (int k = 0; k < cols; ++k) m(c, k) = rng.uniform(-kOmega, kOmega);
  }
  return m;
}

// NV electron spin with `nuclei` spin-1 nuclei: dimension 3^(1 + nuclei).
Hamiltonian nv_system(int nuclei) {
  NVParameters p;
  p.B = {0.0, 0.0, 50.0};
  for (int i = 0; i < nuclei; ++i) p.nuclei.push_back({1.0, units::mhz(-2.7), units::mhz(-2.14), 0.0019, units::mhz(-5.01)});
  return nv_ground_hamiltonian(p);
}

void BM_Propagate(benchmark::State& state) {
  const Hamiltonian sys = nv_system(static_cast<int>(state.range(0)));
  const PulseSet pulses(0.1, random_pulses(2, 64, 1));
  CVector psi0 = CVector::Zero(sys.dim());
  psi0[1] = 1.0;
  for (auto _ : state) benchmark::DoNotOptimize(propagate_final(sys, pulses, psi0));
  state.SetItemsProcessed(state.iterations() * 64);
  state.counters["dim"] = static_cast<double>(sys.dim());
}
BENCHMARK(BM_Propagate)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

void BM_GrapeGradientState(benchmark::State& state) {
  const Hamiltonian sys = rwa_qubit_hamiltonian(0.0, 0.0, 0.0).system;
  const int n = static_cast<int>(state.range(0));
  const PulseSet pulses(1.0, random_pulses(2, n, 2));
  CVector a = CVector::Zero(2), b = CVector::Zero(2);
  a[0] = 1.0;
  b[1] = 1.0;
  const CostSpec spec{StateTransfer{a, b}, {}, {}};
  for (auto _ : state) benchmark::DoNotOptimize(grape_gradient(sys, pulses, spec));
  state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_GrapeGradientState)->RangeMultiplier(4)->Range(32, 2048)->Unit(benchmark::kMicrosecond);

void BM_GrapeGradientGate(benchmark::State& state) {
  const Hamiltonian sys = nv_system(static_cast<int>(state.range(0)));
  const PulseSet pulses(0.1, random_pulses(2, 32, 3));
  const CostSpec spec{GateTarget{CMatrix::Identity(sys.dim(), sys.dim())}, {}, {}};
  for (auto _ : state) benchmark::DoNotOptimize(grape_gradient(sys, pulses, spec));
  state.counters["dim"] = static_cast<double>(sys.dim());
}
BENCHMARK(BM_GrapeGradientGate)->DenseRange(0, 2)->Unit(benchmark::kMicrosecond);

void BM_CrabObjective(benchmark::State& state) {
  const Hamiltonian sys = rwa_qubit_hamiltonian(0.0, 0.0, 0.0).system;
  const TimeGrid grid{1.0, 100};
  const CrabBasis basis = sample_basis(5, default_omega_max(5, grid.t_final), kDefaultSeed);
  CrabParams params = CrabParams::zeros(2, 5);
  params.a.setConstant(0.3);
  const CostSpec spec{GateTarget{CMatrix::Identity(2, 2)}, {}, {}};
  for (auto _ : state) {
    const PulseSet p = expand_pulse(params, basis, grid);
    benchmark::DoNotOptimize(evaluate_cost(sys, p, spec).total);
  }
}
BENCHMARK(BM_CrabObjective)->Unit(benchmark::kMicrosecond);

void BM_FilterFunction(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SensingSequence seq = cpmg_sequence(n, n * 0.25);
  const RVector grid = natural_omega_grid(seq, 1024);
  for (auto _ : state) benchmark::DoNotOptimize(filter_function(seq, grid));
}
BENCHMARK(BM_FilterFunction)->RangeMultiplier(4)->Range(4, 256)->Unit(benchmark::kMicrosecond);

void BM_Controllability(benchmark::State& state) {
  const Hamiltonian sys = state.range(0) == 3 ? nv_system(0) : nv_nv_dipole_hamiltonian({0.0, 0.0, 2.0});
  std::vector<CMatrix> controls = sys.controls;
  if (controls.empty()) {
    const SpinOperators s = spin_operators(1.0);
    const CMatrix id = s.identity();
    controls = {kron(s.sx, id), kron(s.sy, id)};
  }
  for (auto _ : state) benchmark::DoNotOptimize(controllability_rank(sys.drift, controls));
  state.counters["dim"] = static_cast<double>(sys.dim());
}
BENCHMARK(BM_Controllability)->Arg(3)->Arg(9)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
