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

// Problem configuration files.
//
// A configuration is a single JSON object. Parsing is strict: every key must
// be known, and the first unknown or ill-typed field aborts with a JSON
// pointer to it. Complex numbers are written as a plain number or as
// [re, im]; states as a list of amplitudes or as {"basis": k}.

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "nvqoc/crab.hpp"
#include "nvqoc/grape.hpp"
#include "nvqoc/sensing.hpp"

namespace nvqoc::cli {

/// Invalid or unreadable configuration (exit code 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SystemConfig {
  std::string type;  // rwa_qubit | nv_ground | custom
  Hamiltonian hamiltonian;
  std::optional<RVector> drive;       // rwa_qubit: constant amplitudes of the configured drive
  std::optional<CMatrix> detuning_op; // operator scaled by ensemble detunings
};

struct OptimizerConfig {
  enum class Kind { grape, crab, dcrab };
  Kind kind = Kind::grape;
  GrapeOptions grape;
  CrabOptions crab;
  int crab_basis = 5;
  double crab_omega_max = 0.0;  // <= 0: default for the grid
  DcrabOptions dcrab;
};

struct SensingConfig {
  enum class Sequence { ramsey, echo, cpmg };
  Sequence sequence = Sequence::ramsey;
  int n_pulses = 1;  // cpmg only
  FieldSignal signal;
  double gamma = units::mhz(28.0);
  // Swept tau: Ramsey length, echo half-length, or CPMG pulse spacing (us).
  double tau_start = 0.1;
  double tau_stop = 1.0;
  int tau_points = 101;
  double contrast = 1.0;
  DecoherenceEnvelope envelope;
  double readout_phase = 0.0;
  long long shots = 0;  // 0 skips the shot-noise simulation
  std::optional<double> filter_tau;
  int filter_points = 256;
  std::optional<double> filter_omega_max;
};

struct LimitsConfig {
  enum class Source { system, pulse };
  bool qsl = false;
  Source source = Source::system;
  CVector target;
  bool controllability = false;
};

struct ProblemConfig {
  std::uint64_t seed = kDefaultSeed;
  std::optional<SystemConfig> system;
  std::optional<PulseSet> pulse;
  std::optional<CVector> initial_state;
  std::optional<CostSpec> cost;
  std::optional<OptimizerConfig> optimizer;
  std::optional<SensingConfig> sensing;
  std::optional<LimitsConfig> limits;
};

/// Parses and validates a configuration. A present `seed_override`
/// replaces the configured seed before any seeded quantity is derived.
ProblemConfig parse_config(const nlohmann::json& doc, std::optional<std::uint64_t> seed_override = std::nullopt);

/// Reads and parses a JSON file; syntax errors report line and column.
nlohmann::json load_config_file(const std::string& path);

/// Parses JSON text; syntax errors report line and column.
nlohmann::json parse_config_text(const std::string& text);

}  // namespace nvqoc::cli
