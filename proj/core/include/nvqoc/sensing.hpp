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

// Pulsed sensing protocols with instantaneous rotations.
//
// A sequence opens with a pi/2 pulse at t = 0; every later pi pulse flips the
// sign of the modulation function M(t). The accumulated phase is
//   phi = gamma * integral_0^T B(t) M(t) dt,
// and the two-outcome readout has p(0) = (1 + C W cos phi) / 2 with the
// coherence envelope W = exp(-(t / T2)^p).

#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "nvqoc/costs.hpp"
#include "nvqoc/nelder_mead.hpp"
#include "nvqoc/optimization.hpp"
#include "nvqoc/rng.hpp"

namespace nvqoc {

enum class Axis { x, y };

struct Rotation {
  double angle = 0.0;  // rad
  Axis axis = Axis::x;
  double instant = 0.0;  // us
};

struct FreePrecession {
  double interval = 0.0;  // us
};

using SequenceEvent = std::variant<Rotation, FreePrecession>;

class SensingSequence {
 public:
  SensingSequence() = default;
  /// Throws std::invalid_argument unless the events start with a pi/2 rotation
  /// at t = 0, rotation instants match the running clock, intervals are
  /// positive, and interior rotations are pi rotations.
  explicit SensingSequence(std::vector<SequenceEvent> events);

  const std::vector<SequenceEvent>& events() const { return events_; }
  double total_time() const { return total_time_; }
  /// Instants of the sign-flipping pi rotations.
  const std::vector<double>& flip_times() const { return flips_; }
  /// True when at least one pi pulse refocuses static fields.
  bool echo_class() const { return !flips_.empty(); }

 private:
  std::vector<SequenceEvent> events_;
  double total_time_ = 0.0;
  std::vector<double> flips_;
};

/// pi/2 - tau - pi/2.
SensingSequence ramsey_sequence(double tau);
/// pi/2 - tau - pi - tau - pi/2; total time 2 tau.
SensingSequence echo_sequence(double tau);
/// n pi pulses at (k - 1/2) t_total / n, k = 1..n.
SensingSequence cpmg_sequence(int n, double t_total);
/// pi pulses at the given strictly increasing instants inside (0, t_total).
SensingSequence dd_sequence(const std::vector<double>& flip_times, double t_total);

/// Piecewise-constant +-1 function: sign[j] on [edges[j], edges[j+1]).
struct ModulationFunction {
  std::vector<double> edges;
  std::vector<int> signs;

  int operator()(double t) const;
  double total_time() const { return edges.back(); }
};

ModulationFunction modulation_function(const SensingSequence& seq);

/// Field along the NV axis in mT.
struct FieldSignal {
  enum class Kind { dc, ac, custom };
  Kind kind = Kind::dc;
  double amplitude = 0.0;  // dc value or ac amplitude
  double omega = 0.0;      // ac angular frequency, rad/us
  double phase = 0.0;      // ac phase, rad
  std::function<double(double)> custom;

  double operator()(double t) const;

  static FieldSignal dc(double b);
  /// b sin(omega t + phase).
  static FieldSignal ac(double b, double omega, double phase = 0.0);
  static FieldSignal from_function(std::function<double(double)> f);
};

/// integral_a^b B(t) dt, adaptive Gauss-Kronrod with 1e-10 relative tolerance.
/// Throws NumericError on non-finite field samples.
double integrate_field(const FieldSignal& signal, double a, double b);

/// gamma * integral_0^tau B.
double ramsey_phase(const FieldSignal& signal, double tau, double gamma);
/// gamma * (integral_0^tau B - integral_tau^2tau B).
double echo_phase(const FieldSignal& signal, double tau, double gamma);
/// gamma * integral B M, integrated segment by segment.
double dd_phase(const SensingSequence& seq, const FieldSignal& signal, double gamma);

/// |integral_0^T M(t) e^{i w t} dt|^2 on the given frequencies, scaled to unit
/// maximum (all zeros stay zero).
RVector filter_function(const SensingSequence& seq, const RVector& omegas);

/// n points 0, dw, 2 dw, ... with the natural resolution dw = 2 pi / T.
RVector natural_omega_grid(const SensingSequence& seq, int n);

struct DecoherenceEnvelope {
  double t2_star = std::numeric_limits<double>::infinity();  // us, Ramsey-class
  double t2 = std::numeric_limits<double>::infinity();       // us, echo-class
  double exponent = 1.0;

  void validate() const;
  /// exp(-(t / T)^p) with T = T2 for echo-class sequences, T2* otherwise.
  double coherence(double t, bool echo_class) const;
};

/// (1 + C W cos phi) / 2.
double readout_probability(double phase, double contrast, double coherence);

struct ReadoutSummary {
  long long shots = 0;
  long long count0 = 0;
  double p_true = 0.0;
  double p_hat = 0.0;
  double std_error = 0.0;  // sqrt(p_hat (1 - p_hat) / shots)
};

ReadoutSummary simulate_readout(double phase, double contrast, const DecoherenceEnvelope& envelope, double t_total,
                                long long shots, std::uint64_t seed, bool echo_class = false);

/// sigma sqrt(t_m) / |slope_max|; throws std::invalid_argument on zero slope.
double sensitivity_eta(double slope_max, double sigma, double t_m);

/// Ramsey field estimation: p0(B) = (1 + C W cos(gamma B tau + phi_r)) / 2.
struct RamseyModel {
  double gamma = 0.0;
  double tau = 1.0;
  double contrast = 1.0;
  double coherence = 1.0;
  double readout_phase = 0.0;

  double p0(double b) const;
  /// Per-shot Fisher information about B.
  double fisher(double b) const;
  /// Maximum-likelihood inverse on the branch gamma B tau + phi_r in [0, pi].
  double estimate(double p_hat) const;
  MeasurementModel measurement() const;
};

// --- pulse-timing optimization --------------------------------------------------

/// B(t; theta, alpha): theta is the estimated parameter, alpha a free phase.
using SignalFamily = std::function<FieldSignal(double theta, double alpha)>;

struct DdFisherSpec {
  double theta0 = 0.0;
  double gamma = 1.0;
  double contrast = 1.0;
  DecoherenceEnvelope envelope;
  double readout_phase = 1.5707963267948966;  // pi/2: steepest slope at phi = 0
  double n_measurements = 1.0;
  FisherOptions fisher;
};

struct DdTemplate {
  double total_time = 1.0;
  std::vector<double> flip_times;  // starting pulse instants
  double alpha = 0.0;              // starting signal phase
  bool free_phase = true;
};

/// j_fisher of the timing; kInfiniteCost for unordered or out-of-range pulses.
double dd_timing_cost(const SignalFamily& family, const std::vector<double>& flip_times, double alpha,
                      double total_time, const DdFisherSpec& spec);

struct DdTimingResult {
  OptimizationReport report;  // pulses left empty
  std::vector<double> flip_times;
  double alpha = 0.0;
  double fisher = 0.0;
};

/// Nelder-Mead over the pulse instants (in units of T / n) and alpha.
DdTimingResult optimize_dd_timing(const SignalFamily& family, const DdTemplate& start, const DdFisherSpec& spec,
                                  const NelderMeadOptions& opts = {});

}  // namespace nvqoc
