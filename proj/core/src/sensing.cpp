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

#include "nvqoc/sensing.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nvqoc {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kAngleTol = 1e-12;
constexpr double kQuadratureTol = 1e-10;

bool is_angle(double angle, double target) { return std::abs(std::abs(angle) - target) <= kAngleTol; }

double clock_tolerance(double t) { return 1e-9 * std::max(1.0, std::abs(t)); }

}  // namespace

SensingSequence::SensingSequence(std::vector<SequenceEvent> events) : events_(std::move(events)) {
  if (events_.empty()) throw std::invalid_argument("SensingSequence: empty sequence");
  const auto* first = std::get_if<Rotation>(&events_.front());
  if (!first || !is_angle(first->angle, kPi / 2) || std::abs(first->instant) > clock_tolerance(0.0)) {
    throw std::invalid_argument("SensingSequence: must start with a pi/2 rotation at t = 0");
  }
  double clock = 0.0;
  std::vector<const Rotation*> rotations;
  for (const auto& ev : events_) {
    if (const auto* r = std::get_if<Rotation>(&ev)) {
      if (!std::isfinite(r->angle) || !std::isfinite(r->instant)) {
        throw std::invalid_argument("SensingSequence: non-finite rotation");
      }
      if (std::abs(r->instant - clock) > clock_tolerance(clock)) {
        throw std::invalid_argument("SensingSequence: rotation at t = " + std::to_string(r->instant) +
                                    " does not match the sequence clock t = " + std::to_string(clock));
      }
      rotations.push_back(r);
    } else {
      const double dt = std::get<FreePrecession>(ev).interval;
      if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SensingSequence: intervals must be positive");
      clock += dt;
    }
  }
  total_time_ = clock;
  for (std::size_t i = 1; i < rotations.size(); ++i) {
    const Rotation& r = *rotations[i];
    if (is_angle(r.angle, kPi)) {
      if (r.instant <= clock_tolerance(0.0) || r.instant >= total_time_ - clock_tolerance(total_time_)) {
        throw std::invalid_argument("SensingSequence: pi rotations must lie strictly inside the sequence");
      }
      flips_.push_back(r.instant);
    } else if (!(i + 1 == rotations.size() && std::abs(r.instant - total_time_) <= clock_tolerance(total_time_))) {
      throw std::invalid_argument("SensingSequence: interior rotations must be pi rotations");
    }
  }
  if (!(total_time_ > 0.0)) throw std::invalid_argument("SensingSequence: zero total time");
}

SensingSequence dd_sequence(const std::vector<double>& flip_times, double t_total) {
  if (!(t_total > 0.0) || !std::isfinite(t_total)) throw std::invalid_argument("dd_sequence: t_total must be positive");
  std::vector<SequenceEvent> ev{Rotation{kPi / 2, Axis::x, 0.0}};
  double clock = 0.0;
  for (double t : flip_times) {
    if (!(t > clock) || !(t < t_total)) {
      throw std::invalid_argument("dd_sequence: pulse instants must be strictly increasing inside (0, t_total)");
    }
    ev.emplace_back(FreePrecession{t - clock});
    ev.emplace_back(Rotation{kPi, Axis::y, t});
    clock = t;
  }
  ev.emplace_back(FreePrecession{t_total - clock});
  ev.emplace_back(Rotation{kPi / 2, Axis::x, t_total});
  return SensingSequence(std::move(ev));
}

SensingSequence ramsey_sequence(double tau) { return dd_sequence({}, tau); }

SensingSequence echo_sequence(double tau) { return dd_sequence({tau}, 2.0 * tau); }

SensingSequence cpmg_sequence(int n, double t_total) {
  if (n < 1) throw std::invalid_argument("cpmg_sequence: need at least one pi pulse");
  std::vector<double> flips;
  for (int k = 1; k <= n; ++k) flips.push_back((k - 0.5) * t_total / n);
  return dd_sequence(flips, t_total);
}

int ModulationFunction::operator()(double t) const {
  if (t < edges.front() || t > edges.back()) return 0;
  const auto it = std::upper_bound(edges.begin(), edges.end(), t);
  const auto j = static_cast<std::size_t>(std::distance(edges.begin(), it)) - 1;
  return signs[std::min(j, signs.size() - 1)];
}

ModulationFunction modulation_function(const SensingSequence& seq) {
  ModulationFunction m;
  m.edges.push_back(0.0);
  int sign = 1;
  for (double t : seq.flip_times()) {
    m.signs.push_back(sign);
    m.edges.push_back(t);
    sign = -sign;
  }
  m.signs.push_back(sign);
  m.edges.push_back(seq.total_time());
  return m;
}

double FieldSignal::operator()(double t) const {
  switch (kind) {
    case Kind::dc:
      return amplitude;
    case Kind::ac:
      return amplitude * std::sin(omega * t + phase);
    case Kind::custom:
      return custom(t);
  }
  return 0.0;
}

FieldSignal FieldSignal::dc(double b) {
  FieldSignal s;
  s.kind = Kind::dc;
  s.amplitude = b;
  return s;
}

FieldSignal FieldSignal::ac(double b, double omega, double phase) {
  FieldSignal s;
  s.kind = Kind::ac;
  s.amplitude = b;
  s.omega = omega;
  s.phase = phase;
  return s;
}

FieldSignal FieldSignal::from_function(std::function<double(double)> f) {
  if (!f) throw std::invalid_argument("FieldSignal: empty callable");
  FieldSignal s;
  s.kind = Kind::custom;
  s.custom = std::move(f);
  return s;
}

double integrate_field(const FieldSignal& signal, double a, double b) {
  if (!(b >= a)) throw std::invalid_argument("integrate_field: reversed interval");
  if (b == a) return 0.0;
  auto f = [&signal](double t) {
    const double v = signal(t);
    if (!std::isfinite(v)) throw NumericError("field signal is not finite at t = " + std::to_string(t));
    return v;
  };
  // An ac field is split into half periods so each piece is single-signed.
  std::vector<double> cuts{a};
  if (signal.kind == FieldSignal::Kind::ac && signal.omega != 0.0) {
    const double half = kPi / std::abs(signal.omega);
    const auto pieces = static_cast<long long>(std::ceil((b - a) / half));
    if (pieces > 1 && pieces <= 4096) {
      for (long long k = 1; k < pieces; ++k) cuts.push_back(a + static_cast<double>(k) * (b - a) / pieces);
    }
  }
  cuts.push_back(b);
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, cuts[i], cuts[i + 1], 15,
                                                                            kQuadratureTol);
  }
  return total;
}

double ramsey_phase(const FieldSignal& signal, double tau, double gamma) {
  if (!(tau > 0.0)) throw std::invalid_argument("ramsey_phase: tau must be positive");
  return dd_phase(ramsey_sequence(tau), signal, gamma);
}

double echo_phase(const FieldSignal& signal, double tau, double gamma) {
  if (!(tau > 0.0)) throw std::invalid_argument("echo_phase: tau must be positive");
  return dd_phase(echo_sequence(tau), signal, gamma);
}

double dd_phase(const SensingSequence& seq, const FieldSignal& signal, double gamma) {
  const ModulationFunction m = modulation_function(seq);
  double phase = 0.0;
  for (std::size_t j = 0; j < m.signs.size(); ++j) {
    phase += m.signs[j] * integrate_field(signal, m.edges[j], m.edges[j + 1]);
  }
  return gamma * phase;
}

RVector filter_function(const SensingSequence& seq, const RVector& omegas) {
  const ModulationFunction m = modulation_function(seq);
  RVector w(omegas.size());
  for (Eigen::Index n = 0; n < omegas.size(); ++n) {
    const double om = omegas[n];
    Complex y{0.0, 0.0};
    for (std::size_t j = 0; j < m.signs.size(); ++j) {
      const double a = m.edges[j], b = m.edges[j + 1];
      // Segment integral of e^{i w t}; the small-w branch avoids cancellation.
      Complex seg;
      if (std::abs(om * (b - a)) < 1e-8) {
        seg = Complex(b - a, 0.5 * om * (b * b - a * a));
      } else {
        seg = (std::exp(kI * (om * b)) - std::exp(kI * (om * a))) / (kI * om);
      }
      y += static_cast<double>(m.signs[j]) * seg;
    }
    w[n] = std::norm(y);
  }
  const double peak = w.size() > 0 ? w.maxCoeff() : 0.0;
  if (peak > 0.0) w /= peak;
  return w;
}

RVector natural_omega_grid(const SensingSequence& seq, int n) {
  if (n < 1) throw std::invalid_argument("natural_omega_grid: need at least one point");
  const double dw = 2.0 * kPi / seq.total_time();
  RVector g(n);
  for (int k = 0; k < n; ++k) g[k] = k * dw;
  return g;
}

void DecoherenceEnvelope::validate() const {
  if (!(t2_star > 0.0) || !(t2 > 0.0)) throw std::invalid_argument("DecoherenceEnvelope: times must be positive");
  if (!(exponent >= 1.0) || !std::isfinite(exponent)) {
    throw std::invalid_argument("DecoherenceEnvelope: exponent must be >= 1");
  }
}

double DecoherenceEnvelope::coherence(double t, bool echo_class) const {
  const double scale = echo_class ? t2 : t2_star;
  if (std::isinf(scale)) return 1.0;
  return std::exp(-std::pow(t / scale, exponent));
}

double readout_probability(double phase, double contrast, double coherence) {
  return 0.5 * (1.0 + contrast * coherence * std::cos(phase));
}

ReadoutSummary simulate_readout(double phase, double contrast, const DecoherenceEnvelope& envelope, double t_total,
                                long long shots, std::uint64_t seed, bool echo_class) {
  if (shots < 1) throw std::invalid_argument("simulate_readout: shots must be >= 1");
  if (!(contrast > 0.0 && contrast <= 1.0)) throw std::invalid_argument("simulate_readout: contrast must be in (0, 1]");
  if (!(t_total >= 0.0)) throw std::invalid_argument("simulate_readout: negative time");
  if (!std::isfinite(phase)) throw NumericError("simulate_readout: non-finite phase");
  envelope.validate();
  ReadoutSummary s;
  s.shots = shots;
  s.p_true = readout_probability(phase, contrast, envelope.coherence(t_total, echo_class));
  if (!(s.p_true >= 0.0 && s.p_true <= 1.0)) throw NumericError("simulate_readout: probability outside [0, 1]");
  Rng rng(seed);
  for (long long i = 0; i < shots; ++i) s.count0 += rng.bernoulli(s.p_true) ? 1 : 0;
  s.p_hat = static_cast<double>(s.count0) / static_cast<double>(shots);
  s.std_error = std::sqrt(s.p_hat * (1.0 - s.p_hat) / static_cast<double>(shots));
  return s;
}

double sensitivity_eta(double slope_max, double sigma, double t_m) {
  if (slope_max == 0.0 || !std::isfinite(slope_max)) throw std::invalid_argument("sensitivity_eta: zero slope");
  if (!(sigma >= 0.0) || !(t_m >= 0.0)) throw std::invalid_argument("sensitivity_eta: negative noise or time");
  return sigma * std::sqrt(t_m) / std::abs(slope_max);
}

double RamseyModel::p0(double b) const {
  return readout_probability(gamma * b * tau + readout_phase, contrast, coherence);
}

double RamseyModel::fisher(double b) const {
  const double x = gamma * b * tau + readout_phase;
  const double cw = contrast * coherence;
  const double denom = 1.0 - cw * cw * std::cos(x) * std::cos(x);
  const double g2 = gamma * tau * gamma * tau;
  if (denom <= 0.0) return cw >= 1.0 ? g2 : 0.0;
  return g2 * cw * cw * std::sin(x) * std::sin(x) / denom;
}

double RamseyModel::estimate(double p_hat) const {
  const double c = std::clamp((2.0 * p_hat - 1.0) / (contrast * coherence), -1.0, 1.0);
  return (std::acos(c) - readout_phase) / (gamma * tau);
}

MeasurementModel RamseyModel::measurement() const {
  const RamseyModel m = *this;
  return {[m](double b) {
    const double p = m.p0(b);
    RVector out(2);
    out << p, 1.0 - p;
    return out;
  }};
}

double dd_timing_cost(const SignalFamily& family, const std::vector<double>& flip_times, double alpha,
                      double total_time, const DdFisherSpec& spec) {
  const double min_gap = 1e-9 * total_time;
  double prev = 0.0;
  for (double t : flip_times) {
    if (!std::isfinite(t) || t - prev <= min_gap) return kInfiniteCost;
    prev = t;
  }
  if (total_time - prev <= min_gap || !std::isfinite(alpha)) return kInfiniteCost;

  const SensingSequence seq = dd_sequence(flip_times, total_time);
  const double w = spec.envelope.coherence(total_time, seq.echo_class());
  MeasurementModel model{[&](double theta) {
    const double phi = dd_phase(seq, family(theta, alpha), spec.gamma);
    const double p = readout_probability(phi + spec.readout_phase, spec.contrast, w);
    RVector out(2);
    out << p, 1.0 - p;
    return out;
  }};
  return j_fisher(model, spec.theta0, spec.n_measurements, spec.fisher);
}

DdTimingResult optimize_dd_timing(const SignalFamily& family, const DdTemplate& start, const DdFisherSpec& spec,
                                  const NelderMeadOptions& opts) {
  if (!family) throw std::invalid_argument("optimize_dd_timing: empty signal family");
  if (!(start.total_time > 0.0)) throw std::invalid_argument("optimize_dd_timing: total_time must be positive");
  spec.envelope.validate();
  const int n = static_cast<int>(start.flip_times.size());
  const int dim = n + (start.free_phase ? 1 : 0);
  if (dim < 1) throw std::invalid_argument("optimize_dd_timing: template has no free parameters");
  if (dim > 16) throw std::invalid_argument("optimize_dd_timing: at most 16 free parameters");
  // Pulse instants are scaled by T / n so that one simplex step is comparable
  // along every axis.
  const double scale = start.total_time / std::max(n, 1);

  auto unpack = [&](const RVector& x, std::vector<double>& times, double& alpha) {
    times.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) times[static_cast<std::size_t>(i)] = x[i] * scale;
    alpha = start.free_phase ? x[n] : start.alpha;
  };
  RVector x0(dim);
  for (int i = 0; i < n; ++i) x0[i] = start.flip_times[static_cast<std::size_t>(i)] / scale;
  if (start.free_phase) x0[n] = start.alpha;

  auto objective = [&](const RVector& x) {
    std::vector<double> times;
    double alpha = 0.0;
    unpack(x, times, alpha);
    return dd_timing_cost(family, times, alpha, start.total_time, spec);
  };
  const NelderMeadResult res = nelder_mead(objective, x0, opts);

  DdTimingResult out;
  unpack(res.x, out.flip_times, out.alpha);
  out.report.cost_trace = res.trace;
  out.report.final_cost = res.f;
  out.report.stop_reason = res.stop_reason;
  out.report.iterations = res.iterations;
  out.report.evaluations = res.evaluations;
  out.fisher = res.f >= kInfiniteCost ? 0.0 : 1.0 / (spec.n_measurements * res.f);
  return out;
}

}  // namespace nvqoc
