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

#include "nvqoc/costs.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace nvqoc {

namespace {

constexpr double kNormTol = 1e-8;

void require_normalized(const CVector& v, const char* what) {
  if (!all_finite(CMatrix(v)) || std::abs(v.norm() - 1.0) > kNormTol) {
    throw std::invalid_argument(std::string(what) + " is not normalized");
  }
}

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

RVector checked_distribution(const MeasurementModel& model, double theta) {
  RVector p = model.probabilities(theta);
  if (p.size() == 0 || !p.allFinite()) {
    throw std::invalid_argument("measurement model returned an empty or non-finite distribution");
  }
  if ((p.array() < -1e-12).any()) {
    throw std::invalid_argument("measurement model returned a negative probability");
  }
  if (std::abs(p.sum() - 1.0) > 1e-10) {
    throw std::invalid_argument("measurement model distribution is not normalized");
  }
  return p;
}

}  // namespace

double j_state(const CVector& final_state, const CVector& target, PhaseMode mode) {
  if (final_state.size() != target.size()) throw std::invalid_argument("j_state: dimension mismatch");
  require_normalized(final_state, "j_state: final state");
  require_normalized(target, "j_state: target state");
  const Complex overlap = target.dot(final_state);
  if (mode == PhaseMode::modulus) return std::max(0.0, 1.0 - std::norm(overlap));
  return 1.0 - final_state.dot(target).real();
}

double j_gate(const CMatrix& u, const CMatrix& target, PhaseMode mode) {
  if (u.rows() != target.rows() || u.cols() != target.cols() || u.rows() != u.cols()) {
    throw std::invalid_argument("j_gate: dimension mismatch");
  }
  const double n = static_cast<double>(u.rows());
  const Complex tr = (target.adjoint() * u).trace();
  if (mode == PhaseMode::modulus) return std::max(0.0, 1.0 - std::norm(tr) / (n * n));
  return 1.0 - tr.real() / n;
}

double fisher_information(const MeasurementModel& model, double theta0, const FisherOptions& opts) {
  if (!(opts.step > 0.0)) throw std::invalid_argument("fisher_information: step must be positive");
  const RVector p0 = checked_distribution(model, theta0);
  const RVector plus = checked_distribution(model, theta0 + opts.step);
  const RVector minus = checked_distribution(model, theta0 - opts.step);
  if (plus.size() != p0.size() || minus.size() != p0.size()) {
    throw std::invalid_argument("fisher_information: outcome count changes with theta");
  }
  double f = 0.0;
  for (Eigen::Index x = 0; x < p0.size(); ++x) {
    if (p0[x] <= opts.p_floor) continue;
    const double dp = (plus[x] - minus[x]) / (2.0 * opts.step);
    f += dp * dp / p0[x];
  }
  return f;
}

double j_fisher(const MeasurementModel& model, double theta0, double n_measurements, const FisherOptions& opts) {
  if (!(n_measurements >= 1.0)) throw std::invalid_argument("j_fisher: n_measurements must be >= 1");
  const double f = fisher_information(model, theta0, opts);
  if (!(f > 0.0)) return kInfiniteCost;
  return std::min(kInfiniteCost, 1.0 / (n_measurements * f));
}

double j_power(const RVector& pulse, double dt, double p_lim, double weight) {
  if (!(p_lim > 0.0)) throw std::invalid_argument("j_power: P_lim must be positive");
  const double p = pulse.squaredNorm() * dt;
  const double excess = std::max(0.0, p / p_lim - 1.0);
  return weight * excess * excess;
}

double j_bandwidth(const RVector& pulse, double dt, double eps) {
  if (pulse.size() < 2) throw std::invalid_argument("j_bandwidth: needs at least two slices");
  double acc = 0.0;
  for (Eigen::Index k = 0; k + 1 < pulse.size(); ++k) {
    const double d = (pulse[k + 1] - pulse[k]) / dt;
    acc += d * d * dt;
  }
  return eps * acc;
}

void CostSpec::validate(Eigen::Index dim) const {
  std::visit(Overloaded{
                 [&](const StateTransfer& s) {
                   if (s.initial.size() != dim || s.target.size() != dim) {
                     throw std::invalid_argument("state transfer: state dimension mismatch");
                   }
                   require_normalized(s.initial, "state transfer: initial state");
                   require_normalized(s.target, "state transfer: target state");
                 },
                 [&](const GateTarget& g) {
                   if (g.target.rows() != dim || g.target.cols() != dim) {
                     throw std::invalid_argument("gate target: dimension mismatch");
                   }
                   if (unitarity_error(g.target) > 1e-8) {
                     throw std::invalid_argument("gate target is not unitary");
                   }
                 },
                 [&](const FisherTarget& f) {
                   if (f.initial.size() != dim) throw std::invalid_argument("fisher: state dimension mismatch");
                   require_normalized(f.initial, "fisher: initial state");
                   if (f.generator.rows() != dim) throw std::invalid_argument("fisher: generator dimension mismatch");
                   require_hermitian(f.generator, "fisher generator");
                   if (f.povm.empty()) throw std::invalid_argument("fisher: empty POVM");
                   CMatrix sum = CMatrix::Zero(dim, dim);
                   for (const auto& e : f.povm) {
                     if (e.rows() != dim) throw std::invalid_argument("fisher: POVM element dimension mismatch");
                     require_hermitian(e, "fisher POVM element");
                     sum += e;
                   }
                   if ((sum - CMatrix::Identity(dim, dim)).cwiseAbs().maxCoeff() > 1e-10) {
                     throw std::invalid_argument("fisher: POVM elements do not sum to identity");
                   }
                   if (!(f.n_measurements >= 1.0)) throw std::invalid_argument("fisher: n_measurements must be >= 1");
                 },
             },
             terminal);
  for (const auto& r : running) {
    if (!(r.weight >= 0.0)) throw std::invalid_argument("running cost weights must be non-negative");
    if (r.kind == RunningCost::Kind::power && !(r.power_limit > 0.0)) {
      throw std::invalid_argument("power limit must be positive");
    }
  }
  if (!ensemble.empty()) {
    double total = 0.0;
    for (const auto& m : ensemble) {
      if (!(m.weight >= 0.0)) throw std::invalid_argument("ensemble weights must be non-negative");
      if (m.system.dim() != dim) throw std::invalid_argument("ensemble member dimension mismatch");
      m.system.validate();
      total += m.weight;
    }
    if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("ensemble weights must sum to 1");
  }
}

PulseSet map_controls(const PulseSet& raw, const ControlMapping& mapping) {
  RMatrix out = raw.amplitudes();
  std::visit(Overloaded{
                 [&](const ClipMapping& c) {
                   if (!(c.u_max > 0.0)) throw std::invalid_argument("clip mapping: u_max must be positive");
                   out = out.cwiseMax(-c.u_max).cwiseMin(c.u_max);
                 },
                 [&](const SineMapping& s) {
                   if (!(s.u_max > 0.0)) throw std::invalid_argument("sine mapping: u_max must be positive");
                   out = s.u_max * out.array().sin();
                 },
                 [&](const ShapeMapping& s) {
                   if (s.envelope.size() != raw.n_slices()) {
                     throw std::invalid_argument("shape mapping: envelope does not match the pulse grid");
                   }
                   out = out * s.envelope.asDiagonal();
                 },
             },
             mapping);
  return PulseSet(raw.t_final(), std::move(out));
}

RMatrix mapping_derivative(const PulseSet& raw, const ControlMapping& mapping) {
  const RMatrix& u = raw.amplitudes();
  return std::visit(Overloaded{
                        [&](const ClipMapping& c) -> RMatrix {
                          return (u.array().abs() <= c.u_max).cast<double>().matrix();
                        },
                        [&](const SineMapping& s) -> RMatrix { return s.u_max * u.array().cos(); },
                        [&](const ShapeMapping& s) -> RMatrix {
                          if (s.envelope.size() != raw.n_slices()) {
                            throw std::invalid_argument("shape mapping: envelope does not match the pulse grid");
                          }
                          return s.envelope.transpose().replicate(u.rows(), 1);
                        },
                    },
                    mapping);
}

MeasurementModel fisher_model(const Hamiltonian& sys, const PulseSet& pulses, const FisherTarget& target) {
  return MeasurementModel{[sys, pulses, target](double theta) {
    Hamiltonian shifted = sys;
    shifted.drift += theta * target.generator;
    const CVector psi = propagate_final(shifted, pulses, target.initial);
    RVector p(static_cast<Eigen::Index>(target.povm.size()));
    for (std::size_t x = 0; x < target.povm.size(); ++x) {
      p[static_cast<Eigen::Index>(x)] = std::max(0.0, expectation(target.povm[x], psi));
    }
    return p;
  }};
}

double terminal_cost(const Hamiltonian& sys, const PulseSet& pulses, const TerminalCost& terminal) {
  return std::visit(Overloaded{
                        [&](const StateTransfer& s) {
                          return j_state(propagate_final(sys, pulses, s.initial), s.target, s.phase);
                        },
                        [&](const GateTarget& g) { return j_gate(total_propagator(sys, pulses), g.target, g.phase); },
                        [&](const FisherTarget& f) {
                          return j_fisher(fisher_model(sys, pulses, f), f.theta0, f.n_measurements, f.fisher);
                        },
                    },
                    terminal);
}

double running_cost(const PulseSet& pulses, const std::vector<RunningCost>& running) {
  double total = 0.0;
  const double dt = pulses.dt();
  for (const auto& r : running) {
    if (r.control >= pulses.n_controls()) throw std::invalid_argument("running cost: control index out of range");
    const int first = r.control < 0 ? 0 : r.control;
    const int last = r.control < 0 ? pulses.n_controls() : r.control + 1;
    for (int i = first; i < last; ++i) {
      const RVector u = pulses.amplitudes().row(i).transpose();
      total += r.kind == RunningCost::Kind::power ? j_power(u, dt, r.power_limit, r.weight)
                                                  : j_bandwidth(u, dt, r.weight);
    }
  }
  return total;
}

double j_robust(const CostSpec& spec, const PulseSet& pulses) {
  if (spec.ensemble.empty()) throw std::invalid_argument("j_robust: empty ensemble");
  double total = 0.0;
  for (const auto& member : spec.ensemble) {
    total += member.weight * terminal_cost(member.system, pulses, spec.terminal);
  }
  return total;
}

CostBreakdown evaluate_cost(const Hamiltonian& sys, const PulseSet& raw, const CostSpec& spec,
                            const ControlMapping* mapping) {
  const PulseSet physical = mapping ? map_controls(raw, *mapping) : raw;
  CostBreakdown c;
  c.terminal = spec.ensemble.empty() ? terminal_cost(sys, physical, spec.terminal) : j_robust(spec, physical);
  c.running = running_cost(physical, spec.running);
  c.total = c.terminal + c.running;
  if (!std::isfinite(c.total)) throw NumericError("cost evaluation produced a non-finite value");
  return c;
}

EnsembleMember ensemble_member(const Hamiltonian& base, const CMatrix& detuning_op, double offset,
                               double control_scale, double weight) {
  EnsembleMember m;
  m.system = base;
  m.system.drift += offset * detuning_op;
  for (auto& c : m.system.controls) c *= control_scale;
  m.weight = weight;
  return m;
}

}  // namespace nvqoc
