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

#include "nvqoc/grape.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

namespace nvqoc {

namespace {

double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

// Divided-difference kernel of exp(-i l dt).
CMatrix derivative_kernel(const RVector& l, double dt) {
  const Eigen::Index n = l.size();
  CMatrix g(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      const double mean = 0.5 * (l[a] + l[b]) * dt;
      const double half_gap = 0.5 * (l[a] - l[b]) * dt;
      g(a, b) = Complex(0.0, -dt) * std::polar(1.0, -mean) * sinc(half_gap);
    }
  }
  return g;
}

struct Slice {
  EigenSystem eig;
  CMatrix u;
  CMatrix kernel;
};

std::vector<Slice> decompose(const Hamiltonian& sys, const PulseSet& pulses) {
  std::vector<Slice> slices;
  slices.reserve(static_cast<std::size_t>(pulses.n_slices()));
  const double dt = pulses.dt();
  for (int k = 0; k < pulses.n_slices(); ++k) {
    Slice s;
    s.eig = hermitian_eigen(slice_hamiltonian(sys, pulses, k));
    s.u = expm_slice(s.eig, dt);
    s.kernel = derivative_kernel(s.eig.values, dt);
    slices.push_back(std::move(s));
  }
  return slices;
}

struct TerminalGradient {
  double cost = 0.0;
  RMatrix grad;
};

TerminalGradient state_gradient(const Hamiltonian& sys, const PulseSet& pulses, const StateTransfer& target) {
  const int n = pulses.n_slices();
  const auto slices = decompose(sys, pulses);

  std::vector<CVector> forward(static_cast<std::size_t>(n) + 1);
  forward[0] = target.initial;
  for (int k = 0; k < n; ++k) forward[k + 1] = slices[k].u * forward[k];

  // adjoint[k] = U_{k+1}^dagger ... U_{N-1}^dagger |target>
  std::vector<CVector> adjoint(static_cast<std::size_t>(n));
  adjoint[n - 1] = target.target;
  for (int k = n - 2; k >= 0; --k) adjoint[k] = slices[k + 1].u.adjoint() * adjoint[k + 1];

  const Complex overlap = target.target.dot(forward[n]);
  TerminalGradient out;
  out.cost = j_state(forward[n], target.target, target.phase);
  out.grad = RMatrix::Zero(pulses.n_controls(), n);
  for (int k = 0; k < n; ++k) {
    const auto& s = slices[k];
    const CVector a = s.eig.vectors.adjoint() * adjoint[k];
    const CVector b = s.eig.vectors.adjoint() * forward[k];
    for (int i = 0; i < pulses.n_controls(); ++i) {
      const CMatrix hc = s.eig.vectors.adjoint() * sys.controls[i] * s.eig.vectors;
      const Complex d_overlap = a.dot((s.kernel.cwiseProduct(hc)) * b);
      out.grad(i, k) = target.phase == PhaseMode::modulus ? -2.0 * (std::conj(overlap) * d_overlap).real()
                                                          : -d_overlap.real();
    }
  }
  return out;
}

TerminalGradient gate_gradient(const Hamiltonian& sys, const PulseSet& pulses, const GateTarget& target) {
  const int n = pulses.n_slices();
  const Eigen::Index dim = sys.dim();
  const double nd = static_cast<double>(dim);
  const auto slices = decompose(sys, pulses);

  // forward[k] = U_{k-1} ... U_0
  std::vector<CMatrix> forward(static_cast<std::size_t>(n) + 1);
  forward[0] = CMatrix::Identity(dim, dim);
  for (int k = 0; k < n; ++k) forward[k + 1] = slices[k].u * forward[k];

  // backward[k] = target^dagger U_{N-1} ... U_{k+1}
  std::vector<CMatrix> backward(static_cast<std::size_t>(n));
  backward[n - 1] = target.target.adjoint();
  for (int k = n - 2; k >= 0; --k) backward[k] = backward[k + 1] * slices[k + 1].u;

  const Complex tr = (target.target.adjoint() * forward[n]).trace();
  TerminalGradient out;
  out.cost = j_gate(forward[n], target.target, target.phase);
  out.grad = RMatrix::Zero(pulses.n_controls(), n);
  for (int k = 0; k < n; ++k) {
    const auto& s = slices[k];
    const CMatrix w = s.eig.vectors.adjoint() * (forward[k] * backward[k]) * s.eig.vectors;
    for (int i = 0; i < pulses.n_controls(); ++i) {
      const CMatrix hc = s.eig.vectors.adjoint() * sys.controls[i] * s.eig.vectors;
      const Complex d_tr = (w.transpose().cwiseProduct(s.kernel.cwiseProduct(hc))).sum();
      out.grad(i, k) = target.phase == PhaseMode::modulus ? -2.0 * (std::conj(tr) * d_tr).real() / (nd * nd)
                                                          : -d_tr.real() / nd;
    }
  }
  return out;
}

TerminalGradient terminal_gradient(const Hamiltonian& sys, const PulseSet& pulses, const TerminalCost& terminal) {
  if (const auto* s = std::get_if<StateTransfer>(&terminal)) return state_gradient(sys, pulses, *s);
  if (const auto* g = std::get_if<GateTarget>(&terminal)) return gate_gradient(sys, pulses, *g);
  throw UnsupportedError("gradient unavailable: the Fisher terminal cost is gradient-free only");
}

void add_running_gradient(const PulseSet& pulses, const std::vector<RunningCost>& running, RMatrix& grad) {
  const double dt = pulses.dt();
  const int n = pulses.n_slices();
  for (const auto& r : running) {
    if (r.control >= pulses.n_controls()) throw std::invalid_argument("running cost: control index out of range");
    const int first = r.control < 0 ? 0 : r.control;
    const int last = r.control < 0 ? pulses.n_controls() : r.control + 1;
    for (int i = first; i < last; ++i) {
      const auto u = pulses.amplitudes().row(i);
      if (r.kind == RunningCost::Kind::power) {
        const double p = u.squaredNorm() * dt;
        const double excess = std::max(0.0, p / r.power_limit - 1.0);
        grad.row(i) += (r.weight * 2.0 * excess / r.power_limit * 2.0 * dt) * u;
      } else {
        const double scale = 2.0 * r.weight / dt;
        for (int k = 0; k < n; ++k) {
          double g = 0.0;
          if (k > 0) g += u[k] - u[k - 1];
          if (k + 1 < n) g -= u[k + 1] - u[k];
          grad(i, k) += scale * g;
        }
      }
    }
  }
}

}  // namespace

CMatrix expm_derivative(const EigenSystem& eig, const CMatrix& direction, double dt) {
  const CMatrix kernel = derivative_kernel(eig.values, dt);
  const CMatrix rotated = eig.vectors.adjoint() * direction * eig.vectors;
  return eig.vectors * kernel.cwiseProduct(rotated) * eig.vectors.adjoint();
}

GradientReport grape_gradient(const Hamiltonian& sys, const PulseSet& pulses, const CostSpec& spec,
                              const ControlMapping* mapping) {
  if (std::holds_alternative<FisherTarget>(spec.terminal)) {
    throw UnsupportedError("gradient unavailable: the Fisher terminal cost is gradient-free only");
  }
  check_compatible(sys, pulses);
  const PulseSet physical = mapping ? map_controls(pulses, *mapping) : pulses;

  GradientReport report;
  report.grad = RMatrix::Zero(pulses.n_controls(), pulses.n_slices());
  if (spec.ensemble.empty()) {
    auto t = terminal_gradient(sys, physical, spec.terminal);
    report.cost = t.cost;
    report.grad = std::move(t.grad);
  } else {
    for (const auto& member : spec.ensemble) {
      auto t = terminal_gradient(member.system, physical, spec.terminal);
      report.cost += member.weight * t.cost;
      report.grad += member.weight * t.grad;
    }
  }
  report.cost += running_cost(physical, spec.running);
  add_running_gradient(physical, spec.running, report.grad);
  if (mapping) report.grad = report.grad.cwiseProduct(mapping_derivative(pulses, *mapping));
  if (!report.grad.allFinite() || !std::isfinite(report.cost)) {
    throw NumericError("grape_gradient: non-finite gradient");
  }
  return report;
}

RMatrix finite_difference_gradient(const Hamiltonian& sys, const PulseSet& pulses, const CostSpec& spec, double h,
                                   const ControlMapping* mapping) {
  RMatrix grad(pulses.n_controls(), pulses.n_slices());
  PulseSet probe = pulses;
  for (int i = 0; i < pulses.n_controls(); ++i) {
    for (int k = 0; k < pulses.n_slices(); ++k) {
      const double u0 = pulses.amplitudes()(i, k);
      probe.amplitudes()(i, k) = u0 + h;
      const double up = evaluate_cost(sys, probe, spec, mapping).total;
      probe.amplitudes()(i, k) = u0 - h;
      const double down = evaluate_cost(sys, probe, spec, mapping).total;
      probe.amplitudes()(i, k) = u0;
      grad(i, k) = (up - down) / (2.0 * h);
    }
  }
  return grad;
}

double gradient_deviation(const RMatrix& analytic, const RMatrix& numeric) {
  const double scale = numeric.cwiseAbs().maxCoeff();
  const double diff = (analytic - numeric).cwiseAbs().maxCoeff();
  if (scale == 0.0) return diff;
  return diff / scale;
}

GradientReport checked_gradient(const Hamiltonian& sys, const PulseSet& pulses, const CostSpec& spec, double h,
                                const ControlMapping* mapping) {
  GradientReport r = grape_gradient(sys, pulses, spec, mapping);
  r.fd_check = gradient_deviation(r.grad, finite_difference_gradient(sys, pulses, spec, h, mapping));
  return r;
}

void GrapeOptions::validate() const {
  if (max_iters < 0) throw std::invalid_argument("GrapeOptions: max_iters must be >= 0");
  if (!(tol_cost >= 0.0) || !(tol_grad >= 0.0)) throw std::invalid_argument("GrapeOptions: negative tolerance");
  if (!(step > 0.0)) throw std::invalid_argument("GrapeOptions: step must be positive");
  if (lbfgs_memory < 1) throw std::invalid_argument("GrapeOptions: lbfgs_memory must be >= 1");
  if (!(shrink > 0.0 && shrink < 1.0)) throw std::invalid_argument("GrapeOptions: shrink must lie in (0, 1)");
}

namespace {

// Two-loop recursion on flattened vectors.
RVector lbfgs_direction(const RVector& g, const std::deque<std::pair<RVector, RVector>>& history) {
  RVector q = g;
  std::vector<double> alpha(history.size());
  for (std::size_t j = history.size(); j-- > 0;) {
    const auto& [s, y] = history[j];
    alpha[j] = s.dot(q) / y.dot(s);
    q -= alpha[j] * y;
  }
  if (!history.empty()) {
    const auto& [s, y] = history.back();
    q *= s.dot(y) / y.dot(y);
  }
  for (std::size_t j = 0; j < history.size(); ++j) {
    const auto& [s, y] = history[j];
    const double beta = y.dot(q) / y.dot(s);
    q += (alpha[j] - beta) * s;
  }
  return -q;
}

RVector flatten(const RMatrix& m) { return Eigen::Map<const RVector>(m.data(), m.size()); }

RMatrix unflatten(const RVector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const RMatrix>(v.data(), rows, cols);
}

}  // namespace

OptimizationReport grape_optimize(const Hamiltonian& sys, const PulseSet& init, const CostSpec& spec,
                                  const GrapeOptions& opts) {
  opts.validate();
  sys.validate();
  spec.validate(sys.dim());
  check_compatible(sys, init);
  if (std::holds_alternative<FisherTarget>(spec.terminal)) {
    throw UnsupportedError("gradient unavailable: GRAPE cannot optimize the Fisher terminal cost");
  }
  const ControlMapping* mapping = opts.mapping ? &*opts.mapping : nullptr;
  const auto* clip = mapping ? std::get_if<ClipMapping>(mapping) : nullptr;
  const Eigen::Index rows = init.n_controls();
  const Eigen::Index cols = init.n_slices();

  auto project = [&](RVector x) {
    if (clip) x = x.cwiseMax(-clip->u_max).cwiseMin(clip->u_max);
    return x;
  };
  auto as_pulses = [&](const RVector& x) { return PulseSet(init.t_final(), unflatten(x, rows, cols)); };

  OptimizationReport report;
  RVector x = project(flatten(init.amplitudes()));
  GradientReport current;
  try {
    current = grape_gradient(sys, as_pulses(x), spec, mapping);
  } catch (const NumericError& e) {
    throw NumericError(std::string("grape: iteration 0: ") + e.what());
  }
  report.evaluations = 1;
  report.cost_trace.push_back(current.cost);
  RVector g = flatten(current.grad);
  double cost = current.cost;
  double step = opts.step;
  std::deque<std::pair<RVector, RVector>> history;
  report.stop_reason = StopReason::max_iterations;

  // Variables held at a clip bound by a gradient pointing outward are frozen
  // for the step; everything else sees the unconstrained update.
  auto free_gradient = [&](const RVector& grad) {
    RVector out = grad;
    if (clip) {
      for (Eigen::Index i = 0; i < out.size(); ++i) {
        if ((x[i] >= clip->u_max && grad[i] < 0.0) || (x[i] <= -clip->u_max && grad[i] > 0.0)) out[i] = 0.0;
      }
    }
    return out;
  };

  for (int it = 1; it <= opts.max_iters; ++it) {
    if (cost < opts.tol_cost) {
      report.stop_reason = StopReason::cost_tolerance;
      break;
    }
    const RVector gf = free_gradient(g);
    if (gf.cwiseAbs().maxCoeff() < opts.tol_grad) {
      report.stop_reason = StopReason::gradient_tolerance;
      break;
    }

    bool accepted = false;
    bool gradient_step = false;
    RVector x_new;
    double cost_new = cost;
    // A failed quasi-Newton search is retried once along the gradient.
    for (int attempt = 0; attempt < 2 && !accepted; ++attempt) {
      if (attempt == 1) {
        if (gradient_step) break;
        history.clear();
      }
      RVector d = opts.update == UpdateRule::lbfgs ? lbfgs_direction(gf, history) : RVector(-gf);
      for (Eigen::Index i = 0; i < d.size(); ++i) {
        if (gf[i] == 0.0 && g[i] != 0.0) d[i] = 0.0;
      }
      double slope = gf.dot(d);
      if (!(slope < 0.0)) {
        history.clear();
        d = -gf;
        slope = -gf.squaredNorm();
      }
      // Quasi-Newton directions carry their own scale; gradient directions use
      // the adaptive step, which doubles after every accepted gradient step.
      gradient_step = opts.update == UpdateRule::descent || history.empty();
      double alpha = gradient_step ? step : 1.0;
      for (int bt = 0; bt < opts.max_backtracks; ++bt) {
        x_new = project(x + alpha * d);
        try {
          cost_new = evaluate_cost(sys, as_pulses(x_new), spec, mapping).total;
        } catch (const NumericError& e) {
          throw NumericError("grape: iteration " + std::to_string(it) + ": " + e.what());
        }
        ++report.evaluations;
        const double predicted = clip ? gf.dot(x_new - x) : alpha * slope;
        if (cost_new <= cost + opts.sufficient_decrease * predicted && cost_new <= cost) {
          accepted = true;
          if (gradient_step) step = 2.0 * alpha;
          break;
        }
        alpha *= opts.shrink;
      }
    }
    if (!accepted) {
      report.stop_reason = StopReason::line_search_failed;
      break;
    }

    GradientReport next;
    try {
      next = grape_gradient(sys, as_pulses(x_new), spec, mapping);
    } catch (const NumericError& e) {
      throw NumericError("grape: iteration " + std::to_string(it) + ": " + e.what());
    }
    const RVector g_new = flatten(next.grad);
    const RVector s = x_new - x;
    const RVector y = g_new - g;
    if (opts.update == UpdateRule::lbfgs && s.dot(y) > 1e-12 * s.norm() * y.norm()) {
      history.emplace_back(s, y);
      if (static_cast<int>(history.size()) > opts.lbfgs_memory) history.pop_front();
    }
    x = x_new;
    g = g_new;
    cost = cost_new;
    report.cost_trace.push_back(cost);
    report.iterations = it;
  }

  if (report.stop_reason == StopReason::max_iterations && cost < opts.tol_cost) {
    report.stop_reason = StopReason::cost_tolerance;
  }
  const PulseSet raw = as_pulses(x);
  report.pulses = mapping ? map_controls(raw, *mapping) : raw;
  report.final_cost = cost;
  return report;
}

}  // namespace nvqoc
