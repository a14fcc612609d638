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

#include "nvqoc/crab.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace nvqoc {

void TimeGrid::validate() const {
  if (!(t_final > 0.0) || !std::isfinite(t_final)) throw std::invalid_argument("TimeGrid: t_final must be positive");
  if (n_slices < 1) throw std::invalid_argument("TimeGrid: n_slices must be >= 1");
}

double default_omega_max(int n_be, double t_final) {
  if (n_be < 1 || !(t_final > 0.0)) throw std::invalid_argument("default_omega_max: need n_be >= 1 and t_final > 0");
  return 2.0 * std::numbers::pi * n_be / t_final;
}

CrabBasis basis_from_offsets(double omega_max, std::span<const double> offsets) {
  if (offsets.empty()) throw std::invalid_argument("CrabBasis: N_be must be >= 1");
  if (!(omega_max > 0.0) || !std::isfinite(omega_max)) throw std::invalid_argument("CrabBasis: omega_max must be positive");
  CrabBasis basis;
  basis.omega_max = omega_max;
  const double band = omega_max / static_cast<double>(offsets.size());
  for (std::size_t l = 0; l < offsets.size(); ++l) {
    const double r = offsets[l];
    if (!(r >= -0.5 && r <= 0.5)) throw std::invalid_argument("CrabBasis: offset outside [-1/2, 1/2]");
    basis.omegas.push_back(band * (static_cast<double>(l + 1) + r - 0.5));
  }
  return basis;
}

CrabBasis sample_basis(int n_be, double omega_max, std::uint64_t seed) {
  if (n_be < 1) throw std::invalid_argument("sample_basis: N_be must be >= 1");
  Rng rng(seed);
  std::vector<double> offsets(static_cast<std::size_t>(n_be));
  for (auto& r : offsets) r = rng.uniform() - 0.5;
  CrabBasis basis = basis_from_offsets(omega_max, offsets);
  basis.seed = seed;
  return basis;
}

CrabParams CrabParams::zeros(int n_controls, int n_be) {
  return {RMatrix::Zero(n_controls, n_be), RMatrix::Zero(n_controls, n_be)};
}

RVector CrabParams::flatten() const {
  const Eigen::Index nc = a.rows(), nb = a.cols();
  RVector x(2 * nc * nb);
  for (Eigen::Index i = 0; i < nc; ++i) {
    x.segment(2 * i * nb, nb) = a.row(i).transpose();
    x.segment((2 * i + 1) * nb, nb) = b.row(i).transpose();
  }
  return x;
}

CrabParams CrabParams::unflatten(const RVector& x, int n_controls, int n_be) {
  if (x.size() != 2 * n_controls * n_be) throw std::invalid_argument("CrabParams: size mismatch");
  CrabParams p = zeros(n_controls, n_be);
  for (int i = 0; i < n_controls; ++i) {
    p.a.row(i) = x.segment(2 * i * n_be, n_be).transpose();
    p.b.row(i) = x.segment((2 * i + 1) * n_be, n_be).transpose();
  }
  return p;
}

PulseSet expand_raw(const CrabParams& params, const CrabBasis& basis, const TimeGrid& grid, const PulseSet* base) {
  grid.validate();
  const Eigen::Index nc = params.a.rows();
  if (params.a.cols() != basis.size() || params.b.rows() != nc || params.b.cols() != basis.size()) {
    throw std::invalid_argument("expand_pulse: coefficient shape does not match the basis");
  }
  if (!params.a.allFinite() || !params.b.allFinite()) throw std::invalid_argument("expand_pulse: non-finite coefficient");
  PulseSet out(grid.t_final, grid.n_slices, static_cast<int>(nc));
  if (base) {
    if (base->n_controls() != nc || base->n_slices() != grid.n_slices ||
        std::abs(base->t_final() - grid.t_final) > 1e-12 * grid.t_final) {
      throw std::invalid_argument("expand_pulse: base pulse does not match the grid");
    }
    out.amplitudes() = base->amplitudes();
  }
  const auto t = out.midpoints();
  for (int l = 0; l < basis.size(); ++l) {
    const double w = basis.omegas[static_cast<std::size_t>(l)];
    for (int k = 0; k < grid.n_slices; ++k) {
      const double s = std::sin(w * t[static_cast<std::size_t>(k)]);
      const double c = std::cos(w * t[static_cast<std::size_t>(k)]);
      for (Eigen::Index i = 0; i < nc; ++i) out.amplitudes()(i, k) += params.a(i, l) * s + params.b(i, l) * c;
    }
  }
  return out;
}

PulseSet expand_pulse(const CrabParams& params, const CrabBasis& basis, const TimeGrid& grid,
                      const ControlMapping* mapping, const PulseSet* base) {
  PulseSet raw = expand_raw(params, basis, grid, base);
  return mapping ? map_controls(raw, *mapping) : raw;
}

void CrabOptions::validate() const {
  if (max_evaluations < 0) throw std::invalid_argument("CrabOptions: negative evaluation budget");
  if (!(simplex_step > 0.0)) throw std::invalid_argument("CrabOptions: simplex_step must be positive");
  if (!(f_tol >= 0.0) || !(x_tol >= 0.0)) throw std::invalid_argument("CrabOptions: negative tolerance");
}

namespace {

struct Stage {
  OptimizationReport report;
  PulseSet raw;  // best raw pulse
};

// One CRAB search on top of `base`. `offset` is the number of evaluations
// already spent, so failures report a global evaluation index.
Stage crab_stage(const PulseObjective& cost, const TimeGrid& grid, int n_controls, const CrabBasis& basis,
                 const PulseSet& base, const ControlMapping* mapping, int budget, double step, double f_tol,
                 double x_tol, int offset) {
  const int n_be = basis.size();
  int index = offset;
  auto objective = [&](const RVector& x) {
    ++index;
    const PulseSet physical = expand_pulse(CrabParams::unflatten(x, n_controls, n_be), basis, grid, mapping, &base);
    try {
      return cost(physical);
    } catch (const NumericError& e) {
      throw NumericError("crab: evaluation " + std::to_string(index) + ": " + e.what());
    }
  };

  Stage stage;
  stage.report.seed = basis.seed;
  const RVector x0 = RVector::Zero(2 * n_controls * n_be);
  if (budget == 0) {
    const double f0 = objective(x0);
    stage.report.cost_trace = {f0};
    stage.report.final_cost = f0;
    stage.report.pulses = mapping ? map_controls(base, *mapping) : base;
    stage.report.stop_reason = StopReason::budget_exhausted;
    stage.raw = base;
    return stage;
  }

  NelderMeadOptions nm;
  nm.max_evaluations = budget;
  nm.initial_step = step;
  nm.f_tol = f_tol;
  nm.x_tol = x_tol;
  const NelderMeadResult res = nelder_mead(objective, x0, nm);

  const CrabParams best = CrabParams::unflatten(res.x, n_controls, n_be);
  stage.raw = expand_raw(best, basis, grid, &base);
  stage.report.pulses = mapping ? map_controls(stage.raw, *mapping) : stage.raw;
  stage.report.cost_trace = res.trace;
  stage.report.final_cost = res.f;
  stage.report.stop_reason = res.stop_reason;
  stage.report.iterations = res.iterations;
  stage.report.evaluations = res.evaluations;
  return stage;
}

PulseSet starting_pulse(const TimeGrid& grid, int n_controls, const std::optional<PulseSet>& guess) {
  grid.validate();
  if (n_controls < 1) throw std::invalid_argument("crab: need at least one control");
  return guess ? *guess : PulseSet(grid.t_final, grid.n_slices, n_controls);
}

PulseObjective system_objective(const Hamiltonian& sys, const CostSpec& spec) {
  sys.validate();
  spec.validate(sys.dim());
  return [&sys, &spec](const PulseSet& physical) { return evaluate_cost(sys, physical, spec).total; };
}

}  // namespace

OptimizationReport crab_optimize(const PulseObjective& cost, const TimeGrid& grid, int n_controls,
                                 const CrabBasis& basis, const CrabOptions& opts) {
  opts.validate();
  const int simplex = 2 * n_controls * basis.size() + 1;
  if (opts.max_evaluations != 0 && opts.max_evaluations < simplex) {
    throw std::invalid_argument("crab: budget " + std::to_string(opts.max_evaluations) +
                                " is smaller than the simplex size " + std::to_string(simplex));
  }
  const PulseSet base = starting_pulse(grid, n_controls, opts.guess);
  const ControlMapping* mapping = opts.mapping ? &*opts.mapping : nullptr;
  return crab_stage(cost, grid, n_controls, basis, base, mapping, opts.max_evaluations, opts.simplex_step,
                    opts.f_tol, opts.x_tol, 0)
      .report;
}

OptimizationReport crab_optimize(const Hamiltonian& sys, const TimeGrid& grid, const CostSpec& spec,
                                 const CrabBasis& basis, const CrabOptions& opts) {
  return crab_optimize(system_objective(sys, spec), grid, static_cast<int>(sys.n_controls()), basis, opts);
}

void DcrabOptions::validate(int n_controls) const {
  if (n_superiterations < 1) throw std::invalid_argument("DcrabOptions: N_SI must be >= 1");
  if (n_basis < 1) throw std::invalid_argument("DcrabOptions: N_be must be >= 1");
  if (!std::isfinite(omega_max)) throw std::invalid_argument("DcrabOptions: omega_max must be finite");
  const int simplex = 2 * n_controls * n_basis + 1;
  if (evaluations_per_superiteration < simplex) {
    throw std::invalid_argument("DcrabOptions: budget " + std::to_string(evaluations_per_superiteration) +
                                " is smaller than the simplex size " + std::to_string(simplex));
  }
  if (!(simplex_step > 0.0)) throw std::invalid_argument("DcrabOptions: simplex_step must be positive");
  if (!(f_tol >= 0.0) || !(x_tol >= 0.0)) throw std::invalid_argument("DcrabOptions: negative tolerance");
}

OptimizationReport dcrab_optimize(const PulseObjective& cost, const TimeGrid& grid, int n_controls,
                                  const DcrabOptions& opts) {
  PulseSet base = starting_pulse(grid, n_controls, opts.guess);
  opts.validate(n_controls);
  const double omega_max = opts.omega_max > 0.0 ? opts.omega_max : default_omega_max(opts.n_basis, grid.t_final);
  const ControlMapping* mapping = opts.mapping ? &*opts.mapping : nullptr;

  OptimizationReport report;
  report.seed = opts.seed;
  for (int d = 1; d <= opts.n_superiterations; ++d) {
    const CrabBasis basis = sample_basis(opts.n_basis, omega_max, superiteration_seed(opts.seed, d));
    Stage stage = crab_stage(cost, grid, n_controls, basis, base, mapping, opts.evaluations_per_superiteration,
                             opts.simplex_step, opts.f_tol, opts.x_tol, report.evaluations);
    // The zero-coefficient start re-evaluates the previous best, so clamping
    // only guards against a non-deterministic objective.
    const double floor = report.cost_trace.empty() ? stage.report.cost_trace.front() : report.cost_trace.back();
    for (double c : stage.report.cost_trace) report.cost_trace.push_back(std::min(c, floor));
    report.iterations += stage.report.iterations;
    report.evaluations += stage.report.evaluations;
    report.stop_reason = stage.report.stop_reason;
    report.final_cost = stage.report.final_cost;
    report.pulses = stage.report.pulses;
    base = stage.raw;
  }
  return report;
}

OptimizationReport dcrab_optimize(const Hamiltonian& sys, const TimeGrid& grid, const CostSpec& spec,
                                  const DcrabOptions& opts) {
  return dcrab_optimize(system_objective(sys, spec), grid, static_cast<int>(sys.n_controls()), opts);
}

}  // namespace nvqoc
