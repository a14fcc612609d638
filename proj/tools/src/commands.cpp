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


#include "nvqoc_cli/commands.hpp"

#include <chrono>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "nvqoc/limits.hpp"

namespace nvqoc::cli {

using nlohmann::json;

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string format_double(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

namespace {

const char* command_name(Command c) {
  switch (c) {
    case Command::simulate:
      return "simulate";
    case Command::optimize:
      return "optimize";
    case Command::sense:
      return "sense";
    case Command::limits:
      return "limits";
  }
  return "?";
}

// Tab-separated table with a header row and %.17g cells.
class Table {
 public:
  explicit Table(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) ss_ << (i ? "\t" : "") << header[i];
    ss_ << '\n';
  }
  void row(const std::vector<double>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!std::isfinite(cells[i])) throw NumericError("non-finite value in output table");
      ss_ << (i ? "\t" : "") << format_double(cells[i]);
    }
    ss_ << '\n';
  }
  std::string str() const { return ss_.str(); }

 private:
  std::ostringstream ss_;
};

std::string hex64(std::uint64_t x) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, x);
  return buf;
}

json report_header(Command cmd, const json& echo) {
  json r;
  r["command"] = command_name(cmd);
  r["config"] = echo;
  r["config_hash"] = "fnv1a64:" + hex64(fnv1a(echo.dump()));
  return r;
}

std::string dump(const json& report) { return report.dump(2) + "\n"; }

void require_block(bool present, Command cmd, const char* block) {
  if (!present) throw ConfigError(std::string("/") + block + ": required by the " + command_name(cmd) + " command");
}
void forbid_block(bool present, Command cmd, const char* block) {
  if (present) throw ConfigError(std::string("/") + block + ": not allowed with the " + command_name(cmd) + " command");
}

json pulses_json(const PulseSet& p) {
  json rows = json::array();
  for (int c = 0; c < p.n_controls(); ++c) {
    json row = json::array();
    for (int k = 0; k < p.n_slices(); ++k) row.push_back(p.amplitudes()(c, k));
    rows.push_back(row);
  }
  return {{"t_final", p.t_final()}, {"n_slices", p.n_slices()}, {"amplitudes", rows}};
}

std::string pulse_table(const PulseSet& p) {
  std::vector<std::string> header{"t"};
  for (int c = 0; c < p.n_controls(); ++c) header.push_back("u_" + std::to_string(c + 1));
  Table t(header);
  for (int k = 0; k < p.n_slices(); ++k) {
    std::vector<double> row{k * p.dt()};
    for (int c = 0; c < p.n_controls(); ++c) row.push_back(p.amplitudes()(c, k));
    t.row(row);
  }
  return t.str();
}

json t_qsl_json(const QslReport& q) {
  if (q.infinite) return "infinite";
  return q.t_qsl;
}

std::string t_qsl_text(const QslReport& q) { return q.infinite ? "infinite" : format_double(q.t_qsl); }

// --------------------------------------------------------------- simulate

CommandResult simulate(const ProblemConfig& c, json report) {
  const Command cmd = Command::simulate;
  require_block(c.system.has_value(), cmd, "system");
  require_block(c.pulse.has_value(), cmd, "pulse");
  require_block(c.initial_state.has_value(), cmd, "initial_state");
  forbid_block(c.optimizer.has_value(), cmd, "optimizer");
  forbid_block(c.sensing.has_value(), cmd, "sensing");

  const Trajectory tr = propagate(c.system->hamiltonian, *c.pulse, *c.initial_state);
  const Eigen::Index d = c.initial_state->size();
  std::vector<std::string> header{"t"};
  for (Eigen::Index i = 0; i < d; ++i) header.push_back("P" + std::to_string(i));
  for (Eigen::Index i = 0; i < d; ++i) {
    header.push_back("re" + std::to_string(i));
    header.push_back("im" + std::to_string(i));
  }
  Table table(header);
  for (std::size_t k = 0; k < tr.times.size(); ++k) {
    const CVector& psi = tr.states[k];
    std::vector<double> row{tr.times[k]};
    for (Eigen::Index i = 0; i < d; ++i) row.push_back(std::norm(psi[i]));
    for (Eigen::Index i = 0; i < d; ++i) {
      row.push_back(psi[i].real());
      row.push_back(psi[i].imag());
    }
    table.row(row);
  }

  const CVector& last = tr.states.back();
  json pops = json::array();
  for (Eigen::Index i = 0; i < d; ++i) pops.push_back(std::norm(last[i]));
  report["dimension"] = d;
  report["t_final"] = c.pulse->t_final();
  report["n_slices"] = c.pulse->n_slices();
  report["final_populations"] = pops;
  report["norm_error"] = std::abs(last.norm() - 1.0);

  CommandResult r;
  r.files = {{"trajectory.tsv", table.str()}, {"report.json", dump(report)}};
  std::ostringstream s;
  s << "simulated " << c.pulse->n_slices() << " slices over t = " << format_double(c.pulse->t_final()) << " us\n";
  for (Eigen::Index i = 0; i < d; ++i) s << "P" << i << "(T) = " << format_double(std::norm(last[i])) << "\n";
  r.summary = s.str();
  return r;
}

// --------------------------------------------------------------- optimize

CommandResult optimize(const ProblemConfig& c, json report) {
  const Command cmd = Command::optimize;
  require_block(c.system.has_value(), cmd, "system");
  require_block(c.pulse.has_value(), cmd, "pulse");
  require_block(c.cost.has_value(), cmd, "cost");
  require_block(c.optimizer.has_value(), cmd, "optimizer");
  forbid_block(c.sensing.has_value(), cmd, "sensing");

  const Hamiltonian& sys = c.system->hamiltonian;
  const CostSpec& spec = *c.cost;
  const OptimizerConfig& o = *c.optimizer;
  const TimeGrid grid{c.pulse->t_final(), c.pulse->n_slices()};
  OptimizationReport rep;
  json seeds = {{"master", c.seed}};
  const char* name = "grape";
  switch (o.kind) {
    case OptimizerConfig::Kind::grape:
      rep = grape_optimize(sys, *c.pulse, spec, o.grape);
      break;
    case OptimizerConfig::Kind::crab: {
      name = "crab";
      const double wmax = o.crab_omega_max > 0.0 ? o.crab_omega_max : default_omega_max(o.crab_basis, grid.t_final);
      const CrabBasis basis = sample_basis(o.crab_basis, wmax, c.seed);
      CrabOptions opts = o.crab;
      opts.guess = *c.pulse;
      rep = crab_optimize(sys, grid, spec, basis, opts);
      seeds["basis"] = basis.seed;
      seeds["omegas"] = basis.omegas;
      break;
    }
    case OptimizerConfig::Kind::dcrab: {
      name = "dcrab";
      DcrabOptions opts = o.dcrab;
      opts.seed = c.seed;
      opts.guess = *c.pulse;
      rep = dcrab_optimize(sys, grid, spec, opts);
      json per = json::array();
      for (int d = 1; d <= opts.n_superiterations; ++d) per.push_back(superiteration_seed(c.seed, d));
      seeds["superiterations"] = per;
      break;
    }
  }
  if (!std::isfinite(rep.final_cost)) throw NumericError("optimize: non-finite final cost");

  report["optimizer"] = name;
  report["final_cost"] = rep.final_cost;
  report["stop_reason"] = std::string(to_string(rep.stop_reason));
  report["iterations"] = rep.iterations;
  report["evaluations"] = rep.evaluations;
  report["seeds"] = seeds;
  report["cost_trace"] = rep.cost_trace;
  report["pulses"] = pulses_json(rep.pulses);

  std::ostringstream s;
  s << name << ": final cost " << format_double(rep.final_cost) << " after " << rep.iterations << " iterations ("
    << to_string(rep.stop_reason) << ")\n";
  if (const auto* st = std::get_if<StateTransfer>(&spec.terminal)) {
    // Speed-limit bound of the constant Hamiltonian that dominates the pulse.
    const QslReport q = qsl_bhattacharyya(qsl_surrogate(sys, rep.pulses), st->initial, st->target);
    const bool below = rep.final_cost < 1e-4 && !q.infinite && rep.pulses.t_final() < q.t_qsl;
    report["qsl"] = {{"t_qsl", t_qsl_json(q)}, {"t_final", rep.pulses.t_final()}, {"below_bound", below}};
    s << "t_qsl (surrogate) = " << t_qsl_text(q) << " us, t_final = " << format_double(rep.pulses.t_final())
      << " us\n";
  }

  Table trace({"iteration", "cost"});
  for (std::size_t i = 0; i < rep.cost_trace.size(); ++i) trace.row({static_cast<double>(i), rep.cost_trace[i]});

  CommandResult r;
  r.files = {{"pulses.tsv", pulse_table(rep.pulses)}, {"cost_trace.tsv", trace.str()}, {"report.json", dump(report)}};
  r.summary = s.str();
  return r;
}

// ------------------------------------------------------------------ sense

SensingSequence build_sequence(const SensingConfig& s, double tau) {
  switch (s.sequence) {
    case SensingConfig::Sequence::ramsey:
      return ramsey_sequence(tau);
    case SensingConfig::Sequence::echo:
      return echo_sequence(tau);
    case SensingConfig::Sequence::cpmg:
      return cpmg_sequence(s.n_pulses, s.n_pulses * tau);
  }
  throw std::logic_error("unreachable");
}

CommandResult sense(const ProblemConfig& c, json report) {
  const Command cmd = Command::sense;
  require_block(c.sensing.has_value(), cmd, "sensing");
  forbid_block(c.optimizer.has_value(), cmd, "optimizer");
  const SensingConfig& s = *c.sensing;

  std::vector<std::string> header{"tau", "total_time", "phase", "p0"};
  if (s.shots > 0) {
    header.push_back("p_hat");
    header.push_back("std_error");
  }
  Table sweep(header);
  std::vector<double> taus, p0s;
  for (int k = 0; k < s.tau_points; ++k) {
    const double tau =
        s.tau_points == 1 ? s.tau_start : s.tau_start + (s.tau_stop - s.tau_start) * k / (s.tau_points - 1);
    const SensingSequence seq = build_sequence(s, tau);
    const double t = seq.total_time();
    const double phase = dd_phase(seq, s.signal, s.gamma);
    if (!std::isfinite(phase)) throw NumericError("sense: non-finite phase at tau = " + format_double(tau));
    const double p0 =
        readout_probability(phase + s.readout_phase, s.contrast, s.envelope.coherence(t, seq.echo_class()));
    std::vector<double> row{tau, t, phase, p0};
    if (s.shots > 0) {
      const ReadoutSummary ro = simulate_readout(phase + s.readout_phase, s.contrast, s.envelope, t, s.shots,
                                                 c.seed ^ mix_seed(static_cast<std::uint64_t>(k)), seq.echo_class());
      row.push_back(ro.p_hat);
      row.push_back(ro.std_error);
    }
    sweep.row(row);
    taus.push_back(tau);
    p0s.push_back(p0);
  }
  json minima = json::array();
  for (std::size_t k = 1; k + 1 < p0s.size(); ++k) {
    if (p0s[k] < p0s[k - 1] && p0s[k] <= p0s[k + 1]) minima.push_back({{"tau", taus[k]}, {"p0", p0s[k]}});
  }
  const auto [lo, hi] = std::minmax_element(p0s.begin(), p0s.end());
  report["population_minima"] = minima;
  report["p0_min"] = *lo;
  report["p0_max"] = *hi;
  report["seeds"] = {{"master", c.seed}};

  CommandResult r;
  r.files.push_back({"sweep.tsv", sweep.str()});
  std::ostringstream sum;
  sum << "swept " << s.tau_points << " values of tau; p0 in [" << format_double(*lo) << ", " << format_double(*hi)
      << "], " << minima.size() << " interior minima\n";

  if (s.filter_tau) {
    const SensingSequence seq = build_sequence(s, *s.filter_tau);
    const RVector omegas = s.filter_omega_max ? RVector(RVector::LinSpaced(s.filter_points, 0.0, *s.filter_omega_max))
                                              : natural_omega_grid(seq, s.filter_points);
    const RVector f = filter_function(seq, omegas);
    Table ft({"omega", "filter"});
    for (Eigen::Index i = 0; i < omegas.size(); ++i) ft.row({omegas[i], f[i]});
    Eigen::Index peak = 0;
    f.maxCoeff(&peak);
    report["filter"] = {{"tau", *s.filter_tau}, {"peak_omega", omegas[peak]}};
    r.files.push_back({"filter.tsv", ft.str()});
    sum << "filter peak at omega = " << format_double(omegas[peak]) << " rad/us\n";
  }
  r.files.push_back({"report.json", dump(report)});
  r.summary = sum.str();
  return r;
}

// ----------------------------------------------------------------- limits

CommandResult limits(const ProblemConfig& c, json report) {
  const Command cmd = Command::limits;
  require_block(c.system.has_value(), cmd, "system");
  require_block(c.limits.has_value(), cmd, "limits");
  forbid_block(c.optimizer.has_value(), cmd, "optimizer");
  forbid_block(c.sensing.has_value(), cmd, "sensing");
  const Hamiltonian& sys = c.system->hamiltonian;
  const LimitsConfig& l = *c.limits;
  std::ostringstream s;

  if (l.qsl) {
    require_block(c.initial_state.has_value(), cmd, "initial_state");
    CMatrix h;
    if (l.source == LimitsConfig::Source::pulse) {
      require_block(c.pulse.has_value(), cmd, "pulse");
      h = qsl_surrogate(sys, *c.pulse);
    } else {
      const RVector u = c.system->drive ? *c.system->drive : RVector::Zero(static_cast<Eigen::Index>(sys.n_controls()));
      h = sys.at(u);
    }
    const QslReport q = qsl_bhattacharyya(h, *c.initial_state, l.target);
    report["qsl"] = {{"delta_e", q.delta_e}, {"angle", q.angle}, {"t_qsl", t_qsl_json(q)}};
    s << "t_qsl = " << t_qsl_text(q) << "\n";
  }
  if (l.controllability) {
    if (sys.dim() > kMaxControllabilityDimension) {
      throw UnsupportedError("limits: controllability is limited to dimension " +
                             std::to_string(kMaxControllabilityDimension));
    }
    const ControllabilityReport cr = controllability_rank(sys);
    report["controllability"] = {
        {"lie_dim", cr.lie_dim}, {"full_dim", cr.full_dim}, {"controllable", cr.controllable}};
    s << "lie_dim = " << cr.lie_dim << " of " << cr.full_dim << "\n"
      << "controllable = " << (cr.controllable ? "true" : "false") << "\n";
  }

  CommandResult r;
  r.files = {{"report.json", dump(report)}};
  r.summary = s.str();
  return r;
}

void write_outputs(const std::filesystem::path& dir, const std::vector<OutputFile>& files) {
  std::filesystem::create_directories(dir);
  for (const auto& f : files) {
    std::ofstream out(dir / f.name, std::ios::binary | std::ios::trunc);
    out << f.content;
    if (!out) throw std::runtime_error("cannot write " + (dir / f.name).string());
  }
}

}  // namespace

CommandResult execute(Command cmd, const json& doc, std::optional<std::uint64_t> seed_override) {
  const ProblemConfig c = parse_config(doc, seed_override);
  json echo = doc;
  echo["seed"] = c.seed;
  json report = report_header(cmd, echo);
  switch (cmd) {
    case Command::simulate:
      return simulate(c, std::move(report));
    case Command::optimize:
      return optimize(c, std::move(report));
    case Command::sense:
      return sense(c, std::move(report));
    case Command::limits:
      return limits(c, std::move(report));
  }
  throw std::logic_error("unreachable");
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"nvqoc: NV-centre optimal control and sensing"};
  app.require_subcommand(1);
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  const std::vector<std::pair<Command, const char*>> commands{
      {Command::simulate, "Propagate the configured pulse and tabulate the state trajectory"},
      {Command::optimize, "Optimize pulses with GRAPE, CRAB or dCRAB"},
      {Command::sense, "Sweep a sensing sequence and tabulate phase, population and filter function"},
      {Command::limits, "Quantum speed limit and controllability analysis"},
  };
  for (const auto& [cmd, help] : commands) {
    CLI::App* sub = app.add_subcommand(command_name(cmd), help);
    sub->add_option("--config", config_path, "Problem configuration (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory")->capture_default_str();
    sub->add_option("--seed", seed, "Override the configuration seed");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  Command cmd = Command::simulate;
  for (const auto& [c, help] : commands) {
    if (app.got_subcommand(command_name(c))) cmd = c;
  }

  const auto start = std::chrono::steady_clock::now();
  try {
    const CommandResult r = execute(cmd, load_config_file(config_path), seed);
    write_outputs(out_dir, r.files);
    out << r.summary;
    for (const auto& f : r.files) out << "wrote " << (std::filesystem::path(out_dir) / f.name).string() << "\n";
  } catch (const ConfigError& e) {
    err << "config error: " << config_path << ": " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::invalid_argument& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericError& e) {
    err << "numeric failure: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const UnsupportedError& e) {
    err << "unsupported: " << e.what() << "\n";
    return kExitUnsupported;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  const std::chrono::duration<double> wall = std::chrono::steady_clock::now() - start;
  err << "wall time " << format_double(wall.count()) << " s\n";
  return kExitOk;
}

}  // namespace nvqoc::cli
