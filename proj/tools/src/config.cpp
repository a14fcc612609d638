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


#include "nvqoc_cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "nvqoc/rng.hpp"

namespace nvqoc::cli {

using nlohmann::json;

namespace {

std::string escape_key(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') {
      out += "~0";
    } else if (c == '/') {
      out += "~1";
    } else {
      out += c;
    }
  }
  return out;
}

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError((path.empty() ? std::string("/") : path) + ": " + what);
}

double as_number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

long long as_integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<long long>();
}

Complex as_complex(const json& j, const std::string& path) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) {
    return {as_number(j[0], path + "/0"), as_number(j[1], path + "/1")};
  }
  fail(path, "expected a number or [re, im]");
}

CVector as_cvector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array");
  CVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = as_complex(j[i], path + "/" + std::to_string(i));
  }
  return v;
}

RVector as_rvector(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array");
  RVector v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    v[static_cast<Eigen::Index>(i)] = as_number(j[i], path + "/" + std::to_string(i));
  }
  return v;
}

CMatrix as_cmatrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) fail(path, "expected a non-empty array of rows");
  const auto n = static_cast<Eigen::Index>(j.size());
  CMatrix m(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    const CVector row = as_cvector(j[static_cast<std::size_t>(r)], rp);
    if (row.size() != n) fail(rp, "expected " + std::to_string(n) + " entries (square matrix)");
    m.row(r) = row.transpose();
  }
  return m;
}

Vec3 as_vec3(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 3) fail(path, "expected [x, y, z]");
  return {as_number(j[0], path + "/0"), as_number(j[1], path + "/1"), as_number(j[2], path + "/2")};
}

// One JSON object under strict parsing. Every key read is recorded;
// finish() rejects whatever was left unread.
class Obj {
 public:
  Obj(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_ + "/" + escape_key(key); }
  const std::string& path() const { return path_; }
  bool has(const std::string& key) const { return j_.contains(key); }

  const json* get(const std::string& key) {
    used_.insert(key);
    const auto it = j_.find(key);
    return it == j_.end() ? nullptr : &*it;
  }
  const json& require(const std::string& key) {
    const json* v = get(key);
    if (v == nullptr) fail(at(key), "required key is missing");
    return *v;
  }

  double number(const std::string& key, double def) {
    const json* v = get(key);
    return v ? as_number(*v, at(key)) : def;
  }
  double number(const std::string& key) { return as_number(require(key), at(key)); }
  double positive(const std::string& key, double def) {
    const double x = number(key, def);
    if (!(x > 0.0)) fail(at(key), "must be positive");
    return x;
  }
  double non_negative(const std::string& key, double def) {
    const double x = number(key, def);
    if (!(x >= 0.0)) fail(at(key), "must be non-negative");
    return x;
  }
  int integer(const std::string& key, int def, int lo) {
    const json* v = get(key);
    const long long x = v ? as_integer(*v, at(key)) : def;
    if (x < lo || x > 100000000) fail(at(key), "must be an integer in [" + std::to_string(lo) + ", 1e8]");
    return static_cast<int>(x);
  }
  bool boolean(const std::string& key, bool def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_boolean()) fail(at(key), "expected true or false");
    return v->get<bool>();
  }
  std::string string(const std::string& key, const std::string& def) {
    const json* v = get(key);
    if (!v) return def;
    if (!v->is_string()) fail(at(key), "expected a string");
    return v->get<std::string>();
  }
  std::string string(const std::string& key) {
    const json& v = require(key);
    if (!v.is_string()) fail(at(key), "expected a string");
    return v.get<std::string>();
  }
  template <class Enum>
  Enum choice(const std::string& key, const std::vector<std::pair<std::string, Enum>>& options,
              std::optional<Enum> def = std::nullopt) {
    if (!has(key) && def) {
      used_.insert(key);
      return *def;
    }
    const std::string s = string(key);
    std::string names;
    for (const auto& [name, value] : options) {
      if (name == s) return value;
      names += (names.empty() ? "" : ", ") + name;
    }
    fail(at(key), "unknown value \"" + s + "\" (expected one of: " + names + ")");
  }

  void finish() const {
    for (const auto& [key, value] : j_.items()) {
      if (!used_.count(key)) fail(at(key), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

// Turns library validation failures into configuration errors at `path`.
template <class F>
auto validated(const std::string& path, F&& f) {
  try {
    return f();
  } catch (const std::invalid_argument& e) {
    fail(path, e.what());
  }
}

CVector parse_state(const json& j, const std::string& path, Eigen::Index dim) {
  CVector psi;
  if (j.is_object()) {
    Obj o(j, path);
    const int k = o.integer("basis", 0, 0);
    o.require("basis");
    o.finish();
    if (k >= dim) fail(o.at("basis"), "basis index out of range for dimension " + std::to_string(dim));
    psi = CVector::Zero(dim);
    psi[k] = 1.0;
    return psi;
  }
  psi = as_cvector(j, path);
  if (psi.size() != dim) fail(path, "expected " + std::to_string(dim) + " amplitudes");
  if (std::abs(psi.norm() - 1.0) > 1e-9) fail(path, "state is not normalized");
  return psi;
}

CMatrix parse_square(const json& j, const std::string& path, Eigen::Index dim) {
  CMatrix m = as_cmatrix(j, path);
  if (m.rows() != dim) fail(path, "expected a " + std::to_string(dim) + "x" + std::to_string(dim) + " matrix");
  return m;
}

SystemConfig parse_system(const json& j, const std::string& path) {
  Obj o(j, path);
  SystemConfig s;
  s.type = o.string("type");
  if (s.type == "rwa_qubit") {
    const double delta = o.number("detuning", 0.0);
    const double omega = o.number("omega", 0.0);
    const double phi = o.number("phase", 0.0);
    const RwaQubit q = rwa_qubit_hamiltonian(delta, omega, phi);
    s.hamiltonian = q.system;
    s.drive = RVector(2);
    *s.drive << q.amplitudes[0], q.amplitudes[1];
    s.detuning_op = spin_operators(0.5).sz;
  } else if (s.type == "nv_ground") {
    NVParameters p;
    p.D = o.number("D", p.D);
    p.E = o.number("E", p.E);
    p.gamma_nv = o.number("gamma_nv", p.gamma_nv);
    if (const json* v = o.get("B")) p.B = as_vec3(*v, o.at("B"));
    if (const json* v = o.get("efield")) p.efield = as_vec3(*v, o.at("efield"));
    p.delta_par = o.number("delta_par", p.delta_par);
    p.delta_perp = o.number("delta_perp", p.delta_perp);
    if (const json* v = o.get("nuclei")) {
      if (!v->is_array()) fail(o.at("nuclei"), "expected an array");
      for (std::size_t i = 0; i < v->size(); ++i) {
        Obj n((*v)[i], o.at("nuclei") + "/" + std::to_string(i));
        NucleusSpec ns;
        ns.spin = n.positive("spin", ns.spin);
        ns.axial = n.number("axial", ns.axial);
        ns.transverse = n.number("transverse", ns.transverse);
        ns.gamma = n.number("gamma", ns.gamma);
        ns.quadrupole = n.number("quadrupole", ns.quadrupole);
        n.finish();
        p.nuclei.push_back(ns);
      }
    }
    s.hamiltonian = validated(path, [&] { return nv_ground_hamiltonian(p); });
    const Eigen::Index rest = s.hamiltonian.dim() / 3;
    s.detuning_op = kron(spin_operators(1.0).sz, CMatrix::Identity(rest, rest));
  } else if (s.type == "custom") {
    s.hamiltonian.drift = as_cmatrix(o.require("drift"), o.at("drift"));
    const Eigen::Index dim = s.hamiltonian.dim();
    if (const json* v = o.get("controls")) {
      if (!v->is_array()) fail(o.at("controls"), "expected an array of matrices");
      for (std::size_t i = 0; i < v->size(); ++i) {
        s.hamiltonian.controls.push_back(parse_square((*v)[i], o.at("controls") + "/" + std::to_string(i), dim));
      }
    }
    if (const json* v = o.get("detuning_operator")) {
      s.detuning_op = parse_square(*v, o.at("detuning_operator"), dim);
      if (!is_hermitian(*s.detuning_op)) fail(o.at("detuning_operator"), "matrix is not Hermitian");
    }
  } else {
    fail(o.at("type"), "unknown system type \"" + s.type + "\" (expected rwa_qubit, nv_ground or custom)");
  }
  o.finish();
  validated(path, [&] {
    s.hamiltonian.validate();
    return 0;
  });
  return s;
}

PulseSet parse_pulse(const json& j, const std::string& path, const SystemConfig& sys, std::uint64_t seed) {
  Obj o(j, path);
  const double t_final = o.positive("t_final", 1.0);
  o.require("t_final");
  const int n_slices = o.integer("n_slices", 1, 1);
  o.require("n_slices");
  const int m = static_cast<int>(sys.hamiltonian.n_controls());
  PulseSet pulses(t_final, n_slices, m);
  if (const json* v = o.get("init")) {
    Obj init(*v, o.at("init"));
    const std::string type = init.string("type");
    if (type == "zero") {
    } else if (type == "constant") {
      const RVector values = as_rvector(init.require("values"), init.at("values"));
      if (values.size() != m) fail(init.at("values"), "expected one value per control (" + std::to_string(m) + ")");
      pulses.amplitudes() = values.replicate(1, n_slices);
    } else if (type == "amplitudes") {
      const json& rows = init.require("values");
      const std::string rp = init.at("values");
      if (!rows.is_array() || rows.size() != static_cast<std::size_t>(m)) {
        fail(rp, "expected one row per control (" + std::to_string(m) + ")");
      }
      for (int c = 0; c < m; ++c) {
        const RVector row = as_rvector(rows[static_cast<std::size_t>(c)], rp + "/" + std::to_string(c));
        if (row.size() != n_slices) fail(rp + "/" + std::to_string(c), "expected n_slices values");
        pulses.amplitudes().row(c) = row.transpose();
      }
    } else if (type == "random") {
      const double scale = init.positive("scale", 1.0);
      Rng rng(seed);
      for (int c = 0; c < m; ++c) {
        for (int k = 0; k < n_slices; ++k) pulses.amplitudes()(c, k) = rng.uniform(-scale, scale);
      }
    } else {
      fail(init.at("type"), "unknown init type \"" + type + "\" (expected zero, constant, amplitudes or random)");
    }
    init.finish();
  } else if (sys.drive) {
    pulses.amplitudes() = sys.drive->replicate(1, n_slices);
  }
  o.finish();
  return pulses;
}

PhaseMode parse_phase(Obj& o) {
  return o.choice<PhaseMode>("phase", {{"modulus", PhaseMode::modulus}, {"fixed", PhaseMode::fixed}},
                             PhaseMode::modulus);
}

CostSpec parse_cost(const json& j, const std::string& path, const SystemConfig& sys,
                    const std::optional<CVector>& initial) {
  Obj o(j, path);
  const Eigen::Index dim = sys.hamiltonian.dim();
  CostSpec spec;
  {
    Obj t(o.require("terminal"), o.at("terminal"));
    const std::string type = t.string("type");
    auto need_initial = [&] {
      if (!initial) fail("/initial_state", "required by the \"" + type + "\" cost");
      return *initial;
    };
    if (type == "state") {
      StateTransfer s;
      s.initial = need_initial();
      s.target = parse_state(t.require("target"), t.at("target"), dim);
      s.phase = parse_phase(t);
      spec.terminal = s;
    } else if (type == "gate") {
      GateTarget g;
      g.target = parse_square(t.require("target"), t.at("target"), dim);
      if (unitarity_error(g.target) > 1e-9) fail(t.at("target"), "target gate is not unitary");
      g.phase = parse_phase(t);
      spec.terminal = g;
    } else if (type == "fisher") {
      FisherTarget f;
      f.initial = need_initial();
      f.generator = parse_square(t.require("generator"), t.at("generator"), dim);
      const json& povm = t.require("povm");
      if (!povm.is_array() || povm.empty()) fail(t.at("povm"), "expected a non-empty array of matrices");
      for (std::size_t i = 0; i < povm.size(); ++i) {
        f.povm.push_back(parse_square(povm[i], t.at("povm") + "/" + std::to_string(i), dim));
      }
      f.theta0 = t.number("theta0", 0.0);
      f.n_measurements = t.positive("n_measurements", 1.0);
      f.fisher.step = t.positive("fd_step", f.fisher.step);
      f.fisher.p_floor = t.non_negative("p_floor", f.fisher.p_floor);
      spec.terminal = f;
    } else {
      fail(t.at("type"), "unknown terminal cost \"" + type + "\" (expected state, gate or fisher)");
    }
    t.finish();
  }
  if (const json* v = o.get("running")) {
    if (!v->is_array()) fail(o.at("running"), "expected an array");
    for (std::size_t i = 0; i < v->size(); ++i) {
      Obj r((*v)[i], o.at("running") + "/" + std::to_string(i));
      RunningCost rc;
      rc.kind = r.choice<RunningCost::Kind>("type", {{"power", RunningCost::Kind::power},
                                                     {"bandwidth", RunningCost::Kind::bandwidth}});
      if (rc.kind == RunningCost::Kind::power) {
        rc.weight = r.non_negative("weight", 1.0);
        rc.power_limit = r.positive("limit", rc.power_limit);
      } else {
        rc.weight = r.non_negative("eps", 1.0);
      }
      rc.control = r.integer("control", -1, -1);
      r.finish();
      spec.running.push_back(rc);
    }
  }
  if (const json* v = o.get("ensemble")) {
    Obj e(*v, o.at("ensemble"));
    CMatrix op;
    if (const json* d = e.get("detuning_operator")) {
      op = parse_square(*d, e.at("detuning_operator"), dim);
    } else if (sys.detuning_op) {
      op = *sys.detuning_op;
    } else {
      fail(e.at("detuning_operator"), "required for custom systems");
    }
    const json& members = e.require("members");
    if (!members.is_array() || members.empty()) fail(e.at("members"), "expected a non-empty array");
    const double uniform = 1.0 / static_cast<double>(members.size());
    for (std::size_t i = 0; i < members.size(); ++i) {
      Obj m(members[i], e.at("members") + "/" + std::to_string(i));
      const double detuning = m.number("detuning", 0.0);
      const double scale = m.number("control_scale", 1.0);
      const double weight = m.non_negative("weight", uniform);
      m.finish();
      spec.ensemble.push_back(ensemble_member(sys.hamiltonian, op, detuning, scale, weight));
    }
    e.finish();
  }
  o.finish();
  validated(path, [&] {
    spec.validate(dim);
    return 0;
  });
  return spec;
}

std::optional<ControlMapping> parse_mapping(Obj& parent, const PulseSet* pulse) {
  const json* v = parent.get("mapping");
  if (!v) return std::nullopt;
  Obj o(*v, parent.at("mapping"));
  const std::string type = o.string("type");
  ControlMapping out;
  if (type == "clip") {
    out = ClipMapping{o.positive("u_max", 1.0)};
  } else if (type == "sine") {
    out = SineMapping{o.positive("u_max", 1.0)};
  } else if (type == "shape") {
    ShapeMapping s{as_rvector(o.require("envelope"), o.at("envelope"))};
    if (pulse && s.envelope.size() != pulse->n_slices()) fail(o.at("envelope"), "expected n_slices values");
    out = s;
  } else {
    fail(o.at("type"), "unknown mapping \"" + type + "\" (expected clip, sine or shape)");
  }
  o.finish();
  return out;
}

OptimizerConfig parse_optimizer(const json& j, const std::string& path, const PulseSet* pulse, std::uint64_t seed) {
  Obj o(j, path);
  OptimizerConfig c;
  c.kind = o.choice<OptimizerConfig::Kind>("type", {{"grape", OptimizerConfig::Kind::grape},
                                                    {"crab", OptimizerConfig::Kind::crab},
                                                    {"dcrab", OptimizerConfig::Kind::dcrab}});
  switch (c.kind) {
    case OptimizerConfig::Kind::grape: {
      GrapeOptions& g = c.grape;
      g.max_iters = o.integer("max_iters", g.max_iters, 0);
      g.step = o.positive("step", g.step);
      g.tol_cost = o.non_negative("tol_cost", g.tol_cost);
      g.tol_grad = o.non_negative("tol_grad", g.tol_grad);
      g.update = o.choice<UpdateRule>("update", {{"lbfgs", UpdateRule::lbfgs}, {"descent", UpdateRule::descent}},
                                      g.update);
      g.lbfgs_memory = o.integer("lbfgs_memory", g.lbfgs_memory, 1);
      g.mapping = parse_mapping(o, pulse);
      validated(path, [&] {
        g.validate();
        return 0;
      });
      break;
    }
    case OptimizerConfig::Kind::crab: {
      CrabOptions& cr = c.crab;
      c.crab_basis = o.integer("n_basis", c.crab_basis, 1);
      c.crab_omega_max = o.non_negative("omega_max", 0.0);
      cr.max_evaluations = o.integer("max_evaluations", cr.max_evaluations, 0);
      cr.simplex_step = o.positive("simplex_step", cr.simplex_step);
      cr.f_tol = o.non_negative("f_tol", cr.f_tol);
      cr.x_tol = o.non_negative("x_tol", cr.x_tol);
      cr.mapping = parse_mapping(o, pulse);
      validated(path, [&] {
        cr.validate();
        return 0;
      });
      break;
    }
    case OptimizerConfig::Kind::dcrab: {
      DcrabOptions& d = c.dcrab;
      d.n_superiterations = o.integer("n_superiterations", d.n_superiterations, 1);
      d.n_basis = o.integer("n_basis", d.n_basis, 1);
      d.omega_max = o.non_negative("omega_max", 0.0);
      d.evaluations_per_superiteration =
          o.integer("evaluations_per_superiteration", d.evaluations_per_superiteration, 0);
      d.simplex_step = o.positive("simplex_step", d.simplex_step);
      d.f_tol = o.non_negative("f_tol", d.f_tol);
      d.x_tol = o.non_negative("x_tol", d.x_tol);
      d.mapping = parse_mapping(o, pulse);
      d.seed = seed;
      validated(path, [&] {
        d.validate(pulse ? pulse->n_controls() : 1);
        return 0;
      });
      break;
    }
  }
  o.finish();
  return c;
}

SensingConfig parse_sensing(const json& j, const std::string& path) {
  Obj o(j, path);
  SensingConfig s;
  {
    Obj q(o.require("sequence"), o.at("sequence"));
    s.sequence = q.choice<SensingConfig::Sequence>("type", {{"ramsey", SensingConfig::Sequence::ramsey},
                                                           {"echo", SensingConfig::Sequence::echo},
                                                           {"cpmg", SensingConfig::Sequence::cpmg}});
    if (s.sequence == SensingConfig::Sequence::cpmg) s.n_pulses = q.integer("n_pulses", 1, 1);
    q.finish();
  }
  {
    Obj g(o.require("signal"), o.at("signal"));
    const std::string type = g.string("type");
    if (type == "dc") {
      s.signal = FieldSignal::dc(g.number("amplitude"));
    } else if (type == "ac") {
      const double b = g.number("amplitude");
      const double omega = g.positive("omega", 1.0);
      g.require("omega");
      s.signal = FieldSignal::ac(b, omega, g.number("phase", 0.0));
    } else {
      fail(g.at("type"), "unknown signal \"" + type + "\" (expected dc or ac)");
    }
    g.finish();
  }
  s.gamma = o.positive("gamma", s.gamma);
  if (const json* v = o.get("tau")) {
    Obj t(*v, o.at("tau"));
    s.tau_start = t.positive("start", s.tau_start);
    s.tau_stop = t.positive("stop", s.tau_stop);
    s.tau_points = t.integer("points", s.tau_points, 1);
    t.finish();
    if (s.tau_stop < s.tau_start) fail(o.at("tau") + "/stop", "must not be smaller than start");
  }
  if (const json* v = o.get("readout")) {
    Obj r(*v, o.at("readout"));
    s.contrast = r.positive("contrast", s.contrast);
    if (s.contrast > 1.0) fail(r.at("contrast"), "must be in (0, 1]");
    s.readout_phase = r.number("phase", s.readout_phase);
    const json* shots = r.get("shots");
    if (shots) {
      s.shots = as_integer(*shots, r.at("shots"));
      if (s.shots < 0) fail(r.at("shots"), "must be non-negative");
    }
    s.envelope.t2_star = r.positive("t2_star", s.envelope.t2_star);
    s.envelope.t2 = r.positive("t2", s.envelope.t2);
    s.envelope.exponent = r.number("exponent", s.envelope.exponent);
    r.finish();
    validated(o.at("readout"), [&] {
      s.envelope.validate();
      return 0;
    });
  }
  if (const json* v = o.get("filter")) {
    Obj f(*v, o.at("filter"));
    s.filter_tau = f.positive("tau", 1.0);
    f.require("tau");
    s.filter_points = f.integer("points", s.filter_points, 2);
    if (f.has("omega_max")) s.filter_omega_max = f.positive("omega_max", 1.0);
    f.finish();
  }
  o.finish();
  return s;
}

LimitsConfig parse_limits(const json& j, const std::string& path, const SystemConfig& sys) {
  Obj o(j, path);
  LimitsConfig l;
  if (const json* v = o.get("qsl")) {
    Obj q(*v, o.at("qsl"));
    l.qsl = true;
    l.target = parse_state(q.require("target"), q.at("target"), sys.hamiltonian.dim());
    l.source = q.choice<LimitsConfig::Source>(
        "source", {{"static", LimitsConfig::Source::system}, {"pulse", LimitsConfig::Source::pulse}},
        LimitsConfig::Source::system);
    q.finish();
  }
  l.controllability = o.boolean("controllability", false);
  o.finish();
  if (!l.qsl && !l.controllability) fail(path, "nothing requested (set qsl and/or controllability)");
  return l;
}

}  // namespace

ProblemConfig parse_config(const json& doc, std::optional<std::uint64_t> seed_override) {
  Obj o(doc, "");
  ProblemConfig c;
  if (const json* v = o.get("seed")) {
    if (!v->is_number_unsigned() && !(v->is_number_integer() && v->get<long long>() >= 0)) {
      fail("/seed", "expected a non-negative integer");
    }
    c.seed = v->get<std::uint64_t>();
  }
  if (seed_override) c.seed = *seed_override;

  auto need_system = [&](const char* block) -> const SystemConfig& {
    if (!c.system) fail(std::string("/") + block, "requires a system block");
    return *c.system;
  };
  if (const json* v = o.get("system")) c.system = parse_system(*v, "/system");
  if (const json* v = o.get("initial_state")) {
    c.initial_state = parse_state(*v, "/initial_state", need_system("initial_state").hamiltonian.dim());
  }
  if (const json* v = o.get("pulse")) c.pulse = parse_pulse(*v, "/pulse", need_system("pulse"), c.seed);
  if (const json* v = o.get("cost")) c.cost = parse_cost(*v, "/cost", need_system("cost"), c.initial_state);
  if (const json* v = o.get("optimizer")) {
    c.optimizer = parse_optimizer(*v, "/optimizer", c.pulse ? &*c.pulse : nullptr, c.seed);
  }
  if (const json* v = o.get("sensing")) c.sensing = parse_sensing(*v, "/sensing");
  if (const json* v = o.get("limits")) c.limits = parse_limits(*v, "/limits", need_system("limits"));
  o.finish();
  return c;
}

json parse_config_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // e.what() carries "line L, column C" for syntax errors.
    throw ConfigError(std::string("syntax error: ") + e.what());
  }
}

json load_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str());
}

}  // namespace nvqoc::cli
