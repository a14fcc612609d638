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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nvqoc_cli/commands.hpp"
#include "nvqoc_cli/config.hpp"
#include "oracles.hpp"

namespace nvqoc::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using testing::kPi;

const std::string kConfigDir = NVQOC_CONFIG_DIR;

json bundled(const std::string& name) { return load_config_file(kConfigDir + "/" + name + ".json"); }

const std::string& file(const CommandResult& r, const std::string& name) {
  for (const auto& f : r.files) {
    if (f.name == name) return f.content;
  }
  throw std::runtime_error("missing output " + name);
}

struct Tsv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw std::runtime_error("missing column " + name);
    return static_cast<std::size_t>(it - header.begin());
  }
};

Tsv parse_tsv(const std::string& text) {
  Tsv t;
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::istringstream h(line);
  for (std::string cell; std::getline(h, cell, '\t');) t.header.push_back(cell);
  while (std::getline(in, line)) {
    std::istringstream r(line);
    std::vector<double> row;
    for (std::string cell; std::getline(r, cell, '\t');) row.push_back(std::stod(cell));
    EXPECT_EQ(row.size(), t.header.size());
    t.rows.push_back(row);
  }
  return t;
}

std::string config_error(const json& doc) {
  try {
    parse_config(doc);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("nvqoc_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run_cli(std::vector<std::string> args) {
  args.insert(args.begin(), "nvqoc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

// ----------------------------------------------------------------- parsing

TEST(Config, RejectsUnknownKeysWithPointer) {
  EXPECT_EQ(config_error(bundled("malformed")), "/pulse/tfinal: unknown key");
  json doc = bundled("pi_pulse_grape");
  doc["optimizer"]["learning_rate"] = 0.1;
  EXPECT_EQ(config_error(doc), "/optimizer/learning_rate: unknown key");
  doc = bundled("pi_pulse_grape");
  doc["extra"] = 1;
  EXPECT_EQ(config_error(doc), "/extra: unknown key");
}

TEST(Config, ReportsTypeAndRangeErrors) {
  json doc = bundled("pi_pulse_grape");
  doc["pulse"]["n_slices"] = 2.5;
  EXPECT_NE(config_error(doc).find("/pulse/n_slices: expected an integer"), std::string::npos);
  doc = bundled("pi_pulse_grape");
  doc["pulse"]["t_final"] = -1.0;
  EXPECT_NE(config_error(doc).find("/pulse/t_final: must be positive"), std::string::npos);
  doc = bundled("pi_pulse_grape");
  doc["optimizer"]["type"] = "simulated_annealing";
  EXPECT_NE(config_error(doc).find("/optimizer/type: unknown value"), std::string::npos);
  doc = bundled("pi_pulse_grape");
  doc["seed"] = -3;
  EXPECT_NE(config_error(doc).find("/seed"), std::string::npos);
  doc = bundled("pi_pulse_grape");
  doc["initial_state"] = json::array({1.0, 1.0});
  EXPECT_NE(config_error(doc).find("not normalized"), std::string::npos);
  doc = bundled("pi_pulse_grape");
  doc["cost"]["terminal"].erase("target");
  EXPECT_NE(config_error(doc).find("/cost/terminal/target: required key is missing"), std::string::npos);
  doc = bundled("zero_simulate");
  doc["system"]["drift"] = json::parse("[[0, 1], [0, 0]]");
  EXPECT_NE(config_error(doc).find("/system:"), std::string::npos);
}

TEST(Config, SyntaxErrorsCarryLineAndColumn) {
  try {
    parse_config_text("{\n  \"seed\": 1,\n  \"system\": {,}\n}");
    FAIL() << "expected a syntax error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("column"), std::string::npos) << e.what();
  }
}

TEST(Config, SeedDefaultsAndOverride) {
  json doc = bundled("rabi_simulate");
  EXPECT_EQ(parse_config(doc).seed, kDefaultSeed);
  EXPECT_EQ(parse_config(doc, 99).seed, 99u);
  doc["seed"] = 5;
  EXPECT_EQ(parse_config(doc).seed, 5u);
  EXPECT_EQ(parse_config(doc, 6).seed, 6u);
}

TEST(Config, RandomInitFollowsSeed) {
  const json doc = bundled("pi_pulse_grape");
  const auto a = parse_config(doc), b = parse_config(doc), c = parse_config(doc, 8);
  EXPECT_EQ(*a.pulse, *b.pulse);
  EXPECT_FALSE(*a.pulse == *c.pulse);
}

TEST(Config, BundledConfigsParse) {
  for (const auto& entry : fs::directory_iterator(kConfigDir)) {
    if (entry.path().stem() == "malformed") continue;
    EXPECT_NO_THROW(parse_config(load_config_file(entry.path().string()))) << entry.path();
  }
}

// --------------------------------------------------------------- simulate

TEST(Simulate, RabiPopulationMatchesClosedForm) {
  const auto r = execute(Command::simulate, bundled("rabi_simulate"));
  const Tsv t = parse_tsv(file(r, "trajectory.tsv"));
  const double omega = 2.0 * kPi;
  ASSERT_EQ(t.rows.size(), 201u);
  double worst = 0.0;
  for (const auto& row : t.rows) {
    const double s = std::sin(omega * row[t.column("t")] / 2.0);
    worst = std::max(worst, std::abs(row[t.column("P1")] - s * s));
    EXPECT_NEAR(row[t.column("P0")] + row[t.column("P1")], 1.0, 1e-12);
  }
  EXPECT_LT(worst, 1e-8);
}

TEST(Simulate, ZeroHamiltonianGivesConstantRows) {
  const auto r = execute(Command::simulate, bundled("zero_simulate"));
  const Tsv t = parse_tsv(file(r, "trajectory.tsv"));
  ASSERT_EQ(t.header, (std::vector<std::string>{"t", "P0", "P1", "re0", "im0", "re1", "im1"}));
  for (const auto& row : t.rows) {
    EXPECT_EQ(std::vector<double>(row.begin() + 1, row.end()),
              std::vector<double>(t.rows[0].begin() + 1, t.rows[0].end()));
  }
  EXPECT_NEAR(t.rows[0][t.column("P1")], 0.64, 1e-15);
  EXPECT_NEAR(t.rows[0][t.column("im1")], 0.8, 1e-15);
}

TEST(Simulate, MalformedConfigExitsTwoWithoutOutput) {
  const fs::path out = scratch("malformed");
  const auto r = run_cli({"simulate", "--config", kConfigDir + "/malformed.json", "--out", out.string()});
  EXPECT_EQ(r.code, kExitConfig);
  EXPECT_NE(r.err.find("/pulse/tfinal"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Simulate, TablesUseSeventeenDigits) {
  const auto r = execute(Command::simulate, bundled("rabi_simulate"));
  std::istringstream in(file(r, "trajectory.tsv"));
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line)) {
    std::istringstream cells(line);
    for (std::string cell; std::getline(cells, cell, '\t');) EXPECT_EQ(cell, format_double(std::stod(cell)));
  }
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

// --------------------------------------------------------------- optimize

TEST(Optimize, PiPulseReachesTarget) {
  const auto r = execute(Command::optimize, bundled("pi_pulse_grape"));
  const json report = json::parse(file(r, "report.json"));
  EXPECT_LT(report["final_cost"].get<double>(), 1e-8);
  EXPECT_EQ(report["optimizer"], "grape");
  EXPECT_EQ(report["cost_trace"].size(), static_cast<std::size_t>(report["iterations"].get<int>()) + 1);
  const Tsv pulses = parse_tsv(file(r, "pulses.tsv"));
  EXPECT_EQ(pulses.header, (std::vector<std::string>{"t", "u_1", "u_2"}));
  EXPECT_EQ(pulses.rows.size(), 20u);
  EXPECT_FALSE(report["qsl"]["below_bound"].get<bool>());
}

TEST(Optimize, HadamardDcrabIsByteIdentical) {
  const json doc = bundled("hadamard_dcrab");
  const auto a = execute(Command::optimize, doc);
  const auto b = execute(Command::optimize, doc);
  ASSERT_EQ(a.files.size(), b.files.size());
  for (std::size_t i = 0; i < a.files.size(); ++i) EXPECT_EQ(a.files[i].content, b.files[i].content) << a.files[i].name;
  const json report = json::parse(file(a, "report.json"));
  EXPECT_LT(report["final_cost"].get<double>(), 1e-4);
  EXPECT_EQ(report["seeds"]["superiterations"].size(), 5u);
  EXPECT_EQ(report["seeds"]["superiterations"][0], 2024u);
}

TEST(Optimize, EchoedConfigReproducesReport) {
  json doc = bundled("pi_pulse_grape");
  doc.erase("seed");
  const auto first = execute(Command::optimize, doc, 31);
  const json report = json::parse(file(first, "report.json"));
  EXPECT_EQ(report["config"]["seed"], 31u);
  const auto again = execute(Command::optimize, report["config"]);
  EXPECT_EQ(file(first, "report.json"), file(again, "report.json"));
  // The echo is a fixed point.
  EXPECT_EQ(json::parse(file(again, "report.json"))["config"], report["config"]);
}

TEST(Optimize, SeedChangesRun) {
  const json doc = bundled("pi_pulse_grape");
  const auto a = execute(Command::optimize, doc, 1);
  const auto b = execute(Command::optimize, doc, 2);
  EXPECT_NE(file(a, "report.json"), file(b, "report.json"));
}

TEST(Optimize, GrapeWithFisherIsUnsupported) {
  const fs::path out = scratch("fisher");
  const auto r = run_cli({"optimize", "--config", kConfigDir + "/grape_fisher.json", "--out", out.string()});
  EXPECT_EQ(r.code, kExitUnsupported);
  EXPECT_NE(r.err.find("gradient unavailable"), std::string::npos);
  EXPECT_FALSE(fs::exists(out));
}

TEST(Optimize, CrabRunsOnFisherCost) {
  json doc = bundled("grape_fisher");
  doc["optimizer"] = json::parse(R"({"type": "crab", "n_basis": 2, "max_evaluations": 60})");
  const auto r = execute(Command::optimize, doc);
  const json report = json::parse(file(r, "report.json"));
  EXPECT_EQ(report["evaluations"], 60);
  EXPECT_EQ(report["seeds"]["omegas"].size(), 2u);
}

TEST(Optimize, BlockRules) {
  json doc = bundled("pi_pulse_grape");
  doc["sensing"] = bundled("echo_sense")["sensing"];
  EXPECT_THROW(execute(Command::optimize, doc), ConfigError);
  doc = bundled("pi_pulse_grape");
  doc.erase("optimizer");
  EXPECT_THROW(execute(Command::optimize, doc), ConfigError);
  EXPECT_THROW(execute(Command::simulate, bundled("pi_pulse_grape")), ConfigError);
  EXPECT_THROW(execute(Command::sense, bundled("rabi_simulate")), ConfigError);
}

// ------------------------------------------------------------------ sense

TEST(Sense, AcEchoDipsAtOddMultiples) {
  const json doc = bundled("echo_sense");
  const auto r = execute(Command::sense, doc);
  const json report = json::parse(file(r, "report.json"));
  const double w = doc["sensing"]["signal"]["omega"].get<double>();
  const double step = (3.0 - 0.01) / 299.0;
  std::vector<int> ks;
  for (const auto& m : report["population_minima"]) {
    if (m["p0"].get<double>() > 0.5) continue;  // shallow side minima of the sin-phase response
    const double k = m["tau"].get<double>() * w / kPi;
    const int odd = static_cast<int>(std::lround(k));
    EXPECT_EQ(odd % 2, 1) << k;
    EXPECT_LE(std::abs(m["tau"].get<double>() - odd * kPi / w), step);
    ks.push_back(odd);
  }
  EXPECT_EQ(ks, (std::vector<int>{1, 3, 5}));
  EXPECT_NEAR(report["filter"]["peak_omega"].get<double>(), kPi / 0.5, 1e-12);
}

TEST(Sense, DcEchoIsFlatUpToEnvelope) {
  const auto r = execute(Command::sense, bundled("dc_echo_sense"));
  const Tsv t = parse_tsv(file(r, "sweep.tsv"));
  for (const auto& row : t.rows) {
    EXPECT_LT(std::abs(row[t.column("phase")]), 1e-10);
    const double envelope = std::exp(-row[t.column("total_time")] / 50.0);
    EXPECT_NEAR(row[t.column("p0")], 0.5 * (1.0 + envelope), 1e-12);
  }
}

TEST(Sense, RamseyOscillatesAtGammaB) {
  const auto r = execute(Command::sense, bundled("ramsey_sense"));
  const Tsv t = parse_tsv(file(r, "sweep.tsv"));
  const double gb = 2.0 * kPi * 28.0 * 0.01;
  double worst = 0.0;
  int outside = 0;
  for (const auto& row : t.rows) {
    const double p = 0.5 * (1.0 + std::cos(gb * row[t.column("tau")]));
    worst = std::max(worst, std::abs(row[t.column("p0")] - p));
    // Shot estimates scatter around p0 with the reported standard error.
    const double se = std::sqrt(p * (1.0 - p) / 1000.0);
    if (std::abs(row[t.column("p_hat")] - p) > 4.0 * se + 1e-3) ++outside;
  }
  EXPECT_LT(worst, 1e-12);
  EXPECT_LE(outside, 2);
}

TEST(Sense, ShotSeedsAreReproducible) {
  const json doc = bundled("ramsey_sense");
  EXPECT_EQ(file(execute(Command::sense, doc), "sweep.tsv"), file(execute(Command::sense, doc), "sweep.tsv"));
  EXPECT_NE(file(execute(Command::sense, doc, 1), "sweep.tsv"), file(execute(Command::sense, doc, 2), "sweep.tsv"));
}

TEST(Sense, NonFinitePhaseExitsThree) {
  json doc = bundled("ramsey_sense");
  doc["sensing"]["signal"]["amplitude"] = 1e300;
  doc["sensing"]["gamma"] = 1e300;
  const fs::path cfg = scratch("nonfinite.json");
  std::ofstream(cfg) << doc.dump();
  const fs::path out = scratch("nonfinite");
  const auto r = run_cli({"sense", "--config", cfg.string(), "--out", out.string()});
  EXPECT_EQ(r.code, kExitNumeric) << r.err;
  EXPECT_FALSE(fs::exists(out));
}

// ----------------------------------------------------------------- limits

TEST(Limits, QubitIsControllable) {
  const auto r = execute(Command::limits, bundled("qubit_limits"));
  const json report = json::parse(file(r, "report.json"));
  EXPECT_EQ(report["controllability"]["lie_dim"], 3);
  EXPECT_TRUE(report["controllability"]["controllable"].get<bool>());
}

TEST(Limits, EigenstatePrintsInfinite) {
  const auto r = run_cli({"limits", "--config", kConfigDir + "/eigenstate_qsl.json", "--out",
                          scratch("eigen").string()});
  EXPECT_EQ(r.code, kExitOk);
  EXPECT_NE(r.out.find("t_qsl = infinite"), std::string::npos);
}

TEST(Limits, PiPulseQslIsPiOverOmega) {
  const auto r = execute(Command::limits, bundled("pi_qsl"));
  const json report = json::parse(file(r, "report.json"));
  EXPECT_NEAR(report["qsl"]["t_qsl"].get<double>(), kPi / (2.0 * kPi), 1e-10);
}

// -------------------------------------------------------------- front end

TEST(Cli, UsageErrorsExitTwo) {
  EXPECT_EQ(run_cli({}).code, kExitConfig);
  EXPECT_EQ(run_cli({"simulate"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"frobnicate", "--config", "x"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"simulate", "--config", "/nonexistent.json"}).code, kExitConfig);
  EXPECT_EQ(run_cli({"--help"}).code, kExitOk);
}

TEST(Cli, WritesFilesAndReportsWallTimeOnStderr) {
  const fs::path out = scratch("files");
  const auto r = run_cli({"sense", "--config", kConfigDir + "/echo_sense.json", "--out", out.string()});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  for (const char* name : {"sweep.tsv", "filter.tsv", "report.json"}) EXPECT_TRUE(fs::exists(out / name)) << name;
  EXPECT_NE(r.err.find("wall time"), std::string::npos);
  std::ifstream in(out / "report.json");
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  EXPECT_EQ(text.find("wall"), std::string::npos);
}

TEST(Cli, ExecutableExitCodes) {
  const std::string exe = NVQOC_CLI_PATH;
  const fs::path out = scratch("exe");
  const auto status = [&](const std::string& args) {
    const int s = std::system((exe + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  EXPECT_EQ(status("limits --config " + kConfigDir + "/pi_qsl.json --out " + out.string()), 0);
  EXPECT_TRUE(fs::exists(out / "report.json"));
  EXPECT_EQ(status("simulate --config " + kConfigDir + "/malformed.json --out " + out.string() + "/m"), 2);
  EXPECT_EQ(status("optimize --config " + kConfigDir + "/grape_fisher.json --out " + out.string() + "/f"), 4);
}

TEST(Hash, Fnv1aReferenceValues) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cULL);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ULL);
}

}  // namespace
}  // namespace nvqoc::cli
