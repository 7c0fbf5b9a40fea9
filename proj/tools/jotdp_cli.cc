// Copyright 2026 The jotdp Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// jotdp command-line front end. Every subcommand writes one artifact (JSON by
// default) to --out or stdout. Exit codes: 0 success or audit pass, 1 usage
// or configuration error, 2 privacy violation.

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "jotdp/jotdp.h"
#include "json.hpp"

namespace {

using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitViolation = 2;

// Audit tolerance on top of the declared epsilon.
constexpr double kAuditTolerance = 1e-9;

struct CliError {
  std::string message;
};

void Check(jotdp_status status) {
  if (status != JOTDP_OK) throw CliError{jotdp_last_error()};
}

// Takes ownership of a string returned by the library.
std::string Take(char* s) {
  std::string out = s == nullptr ? "" : s;
  jotdp_string_free(s);
  return out;
}

struct DatasetDeleter {
  void operator()(jotdp_dataset* x) const { jotdp_dataset_free(x); }
};
struct PmfDeleter {
  void operator()(jotdp_pmf* p) const { jotdp_pmf_free(p); }
};
struct MechanismDeleter {
  void operator()(jotdp_mechanism* m) const { jotdp_mechanism_free(m); }
};
using DatasetPtr = std::unique_ptr<jotdp_dataset, DatasetDeleter>;
using PmfPtr = std::unique_ptr<jotdp_pmf, PmfDeleter>;
using MechanismPtr = std::unique_ptr<jotdp_mechanism, MechanismDeleter>;

void WriteArtifact(const std::string& path, const std::string& text) {
  const std::string body =
      text.empty() || text.back() == '\n' ? text : text + "\n";
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError{"cannot write " + path};
  out << body;
}

uint64_t DefaultSeed() {
  const char* env = std::getenv("JOTDP_SEED");
  if (env == nullptr || *env == '\0') return 0;
  try {
    return std::stoull(env);
  } catch (const std::exception&) {
    throw CliError{std::string("JOTDP_SEED is not an integer: ") + env};
  }
}

Json ParseJson(const std::string& text) {
  Json doc = Json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw CliError{"library returned invalid JSON"};
  return doc;
}

// Output options shared by every subcommand.
struct OutputOptions {
  std::string out;
  std::string format = "json";

  void Add(CLI::App* cmd, const std::string& default_format) {
    format = default_format;
    cmd->add_option("--out,-o", out, "output path (default stdout)");
    cmd->add_option("--format", format, "json or csv")
        ->check(CLI::IsMember({"json", "csv"}));
  }
};

// --- pmf ---

struct PmfOptions {
  std::string dist;
  int64_t mu = 0;
  double s = 1.0;
  int64_t lo = 0;
  int64_t hi = 0;
  uint64_t n = 0;
  uint32_t c = 2;
  uint64_t k = 2;
  std::optional<uint64_t> max_outcome;
  std::string p = "1/2";
  OutputOptions output;
};

std::pair<uint64_t, uint32_t> ParseDyadic(const std::string& text) {
  const size_t slash = text.find('/');
  if (slash == std::string::npos) throw CliError{"p must be t/2^k: " + text};
  try {
    const uint64_t num = std::stoull(text.substr(0, slash));
    const uint64_t den = std::stoull(text.substr(slash + 1));
    uint32_t kbits = 0;
    while (kbits < 63 && (uint64_t{1} << kbits) < den) ++kbits;
    if ((uint64_t{1} << kbits) != den) {
      throw CliError{"p must have a power-of-two denominator: " + text};
    }
    return {num, kbits};
  } catch (const std::logic_error&) {
    throw CliError{"p must be t/2^k: " + text};
  }
}

int RunPmf(const PmfOptions& o) {
  jotdp_pmf* raw = nullptr;
  if (o.dist == "dl") {
    Check(jotdp_pmf_dl(o.mu, o.s, o.lo, o.hi, &raw));
  } else if (o.dist == "cdl") {
    Check(jotdp_pmf_cdl(o.mu, o.s, o.lo, o.hi, &raw));
  } else if (o.dist == "adaptive") {
    Check(jotdp_pmf_adaptive(o.n, o.c, o.k, o.max_outcome.value_or(o.n + 16),
                             &raw));
  } else {
    const auto [num, kbits] = ParseDyadic(o.p);
    Check(jotdp_pmf_dsg(o.mu, num, kbits, o.lo, o.hi, &raw));
  }
  PmfPtr pmf(raw);
  char* text = nullptr;
  if (o.output.format == "csv") {
    Check(jotdp_pmf_to_csv(pmf.get(), &text));
    WriteArtifact(o.output.out, Take(text));
    return kExitOk;
  }
  Check(jotdp_pmf_to_json(pmf.get(), &text));
  Json doc = ParseJson(Take(text));
  doc["command"] = "pmf";
  doc["params"] = Json{{"dist", o.dist}, {"mu", o.mu}, {"s", o.s},
                       {"lo", o.lo},     {"hi", o.hi}, {"n", o.n},
                       {"c", o.c},       {"k", o.k},   {"p", o.p}};
  WriteArtifact(o.output.out, doc.dump(2));
  return kExitOk;
}

// --- mechanism configuration shared by run and audit ---

struct MechanismOptions {
  std::string config_path;
  std::string mech;
  std::string data = "empty";
  int64_t delta = 1;
  std::optional<uint64_t> n;
  std::optional<int64_t> mu;
  std::optional<uint64_t> seed;
  Json flags = Json::object();

  void Add(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file with mechanism config");
    cmd->add_option("--mech", mech,
                    "program1, program1-bddnt, program2, program3, "
                    "laplace-sum, cdl, leaky-cdl, dsg");
    cmd->add_option("--data", data,
                    "dataset: empty, ones:N, zeros:N, file:PATH or 1,0,1");
    cmd->add_option("--delta", delta, "record bound")->check(CLI::PositiveNumber);
    cmd->add_option("--n", n, "shorthand for --data ones:N");
    cmd->add_option("--mu", mu, "shorthand for --data ones:MU (center = sum)");
    cmd->add_option("--seed", seed, "seed (default $JOTDP_SEED or 0)");
    AddFlag<double>(cmd, "--eps-prime", "eps_prime");
    AddFlag<double>(cmd, "--beta", "beta");
    AddFlag<uint32_t>(cmd, "--max-iter", "max_iter");
    AddFlag<uint32_t>(cmd, "--c", "c");
    AddFlag<uint64_t>(cmd, "--k", "k");
    AddFlag<std::string>(cmd, "--inner", "inner");
    AddFlag<double>(cmd, "--inner-eps", "inner_eps");
    AddFlag<double>(cmd, "--eps", "eps");
    AddFlag<double>(cmd, "--count-share", "count_share");
    AddFlag<uint32_t>(cmd, "--count-exponent", "count_exponent");
    AddFlag<double>(cmd, "--s", "s");
    AddFlag<int64_t>(cmd, "--lo", "lo");
    AddFlag<int64_t>(cmd, "--hi", "hi");
    AddFlag<std::string>(cmd, "--p", "p");
    AddFlag<uint64_t>(cmd, "--clamp", "clamp");
  }

  template <typename T>
  void AddFlag(CLI::App* cmd, const std::string& name, const std::string& key) {
    cmd->add_option_function<T>(
        name, [this, key](const T& v) { flags[key] = v; },
        "config key '" + key + "'");
  }

  // Config file first, then --mech and individual flags on top.
  Json Config() const {
    Json config = Json::object();
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw CliError{"cannot read config " + config_path};
      config = Json::parse(in, nullptr, false);
      if (config.is_discarded() || !config.is_object()) {
        throw CliError{"config is not a JSON object: " + config_path};
      }
    }
    if (!mech.empty()) config["mech"] = mech;
    for (const auto& [key, value] : flags.items()) config[key] = value;
    if (!config.contains("mech")) throw CliError{"--mech is required"};
    return config;
  }

  std::string DataText() const {
    if (n) return "ones:" + std::to_string(*n);
    if (mu) {
      if (*mu < 0) throw CliError{"--mu must be non-negative"};
      return "ones:" + std::to_string(*mu);
    }
    return data;
  }

  uint64_t Seed() const { return seed ? *seed : DefaultSeed(); }
};

MechanismPtr MakeMechanism(const Json& config) {
  jotdp_mechanism* raw = nullptr;
  Check(jotdp_mechanism_create(config.dump().c_str(), &raw));
  return MechanismPtr(raw);
}

Json MechanismConfig(const jotdp_mechanism* m) {
  char* text = nullptr;
  Check(jotdp_mechanism_config_json(m, &text));
  Json doc = ParseJson(Take(text));
  doc.erase("schema");
  doc.erase("version");
  return doc;
}

DatasetPtr MakeDataset(const std::string& text, int64_t delta) {
  jotdp_dataset* raw = nullptr;
  Check(jotdp_dataset_parse(text.c_str(), delta, &raw));
  return DatasetPtr(raw);
}

// --- run ---

int RunRun(const MechanismOptions& o, const OutputOptions& output) {
  MechanismPtr m = MakeMechanism(o.Config());
  const std::string data = o.DataText();
  DatasetPtr x = MakeDataset(data, o.delta);
  jotdp_result result{};
  Check(jotdp_run(m.get(), x.get(), o.Seed(), &result));
  char* text = nullptr;
  Check(jotdp_result_to_json(&result, &text));
  Json doc = ParseJson(Take(text));
  if (output.format == "csv") {
    std::ostringstream csv;
    csv << "output,runtime,iterations,bound,truncated,seed\n"
        << result.output << ',' << result.runtime << ',' << result.iterations
        << ',' << result.bound << ',' << result.truncated << ','
        << result.seed << '\n';
    WriteArtifact(output.out, csv.str());
    return kExitOk;
  }
  doc["command"] = "run";
  doc["params"] = MechanismConfig(m.get());
  doc["data"] = data;
  doc["delta"] = o.delta;
  WriteArtifact(output.out, doc.dump(2));
  return kExitOk;
}

// --- audit ---

struct AuditOptions {
  std::string mode = "exact";
  std::optional<std::string> data_b;
  std::optional<int64_t> insert;
  bool output_only = false;
  uint64_t trials = 100000;
  double confidence = 0.95;
  unsigned workers = 1;
  std::string joint_csv;
};

int RunAudit(const MechanismOptions& o, const AuditOptions& a,
             const OutputOptions& output) {
  MechanismPtr m = MakeMechanism(o.Config());
  const std::string data = o.DataText();
  DatasetPtr x = MakeDataset(data, o.delta);
  DatasetPtr y;
  if (a.data_b) {
    y = MakeDataset(*a.data_b, o.delta);
  } else {
    jotdp_dataset* raw = nullptr;
    Check(jotdp_dataset_insert(x.get(), a.insert.value_or(o.delta), &raw));
    y.reset(raw);
  }

  jotdp_report report{};
  if (a.mode == "exact") {
    Check(a.output_only
              ? jotdp_audit_exact_output_only(m.get(), x.get(), y.get(), &report)
              : jotdp_audit_exact(m.get(), x.get(), y.get(), &report));
  } else {
    Check(jotdp_audit_mc(m.get(), x.get(), y.get(), a.trials, o.Seed(),
                         a.confidence, a.workers, &report));
  }
  double declared = 0;
  Check(jotdp_mechanism_declared_epsilon(m.get(), o.delta, &declared));

  if (!a.joint_csv.empty()) {
    char* csv = nullptr;
    Check(jotdp_exact_joint_csv(m.get(), x.get(), &csv));
    WriteArtifact(a.joint_csv, Take(csv));
  }

  const bool violation = report.support_mismatch != 0 ||
                         report.eps_hat > declared + kAuditTolerance;
  char* text = nullptr;
  Check(jotdp_report_to_json(&report, &text));
  Json doc = ParseJson(Take(text));
  doc["command"] = "audit";
  doc["mode"] = a.mode;
  doc["output_only"] = a.output_only;
  doc["declared_epsilon"] = declared;
  doc["tolerance"] = kAuditTolerance;
  doc["pass"] = !violation;
  doc["params"] = MechanismConfig(m.get());
  doc["data_a"] = data;
  doc["data_b"] = a.data_b ? Json(*a.data_b) : Json(nullptr);
  doc["delta"] = o.delta;
  if (a.mode == "mc") {
    doc["seed"] = o.Seed();
    doc["trials"] = a.trials;
  }
  if (output.format == "csv") {
    std::ostringstream csv;
    csv << "eps_hat,declared_epsilon,support_mismatch,pass\n"
        << report.eps_hat << ',' << declared << ','
        << report.support_mismatch << ',' << (violation ? 0 : 1) << '\n';
    WriteArtifact(output.out, csv.str());
  } else {
    WriteArtifact(output.out, doc.dump(2));
  }
  if (!violation) return kExitOk;
  std::cerr << "privacy violation: eps_hat " << report.eps_hat
            << " exceeds declared " << declared;
  if (report.has_witness) {
    std::cerr << "; witness (output " << report.witness_output << ", runtime "
              << report.witness_runtime << ")";
  }
  std::cerr << '\n';
  return kExitViolation;
}

// --- schedule ---

struct ScheduleOptions {
  double eps_prime = 1.0;
  double beta = 0.5;
  uint32_t rows = 50;
  OutputOptions output;
};

int RunSchedule(const ScheduleOptions& o) {
  char* text = nullptr;
  if (o.output.format == "csv") {
    Check(jotdp_schedule_to_csv(o.eps_prime, o.beta, o.rows, &text));
    WriteArtifact(o.output.out, Take(text));
    return kExitOk;
  }
  Check(jotdp_schedule_to_json(o.eps_prime, o.beta, o.rows, &text));
  Json doc = ParseJson(Take(text));
  doc["command"] = "schedule";
  WriteArtifact(o.output.out, doc.dump(2));
  return kExitOk;
}

// --- demo-lower-bound ---

struct DemoOptions {
  uint32_t c = 2;
  uint64_t k = 2;
  std::optional<uint64_t> budget;
  std::vector<uint64_t> ns{0, 100, 10000};
  uint64_t trials = 10000;
  std::optional<uint64_t> seed;
  unsigned workers = 1;
  std::string csv_path;
  OutputOptions output;
};

int RunDemo(const DemoOptions& o) {
  uint64_t budget = 0;
  if (o.budget) {
    budget = *o.budget;
  } else {
    uint64_t fixed = 0, per_flip = 0;
    Check(jotdp_adaptive_count_cost(o.c, &fixed, &per_flip));
    budget = fixed + 3 * per_flip;
  }
  const uint64_t seed = o.seed ? *o.seed : DefaultSeed();
  char* json = nullptr;
  char* csv = nullptr;
  Check(jotdp_demo_lower_bound(o.c, o.k, budget, o.ns.data(), o.ns.size(),
                               o.trials, seed, o.workers, &json, &csv));
  Json doc = ParseJson(Take(json));
  const std::string csv_text = Take(csv);
  doc["command"] = "demo-lower-bound";
  doc["trials"] = o.trials;
  if (!o.csv_path.empty()) WriteArtifact(o.csv_path, csv_text);
  WriteArtifact(o.output.out,
                o.output.format == "csv" ? csv_text : doc.dump(2));
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"jotdp: joint output/timing private mechanisms and audits"};
  app.set_version_flag("--version", std::string(jotdp_version()));
  app.require_subcommand(1);

  PmfOptions pmf;
  CLI::App* pmf_cmd = app.add_subcommand("pmf", "probability table");
  pmf_cmd->add_option("--dist", pmf.dist, "dl, cdl, adaptive or dsg")
      ->required()
      ->check(CLI::IsMember({"dl", "cdl", "adaptive", "dsg"}));
  pmf_cmd->add_option("--mu", pmf.mu, "center");
  pmf_cmd->add_option("--s", pmf.s, "scale");
  pmf_cmd->add_option("--lo", pmf.lo, "lowest outcome");
  pmf_cmd->add_option("--hi", pmf.hi, "highest outcome");
  pmf_cmd->add_option("--n", pmf.n, "adaptive count length");
  pmf_cmd->add_option("--c", pmf.c, "adaptive count exponent");
  pmf_cmd->add_option("--k", pmf.k, "adaptive count offset");
  pmf_cmd->add_option("--max", pmf.max_outcome,
                      "last listed adaptive outcome (default n + 16)");
  pmf_cmd->add_option("--p", pmf.p, "dyadic parameter t/2^k");
  pmf.output.Add(pmf_cmd, "json");

  MechanismOptions run_mech;
  OutputOptions run_out;
  CLI::App* run_cmd = app.add_subcommand("run", "run a mechanism once");
  run_mech.Add(run_cmd);
  run_out.Add(run_cmd, "json");

  MechanismOptions audit_mech;
  AuditOptions audit;
  OutputOptions audit_out;
  CLI::App* audit_cmd =
      app.add_subcommand("audit", "audit a mechanism on an adjacent pair");
  audit_mech.Add(audit_cmd);
  audit_cmd->add_option("--mode", audit.mode, "exact or mc")
      ->check(CLI::IsMember({"exact", "mc"}));
  audit_cmd->add_option("--data-b", audit.data_b,
                        "second dataset (default: first plus one record)");
  audit_cmd->add_option("--insert", audit.insert,
                        "record inserted to form the second dataset "
                        "(default delta)");
  audit_cmd->add_flag("--output-only", audit.output_only,
                      "exact audit of the output marginal only");
  audit_cmd->add_option("--trials", audit.trials, "Monte Carlo trials per side")
      ->check(CLI::PositiveNumber);
  audit_cmd->add_option("--confidence", audit.confidence,
                        "Monte Carlo confidence level")
      ->check(CLI::Range(0.5, 0.999999));
  audit_cmd->add_option("--workers", audit.workers, "Monte Carlo threads")
      ->check(CLI::PositiveNumber);
  audit_cmd->add_option("--joint-csv", audit.joint_csv,
                        "also write the exact joint of the first dataset");
  audit_out.Add(audit_cmd, "json");

  ScheduleOptions schedule;
  CLI::App* schedule_cmd =
      app.add_subcommand("schedule", "Program 1 iteration schedule");
  schedule_cmd->add_option("--eps-prime", schedule.eps_prime, "halting budget");
  schedule_cmd->add_option("--beta", schedule.beta, "failure probability");
  schedule_cmd->add_option("--rows", schedule.rows, "number of rows")
      ->check(CLI::PositiveNumber);
  schedule.output.Add(schedule_cmd, "csv");

  DemoOptions demo;
  CLI::App* demo_cmd = app.add_subcommand(
      "demo-lower-bound", "fast-halt output sets of the adaptive count");
  demo_cmd->add_option("--c", demo.c, "exponent");
  demo_cmd->add_option("--k", demo.k, "offset");
  demo_cmd->add_option("--budget", demo.budget,
                       "runtime budget (default fixed + 3 per-flip)");
  demo_cmd->add_option("--ns", demo.ns, "input lengths")->delimiter(',');
  demo_cmd->add_option("--trials", demo.trials, "runs per input");
  demo_cmd->add_option("--seed", demo.seed, "seed (default $JOTDP_SEED or 0)");
  demo_cmd->add_option("--workers", demo.workers, "threads")
      ->check(CLI::PositiveNumber);
  demo_cmd->add_option("--csv", demo.csv_path,
                       "also write the observed output sets as CSV");
  demo.output.Add(demo_cmd, "json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (pmf_cmd->parsed()) return RunPmf(pmf);
    if (run_cmd->parsed()) return RunRun(run_mech, run_out);
    if (audit_cmd->parsed()) return RunAudit(audit_mech, audit, audit_out);
    if (schedule_cmd->parsed()) return RunSchedule(schedule);
    if (demo_cmd->parsed()) return RunDemo(demo);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.message << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
