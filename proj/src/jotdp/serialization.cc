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

#include "jotdp/serialization.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ios>
#include <limits>
#include <sstream>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace jotdp {
namespace {

absl::Status ParseError(const std::string& what) {
  return absl::InvalidArgumentError("malformed document: " + what);
}

// Runs `fn`, turning nlohmann exceptions into InvalidArgument.
template <typename Fn>
auto Guard(Fn fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    return ParseError(e.what());
  }
}

std::string Decimal(const Real& x) {
  std::ostringstream out;
  out.precision(12);
  out << x.convert_to<double>();
  return out.str();
}

Json OutcomeToJson(const JointOutcome& o) {
  return Json{{"output", o.output}, {"runtime", o.runtime}};
}

JointOutcome OutcomeFromJson(const Json& j) {
  return {j.at("output").get<int64_t>(), j.at("runtime").get<uint64_t>()};
}

std::string DyadicToString(const Dyadic& p) {
  return absl::StrFormat("%d/%d", p.numerator, uint64_t{1} << p.kbits);
}

absl::StatusOr<int64_t> ParseInt(std::string_view text) {
  int64_t value = 0;
  const auto [ptr, ec] =
      std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("not an integer: '%s'", std::string(text)));
  }
  return value;
}

absl::StatusOr<std::vector<int64_t>> ParseIntList(std::string_view text) {
  std::vector<int64_t> out;
  std::string token;
  auto flush = [&]() -> absl::Status {
    if (token.empty()) return absl::OkStatus();
    absl::StatusOr<int64_t> v = ParseInt(token);
    if (!v.ok()) return v.status();
    out.push_back(*v);
    token.clear();
    return absl::OkStatus();
  };
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\n' || ch == '\t' || ch == '\r' ||
        ch == '[' || ch == ']') {
      if (absl::Status s = flush(); !s.ok()) return s;
    } else {
      token.push_back(ch);
    }
  }
  if (absl::Status s = flush(); !s.ok()) return s;
  return out;
}

}  // namespace

std::string_view Version() { return JOTDP_VERSION; }

Json Header() {
  return Json{{"schema", std::string(kSchema)},
              {"version", std::string(Version())}};
}

absl::Status CheckHeader(const Json& doc) {
  if (!doc.is_object() || !doc.contains("schema") ||
      doc["schema"] != std::string(kSchema)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("expected schema '%s'", std::string(kSchema)));
  }
  return absl::OkStatus();
}

std::string RealToString(const Real& x) {
  return x.str(std::numeric_limits<Real>::max_digits10,
               std::ios_base::scientific);
}

absl::StatusOr<Real> ParseReal(const std::string& text) {
  try {
    return Real(text);
  } catch (const std::exception&) {
    return absl::InvalidArgumentError(
        absl::StrFormat("not a real number: '%s'", text));
  }
}

// --- Pmf ---

Json PmfToJson(const Pmf& pmf) {
  Json doc = Header();
  doc["support"] = pmf.support();
  Json mass = Json::array();
  for (size_t i = 0; i < pmf.size(); ++i) {
    mass.push_back(pmf.exact() ? RationalToString(pmf.exact_mass(i))
                               : RealToString(pmf.mass(i)));
  }
  doc["mass"] = std::move(mass);
  doc["exact"] = pmf.exact();
  doc["residual"] = pmf.exact() ? RationalToString(pmf.exact_residual())
                                : RealToString(pmf.residual());
  return doc;
}

absl::StatusOr<Pmf> PmfFromJson(const Json& doc) {
  if (absl::Status s = CheckHeader(doc); !s.ok()) return s;
  return Guard([&]() -> absl::StatusOr<Pmf> {
    std::vector<int64_t> support = doc.at("support").get<std::vector<int64_t>>();
    const Json& mass = doc.at("mass");
    if (mass.size() != support.size()) {
      return ParseError("support and mass lengths differ");
    }
    const std::string residual = doc.at("residual").get<std::string>();
    if (doc.at("exact").get<bool>()) {
      std::vector<Rational> masses;
      for (const Json& m : mass) {
        absl::StatusOr<Rational> q = ParseRational(m.get<std::string>());
        if (!q.ok()) return q.status();
        masses.push_back(*q);
      }
      absl::StatusOr<Rational> r = ParseRational(residual);
      if (!r.ok()) return r.status();
      return Pmf::FromRational(std::move(support), std::move(masses), *r);
    }
    std::vector<Real> masses;
    for (const Json& m : mass) {
      absl::StatusOr<Real> x = ParseReal(m.get<std::string>());
      if (!x.ok()) return x.status();
      masses.push_back(*x);
    }
    absl::StatusOr<Real> r = ParseReal(residual);
    if (!r.ok()) return r.status();
    return Pmf::FromReal(std::move(support), std::move(masses), *r);
  });
}

std::string PmfToCsv(const Pmf& pmf) {
  std::string out = "outcome,mass\n";
  for (size_t i = 0; i < pmf.size(); ++i) {
    out += absl::StrFormat("%d,%s\n", pmf.outcome(i), Decimal(pmf.mass(i)));
  }
  return out;
}

// --- MechanismResult ---

Json ResultToJson(const MechanismResult& result) {
  Json doc = Header();
  doc["output"] = result.outcome.output;
  doc["runtime"] = result.outcome.runtime;
  doc["iterations"] = result.iterations;
  doc["bound"] = result.bound;
  doc["truncated"] = result.truncated;
  doc["seed"] = result.seed;
  return doc;
}

absl::StatusOr<MechanismResult> ResultFromJson(const Json& doc) {
  if (absl::Status s = CheckHeader(doc); !s.ok()) return s;
  return Guard([&]() -> absl::StatusOr<MechanismResult> {
    MechanismResult r;
    r.outcome = OutcomeFromJson(doc);
    r.iterations = doc.at("iterations").get<uint32_t>();
    r.bound = doc.at("bound").get<uint64_t>();
    r.truncated = doc.at("truncated").get<bool>();
    r.seed = doc.at("seed").get<uint64_t>();
    return r;
  });
}

// --- EpsilonReport ---

Json ReportToJson(const EpsilonReport& report) {
  Json doc = Header();
  if (std::isinf(report.eps_hat)) {
    doc["eps_hat"] = "inf";
  } else {
    doc["eps_hat"] = report.eps_hat;
  }
  doc["method"] = std::string(EpsilonMethodName(report.method));
  doc["confidence"] = report.confidence;
  doc["worst_outcome"] = OutcomeToJson(report.worst_outcome);
  doc["support_mismatch"] = report.support_mismatch;
  doc["witness"] =
      report.witness ? OutcomeToJson(*report.witness) : Json(nullptr);
  doc["outcomes_compared"] = report.outcomes_compared;
  return doc;
}

absl::StatusOr<EpsilonReport> ReportFromJson(const Json& doc) {
  if (absl::Status s = CheckHeader(doc); !s.ok()) return s;
  return Guard([&]() -> absl::StatusOr<EpsilonReport> {
    EpsilonReport r;
    const Json& eps = doc.at("eps_hat");
    r.eps_hat = eps.is_string() ? std::numeric_limits<double>::infinity()
                                : eps.get<double>();
    const std::string method = doc.at("method").get<std::string>();
    if (method == EpsilonMethodName(EpsilonMethod::kExactRatio)) {
      r.method = EpsilonMethod::kExactRatio;
    } else if (method == EpsilonMethodName(EpsilonMethod::kMcLowerBound)) {
      r.method = EpsilonMethod::kMcLowerBound;
    } else {
      return ParseError("unknown method " + method);
    }
    r.confidence = doc.at("confidence").get<double>();
    r.worst_outcome = OutcomeFromJson(doc.at("worst_outcome"));
    r.support_mismatch = doc.at("support_mismatch").get<bool>();
    if (!doc.at("witness").is_null()) {
      r.witness = OutcomeFromJson(doc.at("witness"));
    }
    r.outcomes_compared = doc.at("outcomes_compared").get<uint64_t>();
    return r;
  });
}

// --- JointDist ---

Json JointDistToJson(const JointDist& dist) {
  Json doc = Header();
  const bool exact = dist.kind() == DistKind::kExact;
  doc["kind"] = exact ? "exact" : "empirical";
  doc["trials"] = dist.trials();
  Json entries = Json::array();
  for (const JointOutcome& key : dist.Keys()) {
    Json e = OutcomeToJson(key);
    if (exact) {
      e["mass"] = RealToString(dist.Mass(key));
    } else {
      e["count"] = dist.Count(key);
    }
    entries.push_back(std::move(e));
  }
  doc["entries"] = std::move(entries);
  doc["residual"] = RealToString(dist.residual());
  return doc;
}

absl::StatusOr<JointDist> JointDistFromJson(const Json& doc) {
  if (absl::Status s = CheckHeader(doc); !s.ok()) return s;
  return Guard([&]() -> absl::StatusOr<JointDist> {
    const std::string kind = doc.at("kind").get<std::string>();
    if (kind != "exact" && kind != "empirical") {
      return ParseError("unknown kind " + kind);
    }
    const bool exact = kind == "exact";
    JointDist dist = exact ? JointDist::Exact()
                           : JointDist::Empirical(doc.at("trials").get<uint64_t>());
    for (const Json& e : doc.at("entries")) {
      if (exact) {
        absl::StatusOr<Real> m = ParseReal(e.at("mass").get<std::string>());
        if (!m.ok()) return m.status();
        dist.AddMass(OutcomeFromJson(e), *m);
      } else {
        dist.AddCount(OutcomeFromJson(e), e.at("count").get<uint64_t>());
      }
    }
    absl::StatusOr<Real> residual =
        ParseReal(doc.at("residual").get<std::string>());
    if (!residual.ok()) return residual.status();
    dist.set_residual(*residual);
    return dist;
  });
}

std::string JointDistToCsv(const JointDist& dist) {
  std::string out = "output,runtime,mass\n";
  for (const JointOutcome& key : dist.Keys()) {
    out += absl::StrFormat("%d,%d,%s\n", key.output, key.runtime,
                           Decimal(dist.Mass(key)));
  }
  return out;
}

// --- Schedule ---

Json ScheduleToJson(const std::vector<ScheduleRow>& rows) {
  Json doc = Header();
  Json out = Json::array();
  for (const ScheduleRow& r : rows) {
    out.push_back(Json{{"i", r.i},
                       {"eps", r.eps},
                       {"beta", r.beta},
                       {"m", r.m},
                       {"eps_sum", r.eps_sum}});
  }
  doc["rows"] = std::move(out);
  return doc;
}

std::string ScheduleToCsv(const std::vector<ScheduleRow>& rows) {
  std::string out = "i,eps,beta,m,eps_sum\n";
  for (const ScheduleRow& r : rows) {
    out += absl::StrFormat("%d,%.17g,%.17g,%d,%.17g\n", r.i, r.eps, r.beta,
                           r.m, r.eps_sum);
  }
  return out;
}

// --- MechanismSpec ---

Json SpecToJson(const MechanismSpec& spec) {
  Json doc = Header();
  doc["mech"] = std::string(MechanismKindName(spec.kind));
  doc["eps_prime"] = spec.eps_prime;
  doc["beta"] = spec.beta;
  doc["max_iter"] = spec.max_iter;
  doc["c"] = spec.c;
  doc["k"] = spec.k;
  doc["inner"] = spec.inner;
  doc["inner_eps"] = spec.inner_eps;
  doc["eps"] = spec.eps;
  doc["count_share"] = spec.count_share;
  doc["count_exponent"] = spec.count_exponent;
  doc["s"] = spec.scale;
  doc["lo"] = spec.lo;
  doc["hi"] = spec.hi;
  doc["p"] = DyadicToString(spec.p);
  doc["clamp"] = spec.clamp;
  return doc;
}

absl::StatusOr<Dyadic> ParseDyadic(const std::string& text) {
  absl::StatusOr<Rational> q = ParseRational(text);
  if (!q.ok()) return q.status();
  if (!IsDyadic(*q) || *q <= 0 || *q >= 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("p must be a dyadic rational in (0, 1), got '%s'", text));
  }
  const BigInt den = denominator(*q);
  uint32_t kbits = 0;
  while ((BigInt(1) << kbits) < den) ++kbits;
  if (kbits > 62) {
    return absl::InvalidArgumentError("p needs more than 62 bits");
  }
  return Dyadic{numerator(*q).convert_to<uint64_t>(), kbits};
}

absl::StatusOr<MechanismSpec> SpecFromJson(const Json& doc) {
  if (!doc.is_object()) return ParseError("config must be an object");
  return Guard([&]() -> absl::StatusOr<MechanismSpec> {
    MechanismSpec spec;
    for (const auto& [key, value] : doc.items()) {
      if (key == "schema" || key == "version") continue;
      if (key == "mech") {
        absl::StatusOr<MechanismKind> kind =
            ParseMechanismKind(value.get<std::string>());
        if (!kind.ok()) return kind.status();
        spec.kind = *kind;
      } else if (key == "eps_prime") {
        spec.eps_prime = value.get<double>();
      } else if (key == "beta") {
        spec.beta = value.get<double>();
      } else if (key == "max_iter") {
        spec.max_iter = value.get<uint32_t>();
      } else if (key == "c") {
        spec.c = value.get<uint32_t>();
      } else if (key == "k") {
        spec.k = value.get<uint64_t>();
      } else if (key == "inner") {
        spec.inner = value.get<std::string>();
      } else if (key == "inner_eps") {
        spec.inner_eps = value.get<double>();
      } else if (key == "eps") {
        spec.eps = value.get<double>();
      } else if (key == "count_share") {
        spec.count_share = value.get<double>();
      } else if (key == "count_exponent") {
        spec.count_exponent = value.get<uint32_t>();
      } else if (key == "s") {
        spec.scale = value.get<double>();
      } else if (key == "lo") {
        spec.lo = value.get<int64_t>();
      } else if (key == "hi") {
        spec.hi = value.get<int64_t>();
      } else if (key == "p") {
        absl::StatusOr<Dyadic> p = ParseDyadic(value.get<std::string>());
        if (!p.ok()) return p.status();
        spec.p = *p;
      } else if (key == "clamp") {
        spec.clamp = value.get<uint64_t>();
      } else {
        return ParseError("unknown config key '" + key + "'");
      }
    }
    return spec;
  });
}

// --- Support demo ---

Json SupportDemoToJson(const SupportDemoReport& report) {
  Json doc = Header();
  doc["budget"] = report.budget;
  doc["max_output"] = report.max_output;
  doc["exact_supports_equal"] = report.exact_supports_equal;
  doc["observed_within_exact"] = report.observed_within_exact;
  Json entries = Json::array();
  for (const SupportDemoEntry& e : report.entries) {
    entries.push_back(Json{
        {"n", e.n},
        {"observed", e.observed},
        {"exact_support", e.exact_support},
        {"exact_probability", RealToString(e.exact_probability)},
        {"fast_runs", e.fast_runs},
        {"trials", e.trials},
        {"empirical_probability", e.empirical_probability},
        {"sigma", e.sigma},
    });
  }
  doc["entries"] = std::move(entries);
  return doc;
}

std::string SupportDemoToCsv(const SupportDemoReport& report) {
  std::string out = "n,output\n";
  for (const SupportDemoEntry& e : report.entries) {
    for (int64_t y : e.observed) out += absl::StrFormat("%d,%d\n", e.n, y);
  }
  return out;
}

// --- Datasets ---

absl::StatusOr<Dataset> ParseDataset(std::string_view text, int64_t delta) {
  auto count_after = [&](std::string_view prefix) -> absl::StatusOr<uint64_t> {
    absl::StatusOr<int64_t> n = ParseInt(text.substr(prefix.size()));
    if (!n.ok()) return n.status();
    if (*n < 0) return absl::InvalidArgumentError("negative dataset size");
    return static_cast<uint64_t>(*n);
  };
  if (text == "empty" || text.empty() || text == "[]") {
    return Dataset::Create({}, delta);
  }
  if (text.starts_with("ones:")) {
    absl::StatusOr<uint64_t> n = count_after("ones:");
    if (!n.ok()) return n.status();
    return Dataset::Constant(1, *n, delta);
  }
  if (text.starts_with("zeros:")) {
    absl::StatusOr<uint64_t> n = count_after("zeros:");
    if (!n.ok()) return n.status();
    return Dataset::Constant(0, *n, delta);
  }
  if (text.starts_with("file:")) {
    const std::string path(text.substr(5));
    std::ifstream in(path);
    if (!in) {
      return absl::NotFoundError(
          absl::StrFormat("cannot open dataset file '%s'", path));
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    absl::StatusOr<std::vector<int64_t>> records = ParseIntList(buffer.str());
    if (!records.ok()) return records.status();
    return Dataset::Create(std::move(*records), delta);
  }
  absl::StatusOr<std::vector<int64_t>> records = ParseIntList(text);
  if (!records.ok()) return records.status();
  return Dataset::Create(std::move(*records), delta);
}

}  // namespace jotdp
