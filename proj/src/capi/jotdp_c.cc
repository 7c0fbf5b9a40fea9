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

#include "jotdp/jotdp.h"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <exception>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "jotdp/catalog.h"
#include "jotdp/distributions.h"
#include "jotdp/mechanisms.h"
#include "jotdp/samplers.h"
#include "jotdp/serialization.h"
#include "jotdp/verifier.h"

struct jotdp_dataset {
  jotdp::Dataset value;
};

struct jotdp_pmf {
  jotdp::Pmf value;
};

struct jotdp_mechanism {
  jotdp::MechanismSpec spec;
};

namespace {

thread_local std::string last_error;

jotdp_status ToCode(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return JOTDP_OK;
    case absl::StatusCode::kInvalidArgument:
      return JOTDP_INVALID_ARGUMENT;
    case absl::StatusCode::kOutOfRange:
      return JOTDP_OUT_OF_RANGE;
    case absl::StatusCode::kNotFound:
      return JOTDP_NOT_FOUND;
    case absl::StatusCode::kResourceExhausted:
      return JOTDP_RESOURCE_EXHAUSTED;
    case absl::StatusCode::kFailedPrecondition:
      return JOTDP_FAILED_PRECONDITION;
    default:
      return JOTDP_INTERNAL;
  }
}

jotdp_status Fail(const absl::Status& status) {
  last_error = std::string(status.message());
  return ToCode(status);
}

jotdp_status Fail(jotdp_status code, const char* message) {
  last_error = message;
  return code;
}

// Runs `fn` with the error slot cleared and no exception crossing the C
// boundary.
template <typename Fn>
jotdp_status Call(Fn fn) {
  last_error.clear();
  try {
    absl::Status status = fn();
    return status.ok() ? JOTDP_OK : Fail(status);
  } catch (const std::exception& e) {
    return Fail(JOTDP_INTERNAL, e.what());
  } catch (...) {
    return Fail(JOTDP_INTERNAL, "unknown exception");
  }
}

char* CopyString(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (out != nullptr) std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

absl::Status Emit(const std::string& s, char** out) {
  if (out == nullptr) return absl::InvalidArgumentError("null output pointer");
  *out = CopyString(s);
  if (*out == nullptr) return absl::ResourceExhaustedError("out of memory");
  return absl::OkStatus();
}

absl::Status NotNull(const void* p, const char* what) {
  if (p == nullptr) {
    return absl::InvalidArgumentError(std::string("null ") + what);
  }
  return absl::OkStatus();
}

absl::Status StorePmf(absl::StatusOr<jotdp::Pmf> pmf, jotdp_pmf** out) {
  if (absl::Status s = NotNull(out, "output pointer"); !s.ok()) return s;
  if (!pmf.ok()) return pmf.status();
  *out = new jotdp_pmf{std::move(*pmf)};
  return absl::OkStatus();
}

jotdp_report ToC(const jotdp::EpsilonReport& r) {
  jotdp_report out{};
  out.eps_hat = r.eps_hat;
  out.exact = r.method == jotdp::EpsilonMethod::kExactRatio ? 1 : 0;
  out.confidence = r.confidence;
  out.worst_output = r.worst_outcome.output;
  out.worst_runtime = r.worst_outcome.runtime;
  out.support_mismatch = r.support_mismatch ? 1 : 0;
  out.has_witness = r.witness.has_value() ? 1 : 0;
  if (r.witness) {
    out.witness_output = r.witness->output;
    out.witness_runtime = r.witness->runtime;
  }
  out.outcomes_compared = r.outcomes_compared;
  return out;
}

jotdp::EpsilonReport FromC(const jotdp_report& r) {
  jotdp::EpsilonReport out;
  out.eps_hat = r.eps_hat;
  out.method = r.exact ? jotdp::EpsilonMethod::kExactRatio
                       : jotdp::EpsilonMethod::kMcLowerBound;
  out.confidence = r.confidence;
  out.worst_outcome = {r.worst_output, r.worst_runtime};
  out.support_mismatch = r.support_mismatch != 0;
  if (r.has_witness) {
    out.witness = jotdp::JointOutcome{r.witness_output, r.witness_runtime};
  }
  out.outcomes_compared = r.outcomes_compared;
  return out;
}

absl::Status StoreReport(const absl::StatusOr<jotdp::EpsilonReport>& report,
                         jotdp_report* out) {
  if (absl::Status s = NotNull(out, "report"); !s.ok()) return s;
  if (!report.ok()) return report.status();
  *out = ToC(*report);
  return absl::OkStatus();
}

absl::Status CheckAuditArgs(const jotdp_mechanism* m, const jotdp_dataset* a,
                            const jotdp_dataset* b) {
  if (absl::Status s = NotNull(m, "mechanism"); !s.ok()) return s;
  if (absl::Status s = NotNull(a, "dataset"); !s.ok()) return s;
  return NotNull(b, "dataset");
}

absl::StatusOr<std::vector<jotdp::ScheduleRow>> Schedule(double eps_prime,
                                                         double beta,
                                                         uint32_t rows) {
  jotdp::Program1Config cfg;
  cfg.eps_prime = eps_prime;
  cfg.beta = beta;
  return jotdp::IterationSchedule(cfg, rows);
}

}  // namespace

extern "C" {

const char* jotdp_version(void) { return JOTDP_VERSION; }

const char* jotdp_last_error(void) { return last_error.c_str(); }

void jotdp_string_free(char* s) { std::free(s); }

// --- Datasets ---

jotdp_status jotdp_dataset_create(const int64_t* records, size_t n,
                                  int64_t delta, jotdp_dataset** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(out, "output pointer"); !s.ok()) return s;
    if (n > 0) {
      if (absl::Status s = NotNull(records, "records"); !s.ok()) return s;
    }
    std::vector<int64_t> copy(records, records + n);
    absl::StatusOr<jotdp::Dataset> x =
        jotdp::Dataset::Create(std::move(copy), delta);
    if (!x.ok()) return x.status();
    *out = new jotdp_dataset{std::move(*x)};
    return absl::OkStatus();
  });
}

jotdp_status jotdp_dataset_parse(const char* text, int64_t delta,
                                 jotdp_dataset** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(out, "output pointer"); !s.ok()) return s;
    if (absl::Status s = NotNull(text, "text"); !s.ok()) return s;
    absl::StatusOr<jotdp::Dataset> x = jotdp::ParseDataset(text, delta);
    if (!x.ok()) return x.status();
    *out = new jotdp_dataset{std::move(*x)};
    return absl::OkStatus();
  });
}

jotdp_status jotdp_dataset_insert(const jotdp_dataset* x, int64_t record,
                                  jotdp_dataset** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(out, "output pointer"); !s.ok()) return s;
    if (absl::Status s = NotNull(x, "dataset"); !s.ok()) return s;
    std::vector<int64_t> records = x->value.records();
    records.push_back(record);
    absl::StatusOr<jotdp::Dataset> y =
        jotdp::Dataset::Create(std::move(records), x->value.delta());
    if (!y.ok()) return y.status();
    *out = new jotdp_dataset{std::move(*y)};
    return absl::OkStatus();
  });
}

size_t jotdp_dataset_size(const jotdp_dataset* x) {
  return x == nullptr ? 0 : x->value.size();
}

int64_t jotdp_dataset_delta(const jotdp_dataset* x) {
  return x == nullptr ? 0 : x->value.delta();
}

void jotdp_dataset_free(jotdp_dataset* x) { delete x; }

// --- Pmfs ---

jotdp_status jotdp_pmf_dl(int64_t mu, double s, int64_t lo, int64_t hi,
                          jotdp_pmf** out) {
  return Call([&]() {
    return StorePmf(jotdp::DiscreteLaplaceWindow({mu, s}, lo, hi), out);
  });
}

jotdp_status jotdp_pmf_cdl(int64_t mu, double s, int64_t lo, int64_t hi,
                           jotdp_pmf** out) {
  return Call([&]() {
    return StorePmf(jotdp::CensoredDLPmf({mu, s, lo, hi}), out);
  });
}

jotdp_status jotdp_pmf_adaptive(uint64_t n, uint32_t c, uint64_t k,
                                uint64_t max_outcome, jotdp_pmf** out) {
  return Call([&]() {
    return StorePmf(jotdp::AdaptiveCountTable({n, c, k}, max_outcome), out);
  });
}

jotdp_status jotdp_pmf_dsg(int64_t mu, uint64_t p_num, uint32_t p_kbits,
                           int64_t lo, int64_t hi, jotdp_pmf** out) {
  return Call([&]() -> absl::Status {
    absl::StatusOr<jotdp::DsgParams> params =
        jotdp::DsgParams::Create(mu, jotdp::Dyadic{p_num, p_kbits}, lo, hi);
    if (!params.ok()) return params.status();
    return StorePmf(jotdp::DsgPmf(*params), out);
  });
}

size_t jotdp_pmf_size(const jotdp_pmf* pmf) {
  return pmf == nullptr ? 0 : pmf->value.size();
}

int64_t jotdp_pmf_outcome(const jotdp_pmf* pmf, size_t i) {
  if (pmf == nullptr || i >= pmf->value.size()) return 0;
  return pmf->value.outcome(i);
}

double jotdp_pmf_mass(const jotdp_pmf* pmf, size_t i) {
  if (pmf == nullptr || i >= pmf->value.size()) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return pmf->value.mass(i).convert_to<double>();
}

double jotdp_pmf_residual(const jotdp_pmf* pmf) {
  if (pmf == nullptr) return std::numeric_limits<double>::quiet_NaN();
  return pmf->value.residual().convert_to<double>();
}

int jotdp_pmf_is_exact(const jotdp_pmf* pmf) {
  return pmf != nullptr && pmf->value.exact() ? 1 : 0;
}

jotdp_status jotdp_pmf_mass_string(const jotdp_pmf* pmf, size_t i,
                                   char** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(pmf, "pmf"); !s.ok()) return s;
    if (i >= pmf->value.size()) return absl::OutOfRangeError("index");
    return Emit(pmf->value.exact()
                    ? jotdp::RationalToString(pmf->value.exact_mass(i))
                    : jotdp::RealToString(pmf->value.mass(i)),
                out);
  });
}

jotdp_status jotdp_pmf_to_json(const jotdp_pmf* pmf, char** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(pmf, "pmf"); !s.ok()) return s;
    return Emit(jotdp::PmfToJson(pmf->value).dump(2), out);
  });
}

jotdp_status jotdp_pmf_to_csv(const jotdp_pmf* pmf, char** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(pmf, "pmf"); !s.ok()) return s;
    return Emit(jotdp::PmfToCsv(pmf->value), out);
  });
}

void jotdp_pmf_free(jotdp_pmf* pmf) { delete pmf; }

// --- Schedule ---

jotdp_status jotdp_schedule_row_at(double eps_prime, double beta, uint32_t i,
                                   jotdp_schedule_row* out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(out, "row"); !s.ok()) return s;
    jotdp::Program1Config cfg;
    cfg.eps_prime = eps_prime;
    cfg.beta = beta;
    absl::StatusOr<jotdp::ScheduleRow> row = jotdp::ScheduleRowAt(cfg, i);
    if (!row.ok()) return row.status();
    *out = {row->i, row->eps, row->beta, row->m, row->eps_sum};
    return absl::OkStatus();
  });
}

jotdp_status jotdp_schedule_to_json(double eps_prime, double beta,
                                    uint32_t rows, char** out) {
  return Call([&]() -> absl::Status {
    absl::StatusOr<std::vector<jotdp::ScheduleRow>> s =
        Schedule(eps_prime, beta, rows);
    if (!s.ok()) return s.status();
    jotdp::Json doc = jotdp::ScheduleToJson(*s);
    doc["eps_prime"] = eps_prime;
    doc["beta"] = beta;
    return Emit(doc.dump(2), out);
  });
}

jotdp_status jotdp_schedule_to_csv(double eps_prime, double beta,
                                   uint32_t rows, char** out) {
  return Call([&]() -> absl::Status {
    absl::StatusOr<std::vector<jotdp::ScheduleRow>> s =
        Schedule(eps_prime, beta, rows);
    if (!s.ok()) return s.status();
    return Emit(jotdp::ScheduleToCsv(*s), out);
  });
}

// --- Mechanisms ---

jotdp_status jotdp_mechanism_create(const char* config_json,
                                    jotdp_mechanism** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(out, "output pointer"); !s.ok()) return s;
    if (absl::Status s = NotNull(config_json, "config"); !s.ok()) return s;
    jotdp::Json doc = jotdp::Json::parse(config_json, nullptr, false);
    if (doc.is_discarded()) {
      return absl::InvalidArgumentError("config is not valid JSON");
    }
    absl::StatusOr<jotdp::MechanismSpec> spec = jotdp::SpecFromJson(doc);
    if (!spec.ok()) return spec.status();
    if (absl::Status s = jotdp::Validate(*spec); !s.ok()) return s;
    *out = new jotdp_mechanism{std::move(*spec)};
    return absl::OkStatus();
  });
}

jotdp_status jotdp_mechanism_config_json(const jotdp_mechanism* m,
                                         char** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(m, "mechanism"); !s.ok()) return s;
    return Emit(jotdp::SpecToJson(m->spec).dump(2), out);
  });
}

jotdp_status jotdp_mechanism_declared_epsilon(const jotdp_mechanism* m,
                                              int64_t delta, double* out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(m, "mechanism"); !s.ok()) return s;
    if (absl::Status s = NotNull(out, "output pointer"); !s.ok()) return s;
    absl::StatusOr<double> eps = jotdp::DeclaredEpsilon(m->spec, delta);
    if (!eps.ok()) return eps.status();
    *out = *eps;
    return absl::OkStatus();
  });
}

void jotdp_mechanism_free(jotdp_mechanism* m) { delete m; }

jotdp_status jotdp_run(const jotdp_mechanism* m, const jotdp_dataset* x,
                       uint64_t seed, jotdp_result* out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(m, "mechanism"); !s.ok()) return s;
    if (absl::Status s = NotNull(x, "dataset"); !s.ok()) return s;
    if (absl::Status s = NotNull(out, "result"); !s.ok()) return s;
    absl::StatusOr<jotdp::MechanismResult> r =
        jotdp::RunMechanism(m->spec, x->value, seed);
    if (!r.ok()) return r.status();
    *out = {r->outcome.output, r->outcome.runtime, r->iterations,
            r->bound,          r->truncated ? 1 : 0, r->seed};
    return absl::OkStatus();
  });
}

jotdp_status jotdp_result_to_json(const jotdp_result* r, char** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(r, "result"); !s.ok()) return s;
    jotdp::MechanismResult result;
    result.outcome = {r->output, r->runtime};
    result.iterations = r->iterations;
    result.bound = r->bound;
    result.truncated = r->truncated != 0;
    result.seed = r->seed;
    return Emit(jotdp::ResultToJson(result).dump(2), out);
  });
}

// --- Audits ---

jotdp_status jotdp_audit_exact(const jotdp_mechanism* m,
                               const jotdp_dataset* a, const jotdp_dataset* b,
                               jotdp_report* out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = CheckAuditArgs(m, a, b); !s.ok()) return s;
    return StoreReport(jotdp::ExactAudit(m->spec, a->value, b->value), out);
  });
}

jotdp_status jotdp_audit_exact_output_only(const jotdp_mechanism* m,
                                           const jotdp_dataset* a,
                                           const jotdp_dataset* b,
                                           jotdp_report* out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = CheckAuditArgs(m, a, b); !s.ok()) return s;
    return StoreReport(
        jotdp::ExactOutputOnlyAudit(m->spec, a->value, b->value), out);
  });
}

jotdp_status jotdp_audit_mc(const jotdp_mechanism* m, const jotdp_dataset* a,
                            const jotdp_dataset* b, uint64_t trials,
                            uint64_t seed, double confidence, unsigned workers,
                            jotdp_report* out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = CheckAuditArgs(m, a, b); !s.ok()) return s;
    absl::StatusOr<jotdp::McAuditResult> r = jotdp::McAudit(
        m->spec, a->value, b->value, trials, seed, confidence, workers);
    if (!r.ok()) return r.status();
    return StoreReport(r->report, out);
  });
}

jotdp_status jotdp_report_to_json(const jotdp_report* r, char** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(r, "report"); !s.ok()) return s;
    return Emit(jotdp::ReportToJson(FromC(*r)).dump(2), out);
  });
}

jotdp_status jotdp_exact_joint_csv(const jotdp_mechanism* m,
                                   const jotdp_dataset* x, char** out) {
  return Call([&]() -> absl::Status {
    if (absl::Status s = NotNull(m, "mechanism"); !s.ok()) return s;
    if (absl::Status s = NotNull(x, "dataset"); !s.ok()) return s;
    absl::StatusOr<jotdp::JointDist> joint =
        jotdp::ExactJointFor(m->spec, x->value);
    if (!joint.ok()) return joint.status();
    return Emit(jotdp::JointDistToCsv(*joint), out);
  });
}

jotdp_status jotdp_demo_lower_bound(uint32_t c, uint64_t k, uint64_t budget,
                                    const uint64_t* ns, size_t count,
                                    uint64_t trials, uint64_t seed,
                                    unsigned workers, char** json_out,
                                    char** csv_out) {
  return Call([&]() -> absl::Status {
    if (count > 0) {
      if (absl::Status s = NotNull(ns, "input sizes"); !s.ok()) return s;
    }
    jotdp::AdaptiveCountParams base;
    base.c = c;
    base.k = k;
    absl::StatusOr<jotdp::SupportDemoReport> report = jotdp::SupportDemo(
        base, budget, std::vector<uint64_t>(ns, ns + count), trials, seed,
        workers);
    if (!report.ok()) return report.status();
    if (json_out != nullptr) {
      jotdp::Json doc = jotdp::SupportDemoToJson(*report);
      doc["c"] = c;
      doc["k"] = k;
      doc["seed"] = seed;
      if (absl::Status s = Emit(doc.dump(2), json_out); !s.ok()) return s;
    }
    if (csv_out != nullptr) {
      return Emit(jotdp::SupportDemoToCsv(*report), csv_out);
    }
    return absl::OkStatus();
  });
}

jotdp_status jotdp_adaptive_count_cost(uint32_t c, uint64_t* fixed,
                                       uint64_t* per_flip) {
  return Call([&]() -> absl::Status {
    if (c < 1) return absl::InvalidArgumentError("c must be at least 1");
    jotdp::AdaptiveCountCost cost = jotdp::AdaptiveCountCostSchedule(c);
    if (fixed != nullptr) *fixed = cost.fixed;
    if (per_flip != nullptr) *per_flip = cost.per_flip;
    return absl::OkStatus();
  });
}

}  // extern "C"
