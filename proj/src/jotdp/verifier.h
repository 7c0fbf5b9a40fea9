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

// Privacy and accuracy audits over joint (output, runtime) distributions.
//
// Exact mode compares analytic joint tables and is authoritative. Monte Carlo
// mode produces a statistically sound lower bound on epsilon: with probability
// at least `confidence` the reported value does not exceed the true one.

#ifndef JOTDP_VERIFIER_H_
#define JOTDP_VERIFIER_H_

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "jotdp/cost_model.h"
#include "jotdp/distributions.h"
#include "jotdp/mechanisms.h"
#include "jotdp/numeric.h"

namespace jotdp {

enum class DistKind { kExact, kEmpirical };

// Probability table over (output, runtime). Exact tables hold masses plus a
// residual for probability outside the listed keys; empirical tables hold
// counts out of `trials`.
class JointDist {
 public:
  static JointDist Exact();
  static JointDist Empirical(uint64_t trials);

  DistKind kind() const { return kind_; }
  uint64_t trials() const { return trials_; }
  size_t size() const {
    return kind_ == DistKind::kExact ? mass_.size() : counts_.size();
  }

  // Exact only. Accumulates into an existing key.
  void AddMass(JointOutcome key, const Real& mass);
  void set_residual(const Real& residual) { residual_ = residual; }
  const Real& residual() const { return residual_; }
  // Empirical only.
  void AddCount(JointOutcome key, uint64_t count = 1);
  // Merging empirical tables sums counts and trials; order-independent.
  absl::Status Merge(const JointDist& other);

  // Mass of `key` (count / trials when empirical).
  Real Mass(JointOutcome key) const;
  uint64_t Count(JointOutcome key) const;
  std::vector<JointOutcome> Keys() const;
  const std::map<JointOutcome, Real>& exact_masses() const { return mass_; }
  const std::map<JointOutcome, uint64_t>& counts() const { return counts_; }
  Real Total() const;

  // Collapses runtimes to 0: the output-only view.
  JointDist OutputMarginal() const;
  // Collapses outputs to 0: the runtime-only view.
  JointDist RuntimeMarginal() const;

  friend bool operator==(const JointDist&, const JointDist&) = default;

 private:
  DistKind kind_ = DistKind::kExact;
  uint64_t trials_ = 0;
  std::map<JointOutcome, Real> mass_;
  std::map<JointOutcome, uint64_t> counts_;
  Real residual_ = 0;
};

// Joint table of a Pmf with a constant runtime.
JointDist JointFromPmf(const Pmf& pmf, uint64_t runtime);

enum class EpsilonMethod { kExactRatio, kMcLowerBound };
std::string_view EpsilonMethodName(EpsilonMethod method);

struct EpsilonReport {
  double eps_hat = 0;  // +inf on an exact support mismatch
  EpsilonMethod method = EpsilonMethod::kExactRatio;
  double confidence = 1.0;
  JointOutcome worst_outcome;
  bool support_mismatch = false;
  // Outcome present on one side only (exact) or observed on one side only
  // with a significant lower bound (Monte Carlo).
  std::optional<JointOutcome> witness;
  uint64_t outcomes_compared = 0;
};

// Handling of mass outside the listed keys. When `covers_residual` is set the
// caller has shown symbolically that every unlisted outcome has log-ratio of
// absolute value at most `log_ratio`, which then joins the maximum.
struct TailBound {
  bool covers_residual = false;
  Real log_ratio = 0;
};

inline constexpr double kMaxUncoveredResidual = 1e-12;

// max |ln a(o) - ln b(o)| over the union of keys. A key with mass on exactly
// one side yields a report with support_mismatch set and eps_hat = +inf.
absl::StatusOr<EpsilonReport> ExactEpsilon(const JointDist& a,
                                           const JointDist& b,
                                           const TailBound& tail = {});

// One seeded run of a mechanism.
using TrialFn = std::function<absl::StatusOr<JointOutcome>(RandomSource&)>;

// Histogram over `trials` runs; trial i uses DeriveSeed(seed_base, i), so the
// result does not depend on `workers`.
absl::StatusOr<JointDist> MonteCarloJoint(const TrialFn& trial,
                                          uint64_t trials, uint64_t seed_base,
                                          unsigned workers = 1);

// Clopper-Pearson interval for `successes` out of `trials` at two-sided
// level alpha.
struct Interval {
  double lo = 0;
  double hi = 1;
};
Interval ClopperPearson(uint64_t successes, uint64_t trials, double alpha);

// Max over outcomes and both directions of ln(lower_A / upper_B), using
// Clopper-Pearson intervals with a Bonferroni split of 1 - confidence over
// all intervals. Negative values are reported as 0.
absl::StatusOr<EpsilonReport> McEpsilonLowerBound(const JointDist& a,
                                                  const JointDist& b,
                                                  double confidence);

absl::StatusOr<Real> TvDistance(const JointDist& a, const JointDist& b);
Real TvDistance(const Pmf& a, const Pmf& b);
// Plug-in standard error of the empirical TV: 0.5 * sum over outcomes of
// sqrt((pA (1 - pA) + pB (1 - pB)) / trials).
absl::StatusOr<double> TvSigma(const JointDist& a, const JointDist& b);

struct AccuracyProfile {
  uint64_t n = 0;
  std::map<double, double> quantiles;  // level -> absolute error
  double fitted_c = 0;
};

// Empirical quantiles of |error| at each level (smallest e with
// P(|error| <= e) >= level).
AccuracyProfile ProfileFromErrors(uint64_t n, std::vector<int64_t> errors,
                                  const std::vector<double>& levels);

// quantile(1 - n^-c) * eps / ln n for one n.
double FittedC(uint64_t n, double quantile, double eps);

// Exact error law of RunLaplaceSum on n records of `value` (truth n * value).
// P(|output - truth| >= t).
absl::StatusOr<Real> LaplaceSumErrorTail(uint64_t n, int64_t value,
                                         int64_t delta,
                                         const LaplaceSumConfig& cfg,
                                         uint64_t t);
// Smallest t with P(|output - truth| <= t) >= level.
absl::StatusOr<uint64_t> LaplaceSumErrorQuantile(uint64_t n, int64_t value,
                                                 int64_t delta,
                                                 const LaplaceSumConfig& cfg,
                                                 const Real& level);
// Probability that RunLaplaceSum truncates (2 n_hat < n).
absl::StatusOr<Real> LaplaceSumTruncationMass(uint64_t n,
                                              const LaplaceSumConfig& cfg);

// Runtime-conditioned supports of the adaptive count.
struct SupportDemoEntry {
  uint64_t n = 0;
  std::vector<int64_t> observed;       // outputs seen with runtime <= budget
  std::vector<int64_t> exact_support;  // outputs whose runtime fits
  Real exact_probability = 0;          // P(runtime <= budget)
  uint64_t fast_runs = 0;
  uint64_t trials = 0;
  double empirical_probability = 0;
  double sigma = 0;  // binomial standard error at exact_probability
};

struct SupportDemoReport {
  uint64_t budget = 0;
  int64_t max_output = -1;  // largest output meeting the budget; -1 if none
  bool exact_supports_equal = true;
  bool observed_within_exact = true;
  std::vector<SupportDemoEntry> entries;
};

absl::StatusOr<SupportDemoReport> SupportDemo(const AdaptiveCountParams& base,
                                              uint64_t budget,
                                              const std::vector<uint64_t>& ns,
                                              uint64_t trials,
                                              uint64_t seed_base,
                                              unsigned workers = 1);

}  // namespace jotdp

#endif  // JOTDP_VERIFIER_H_
