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

#include "jotdp/verifier.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <thread>

#include <boost/math/special_functions/beta.hpp>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "jotdp/samplers.h"

namespace jotdp {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::set<JointOutcome> KeyUnion(const JointDist& a, const JointDist& b) {
  std::set<JointOutcome> keys;
  for (const JointOutcome& k : a.Keys()) keys.insert(k);
  for (const JointOutcome& k : b.Keys()) keys.insert(k);
  return keys;
}

// Censored discrete Laplace tail helpers with r = e^{-1/s}.
// P(Y <= b).
Real CdlAtMost(int64_t b, int64_t mu, int64_t lo, int64_t hi, const Real& r) {
  if (b < lo) return 0;
  if (b >= hi) return 1;
  if (b <= mu) return pow(r, mu - b) / (1 + r);
  return 1 - pow(r, b - mu + 1) / (1 + r);
}

// P(Y >= a).
Real CdlAtLeast(int64_t a, int64_t mu, int64_t lo, int64_t hi, const Real& r) {
  if (a <= lo) return 1;
  if (a > hi) return 0;
  if (a - 1 >= mu) return pow(r, a - mu) / (1 + r);
  return 1 - pow(r, mu - a + 1) / (1 + r);
}

struct LaplaceSumSetup {
  LaplaceSumPlan plan;
  Real r;
  int64_t truth = 0;
};

absl::StatusOr<LaplaceSumSetup> SetupLaplaceSum(uint64_t n, int64_t value,
                                                int64_t delta,
                                                const LaplaceSumConfig& cfg) {
  if (delta < 1 || value < 0 || value > delta) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "need 0 <= value <= delta and delta >= 1, got value=%d delta=%d",
        value, delta));
  }
  absl::StatusOr<LaplaceSumPlan> plan = PlanLaplaceSum(cfg);
  if (!plan.ok()) return plan.status();
  LaplaceSumSetup setup;
  setup.plan = *plan;
  setup.r = exp(-Real(plan->eps2) / Real(delta));
  setup.truth = static_cast<int64_t>(n) * value;
  return setup;
}

// P(|Y - truth| >= t) when the adaptive count returned `raw`.
Real ErrorTailGivenCount(uint64_t n, int64_t value, int64_t delta,
                         const LaplaceSumSetup& setup, uint64_t raw,
                         uint64_t t) {
  if (t == 0) return 1;
  const uint64_t bound = 2 * raw;
  const int64_t mu = value * static_cast<int64_t>(std::min(n, bound));
  const int64_t hi = delta * static_cast<int64_t>(bound);
  const int64_t ti = static_cast<int64_t>(t);
  return CdlAtLeast(setup.truth + ti, mu, 0, hi, setup.r) +
         CdlAtMost(setup.truth - ti, mu, 0, hi, setup.r);
}

}  // namespace

// --- JointDist ---

JointDist JointDist::Exact() { return JointDist(); }

JointDist JointDist::Empirical(uint64_t trials) {
  JointDist d;
  d.kind_ = DistKind::kEmpirical;
  d.trials_ = trials;
  return d;
}

void JointDist::AddMass(JointOutcome key, const Real& mass) {
  mass_[key] += mass;
}

void JointDist::AddCount(JointOutcome key, uint64_t count) {
  counts_[key] += count;
}

absl::Status JointDist::Merge(const JointDist& other) {
  if (kind_ != DistKind::kEmpirical || other.kind_ != DistKind::kEmpirical) {
    return absl::InvalidArgumentError("only empirical tables can be merged");
  }
  for (const auto& [key, count] : other.counts_) counts_[key] += count;
  trials_ += other.trials_;
  return absl::OkStatus();
}

Real JointDist::Mass(JointOutcome key) const {
  if (kind_ == DistKind::kExact) {
    auto it = mass_.find(key);
    return it == mass_.end() ? Real(0) : it->second;
  }
  if (trials_ == 0) return 0;
  return Real(Count(key)) / Real(trials_);
}

uint64_t JointDist::Count(JointOutcome key) const {
  auto it = counts_.find(key);
  return it == counts_.end() ? 0 : it->second;
}

std::vector<JointOutcome> JointDist::Keys() const {
  std::vector<JointOutcome> keys;
  if (kind_ == DistKind::kExact) {
    for (const auto& [key, m] : mass_) keys.push_back(key);
  } else {
    for (const auto& [key, c] : counts_) keys.push_back(key);
  }
  return keys;
}

Real JointDist::Total() const {
  Real total = 0;
  if (kind_ == DistKind::kExact) {
    for (const auto& [key, m] : mass_) total += m;
    return total;
  }
  uint64_t count = 0;
  for (const auto& [key, c] : counts_) count += c;
  return trials_ == 0 ? Real(0) : Real(count) / Real(trials_);
}

JointDist JointDist::OutputMarginal() const {
  JointDist out = *this;
  out.mass_.clear();
  out.counts_.clear();
  for (const auto& [key, m] : mass_) out.mass_[{key.output, 0}] += m;
  for (const auto& [key, c] : counts_) out.counts_[{key.output, 0}] += c;
  return out;
}

JointDist JointDist::RuntimeMarginal() const {
  JointDist out = *this;
  out.mass_.clear();
  out.counts_.clear();
  for (const auto& [key, m] : mass_) out.mass_[{0, key.runtime}] += m;
  for (const auto& [key, c] : counts_) out.counts_[{0, key.runtime}] += c;
  return out;
}

JointDist JointFromPmf(const Pmf& pmf, uint64_t runtime) {
  JointDist d = JointDist::Exact();
  for (size_t i = 0; i < pmf.size(); ++i) {
    if (pmf.mass(i) > 0) d.AddMass({pmf.outcome(i), runtime}, pmf.mass(i));
  }
  d.set_residual(pmf.residual());
  return d;
}

std::string_view EpsilonMethodName(EpsilonMethod method) {
  switch (method) {
    case EpsilonMethod::kExactRatio:
      return "exact_ratio";
    case EpsilonMethod::kMcLowerBound:
      return "mc_lower_bound";
  }
  return "unknown";
}

// --- Exact epsilon ---

absl::StatusOr<EpsilonReport> ExactEpsilon(const JointDist& a,
                                           const JointDist& b,
                                           const TailBound& tail) {
  if (a.kind() != DistKind::kExact || b.kind() != DistKind::kExact) {
    return absl::InvalidArgumentError("exact audit needs exact tables");
  }
  if (!tail.covers_residual && (a.residual() >= kMaxUncoveredResidual ||
                                b.residual() >= kMaxUncoveredResidual)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "unlisted mass %g / %g exceeds %g without a tail bound",
        ToDouble(a.residual()), ToDouble(b.residual()),
        kMaxUncoveredResidual));
  }
  EpsilonReport report;
  report.method = EpsilonMethod::kExactRatio;
  report.confidence = 1.0;
  Real worst = tail.covers_residual ? abs(tail.log_ratio) : Real(0);
  for (const JointOutcome& key : KeyUnion(a, b)) {
    const Real ma = a.Mass(key);
    const Real mb = b.Mass(key);
    if (ma <= 0 && mb <= 0) continue;
    ++report.outcomes_compared;
    if (ma <= 0 || mb <= 0) {
      report.support_mismatch = true;
      report.witness = key;
      report.worst_outcome = key;
      report.eps_hat = kInf;
      return report;
    }
    const Real ratio = abs(log(ma) - log(mb));
    if (ratio > worst) {
      worst = ratio;
      report.worst_outcome = key;
    }
  }
  report.eps_hat = ToDouble(worst);
  return report;
}

// --- Monte Carlo ---

absl::StatusOr<JointDist> MonteCarloJoint(const TrialFn& trial,
                                          uint64_t trials, uint64_t seed_base,
                                          unsigned workers) {
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  workers = std::max(1u, std::min<unsigned>(
                             workers, static_cast<unsigned>(
                                          std::min<uint64_t>(trials, 256))));
  std::vector<JointDist> parts(workers, JointDist::Empirical(0));
  std::vector<absl::Status> errors(workers);
  auto work = [&](unsigned w) {
    const uint64_t begin = trials * w / workers;
    const uint64_t end = trials * (w + 1) / workers;
    JointDist local = JointDist::Empirical(end - begin);
    for (uint64_t i = begin; i < end; ++i) {
      RandomSource source(DeriveSeed(seed_base, i));
      absl::StatusOr<JointOutcome> outcome = trial(source);
      if (!outcome.ok()) {
        errors[w] = outcome.status();
        return;
      }
      local.AddCount(*outcome);
    }
    parts[w] = std::move(local);
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> threads;
    for (unsigned w = 0; w < workers; ++w) threads.emplace_back(work, w);
    for (std::thread& t : threads) t.join();
  }
  JointDist merged = JointDist::Empirical(0);
  for (unsigned w = 0; w < workers; ++w) {
    if (!errors[w].ok()) return errors[w];
    if (absl::Status s = merged.Merge(parts[w]); !s.ok()) return s;
  }
  return merged;
}

Interval ClopperPearson(uint64_t successes, uint64_t trials, double alpha) {
  Interval iv;
  if (trials == 0) return iv;
  const double x = static_cast<double>(successes);
  const double t = static_cast<double>(trials);
  iv.lo = successes == 0
              ? 0.0
              : boost::math::ibeta_inv(x, t - x + 1, alpha / 2);
  iv.hi = successes == trials
              ? 1.0
              : boost::math::ibeta_inv(x + 1, t - x, 1 - alpha / 2);
  return iv;
}

absl::StatusOr<EpsilonReport> McEpsilonLowerBound(const JointDist& a,
                                                  const JointDist& b,
                                                  double confidence) {
  if (a.kind() != DistKind::kEmpirical || b.kind() != DistKind::kEmpirical) {
    return absl::InvalidArgumentError("Monte Carlo audit needs empirical tables");
  }
  if (a.trials() != b.trials() || a.trials() == 0) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "trial counts differ or are zero: %d vs %d", a.trials(), b.trials()));
  }
  if (!(confidence > 0 && confidence < 1)) {
    return absl::InvalidArgumentError("confidence must lie in (0, 1)");
  }
  const std::set<JointOutcome> keys = KeyUnion(a, b);
  const double alpha =
      (1 - confidence) / (2.0 * static_cast<double>(std::max<size_t>(keys.size(), 1)));
  EpsilonReport report;
  report.method = EpsilonMethod::kMcLowerBound;
  report.confidence = confidence;
  double worst = 0;
  double worst_one_sided = 0;
  for (const JointOutcome& key : keys) {
    const uint64_t ca = a.Count(key), cb = b.Count(key);
    const Interval ia = ClopperPearson(ca, a.trials(), alpha);
    const Interval ib = ClopperPearson(cb, b.trials(), alpha);
    ++report.outcomes_compared;
    const double forward = ia.lo > 0 ? std::log(ia.lo / ib.hi) : -kInf;
    const double backward = ib.lo > 0 ? std::log(ib.lo / ia.hi) : -kInf;
    const double bound = std::max(forward, backward);
    if (bound > worst) {
      worst = bound;
      report.worst_outcome = key;
    }
    if ((ca == 0 || cb == 0) && bound > worst_one_sided) {
      worst_one_sided = bound;
      report.witness = key;
      report.support_mismatch = true;
    }
  }
  report.eps_hat = worst;
  return report;
}

// --- TV ---

absl::StatusOr<Real> TvDistance(const JointDist& a, const JointDist& b) {
  if (a.kind() != b.kind()) {
    return absl::InvalidArgumentError("TV distance needs tables of one kind");
  }
  Real total = 0;
  for (const JointOutcome& key : KeyUnion(a, b)) {
    total += abs(a.Mass(key) - b.Mass(key));
  }
  return total / 2;
}

Real TvDistance(const Pmf& a, const Pmf& b) {
  std::set<int64_t> keys(a.support().begin(), a.support().end());
  keys.insert(b.support().begin(), b.support().end());
  Real total = 0;
  for (int64_t y : keys) total += abs(a.MassOf(y) - b.MassOf(y));
  return total / 2;
}

absl::StatusOr<double> TvSigma(const JointDist& a, const JointDist& b) {
  if (a.kind() != DistKind::kEmpirical || b.kind() != DistKind::kEmpirical ||
      a.trials() == 0 || b.trials() == 0) {
    return absl::InvalidArgumentError("TV sigma needs empirical tables");
  }
  double total = 0;
  for (const JointOutcome& key : KeyUnion(a, b)) {
    const double pa = ToDouble(a.Mass(key));
    const double pb = ToDouble(b.Mass(key));
    total += std::sqrt(pa * (1 - pa) / static_cast<double>(a.trials()) +
                       pb * (1 - pb) / static_cast<double>(b.trials()));
  }
  return total / 2;
}

// --- Accuracy ---

AccuracyProfile ProfileFromErrors(uint64_t n, std::vector<int64_t> errors,
                                  const std::vector<double>& levels) {
  AccuracyProfile profile;
  profile.n = n;
  for (int64_t& e : errors) e = e < 0 ? -e : e;
  std::sort(errors.begin(), errors.end());
  for (double level : levels) {
    if (errors.empty()) {
      profile.quantiles[level] = 0;
      continue;
    }
    const double pos = std::ceil(level * static_cast<double>(errors.size()));
    const size_t index = static_cast<size_t>(
        std::clamp(pos, 1.0, static_cast<double>(errors.size()))) - 1;
    profile.quantiles[level] = static_cast<double>(errors[index]);
  }
  return profile;
}

double FittedC(uint64_t n, double quantile, double eps) {
  return quantile * eps / std::log(static_cast<double>(n));
}

absl::StatusOr<Real> LaplaceSumErrorTail(uint64_t n, int64_t value,
                                         int64_t delta,
                                         const LaplaceSumConfig& cfg,
                                         uint64_t t) {
  absl::StatusOr<LaplaceSumSetup> setup =
      SetupLaplaceSum(n, value, delta, cfg);
  if (!setup.ok()) return setup.status();
  // Once 2 raw >= n and delta * 2 raw >= truth + t, neither truncation nor the
  // upper censoring point affects the event, so the tail conditional on raw is
  // constant from there on.
  const uint64_t reach =
      (static_cast<uint64_t>(setup->truth) + t + 2 * delta - 1) /
      (2 * static_cast<uint64_t>(delta));
  const uint64_t r0 = std::max((n + 1) / 2, reach);
  const AdaptiveCountParams params{n, setup->plan.count.c, setup->plan.count.k};
  const std::vector<Real> prefix = AdaptiveCountPrefixReal(params, r0);
  Real total = 0;
  Real alive = 1;
  for (uint64_t raw = 0; raw < r0; ++raw) {
    total += prefix[raw] * ErrorTailGivenCount(n, value, delta, *setup, raw, t);
    alive -= prefix[raw];
  }
  total += alive * ErrorTailGivenCount(n, value, delta, *setup, r0, t);
  return total;
}

absl::StatusOr<uint64_t> LaplaceSumErrorQuantile(uint64_t n, int64_t value,
                                                 int64_t delta,
                                                 const LaplaceSumConfig& cfg,
                                                 const Real& level) {
  if (!(level > 0 && level < 1)) {
    return absl::InvalidArgumentError("level must lie in (0, 1)");
  }
  const Real allowed = 1 - level;
  // P(|err| > t) = tail(t + 1); find the smallest t with tail(t + 1) <= allowed.
  auto fits = [&](uint64_t t) -> absl::StatusOr<bool> {
    absl::StatusOr<Real> tail = LaplaceSumErrorTail(n, value, delta, cfg, t + 1);
    if (!tail.ok()) return tail.status();
    return *tail <= allowed;
  };
  uint64_t hi = 1;
  while (true) {
    absl::StatusOr<bool> ok = fits(hi);
    if (!ok.ok()) return ok.status();
    if (*ok) break;
    if (hi > (uint64_t{1} << 40)) {
      return absl::OutOfRangeError("error quantile search diverged");
    }
    hi *= 2;
  }
  uint64_t lo = 0;
  while (lo < hi) {
    const uint64_t mid = lo + (hi - lo) / 2;
    absl::StatusOr<bool> ok = fits(mid);
    if (!ok.ok()) return ok.status();
    if (*ok) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

absl::StatusOr<Real> LaplaceSumTruncationMass(uint64_t n,
                                              const LaplaceSumConfig& cfg) {
  absl::StatusOr<LaplaceSumPlan> plan = PlanLaplaceSum(cfg);
  if (!plan.ok()) return plan.status();
  const std::vector<Real> prefix = AdaptiveCountPrefixReal(
      {n, plan->count.c, plan->count.k}, (n + 1) / 2);
  Real total = 0;
  for (const Real& f : prefix) total += f;
  return total;
}

// --- Support demo ---

absl::StatusOr<SupportDemoReport> SupportDemo(const AdaptiveCountParams& base,
                                              uint64_t budget,
                                              const std::vector<uint64_t>& ns,
                                              uint64_t trials,
                                              uint64_t seed_base,
                                              unsigned workers) {
  if (absl::Status s = Validate(base); !s.ok()) return s;
  const AdaptiveCountCost cost = AdaptiveCountCostSchedule(base.c);
  SupportDemoReport report;
  report.budget = budget;
  if (budget >= cost.fixed + cost.per_flip) {
    report.max_output =
        static_cast<int64_t>((budget - cost.fixed) / cost.per_flip) - 1;
  }
  std::optional<std::vector<int64_t>> first_support;
  for (size_t idx = 0; idx < ns.size(); ++idx) {
    SupportDemoEntry entry;
    entry.n = ns[idx];
    entry.trials = trials;
    const AdaptiveCountParams params{ns[idx], base.c, base.k};
    for (int64_t i = 0; i <= report.max_output; ++i) {
      const Rational f = AdaptiveCountPmf(params, static_cast<uint64_t>(i));
      if (f > 0) entry.exact_support.push_back(i);
      entry.exact_probability += ToReal(f);
    }
    if (!first_support) first_support = entry.exact_support;
    if (*first_support != entry.exact_support) {
      report.exact_supports_equal = false;
    }
    if (trials > 0) {
      absl::StatusOr<JointDist> joint = MonteCarloJoint(
          [&](RandomSource& source) -> absl::StatusOr<JointOutcome> {
            CostMeter meter(CostPolicy::kRamSteps);
            absl::StatusOr<uint64_t> out =
                SampleAdaptiveCount(params, source, meter);
            if (!out.ok()) return out.status();
            return JointOutcome{static_cast<int64_t>(*out), meter.steps()};
          },
          trials, DeriveSeed(seed_base, idx), workers);
      if (!joint.ok()) return joint.status();
      for (const auto& [key, count] : joint->counts()) {
        if (key.runtime > budget) continue;
        entry.fast_runs += count;
        entry.observed.push_back(key.output);
        if (!std::binary_search(entry.exact_support.begin(),
                                entry.exact_support.end(), key.output)) {
          report.observed_within_exact = false;
        }
      }
      std::sort(entry.observed.begin(), entry.observed.end());
      entry.empirical_probability = static_cast<double>(entry.fast_runs) /
                                    static_cast<double>(trials);
      const double p = ToDouble(entry.exact_probability);
      entry.sigma = std::sqrt(p * (1 - p) / static_cast<double>(trials));
    }
    report.entries.push_back(std::move(entry));
  }
  return report;
}

}  // namespace jotdp
