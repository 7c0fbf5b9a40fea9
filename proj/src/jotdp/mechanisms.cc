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

#include "jotdp/mechanisms.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "jotdp/samplers.h"

namespace jotdp {
namespace {

constexpr double kStopResidual = 1e-12;

absl::Status CheckPositiveFinite(double value, const char* what) {
  if (!(value > 0) || !std::isfinite(value)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("%s must be positive and finite, got %g", what, value));
  }
  return absl::OkStatus();
}

absl::Status CheckInnerInput(std::span<const int64_t> records, uint64_t bound,
                             int64_t delta) {
  if (records.size() > bound) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "inner mechanism got %d records with bound %d", records.size(),
        bound));
  }
  for (int64_t r : records) {
    if (r < 0 || r > delta) {
      return absl::InvalidArgumentError(
          absl::StrFormat("record %d outside [0, %d]", r, delta));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<int64_t> ScaledBound(int64_t delta, uint64_t bound) {
  if (bound > static_cast<uint64_t>(std::numeric_limits<int64_t>::max() /
                                    std::max<int64_t>(delta, 1))) {
    return absl::OutOfRangeError(
        absl::StrFormat("delta * bound overflows for bound %d", bound));
  }
  return delta * static_cast<int64_t>(bound);
}

int64_t SumOf(std::span<const int64_t> records) {
  return std::accumulate(records.begin(), records.end(), int64_t{0});
}

absl::Status CheckPolicies(const CostMeter& meter,
                           const UpperBoundedMechanism& inner,
                           CostPolicy wanted) {
  if (meter.policy() != wanted || inner.policy() != wanted) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "wrapper needs a %s meter and inner mechanism; got meter %s, inner %s",
        std::string(CostPolicyName(wanted)),
        std::string(CostPolicyName(meter.policy())),
        std::string(CostPolicyName(inner.policy()))));
  }
  return absl::OkStatus();
}

CensoredDLParams Program1Draw(uint64_t n, const ScheduleRow& row) {
  return CensoredDLParams{
      .mu = static_cast<int64_t>(std::min(n, row.m)),
      .scale = 1.0 / row.eps,
      .lo = 0,
      .hi = static_cast<int64_t>(row.m),
  };
}

// Largest y with 2y < m.
int64_t HaltThreshold(uint64_t m) { return static_cast<int64_t>((m - 1) / 2); }

bool Halts(int64_t n_hat, uint64_t m) {
  return 2 * static_cast<uint64_t>(n_hat) < m;
}

template <typename DrawFn>
absl::StatusOr<Program1Stop> Program1Loop(const Program1Config& cfg,
                                          CostMeter& meter, DrawFn draw) {
  if (absl::Status s = Validate(cfg); !s.ok()) return s;
  for (uint32_t i = 1; i <= cfg.max_iter; ++i) {
    absl::StatusOr<ScheduleRow> row = ScheduleRowAt(cfg, i);
    if (!row.ok()) return row.status();
    meter.Charge(row->m);  // padded scan of x up to m_i records
    absl::StatusOr<int64_t> n_hat = draw(*row);
    if (!n_hat.ok()) return n_hat.status();
    meter.Charge(kProgram1IterationOverhead);
    if (Halts(*n_hat, row->m)) return Program1Stop{i, row->m};
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "bound estimation did not halt within %d iterations", cfg.max_iter));
}

absl::StatusOr<MechanismResult> FinishWrapper(const Dataset& x,
                                              uint64_t bound,
                                              const UpperBoundedMechanism& inner,
                                              RandomSource& source,
                                              CostMeter& meter) {
  const Dataset truncated = Truncate(x, bound, meter);
  absl::StatusOr<int64_t> out =
      inner.Run(truncated.view(), bound, source, meter);
  if (!out.ok()) return out.status();
  meter.Charge(kWrapperReturnCost);
  MechanismResult result;
  result.outcome = {*out, meter.steps()};
  result.bound = bound;
  result.truncated = bound < x.size();
  result.seed = source.seed();
  return result;
}

}  // namespace

absl::StatusOr<Dataset> Dataset::Create(std::vector<int64_t> records,
                                        int64_t delta) {
  if (delta < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("record bound must be >= 1, got %d", delta));
  }
  if (absl::Status s = CheckInnerInput(records, records.size(), delta);
      !s.ok()) {
    return s;
  }
  Dataset x;
  x.records_ = std::move(records);
  x.delta_ = delta;
  return x;
}

absl::StatusOr<Dataset> Dataset::Constant(int64_t value, uint64_t n,
                                          int64_t delta) {
  return Create(std::vector<int64_t>(n, value), delta);
}

Dataset Truncate(const Dataset& x, uint64_t m, CostMeter& meter) {
  meter.Charge(m);
  const size_t keep = static_cast<size_t>(std::min<uint64_t>(x.size(), m));
  // Records were validated when x was built.
  return *Dataset::Create(
      std::vector<int64_t>(x.records().begin(), x.records().begin() + keep),
      x.delta());
}

// --- CdlSumMechanism ---

absl::StatusOr<std::unique_ptr<CdlSumMechanism>> CdlSumMechanism::Create(
    double eps, int64_t delta) {
  if (absl::Status s = CheckPositiveFinite(eps, "eps"); !s.ok()) return s;
  if (delta < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("record bound must be >= 1, got %d", delta));
  }
  return std::unique_ptr<CdlSumMechanism>(new CdlSumMechanism(eps, delta));
}

absl::StatusOr<uint64_t> CdlSumMechanism::Cost(uint64_t bound) const {
  absl::StatusOr<int64_t> hi = ScaledBound(delta_, bound);
  if (!hi.ok()) return hi.status();
  return bound + CensoredDLCost(0, *hi) + 1;
}

absl::StatusOr<int64_t> CdlSumMechanism::Run(std::span<const int64_t> records,
                                             uint64_t bound,
                                             RandomSource& source,
                                             CostMeter& meter) const {
  if (absl::Status s = CheckInnerInput(records, bound, delta_); !s.ok()) {
    return s;
  }
  absl::StatusOr<int64_t> hi = ScaledBound(delta_, bound);
  if (!hi.ok()) return hi.status();
  meter.Charge(bound);  // sum over a scan padded to `bound` records
  const CensoredDLParams params{SumOf(records), scale(), 0, *hi};
  absl::StatusOr<int64_t> out = SampleCensoredDL(params, source, meter);
  meter.Charge(1);
  return out;
}

absl::StatusOr<Pmf> CdlSumMechanism::OutputPmf(
    std::span<const int64_t> records, uint64_t bound) const {
  if (absl::Status s = CheckInnerInput(records, bound, delta_); !s.ok()) {
    return s;
  }
  absl::StatusOr<int64_t> hi = ScaledBound(delta_, bound);
  if (!hi.ok()) return hi.status();
  return CensoredDLPmf({SumOf(records), scale(), 0, *hi});
}

int64_t CdlSumMechanism::Truth(std::span<const int64_t> records) const {
  return SumOf(records);
}

// --- CdlCountMechanism ---

absl::StatusOr<std::unique_ptr<CdlCountMechanism>> CdlCountMechanism::Create(
    double eps) {
  if (absl::Status s = CheckPositiveFinite(eps, "eps"); !s.ok()) return s;
  return std::unique_ptr<CdlCountMechanism>(new CdlCountMechanism(eps));
}

absl::StatusOr<uint64_t> CdlCountMechanism::Cost(uint64_t bound) const {
  absl::StatusOr<int64_t> hi = ScaledBound(1, bound);
  if (!hi.ok()) return hi.status();
  return bound + CensoredDLCost(0, *hi) + 1;
}

absl::StatusOr<int64_t> CdlCountMechanism::Run(
    std::span<const int64_t> records, uint64_t bound, RandomSource& source,
    CostMeter& meter) const {
  if (records.size() > bound) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "inner mechanism got %d records with bound %d", records.size(),
        bound));
  }
  absl::StatusOr<int64_t> hi = ScaledBound(1, bound);
  if (!hi.ok()) return hi.status();
  meter.Charge(bound);
  const CensoredDLParams params{static_cast<int64_t>(records.size()),
                                1.0 / eps_, 0, *hi};
  absl::StatusOr<int64_t> out = SampleCensoredDL(params, source, meter);
  meter.Charge(1);
  return out;
}

absl::StatusOr<Pmf> CdlCountMechanism::OutputPmf(
    std::span<const int64_t> records, uint64_t bound) const {
  if (records.size() > bound) {
    return absl::InvalidArgumentError("record count exceeds bound");
  }
  absl::StatusOr<int64_t> hi = ScaledBound(1, bound);
  if (!hi.ok()) return hi.status();
  return CensoredDLPmf(
      {static_cast<int64_t>(records.size()), 1.0 / eps_, 0, *hi});
}

int64_t CdlCountMechanism::Truth(std::span<const int64_t> records) const {
  return static_cast<int64_t>(records.size());
}

// --- DsgSumMechanism ---

absl::StatusOr<Dyadic> DyadicForEpsilon(double eps) {
  if (absl::Status s = CheckPositiveFinite(eps, "eps"); !s.ok()) return s;
  const Real x = -boost::multiprecision::expm1(Real(-eps));
  for (uint32_t kbits = 1; kbits + 2 <= 62; ++kbits) {
    if (DyadicRoundDown(x, kbits).numerator != 0) {
      return DyadicRoundDown(x, kbits + 2);
    }
  }
  return absl::OutOfRangeError(
      absl::StrFormat("eps=%g too small for a 62-bit dyadic bias", eps));
}

absl::StatusOr<std::unique_ptr<DsgSumMechanism>> DsgSumMechanism::Create(
    double eps, int64_t delta) {
  if (absl::Status s = CheckPositiveFinite(eps, "eps"); !s.ok()) return s;
  if (delta < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("record bound must be >= 1, got %d", delta));
  }
  absl::StatusOr<Dyadic> p = DyadicForEpsilon(eps / static_cast<double>(delta));
  if (!p.ok()) return p.status();
  return std::unique_ptr<DsgSumMechanism>(
      new DsgSumMechanism(eps, delta, *p));
}

absl::StatusOr<uint64_t> DsgSumMechanism::Cost(uint64_t bound) const {
  absl::StatusOr<int64_t> hi = ScaledBound(delta_, bound);
  if (!hi.ok()) return hi.status();
  return 1 + static_cast<uint64_t>(p_.kbits) * (static_cast<uint64_t>(*hi) + 1);
}

absl::StatusOr<int64_t> DsgSumMechanism::Run(std::span<const int64_t> records,
                                             uint64_t bound,
                                             RandomSource& source,
                                             CostMeter& meter) const {
  if (absl::Status s = CheckInnerInput(records, bound, delta_); !s.ok()) {
    return s;
  }
  if (meter.policy() != CostPolicy::kCoinTossesOnly) {
    return absl::FailedPreconditionError("dsg-sum is priced in coin tosses");
  }
  absl::StatusOr<int64_t> hi = ScaledBound(delta_, bound);
  if (!hi.ok()) return hi.status();
  meter.Charge(bound);
  const DsgParams params{SumOf(records), p_, 0, *hi,
                         static_cast<uint64_t>(*hi)};
  absl::StatusOr<int64_t> out = SampleDsg(params, source, meter);
  meter.Charge(1);
  return out;
}

absl::StatusOr<Pmf> DsgSumMechanism::OutputPmf(
    std::span<const int64_t> records, uint64_t bound) const {
  if (absl::Status s = CheckInnerInput(records, bound, delta_); !s.ok()) {
    return s;
  }
  absl::StatusOr<int64_t> hi = ScaledBound(delta_, bound);
  if (!hi.ok()) return hi.status();
  return DsgPmf({SumOf(records), p_, 0, *hi, static_cast<uint64_t>(*hi)});
}

int64_t DsgSumMechanism::Truth(std::span<const int64_t> records) const {
  return SumOf(records);
}

// --- Program 1 ---

absl::Status Validate(const Program1Config& cfg) {
  if (absl::Status s = CheckPositiveFinite(cfg.eps_prime, "eps_prime");
      !s.ok()) {
    return s;
  }
  if (!(cfg.beta > 0 && cfg.beta < 1)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("beta must lie in (0, 1), got %g", cfg.beta));
  }
  if (cfg.max_iter < 1) {
    return absl::InvalidArgumentError("max_iter must be >= 1");
  }
  return absl::OkStatus();
}

absl::StatusOr<ScheduleRow> ScheduleRowAt(const Program1Config& cfg,
                                          uint32_t i) {
  if (absl::Status s = Validate(cfg); !s.ok()) return s;
  if (i < 1 || i > 1000) {
    return absl::InvalidArgumentError(
        absl::StrFormat("schedule row %d out of range", i));
  }
  ScheduleRow row;
  row.i = i;
  row.eps = std::ldexp(cfg.eps_prime, -static_cast<int>(i));
  row.beta = std::ldexp(cfg.beta, -static_cast<int>(i));
  row.eps_sum = cfg.eps_prime - row.eps;  // eps' (1 - 2^-i), exact in binary
  // Evaluate in extended precision so ceil() is not thrown off by rounding
  // near integers.
  const Real log_term = ceil(log(1 / Real(row.beta)));
  const Real m = ceil(2 / Real(row.eps) * log_term);
  if (m >= ldexp(Real(1), 63)) {
    return absl::OutOfRangeError(
        absl::StrFormat("m_%d exceeds 2^63 for eps'=%g beta=%g", i,
                        cfg.eps_prime, cfg.beta));
  }
  row.m = m.convert_to<uint64_t>();
  return row;
}

absl::StatusOr<std::vector<ScheduleRow>> IterationSchedule(
    const Program1Config& cfg, uint32_t rows) {
  std::vector<ScheduleRow> out;
  for (uint32_t i = 1; i <= rows; ++i) {
    absl::StatusOr<ScheduleRow> row = ScheduleRowAt(cfg, i);
    if (!row.ok()) return row.status();
    out.push_back(*row);
  }
  return out;
}

absl::StatusOr<Program1Stop> SampleProgram1Stop(uint64_t n,
                                                const Program1Config& cfg,
                                                RandomSource& source,
                                                CostMeter& meter) {
  return Program1Loop(cfg, meter, [&](const ScheduleRow& row) {
    return SampleCensoredDL(Program1Draw(n, row), source, meter);
  });
}

absl::StatusOr<DsgParams> Program1BddntDraw(uint64_t n,
                                            const Program1Config& cfg,
                                            uint32_t i) {
  absl::StatusOr<ScheduleRow> row = ScheduleRowAt(cfg, i);
  if (!row.ok()) return row.status();
  absl::StatusOr<Dyadic> p = DyadicForEpsilon(row->eps);
  if (!p.ok()) return p.status();
  return DsgParams{static_cast<int64_t>(std::min(n, row->m)), *p, 0,
                   static_cast<int64_t>(row->m), row->m};
}

absl::StatusOr<Program1Stop> SampleProgram1BddntStop(uint64_t n,
                                                     const Program1Config& cfg,
                                                     RandomSource& source,
                                                     CostMeter& meter) {
  return Program1Loop(
      cfg, meter, [&](const ScheduleRow& row) -> absl::StatusOr<int64_t> {
        absl::StatusOr<DsgParams> draw = Program1BddntDraw(n, cfg, row.i);
        if (!draw.ok()) return draw.status();
        return SampleDsg(*draw, source, meter);
      });
}

absl::StatusOr<MechanismResult> RunProgram1(const Dataset& x,
                                            const Program1Config& cfg,
                                            const UpperBoundedMechanism& inner,
                                            RandomSource& source,
                                            CostMeter& meter) {
  if (absl::Status s = CheckPolicies(meter, inner, CostPolicy::kRamSteps);
      !s.ok()) {
    return s;
  }
  absl::StatusOr<Program1Stop> stop =
      SampleProgram1Stop(x.size(), cfg, source, meter);
  if (!stop.ok()) return stop.status();
  absl::StatusOr<MechanismResult> result =
      FinishWrapper(x, stop->bound, inner, source, meter);
  if (result.ok()) result->iterations = stop->iterations;
  return result;
}

absl::StatusOr<MechanismResult> RunProgram1Bddnt(
    const Dataset& x, const Program1Config& cfg,
    const UpperBoundedMechanism& inner, RandomSource& source,
    CostMeter& meter) {
  if (absl::Status s =
          CheckPolicies(meter, inner, CostPolicy::kCoinTossesOnly);
      !s.ok()) {
    return s;
  }
  absl::StatusOr<Program1Stop> stop =
      SampleProgram1BddntStop(x.size(), cfg, source, meter);
  if (!stop.ok()) return stop.status();
  absl::StatusOr<MechanismResult> result =
      FinishWrapper(x, stop->bound, inner, source, meter);
  if (result.ok()) result->iterations = stop->iterations;
  return result;
}

absl::StatusOr<uint64_t> Program1Runtime(const Program1Config& cfg,
                                         uint32_t iterations,
                                         const UpperBoundedMechanism& inner) {
  uint64_t total = 0;
  uint64_t m = 0;
  for (uint32_t i = 1; i <= iterations; ++i) {
    absl::StatusOr<ScheduleRow> row = ScheduleRowAt(cfg, i);
    if (!row.ok()) return row.status();
    m = row->m;
    total += m + CensoredDLCost(0, static_cast<int64_t>(m)) +
             kProgram1IterationOverhead;
  }
  absl::StatusOr<uint64_t> inner_cost = inner.Cost(m);
  if (!inner_cost.ok()) return inner_cost.status();
  return total + m + *inner_cost + kWrapperReturnCost;
}

absl::StatusOr<uint64_t> Program1BddntCoins(const Program1Config& cfg,
                                            uint32_t iterations,
                                            const UpperBoundedMechanism& inner) {
  uint64_t total = 0;
  uint64_t m = 0;
  for (uint32_t i = 1; i <= iterations; ++i) {
    // The draw's coin count does not depend on n; use n = 0.
    absl::StatusOr<DsgParams> draw = Program1BddntDraw(0, cfg, i);
    if (!draw.ok()) return draw.status();
    m = static_cast<uint64_t>(draw->hi);
    total += DsgCoinCount(*draw);
  }
  absl::StatusOr<uint64_t> inner_cost = inner.Cost(m);
  if (!inner_cost.ok()) return inner_cost.status();
  return total + *inner_cost;
}

absl::StatusOr<Real> Program1HaltProbability(uint64_t n,
                                             const Program1Config& cfg,
                                             uint32_t i) {
  absl::StatusOr<ScheduleRow> row = ScheduleRowAt(cfg, i);
  if (!row.ok()) return row.status();
  const CensoredDLParams draw = Program1Draw(n, *row);
  // Mass of [lo, y*] in the censored law equals the uncensored CDF at y*
  // because y* < hi.
  return DiscreteLaplaceCdf(HaltThreshold(row->m), {draw.mu, draw.scale});
}

absl::StatusOr<Rational> Program1BddntHaltProbability(uint64_t n,
                                                      const Program1Config& cfg,
                                                      uint32_t i) {
  absl::StatusOr<DsgParams> draw = Program1BddntDraw(n, cfg, i);
  if (!draw.ok()) return draw.status();
  absl::StatusOr<Pmf> pmf = DsgPmf(*draw);
  if (!pmf.ok()) return pmf.status();
  const int64_t threshold = HaltThreshold(static_cast<uint64_t>(draw->hi));
  Rational total = 0;
  for (size_t j = 0; j < pmf->size(); ++j) {
    if (pmf->outcome(j) <= threshold) total += pmf->exact_mass(j);
  }
  return total;
}

absl::StatusOr<Pmf> Program1StopDistribution(uint64_t n,
                                             const Program1Config& cfg) {
  if (absl::Status s = Validate(cfg); !s.ok()) return s;
  std::vector<int64_t> support;
  std::vector<Real> mass;
  Real alive = 1;
  for (uint32_t i = 1; i <= cfg.max_iter; ++i) {
    absl::StatusOr<Real> h = Program1HaltProbability(n, cfg, i);
    if (!h.ok()) return h.status();
    support.push_back(i);
    mass.push_back(alive * *h);
    alive *= 1 - *h;
    if (alive < kStopResidual) {
      return Pmf::FromReal(std::move(support), std::move(mass), alive);
    }
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "unhalted mass %g after %d iterations exceeds %g", ToDouble(alive),
      cfg.max_iter, kStopResidual));
}

// --- Program 3 ---

absl::StatusOr<MechanismResult> RunProgram3(const Dataset& x,
                                            const Program3Config& cfg,
                                            const UpperBoundedMechanism& inner,
                                            RandomSource& source,
                                            CostMeter& meter) {
  if (absl::Status s = CheckPolicies(meter, inner, CostPolicy::kRamSteps);
      !s.ok()) {
    return s;
  }
  absl::StatusOr<uint64_t> raw =
      SampleAdaptiveCount({x.size(), cfg.c, cfg.k}, source, meter);
  if (!raw.ok()) return raw.status();
  if (*raw > std::numeric_limits<uint64_t>::max() / 4) {
    return absl::OutOfRangeError("adaptive count estimate too large to double");
  }
  meter.Charge(1);  // n_hat = 2 * n_hat
  return FinishWrapper(x, 2 * *raw, inner, source, meter);
}

absl::StatusOr<uint64_t> Program3Runtime(const Program3Config& cfg,
                                         uint64_t raw_count,
                                         const UpperBoundedMechanism& inner) {
  if (absl::Status s = Validate(AdaptiveCountParams{0, cfg.c, cfg.k}); !s.ok()) {
    return s;
  }
  const uint64_t bound = 2 * raw_count;
  absl::StatusOr<uint64_t> inner_cost = inner.Cost(bound);
  if (!inner_cost.ok()) return inner_cost.status();
  return AdaptiveCountCostSchedule(cfg.c).Runtime(raw_count) + 1 + bound +
         *inner_cost + kWrapperReturnCost;
}

// --- Laplace sum ---

absl::StatusOr<LaplaceSumPlan> PlanLaplaceSum(const LaplaceSumConfig& cfg) {
  if (absl::Status s = CheckPositiveFinite(cfg.eps, "eps"); !s.ok()) return s;
  if (!(cfg.count_share > 0 && cfg.count_share < 1)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "count_share must lie in (0, 1), got %g", cfg.count_share));
  }
  if (cfg.c < 1) return absl::InvalidArgumentError("c must be >= 1");
  const uint32_t exponent =
      cfg.count_exponent == 0 ? cfg.c + 2 : cfg.count_exponent;
  if (exponent < 2) {
    return absl::InvalidArgumentError("count exponent must be >= 2");
  }
  LaplaceSumPlan plan;
  plan.eps1 = cfg.eps * cfg.count_share;
  plan.eps2 = cfg.eps - plan.eps1;
  absl::StatusOr<uint64_t> k = KForEpsilon(exponent, plan.eps1);
  if (!k.ok()) return k.status();
  plan.count = {exponent, *k};
  return plan;
}

absl::StatusOr<MechanismResult> RunLaplaceSum(const Dataset& x,
                                              const LaplaceSumConfig& cfg,
                                              RandomSource& source,
                                              CostMeter& meter) {
  absl::StatusOr<LaplaceSumPlan> plan = PlanLaplaceSum(cfg);
  if (!plan.ok()) return plan.status();
  absl::StatusOr<std::unique_ptr<CdlSumMechanism>> inner =
      CdlSumMechanism::Create(plan->eps2, x.delta());
  if (!inner.ok()) return inner.status();
  return RunProgram3(x, plan->count, **inner, source, meter);
}

}  // namespace jotdp
