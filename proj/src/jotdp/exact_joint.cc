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

#include "jotdp/exact_joint.h"

#include <algorithm>
#include <set>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "jotdp/samplers.h"

namespace jotdp {
namespace {

constexpr double kHorizonResidual = 1e-12;

std::span<const int64_t> Prefix(const Dataset& x, uint64_t m) {
  return x.view().first(static_cast<size_t>(std::min<uint64_t>(x.size(), m)));
}

absl::StatusOr<Real> HaltProbability(uint64_t n, const Program1Config& cfg,
                                     uint32_t i, bool bddnt) {
  if (!bddnt) return Program1HaltProbability(n, cfg, i);
  absl::StatusOr<Rational> h = Program1BddntHaltProbability(n, cfg, i);
  if (!h.ok()) return h.status();
  return ToReal(*h);
}

}  // namespace

absl::StatusOr<uint32_t> Program1Horizon(uint64_t n, const Program1Config& cfg,
                                         bool bddnt) {
  Real alive = 1;
  for (uint32_t i = 1; i <= cfg.max_iter; ++i) {
    absl::StatusOr<Real> h = HaltProbability(n, cfg, i, bddnt);
    if (!h.ok()) return h.status();
    alive *= 1 - *h;
    if (alive < kHorizonResidual) return i;
  }
  return absl::ResourceExhaustedError(absl::StrFormat(
      "unhalted mass %g after %d iterations", ToDouble(alive), cfg.max_iter));
}

absl::StatusOr<JointDist> AdaptiveCountJoint(const AdaptiveCountParams& params,
                                             uint64_t max_outcome) {
  absl::StatusOr<Pmf> table = AdaptiveCountTable(params, max_outcome);
  if (!table.ok()) return table.status();
  const AdaptiveCountCost cost = AdaptiveCountCostSchedule(params.c);
  JointDist joint = JointDist::Exact();
  for (size_t i = 0; i < table->size(); ++i) {
    joint.AddMass({table->outcome(i),
                   cost.Runtime(static_cast<uint64_t>(table->outcome(i)))},
                  table->mass(i));
  }
  joint.set_residual(table->residual());
  return joint;
}

absl::StatusOr<AdaptiveTailCheck> CheckAdaptiveCountTail(uint64_t n_a,
                                                         uint64_t n_b,
                                                         uint32_t c,
                                                         uint64_t k,
                                                         uint64_t last_listed) {
  const AdaptiveCountParams a{n_a, c, k}, b{n_b, c, k};
  if (absl::Status s = Validate(a); !s.ok()) return s;
  AdaptiveTailCheck check;
  const uint64_t y = last_listed + 1;
  check.ratio = AdaptiveCountSurvival(a, y) / AdaptiveCountSurvival(b, y);
  const Rational r1 = AdaptiveCountPmf(a, y) / AdaptiveCountPmf(b, y);
  const Rational r2 = AdaptiveCountPmf(a, y + 1) / AdaptiveCountPmf(b, y + 1);
  check.constant = std::max(n_a, n_b) <= last_listed && r1 == check.ratio &&
                   r2 == check.ratio;
  check.log_ratio = LogRational(check.ratio);
  return check;
}

absl::StatusOr<EpsilonReport> AdaptiveCountExactEpsilon(uint64_t n_a,
                                                        uint64_t n_b,
                                                        uint32_t c,
                                                        uint64_t k) {
  const uint64_t last = std::max(n_a, n_b) + 1;
  absl::StatusOr<JointDist> a = AdaptiveCountJoint({n_a, c, k}, last);
  if (!a.ok()) return a.status();
  absl::StatusOr<JointDist> b = AdaptiveCountJoint({n_b, c, k}, last);
  if (!b.ok()) return b.status();
  absl::StatusOr<AdaptiveTailCheck> tail =
      CheckAdaptiveCountTail(n_a, n_b, c, k, last);
  if (!tail.ok()) return tail.status();
  if (!tail->constant) {
    return absl::InternalError("adaptive count tail ratio is not constant");
  }
  return ExactEpsilon(*a, *b, TailBound{true, tail->log_ratio});
}

namespace {

// The samplers only accept centers inside [lo, hi]; the joints follow suit.
absl::Status ValidateSamplerCenter(const CensoredDLParams& params) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  if (params.mu < params.lo || params.mu > params.hi) {
    return absl::InvalidArgumentError("need lo <= mu <= hi");
  }
  return absl::OkStatus();
}

}  // namespace

absl::StatusOr<JointDist> CensoredDLJoint(const CensoredDLParams& params) {
  if (absl::Status s = ValidateSamplerCenter(params); !s.ok()) return s;
  absl::StatusOr<Pmf> pmf = CensoredDLPmf(params);
  if (!pmf.ok()) return pmf.status();
  return JointFromPmf(*pmf, CensoredDLCost(params.lo, params.hi));
}

absl::StatusOr<JointDist> LeakyCensoredDLJoint(const CensoredDLParams& params) {
  if (absl::Status s = ValidateSamplerCenter(params); !s.ok()) return s;
  absl::StatusOr<Pmf> pmf = CensoredDLPmf(params);
  if (!pmf.ok()) return pmf.status();
  return JointFromPmf(*pmf, LeakyCensoredDLCost(params.lo, params.mu));
}

absl::StatusOr<JointDist> DsgJoint(const DsgParams& params) {
  absl::StatusOr<Pmf> pmf = DsgPmf(params);
  if (!pmf.ok()) return pmf.status();
  return JointFromPmf(*pmf, DsgCoinCount(params));
}

absl::StatusOr<EpsilonReport> CensoredDLExactEpsilon(const CensoredDLParams& a,
                                                     const CensoredDLParams& b) {
  if (a.lo != b.lo || a.hi != b.hi || a.scale != b.scale) {
    return absl::InvalidArgumentError(
        "reduced CDL audit needs a common [lo, hi] and scale");
  }
  if (absl::Status s = ValidateSamplerCenter(a); !s.ok()) return s;
  if (absl::Status s = ValidateSamplerCenter(b); !s.ok()) return s;
  const int64_t from = std::max(a.lo, std::min(a.mu, b.mu) - 1);
  const int64_t to = std::min(a.hi, std::max(a.mu, b.mu) + 1);
  std::set<int64_t> keys = {a.lo, a.hi};
  for (int64_t y = from; y <= to; ++y) keys.insert(y);
  const uint64_t runtime = CensoredDLCost(a.lo, a.hi);
  JointDist ja = JointDist::Exact(), jb = JointDist::Exact();
  for (int64_t y : keys) {
    absl::StatusOr<Real> ma = CensoredDLMass(y, a);
    if (!ma.ok()) return ma.status();
    absl::StatusOr<Real> mb = CensoredDLMass(y, b);
    if (!mb.ok()) return mb.status();
    if (*ma > 0) ja.AddMass({y, runtime}, *ma);
    if (*mb > 0) jb.AddMass({y, runtime}, *mb);
  }
  // Unlisted outcomes share a ratio with a listed neighbour.
  return ExactEpsilon(ja, jb, TailBound{true, 0});
}

absl::StatusOr<JointDist> Program1Joint(const Dataset& x,
                                        const Program1Config& cfg,
                                        const UpperBoundedMechanism& inner,
                                        uint32_t iterations, bool bddnt) {
  if (absl::Status s = Validate(cfg); !s.ok()) return s;
  JointDist joint = JointDist::Exact();
  Real alive = 1;
  for (uint32_t k = 1; k <= iterations; ++k) {
    absl::StatusOr<ScheduleRow> row = ScheduleRowAt(cfg, k);
    if (!row.ok()) return row.status();
    absl::StatusOr<Real> h = HaltProbability(x.size(), cfg, k, bddnt);
    if (!h.ok()) return h.status();
    const Real stop = alive * *h;
    alive *= 1 - *h;
    absl::StatusOr<uint64_t> runtime =
        bddnt ? Program1BddntCoins(cfg, k, inner)
              : Program1Runtime(cfg, k, inner);
    if (!runtime.ok()) return runtime.status();
    absl::StatusOr<Pmf> inner_pmf = inner.OutputPmf(Prefix(x, row->m), row->m);
    if (!inner_pmf.ok()) return inner_pmf.status();
    for (size_t j = 0; j < inner_pmf->size(); ++j) {
      const Real mass = stop * inner_pmf->mass(j);
      if (mass > 0) joint.AddMass({inner_pmf->outcome(j), *runtime}, mass);
    }
  }
  joint.set_residual(alive);
  return joint;
}

absl::StatusOr<EpsilonReport> Program1ExactEpsilon(
    const Dataset& a, const Dataset& b, const Program1Config& cfg,
    const UpperBoundedMechanism& inner, bool bddnt) {
  if (absl::Status s = Validate(cfg); !s.ok()) return s;
  absl::StatusOr<uint32_t> ha = Program1Horizon(a.size(), cfg, bddnt);
  if (!ha.ok()) return ha.status();
  absl::StatusOr<uint32_t> hb = Program1Horizon(b.size(), cfg, bddnt);
  if (!hb.ok()) return hb.status();
  const uint32_t horizon = std::max(*ha, *hb);
  absl::StatusOr<JointDist> ja = Program1Joint(a, cfg, inner, horizon, bddnt);
  if (!ja.ok()) return ja.status();
  absl::StatusOr<JointDist> jb = Program1Joint(b, cfg, inner, horizon, bddnt);
  if (!jb.ok()) return jb.status();
  return ExactEpsilon(*ja, *jb);
}

absl::StatusOr<JointDist> Program3Joint(const Dataset& x,
                                        const Program3Config& cfg,
                                        const UpperBoundedMechanism& inner,
                                        uint64_t last_raw) {
  const AdaptiveCountParams params{x.size(), cfg.c, cfg.k};
  absl::StatusOr<Pmf> counts = AdaptiveCountTable(params, last_raw);
  if (!counts.ok()) return counts.status();
  JointDist joint = JointDist::Exact();
  for (size_t i = 0; i < counts->size(); ++i) {
    const uint64_t raw = static_cast<uint64_t>(counts->outcome(i));
    const uint64_t bound = 2 * raw;
    absl::StatusOr<uint64_t> runtime = Program3Runtime(cfg, raw, inner);
    if (!runtime.ok()) return runtime.status();
    absl::StatusOr<Pmf> inner_pmf = inner.OutputPmf(Prefix(x, bound), bound);
    if (!inner_pmf.ok()) return inner_pmf.status();
    for (size_t j = 0; j < inner_pmf->size(); ++j) {
      const Real mass = counts->mass(i) * inner_pmf->mass(j);
      if (mass > 0) joint.AddMass({inner_pmf->outcome(j), *runtime}, mass);
    }
  }
  joint.set_residual(counts->residual());
  return joint;
}

absl::StatusOr<EpsilonReport> Program3ExactEpsilon(
    const Dataset& a, const Dataset& b, const Program3Config& cfg,
    const UpperBoundedMechanism& inner) {
  const uint64_t last = std::max(a.size(), b.size()) + 2;
  absl::StatusOr<JointDist> ja = Program3Joint(a, cfg, inner, last);
  if (!ja.ok()) return ja.status();
  absl::StatusOr<JointDist> jb = Program3Joint(b, cfg, inner, last);
  if (!jb.ok()) return jb.status();
  absl::StatusOr<AdaptiveTailCheck> tail =
      CheckAdaptiveCountTail(a.size(), b.size(), cfg.c, cfg.k, last);
  if (!tail.ok()) return tail.status();
  if (!tail->constant) {
    return absl::InternalError("adaptive count tail ratio is not constant");
  }
  // Worst ratio in the last listed row stands in for every later row.
  absl::StatusOr<uint64_t> last_runtime = Program3Runtime(cfg, last, inner);
  if (!last_runtime.ok()) return last_runtime.status();
  Real row_worst = 0;
  for (const auto& [key, mass] : ja->exact_masses()) {
    if (key.runtime != *last_runtime) continue;
    const Real other = jb->Mass(key);
    if (other <= 0) continue;
    const Real ratio = abs(log(mass) - log(other));
    if (ratio > row_worst) row_worst = ratio;
  }
  return ExactEpsilon(*ja, *jb, TailBound{true, row_worst});
}

}  // namespace jotdp
