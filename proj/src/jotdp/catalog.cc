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

#include "jotdp/catalog.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "jotdp/exact_joint.h"
#include "jotdp/samplers.h"

namespace jotdp {
namespace {

constexpr std::array<std::pair<MechanismKind, std::string_view>, 8> kNames = {{
    {MechanismKind::kProgram1, "program1"},
    {MechanismKind::kProgram1Bddnt, "program1-bddnt"},
    {MechanismKind::kProgram2, "program2"},
    {MechanismKind::kProgram3, "program3"},
    {MechanismKind::kLaplaceSum, "laplace-sum"},
    {MechanismKind::kCdl, "cdl"},
    {MechanismKind::kLeakyCdl, "leaky-cdl"},
    {MechanismKind::kDsg, "dsg"},
}};

// Listing beyond |x| + 1 for unbounded adaptive-count tables.
constexpr uint64_t kMaxExtraOutcomes = 1024;

int64_t SumOf(const Dataset& x) {
  return std::accumulate(x.records().begin(), x.records().end(), int64_t{0});
}

std::string InnerName(const MechanismSpec& spec) {
  if (!spec.inner.empty()) return spec.inner;
  return spec.kind == MechanismKind::kProgram1Bddnt ? "dsg-sum" : "cdl-sum";
}

CensoredDLParams CdlFor(const MechanismSpec& spec, const Dataset& x) {
  return {SumOf(x), spec.scale, spec.lo, spec.hi};
}

DsgParams DsgFor(const MechanismSpec& spec, const Dataset& x) {
  const uint64_t clamp =
      spec.clamp != 0 ? spec.clamp : static_cast<uint64_t>(spec.hi - spec.lo);
  return {SumOf(x), spec.p, spec.lo, spec.hi, clamp};
}

Program1Config P1(const MechanismSpec& spec) {
  return {spec.eps_prime, spec.beta, spec.max_iter};
}

LaplaceSumConfig LaplaceFor(const MechanismSpec& spec) {
  return {spec.eps, spec.c, spec.count_share, spec.count_exponent};
}

absl::StatusOr<JointOutcome> RunOnce(const MechanismSpec& spec,
                                     const Dataset& x, RandomSource& source,
                                     MechanismResult* details) {
  CostMeter meter(PolicyFor(spec));
  absl::StatusOr<int64_t> out;
  switch (spec.kind) {
    case MechanismKind::kProgram2: {
      absl::StatusOr<uint64_t> count =
          SampleAdaptiveCount({x.size(), spec.c, spec.k}, source, meter);
      if (!count.ok()) return count.status();
      out = static_cast<int64_t>(*count);
      break;
    }
    case MechanismKind::kCdl:
      out = SampleCensoredDL(CdlFor(spec, x), source, meter);
      break;
    case MechanismKind::kLeakyCdl:
      out = SampleLeakyCensoredDL(CdlFor(spec, x), source, meter);
      break;
    case MechanismKind::kDsg:
      out = SampleDsg(DsgFor(spec, x), source, meter);
      break;
    case MechanismKind::kProgram1:
    case MechanismKind::kProgram1Bddnt:
    case MechanismKind::kProgram3:
    case MechanismKind::kLaplaceSum: {
      absl::StatusOr<MechanismResult> result;
      if (spec.kind == MechanismKind::kLaplaceSum) {
        result = RunLaplaceSum(x, LaplaceFor(spec), source, meter);
      } else {
        absl::StatusOr<std::unique_ptr<UpperBoundedMechanism>> inner =
            MakeInner(spec, x.delta());
        if (!inner.ok()) return inner.status();
        if (spec.kind == MechanismKind::kProgram1) {
          result = RunProgram1(x, P1(spec), **inner, source, meter);
        } else if (spec.kind == MechanismKind::kProgram1Bddnt) {
          result = RunProgram1Bddnt(x, P1(spec), **inner, source, meter);
        } else {
          result = RunProgram3(x, {spec.c, spec.k}, **inner, source, meter);
        }
      }
      if (!result.ok()) return result.status();
      if (details != nullptr) *details = *result;
      return result->outcome;
    }
  }
  if (!out.ok()) return out.status();
  const JointOutcome outcome{*out, meter.steps()};
  if (details != nullptr) {
    details->outcome = outcome;
    details->seed = source.seed();
  }
  return outcome;
}

absl::StatusOr<EpsilonReport> AuditJoints(const absl::StatusOr<JointDist>& a,
                                          const absl::StatusOr<JointDist>& b,
                                          bool output_only,
                                          const TailBound& tail = {}) {
  if (!a.ok()) return a.status();
  if (!b.ok()) return b.status();
  if (output_only) {
    return ExactEpsilon(a->OutputMarginal(), b->OutputMarginal(), tail);
  }
  return ExactEpsilon(*a, *b, tail);
}

}  // namespace

std::string_view MechanismKindName(MechanismKind kind) {
  for (const auto& [k, name] : kNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

absl::StatusOr<MechanismKind> ParseMechanismKind(std::string_view name) {
  for (const auto& [k, n] : kNames) {
    if (n == name) return k;
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown mechanism '%s'", std::string(name)));
}

absl::Status Validate(const MechanismSpec& spec) {
  switch (spec.kind) {
    case MechanismKind::kProgram1:
    case MechanismKind::kProgram1Bddnt: {
      if (absl::Status s = Validate(P1(spec)); !s.ok()) return s;
      return MakeInner(spec, 1).status();
    }
    case MechanismKind::kProgram2:
      return Validate(AdaptiveCountParams{0, spec.c, spec.k});
    case MechanismKind::kProgram3: {
      if (absl::Status s = Validate(AdaptiveCountParams{0, spec.c, spec.k});
          !s.ok()) {
        return s;
      }
      return MakeInner(spec, 1).status();
    }
    case MechanismKind::kLaplaceSum:
      return PlanLaplaceSum(LaplaceFor(spec)).status();
    case MechanismKind::kCdl:
    case MechanismKind::kLeakyCdl:
      return Validate(CensoredDLParams{spec.lo, spec.scale, spec.lo, spec.hi});
    case MechanismKind::kDsg: {
      if (spec.lo > spec.hi) {
        return absl::InvalidArgumentError("dsg needs lo <= hi");
      }
      Dataset empty;
      DsgParams probe = DsgFor(spec, empty);
      probe.mu = spec.lo;
      return Validate(probe);
    }
  }
  return absl::InvalidArgumentError("unknown mechanism kind");
}

CostPolicy PolicyFor(const MechanismSpec& spec) {
  return spec.kind == MechanismKind::kProgram1Bddnt ||
                 spec.kind == MechanismKind::kDsg
             ? CostPolicy::kCoinTossesOnly
             : CostPolicy::kRamSteps;
}

absl::StatusOr<std::unique_ptr<UpperBoundedMechanism>> MakeInner(
    const MechanismSpec& spec, int64_t delta) {
  const std::string name = InnerName(spec);
  if (name == "cdl-sum") {
    absl::StatusOr<std::unique_ptr<CdlSumMechanism>> m =
        CdlSumMechanism::Create(spec.inner_eps, delta);
    if (!m.ok()) return m.status();
    return std::unique_ptr<UpperBoundedMechanism>(std::move(*m));
  }
  if (name == "cdl-count") {
    absl::StatusOr<std::unique_ptr<CdlCountMechanism>> m =
        CdlCountMechanism::Create(spec.inner_eps);
    if (!m.ok()) return m.status();
    return std::unique_ptr<UpperBoundedMechanism>(std::move(*m));
  }
  if (name == "dsg-sum") {
    absl::StatusOr<std::unique_ptr<DsgSumMechanism>> m =
        DsgSumMechanism::Create(spec.inner_eps, delta);
    if (!m.ok()) return m.status();
    return std::unique_ptr<UpperBoundedMechanism>(std::move(*m));
  }
  return absl::InvalidArgumentError(
      absl::StrFormat("unknown inner mechanism '%s'", name));
}

absl::StatusOr<double> DeclaredEpsilon(const MechanismSpec& spec,
                                       int64_t delta) {
  if (absl::Status s = Validate(spec); !s.ok()) return s;
  const double d = static_cast<double>(delta);
  switch (spec.kind) {
    case MechanismKind::kProgram1:
    case MechanismKind::kProgram1Bddnt:
      return spec.eps_prime + spec.inner_eps;
    case MechanismKind::kProgram2:
      return AdaptiveCountEpsilon(spec.c, spec.k);
    case MechanismKind::kProgram3: {
      absl::StatusOr<double> count = AdaptiveCountEpsilon(spec.c, spec.k);
      if (!count.ok()) return count.status();
      return *count + spec.inner_eps;
    }
    case MechanismKind::kLaplaceSum:
      return spec.eps;
    case MechanismKind::kCdl:
    case MechanismKind::kLeakyCdl:
      return d / spec.scale;
    case MechanismKind::kDsg:
      return d * -std::log1p(-spec.p.ToDouble());
  }
  return absl::InvalidArgumentError("unknown mechanism kind");
}

absl::StatusOr<MechanismResult> RunMechanism(const MechanismSpec& spec,
                                             const Dataset& x, uint64_t seed) {
  if (absl::Status s = Validate(spec); !s.ok()) return s;
  RandomSource source(seed);
  MechanismResult result;
  absl::StatusOr<JointOutcome> outcome = RunOnce(spec, x, source, &result);
  if (!outcome.ok()) return outcome.status();
  result.seed = seed;
  return result;
}

TrialFn MakeTrial(const MechanismSpec& spec, const Dataset& x) {
  return [spec, x](RandomSource& source) {
    return RunOnce(spec, x, source, nullptr);
  };
}

absl::StatusOr<JointDist> ExactJointFor(const MechanismSpec& spec,
                                        const Dataset& x) {
  if (absl::Status s = Validate(spec); !s.ok()) return s;
  switch (spec.kind) {
    case MechanismKind::kProgram2: {
      const AdaptiveCountParams params{x.size(), spec.c, spec.k};
      // Past n every flip has bias 1/k^c; list until the tail is negligible
      // or the cap is reached.
      const double q = std::pow(static_cast<double>(spec.k),
                                -static_cast<double>(spec.c));
      const double needed = std::ceil(std::log(1e-13) / std::log1p(-q));
      const uint64_t extra = static_cast<uint64_t>(
          std::min<double>(needed, static_cast<double>(kMaxExtraOutcomes)));
      return AdaptiveCountJoint(params, x.size() + 1 + extra);
    }
    case MechanismKind::kCdl:
      return CensoredDLJoint(CdlFor(spec, x));
    case MechanismKind::kLeakyCdl:
      return LeakyCensoredDLJoint(CdlFor(spec, x));
    case MechanismKind::kDsg:
      return DsgJoint(DsgFor(spec, x));
    case MechanismKind::kProgram1:
    case MechanismKind::kProgram1Bddnt: {
      absl::StatusOr<std::unique_ptr<UpperBoundedMechanism>> inner =
          MakeInner(spec, x.delta());
      if (!inner.ok()) return inner.status();
      const bool bddnt = spec.kind == MechanismKind::kProgram1Bddnt;
      absl::StatusOr<uint32_t> horizon =
          Program1Horizon(x.size(), P1(spec), bddnt);
      if (!horizon.ok()) return horizon.status();
      return Program1Joint(x, P1(spec), **inner, *horizon, bddnt);
    }
    case MechanismKind::kProgram3: {
      absl::StatusOr<std::unique_ptr<UpperBoundedMechanism>> inner =
          MakeInner(spec, x.delta());
      if (!inner.ok()) return inner.status();
      return Program3Joint(x, {spec.c, spec.k}, **inner, x.size() + 2);
    }
    case MechanismKind::kLaplaceSum: {
      absl::StatusOr<LaplaceSumPlan> plan = PlanLaplaceSum(LaplaceFor(spec));
      if (!plan.ok()) return plan.status();
      absl::StatusOr<std::unique_ptr<CdlSumMechanism>> inner =
          CdlSumMechanism::Create(plan->eps2, x.delta());
      if (!inner.ok()) return inner.status();
      return Program3Joint(x, plan->count, **inner, x.size() + 2);
    }
  }
  return absl::InvalidArgumentError("unknown mechanism kind");
}

absl::StatusOr<EpsilonReport> ExactAudit(const MechanismSpec& spec,
                                         const Dataset& a, const Dataset& b) {
  if (absl::Status s = Validate(spec); !s.ok()) return s;
  if (a.delta() != b.delta()) {
    return absl::InvalidArgumentError("datasets use different record bounds");
  }
  switch (spec.kind) {
    case MechanismKind::kProgram2:
      return AdaptiveCountExactEpsilon(a.size(), b.size(), spec.c, spec.k);
    case MechanismKind::kCdl:
      return CensoredDLExactEpsilon(CdlFor(spec, a), CdlFor(spec, b));
    case MechanismKind::kLeakyCdl:
      return AuditJoints(LeakyCensoredDLJoint(CdlFor(spec, a)),
                         LeakyCensoredDLJoint(CdlFor(spec, b)), false);
    case MechanismKind::kDsg:
      return AuditJoints(DsgJoint(DsgFor(spec, a)), DsgJoint(DsgFor(spec, b)),
                         false);
    case MechanismKind::kProgram1:
    case MechanismKind::kProgram1Bddnt: {
      absl::StatusOr<std::unique_ptr<UpperBoundedMechanism>> inner =
          MakeInner(spec, a.delta());
      if (!inner.ok()) return inner.status();
      return Program1ExactEpsilon(a, b, P1(spec), **inner,
                                  spec.kind == MechanismKind::kProgram1Bddnt);
    }
    case MechanismKind::kProgram3: {
      absl::StatusOr<std::unique_ptr<UpperBoundedMechanism>> inner =
          MakeInner(spec, a.delta());
      if (!inner.ok()) return inner.status();
      return Program3ExactEpsilon(a, b, {spec.c, spec.k}, **inner);
    }
    case MechanismKind::kLaplaceSum: {
      absl::StatusOr<LaplaceSumPlan> plan = PlanLaplaceSum(LaplaceFor(spec));
      if (!plan.ok()) return plan.status();
      absl::StatusOr<std::unique_ptr<CdlSumMechanism>> inner =
          CdlSumMechanism::Create(plan->eps2, a.delta());
      if (!inner.ok()) return inner.status();
      return Program3ExactEpsilon(a, b, plan->count, **inner);
    }
  }
  return absl::InvalidArgumentError("unknown mechanism kind");
}

absl::StatusOr<EpsilonReport> ExactOutputOnlyAudit(const MechanismSpec& spec,
                                                   const Dataset& a,
                                                   const Dataset& b) {
  if (absl::Status s = Validate(spec); !s.ok()) return s;
  switch (spec.kind) {
    case MechanismKind::kCdl:
    case MechanismKind::kLeakyCdl:
      return AuditJoints(CensoredDLJoint(CdlFor(spec, a)),
                         CensoredDLJoint(CdlFor(spec, b)), true);
    case MechanismKind::kDsg:
      return AuditJoints(DsgJoint(DsgFor(spec, a)), DsgJoint(DsgFor(spec, b)),
                         true);
    case MechanismKind::kProgram2: {
      // Output and runtime determine each other, so the marginal audit
      // coincides with the joint one.
      return AdaptiveCountExactEpsilon(a.size(), b.size(), spec.c, spec.k);
    }
    default:
      break;
  }
  absl::StatusOr<JointDist> ja = ExactJointFor(spec, a);
  absl::StatusOr<JointDist> jb = ExactJointFor(spec, b);
  return AuditJoints(ja, jb, true);
}

absl::StatusOr<McAuditResult> McAudit(const MechanismSpec& spec,
                                      const Dataset& a, const Dataset& b,
                                      uint64_t trials, uint64_t seed_base,
                                      double confidence, unsigned workers) {
  if (absl::Status s = Validate(spec); !s.ok()) return s;
  absl::StatusOr<JointDist> ja = MonteCarloJoint(
      MakeTrial(spec, a), trials, DeriveSeed(seed_base, 0), workers);
  if (!ja.ok()) return ja.status();
  absl::StatusOr<JointDist> jb = MonteCarloJoint(
      MakeTrial(spec, b), trials, DeriveSeed(seed_base, 1), workers);
  if (!jb.ok()) return jb.status();
  absl::StatusOr<EpsilonReport> report =
      McEpsilonLowerBound(*ja, *jb, confidence);
  if (!report.ok()) return report.status();
  return McAuditResult{*report, std::move(*ja), std::move(*jb)};
}

}  // namespace jotdp
