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

// Named mechanisms with a uniform interface: run, exact joint, exact and
// Monte Carlo audits, and the epsilon each one declares.
//
// Every mechanism reads its private input from a Dataset, and adjacency is
// always one inserted or deleted record:
//   program2            n = |x|
//   cdl, leaky-cdl, dsg center = sum(x)
//   wrappers            the records themselves

#ifndef JOTDP_CATALOG_H_
#define JOTDP_CATALOG_H_

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "absl/status/statusor.h"
#include "jotdp/mechanisms.h"
#include "jotdp/verifier.h"

namespace jotdp {

enum class MechanismKind {
  kProgram1,
  kProgram1Bddnt,
  kProgram2,
  kProgram3,
  kLaplaceSum,
  kCdl,
  kLeakyCdl,
  kDsg,
};

std::string_view MechanismKindName(MechanismKind kind);
absl::StatusOr<MechanismKind> ParseMechanismKind(std::string_view name);

struct MechanismSpec {
  MechanismKind kind = MechanismKind::kProgram2;

  // Program 1 and its coin-model variant.
  double eps_prime = 1.0;
  double beta = 0.5;
  uint32_t max_iter = 64;

  // Adaptive count (program2, program3).
  uint32_t c = 2;
  uint64_t k = 2;

  // Inner mechanism of the wrappers: "cdl-sum", "cdl-count" or "dsg-sum".
  // Empty selects dsg-sum for program1-bddnt and cdl-sum otherwise.
  std::string inner;
  double inner_eps = 1.0;

  // laplace-sum.
  double eps = 1.0;
  double count_share = 0.5;
  uint32_t count_exponent = 0;

  // cdl, leaky-cdl, dsg.
  double scale = 1.0;
  int64_t lo = 0;
  int64_t hi = 0;
  Dyadic p{1, 1};
  // DSG clamp; 0 selects hi - lo, which keeps the coin count independent of
  // the center.
  uint64_t clamp = 0;
};

absl::Status Validate(const MechanismSpec& spec);

CostPolicy PolicyFor(const MechanismSpec& spec);

absl::StatusOr<std::unique_ptr<UpperBoundedMechanism>> MakeInner(
    const MechanismSpec& spec, int64_t delta);

// Budget the mechanism claims for one inserted or deleted record of a
// dataset with record bound `delta`.
absl::StatusOr<double> DeclaredEpsilon(const MechanismSpec& spec,
                                       int64_t delta);

absl::StatusOr<MechanismResult> RunMechanism(const MechanismSpec& spec,
                                             const Dataset& x, uint64_t seed);

TrialFn MakeTrial(const MechanismSpec& spec, const Dataset& x);

// Exact joint table for one dataset. Unbounded outputs are listed far enough
// that the residual is below 1e-12 where that is cheap, otherwise up to
// |x| + 2 with the rest as residual.
absl::StatusOr<JointDist> ExactJointFor(const MechanismSpec& spec,
                                        const Dataset& x);

// Exact audit of a pair of datasets. A support mismatch is reported in the
// returned report, not as an error.
absl::StatusOr<EpsilonReport> ExactAudit(const MechanismSpec& spec,
                                         const Dataset& a, const Dataset& b);

// Same as ExactAudit but on output marginals only (runtime discarded).
absl::StatusOr<EpsilonReport> ExactOutputOnlyAudit(const MechanismSpec& spec,
                                                   const Dataset& a,
                                                   const Dataset& b);

struct McAuditResult {
  EpsilonReport report;
  JointDist joint_a;
  JointDist joint_b;
};

absl::StatusOr<McAuditResult> McAudit(const MechanismSpec& spec,
                                      const Dataset& a, const Dataset& b,
                                      uint64_t trials, uint64_t seed_base,
                                      double confidence, unsigned workers = 1);

}  // namespace jotdp

#endif  // JOTDP_CATALOG_H_
