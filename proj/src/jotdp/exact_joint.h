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

// Analytic joint (output, runtime) tables for every mechanism, and exact
// epsilon audits for adjacent pairs. Runtimes come from the same published
// cost formulas the samplers charge, so a table key is exactly what a run
// would report.

#ifndef JOTDP_EXACT_JOINT_H_
#define JOTDP_EXACT_JOINT_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "jotdp/distributions.h"
#include "jotdp/mechanisms.h"
#include "jotdp/verifier.h"

namespace jotdp {

// Outputs 0..max_outcome with runtime fixed + per_flip * (i + 1); the rest of
// the mass is the residual.
absl::StatusOr<JointDist> AdaptiveCountJoint(const AdaptiveCountParams& params,
                                             uint64_t max_outcome);

// Beyond the listed outcomes both processes flip coins of bias 1/k^c, so
// f_a(y) / f_b(y) = S_a(N + 1) / S_b(N + 1) for every y > N. `constant`
// records that the ratio was confirmed equal at y = N + 1 and y = N + 2 in
// exact arithmetic and that both n are at most N.
struct AdaptiveTailCheck {
  bool constant = false;
  Rational ratio;
  Real log_ratio = 0;
};

absl::StatusOr<AdaptiveTailCheck> CheckAdaptiveCountTail(uint64_t n_a,
                                                         uint64_t n_b,
                                                         uint32_t c,
                                                         uint64_t k,
                                                         uint64_t last_listed);

// Exact audit of the adaptive count between lengths n_a and n_b, listing
// outcomes 0..max(n_a, n_b) + 1 and covering the rest with the tail check.
absl::StatusOr<EpsilonReport> AdaptiveCountExactEpsilon(uint64_t n_a,
                                                        uint64_t n_b,
                                                        uint32_t c,
                                                        uint64_t k);

absl::StatusOr<JointDist> CensoredDLJoint(const CensoredDLParams& params);
absl::StatusOr<JointDist> LeakyCensoredDLJoint(const CensoredDLParams& params);
absl::StatusOr<JointDist> DsgJoint(const DsgParams& params);

// Exact audit of two CDL draws on the same [lo, hi] restricted to the keys
// where the ratio can change: {lo, hi} and the outcomes within one of either
// center. Everywhere else the ratio equals its value at a listed neighbour.
absl::StatusOr<EpsilonReport> CensoredDLExactEpsilon(const CensoredDLParams& a,
                                                     const CensoredDLParams& b);

// Smallest iteration count after which the unhalted mass is below 1e-12.
absl::StatusOr<uint32_t> Program1Horizon(uint64_t n, const Program1Config& cfg,
                                         bool bddnt);

// Program 1 joint with halting iterations 1..iterations; the unhalted mass is
// the residual.
absl::StatusOr<JointDist> Program1Joint(const Dataset& x,
                                        const Program1Config& cfg,
                                        const UpperBoundedMechanism& inner,
                                        uint32_t iterations, bool bddnt);

// Audits two datasets over a common iteration horizon, chosen so that both
// unhalted masses fall below 1e-12.
absl::StatusOr<EpsilonReport> Program1ExactEpsilon(
    const Dataset& a, const Dataset& b, const Program1Config& cfg,
    const UpperBoundedMechanism& inner, bool bddnt);

// Program 3 joint for raw counts 0..last_raw.
absl::StatusOr<JointDist> Program3Joint(const Dataset& x,
                                        const Program3Config& cfg,
                                        const UpperBoundedMechanism& inner,
                                        uint64_t last_raw);

// Lists raw counts 0..max(|a|, |b|) + 2. Past that point neither dataset is
// truncated, the count ratio is constant and the inner ratios repeat, so the
// worst ratio of the last listed row covers the rest.
absl::StatusOr<EpsilonReport> Program3ExactEpsilon(
    const Dataset& a, const Dataset& b, const Program3Config& cfg,
    const UpperBoundedMechanism& inner);

}  // namespace jotdp

#endif  // JOTDP_EXACT_JOINT_H_
