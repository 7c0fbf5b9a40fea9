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

// Cost-metered samplers. Each sampler publishes its runtime contract:
//
//   SampleCensoredDL     constant: (hi - lo + 1) + kCdlFixedCost steps.
//   SampleAdaptiveCount  affine in the output: fixed + per_flip * (out + 1).
//   SampleDsg            constant: 1 + kbits * (clamp_m + 1) coins.
//
// Parameter errors are reported before the meter is touched.

#ifndef JOTDP_SAMPLERS_H_
#define JOTDP_SAMPLERS_H_

#include <cstdint>

#include "absl/status/statusor.h"
#include "jotdp/cost_model.h"
#include "jotdp/distributions.h"

namespace jotdp {

// Setup (2 steps) plus the two RAND calls that assemble the 128-bit
// threshold.
inline constexpr uint64_t kCdlFixedCost = 4;

inline uint64_t CensoredDLCost(int64_t lo, int64_t hi) {
  return static_cast<uint64_t>(hi - lo) + 1 + kCdlFixedCost;
}

// Inversion sampling against 128-bit fixed-point CDF thresholds. The scan
// visits every threshold in [lo, hi) regardless of where the draw lands.
// Requires lo <= mu <= hi and a kRamSteps meter.
absl::StatusOr<int64_t> SampleCensoredDL(const CensoredDLParams& params,
                                         RandomSource& source,
                                         CostMeter& meter);

// Same output distribution as SampleCensoredDL, but the scan stops at mu, so
// the step count is (mu - lo) + 1 + kCdlFixedCost. Exists only as a
// counterexample for timing audits.
absl::StatusOr<int64_t> SampleLeakyCensoredDL(const CensoredDLParams& params,
                                              RandomSource& source,
                                              CostMeter& meter);

inline uint64_t LeakyCensoredDLCost(int64_t lo, int64_t mu) {
  return static_cast<uint64_t>(mu - lo) + 1 + kCdlFixedCost;
}

// Published cost schedule of the adaptive counting loop.
//   fixed:    n = input_len, count = 0, flag = 0, final loop test, return.
//   per_flip: loop test, v, b, B = 1, 2 per multiply (c of them), RAND,
//             branch test, branch body.
struct AdaptiveCountCost {
  uint64_t fixed = 5;
  uint64_t per_flip = 0;

  uint64_t Runtime(uint64_t output) const {
    return fixed + per_flip * (output + 1);
  }
};

AdaptiveCountCost AdaptiveCountCostSchedule(uint32_t c);

// Flip j draws RAND(B - 1) with B = ((n -. j) + k)^c and succeeds on 0, so
// its success probability is exactly 1/B. Returns the index of the first
// success. Fails with OutOfRange if B does not fit in 128 bits.
absl::StatusOr<uint64_t> SampleAdaptiveCount(const AdaptiveCountParams& params,
                                             RandomSource& source,
                                             CostMeter& meter);

inline uint64_t DsgCoinCount(const DsgParams& params) {
  return 1 + static_cast<uint64_t>(params.p.kbits) * (params.clamp_m + 1);
}

// Exact sample from DsgPmf using only fair coins. Every call consumes
// exactly DsgCoinCount(params) coins: one for the sign, then clamp_m + 1
// Bernoulli(p) trials of kbits coins each, all of them always executed.
absl::StatusOr<int64_t> SampleDsg(const DsgParams& params,
                                  RandomSource& source, CostMeter& meter);

}  // namespace jotdp

#endif  // JOTDP_SAMPLERS_H_
