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

// Simulated execution substrate. Every mechanism in this library reports its
// runtime as the reading of a CostMeter, never as wall-clock time. The meter
// is charged explicitly per pseudocode line, so the joint (output, runtime)
// distribution of a mechanism can be analysed exactly.

#ifndef JOTDP_COST_MODEL_H_
#define JOTDP_COST_MODEL_H_

#include <compare>
#include <cstdint>
#include <random>
#include <string_view>

namespace jotdp {

using uint128 = unsigned __int128;

// How the meter prices primitive operations.
//   kRamSteps:        every charged primitive costs one unit, including
//                     RandUniform and Coin.
//   kCoinTossesOnly:  only Coin() costs (one unit per toss); everything else
//                     is free.
enum class CostPolicy { kRamSteps, kCoinTossesOnly };

std::string_view CostPolicyName(CostPolicy policy);

// Deterministic abstract-step counter: the timing channel of a run.
// Single-owner; the reading is monotone non-decreasing.
class CostMeter {
 public:
  explicit CostMeter(CostPolicy policy = CostPolicy::kRamSteps)
      : policy_(policy) {}

  CostPolicy policy() const { return policy_; }
  uint64_t steps() const { return steps_; }

  // Charges `units` plain instruction steps. No-op under kCoinTossesOnly.
  void Charge(uint64_t units) {
    if (policy_ == CostPolicy::kRamSteps) steps_ += units;
  }

  // One RAND(n) instruction.
  void ChargeRand() { Charge(1); }

  // One coin toss; priced under both policies.
  void ChargeCoin() { ++steps_; }

 private:
  CostPolicy policy_;
  uint64_t steps_ = 0;
};

// Seedable randomness with the two primitives of the execution model.
// Identical seeds give identical primitive-call sequences.
class RandomSource {
 public:
  explicit RandomSource(uint64_t seed);

  uint64_t seed() const { return seed_; }

  // Uniform integer in {0, ..., n}. Rejection over the next power of two, so
  // the result is exactly uniform given uniform generator bits.
  uint64_t RandUniform(uint64_t n, CostMeter& meter);
  uint128 RandUniformWide(uint128 n, CostMeter& meter);

  // Fair bit.
  bool Coin(CostMeter& meter);

 private:
  uint64_t NextWord() { return engine_(); }

  uint64_t seed_;
  std::mt19937_64 engine_;
  uint64_t bit_buffer_ = 0;
  int bits_left_ = 0;
};

// The pair (output, runtime) released by one run.
struct JointOutcome {
  int64_t output = 0;
  uint64_t runtime = 0;

  friend auto operator<=>(const JointOutcome&, const JointOutcome&) = default;
};

// Derives the seed of trial `index` from a base seed (SplitMix64 finaliser).
// Used wherever many independent runs are launched from one user seed.
uint64_t DeriveSeed(uint64_t base, uint64_t index);

}  // namespace jotdp

#endif  // JOTDP_COST_MODEL_H_
