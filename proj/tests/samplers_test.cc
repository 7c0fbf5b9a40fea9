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

#include "jotdp/samplers.h"

#include <cmath>
#include <cstdint>
#include <map>

#include "gtest/gtest.h"
#include "jotdp/cost_model.h"
#include "jotdp/distributions.h"
#include "oracles.h"

namespace jotdp {
namespace {

// Every outcome's count within 4.5 binomial standard deviations of
// trials * p. With a few dozen outcomes per test the family-wise false alarm
// rate stays below 1e-4.
void ExpectFrequenciesMatch(const std::map<int64_t, uint64_t>& counts,
                            const std::map<int64_t, double>& probs,
                            uint64_t trials) {
  for (const auto& [y, count] : counts) {
    ASSERT_TRUE(probs.count(y)) << "outcome " << y << " outside support";
  }
  for (const auto& [y, p] : probs) {
    const auto it = counts.find(y);
    const double observed = it == counts.end() ? 0.0 : it->second;
    const double mean = trials * p;
    const double sd = std::sqrt(trials * p * (1 - p));
    EXPECT_LE(std::fabs(observed - mean), 4.5 * sd + 1e-9) << "outcome " << y;
  }
}

TEST(CensoredDLSamplerTest, DegenerateInterval) {
  RandomSource source(1);
  CostMeter meter;
  absl::StatusOr<int64_t> y = SampleCensoredDL({0, 1.0, 0, 0}, source, meter);
  ASSERT_TRUE(y.ok());
  EXPECT_EQ(*y, 0);
  EXPECT_EQ(meter.steps(), 1 + kCdlFixedCost);
}

TEST(CensoredDLSamplerTest, CostIndependentOfCenterAndSeed) {
  for (int64_t mu : {0, 1, 5, 10}) {
    for (uint64_t seed = 0; seed < 200; ++seed) {
      RandomSource source(seed);
      CostMeter meter;
      ASSERT_TRUE(SampleCensoredDL({mu, 1.0, 0, 10}, source, meter).ok());
      ASSERT_EQ(meter.steps(), CensoredDLCost(0, 10));
    }
  }
}

TEST(CensoredDLSamplerTest, FrequenciesMatchPmf) {
  const CensoredDLParams params{0, 1.0, -3, 3};
  constexpr uint64_t kTrials = 200000;
  RandomSource source(11);
  CostMeter meter;
  std::map<int64_t, uint64_t> counts;
  for (uint64_t i = 0; i < kTrials; ++i) {
    ++counts[*SampleCensoredDL(params, source, meter)];
  }
  const Pmf pmf = *CensoredDLPmf(params);
  std::map<int64_t, double> probs;
  for (size_t i = 0; i < pmf.size(); ++i) {
    probs[pmf.outcome(i)] = ToDouble(pmf.mass(i));
  }
  ExpectFrequenciesMatch(counts, probs, kTrials);
}

TEST(CensoredDLSamplerTest, SmallScaleFarTails) {
  // s = 0.05 puts almost all mass on the center; draws stay in range.
  RandomSource source(12);
  CostMeter meter;
  for (int i = 0; i < 1000; ++i) {
    const int64_t y = *SampleCensoredDL({500, 0.05, 0, 1000}, source, meter);
    ASSERT_GE(y, 499);
    ASSERT_LE(y, 501);
  }
}

TEST(CensoredDLSamplerTest, RejectsCoinPolicyAndBadParams) {
  RandomSource source(1);
  CostMeter coins(CostPolicy::kCoinTossesOnly);
  EXPECT_FALSE(SampleCensoredDL({0, 1.0, 0, 3}, source, coins).ok());
  CostMeter meter;
  EXPECT_FALSE(SampleCensoredDL({5, 1.0, 0, 3}, source, meter).ok());
  EXPECT_FALSE(SampleCensoredDL({0, 0.0, 0, 3}, source, meter).ok());
  EXPECT_EQ(meter.steps(), 0u);
}

TEST(LeakyCensoredDLSamplerTest, CostDependsOnCenterOnly) {
  for (int64_t mu : {0, 3, 10}) {
    RandomSource source(mu);
    CostMeter meter;
    ASSERT_TRUE(SampleLeakyCensoredDL({mu, 1.0, 0, 10}, source, meter).ok());
    EXPECT_EQ(meter.steps(), LeakyCensoredDLCost(0, mu));
  }
  EXPECT_NE(LeakyCensoredDLCost(0, 3), LeakyCensoredDLCost(0, 4));
}

TEST(LeakyCensoredDLSamplerTest, SameOutputsAsConstantTimeSampler) {
  for (uint64_t seed = 0; seed < 500; ++seed) {
    RandomSource a(seed);
    RandomSource b(seed);
    CostMeter ma;
    CostMeter mb;
    ASSERT_EQ(*SampleCensoredDL({4, 1.5, 0, 12}, a, ma),
              *SampleLeakyCensoredDL({4, 1.5, 0, 12}, b, mb));
  }
}

TEST(AdaptiveCountSamplerTest, CostSchedule) {
  const AdaptiveCountCost cost = AdaptiveCountCostSchedule(2);
  EXPECT_EQ(cost.fixed, 5u);
  EXPECT_EQ(cost.per_flip, 11u);
  EXPECT_EQ(cost.Runtime(0), 16u);
  EXPECT_EQ(AdaptiveCountCostSchedule(3).per_flip, 13u);
}

TEST(AdaptiveCountSamplerTest, RuntimeIsAffineInOutput) {
  const AdaptiveCountParams params{5, 2, 2};
  const AdaptiveCountCost cost = AdaptiveCountCostSchedule(2);
  for (uint64_t seed = 0; seed < 2000; ++seed) {
    RandomSource source(seed);
    CostMeter meter;
    const uint64_t out = *SampleAdaptiveCount(params, source, meter);
    ASSERT_EQ(meter.steps(), cost.Runtime(out));
  }
}

TEST(AdaptiveCountSamplerTest, FrequenciesMatchExactPmf) {
  const AdaptiveCountParams params{3, 2, 2};
  constexpr uint64_t kTrials = 200000;
  RandomSource source(21);
  CostMeter meter;
  std::map<int64_t, uint64_t> counts;
  for (uint64_t i = 0; i < kTrials; ++i) {
    const uint64_t out = *SampleAdaptiveCount(params, source, meter);
    ++counts[out > 12 ? 13 : static_cast<int64_t>(out)];
  }
  const auto ref = oracle::AdaptivePmf(3, 2, 2, 13);
  std::map<int64_t, double> probs;
  double listed = 0;
  for (int64_t i = 0; i <= 12; ++i) {
    probs[i] = ref[i].convert_to<double>();
    listed += probs[i];
  }
  probs[13] = 1 - listed;  // outputs above 12 pooled
  ExpectFrequenciesMatch(counts, probs, kTrials);
}

TEST(AdaptiveCountSamplerTest, EmptyInputIsGeometric) {
  RandomSource source(22);
  CostMeter meter;
  constexpr uint64_t kTrials = 100000;
  uint64_t zeros = 0;
  for (uint64_t i = 0; i < kTrials; ++i) {
    zeros += *SampleAdaptiveCount({0, 2, 2}, source, meter) == 0 ? 1 : 0;
  }
  EXPECT_NEAR(zeros / static_cast<double>(kTrials), 0.25,
              4.5 * std::sqrt(0.25 * 0.75 / kTrials));
}

TEST(AdaptiveCountSamplerTest, RejectsOverflowingBase) {
  RandomSource source(1);
  CostMeter meter;
  // (n + k)^c far beyond 128 bits.
  EXPECT_EQ(SampleAdaptiveCount({uint64_t{1} << 40, 4, 2}, source, meter)
                .status()
                .code(),
            absl::StatusCode::kOutOfRange);
  EXPECT_EQ(meter.steps(), 0u);
}

TEST(DsgSamplerTest, ExactCoinCountEveryRun) {
  const DsgParams params = *DsgParams::Create(2, {1, 1}, 0, 5);
  EXPECT_EQ(DsgCoinCount(params), 5u);
  for (uint64_t seed = 0; seed < 1000; ++seed) {
    RandomSource source(seed);
    CostMeter meter(CostPolicy::kCoinTossesOnly);
    ASSERT_TRUE(SampleDsg(params, source, meter).ok());
    ASSERT_EQ(meter.steps(), 5u);
  }
}

TEST(DsgSamplerTest, FrequenciesMatchEnumeration) {
  const DsgParams params = *DsgParams::Create(2, {1, 1}, 0, 5);
  const auto ref = oracle::DsgByCoinEnumeration(2, 1, 1, 0, 5, 3);
  constexpr uint64_t kTrials = 200000;
  RandomSource source(31);
  CostMeter meter(CostPolicy::kCoinTossesOnly);
  std::map<int64_t, uint64_t> counts;
  for (uint64_t i = 0; i < kTrials; ++i) {
    ++counts[*SampleDsg(params, source, meter)];
  }
  std::map<int64_t, double> probs;
  for (const auto& [y, q] : ref) probs[y] = q.convert_to<double>();
  ExpectFrequenciesMatch(counts, probs, kTrials);
}

TEST(DsgSamplerTest, MultiBitFrequencies) {
  const DsgParams params = *DsgParams::Create(3, {5, 4}, 0, 8);
  const auto ref =
      oracle::DsgClosedForm(3, Rational(5, 16), 0, 8, params.clamp_m);
  constexpr uint64_t kTrials = 200000;
  RandomSource source(32);
  CostMeter meter(CostPolicy::kCoinTossesOnly);
  std::map<int64_t, uint64_t> counts;
  for (uint64_t i = 0; i < kTrials; ++i) {
    ++counts[*SampleDsg(params, source, meter)];
  }
  EXPECT_EQ(meter.steps(), kTrials * DsgCoinCount(params));
  std::map<int64_t, double> probs;
  for (const auto& [y, q] : ref) probs[y] = q.convert_to<double>();
  ExpectFrequenciesMatch(counts, probs, kTrials);
}

TEST(DsgSamplerTest, SeedReplay) {
  const DsgParams params = *DsgParams::Create(4, {3, 3}, 0, 9);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource a(seed);
    RandomSource b(seed);
    CostMeter ma(CostPolicy::kCoinTossesOnly);
    CostMeter mb(CostPolicy::kCoinTossesOnly);
    EXPECT_EQ(*SampleDsg(params, a, ma), *SampleDsg(params, b, mb));
    EXPECT_EQ(ma.steps(), mb.steps());
  }
}

}  // namespace
}  // namespace jotdp
