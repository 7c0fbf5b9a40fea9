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

#include "jotdp/cost_model.h"

#include <array>
#include <cstdint>
#include <set>

#include "gtest/gtest.h"

namespace jotdp {
namespace {

TEST(CostMeterTest, RamPolicyCountsStepsAndCoins) {
  CostMeter meter(CostPolicy::kRamSteps);
  meter.Charge(3);
  meter.ChargeRand();
  meter.ChargeCoin();
  EXPECT_EQ(meter.steps(), 5u);
}

TEST(CostMeterTest, CoinPolicyCountsOnlyCoins) {
  CostMeter meter(CostPolicy::kCoinTossesOnly);
  meter.Charge(100);
  meter.ChargeRand();
  meter.ChargeCoin();
  meter.ChargeCoin();
  EXPECT_EQ(meter.steps(), 2u);
}

TEST(CostPolicyTest, Names) {
  EXPECT_EQ(CostPolicyName(CostPolicy::kRamSteps), "ram_steps");
  EXPECT_EQ(CostPolicyName(CostPolicy::kCoinTossesOnly), "coin_tosses_only");
}

TEST(RandomSourceTest, RandUniformChargesOneStep) {
  RandomSource source(1);
  CostMeter meter;
  source.RandUniform(10, meter);
  EXPECT_EQ(meter.steps(), 1u);
  source.RandUniformWide(uint128{1} << 100, meter);
  EXPECT_EQ(meter.steps(), 2u);
}

TEST(RandomSourceTest, RandUniformZeroIsZero) {
  RandomSource source(2);
  CostMeter meter;
  for (int i = 0; i < 100; ++i) EXPECT_EQ(source.RandUniform(0, meter), 0u);
}

TEST(RandomSourceTest, RandUniformIsInclusiveAndRoughlyUniform) {
  RandomSource source(3);
  CostMeter meter;
  std::array<int, 6> counts{};
  constexpr int kDraws = 60000;
  for (int i = 0; i < kDraws; ++i) {
    const uint64_t v = source.RandUniform(5, meter);
    ASSERT_LE(v, 5u);
    ++counts[v];
  }
  // Chi-square with 5 degrees of freedom; 20.5 is the 0.999 quantile.
  double chi2 = 0;
  for (int c : counts) {
    const double d = c - kDraws / 6.0;
    chi2 += d * d / (kDraws / 6.0);
  }
  EXPECT_LT(chi2, 20.5);
}

TEST(RandomSourceTest, WideDrawStaysInRange) {
  RandomSource source(4);
  CostMeter meter;
  const uint128 bound = (uint128{1} << 90) + 12345;
  bool saw_high_bits = false;
  for (int i = 0; i < 1000; ++i) {
    const uint128 v = source.RandUniformWide(bound, meter);
    ASSERT_LE(v, bound);
    if ((v >> 64) != 0) saw_high_bits = true;
  }
  EXPECT_TRUE(saw_high_bits);
  // Bounds that fit in 64 bits.
  for (int i = 0; i < 1000; ++i) {
    ASSERT_LE(source.RandUniformWide(3, meter), uint128{3});
  }
}

TEST(RandomSourceTest, CoinIsFair) {
  RandomSource source(5);
  CostMeter meter(CostPolicy::kCoinTossesOnly);
  int heads = 0;
  constexpr int kFlips = 100000;
  for (int i = 0; i < kFlips; ++i) heads += source.Coin(meter) ? 1 : 0;
  EXPECT_EQ(meter.steps(), static_cast<uint64_t>(kFlips));
  // 5 standard deviations.
  EXPECT_NEAR(heads, kFlips / 2, 5 * 158);
}

TEST(RandomSourceTest, SameSeedSameStream) {
  RandomSource a(99);
  RandomSource b(99);
  CostMeter meter;
  for (int i = 0; i < 100; ++i) {
    ASSERT_EQ(a.RandUniform(1000, meter), b.RandUniform(1000, meter));
    ASSERT_EQ(a.Coin(meter), b.Coin(meter));
  }
  EXPECT_EQ(a.seed(), 99u);
}

TEST(DeriveSeedTest, DeterministicAndDistinct) {
  std::set<uint64_t> seen;
  for (uint64_t i = 0; i < 1000; ++i) {
    EXPECT_EQ(DeriveSeed(7, i), DeriveSeed(7, i));
    seen.insert(DeriveSeed(7, i));
  }
  EXPECT_EQ(seen.size(), 1000u);
  EXPECT_NE(DeriveSeed(7, 0), DeriveSeed(8, 0));
}

TEST(JointOutcomeTest, OrderedByOutputThenRuntime) {
  EXPECT_LT((JointOutcome{1, 9}), (JointOutcome{2, 0}));
  EXPECT_LT((JointOutcome{1, 1}), (JointOutcome{1, 2}));
  EXPECT_EQ((JointOutcome{3, 4}), (JointOutcome{3, 4}));
}

}  // namespace
}  // namespace jotdp
