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

#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "jotdp/cost_model.h"
#include "jotdp/distributions.h"
#include "jotdp/samplers.h"
#include "oracles.h"

namespace jotdp {
namespace {

Dataset Ones(uint64_t n) { return *Dataset::Constant(1, n); }

// Insert-delete distance between two sequences: |a| + |b| - 2 LCS.
uint64_t InsertDeleteDistance(const std::vector<int64_t>& a,
                              const std::vector<int64_t>& b) {
  std::vector<std::vector<uint64_t>> lcs(a.size() + 1,
                                         std::vector<uint64_t>(b.size() + 1));
  for (size_t i = 1; i <= a.size(); ++i) {
    for (size_t j = 1; j <= b.size(); ++j) {
      lcs[i][j] = a[i - 1] == b[j - 1]
                      ? lcs[i - 1][j - 1] + 1
                      : std::max(lcs[i - 1][j], lcs[i][j - 1]);
    }
  }
  return a.size() + b.size() - 2 * lcs[a.size()][b.size()];
}

TEST(DatasetTest, ValidatesRecords) {
  EXPECT_TRUE(Dataset::Create({0, 1, 1}).ok());
  EXPECT_FALSE(Dataset::Create({0, 2}).ok());
  EXPECT_FALSE(Dataset::Create({-1}).ok());
  EXPECT_TRUE(Dataset::Create({0, 5}, 5).ok());
  EXPECT_FALSE(Dataset::Create({}, 0).ok());
  EXPECT_EQ(Ones(4).size(), 4u);
}

TEST(TruncateTest, PrefixWithFixedCharge) {
  CostMeter meter;
  const Dataset a = Truncate(*Dataset::Create({5, 7}, 10), 4, meter);
  EXPECT_EQ(a.records(), (std::vector<int64_t>{5, 7}));
  EXPECT_EQ(meter.steps(), 4u);
  const Dataset b = Truncate(*Dataset::Create({1, 2, 3, 4, 5}, 10), 3, meter);
  EXPECT_EQ(b.records(), (std::vector<int64_t>{1, 2, 3}));
  EXPECT_EQ(meter.steps(), 7u);
}

// Inserting a record inside the kept prefix pushes the last kept record out,
// so the truncations differ by one substitution (two insert-delete steps).
// Sums move by at most delta and counts not at all, which is what the inner
// mechanisms rely on.
TEST(TruncateTest, InsertionChangesTruncationByAtMostOneSubstitution) {
  const std::vector<int64_t> x = {1, 2, 3, 4, 5, 6};
  for (uint64_t m : {2, 4, 6, 8}) {
    CostMeter meter;
    const Dataset tx = Truncate(*Dataset::Create(x, 9), m, meter);
    for (size_t pos = 0; pos <= x.size(); ++pos) {
      std::vector<int64_t> y = x;
      y.insert(y.begin() + static_cast<std::ptrdiff_t>(pos), 9);
      const Dataset ty = Truncate(*Dataset::Create(y, 9), m, meter);
      const uint64_t d = InsertDeleteDistance(tx.records(), ty.records());
      EXPECT_LE(d, 2u) << "m=" << m << " pos=" << pos;
      if (pos >= m) {
        EXPECT_EQ(d, 0u);
      }
      if (m > x.size()) {
        EXPECT_EQ(d, 1u);
      }
      int64_t sx = 0, sy = 0;
      for (int64_t v : tx.records()) sx += v;
      for (int64_t v : ty.records()) sy += v;
      EXPECT_LE(std::llabs(sx - sy), 9);
      EXPECT_LE(ty.size() - tx.size(), 1u);
    }
  }
}

TEST(TruncateTest, InsertionInsidePrefixIsNotOneStable) {
  CostMeter meter;
  const Dataset tx =
      Truncate(*Dataset::Create({1, 2, 3, 4, 5, 6}, 9), 4, meter);
  const Dataset ty =
      Truncate(*Dataset::Create({9, 1, 2, 3, 4, 5, 6}, 9), 4, meter);
  EXPECT_EQ(InsertDeleteDistance(tx.records(), ty.records()), 2u);
}

TEST(CdlSumMechanismTest, CostDependsOnlyOnBound) {
  auto mech = *CdlSumMechanism::Create(1.0, 1);
  for (const Dataset& x : {*Dataset::Create({}), Ones(3), Ones(10)}) {
    for (uint64_t seed = 0; seed < 20; ++seed) {
      RandomSource source(seed);
      CostMeter meter;
      ASSERT_TRUE(mech->Run(x.view(), 10, source, meter).ok());
      EXPECT_EQ(meter.steps(), *mech->Cost(10));
    }
  }
  EXPECT_EQ(*mech->Cost(10), 10 + CensoredDLCost(0, 10) + 1);
  RandomSource source(1);
  CostMeter meter;
  EXPECT_FALSE(mech->Run(Ones(11).view(), 10, source, meter).ok());
}

TEST(CdlSumMechanismTest, OutputPmfIsCenteredCdl) {
  auto mech = *CdlSumMechanism::Create(0.5, 2);
  const Dataset x = *Dataset::Create({2, 1, 0}, 2);
  const Pmf pmf = *mech->OutputPmf(x.view(), 4);
  const Pmf want = *CensoredDLPmf({3, 4.0, 0, 8});
  ASSERT_EQ(pmf.size(), want.size());
  for (size_t i = 0; i < pmf.size(); ++i) EXPECT_EQ(pmf.mass(i), want.mass(i));
  EXPECT_EQ(mech->Truth(x.view()), 3);
}

TEST(CdlCountMechanismTest, CountsRecords) {
  auto mech = *CdlCountMechanism::Create(1.0);
  const Dataset x = *Dataset::Create({0, 0, 1});
  EXPECT_EQ(mech->Truth(x.view()), 3);
  const Pmf pmf = *mech->OutputPmf(x.view(), 5);
  EXPECT_EQ(pmf.support().front(), 0);
  EXPECT_EQ(pmf.support().back(), 5);
}

TEST(DsgSumMechanismTest, CoinCostAndPrivacyParameter) {
  auto mech = *DsgSumMechanism::Create(1.0, 1);
  EXPECT_EQ(mech->policy(), CostPolicy::kCoinTossesOnly);
  EXPECT_LE(-std::log1p(-mech->p().ToDouble()), 1.0);
  for (const Dataset& x : {*Dataset::Create({}), Ones(4)}) {
    RandomSource source(3);
    CostMeter meter(CostPolicy::kCoinTossesOnly);
    ASSERT_TRUE(mech->Run(x.view(), 6, source, meter).ok());
    EXPECT_EQ(meter.steps(), *mech->Cost(6));
  }
  RandomSource source(3);
  CostMeter ram;
  EXPECT_FALSE(mech->Run(Ones(2).view(), 6, source, ram).ok());
}

TEST(DyadicForEpsilonTest, NeverExceedsEpsilon) {
  for (double eps : {1e-4, 0.01, 0.125, 0.5, 1.0, 3.0, 10.0}) {
    absl::StatusOr<Dyadic> p = DyadicForEpsilon(eps);
    ASSERT_TRUE(p.ok()) << eps;
    EXPECT_GT(p->numerator, 0u);
    EXPECT_LE(-std::log1p(-p->ToDouble()), eps);
  }
  EXPECT_FALSE(DyadicForEpsilon(0).ok());
}

TEST(ScheduleTest, ExampleRows) {
  const Program1Config cfg{1.0, 0.5, 64};
  const ScheduleRow r1 = *ScheduleRowAt(cfg, 1);
  EXPECT_DOUBLE_EQ(r1.eps, 0.5);
  EXPECT_DOUBLE_EQ(r1.beta, 0.25);
  EXPECT_EQ(r1.m, 8u);
  const ScheduleRow r2 = *ScheduleRowAt(cfg, 2);
  EXPECT_DOUBLE_EQ(r2.eps, 0.25);
  EXPECT_DOUBLE_EQ(r2.beta, 0.125);
  EXPECT_EQ(r2.m, 24u);
  EXPECT_FALSE(ScheduleRowAt(cfg, 0).ok());
}

TEST(ScheduleTest, RatiosAndBudgetOverFiftyRows) {
  for (const Program1Config cfg :
       {Program1Config{1.0, 0.5, 64}, Program1Config{0.7, 0.1, 64},
        Program1Config{2.0, 0.01, 64}}) {
    const std::vector<ScheduleRow> rows = *IterationSchedule(cfg, 50);
    ASSERT_EQ(rows.size(), 50u);
    for (size_t i = 0; i < rows.size(); ++i) {
      EXPECT_EQ(rows[i].m, oracle::ScheduleM(cfg.eps_prime, cfg.beta, i + 1));
      EXPECT_LE(rows[i].eps_sum, cfg.eps_prime);
      if (i > 0) {
        // The outer ceiling can cost one unit: ceil(2a) >= 2 ceil(a) - 1.
        EXPECT_GE(rows[i].m, 2 * rows[i - 1].m - 1);
        EXPECT_LE(rows[i].m, 4 * rows[i - 1].m);
      }
    }
  }
}

TEST(ScheduleTest, RatioExactlyWithinTwoAndFourForIntegralScale) {
  // 2 / eps_i is an integer here, so no outer rounding occurs.
  for (const Program1Config cfg :
       {Program1Config{1.0, 0.5, 64}, Program1Config{1.0, 0.1, 64},
        Program1Config{2.0, 0.01, 64}}) {
    const std::vector<ScheduleRow> rows = *IterationSchedule(cfg, 50);
    for (size_t i = 1; i < rows.size(); ++i) {
      EXPECT_GE(rows[i].m, 2 * rows[i - 1].m);
      EXPECT_LE(rows[i].m, 4 * rows[i - 1].m);
    }
  }
}

TEST(ScheduleTest, RejectsBadConfig) {
  EXPECT_FALSE(Validate(Program1Config{0.0, 0.5, 64}).ok());
  EXPECT_FALSE(Validate(Program1Config{1.0, 1.0, 64}).ok());
  EXPECT_FALSE(Validate(Program1Config{1.0, 0.0, 64}).ok());
}

TEST(Program1Test, EmptyDatasetRuns) {
  auto inner = *CdlSumMechanism::Create(1.0, 1);
  RandomSource source(0);
  CostMeter meter;
  absl::StatusOr<MechanismResult> r =
      RunProgram1(*Dataset::Create({}), {1.0, 0.5, 64}, *inner, source, meter);
  ASSERT_TRUE(r.ok()) << r.status();
  EXPECT_GE(r->iterations, 1u);
  EXPECT_GE(r->outcome.output, 0);
  EXPECT_FALSE(r->truncated);
}

TEST(Program1Test, RuntimeDeterminedByIterations) {
  auto inner = *CdlSumMechanism::Create(1.0, 1);
  const Program1Config cfg{1.0, 0.1, 64};
  std::map<uint32_t, std::set<uint64_t>> runtimes;
  for (uint64_t seed = 0; seed < 3000; ++seed) {
    RandomSource source(seed);
    CostMeter meter;
    const MechanismResult r =
        *RunProgram1(Ones(50), cfg, *inner, source, meter);
    ASSERT_EQ(r.outcome.runtime, meter.steps());
    ASSERT_EQ(r.outcome.runtime, *Program1Runtime(cfg, r.iterations, *inner));
    ASSERT_EQ(r.bound, ScheduleRowAt(cfg, r.iterations)->m);
    runtimes[r.iterations].insert(r.outcome.runtime);
  }
  for (const auto& [k, values] : runtimes) EXPECT_EQ(values.size(), 1u);
}

TEST(Program1Test, HaltProbabilityOnEmptyInputIsCdlMassBelowHalf) {
  const Program1Config cfg{1.0, 0.5, 64};
  const Real halt = *Program1HaltProbability(0, cfg, 1);
  // m_1 = 8: halts iff n_hat < 4, n_hat ~ CDL(0, 2, 0, 8).
  const Pmf cdl = *CensoredDLPmf({0, 2.0, 0, 8});
  Real below = 0;
  for (int64_t y = 0; y < 4; ++y) below += cdl.MassOf(y);
  EXPECT_NEAR(ToDouble(halt), ToDouble(below), 1e-30);

  constexpr uint64_t kTrials = 200000;
  uint64_t first = 0;
  for (uint64_t seed = 0; seed < kTrials; ++seed) {
    RandomSource source(seed);
    CostMeter meter;
    first += SampleProgram1Stop(0, cfg, source, meter)->iterations == 1 ? 1 : 0;
  }
  const double p = ToDouble(halt);
  EXPECT_NEAR(first / static_cast<double>(kTrials), p,
              4 * std::sqrt(p * (1 - p) / kTrials));
}

TEST(Program1Test, StopDistributionIsComplete) {
  const Pmf stop = *Program1StopDistribution(50, {1.0, 0.1, 64});
  EXPECT_LT(ToDouble(stop.residual()), 1e-12);
  EXPECT_NEAR(ToDouble(stop.Total() + stop.residual()), 1.0, 1e-25);
}

TEST(Program1Test, HaltingBelowTrueSizeIsRare) {
  const Program1Config cfg{1.0, 0.5, 64};
  for (uint32_t i = 1; i <= 5; ++i) {
    const ScheduleRow row = *ScheduleRowAt(cfg, i);
    EXPECT_LE(ToDouble(*Program1HaltProbability(10000, cfg, i)), row.beta);
  }
}

TEST(Program1BddntTest, CoinsDependOnlyOnIterations) {
  auto inner = *DsgSumMechanism::Create(1.0, 1);
  const Program1Config cfg{1.0, 0.25, 64};
  for (uint64_t n : {0, 10, 40}) {
    for (uint64_t seed = 0; seed < 200; ++seed) {
      RandomSource source(seed);
      CostMeter meter(CostPolicy::kCoinTossesOnly);
      const MechanismResult r =
          *RunProgram1Bddnt(Ones(n), cfg, *inner, source, meter);
      ASSERT_EQ(meter.steps(), *Program1BddntCoins(cfg, r.iterations, *inner));
    }
  }
  for (uint32_t i = 1; i <= 4; ++i) {
    const uint64_t coins = DsgCoinCount(*Program1BddntDraw(0, cfg, i));
    for (uint64_t n : {10, 1000}) {
      EXPECT_EQ(DsgCoinCount(*Program1BddntDraw(n, cfg, i)), coins);
    }
  }
}

TEST(Program1BddntTest, RequiresCoinMeter) {
  auto inner = *DsgSumMechanism::Create(1.0, 1);
  RandomSource source(0);
  CostMeter ram;
  EXPECT_FALSE(
      RunProgram1Bddnt(Ones(3), {1.0, 0.25, 64}, *inner, source, ram).ok());
}

TEST(Program3Test, RuntimeFromRawCount) {
  auto inner = *CdlSumMechanism::Create(1.0, 1);
  const Program3Config cfg{2, 2};
  for (uint64_t seed = 0; seed < 300; ++seed) {
    RandomSource source(seed);
    CostMeter meter;
    const MechanismResult r = *RunProgram3(Ones(20), cfg, *inner, source, meter);
    ASSERT_EQ(r.bound % 2, 0u);
    ASSERT_EQ(meter.steps(), *Program3Runtime(cfg, r.bound / 2, *inner));
    ASSERT_EQ(r.truncated, r.bound < 20);
    ASSERT_GE(r.outcome.output, 0);
    ASSERT_LE(r.outcome.output, static_cast<int64_t>(r.bound));
  }
}

TEST(Program3Test, EmptyDatasetStaysEmpty) {
  auto inner = *CdlSumMechanism::Create(1.0, 1);
  for (uint64_t seed = 0; seed < 50; ++seed) {
    RandomSource source(seed);
    CostMeter meter;
    const MechanismResult r =
        *RunProgram3(*Dataset::Create({}), {2, 2}, *inner, source, meter);
    EXPECT_FALSE(r.truncated);
  }
}

TEST(LaplaceSumTest, PlanSplitsBudget) {
  const LaplaceSumPlan plan = *PlanLaplaceSum({1.0, 2, 0.5, 0});
  EXPECT_DOUBLE_EQ(plan.eps1, 0.5);
  EXPECT_DOUBLE_EQ(plan.eps2, 0.5);
  EXPECT_EQ(plan.count.c, 4u);
  EXPECT_EQ(plan.count.k, *KForEpsilon(4, 0.5));
  EXPECT_LE(*AdaptiveCountEpsilon(plan.count.c, plan.count.k), plan.eps1);
  EXPECT_FALSE(PlanLaplaceSum({1.0, 2, 1.0, 0}).ok());
}

TEST(LaplaceSumTest, OutputClampedAndReproducible) {
  const LaplaceSumConfig cfg{1.0, 2, 0.5, 0};
  const Dataset x = *Dataset::Create({3, 0, 2, 3, 1}, 3);
  for (uint64_t seed = 0; seed < 20; ++seed) {
    RandomSource a(seed);
    RandomSource b(seed);
    CostMeter ma;
    CostMeter mb;
    const MechanismResult ra = *RunLaplaceSum(x, cfg, a, ma);
    const MechanismResult rb = *RunLaplaceSum(x, cfg, b, mb);
    EXPECT_EQ(ra.outcome, rb.outcome);
    EXPECT_GE(ra.outcome.output, 0);
    EXPECT_LE(ra.outcome.output, 3 * static_cast<int64_t>(ra.bound));
  }
  RandomSource source(0);
  CostMeter meter;
  const MechanismResult empty =
      *RunLaplaceSum(*Dataset::Create({}), cfg, source, meter);
  EXPECT_GE(empty.outcome.output, 0);
  EXPECT_FALSE(empty.truncated);
}

}  // namespace
}  // namespace jotdp
