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

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "gtest/gtest.h"
#include "jotdp/cost_model.h"
#include "jotdp/mechanisms.h"
#include "jotdp/verifier.h"

namespace jotdp {
namespace {

constexpr MechanismKind kAllKinds[] = {
    MechanismKind::kProgram1, MechanismKind::kProgram1Bddnt,
    MechanismKind::kProgram2, MechanismKind::kProgram3,
    MechanismKind::kLaplaceSum, MechanismKind::kCdl,
    MechanismKind::kLeakyCdl, MechanismKind::kDsg,
};

// A small valid configuration of every kind; range mechanisms cover [0, 10].
MechanismSpec SpecOf(MechanismKind kind) {
  MechanismSpec spec;
  spec.kind = kind;
  spec.lo = 0;
  spec.hi = 10;
  return spec;
}

Dataset Ones(uint64_t n) { return *Dataset::Constant(1, n); }

TEST(CatalogTest, NamesRoundTrip) {
  for (MechanismKind kind : kAllKinds) {
    EXPECT_EQ(*ParseMechanismKind(MechanismKindName(kind)), kind);
  }
  EXPECT_EQ(MechanismKindName(MechanismKind::kProgram1Bddnt), "program1-bddnt");
  EXPECT_FALSE(ParseMechanismKind("program4").ok());
}

TEST(CatalogTest, ValidateRejectsBadConfigs) {
  for (MechanismKind kind : kAllKinds) {
    EXPECT_TRUE(Validate(SpecOf(kind)).ok()) << MechanismKindName(kind);
  }
  MechanismSpec spec = SpecOf(MechanismKind::kProgram2);
  spec.k = 1;
  EXPECT_FALSE(Validate(spec).ok());
  spec = SpecOf(MechanismKind::kProgram1);
  spec.beta = 1.0;
  EXPECT_FALSE(Validate(spec).ok());
  spec = SpecOf(MechanismKind::kProgram1);
  spec.inner = "median";
  EXPECT_FALSE(Validate(spec).ok());
  spec = SpecOf(MechanismKind::kCdl);
  spec.scale = 0;
  EXPECT_FALSE(Validate(spec).ok());
  spec = SpecOf(MechanismKind::kDsg);
  spec.lo = 5;
  spec.hi = 4;
  EXPECT_FALSE(Validate(spec).ok());
  spec = SpecOf(MechanismKind::kLaplaceSum);
  spec.count_share = 1.0;
  EXPECT_FALSE(Validate(spec).ok());
}

TEST(CatalogTest, CostPolicies) {
  for (MechanismKind kind : kAllKinds) {
    const bool coins =
        kind == MechanismKind::kProgram1Bddnt || kind == MechanismKind::kDsg;
    EXPECT_EQ(PolicyFor(SpecOf(kind)),
              coins ? CostPolicy::kCoinTossesOnly : CostPolicy::kRamSteps);
  }
}

TEST(CatalogTest, DeclaredEpsilon) {
  EXPECT_DOUBLE_EQ(*DeclaredEpsilon(SpecOf(MechanismKind::kProgram1), 1), 2.0);
  EXPECT_DOUBLE_EQ(*DeclaredEpsilon(SpecOf(MechanismKind::kProgram2), 1),
                   4 * std::log(3.0));
  EXPECT_DOUBLE_EQ(*DeclaredEpsilon(SpecOf(MechanismKind::kProgram3), 1),
                   4 * std::log(3.0) + 1);
  EXPECT_DOUBLE_EQ(*DeclaredEpsilon(SpecOf(MechanismKind::kLaplaceSum), 3), 1.0);
  MechanismSpec cdl = SpecOf(MechanismKind::kCdl);
  cdl.scale = 2.0;
  EXPECT_DOUBLE_EQ(*DeclaredEpsilon(cdl, 3), 1.5);
  EXPECT_DOUBLE_EQ(*DeclaredEpsilon(SpecOf(MechanismKind::kDsg), 1),
                   std::log(2.0));
}

TEST(CatalogTest, RunIsDeterministicPerSeed) {
  for (MechanismKind kind : kAllKinds) {
    const MechanismSpec spec = SpecOf(kind);
    const Dataset x = Ones(4);
    for (uint64_t seed : {0u, 1u, 99u}) {
      const MechanismResult a = *RunMechanism(spec, x, seed);
      const MechanismResult b = *RunMechanism(spec, x, seed);
      EXPECT_EQ(a.outcome, b.outcome) << MechanismKindName(kind);
      EXPECT_EQ(a.seed, seed);
    }
  }
}

TEST(CatalogTest, CenterOutsideRangeFails) {
  const MechanismSpec spec = SpecOf(MechanismKind::kCdl);
  EXPECT_FALSE(RunMechanism(spec, Ones(11), 0).ok());
  EXPECT_FALSE(ExactAudit(spec, Ones(10), Ones(11)).ok());
}

TEST(CatalogTest, SelfAuditIsZero) {
  for (MechanismKind kind : kAllKinds) {
    const EpsilonReport r = *ExactAudit(SpecOf(kind), Ones(3), Ones(3));
    EXPECT_EQ(r.eps_hat, 0) << MechanismKindName(kind);
    EXPECT_FALSE(r.support_mismatch);
  }
}

// For every kind except the leaky sampler, inserting one record moves the
// exact joint log-ratio by at most the declared budget.
TEST(CatalogTest, ExactAuditWithinDeclaredBudget) {
  for (MechanismKind kind : kAllKinds) {
    if (kind == MechanismKind::kLeakyCdl) continue;
    const MechanismSpec spec = SpecOf(kind);
    const double declared = *DeclaredEpsilon(spec, 1);
    for (uint64_t n : {0u, 1u, 4u}) {
      const EpsilonReport r = *ExactAudit(spec, Ones(n), Ones(n + 1));
      EXPECT_FALSE(r.support_mismatch) << MechanismKindName(kind) << " " << n;
      EXPECT_LE(r.eps_hat, declared + 1e-9)
          << MechanismKindName(kind) << " " << n;
    }
  }
}

// Wrappers on a mixed dataset with the new record inserted at the front, so
// the truncated prefix changes by a shift rather than an append.
TEST(CatalogTest, WrappersWithinBudgetOnFrontInsertion) {
  const Dataset a = *Dataset::Create({0, 1, 1, 0, 1}, 1);
  const Dataset b = *Dataset::Create({1, 0, 1, 1, 0, 1}, 1);
  for (MechanismKind kind :
       {MechanismKind::kProgram1, MechanismKind::kProgram1Bddnt,
        MechanismKind::kProgram3, MechanismKind::kLaplaceSum}) {
    const MechanismSpec spec = SpecOf(kind);
    const EpsilonReport r = *ExactAudit(spec, a, b);
    EXPECT_FALSE(r.support_mismatch) << MechanismKindName(kind);
    EXPECT_LE(r.eps_hat, *DeclaredEpsilon(spec, 1) + 1e-9)
        << MechanismKindName(kind);
  }
}

TEST(CatalogTest, WiderRecordBoundScalesRangeMechanisms) {
  const Dataset a = *Dataset::Create({2, 3}, 3);
  const Dataset b = *Dataset::Create({2, 3, 3}, 3);
  for (MechanismKind kind : {MechanismKind::kCdl, MechanismKind::kDsg}) {
    const MechanismSpec spec = SpecOf(kind);
    const EpsilonReport r = *ExactAudit(spec, a, b);
    EXPECT_LE(r.eps_hat, *DeclaredEpsilon(spec, 3) + 1e-9)
        << MechanismKindName(kind);
    EXPECT_GT(r.eps_hat, *DeclaredEpsilon(spec, 1) + 1e-9)
        << MechanismKindName(kind);
  }
}

TEST(CatalogTest, LeakySamplerFailsJointAuditOnly) {
  const MechanismSpec spec = SpecOf(MechanismKind::kLeakyCdl);
  const EpsilonReport joint = *ExactAudit(spec, Ones(3), Ones(4));
  EXPECT_TRUE(joint.support_mismatch);
  EXPECT_TRUE(std::isinf(joint.eps_hat));
  ASSERT_TRUE(joint.witness.has_value());
  const EpsilonReport outputs = *ExactOutputOnlyAudit(spec, Ones(3), Ones(4));
  EXPECT_FALSE(outputs.support_mismatch);
  EXPECT_LE(outputs.eps_hat, *DeclaredEpsilon(spec, 1) + 1e-9);
  EXPECT_NEAR(outputs.eps_hat,
              ExactAudit(SpecOf(MechanismKind::kCdl), Ones(3), Ones(4))->eps_hat,
              1e-12);
}

TEST(CatalogTest, McAuditFindsLeakWitness) {
  const McAuditResult r = *McAudit(SpecOf(MechanismKind::kLeakyCdl), Ones(3),
                                   Ones(4), 2000, 7, 0.95);
  EXPECT_EQ(r.report.method, EpsilonMethod::kMcLowerBound);
  EXPECT_TRUE(r.report.support_mismatch);
  ASSERT_TRUE(r.report.witness.has_value());
  EXPECT_GT(r.report.eps_hat, 1.0);
  EXPECT_EQ(r.joint_a.trials(), 2000u);
}

TEST(CatalogTest, McAuditLowerBoundBelowDeclared) {
  for (MechanismKind kind : {MechanismKind::kCdl, MechanismKind::kProgram2,
                             MechanismKind::kDsg}) {
    const MechanismSpec spec = SpecOf(kind);
    const McAuditResult r = *McAudit(spec, Ones(3), Ones(4), 20000, 8, 0.95, 2);
    EXPECT_FALSE(r.report.support_mismatch) << MechanismKindName(kind);
    EXPECT_LE(r.report.eps_hat, *DeclaredEpsilon(spec, 1) + 1e-9)
        << MechanismKindName(kind);
  }
}

TEST(CatalogTest, McAuditIndependentOfWorkers) {
  const MechanismSpec spec = SpecOf(MechanismKind::kProgram3);
  const McAuditResult one = *McAudit(spec, Ones(3), Ones(4), 3000, 9, 0.95, 1);
  const McAuditResult four = *McAudit(spec, Ones(3), Ones(4), 3000, 9, 0.95, 4);
  EXPECT_EQ(one.joint_a, four.joint_a);
  EXPECT_EQ(one.joint_b, four.joint_b);
  EXPECT_EQ(one.report.eps_hat, four.report.eps_hat);
}

TEST(CatalogTest, TrialMatchesRun) {
  for (MechanismKind kind : kAllKinds) {
    const MechanismSpec spec = SpecOf(kind);
    const TrialFn trial = MakeTrial(spec, Ones(5));
    RandomSource source(42);
    EXPECT_EQ(*trial(source), RunMechanism(spec, Ones(5), 42)->outcome)
        << MechanismKindName(kind);
  }
}

TEST(CatalogTest, ExactJointMassAccounted) {
  for (MechanismKind kind : kAllKinds) {
    const JointDist d = *ExactJointFor(SpecOf(kind), Ones(3));
    EXPECT_NEAR(ToDouble(d.Total() + d.residual()), 1.0, 1e-12)
        << MechanismKindName(kind);
  }
}

}  // namespace
}  // namespace jotdp
