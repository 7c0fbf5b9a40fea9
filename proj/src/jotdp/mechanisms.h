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

// Unbounded-setting wrappers and the upper-bounded inner mechanisms they call.
//
// Every wrapper has the shape: privately estimate a bound B on |x| in time
// that depends only on the released estimate, truncate x to B records at cost
// B, then run an inner mechanism whose cost depends only on B. The runtime of
// a whole run is therefore a function of the (private) bound-stage outcome,
// which the verifier folds into the joint distribution.

#ifndef JOTDP_MECHANISMS_H_
#define JOTDP_MECHANISMS_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "jotdp/cost_model.h"
#include "jotdp/distributions.h"

namespace jotdp {

// Records are integers in [0, delta].
class Dataset {
 public:
  Dataset() = default;

  static absl::StatusOr<Dataset> Create(std::vector<int64_t> records,
                                        int64_t delta = 1);
  // n copies of `value`.
  static absl::StatusOr<Dataset> Constant(int64_t value, uint64_t n,
                                          int64_t delta = 1);

  const std::vector<int64_t>& records() const { return records_; }
  std::span<const int64_t> view() const { return records_; }
  uint64_t size() const { return records_.size(); }
  int64_t delta() const { return delta_; }

 private:
  std::vector<int64_t> records_;
  int64_t delta_ = 1;
};

// First min(|x|, m) records; charges exactly m.
Dataset Truncate(const Dataset& x, uint64_t m, CostMeter& meter);

// An eps-JOT-DP program for inputs with at most `bound` records. Its meter
// delta depends only on `bound`.
class UpperBoundedMechanism {
 public:
  virtual ~UpperBoundedMechanism() = default;

  virtual std::string_view name() const = 0;
  virtual double epsilon() const = 0;
  // Policy the mechanism is priced under; runs under any other policy fail.
  virtual CostPolicy policy() const = 0;
  // Meter delta of Run for this bound.
  virtual absl::StatusOr<uint64_t> Cost(uint64_t bound) const = 0;
  // Fails with InvalidArgument when records.size() > bound or a record lies
  // outside [0, delta].
  virtual absl::StatusOr<int64_t> Run(std::span<const int64_t> records,
                                      uint64_t bound, RandomSource& source,
                                      CostMeter& meter) const = 0;
  // Exact output distribution of Run.
  virtual absl::StatusOr<Pmf> OutputPmf(std::span<const int64_t> records,
                                        uint64_t bound) const = 0;
  // The statistic the output estimates.
  virtual int64_t Truth(std::span<const int64_t> records) const = 0;
};

// Censored discrete Laplace around sum(x): s = delta / eps on [0, delta * B].
// Cost(B) = B (padded sum) + CensoredDLCost(0, delta * B) + 1.
class CdlSumMechanism final : public UpperBoundedMechanism {
 public:
  static absl::StatusOr<std::unique_ptr<CdlSumMechanism>> Create(
      double eps, int64_t delta);

  std::string_view name() const override { return "cdl-sum"; }
  double epsilon() const override { return eps_; }
  CostPolicy policy() const override { return CostPolicy::kRamSteps; }
  int64_t delta() const { return delta_; }
  double scale() const { return static_cast<double>(delta_) / eps_; }

  absl::StatusOr<uint64_t> Cost(uint64_t bound) const override;
  absl::StatusOr<int64_t> Run(std::span<const int64_t> records, uint64_t bound,
                              RandomSource& source,
                              CostMeter& meter) const override;
  absl::StatusOr<Pmf> OutputPmf(std::span<const int64_t> records,
                                uint64_t bound) const override;
  int64_t Truth(std::span<const int64_t> records) const override;

 private:
  CdlSumMechanism(double eps, int64_t delta) : eps_(eps), delta_(delta) {}
  double eps_;
  int64_t delta_;
};

// Censored discrete Laplace around |x|: s = 1 / eps on [0, B].
class CdlCountMechanism final : public UpperBoundedMechanism {
 public:
  static absl::StatusOr<std::unique_ptr<CdlCountMechanism>> Create(double eps);

  std::string_view name() const override { return "cdl-count"; }
  double epsilon() const override { return eps_; }
  CostPolicy policy() const override { return CostPolicy::kRamSteps; }

  absl::StatusOr<uint64_t> Cost(uint64_t bound) const override;
  absl::StatusOr<int64_t> Run(std::span<const int64_t> records, uint64_t bound,
                              RandomSource& source,
                              CostMeter& meter) const override;
  absl::StatusOr<Pmf> OutputPmf(std::span<const int64_t> records,
                                uint64_t bound) const override;
  int64_t Truth(std::span<const int64_t> records) const override;

 private:
  explicit CdlCountMechanism(double eps) : eps_(eps) {}
  double eps_;
};

// Coin-model sum: DSG around sum(x) on [0, delta * B] with clamp delta * B
// and p = DyadicForEpsilon(eps / delta). Cost(B) counts coins only.
class DsgSumMechanism final : public UpperBoundedMechanism {
 public:
  static absl::StatusOr<std::unique_ptr<DsgSumMechanism>> Create(
      double eps, int64_t delta);

  std::string_view name() const override { return "dsg-sum"; }
  double epsilon() const override { return eps_; }
  CostPolicy policy() const override { return CostPolicy::kCoinTossesOnly; }
  const Dyadic& p() const { return p_; }

  absl::StatusOr<uint64_t> Cost(uint64_t bound) const override;
  absl::StatusOr<int64_t> Run(std::span<const int64_t> records, uint64_t bound,
                              RandomSource& source,
                              CostMeter& meter) const override;
  absl::StatusOr<Pmf> OutputPmf(std::span<const int64_t> records,
                                uint64_t bound) const override;
  int64_t Truth(std::span<const int64_t> records) const override;

 private:
  DsgSumMechanism(double eps, int64_t delta, Dyadic p)
      : eps_(eps), delta_(delta), p_(p) {}
  double eps_;
  int64_t delta_;
  Dyadic p_;
};

// p = round_down(1 - e^{-eps}) with kbits = (smallest kbits giving a nonzero
// result) + 2. ln(1 / (1 - p)) <= eps by construction.
absl::StatusOr<Dyadic> DyadicForEpsilon(double eps);

struct Program1Config {
  double eps_prime = 1.0;
  double beta = 0.5;
  uint32_t max_iter = 64;
};

absl::Status Validate(const Program1Config& cfg);

struct ScheduleRow {
  uint32_t i = 0;
  double eps = 0;
  double beta = 0;
  uint64_t m = 0;
  double eps_sum = 0;  // eps_1 + ... + eps_i
};

// Row i >= 1: eps_i = eps'/2^i, beta_i = beta/2^i,
// m_i = ceil((2 / eps_i) * ceil(ln(1 / beta_i))). OutOfRange if m_i does not
// fit in 63 bits.
absl::StatusOr<ScheduleRow> ScheduleRowAt(const Program1Config& cfg,
                                          uint32_t i);
absl::StatusOr<std::vector<ScheduleRow>> IterationSchedule(
    const Program1Config& cfg, uint32_t rows);

// Per-iteration bookkeeping on top of the scan and the sample: the loop
// test, the halting test and the three schedule updates.
inline constexpr uint64_t kProgram1IterationOverhead = 5;
// Return instruction after the inner call.
inline constexpr uint64_t kWrapperReturnCost = 1;

struct MechanismResult {
  JointOutcome outcome;
  uint32_t iterations = 0;  // Program 1 only
  uint64_t bound = 0;       // bound handed to the inner mechanism
  bool truncated = false;   // bound < |x|
  uint64_t seed = 0;
};

// Outcome of Program 1's bound-estimation loop.
struct Program1Stop {
  uint32_t iterations = 0;
  uint64_t bound = 0;
};

// Runs only the bound-estimation loop of Program 1 (RAM model, CDL draws).
absl::StatusOr<Program1Stop> SampleProgram1Stop(uint64_t n,
                                                const Program1Config& cfg,
                                                RandomSource& source,
                                                CostMeter& meter);
// Same with DSG draws under the coin model.
absl::StatusOr<Program1Stop> SampleProgram1BddntStop(uint64_t n,
                                                     const Program1Config& cfg,
                                                     RandomSource& source,
                                                     CostMeter& meter);

absl::StatusOr<MechanismResult> RunProgram1(const Dataset& x,
                                            const Program1Config& cfg,
                                            const UpperBoundedMechanism& inner,
                                            RandomSource& source,
                                            CostMeter& meter);
absl::StatusOr<MechanismResult> RunProgram1Bddnt(
    const Dataset& x, const Program1Config& cfg,
    const UpperBoundedMechanism& inner, RandomSource& source,
    CostMeter& meter);

// Runtime of a Program 1 run that halts after `iterations`.
absl::StatusOr<uint64_t> Program1Runtime(const Program1Config& cfg,
                                         uint32_t iterations,
                                         const UpperBoundedMechanism& inner);
// Coin count of a BDDNT run that halts after `iterations`.
absl::StatusOr<uint64_t> Program1BddntCoins(const Program1Config& cfg,
                                            uint32_t iterations,
                                            const UpperBoundedMechanism& inner);

// Probability that iteration i halts given it is reached: P(2 * n_hat < m_i)
// with n_hat ~ CDL(min(n, m_i), 1 / eps_i, 0, m_i).
absl::StatusOr<Real> Program1HaltProbability(uint64_t n,
                                             const Program1Config& cfg,
                                             uint32_t i);
// Same for the DSG draw; exact.
absl::StatusOr<Rational> Program1BddntHaltProbability(uint64_t n,
                                                      const Program1Config& cfg,
                                                      uint32_t i);
absl::StatusOr<DsgParams> Program1BddntDraw(uint64_t n,
                                            const Program1Config& cfg,
                                            uint32_t i);

// Distribution of the halting iteration (outcomes 1, 2, ...). Stops adding
// iterations once the unhalted mass falls below 1e-12, and fails if that has
// not happened by cfg.max_iter.
absl::StatusOr<Pmf> Program1StopDistribution(uint64_t n,
                                             const Program1Config& cfg);

struct Program3Config {
  uint32_t c = 2;
  uint64_t k = 2;
};

// n_hat = adaptive count of |x|, B = 2 n_hat, truncate, inner(B).
absl::StatusOr<MechanismResult> RunProgram3(const Dataset& x,
                                            const Program3Config& cfg,
                                            const UpperBoundedMechanism& inner,
                                            RandomSource& source,
                                            CostMeter& meter);
// Runtime as a function of the raw adaptive count.
absl::StatusOr<uint64_t> Program3Runtime(const Program3Config& cfg,
                                         uint64_t raw_count,
                                         const UpperBoundedMechanism& inner);

// Sum release in the unbounded setting. eps is split as
// eps1 = count_share * eps for the adaptive count and eps2 = eps - eps1 for a
// CdlSumMechanism. The adaptive count uses exponent `count_exponent` (0 means
// c + 2) and k = KForEpsilon(count_exponent, eps1); `c` is the tail exponent
// the caller wants the error bound to hold at.
struct LaplaceSumConfig {
  double eps = 1.0;
  uint32_t c = 2;
  double count_share = 0.5;
  uint32_t count_exponent = 0;
};

struct LaplaceSumPlan {
  Program3Config count;
  double eps1 = 0;
  double eps2 = 0;
};

absl::StatusOr<LaplaceSumPlan> PlanLaplaceSum(const LaplaceSumConfig& cfg);

absl::StatusOr<MechanismResult> RunLaplaceSum(const Dataset& x,
                                              const LaplaceSumConfig& cfg,
                                              RandomSource& source,
                                              CostMeter& meter);

}  // namespace jotdp

#endif  // JOTDP_MECHANISMS_H_
