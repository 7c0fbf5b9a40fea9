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

// Analytic probability mass functions. Real-valued masses are evaluated at
// 100 significant digits; distributions whose masses are rational are kept
// as exact rationals so privacy ratios can be compared without rounding.

#ifndef JOTDP_DISTRIBUTIONS_H_
#define JOTDP_DISTRIBUTIONS_H_

#include <cstdint>
#include <optional>
#include <vector>

#include "absl/status/statusor.h"
#include "jotdp/numeric.h"

namespace jotdp {

struct DiscreteLaplaceParams {
  int64_t mu = 0;
  double scale = 1.0;
};

// Discrete Laplace clamped to [lo, hi]; the boundary outcomes absorb the
// tails.
struct CensoredDLParams {
  int64_t mu = 0;
  double scale = 1.0;
  int64_t lo = 0;
  int64_t hi = 0;
};

// Length-estimation process: flip j succeeds with probability
// 1 / ((n -. j) + k)^c, where -. is truncated subtraction. The output is the
// index of the first success.
struct AdaptiveCountParams {
  uint64_t n = 0;
  uint32_t c = 2;
  uint64_t k = 2;
};

// Censored dyadic symmetric geometric. `clamp_m` bounds the geometric draw;
// any value >= max(mu - lo, hi - mu) yields the same output distribution and
// only changes how many coins the sampler consumes.
struct DsgParams {
  int64_t mu = 0;
  Dyadic p;
  int64_t lo = 0;
  int64_t hi = 0;
  uint64_t clamp_m = 0;

  // Fills clamp_m with the smallest admissible value.
  static absl::StatusOr<DsgParams> Create(int64_t mu, Dyadic p, int64_t lo,
                                          int64_t hi);
  static uint64_t MinClamp(int64_t mu, int64_t lo, int64_t hi);
};

absl::Status Validate(const DiscreteLaplaceParams& params);
absl::Status Validate(const CensoredDLParams& params);
absl::Status Validate(const AdaptiveCountParams& params);
absl::Status Validate(const DsgParams& params);

// A finite probability table. Either every mass is an exact rational or every
// mass is a Real. `residual` is the probability outside the listed support
// (e.g. the unlisted tail of an unbounded distribution); for a complete table
// it is zero.
class Pmf {
 public:
  Pmf() = default;

  static Pmf FromReal(std::vector<int64_t> support, std::vector<Real> mass,
                      Real residual = 0);
  static Pmf FromRational(std::vector<int64_t> support,
                          std::vector<Rational> mass, Rational residual = 0);

  bool exact() const { return exact_; }
  size_t size() const { return support_.size(); }
  const std::vector<int64_t>& support() const { return support_; }
  int64_t outcome(size_t i) const { return support_[i]; }
  const Real& mass(size_t i) const { return mass_[i]; }
  // Only meaningful when exact().
  const Rational& exact_mass(size_t i) const { return exact_mass_[i]; }
  const Real& residual() const { return residual_; }
  const Rational& exact_residual() const { return exact_residual_; }

  // Mass of `outcome`; zero when it is not in the support.
  Real MassOf(int64_t outcome) const;
  std::optional<size_t> IndexOf(int64_t outcome) const;
  // Sum of listed masses (excluding residual).
  Real Total() const;

 private:
  bool exact_ = false;
  std::vector<int64_t> support_;
  std::vector<Real> mass_;
  std::vector<Rational> exact_mass_;
  Real residual_ = 0;
  Rational exact_residual_ = 0;
};

// Discrete Laplace mass and CDF.
absl::StatusOr<Real> DiscreteLaplacePmf(int64_t x,
                                        const DiscreteLaplaceParams& params);
absl::StatusOr<Real> DiscreteLaplaceCdf(int64_t x,
                                        const DiscreteLaplaceParams& params);

// Masses of the uncensored distribution on the window [lo, hi]; the rest of
// the probability is reported as residual.
absl::StatusOr<Pmf> DiscreteLaplaceWindow(const DiscreteLaplaceParams& params,
                                          int64_t lo, int64_t hi);

// Mass of a single outcome of the censored distribution, evaluated in closed
// form on every branch (no complement subtraction, so far tails keep full
// relative precision). Zero outside [lo, hi].
absl::StatusOr<Real> CensoredDLMass(int64_t y, const CensoredDLParams& params);
absl::StatusOr<Pmf> CensoredDLPmf(const CensoredDLParams& params);

// Exact success probability of flip j.
Rational AdaptiveCountFlipProbability(const AdaptiveCountParams& params,
                                      uint64_t j);
// P(output >= i) = prod_{j<i} (1 - q(j)).
Rational AdaptiveCountSurvival(const AdaptiveCountParams& params, uint64_t i);
// P(output = i).
Rational AdaptiveCountPmf(const AdaptiveCountParams& params, uint64_t i);
// Outcomes 0..max_outcome with the exact tail mass as residual.
absl::StatusOr<Pmf> AdaptiveCountTable(const AdaptiveCountParams& params,
                                       uint64_t max_outcome);
// f(0), ..., f(count - 1) in Real arithmetic, for sizes where exact
// rationals would be wasteful.
std::vector<Real> AdaptiveCountPrefixReal(const AdaptiveCountParams& params,
                                          uint64_t count);

// 2c * ln((k + 1) / (k - 1)).
absl::StatusOr<double> AdaptiveCountEpsilon(uint32_t c, uint64_t k);
// Smallest k >= 2 with AdaptiveCountEpsilon(c, k) <= eps.
absl::StatusOr<uint64_t> KForEpsilon(uint32_t c, double eps);

absl::StatusOr<Pmf> DsgPmf(const DsgParams& params);

// Largest t / 2^kbits <= x, for x in (0, 1).
Dyadic DyadicRoundDown(const Real& x, uint32_t kbits);

// Censored discrete Laplace masses for a hypothetically rational
// q = e^{-1/s}. Exact.
absl::StatusOr<Pmf> CensoredLaplaceRationalPmf(const Rational& q, int64_t lo,
                                               int64_t mu, int64_t hi);

struct NonDyadicWitness {
  int64_t outcome = 0;
  Rational mass;
};

// Finds an outcome whose exact mass has a denominator that is not a power of
// two. Requires lo < mu < hi and at least four support points.
absl::StatusOr<NonDyadicWitness> FindNonDyadicWitness(const Rational& q,
                                                      int64_t lo, int64_t mu,
                                                      int64_t hi);

}  // namespace jotdp

#endif  // JOTDP_DISTRIBUTIONS_H_
