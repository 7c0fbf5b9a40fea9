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

#include "jotdp/distributions.h"

#include <algorithm>
#include <cmath>
#include <map>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace jotdp {
namespace {

absl::Status ValidateScale(double scale) {
  if (!(scale > 0) || !std::isfinite(scale)) {
    return absl::InvalidArgumentError(
        absl::StrFormat("scale must be positive and finite, got %g", scale));
  }
  return absl::OkStatus();
}

// e^{-1/s}
Real DecayRatio(double scale) { return exp(Real(-1) / Real(scale)); }

Real PowInt(const Real& base, uint64_t exponent) {
  return boost::multiprecision::pow(base, static_cast<long long>(exponent));
}

Rational PowInt(const Rational& base, uint64_t exponent) {
  Rational result = 1;
  Rational square = base;
  while (exponent > 0) {
    if (exponent & 1u) result *= square;
    square *= square;
    exponent >>= 1;
  }
  return result;
}

uint64_t AbsDiff(int64_t a, int64_t b) {
  return a >= b ? static_cast<uint64_t>(a - b) : static_cast<uint64_t>(b - a);
}

// F(x) on the branch x <= mu, given d = mu - x >= 0.
Real LowerCdf(const Real& r, uint64_t d) { return PowInt(r, d) / (1 + r); }
// 1 - F(x) on the branch x >= mu, given d = x - mu >= 0.
Real UpperSurvival(const Real& r, uint64_t d) {
  return PowInt(r, d + 1) / (1 + r);
}

}  // namespace

uint64_t DsgParams::MinClamp(int64_t mu, int64_t lo, int64_t hi) {
  return std::max(AbsDiff(mu, lo), AbsDiff(hi, mu));
}

absl::StatusOr<DsgParams> DsgParams::Create(int64_t mu, Dyadic p, int64_t lo,
                                            int64_t hi) {
  DsgParams params{mu, p, lo, hi, MinClamp(mu, lo, hi)};
  if (absl::Status s = Validate(params); !s.ok()) return s;
  return params;
}

absl::Status Validate(const DiscreteLaplaceParams& params) {
  return ValidateScale(params.scale);
}

absl::Status Validate(const CensoredDLParams& params) {
  if (params.lo > params.hi) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "censoring bounds reversed: lo=%d > hi=%d", params.lo, params.hi));
  }
  return ValidateScale(params.scale);
}

absl::Status Validate(const AdaptiveCountParams& params) {
  if (params.c < 2 || params.k < 2) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "adaptive count needs c >= 2 and k >= 2, got c=%d k=%d", params.c,
        params.k));
  }
  return absl::OkStatus();
}

absl::Status Validate(const DsgParams& params) {
  if (params.p.kbits == 0 || params.p.kbits > 62) {
    return absl::InvalidArgumentError(
        absl::StrFormat("dyadic p needs 1..62 bits, got %d", params.p.kbits));
  }
  if (params.p.numerator == 0 ||
      params.p.numerator >= (uint64_t{1} << params.p.kbits)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "p = %d/2^%d is not in (0, 1)", params.p.numerator, params.p.kbits));
  }
  if (params.lo > params.hi || params.mu < params.lo || params.mu > params.hi) {
    return absl::InvalidArgumentError(
        absl::StrFormat("need lo <= mu <= hi, got lo=%d mu=%d hi=%d",
                        params.lo, params.mu, params.hi));
  }
  if (params.clamp_m < DsgParams::MinClamp(params.mu, params.lo, params.hi)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "clamp %d below max(mu - lo, hi - mu)", params.clamp_m));
  }
  return absl::OkStatus();
}

Pmf Pmf::FromReal(std::vector<int64_t> support, std::vector<Real> mass,
                  Real residual) {
  Pmf pmf;
  pmf.exact_ = false;
  pmf.support_ = std::move(support);
  pmf.mass_ = std::move(mass);
  pmf.residual_ = std::move(residual);
  return pmf;
}

Pmf Pmf::FromRational(std::vector<int64_t> support, std::vector<Rational> mass,
                      Rational residual) {
  Pmf pmf;
  pmf.exact_ = true;
  pmf.support_ = std::move(support);
  pmf.mass_.reserve(mass.size());
  for (const Rational& m : mass) pmf.mass_.push_back(ToReal(m));
  pmf.exact_mass_ = std::move(mass);
  pmf.residual_ = ToReal(residual);
  pmf.exact_residual_ = std::move(residual);
  return pmf;
}

std::optional<size_t> Pmf::IndexOf(int64_t outcome) const {
  auto it = std::lower_bound(support_.begin(), support_.end(), outcome);
  if (it == support_.end() || *it != outcome) return std::nullopt;
  return static_cast<size_t>(it - support_.begin());
}

Real Pmf::MassOf(int64_t outcome) const {
  if (auto i = IndexOf(outcome)) return mass_[*i];
  return 0;
}

Real Pmf::Total() const {
  Real total = 0;
  for (const Real& m : mass_) total += m;
  return total;
}

absl::StatusOr<Real> DiscreteLaplacePmf(int64_t x,
                                        const DiscreteLaplaceParams& params) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  const Real r = DecayRatio(params.scale);
  return (1 - r) / (1 + r) * PowInt(r, AbsDiff(x, params.mu));
}

absl::StatusOr<Real> DiscreteLaplaceCdf(int64_t x,
                                        const DiscreteLaplaceParams& params) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  const Real r = DecayRatio(params.scale);
  if (x <= params.mu) return LowerCdf(r, AbsDiff(params.mu, x));
  return 1 - UpperSurvival(r, AbsDiff(x, params.mu));
}

absl::StatusOr<Pmf> DiscreteLaplaceWindow(const DiscreteLaplaceParams& params,
                                          int64_t lo, int64_t hi) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  if (lo > hi) return absl::InvalidArgumentError("window lo > hi");
  const Real r = DecayRatio(params.scale);
  const Real c = (1 - r) / (1 + r);
  std::vector<int64_t> support;
  std::vector<Real> mass;
  Real total = 0;
  for (int64_t x = lo; x <= hi; ++x) {
    support.push_back(x);
    mass.push_back(c * PowInt(r, AbsDiff(x, params.mu)));
    total += mass.back();
  }
  return Pmf::FromReal(std::move(support), std::move(mass), 1 - total);
}

absl::StatusOr<Real> CensoredDLMass(int64_t y, const CensoredDLParams& params) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  const int64_t lo = params.lo, hi = params.hi, mu = params.mu;
  if (y < lo || y > hi) return Real(0);
  if (lo == hi) return Real(1);
  const Real r = DecayRatio(params.scale);
  if (y == lo) {
    // F(lo)
    if (lo <= mu) return LowerCdf(r, AbsDiff(mu, lo));
    return 1 - UpperSurvival(r, AbsDiff(lo, mu));
  }
  if (y == hi) {
    // 1 - F(hi - 1)
    if (hi - 1 >= mu) return UpperSurvival(r, AbsDiff(hi - 1, mu));
    return 1 - LowerCdf(r, AbsDiff(mu, hi - 1));
  }
  return (1 - r) / (1 + r) * PowInt(r, AbsDiff(y, mu));
}

absl::StatusOr<Pmf> CensoredDLPmf(const CensoredDLParams& params) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  std::vector<int64_t> support;
  std::vector<Real> mass;
  support.reserve(static_cast<size_t>(params.hi - params.lo + 1));
  mass.reserve(support.capacity());
  for (int64_t y = params.lo; y <= params.hi; ++y) {
    auto m = CensoredDLMass(y, params);
    if (!m.ok()) return m.status();
    support.push_back(y);
    mass.push_back(*std::move(m));
  }
  return Pmf::FromReal(std::move(support), std::move(mass));
}

Rational AdaptiveCountFlipProbability(const AdaptiveCountParams& params,
                                      uint64_t j) {
  const uint64_t remaining = params.n > j ? params.n - j : 0;
  const BigInt base = BigInt(remaining) + BigInt(params.k);
  return Rational(BigInt(1), boost::multiprecision::pow(base, params.c));
}

Rational AdaptiveCountSurvival(const AdaptiveCountParams& params, uint64_t i) {
  Rational survival = 1;
  const uint64_t varying = std::min(i, params.n);
  for (uint64_t j = 0; j < varying; ++j) {
    survival *= 1 - AdaptiveCountFlipProbability(params, j);
  }
  if (i > params.n) {
    // Once j >= n every flip has the same bias 1/k^c.
    survival *= PowInt(Rational(1) - AdaptiveCountFlipProbability(params, i),
                       i - params.n);
  }
  return survival;
}

Rational AdaptiveCountPmf(const AdaptiveCountParams& params, uint64_t i) {
  return AdaptiveCountFlipProbability(params, i) *
         AdaptiveCountSurvival(params, i);
}

absl::StatusOr<Pmf> AdaptiveCountTable(const AdaptiveCountParams& params,
                                       uint64_t max_outcome) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  std::vector<int64_t> support;
  std::vector<Rational> mass;
  Rational survival = 1;
  for (uint64_t i = 0; i <= max_outcome; ++i) {
    const Rational q = AdaptiveCountFlipProbability(params, i);
    support.push_back(static_cast<int64_t>(i));
    mass.push_back(q * survival);
    survival *= 1 - q;
  }
  return Pmf::FromRational(std::move(support), std::move(mass), survival);
}

std::vector<Real> AdaptiveCountPrefixReal(const AdaptiveCountParams& params,
                                          uint64_t count) {
  std::vector<Real> out;
  out.reserve(count);
  Real survival = 1;
  for (uint64_t i = 0; i < count; ++i) {
    const uint64_t remaining = params.n > i ? params.n - i : 0;
    const Real q =
        1 / PowInt(Real(remaining) + Real(params.k), params.c);
    out.push_back(q * survival);
    survival *= 1 - q;
  }
  return out;
}

absl::StatusOr<double> AdaptiveCountEpsilon(uint32_t c, uint64_t k) {
  if (k <= 1 || c < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("need k >= 2 and c >= 1, got c=%d k=%d", c, k));
  }
  const double kd = static_cast<double>(k);
  return 2.0 * c * std::log((kd + 1) / (kd - 1));
}

absl::StatusOr<uint64_t> KForEpsilon(uint32_t c, double eps) {
  if (!(eps > 0) || !std::isfinite(eps) || c < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("need eps > 0 and c >= 1, got c=%d eps=%g", c, eps));
  }
  auto ok = [&](uint64_t k) { return *AdaptiveCountEpsilon(c, k) <= eps; };
  // ln((k+1)/(k-1)) = eps / 2c  =>  k = 1 + 2 / (e^{eps/2c} - 1).
  const double guess = 1.0 + 2.0 / std::expm1(eps / (2.0 * c));
  if (!(guess < 9e18)) {
    return absl::OutOfRangeError("eps too small for a 64-bit k");
  }
  uint64_t k = std::max<uint64_t>(2, static_cast<uint64_t>(guess));
  while (!ok(k)) ++k;
  while (k > 2 && ok(k - 1)) --k;
  return k;
}

absl::StatusOr<Pmf> DsgPmf(const DsgParams& params) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  const Rational p = params.p.ToRational();
  const Rational q = 1 - p;
  const Rational half(1, 2);
  const int64_t lo = params.lo, hi = params.hi, mu = params.mu;
  std::map<int64_t, Rational> table;
  // S = -1: Y = max(lo, mu - G).
  table[lo] += half * PowInt(q, AbsDiff(mu, lo));
  for (int64_t y = mu; y > lo; --y) {
    table[y] += half * p * PowInt(q, AbsDiff(mu, y));
  }
  // S = +1: Y = min(hi, mu + 1 + G).
  if (mu + 1 > hi) {
    table[hi] += half;
  } else {
    for (int64_t y = mu + 1; y < hi; ++y) {
      table[y] += half * p * PowInt(q, AbsDiff(y, mu + 1));
    }
    table[hi] += half * PowInt(q, AbsDiff(hi, mu + 1));
  }
  std::vector<int64_t> support;
  std::vector<Rational> mass;
  for (auto& [y, m] : table) {
    if (m == 0) continue;
    support.push_back(y);
    mass.push_back(std::move(m));
  }
  return Pmf::FromRational(std::move(support), std::move(mass));
}

Dyadic DyadicRoundDown(const Real& x, uint32_t kbits) {
  const Real scaled = floor(ldexp(x, static_cast<int>(kbits)));
  Dyadic d;
  d.kbits = kbits;
  d.numerator = scaled <= 0 ? 0 : scaled.convert_to<uint64_t>();
  return d;
}

absl::StatusOr<Pmf> CensoredLaplaceRationalPmf(const Rational& q, int64_t lo,
                                               int64_t mu, int64_t hi) {
  if (q <= 0 || q >= 1) return absl::InvalidArgumentError("q not in (0, 1)");
  if (!(lo < mu && mu < hi)) {
    return absl::InvalidArgumentError("need lo < mu < hi");
  }
  const Rational c = (1 - q) / (1 + q);
  std::vector<int64_t> support;
  std::vector<Rational> mass;
  for (int64_t y = lo; y <= hi; ++y) {
    support.push_back(y);
    if (y == lo) {
      mass.push_back(PowInt(q, AbsDiff(mu, lo)) / (1 + q));
    } else if (y == hi) {
      mass.push_back(PowInt(q, AbsDiff(hi, mu)) / (1 + q));
    } else {
      mass.push_back(c * PowInt(q, AbsDiff(y, mu)));
    }
  }
  return Pmf::FromRational(std::move(support), std::move(mass));
}

absl::StatusOr<NonDyadicWitness> FindNonDyadicWitness(const Rational& q,
                                                      int64_t lo, int64_t mu,
                                                      int64_t hi) {
  if (hi - lo + 1 < 4) {
    return absl::InvalidArgumentError("support needs at least four points");
  }
  auto pmf = CensoredLaplaceRationalPmf(q, lo, mu, hi);
  if (!pmf.ok()) return pmf.status();
  std::vector<int64_t> order = {mu, mu + 1, mu - 1};
  for (int64_t y = lo; y <= hi; ++y) order.push_back(y);
  for (int64_t y : order) {
    auto i = pmf->IndexOf(y);
    if (!i) continue;
    if (!IsDyadic(pmf->exact_mass(*i))) {
      return NonDyadicWitness{y, pmf->exact_mass(*i)};
    }
  }
  return absl::InternalError("no non-dyadic mass found");
}

}  // namespace jotdp
