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

#ifndef JOTDP_NUMERIC_H_
#define JOTDP_NUMERIC_H_

#include <cstdint>
#include <string>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/gmp.hpp>

#include "absl/status/statusor.h"

namespace jotdp {

// 100 decimal digits of working precision for analytic PMFs.
using Real = boost::multiprecision::cpp_bin_float_100;
using BigInt = boost::multiprecision::mpz_int;
using Rational = boost::multiprecision::mpq_rational;

inline Real ToReal(const Rational& q) { return static_cast<Real>(q); }
inline double ToDouble(const Real& x) { return x.convert_to<double>(); }
inline double ToDouble(const Rational& q) { return q.convert_to<double>(); }

// "num/den" in lowest terms; integers render as "num/1".
std::string RationalToString(const Rational& q);
absl::StatusOr<Rational> ParseRational(const std::string& text);

// True iff the reduced denominator of q is a power of two.
bool IsDyadic(const Rational& q);

// Natural log of a positive rational at Real precision.
Real LogRational(const Rational& q);

// Exact t / 2^kbits.
struct Dyadic {
  uint64_t numerator = 0;
  uint32_t kbits = 0;

  Rational ToRational() const;
  double ToDouble() const;
};

// floor(x * 2^n), clamped to [0, 2^128 - 1]. Used to build 128-bit
// inversion thresholds.
unsigned __int128 FixedPointFloor(const Real& x, int n = 128);
unsigned __int128 FixedPointCeil(const Real& x, int n = 128);

}  // namespace jotdp

#endif  // JOTDP_NUMERIC_H_
