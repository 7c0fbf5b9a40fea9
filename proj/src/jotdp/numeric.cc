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

#include "jotdp/numeric.h"

#include <cmath>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace jotdp {

std::string RationalToString(const Rational& q) {
  return numerator(q).str() + "/" + denominator(q).str();
}

absl::StatusOr<Rational> ParseRational(const std::string& text) {
  try {
    const auto slash = text.find('/');
    if (slash == std::string::npos) return Rational(BigInt(text));
    const BigInt num(text.substr(0, slash));
    const BigInt den(text.substr(slash + 1));
    if (den == 0) {
      return absl::InvalidArgumentError(
          absl::StrFormat("zero denominator in '%s'", text));
    }
    return Rational(num, den);
  } catch (const std::exception&) {
    return absl::InvalidArgumentError(
        absl::StrFormat("not a rational: '%s'", text));
  }
}

bool IsDyadic(const Rational& q) {
  const BigInt& den = denominator(q);
  return den > 0 && (den & (den - 1)) == 0;
}

Real LogRational(const Rational& q) {
  // Numerator and denominator may have thousands of digits; take logs
  // separately so the quotient never has to be formed in floating point.
  return log(static_cast<Real>(numerator(q))) -
         log(static_cast<Real>(denominator(q)));
}

Rational Dyadic::ToRational() const {
  return Rational(BigInt(numerator), BigInt(1) << kbits);
}

double Dyadic::ToDouble() const {
  return std::ldexp(static_cast<double>(numerator), -static_cast<int>(kbits));
}

namespace {

constexpr unsigned __int128 kFixedMax = ~static_cast<unsigned __int128>(0);

unsigned __int128 SplitToFixed(const Real& scaled_integer) {
  const Real high = floor(ldexp(scaled_integer, -64));
  const Real low = scaled_integer - ldexp(high, 64);
  return (static_cast<unsigned __int128>(high.convert_to<uint64_t>()) << 64) |
         low.convert_to<uint64_t>();
}

}  // namespace

unsigned __int128 FixedPointFloor(const Real& x, int n) {
  if (x <= 0) return 0;
  const Real scaled = floor(ldexp(x, n));
  if (scaled >= ldexp(Real(1), 128)) return kFixedMax;
  return SplitToFixed(scaled);
}

unsigned __int128 FixedPointCeil(const Real& x, int n) {
  if (x <= 0) return 0;
  const Real scaled = ceil(ldexp(x, n));
  if (scaled >= ldexp(Real(1), 128)) return kFixedMax;
  return SplitToFixed(scaled);
}

}  // namespace jotdp
