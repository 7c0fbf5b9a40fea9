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

// Reference computations written directly from the defining formulas, with no
// calls into the library. Tests compare library results against these.

#ifndef JOTDP_TESTS_ORACLES_H_
#define JOTDP_TESTS_ORACLES_H_

#include <cstdint>
#include <map>
#include <vector>

#include <boost/multiprecision/gmp.hpp>

namespace oracle {

using Q = boost::multiprecision::mpq_rational;
using Z = boost::multiprecision::mpz_int;

// Success probability of flip j of the adaptive count: 1 / ((n -. j) + k)^c.
Q FlipProbability(uint64_t n, uint32_t c, uint64_t k, uint64_t j);

// f(0), ..., f(count - 1) of the adaptive count.
std::vector<Q> AdaptivePmf(uint64_t n, uint32_t c, uint64_t k, uint64_t count);

// P(output >= i).
Q AdaptiveSurvival(uint64_t n, uint32_t c, uint64_t k, uint64_t i);

// Runs the DSG coin procedure on every possible coin string: one sign coin,
// then clamp + 1 trials of kbits coins each (success iff the kbits-bit
// integer is below t). G is the first success, or clamp if there is none.
// Feasible for 1 + kbits * (clamp + 1) <= 24.
std::map<int64_t, Q> DsgByCoinEnumeration(int64_t mu, uint64_t t,
                                          uint32_t kbits, int64_t lo,
                                          int64_t hi, uint64_t clamp);

// Same law from the geometric formula P(G = g) = (1 - p)^g p, g < clamp and
// P(G = clamp) = (1 - p)^clamp.
std::map<int64_t, Q> DsgClosedForm(int64_t mu, const Q& p, int64_t lo,
                                   int64_t hi, uint64_t clamp);

// Censored discrete Laplace with a rational q = e^{-1/s}:
// interior (1 - q)/(1 + q) q^|y - mu|, each boundary absorbs its tail.
std::map<int64_t, Q> CensoredLaplaceRational(const Q& q, int64_t lo,
                                             int64_t mu, int64_t hi);

// Censored discrete Laplace in long double by explicit tail summation.
std::map<int64_t, long double> CensoredLaplace(int64_t mu, long double s,
                                               int64_t lo, int64_t hi);

// True iff the reduced denominator has no odd prime factor, decided by
// stripping factors of two.
bool DyadicByFactorization(const Q& q);

// m_i = ceil((2 / eps_i) * ceil(ln(1 / beta_i))) with eps_i = eps'/2^i and
// beta_i = beta/2^i.
uint64_t ScheduleM(double eps_prime, double beta, uint32_t i);

}  // namespace oracle

#endif  // JOTDP_TESTS_ORACLES_H_
