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

#include <bit>

namespace jotdp {

std::string_view CostPolicyName(CostPolicy policy) {
  switch (policy) {
    case CostPolicy::kRamSteps:
      return "ram_steps";
    case CostPolicy::kCoinTossesOnly:
      return "coin_tosses_only";
  }
  return "unknown";
}

RandomSource::RandomSource(uint64_t seed) : seed_(seed), engine_(seed) {}

uint64_t RandomSource::RandUniform(uint64_t n, CostMeter& meter) {
  meter.ChargeRand();
  if (n == 0) return 0;
  const uint64_t mask =
      n == UINT64_MAX ? UINT64_MAX : std::bit_ceil(n + 1) - 1;
  while (true) {
    const uint64_t draw = NextWord() & mask;
    if (draw <= n) return draw;
  }
}

uint128 RandomSource::RandUniformWide(uint128 n, CostMeter& meter) {
  const uint64_t high = static_cast<uint64_t>(n >> 64);
  if (high == 0) return RandUniform(static_cast<uint64_t>(n), meter);
  meter.ChargeRand();
  const uint64_t high_mask =
      high == UINT64_MAX ? UINT64_MAX : std::bit_ceil(high + 1) - 1;
  while (true) {
    const uint128 draw =
        (static_cast<uint128>(NextWord() & high_mask) << 64) | NextWord();
    if (draw <= n) return draw;
  }
}

bool RandomSource::Coin(CostMeter& meter) {
  meter.ChargeCoin();
  if (bits_left_ == 0) {
    bit_buffer_ = NextWord();
    bits_left_ = 64;
  }
  const bool bit = bit_buffer_ & 1u;
  bit_buffer_ >>= 1;
  --bits_left_;
  return bit;
}

uint64_t DeriveSeed(uint64_t base, uint64_t index) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace jotdp
