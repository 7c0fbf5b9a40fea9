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

#include "jotdp/samplers.h"

#include <algorithm>
#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"

namespace jotdp {
namespace {

// Fixed-point tails t(d) = e^{-d/s} / (1 + e^{-1/s}) for one scale, as
// floor and ceil of t(d) * 2^128. Past `floor_.size()` the tail is below
// 2^-128 when `complete` is set: floor 0, ceil 1.
struct TailTable {
  std::vector<uint128> floor_;
  std::vector<uint128> ceil_;
  bool complete = false;

  uint128 Floor(uint64_t d) const { return d < floor_.size() ? floor_[d] : 0; }
  uint128 Ceil(uint64_t d) const { return d < ceil_.size() ? ceil_[d] : 1; }
};

std::shared_ptr<const TailTable> BuildTailTable(double scale, uint64_t length) {
  auto table = std::make_shared<TailTable>();
  const Real r = exp(Real(-1) / Real(scale));
  const Real underflow = ldexp(Real(1), -128);
  Real t = 1 / (1 + r);
  for (uint64_t d = 0; d < length; ++d) {
    if (t < underflow) {
      table->complete = true;
      break;
    }
    table->floor_.push_back(FixedPointFloor(t));
    table->ceil_.push_back(FixedPointCeil(t));
    t *= r;
  }
  return table;
}

// Tables are immutable once published; the cache only ever swaps in longer
// ones.
std::shared_ptr<const TailTable> GetTailTable(double scale, uint64_t length) {
  static std::mutex mu;
  static std::map<double, std::shared_ptr<const TailTable>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[scale];
  if (slot && (slot->complete || slot->floor_.size() >= length)) return slot;
  const uint64_t target =
      std::max<uint64_t>(length, slot ? 2 * slot->floor_.size() : 64);
  slot = BuildTailTable(scale, target);
  return slot;
}

absl::Status ValidateCdlSampling(const CensoredDLParams& params,
                                 const CostMeter& meter) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  if (params.mu < params.lo || params.mu > params.hi) {
    return absl::InvalidArgumentError(
        absl::StrFormat("need lo <= mu <= hi, got lo=%d mu=%d hi=%d",
                        params.lo, params.mu, params.hi));
  }
  if (meter.policy() != CostPolicy::kRamSteps) {
    return absl::FailedPreconditionError(
        "censored Laplace sampling is priced in RAM steps");
  }
  return absl::OkStatus();
}

// T(y) = floor(F(y) * 2^128), non-decreasing in y.
uint128 Threshold(const TailTable& table, int64_t mu, int64_t y) {
  if (y <= mu) return table.Floor(static_cast<uint64_t>(mu - y));
  // floor((1 - t) * 2^128) = 2^128 - ceil(t * 2^128)
  return uint128{0} - table.Ceil(static_cast<uint64_t>(y - mu + 1));
}

// Draws the 128-bit uniform U and returns lo + #{y in [lo, hi) : T(y) <= U}.
// The metered program scans all hi - lo thresholds; since T is monotone the
// host evaluates the same count by bisection. The caller charges the scan.
int64_t InvertCdl(const CensoredDLParams& params, RandomSource& source,
                  CostMeter& meter) {
  meter.Charge(2);
  const uint128 u =
      (static_cast<uint128>(source.RandUniform(UINT64_MAX, meter)) << 64) |
      source.RandUniform(UINT64_MAX, meter);
  const uint64_t span = static_cast<uint64_t>(params.hi - params.lo);
  const auto table = GetTailTable(params.scale, span + 2);
  int64_t first = params.lo, last = params.hi;  // first y with T(y) > U
  while (first < last) {
    const int64_t mid = first + (last - first) / 2;
    if (Threshold(*table, params.mu, mid) <= u) {
      first = mid + 1;
    } else {
      last = mid;
    }
  }
  return first;
}

}  // namespace

absl::StatusOr<int64_t> SampleCensoredDL(const CensoredDLParams& params,
                                         RandomSource& source,
                                         CostMeter& meter) {
  if (absl::Status s = ValidateCdlSampling(params, meter); !s.ok()) return s;
  const int64_t out = InvertCdl(params, source, meter);
  meter.Charge(static_cast<uint64_t>(params.hi - params.lo) + 1);
  return out;
}

absl::StatusOr<int64_t> SampleLeakyCensoredDL(const CensoredDLParams& params,
                                              RandomSource& source,
                                              CostMeter& meter) {
  if (absl::Status s = ValidateCdlSampling(params, meter); !s.ok()) return s;
  // Same draw; only the charge is cut short, as if the scan exited at mu.
  const int64_t out = InvertCdl(params, source, meter);
  meter.Charge(static_cast<uint64_t>(params.mu - params.lo) + 1);
  return out;
}

AdaptiveCountCost AdaptiveCountCostSchedule(uint32_t c) {
  AdaptiveCountCost cost;
  cost.fixed = 5;
  cost.per_flip = 7 + 2 * static_cast<uint64_t>(c);
  return cost;
}

absl::StatusOr<uint64_t> SampleAdaptiveCount(const AdaptiveCountParams& params,
                                             RandomSource& source,
                                             CostMeter& meter) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  // The largest bias denominator is (n + k)^c; check it once up front.
  {
    uint128 b = static_cast<uint128>(params.n) + params.k;
    uint128 power = 1;
    for (uint32_t j = 0; j < params.c; ++j) {
      if (b != 0 && power > (~uint128{0}) / b) {
        return absl::OutOfRangeError(absl::StrFormat(
            "(n + k)^c overflows 128 bits for n=%d k=%d c=%d", params.n,
            params.k, params.c));
      }
      power *= b;
    }
  }
  meter.Charge(3);  // n = input_len; count = 0; flag = 0
  uint64_t count = 0;
  while (true) {
    meter.Charge(1);  // loop test
    const uint64_t v = params.n > count ? params.n - count : 0;
    meter.Charge(1);
    const uint128 b = static_cast<uint128>(v) + params.k;
    meter.Charge(1);
    uint128 bound = 1;
    meter.Charge(1);
    for (uint32_t j = 0; j < params.c; ++j) {
      bound *= b;
      meter.Charge(2);
    }
    const uint128 r = source.RandUniformWide(bound - 1, meter);
    meter.Charge(1);  // branch test
    meter.Charge(1);  // flag = 1 or count += 1
    if (r == 0) break;
    ++count;
  }
  meter.Charge(2);  // final loop test; return
  return count;
}

absl::StatusOr<int64_t> SampleDsg(const DsgParams& params,
                                  RandomSource& source, CostMeter& meter) {
  if (absl::Status s = Validate(params); !s.ok()) return s;
  const bool negative = source.Coin(meter);
  uint64_t geometric = params.clamp_m;
  bool stopped = false;
  for (uint64_t g = 0; g <= params.clamp_m; ++g) {
    uint64_t v = 0;
    for (uint32_t b = 0; b < params.p.kbits; ++b) {
      v = (v << 1) | static_cast<uint64_t>(source.Coin(meter));
    }
    if (!stopped && v < params.p.numerator) {
      geometric = std::min(g, params.clamp_m);
      stopped = true;
    }
  }
  const int64_t g = static_cast<int64_t>(geometric);
  const int64_t z = negative ? params.mu - g : params.mu + 1 + g;
  return std::clamp(z, params.lo, params.hi);
}

}  // namespace jotdp
