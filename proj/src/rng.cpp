// Copyright 2026 The Privest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privest/rng.hpp"

#include <cmath>

#include "privest/errors.hpp"

namespace privest {
namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t Mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

CounterRng CounterRng::Stream(std::uint64_t seed, std::uint64_t stream_id) {
  // Two mixing rounds decouple nearby (seed, stream) pairs.
  const std::uint64_t key = Mix64(Mix64(seed + kGamma) ^ Mix64(stream_id * kGamma + 1));
  return CounterRng(key);
}

std::uint64_t CounterRng::NextU64() {
  counter_ += kGamma;
  return Mix64(key_ ^ Mix64(counter_));
}

double CounterRng::NextDouble() {
  return static_cast<double>(NextU64() >> 11) * 0x1.0p-53;
}

std::uint64_t CounterRng::NextBelow(std::uint64_t n) {
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "NextBelow(0)");
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = NextU64();
  } while (x >= limit);
  return x % n;
}

double CounterRng::NextGaussian() {
  if (have_spare_gaussian_) {
    have_spare_gaussian_ = false;
    return spare_gaussian_;
  }
  double u1;
  do {
    u1 = NextDouble();
  } while (u1 <= 0.0);
  const double u2 = NextDouble();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * M_PI * u2;
  spare_gaussian_ = r * std::sin(theta);
  have_spare_gaussian_ = true;
  return r * std::cos(theta);
}

AliasTable::AliasTable(std::span<const double> probs) {
  const std::size_t n = probs.size();
  if (n == 0) Fail(ErrorCode::kInvalidArgument, "empty distribution");
  double total = 0.0;
  for (double p : probs) {
    if (p < 0.0) Fail(ErrorCode::kInvalidArgument, "negative probability");
    total += p;
  }
  if (total <= 0.0) Fail(ErrorCode::kInvalidArgument, "zero-mass distribution");

  prob_.resize(n);
  alias_.resize(n);
  std::vector<double> scaled(n);
  for (std::size_t i = 0; i < n; ++i) scaled[i] = probs[i] * static_cast<double>(n) / total;

  std::vector<std::uint32_t> small, large;
  for (std::size_t i = 0; i < n; ++i) {
    (scaled[i] < 1.0 ? small : large).push_back(static_cast<std::uint32_t>(i));
  }
  while (!small.empty() && !large.empty()) {
    const std::uint32_t s = small.back();
    small.pop_back();
    const std::uint32_t l = large.back();
    prob_[s] = scaled[s];
    alias_[s] = l;
    scaled[l] -= 1.0 - scaled[s];
    if (scaled[l] < 1.0) {
      large.pop_back();
      small.push_back(l);
    }
  }
  for (std::uint32_t i : large) prob_[i] = 1.0;
  for (std::uint32_t i : small) prob_[i] = 1.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (prob_[i] >= 1.0) alias_[i] = static_cast<std::uint32_t>(i);
  }
}

std::size_t AliasTable::Sample(CounterRng& rng) const {
  const std::size_t i = static_cast<std::size_t>(rng.NextBelow(prob_.size()));
  return rng.NextDouble() < prob_[i] ? i : alias_[i];
}

CumulativeTable::CumulativeTable(std::span<const double> probs) {
  if (probs.empty()) Fail(ErrorCode::kInvalidArgument, "empty distribution");
  cum_.resize(probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0) Fail(ErrorCode::kInvalidArgument, "negative probability");
    acc += probs[i];
    cum_[i] = acc;
  }
  if (acc <= 0.0) Fail(ErrorCode::kInvalidArgument, "zero-mass distribution");
  // Guard the last bucket against rounding in the running sum.
  cum_.back() = acc;
}

std::size_t CumulativeTable::Sample(CounterRng& rng) const {
  const double x = rng.NextDouble() * cum_.back();
  std::size_t lo = 0, hi = cum_.size() - 1;
  while (lo < hi) {
    const std::size_t mid = (lo + hi) / 2;
    if (x < cum_[mid]) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  return lo;
}

}  // namespace privest
