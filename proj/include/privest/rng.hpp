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

#ifndef PRIVEST_RNG_HPP_
#define PRIVEST_RNG_HPP_

#include <cstdint>
#include <span>
#include <vector>

namespace privest {

// Counter-based generator in the splitmix64 family: the output for counter c
// under key k is a fixed avalanche mix of (k, c). Streams derived from the
// same seed with distinct stream ids are independent, which makes Monte Carlo
// runs reproducible for any trial-to-thread assignment.
class CounterRng {
 public:
  static CounterRng Stream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t NextU64();
  // Uniform in [0, 1) with 53 random bits.
  double NextDouble();
  // Uniform in {0, ..., n-1}, unbiased via rejection.
  std::uint64_t NextBelow(std::uint64_t n);
  // Standard normal via Box-Muller (consumes two uniforms per pair).
  double NextGaussian();

 private:
  CounterRng(std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool have_spare_gaussian_ = false;
  double spare_gaussian_ = 0.0;
};

// Walker/Vose alias table for O(1) draws from a fixed discrete distribution.
class AliasTable {
 public:
  explicit AliasTable(std::span<const double> probs);

  std::size_t Sample(CounterRng& rng) const;
  std::size_t size() const { return prob_.size(); }

 private:
  std::vector<double> prob_;
  std::vector<std::uint32_t> alias_;
};

// Inverse-CDF sampling from a fixed cumulative table (binary search).
class CumulativeTable {
 public:
  explicit CumulativeTable(std::span<const double> probs);

  std::size_t Sample(CounterRng& rng) const;
  std::size_t size() const { return cum_.size(); }

 private:
  std::vector<double> cum_;
};

}  // namespace privest

#endif  // PRIVEST_RNG_HPP_
