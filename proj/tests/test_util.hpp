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

#ifndef PRIVEST_TESTS_TEST_UTIL_HPP_
#define PRIVEST_TESTS_TEST_UTIL_HPP_

#include <cmath>
#include <random>
#include <vector>

#include "privest/mechanism.hpp"

namespace privest {
namespace testing {

inline std::vector<double> RandomSimplexPoint(int k, std::mt19937& gen) {
  std::exponential_distribution<double> expo(1.0);
  std::vector<double> p(k);
  double total = 0.0;
  for (double& x : p) {
    x = expo(gen);
    total += x;
  }
  double running = 0.0;
  for (int i = 0; i + 1 < k; ++i) {
    p[i] /= total;
    running += p[i];
  }
  p[k - 1] = 1.0 - running;
  return p;
}

// Random member of the extremal class: rows come in complementary pairs
// c (e^eps s + (1-s)) and c (e^eps (1-s) + s) for random nonconstant bit
// patterns s, which keeps every column sum equal; weights are normalized so
// the columns sum to one.
inline Mechanism RandomExtremalMechanism(int k, double eps, std::mt19937& gen,
                                         int patterns = 0) {
  const double ee = std::exp(eps);
  if (patterns <= 0) patterns = k + 2;
  std::uniform_real_distribution<double> uniform(0.2, 1.0);
  std::uniform_int_distribution<std::uint32_t> mask_dist(1, (1u << k) - 2);

  std::vector<std::uint32_t> masks(patterns);
  std::vector<double> weights(patterns);
  double total = 0.0;
  for (int r = 0; r < patterns; ++r) {
    masks[r] = mask_dist(gen);
    weights[r] = uniform(gen);
    total += weights[r];
  }
  for (double& w : weights) w /= total * (ee + 1.0);

  Matrix cond(2 * patterns, k);
  for (int r = 0; r < patterns; ++r) {
    for (int j = 0; j < k; ++j) {
      const bool bit = (masks[r] >> j) & 1u;
      cond(2 * r, j) = weights[r] * (bit ? ee : 1.0);
      cond(2 * r + 1, j) = weights[r] * (bit ? 1.0 : ee);
    }
  }
  return CustomMechanism(k, eps, std::move(cond));
}

}  // namespace testing
}  // namespace privest

#endif  // PRIVEST_TESTS_TEST_UTIL_HPP_
