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
#include <vector>

#include <gtest/gtest.h>

namespace privest {
namespace {

TEST(CounterRng, StreamsAreReproducibleAndDistinct) {
  CounterRng a = CounterRng::Stream(42, 0);
  CounterRng b = CounterRng::Stream(42, 0);
  CounterRng c = CounterRng::Stream(42, 1);
  bool saw_difference = false;
  for (int i = 0; i < 64; ++i) {
    const std::uint64_t xa = a.NextU64();
    EXPECT_EQ(xa, b.NextU64());
    if (xa != c.NextU64()) saw_difference = true;
  }
  EXPECT_TRUE(saw_difference);
}

TEST(CounterRng, DoublesLiveInTheUnitInterval) {
  CounterRng rng = CounterRng::Stream(7, 3);
  double sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double x = rng.NextDouble();
    ASSERT_GE(x, 0.0);
    ASSERT_LT(x, 1.0);
    sum += x;
  }
  EXPECT_NEAR(sum / 1e5, 0.5, 5e-3);
}

TEST(CounterRng, NextBelowIsBoundedAndRoughlyUniform) {
  CounterRng rng = CounterRng::Stream(11, 0);
  std::vector<int> histogram(7, 0);
  for (int i = 0; i < 70000; ++i) ++histogram[rng.NextBelow(7)];
  for (int count : histogram) EXPECT_NEAR(count, 10000, 500);
}

TEST(CounterRng, GaussianMomentsAreSane) {
  CounterRng rng = CounterRng::Stream(13, 0);
  double sum = 0.0, sum_sq = 0.0;
  const int draws = 200000;
  for (int i = 0; i < draws; ++i) {
    const double x = rng.NextGaussian();
    sum += x;
    sum_sq += x * x;
  }
  EXPECT_NEAR(sum / draws, 0.0, 0.01);
  EXPECT_NEAR(sum_sq / draws, 1.0, 0.02);
}

TEST(AliasTable, ReproducesTheTargetFrequencies) {
  const std::vector<double> probs{0.5, 0.25, 0.125, 0.125};
  const AliasTable table(probs);
  CounterRng rng = CounterRng::Stream(17, 0);
  std::vector<int> histogram(probs.size(), 0);
  const int draws = 400000;
  for (int i = 0; i < draws; ++i) ++histogram[table.Sample(rng)];
  for (std::size_t i = 0; i < probs.size(); ++i) {
    EXPECT_NEAR(static_cast<double>(histogram[i]) / draws, probs[i], 5e-3);
  }
}

TEST(CumulativeTable, AgreesWithTheAliasTable) {
  const std::vector<double> probs{0.1, 0.7, 0.2};
  const CumulativeTable table(probs);
  CounterRng rng = CounterRng::Stream(19, 0);
  std::vector<int> histogram(probs.size(), 0);
  const int draws = 300000;
  for (int i = 0; i < draws; ++i) ++histogram[table.Sample(rng)];
  for (std::size_t i = 0; i < probs.size(); ++i) {
    EXPECT_NEAR(static_cast<double>(histogram[i]) / draws, probs[i], 5e-3);
  }
}

}  // namespace
}  // namespace privest
