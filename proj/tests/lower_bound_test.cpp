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

#include "privest/lower_bound.hpp"

#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "privest/errors.hpp"
#include "privest/risk.hpp"
#include "test_util.hpp"

namespace privest {
namespace {

using testing::RandomExtremalMechanism;

const double kLn2 = std::log(2.0);
const double kLn3 = std::log(3.0);

ReducedMechanism BinaryRr3() { return ReduceAlphabet(KrrMechanism(2, kLn3)); }

ReducedMechanism NonInformative(int k) {
  Matrix cond(k, k);
  for (int y = 0; y < k; ++y) {
    for (int x = 0; x < k; ++x) cond(y, x) = 1.0 / k;
  }
  return ReduceAlphabet(CustomMechanism(k, 1.0, cond));
}

// Brute-force delta over a fine angular sweep of the constraint ellipsoid.
double BruteForceDelta(const ReducedMechanism& r, int steps = 200000) {
  const int m = r.k - 1;
  const Matrix phi = PhiMatrix(r, 1);
  const Matrix l = CholeskyLower(IdentityPlusOnes(m));
  auto quad = [&](const std::vector<double>& u) {
    double acc = 0.0;
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) acc += u[a] * phi(a, b) * u[b];
    }
    return acc;
  };
  double best = std::numeric_limits<double>::infinity();
  if (m == 1) {
    std::vector<double> u{1.0};
    TransposedSolveInPlace(l, u);  // u^T (I+J) u = 1
    best = quad(u);
  } else {
    for (int s = 0; s < steps; ++s) {
      const double theta = M_PI * static_cast<double>(s) / steps;
      std::vector<double> u{std::cos(theta), std::sin(theta)};
      TransposedSolveInPlace(l, u);
      best = std::min(best, quad(u));
    }
  }
  return std::sqrt(std::max(best, 0.0));
}

TEST(PhiMatrix, BinaryRandomizedResponseScalar) {
  const Matrix phi = PhiMatrix(BinaryRr3(), 1);
  ASSERT_EQ(phi.rows(), 1u);
  EXPECT_NEAR(phi(0, 0), 1.0, 1e-12);
}

TEST(PhiMatrix, NonInformativeMechanismIsZero) {
  const Matrix phi = PhiMatrix(NonInformative(4), 10);
  EXPECT_NEAR(phi.MaxAbs(), 0.0, 1e-15);
}

TEST(PhiMatrix, ScalesLinearlyInN) {
  const ReducedMechanism r = ReduceAlphabet(SubsetMechanism(5, 1.0, 2));
  const Matrix one = PhiMatrix(r, 1);
  const Matrix many = PhiMatrix(r, 1000);
  for (std::size_t i = 0; i < one.rows(); ++i) {
    for (std::size_t j = 0; j < one.cols(); ++j) {
      EXPECT_NEAR(many(i, j), 1000.0 * one(i, j), 1e-9 * std::fabs(one(i, j)) + 1e-15);
    }
  }
}

TEST(WVector, ZeroCenteredCountsGiveZero) {
  const ReducedMechanism r = BinaryRr3();
  CountVector counts;
  counts.n = 10;
  counts.t = {5, 5};
  counts.v = {0.0, 0.0};
  const std::vector<double> w = WVector(r, counts);
  EXPECT_DOUBLE_EQ(w[0], 0.0);
}

TEST(WVector, HandEvaluatedBinaryExample) {
  const ReducedMechanism r = BinaryRr3();
  const CountVector counts = MakeCountVector(r, std::vector<std::int64_t>{3, 1});
  ASSERT_NEAR(counts.v[0], 1.0, 1e-12);
  ASSERT_NEAR(counts.v[1], -1.0, 1e-12);
  const std::vector<double> w = WVector(r, counts);
  EXPECT_NEAR(w[0], 2.0, 1e-12);
}

TEST(WVector, LinearInTheCenteredCounts) {
  const ReducedMechanism r = ReduceAlphabet(KrrMechanism(4, 1.0));
  std::mt19937 gen(3);
  std::normal_distribution<double> normal;
  CountVector a, b, sum;
  a.n = b.n = sum.n = 100;
  a.t = b.t = sum.t = {25, 25, 25, 25};
  a.v.resize(4);
  b.v.resize(4);
  sum.v.resize(4);
  for (int i = 0; i < 4; ++i) {
    a.v[i] = normal(gen);
    b.v[i] = normal(gen);
    sum.v[i] = a.v[i] + b.v[i];
  }
  const std::vector<double> wa = WVector(r, a);
  const std::vector<double> wb = WVector(r, b);
  const std::vector<double> ws = WVector(r, sum);
  for (int m = 0; m < 3; ++m) EXPECT_NEAR(ws[m], wa[m] + wb[m], 1e-12);
}

TEST(TracePlusQuad, BinaryExampleEqualsBigM) {
  EXPECT_NEAR(TracePlusQuad(PhiMatrix(BinaryRr3(), 1)), 2.0, 1e-12);
  EXPECT_NEAR(BigM(2, kLn3), 2.0, 1e-12);
}

TEST(TracePlusQuad, ClosedFormOnIdentityPlusOnes) {
  // For a(I+J) at k=3: tr(B) + 1^T B 1 = 4/3 + 2/3 = 2 when a = 1.
  EXPECT_NEAR(TracePlusQuad(IdentityPlusOnes(2)), 2.0, 1e-12);
}

TEST(TracePlusQuad, InverseScaling) {
  Matrix phi = IdentityPlusOnes(3);
  const double base = TracePlusQuad(phi);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) phi(i, j) *= 8.0;
  }
  EXPECT_NEAR(TracePlusQuad(phi), base / 8.0, 1e-12);
}

TEST(TracePlusQuad, RejectsSingularPhi) {
  EXPECT_THROW(TracePlusQuad(PhiMatrix(NonInformative(3), 5)), Error);
}

TEST(Delta, BinaryRandomizedResponseClosedForm) {
  EXPECT_NEAR(Delta(BinaryRr3()), 1.0 / std::sqrt(2.0), 1e-12);
}

TEST(Delta, NonInformativeMechanismIsZero) {
  EXPECT_NEAR(Delta(NonInformative(3)), 0.0, 1e-12);
}

TEST(Delta, MatchesAngularBruteForce) {
  for (const Mechanism& m :
       {KrrMechanism(2, kLn3), KrrMechanism(3, kLn2), SubsetMechanism(3, 1.0, 1),
        KrapporMechanism(3, 1.3), SubsetMechanism(3, 0.4, 2)}) {
    const ReducedMechanism r = ReduceAlphabet(m);
    EXPECT_NEAR(Delta(r), BruteForceDelta(r), 1e-6);
  }
}

TEST(Delta, InvariantUnderProportionalSplit) {
  const Mechanism base = KrrMechanism(3, 1.0);
  Matrix split(4, 3);
  for (int x = 0; x < 3; ++x) {
    split(0, x) = 0.35 * base.cond(0, x);
    split(1, x) = 0.65 * base.cond(0, x);
    split(2, x) = base.cond(1, x);
    split(3, x) = base.cond(2, x);
  }
  const double d_base = Delta(ReduceAlphabet(base));
  const double d_split = Delta(ReduceAlphabet(CustomMechanism(3, 1.0, split)));
  EXPECT_NEAR(d_split, d_base, 1e-12);
}

TEST(Delta, MinimizerAttainsDeltaOnTheConstraint) {
  const ReducedMechanism r = ReduceAlphabet(SubsetMechanism(3, kLn2, 1));
  const DeltaResult res = DeltaWithMinimizer(r);
  const int m = r.k - 1;
  double constraint = 0.0, total = 0.0;
  for (double u : res.minimizer) {
    constraint += u * u;
    total += u;
  }
  constraint += total * total;
  EXPECT_NEAR(constraint, 1.0, 1e-10);
  const Matrix phi = PhiMatrix(r, 1);
  double quad = 0.0;
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) quad += res.minimizer[a] * phi(a, b) * res.minimizer[b];
  }
  EXPECT_NEAR(std::sqrt(quad), res.delta, 1e-10);
}

TEST(Delta0, HandEvaluatedValues) {
  EXPECT_NEAR(Delta0(2, kLn3), 0.125, 1e-12);
  EXPECT_NEAR(Delta0(10, kLn2), std::sqrt(210.0 / (32.0 * 13689.0)), 1e-12);
  EXPECT_GT(Delta0(3, kLn2), Delta0(30, kLn2));  // M grows with k
}

TEST(TraceGap, ExactEqualityOnTheIdentityPlusOnesFamily) {
  for (double a : {0.25, 1.0, 17.0}) {
    for (int m : {2, 4, 9}) {
      Matrix mat = IdentityPlusOnes(m);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) mat(i, j) *= a;
      }
      const TraceGap gap = TraceInequalityGap(mat);
      EXPECT_NEAR(gap.lhs, static_cast<double>(m), 1e-12 * m);
      EXPECT_NEAR(gap.slack, 0.0, 1e-12 * m);
    }
  }
}

TEST(TraceGap, StrictlyPositiveOffTheFamily) {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 2.0;
  EXPECT_GT(TraceInequalityGap(a).slack, 0.0);
}

TEST(TraceGap, NonNegativeOnRandomPdMatrices) {
  std::mt19937 gen(61);
  std::normal_distribution<double> normal;
  for (int m : {2, 3, 5, 9}) {
    for (int rep = 0; rep < 200; ++rep) {
      Matrix g(m, m);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) g(i, j) = normal(gen);
      }
      Matrix a(m, m);
      for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
          double s = 0.0;
          for (int t = 0; t < m; ++t) s += g(t, i) * g(t, j);
          a(i, j) = s;
        }
        a(i, i) += 0.1;
      }
      EXPECT_GE(TraceInequalityGap(a).slack, -1e-9);
    }
  }
}

TEST(TraceGap, RejectsNonPositiveDefiniteInput) {
  Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(0, 1) = 4.0;
  a(1, 0) = 4.0;
  a(1, 1) = 1.0;
  EXPECT_THROW(TraceInequalityGap(a), Error);
}

TEST(RowBoundCheck, EqualityExactlyAtTheOptimalSubsetSize) {
  for (int k : {3, 4, 6, 10}) {
    for (double eps : {0.3, kLn2, 1.5}) {
      const int d_star = OptimalSubsetSize(k, eps).d_star;
      const RowBoundReport report =
          RowBoundCheck(ReduceAlphabet(SubsetMechanism(k, eps, d_star)), eps);
      EXPECT_TRUE(report.ok);
      EXPECT_NEAR(report.max_row_moment, report.bound,
                  1e-12 * std::max(1.0, report.bound));
    }
  }
}

TEST(RowBoundCheck, StrictInequalityAwayFromTheOptimum) {
  const double eps = kLn2;
  const int k = 10;  // d* = 3
  for (int d : {1, 5, 9}) {
    const RowBoundReport report =
        RowBoundCheck(ReduceAlphabet(SubsetMechanism(k, eps, d)), eps);
    EXPECT_TRUE(report.ok);
    EXPECT_LT(report.max_row_moment, report.bound - 1e-9);
  }
}

TEST(RowBoundCheck, HoldsForRandomizedResponse) {
  for (int k : {2, 5, 12}) {
    for (double eps : {0.2, 1.0, 3.0}) {
      EXPECT_TRUE(RowBoundCheck(ReduceAlphabet(KrrMechanism(k, eps)), eps).ok);
    }
  }
}

TEST(RowBoundCheck, RejectsNonExtremalMechanisms) {
  Matrix cond(2, 2);
  cond(0, 0) = 0.6; cond(0, 1) = 0.5;
  cond(1, 0) = 0.4; cond(1, 1) = 0.5;
  const ReducedMechanism r = ReduceAlphabet(CustomMechanism(2, 1.0, cond));
  EXPECT_THROW(RowBoundCheck(r, 1.0), Error);
}

TEST(FisherInformation, MatchesPhiOnRandomExtremalMechanisms) {
  std::mt19937 gen(67);
  std::uniform_real_distribution<double> eps_dist(0.2, 2.5);
  for (int rep = 0; rep < 40; ++rep) {
    const int k = 2 + static_cast<int>(gen() % 5);
    const double eps = eps_dist(gen);
    const ReducedMechanism r = ReduceAlphabet(RandomExtremalMechanism(k, eps, gen));
    const Matrix phi = PhiMatrix(r, 3);
    const Matrix fisher = FisherInformation(r, 3);
    for (std::size_t i = 0; i < phi.rows(); ++i) {
      for (std::size_t j = 0; j < phi.cols(); ++j) {
        EXPECT_NEAR(fisher(i, j), phi(i, j), 1e-10 * std::max(1.0, phi.MaxAbs()));
      }
    }
  }
}

TEST(FisherInformation, BinaryExampleAndZeroCase) {
  const Matrix fisher = FisherInformation(BinaryRr3(), 1);
  EXPECT_NEAR(fisher(0, 0), 1.0, 1e-12);
  EXPECT_NEAR(FisherInformation(NonInformative(3), 4).MaxAbs(), 0.0, 1e-15);
}

TEST(TraceInequality, HoldsForRandomExtremalMechanisms) {
  std::mt19937 gen(71);
  std::uniform_real_distribution<double> eps_dist(0.2, 2.0);
  for (int rep = 0; rep < 60; ++rep) {
    const int k = 2 + static_cast<int>(gen() % 5);
    const double eps = eps_dist(gen);
    const ReducedMechanism r = ReduceAlphabet(RandomExtremalMechanism(k, eps, gen));
    double tpq = 0.0;
    try {
      tpq = TracePlusQuad(PhiMatrix(r, 7));
    } catch (const Error&) {
      continue;  // singular draw carries no information for the bound
    }
    EXPECT_GE(7.0 * tpq, BigM(k, eps) * (1.0 - 1e-9));
  }
}

TEST(TraceInequality, EqualityForTheOptimalSubsetScheme) {
  for (int k : {3, 4}) {
    const double eps = 0.8;
    const int d_star = OptimalSubsetSize(k, eps).d_star;
    const ReducedMechanism r = ReduceAlphabet(SubsetMechanism(k, eps, d_star));
    const Matrix phi = PhiMatrix(r, 1);
    // Phi must have the a(I+J) shape that characterizes equality.
    const double a = k > 2 ? phi(0, 1) : phi(0, 0) / 2.0;
    for (std::size_t i = 0; i < phi.rows(); ++i) {
      for (std::size_t j = 0; j < phi.cols(); ++j) {
        EXPECT_NEAR(phi(i, j), (i == j ? 2.0 : 1.0) * a, 1e-12 * std::fabs(a));
      }
    }
    EXPECT_NEAR(TracePlusQuad(phi), BigM(k, eps),
                1e-9 * std::max(1.0, BigM(k, eps)));
  }
}

TEST(SummarizePhi, BundlesTheCalculusCoherently) {
  const PhiSummary summary = SummarizePhi(BinaryRr3(), 1);
  EXPECT_TRUE(summary.phi.IsSymmetric(1e-12));
  EXPECT_FALSE(summary.phi_singular);
  EXPECT_NEAR(summary.trace_plus_quad, 2.0, 1e-12);
  EXPECT_NEAR(summary.delta, 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(summary.delta0, 0.125, 1e-12);
  // The trace bound holds whenever Phi is nonsingular.
  EXPECT_GE(summary.trace_plus_quad, BigM(2, kLn3) * (1.0 - 1e-9));

  const PhiSummary degenerate = SummarizePhi(NonInformative(3), 10);
  EXPECT_TRUE(degenerate.phi_singular);
  EXPECT_TRUE(std::isnan(degenerate.trace_plus_quad));
  EXPECT_NEAR(degenerate.delta, 0.0, 1e-12);
}

TEST(KlDivergence, StandardValues) {
  const std::vector<double> a{1.0, 0.0};
  const std::vector<double> b{0.5, 0.5};
  EXPECT_DOUBLE_EQ(KlDivergence(a, a), 0.0);
  EXPECT_NEAR(KlDivergence(a, b), std::log(2.0), 1e-15);
  EXPECT_THROW(KlDivergence(b, a), Error);  // support mismatch
}

TEST(TvDistance, StandardValues) {
  const std::vector<double> a{1.0, 0.0};
  const std::vector<double> b{0.0, 1.0};
  EXPECT_DOUBLE_EQ(TvDistance(a, a), 0.0);
  EXPECT_DOUBLE_EQ(TvDistance(a, b), 1.0);
}

TEST(KlTv, GibbsAndPinskerOnRandomPairs) {
  std::mt19937 gen(73);
  for (int rep = 0; rep < 1000; ++rep) {
    const int len = 2 + static_cast<int>(gen() % 6);
    const std::vector<double> m1 = testing::RandomSimplexPoint(len, gen);
    std::vector<double> m2 = testing::RandomSimplexPoint(len, gen);
    for (double& x : m2) x = 0.9 * x + 0.1 / len;  // keep m2 strictly positive
    const double kl = KlDivergence(m1, m2);
    const double tv = TvDistance(m1, m2);
    EXPECT_GE(kl, -1e-14);
    EXPECT_LE(tv * tv, kl / 2.0 + 1e-12);
  }
}

TEST(LeCamTwoPoint, FloorHoldsOnValidConfigurations) {
  for (const Mechanism& m :
       {KrrMechanism(3, kLn2), SubsetMechanism(4, 1.0, 1), KrapporMechanism(3, 0.8)}) {
    const ReducedMechanism r = ReduceAlphabet(m);
    const double delta = Delta(r);
    for (std::int64_t n : {100000, 1000000}) {
      const LeCamBound bound = LeCamTwoPoint(r, n);
      ASSERT_FALSE(bound.unbounded);
      const double floor = (1.0 - std::sqrt(0.5)) /
                           (4.0 * static_cast<double>(n) * delta * delta);
      EXPECT_GE(bound.value, floor * (1.0 - 1e-12));
    }
  }
}

TEST(LeCamTwoPoint, BeatsTwoBigMOverNWhenDeltaIsSmall) {
  // Mixture of randomized response with the uniform channel: delta shrinks
  // with the mixing weight while delta0 stays fixed.
  const int k = 3;
  const double eps = kLn2;
  const double lambda = 0.05;
  const Mechanism rr = KrrMechanism(k, eps);
  Matrix cond(k, k);
  for (int y = 0; y < k; ++y) {
    for (int x = 0; x < k; ++x) {
      cond(y, x) = (1.0 - lambda) / k + lambda * rr.cond(y, x);
    }
  }
  const ReducedMechanism r = ReduceAlphabet(CustomMechanism(k, eps, cond));
  ASSERT_LT(Delta(r), Delta0(k, eps));
  const std::int64_t n = 1000000;
  const LeCamBound bound = LeCamTwoPoint(r, n);
  ASSERT_FALSE(bound.unbounded);
  EXPECT_GE(bound.value, 2.0 * BigM(k, eps) / static_cast<double>(n));
}

TEST(LeCamTwoPoint, ReportsTheLargerOfTheTwoSignChoices) {
  std::mt19937 gen(83);
  for (int rep = 0; rep < 10; ++rep) {
    const ReducedMechanism r =
        ReduceAlphabet(RandomExtremalMechanism(3, 0.9, gen));
    const DeltaResult dr = DeltaWithMinimizer(r);
    if (!(dr.delta > 1e-6)) continue;
    const std::int64_t n = 1000000;
    const double scale = 1.0 / std::sqrt(static_cast<double>(n) * dr.delta * dr.delta);
    const std::vector<double> m1 = Marginal(r, UniformDistribution(3));

    double best = -1.0;
    for (int sign : {+1, -1}) {
      std::vector<double> p2(3, 1.0 / 3.0);
      double tail = 0.0;
      for (int i = 0; i < 2; ++i) {
        p2[i] += sign * dr.minimizer[i] * scale;
        tail += dr.minimizer[i];
      }
      p2[2] -= sign * tail * scale;
      bool feasible = true;
      for (double x : p2) {
        if (x < 0.0 || x > 1.0) feasible = false;
      }
      if (!feasible) continue;
      const double kl = KlDivergence(Marginal(r, Distribution{p2}), m1);
      const double value =
          std::max(0.0, (1.0 - std::sqrt(static_cast<double>(n) * kl / 2.0)) /
                            (4.0 * static_cast<double>(n) * dr.delta * dr.delta));
      best = std::max(best, value);
    }
    ASSERT_GE(best, 0.0);
    const LeCamBound bound = LeCamTwoPoint(r, n);
    EXPECT_NEAR(bound.value, best, 1e-15 * std::max(1.0, best));
  }
}

TEST(LeCamTwoPoint, ReportsDegenerateAndInfeasibleCases) {
  EXPECT_TRUE(LeCamTwoPoint(NonInformative(3), 100).unbounded);
  try {
    LeCamTwoPoint(ReduceAlphabet(KrrMechanism(3, kLn2)), 1);
    FAIL() << "expected simplex violation";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kSimplexViolation);
  }
}

}  // namespace
}  // namespace privest
