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

#ifndef PRIVEST_BAYES_LAB_HPP_
#define PRIVEST_BAYES_LAB_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "privest/estimation.hpp"
#include "privest/linalg.hpp"
#include "privest/mechanism.hpp"
#include "privest/rng.hpp"

namespace privest {

// Uniform prior over the ellipsoid B(radius) = {u : u^T (I+J) u < radius^2}
// of deviations from the uniform distribution.
struct PriorSpec {
  int k = 0;
  double radius = 0.0;
  std::int64_t n = 0;

  static PriorSpec Defaults(int k, std::int64_t n);  // radius = n^{-5/13}
};

// Draws u uniformly from B(radius) (k-1 coordinates).
std::vector<double> SamplePriorPoint(const PriorSpec& prior, CounterRng& rng);

// Log likelihood ratio of the deviation u against the uniform distribution:
// g(u, y^n) = sum_i (n q_i + v_i) log(1 + sum_j u_j q_ij / q_i), with
// u_k = -sum_{j<k} u_j. Throws kDomainViolation when a log argument is
// nonpositive.
double LogPosteriorG(const ReducedMechanism& r, const CountVector& counts,
                     std::span<const double> u);

// Quadratic approximation g2 of g.
double QuadraticG2(const ReducedMechanism& r, const CountVector& counts,
                   std::span<const double> u);

// h_v(u) = sum_i (n / q_i) (sum_j u_j q_ij - v_i / n)^2 >= 0.
double HV(const ReducedMechanism& r, const CountVector& counts,
          std::span<const double> u);

struct GaussianParams {
  std::vector<double> mean;  // Phi^-1 w
  Matrix covariance;         // Phi^-1
};

// The Gaussian approximating the posterior of u given the observed counts.
GaussianParams PosteriorGaussian(const ReducedMechanism& r, const CountVector& counts);

// Log posterior tabulated on a uniform midpoint grid over the bounding box
// of B(radius); nodes outside the ellipsoid carry -infinity. Lay-out is
// row-major with axis 0 fastest.
struct PosteriorGrid {
  std::vector<std::vector<double>> axes;  // per-dimension node coordinates
  std::vector<double> log_weights;
  double log_normalizer = 0.0;  // log sum of exp(log_weights)

  std::int64_t nodes() const { return static_cast<std::int64_t>(log_weights.size()); }
};

PosteriorGrid ComputePosteriorGrid(const ReducedMechanism& r, const CountVector& counts,
                                   const PriorSpec& prior, int resolution);

struct GridMoments {
  std::vector<double> mean;  // k-1 coordinates
  Matrix covariance;
  double tv_to_gaussian = 0.0;
};

// Exact (up to midpoint quadrature) posterior moments over B(radius) on a
// uniform grid with `resolution` nodes per axis, plus the total variation
// distance on the grid between the normalized posterior and the
// restricted-renormalized Gaussian. Supports k in {2, 3}.
GridMoments GridPosteriorMoments(const ReducedMechanism& r, const CountVector& counts,
                                 const PriorSpec& prior, int resolution);

struct BayesLossReport {
  double loss = 0.0;    // mean over trials of sum_{i<=k} (U_i - E[U_i|Y^n])^2
  double stderr_of_loss = 0.0;
  double reference = 0.0;  // tr(Phi^-1) + 1^T Phi^-1 1 at the prior's n
  std::vector<double> tv_samples;  // tv_to_gaussian, one entry per trial
};

// Monte Carlo Bayes loss of the grid-posterior-mean estimator under the
// ellipsoid prior. Deterministic given the seed for any thread count.
BayesLossReport BayesLossMc(const ReducedMechanism& r, const PriorSpec& prior,
                            std::int64_t trials, std::uint64_t seed, int resolution,
                            int threads);

struct Log1pBoundReport {
  double lhs = 0.0;  // |log(1+x) - (x - x^2/2)|
  double rhs = 0.0;  // |x|^3
  bool ok = false;
};

// The cubic remainder bound on the quadratic expansion of log(1+x), valid
// for x >= -2/3. The remainder is evaluated by series for small |x| so the
// comparison is not polluted by cancellation.
Log1pBoundReport Log1pQuadraticBound(double x);

}  // namespace privest

#endif  // PRIVEST_BAYES_LAB_HPP_
