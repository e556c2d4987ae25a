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

#ifndef PRIVEST_RISK_HPP_
#define PRIVEST_RISK_HPP_

#include <cstdint>

#include "privest/estimation.hpp"
#include "privest/mechanism.hpp"

namespace privest {

struct RiskReport {
  double analytic = 0.0;    // expected l2^2 loss at the requested p (NaN if no closed form)
  double worst_case = 0.0;  // value at uniform p (NaN if no closed form)
  double mc_mean = 0.0;
  double mc_stderr = 0.0;
  std::int64_t trials = 0;
  std::int64_t n = 0;
};

// Closed-form expected l2^2 loss of the subset mechanism with the empirical
// estimator at a given p.
double AnalyticL2Risk(int k, double epsilon, int d, std::int64_t n, const Distribution& p);

// The same risk at the worst-case (uniform) p.
double WorstCaseRisk(int k, double epsilon, int d, std::int64_t n);

// The d-dependent factor (d e^eps + k - d)^2 / (d (k - d)).
double SubsetRiskObjective(int k, double epsilon, int d);

struct OptimalD {
  int d_star = 0;
  double objective = 0.0;
};

// Minimizes SubsetRiskObjective over d in {1..k-1} by comparing only
// ceil(k/(e^eps+1)) and floor(k/(e^eps+1)), clamped to the domain; ties go
// to the smaller d.
OptimalD OptimalSubsetSize(int k, double epsilon);

// The constant M(k, eps) = n * WorstCaseRisk(k, eps, d*, n).
double BigM(int k, double epsilon);

// Dominant term M(k, eps) / n of the minimax lower bound. The remainder is
// O(n^{-14/13}) with an inexplicit constant and is not computed.
double LowerBoundDominant(int k, double epsilon, std::int64_t n);

enum class EstimatorKind { kSubsetEmpirical, kLeastSquares };

// Monte Carlo estimate of the expected l2^2 loss of (mechanism, estimator)
// at p. Trials use independent RNG streams keyed by (seed, trial), so the
// result is identical for any thread count.
RiskReport MonteCarloRisk(const Mechanism& m, EstimatorKind estimator,
                          const Distribution& p, std::int64_t n, std::int64_t trials,
                          std::uint64_t seed, int threads);

}  // namespace privest

#endif  // PRIVEST_RISK_HPP_
