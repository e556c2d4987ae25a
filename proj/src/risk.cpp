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

#include "privest/risk.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "privest/errors.hpp"
#include "privest/linalg.hpp"
#include "privest/parallel.hpp"

namespace privest {
namespace {

void ValidateRiskParams(int k, double epsilon, int d, std::int64_t n) {
  if (k < 2) Fail(ErrorCode::kInvalidArgument, "need k >= 2");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    Fail(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  if (d < 1 || d > k - 1) Fail(ErrorCode::kDOutOfRange, "need 1 <= d <= k-1");
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "need n >= 1");
}

}  // namespace

double AnalyticL2Risk(int k, double epsilon, int d, std::int64_t n, const Distribution& p) {
  ValidateRiskParams(k, epsilon, d, n);
  if (p.k() != k) Fail(ErrorCode::kDimensionMismatch, "p has the wrong length");
  const double ee = std::exp(epsilon);
  const double em1 = ee - 1.0;
  const double kk = k, dd = d;
  double sum_sq = 0.0;
  for (double pi : p.probs) sum_sq += pi * pi;
  const double value = (dd * (kk - 2.0) + 1.0) * ee * ee / ((kk - dd) * em1 * em1) +
                       2.0 * (kk - 2.0) * ee / (em1 * em1) +
                       ((kk - 2.0) * (kk - dd) + 1.0) / (dd * em1 * em1) - sum_sq;
  return value / static_cast<double>(n);
}

double WorstCaseRisk(int k, double epsilon, int d, std::int64_t n) {
  ValidateRiskParams(k, epsilon, d, n);
  const double ee = std::exp(epsilon);
  const double kk = k, dd = d;
  return (kk - 1.0) * (kk - 1.0) / (static_cast<double>(n) * kk * (ee - 1.0) * (ee - 1.0)) *
         (dd * ee + kk - dd) * (dd * ee + kk - dd) / (dd * (kk - dd));
}

double SubsetRiskObjective(int k, double epsilon, int d) {
  const double ee = std::exp(epsilon);
  const double kk = k, dd = d;
  return (dd * ee + kk - dd) * (dd * ee + kk - dd) / (dd * (kk - dd));
}

OptimalD OptimalSubsetSize(int k, double epsilon) {
  if (k < 2) Fail(ErrorCode::kInvalidArgument, "need k >= 2");
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    Fail(ErrorCode::kInvalidArgument, "epsilon must be positive");
  }
  const double ee = std::exp(epsilon);
  const double x = static_cast<double>(k) / (ee + 1.0);
  auto clamp = [k](double v) {
    return std::min(std::max(static_cast<int>(v), 1), k - 1);
  };
  const int lo = clamp(std::floor(x));
  const int hi = clamp(std::ceil(x));

  OptimalD best{lo, SubsetRiskObjective(k, epsilon, lo)};
  if (hi != lo) {
    const double f_hi = SubsetRiskObjective(k, epsilon, hi);
    if (f_hi < best.objective) best = OptimalD{hi, f_hi};
  }
  return best;
}

double BigM(int k, double epsilon) {
  const OptimalD opt = OptimalSubsetSize(k, epsilon);
  const double ee = std::exp(epsilon);
  const double kk = k;
  return (kk - 1.0) * (kk - 1.0) / (kk * (ee - 1.0) * (ee - 1.0)) * opt.objective;
}

double LowerBoundDominant(int k, double epsilon, std::int64_t n) {
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "need n >= 1");
  return BigM(k, epsilon) / static_cast<double>(n);
}

RiskReport MonteCarloRisk(const Mechanism& m, EstimatorKind estimator,
                          const Distribution& p, std::int64_t n, std::int64_t trials,
                          std::uint64_t seed, int threads) {
  if (trials < 2) Fail(ErrorCode::kInvalidArgument, "need trials >= 2");
  if (estimator == EstimatorKind::kSubsetEmpirical && m.kind != MechanismKind::kSubset) {
    Fail(ErrorCode::kInvalidArgument, "the empirical estimator needs a subset mechanism");
  }
  const Sampler sampler(m, p);

  std::vector<double> losses(trials);
  ParallelFor(trials, threads, [&](std::int64_t trial) {
    const Sampler::Draws draws = sampler.Run(n, CounterRng::Stream(seed, trial));
    Estimate est;
    if (estimator == EstimatorKind::kSubsetEmpirical) {
      est = EmpiricalEstimate(*draws.subset, m.k, m.epsilon, m.subset_d);
    } else {
      est = LeastSquaresEstimate(draws.counts, sampler.reduced());
    }
    double loss = 0.0;
    for (int i = 0; i < m.k; ++i) {
      const double diff = est.p_hat[i] - p.probs[i];
      loss += diff * diff;
    }
    losses[trial] = loss;
  });

  const MeanStderr ms = PairwiseMeanStderr(losses);
  RiskReport report;
  report.mc_mean = ms.mean;
  report.mc_stderr = ms.stderr_of_mean;
  report.trials = trials;
  report.n = n;
  if (m.kind == MechanismKind::kSubset) {
    report.analytic = AnalyticL2Risk(m.k, m.epsilon, m.subset_d, n, p);
    report.worst_case = WorstCaseRisk(m.k, m.epsilon, m.subset_d, n);
  } else {
    report.analytic = std::numeric_limits<double>::quiet_NaN();
    report.worst_case = std::numeric_limits<double>::quiet_NaN();
  }
  return report;
}

}  // namespace privest
