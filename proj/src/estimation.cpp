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

#include "privest/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "privest/errors.hpp"

namespace privest {
namespace {

std::vector<double> MatrixRowProbs(const Matrix& cond, int input, int outputs) {
  std::vector<double> col(outputs);
  for (int y = 0; y < outputs; ++y) col[y] = cond(y, input);
  return col;
}

}  // namespace

CountVector MakeCountVector(const ReducedMechanism& r, std::vector<std::int64_t> t) {
  if (t.size() != static_cast<std::size_t>(r.classes())) {
    Fail(ErrorCode::kDimensionMismatch, "count vector length does not match class count");
  }
  CountVector c;
  c.n = std::accumulate(t.begin(), t.end(), std::int64_t{0});
  c.t = std::move(t);
  c.v.resize(c.t.size());
  for (std::size_t i = 0; i < c.t.size(); ++i) {
    c.v[i] = static_cast<double>(c.t[i]) - static_cast<double>(c.n) * r.q_bar[i];
  }
  return c;
}

Sampler::Sampler(const Mechanism& m, Distribution p)
    : p_(std::move(p)),
      reduced_(ReduceAlphabet(m)),
      x_table_(std::span<const double>(p_.probs)) {
  if (p_.k() != m.k) {
    Fail(ErrorCode::kDimensionMismatch, "distribution and mechanism disagree on k");
  }
  y_tables_.reserve(m.k);
  for (int j = 0; j < m.k; ++j) {
    const std::vector<double> probs = MatrixRowProbs(m.cond, j, m.outputs());
    y_tables_.emplace_back(std::span<const double>(probs));
  }
  output_class_ = reduced_.class_map;
  if (m.kind == MechanismKind::kSubset) {
    masks_ = WeightDBitmasks(m.k, m.subset_d);
    subset_d_ = m.subset_d;
  }
}

Sampler::Draws Sampler::Run(std::int64_t n, CounterRng rng) const {
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "need n >= 1");
  std::vector<std::int64_t> raw(output_class_.size(), 0);
  for (std::int64_t s = 0; s < n; ++s) {
    const std::size_t x = x_table_.Sample(rng);
    const std::size_t y = y_tables_[x].Sample(rng);
    ++raw[y];
  }

  std::vector<std::int64_t> t(reduced_.classes(), 0);
  for (std::size_t y = 0; y < raw.size(); ++y) {
    if (output_class_[y] >= 0) t[output_class_[y]] += raw[y];
  }

  Draws draws;
  draws.counts = MakeCountVector(reduced_, std::move(t));
  if (!masks_.empty()) {
    SubsetCounts sc;
    sc.n = n;
    sc.d = subset_d_;
    sc.bit_counts.assign(reduced_.k, 0);
    for (std::size_t y = 0; y < raw.size(); ++y) {
      if (raw[y] == 0) continue;
      for (int j = 0; j < reduced_.k; ++j) {
        if ((masks_[y] >> j) & 1u) sc.bit_counts[j] += raw[y];
      }
    }
    draws.subset = std::move(sc);
  }
  return draws;
}

Sampler::Draws SamplePrivatized(const Mechanism& m, const Distribution& p,
                                std::int64_t n, std::uint64_t seed) {
  return Sampler(m, p).Run(n, CounterRng::Stream(seed, 0));
}

CountVector SamplePrivatized(const ReducedMechanism& r, const Distribution& p,
                             std::int64_t n, std::uint64_t seed) {
  return Sampler(EmbedAsMechanism(r), p).Run(n, CounterRng::Stream(seed, 0)).counts;
}

double EmpiricalCoefficientA(int k, double epsilon, int d) {
  const double ee = std::exp(epsilon);
  const double kk = k, dd = d;
  return ((kk - 1.0) * ee + (kk - 1.0) * (kk - dd) / dd) / ((kk - dd) * (ee - 1.0));
}

double EmpiricalCoefficientB(int k, double epsilon, int d) {
  const double ee = std::exp(epsilon);
  const double kk = k, dd = d;
  return ((dd - 1.0) * ee + kk - dd) / ((kk - dd) * (ee - 1.0));
}

Estimate EmpiricalEstimate(const SubsetCounts& counts, int k, double epsilon, int d) {
  if (k < 2 || d < 1 || d > k - 1) {
    Fail(ErrorCode::kDOutOfRange, "need 1 <= d <= k-1");
  }
  if (counts.bit_counts.size() != static_cast<std::size_t>(k)) {
    Fail(ErrorCode::kDimensionMismatch, "bit counts do not match k");
  }
  if (std::exp(epsilon) - 1.0 == 0.0) {
    Fail(ErrorCode::kEpsilonZero, "estimator undefined at e^eps - 1 = 0");
  }
  const double a = EmpiricalCoefficientA(k, epsilon, d);
  const double b = EmpiricalCoefficientB(k, epsilon, d);
  Estimate e;
  e.p_hat.resize(k);
  for (int i = 0; i < k; ++i) {
    e.p_hat[i] = a * static_cast<double>(counts.bit_counts[i]) /
                     static_cast<double>(counts.n) -
                 b;
  }
  return e;
}

Estimate LeastSquaresEstimate(const CountVector& counts, const ReducedMechanism& r) {
  const int L = r.classes();
  const int k = r.k;
  if (counts.t.size() != static_cast<std::size_t>(L)) {
    Fail(ErrorCode::kDimensionMismatch, "counts do not match the reduced alphabet");
  }

  // Parametrize p = uniform + N z with N's columns e_i - e_k; then minimize
  // ||A(p) - t/n||^2 over z, where column i of (A N) is q(., i) - q(., k).
  Matrix an(L, k - 1);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < k - 1; ++j) an(i, j) = r.q_cond(i, j) - r.q_cond(i, k - 1);
  }
  std::vector<double> resid(L);
  for (int i = 0; i < L; ++i) {
    resid[i] = static_cast<double>(counts.t[i]) / static_cast<double>(counts.n) -
               r.q_bar[i];  // subtract the uniform-p marginal
  }

  Matrix gram(k - 1, k - 1);
  for (int a = 0; a < k - 1; ++a) {
    for (int b = a; b < k - 1; ++b) {
      double s = 0.0;
      for (int i = 0; i < L; ++i) s += an(i, a) * an(i, b);
      gram(a, b) = s;
      gram(b, a) = s;
    }
  }
  std::vector<double> rhs(k - 1, 0.0);
  for (int a = 0; a < k - 1; ++a) {
    double s = 0.0;
    for (int i = 0; i < L; ++i) s += an(i, a) * resid[i];
    rhs[a] = s;
  }

  Matrix chol;
  try {
    chol = CholeskyLower(gram, 1e-12);
  } catch (const Error&) {
    Fail(ErrorCode::kRankDeficient, "channel matrix does not have rank k");
  }
  const std::vector<double> z = SpdSolve(chol, std::move(rhs));

  Estimate e;
  e.p_hat.assign(k, 1.0 / static_cast<double>(k));
  for (int j = 0; j < k - 1; ++j) {
    e.p_hat[j] += z[j];
    e.p_hat[k - 1] -= z[j];
  }
  return e;
}

Distribution ProjectToSimplex(const std::vector<double>& p_hat) {
  const std::size_t k = p_hat.size();
  if (k < 2) Fail(ErrorCode::kInvalidArgument, "need k >= 2");
  std::vector<double> sorted = p_hat;
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double running = 0.0;
  double tau = 0.0;
  for (std::size_t j = 0; j < k; ++j) {
    running += sorted[j];
    const double candidate = (running - 1.0) / static_cast<double>(j + 1);
    if (sorted[j] - candidate > 0.0) tau = candidate;
  }
  std::vector<double> out(k);
  double sum = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    out[i] = std::max(p_hat[i] - tau, 0.0);
    sum += out[i];
  }
  // Renormalize away the last few ulps so the invariants hold exactly.
  for (double& x : out) x /= sum;
  return Distribution{std::move(out)};
}

}  // namespace privest
