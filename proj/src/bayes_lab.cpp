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

#include "privest/bayes_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

#include "privest/errors.hpp"
#include "privest/lower_bound.hpp"
#include "privest/parallel.hpp"

namespace privest {
namespace {

// Neumaier-compensated accumulator; order-independent to well below 1e-12
// for the grid sizes used here.
class CompensatedSum {
 public:
  void Add(double x) {
    const double t = sum_ + x;
    if (std::fabs(sum_) >= std::fabs(x)) {
      comp_ += (sum_ - t) + x;
    } else {
      comp_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double Value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// sum_j u_j q_ij / q_i with the dependent coordinate u_k = -sum u_j folded in.
double ClassRatio(const ReducedMechanism& r, int i, std::span<const double> u) {
  double acc = 0.0, total_u = 0.0;
  for (int j = 0; j < r.k - 1; ++j) {
    acc += u[j] * r.q_cond(i, j);
    total_u += u[j];
  }
  acc -= total_u * r.q_cond(i, r.k - 1);
  return acc / r.q_bar[i];
}

void ValidateShapes(const ReducedMechanism& r, const CountVector& counts,
                    std::span<const double> u) {
  if (counts.v.size() != static_cast<std::size_t>(r.classes())) {
    Fail(ErrorCode::kDimensionMismatch, "counts do not match the reduced alphabet");
  }
  if (u.size() != static_cast<std::size_t>(r.k - 1)) {
    Fail(ErrorCode::kDimensionMismatch, "u must have k-1 coordinates");
  }
}

std::optional<double> TryLogPosteriorG(const ReducedMechanism& r,
                                       const CountVector& counts,
                                       std::span<const double> u) {
  double g = 0.0;
  for (int i = 0; i < r.classes(); ++i) {
    const double ratio = ClassRatio(r, i, u);
    if (!(1.0 + ratio > 0.0)) return std::nullopt;
    g += (static_cast<double>(counts.n) * r.q_bar[i] + counts.v[i]) * std::log1p(ratio);
  }
  return g;
}

struct GridSpec {
  int dims = 0;
  int resolution = 0;
  double half_width = 0.0;  // per axis
  double step = 0.0;

  double Coordinate(int idx) const {
    return -half_width + (static_cast<double>(idx) + 0.5) * step;
  }
};

GridSpec MakeGrid(const PriorSpec& prior, int resolution) {
  if (prior.k != 2 && prior.k != 3) {
    Fail(ErrorCode::kUnsupportedK, "grid posteriors support k in {2, 3}");
  }
  if (resolution < 64) {
    Fail(ErrorCode::kResolutionTooCoarse, "need at least 64 nodes per axis");
  }
  if (!(prior.radius > 0.0)) Fail(ErrorCode::kInvalidArgument, "radius must be positive");
  GridSpec grid;
  grid.dims = prior.k - 1;
  grid.resolution = resolution;
  // Bounding box of B(alpha): |u_i| <= alpha sqrt(((I+J)^-1)_ii) with
  // ((I+J)^-1)_ii = m/(m+1) for m = k-1.
  const double m = static_cast<double>(grid.dims);
  grid.half_width = prior.radius * std::sqrt(m / (m + 1.0));
  grid.step = 2.0 * grid.half_width / static_cast<double>(resolution);
  return grid;
}

bool InsideEllipsoid(std::span<const double> u, double radius) {
  double quad = 0.0, total = 0.0;
  for (double x : u) {
    quad += x * x;
    total += x;
  }
  quad += total * total;
  return quad < radius * radius;
}

}  // namespace

PriorSpec PriorSpec::Defaults(int k, std::int64_t n) {
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "need n >= 1");
  PriorSpec prior;
  prior.k = k;
  prior.n = n;
  prior.radius = std::pow(static_cast<double>(n), -5.0 / 13.0);
  return prior;
}

std::vector<double> SamplePriorPoint(const PriorSpec& prior, CounterRng& rng) {
  const int m = prior.k - 1;
  if (m < 1) Fail(ErrorCode::kInvalidArgument, "need k >= 2");
  // Uniform on the unit ball, then the linear map L^-T carries it onto the
  // ellipsoid u^T (I+J) u < radius^2.
  std::vector<double> z(m);
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (int i = 0; i < m; ++i) {
      z[i] = rng.NextGaussian();
      norm2 += z[i] * z[i];
    }
  } while (norm2 == 0.0);
  const double radius_frac =
      std::pow(rng.NextDouble(), 1.0 / static_cast<double>(m));
  const double scale = prior.radius * radius_frac / std::sqrt(norm2);
  for (double& x : z) x *= scale;

  const Matrix l = CholeskyLower(IdentityPlusOnes(m));
  TransposedSolveInPlace(l, z);
  return z;
}

double LogPosteriorG(const ReducedMechanism& r, const CountVector& counts,
                     std::span<const double> u) {
  ValidateShapes(r, counts, u);
  const std::optional<double> g = TryLogPosteriorG(r, counts, u);
  if (!g) Fail(ErrorCode::kDomainViolation, "log argument is nonpositive at this u");
  return *g;
}

double QuadraticG2(const ReducedMechanism& r, const CountVector& counts,
                   std::span<const double> u) {
  ValidateShapes(r, counts, u);
  double g2 = 0.0;
  for (int i = 0; i < r.classes(); ++i) {
    const double ratio = ClassRatio(r, i, u);
    g2 += counts.v[i] * ratio;
    g2 -= 0.5 * static_cast<double>(counts.n) * r.q_bar[i] * ratio * ratio;
  }
  return g2;
}

double HV(const ReducedMechanism& r, const CountVector& counts,
          std::span<const double> u) {
  ValidateShapes(r, counts, u);
  double h = 0.0;
  for (int i = 0; i < r.classes(); ++i) {
    const double diff = ClassRatio(r, i, u) * r.q_bar[i] -
                        counts.v[i] / static_cast<double>(counts.n);
    h += static_cast<double>(counts.n) / r.q_bar[i] * diff * diff;
  }
  return h;
}

GaussianParams PosteriorGaussian(const ReducedMechanism& r, const CountVector& counts) {
  const Matrix phi = PhiMatrix(r, counts.n);
  const SymmetricEigen eig = JacobiEigen(phi);
  if (!(eig.values.front() > 1e-12 * std::max(eig.values.back(), 0.0))) {
    Fail(ErrorCode::kSingularPhi, "Phi is singular; no Gaussian approximation");
  }
  const Matrix chol = CholeskyLower(phi);
  GaussianParams params;
  params.mean = SpdSolve(chol, WVector(r, counts));

  const std::size_t m = phi.rows();
  params.covariance = Matrix(m, m);
  std::vector<double> b(m);
  for (std::size_t j = 0; j < m; ++j) {
    std::fill(b.begin(), b.end(), 0.0);
    b[j] = 1.0;
    const std::vector<double> col = SpdSolve(chol, b);
    for (std::size_t i = 0; i < m; ++i) params.covariance(i, j) = col[i];
  }
  return params;
}

PosteriorGrid ComputePosteriorGrid(const ReducedMechanism& r, const CountVector& counts,
                                   const PriorSpec& prior, int resolution) {
  if (r.k != prior.k) Fail(ErrorCode::kDimensionMismatch, "prior and mechanism disagree on k");
  const GridSpec grid = MakeGrid(prior, resolution);
  const int m = grid.dims;
  const std::int64_t nodes =
      m == 1 ? grid.resolution
             : static_cast<std::int64_t>(grid.resolution) * grid.resolution;

  PosteriorGrid out;
  out.axes.resize(m);
  for (int axis = 0; axis < m; ++axis) {
    out.axes[axis].resize(grid.resolution);
    for (int i = 0; i < grid.resolution; ++i) out.axes[axis][i] = grid.Coordinate(i);
  }
  out.log_weights.assign(nodes, -std::numeric_limits<double>::infinity());

  double max_log = -std::numeric_limits<double>::infinity();
  std::vector<double> u(m);
  for (std::int64_t node = 0; node < nodes; ++node) {
    u[0] = out.axes[0][node % grid.resolution];
    if (m == 2) u[1] = out.axes[1][node / grid.resolution];
    if (!InsideEllipsoid(u, prior.radius)) continue;
    const std::optional<double> g = TryLogPosteriorG(r, counts, u);
    if (g) {
      out.log_weights[node] = *g;
      max_log = std::max(max_log, *g);
    }
  }
  if (!std::isfinite(max_log)) {
    Fail(ErrorCode::kDomainViolation, "posterior has no mass on the grid");
  }
  CompensatedSum total;
  for (double lw : out.log_weights) {
    if (std::isfinite(lw)) total.Add(std::exp(lw - max_log));
  }
  out.log_normalizer = max_log + std::log(total.Value());
  return out;
}

GridMoments GridPosteriorMoments(const ReducedMechanism& r, const CountVector& counts,
                                 const PriorSpec& prior, int resolution) {
  const PosteriorGrid grid = ComputePosteriorGrid(r, counts, prior, resolution);
  // A singular Phi (non-informative channel) leaves no Gaussian to compare
  // against; the exact grid moments are still well defined.
  std::optional<GaussianParams> gauss;
  try {
    gauss = PosteriorGaussian(r, counts);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularPhi) throw;
  }
  const Matrix phi = PhiMatrix(r, counts.n);

  const int m = static_cast<int>(grid.axes.size());
  const int resolution_used = static_cast<int>(grid.axes[0].size());

  std::vector<double> log_gauss;
  double gauss_normalizer = 0.0;
  if (gauss) {
    log_gauss.assign(grid.nodes(), -std::numeric_limits<double>::infinity());
    double max_gauss = -std::numeric_limits<double>::infinity();
    std::vector<double> u(m);
    for (std::int64_t node = 0; node < grid.nodes(); ++node) {
      if (!std::isfinite(grid.log_weights[node])) continue;  // same support mask
      u[0] = grid.axes[0][node % resolution_used];
      if (m == 2) u[1] = grid.axes[1][node / resolution_used];
      double quad = 0.0;
      for (int a = 0; a < m; ++a) {
        for (int b = 0; b < m; ++b) {
          quad += (u[a] - gauss->mean[a]) * phi(a, b) * (u[b] - gauss->mean[b]);
        }
      }
      log_gauss[node] = -0.5 * quad;
      max_gauss = std::max(max_gauss, log_gauss[node]);
    }
    CompensatedSum total;
    for (double lg : log_gauss) {
      if (std::isfinite(lg)) total.Add(std::exp(lg - max_gauss));
    }
    gauss_normalizer = max_gauss + std::log(total.Value());
  }

  GridMoments out;
  out.mean.assign(m, 0.0);
  out.covariance = Matrix(m, m);
  std::vector<CompensatedSum> mean_acc(m);
  std::vector<CompensatedSum> cov_acc(m * m);
  CompensatedSum tv_acc;
  std::vector<double> u(m);
  for (std::int64_t node = 0; node < grid.nodes(); ++node) {
    const double lw = grid.log_weights[node];
    const double p = std::isfinite(lw) ? std::exp(lw - grid.log_normalizer) : 0.0;
    if (gauss) {
      const double q = std::isfinite(log_gauss[node])
                           ? std::exp(log_gauss[node] - gauss_normalizer)
                           : 0.0;
      tv_acc.Add(std::fabs(p - q));
    }
    if (p == 0.0) continue;
    u[0] = grid.axes[0][node % resolution_used];
    if (m == 2) u[1] = grid.axes[1][node / resolution_used];
    for (int a = 0; a < m; ++a) mean_acc[a].Add(p * u[a]);
    for (int a = 0; a < m; ++a) {
      for (int b = 0; b < m; ++b) cov_acc[a * m + b].Add(p * u[a] * u[b]);
    }
  }
  for (int a = 0; a < m; ++a) out.mean[a] = mean_acc[a].Value();
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) {
      out.covariance(a, b) = cov_acc[a * m + b].Value() - out.mean[a] * out.mean[b];
    }
  }
  out.tv_to_gaussian =
      gauss ? 0.5 * tv_acc.Value() : std::numeric_limits<double>::quiet_NaN();
  return out;
}

BayesLossReport BayesLossMc(const ReducedMechanism& r, const PriorSpec& prior,
                            std::int64_t trials, std::uint64_t seed, int resolution,
                            int threads) {
  if (trials < 1) Fail(ErrorCode::kInvalidArgument, "need trials >= 1");
  if (r.k != prior.k) Fail(ErrorCode::kDimensionMismatch, "prior and mechanism disagree on k");
  const Mechanism embedded = EmbedAsMechanism(r);

  std::vector<double> losses(trials);
  std::vector<double> tvs(trials);
  ParallelFor(trials, threads, [&](std::int64_t trial) {
    CounterRng rng = CounterRng::Stream(seed, trial);
    const std::vector<double> u = SamplePriorPoint(prior, rng);

    std::vector<double> p(r.k, 1.0 / static_cast<double>(r.k));
    double total_u = 0.0;
    for (int j = 0; j < r.k - 1; ++j) {
      p[j] += u[j];
      total_u += u[j];
    }
    p[r.k - 1] -= total_u;
    for (double x : p) {
      if (x < 0.0 || x > 1.0) {
        Fail(ErrorCode::kSimplexViolation, "prior radius pushes p outside the simplex");
      }
    }

    const Sampler sampler(embedded, Distribution{p});
    const CountVector counts = sampler.Run(prior.n, rng).counts;

    const GridMoments moments = GridPosteriorMoments(r, counts, prior, resolution);
    double loss = 0.0, mean_total = 0.0;
    for (int j = 0; j < r.k - 1; ++j) {
      const double diff = u[j] - moments.mean[j];
      loss += diff * diff;
      mean_total += moments.mean[j];
    }
    const double diff_k = -total_u + mean_total;  // U_k - mean_k
    loss += diff_k * diff_k;
    losses[trial] = loss;
    tvs[trial] = moments.tv_to_gaussian;
  });

  const MeanStderr ms = PairwiseMeanStderr(losses);
  BayesLossReport report;
  report.loss = ms.mean;
  report.stderr_of_loss = ms.stderr_of_mean;
  try {
    report.reference = TracePlusQuad(PhiMatrix(r, prior.n));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularPhi) throw;
    report.reference = std::numeric_limits<double>::quiet_NaN();
  }
  report.tv_samples = std::move(tvs);
  return report;
}

Log1pBoundReport Log1pQuadraticBound(double x) {
  if (x < -2.0 / 3.0) {
    Fail(ErrorCode::kDomainViolation, "the bound needs x >= -2/3");
  }
  Log1pBoundReport report;
  report.rhs = std::fabs(x) * std::fabs(x) * std::fabs(x);
  if (std::fabs(x) <= 0.25) {
    // Remainder series log(1+x) - x + x^2/2 = x^3 sum_{i>=0} (-x)^i/(i+3);
    // direct subtraction would cancel catastrophically near zero.
    double series = 0.0, term = 1.0;
    for (int i = 0; i < 64; ++i) {
      series += term / static_cast<double>(i + 3);
      term *= -x;
      if (std::fabs(term) < 1e-20) break;
    }
    report.lhs = report.rhs * std::fabs(series);
  } else {
    report.lhs = std::fabs(std::log1p(x) - (x - 0.5 * x * x));
  }
  report.ok = report.lhs <= report.rhs;
  return report;
}

}  // namespace privest
