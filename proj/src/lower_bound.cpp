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

#include <algorithm>
#include <cmath>
#include <limits>

#include "privest/errors.hpp"
#include "privest/risk.hpp"

namespace privest {
namespace {

constexpr double kEigenRelTol = 1e-12;

void RequirePositiveClassMass(const ReducedMechanism& r) {
  for (double q : r.q_bar) {
    if (!(q > 0.0)) Fail(ErrorCode::kZeroClassMass, "reduced class with zero mass");
  }
}

}  // namespace

Matrix PhiMatrix(const ReducedMechanism& r, std::int64_t n) {
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "need n >= 1");
  RequirePositiveClassMass(r);
  const int k = r.k;
  const int L = r.classes();
  Matrix phi(k - 1, k - 1);
  std::vector<double> z(k - 1);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < k - 1; ++j) z[j] = r.q_cond(i, j) - r.q_cond(i, k - 1);
    const double scale = static_cast<double>(n) / r.q_bar[i];
    for (int a = 0; a < k - 1; ++a) {
      for (int b = a; b < k - 1; ++b) {
        const double add = scale * z[a] * z[b];
        phi(a, b) += add;
        if (b != a) phi(b, a) += add;
      }
    }
  }
  return phi;
}

std::vector<double> WVector(const ReducedMechanism& r, const CountVector& counts) {
  RequirePositiveClassMass(r);
  if (counts.v.size() != static_cast<std::size_t>(r.classes())) {
    Fail(ErrorCode::kDimensionMismatch, "counts do not match the reduced alphabet");
  }
  const int k = r.k;
  std::vector<double> w(k - 1, 0.0);
  for (int i = 0; i < r.classes(); ++i) {
    const double vi_over_qi = counts.v[i] / r.q_bar[i];
    for (int m = 0; m < k - 1; ++m) {
      w[m] += (r.q_cond(i, m) - r.q_cond(i, k - 1)) * vi_over_qi;
    }
  }
  return w;
}

double TracePlusQuad(const Matrix& phi) {
  const std::size_t m = phi.rows();
  if (phi.cols() != m || m == 0) Fail(ErrorCode::kInvalidArgument, "need a square matrix");
  const SymmetricEigen eig = JacobiEigen(phi);
  const double lo = eig.values.front(), hi = eig.values.back();
  if (!(lo > kEigenRelTol * std::max(hi, 0.0))) {
    Fail(ErrorCode::kSingularPhi, "Phi is singular or nearly singular");
  }

  const Matrix chol = CholeskyLower(phi);
  double total = 0.0;
  std::vector<double> b(m);
  // tr(Phi^-1) = sum_i ||L^-1 e_i||^2, one forward solve per basis vector.
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(b.begin(), b.end(), 0.0);
    b[i] = 1.0;
    ForwardSolveInPlace(chol, b);
    for (double x : b) total += x * x;
  }
  std::fill(b.begin(), b.end(), 1.0);
  ForwardSolveInPlace(chol, b);
  for (double x : b) total += x * x;  // 1^T Phi^-1 1 = ||L^-1 1||^2
  return total;
}

DeltaResult DeltaWithMinimizer(const ReducedMechanism& r) {
  RequirePositiveClassMass(r);
  const std::size_t m = r.k - 1;
  const Matrix phi1 = PhiMatrix(r, 1);
  const Matrix g = IdentityPlusOnes(m);
  const Matrix l = CholeskyLower(g);

  // B = L^-1 Phi L^-T: generalized problem Phi u = lambda (I+J) u becomes an
  // ordinary symmetric one for y = L^T u.
  Matrix b(m, m);
  std::vector<double> col(m);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) col[i] = phi1(i, j);
    ForwardSolveInPlace(l, col);
    for (std::size_t i = 0; i < m; ++i) b(i, j) = col[i];
  }
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) col[j] = b(i, j);
    ForwardSolveInPlace(l, col);
    for (std::size_t j = 0; j < m; ++j) b(i, j) = col[j];
  }
  // Symmetrize away the last few ulps before the eigensolve.
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) {
      const double avg = 0.5 * (b(i, j) + b(j, i));
      b(i, j) = avg;
      b(j, i) = avg;
    }
  }

  const SymmetricEigen eig = JacobiEigen(b);
  const double lambda = std::max(eig.values.front(), 0.0);

  DeltaResult out;
  out.delta = std::sqrt(lambda);
  out.minimizer.resize(m);
  for (std::size_t i = 0; i < m; ++i) out.minimizer[i] = eig.vectors(i, 0);
  TransposedSolveInPlace(l, out.minimizer);  // u = L^-T y keeps u^T(I+J)u = 1
  for (double x : out.minimizer) {
    if (x != 0.0) {
      if (x < 0.0) {
        for (double& y : out.minimizer) y = -y;
      }
      break;
    }
  }
  return out;
}

double Delta(const ReducedMechanism& r) { return DeltaWithMinimizer(r).delta; }

PhiSummary SummarizePhi(const ReducedMechanism& r, std::int64_t n) {
  PhiSummary summary;
  summary.phi = PhiMatrix(r, n);
  summary.n = n;
  summary.delta = Delta(r);
  summary.delta0 = Delta0(r.k, r.epsilon);
  try {
    summary.trace_plus_quad = TracePlusQuad(summary.phi);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kSingularPhi) throw;
    summary.phi_singular = true;
    summary.trace_plus_quad = std::numeric_limits<double>::quiet_NaN();
  }
  return summary;
}

double Delta0(int k, double epsilon) {
  return std::sqrt(1.0 / (32.0 * BigM(k, epsilon)));
}

TraceGap TraceInequalityGap(const Matrix& a) {
  const std::size_t m = a.rows();
  if (a.cols() != m || m == 0) Fail(ErrorCode::kInvalidArgument, "need a square matrix");
  if (!a.IsSymmetric(1e-12 * std::max(a.MaxAbs(), 1.0))) {
    Fail(ErrorCode::kNotPositiveDefinite, "matrix is not symmetric");
  }
  const double k = static_cast<double>(m + 1);
  Matrix chol;
  try {
    chol = CholeskyLower(a, 1e-14);
  } catch (const Error&) {
    Fail(ErrorCode::kNotPositiveDefinite, "matrix is not positive definite");
  }

  double inv_part = 0.0;
  std::vector<double> b(m);
  for (std::size_t i = 0; i < m; ++i) {
    std::fill(b.begin(), b.end(), 0.0);
    b[i] = 1.0;
    ForwardSolveInPlace(chol, b);
    for (double x : b) inv_part += x * x;
  }
  std::fill(b.begin(), b.end(), 1.0);
  ForwardSolveInPlace(chol, b);
  for (double x : b) inv_part += x * x;

  double diag = 0.0, off = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) {
        diag += a(i, i);
      } else {
        off += a(i, j);
      }
    }
  }
  TraceGap gap;
  gap.lhs = inv_part * (diag / k - off / (k * (k - 1.0)));
  gap.slack = gap.lhs - (k - 1.0);
  return gap;
}

RowBoundReport RowBoundCheck(const ReducedMechanism& r, double epsilon) {
  RequirePositiveClassMass(r);
  const LdpReport ldp = VerifyLdp(EmbedAsMechanism(r), epsilon);
  if (!ldp.extremal) {
    Fail(ErrorCode::kNotExtremal, "row bound applies to extremal mechanisms only");
  }
  const int k = r.k;
  double max_moment = 0.0;
  for (int i = 0; i < r.classes(); ++i) {
    double moment = 0.0;
    for (int j = 0; j < k; ++j) {
      const double ratio = r.q_cond(i, j) / r.q_bar[i];
      moment += ratio * ratio;
    }
    max_moment = std::max(max_moment, moment);
  }
  const double ee = std::exp(epsilon);
  const int ds = OptimalSubsetSize(k, epsilon).d_star;
  const double dd = ds, kk = k;
  const double denom = dd * ee + kk - dd;
  RowBoundReport report;
  report.max_row_moment = max_moment;
  report.bound = kk * (1.0 + (ee - 1.0) * (ee - 1.0) * dd * (kk - dd) / (denom * denom));
  report.ok = max_moment <= report.bound + 1e-9 * std::max(1.0, report.bound);
  return report;
}

Matrix FisherInformation(const ReducedMechanism& r, std::int64_t n) {
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "need n >= 1");
  RequirePositiveClassMass(r);
  const int k = r.k;
  const int L = r.classes();
  Matrix info(k - 1, k - 1);
  std::vector<double> score(k - 1);
  for (int y = 0; y < L; ++y) {
    // Output-symbol probability at the uniform distribution.
    double prob = 0.0;
    for (int j = 0; j < k; ++j) prob += r.q_cond(y, j) / static_cast<double>(k);
    if (!(prob > 0.0)) Fail(ErrorCode::kZeroClassMass, "zero-probability output at uniform p");
    // d log P(y; p) / d p_i at uniform, with p_k eliminated.
    for (int i = 0; i < k - 1; ++i) {
      score[i] = (r.q_cond(y, i) - r.q_cond(y, k - 1)) / prob;
    }
    for (int i = 0; i < k - 1; ++i) {
      for (int j = i; j < k - 1; ++j) {
        const double add = static_cast<double>(n) * prob * score[i] * score[j];
        info(i, j) += add;
        if (j != i) info(j, i) += add;
      }
    }
  }
  return info;
}

double KlDivergence(std::span<const double> m1, std::span<const double> m2) {
  if (m1.size() != m2.size()) {
    Fail(ErrorCode::kDimensionMismatch, "distributions have different lengths");
  }
  double kl = 0.0;
  for (std::size_t y = 0; y < m1.size(); ++y) {
    if (m1[y] == 0.0) continue;
    if (m1[y] < 0.0 || m2[y] < 0.0) {
      Fail(ErrorCode::kInvalidArgument, "negative probability");
    }
    if (m2[y] <= 0.0) {
      Fail(ErrorCode::kSupportMismatch, "m2 vanishes where m1 has mass");
    }
    kl += m1[y] * std::log(m1[y] / m2[y]);
  }
  return kl;
}

double TvDistance(std::span<const double> m1, std::span<const double> m2) {
  if (m1.size() != m2.size()) {
    Fail(ErrorCode::kDimensionMismatch, "distributions have different lengths");
  }
  double acc = 0.0;
  for (std::size_t y = 0; y < m1.size(); ++y) acc += std::fabs(m1[y] - m2[y]);
  return 0.5 * acc;
}

LeCamBound LeCamTwoPoint(const ReducedMechanism& r, std::int64_t n) {
  if (n < 1) Fail(ErrorCode::kInvalidArgument, "need n >= 1");
  const DeltaResult dr = DeltaWithMinimizer(r);
  if (!(dr.delta > 0.0)) {
    // A zero delta makes the two-point bound infinite; callers serialize it
    // as a distinguished value.
    return LeCamBound{true, 0.0};
  }
  const int k = r.k;
  const double scale = 1.0 / std::sqrt(static_cast<double>(n) * dr.delta * dr.delta);

  const Distribution uniform = UniformDistribution(k);
  const std::vector<double> m1 = Marginal(r, uniform);

  bool any_feasible = false;
  double best = 0.0;
  for (int sign : {+1, -1}) {
    std::vector<double> p2(k);
    double tail = 0.0;
    for (int i = 0; i < k - 1; ++i) {
      p2[i] = 1.0 / k + sign * dr.minimizer[i] * scale;
      tail += dr.minimizer[i];
    }
    p2[k - 1] = 1.0 / k - sign * tail * scale;
    bool feasible = true;
    for (double x : p2) {
      if (x < 0.0 || x > 1.0) feasible = false;
    }
    if (!feasible) continue;
    any_feasible = true;

    const std::vector<double> m2 = Marginal(r, Distribution{p2});
    const double kl = KlDivergence(m2, m1);
    const double bracket = 1.0 - std::sqrt(static_cast<double>(n) * kl / 2.0);
    const double value =
        std::max(0.0, bracket / (4.0 * static_cast<double>(n) * dr.delta * dr.delta));
    best = std::max(best, value);
  }
  if (!any_feasible) {
    Fail(ErrorCode::kSimplexViolation,
         "n too small: the two-point alternative leaves the simplex");
  }
  return LeCamBound{false, best};
}

}  // namespace privest
