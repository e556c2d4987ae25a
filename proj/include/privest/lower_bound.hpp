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

#ifndef PRIVEST_LOWER_BOUND_HPP_
#define PRIVEST_LOWER_BOUND_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "privest/estimation.hpp"
#include "privest/linalg.hpp"
#include "privest/mechanism.hpp"

namespace privest {

// Phi(n, Q) = sum_i (n / q_i) z_i^T z_i with z_i = (q_{i,1} - q_{i,k}, ...,
// q_{i,k-1} - q_{i,k}): the information matrix of the privatized sample at
// the uniform distribution, in the first k-1 coordinates.
Matrix PhiMatrix(const ReducedMechanism& r, std::int64_t n);

// Everything the lower-bound argument extracts from one channel at one n.
struct PhiSummary {
  Matrix phi;  // (k-1) x (k-1), symmetric positive semidefinite
  std::int64_t n = 0;
  bool phi_singular = false;
  double trace_plus_quad = 0.0;  // NaN when phi is singular
  double delta = 0.0;
  double delta0 = 0.0;
};

PhiSummary SummarizePhi(const ReducedMechanism& r, std::int64_t n);

// w_m = sum_i (q_{im} - q_{ik}) v_i / q_i for m = 1..k-1.
std::vector<double> WVector(const ReducedMechanism& r, const CountVector& counts);

// tr(Phi^-1) + 1^T Phi^-1 1 via Cholesky solves. Requires the smallest
// eigenvalue to exceed 1e-12 times the largest (else kSingularPhi).
double TracePlusQuad(const Matrix& phi);

struct DeltaResult {
  double delta = 0.0;
  // argmin u (k-1 coordinates) normalized so that u^T (I+J) u = 1, i.e.
  // sum_{i=1}^{k} u_i^2 = 1 with u_k = -sum u_i; first nonzero entry >= 0.
  std::vector<double> minimizer;
};

// The smallest generalized eigenvalue of Phi(1, Q) with respect to I + J;
// delta is its square root. Solved by a Cholesky change of variables and a
// Jacobi eigensolve.
DeltaResult DeltaWithMinimizer(const ReducedMechanism& r);
double Delta(const ReducedMechanism& r);

// delta_0(k, eps) = sqrt(1 / (32 M(k, eps))), the case split threshold.
double Delta0(int k, double epsilon);

struct TraceGap {
  double lhs = 0.0;    // (tr(A^-1) + 1^T A^-1 1)(sum a_ii/k - sum_{i!=j} a_ij/(k(k-1)))
  double slack = 0.0;  // lhs - (k - 1); nonnegative, zero exactly on a(I+J)
};

// The trace inequality for a positive definite (k-1) x (k-1) matrix.
TraceGap TraceInequalityGap(const Matrix& a);

struct RowBoundReport {
  double max_row_moment = 0.0;  // max_i sum_j (q_ij / q_i)^2
  double bound = 0.0;           // k (1 + (e^eps-1)^2 d*(k-d*) / (d* e^eps + k - d*)^2)
  bool ok = false;
};

// The per-row second-moment bound; requires an extremal mechanism.
RowBoundReport RowBoundCheck(const ReducedMechanism& r, double epsilon);

// Fisher information of p vs one privatized sample at the uniform p,
// computed from the score functions: sum_y P(y) (d log P / d p_i)(d log P /
// d p_j), scaled by n. Equals PhiMatrix by the information identity.
Matrix FisherInformation(const ReducedMechanism& r, std::int64_t n);

// sum m1(y) log(m1(y)/m2(y)); 0 log(0/.) = 0. Throws kSupportMismatch when
// m2 vanishes where m1 does not.
double KlDivergence(std::span<const double> m1, std::span<const double> m2);

// (1/2) sum |m1(y) - m2(y)|.
double TvDistance(std::span<const double> m1, std::span<const double> m2);

struct LeCamBound {
  bool unbounded = false;  // delta == 0: the two-point bound is +infinity
  double value = 0.0;
};

// Le Cam two-point lower bound from testing the uniform distribution
// against p_U + u~ / sqrt(n delta^2): (1/(4 n delta^2)) (1 - sqrt(n KL / 2)),
// clamped at zero; evaluated for both signs of the minimizer and the larger
// feasible value is returned.
LeCamBound LeCamTwoPoint(const ReducedMechanism& r, std::int64_t n);

}  // namespace privest

#endif  // PRIVEST_LOWER_BOUND_HPP_
