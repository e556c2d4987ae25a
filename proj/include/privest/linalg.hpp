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

#ifndef PRIVEST_LINALG_HPP_
#define PRIVEST_LINALG_HPP_

#include <cstddef>
#include <span>
#include <vector>

namespace privest {

// Dense row-major matrix. The dimensions in this library stay below ~100,
// so everything here is plain O(n^3) dense code.
class Matrix {
 public:
  Matrix() : rows_(0), cols_(0) {}
  Matrix(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(data_.data() + i * cols_, cols_);
  }
  std::span<double> row(std::size_t i) {
    return std::span<double>(data_.data() + i * cols_, cols_);
  }

  const std::vector<double>& data() const { return data_; }

  double MaxAbs() const;
  bool IsSymmetric(double tol) const;

 private:
  std::size_t rows_, cols_;
  std::vector<double> data_;
};

Matrix IdentityPlusOnes(std::size_t m);  // I + J, the simplex-constraint metric

// Lower-triangular Cholesky factor of a symmetric positive definite matrix.
// Throws kNotPositiveDefinite when a pivot falls at or below
// rel_pivot_tol * max diagonal.
Matrix CholeskyLower(const Matrix& a, double rel_pivot_tol = 0.0);

// Solves L y = b in place (forward substitution).
void ForwardSolveInPlace(const Matrix& lower, std::span<double> b);
// Solves L^T x = b in place (backward substitution).
void TransposedSolveInPlace(const Matrix& lower, std::span<double> b);
// Solves (L L^T) x = b.
std::vector<double> SpdSolve(const Matrix& lower, std::vector<double> b);

struct SymmetricEigen {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column j is the eigenvector for values[j]
};

// Cyclic Jacobi rotations on a symmetric matrix, iterated until every
// off-diagonal entry is below off_tol relative to the largest initial entry.
SymmetricEigen JacobiEigen(Matrix a, double off_tol = 1e-13);

// Sums values in a fixed pairwise tree order; the result does not depend on
// how the entries were produced, which keeps parallel reductions bit-stable.
double PairwiseSum(std::span<const double> values);

struct MeanStderr {
  double mean;
  double stderr_of_mean;
};
MeanStderr PairwiseMeanStderr(std::span<const double> values);

}  // namespace privest

#endif  // PRIVEST_LINALG_HPP_
