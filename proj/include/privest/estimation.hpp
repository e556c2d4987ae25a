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

#ifndef PRIVEST_ESTIMATION_HPP_
#define PRIVEST_ESTIMATION_HPP_

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "privest/mechanism.hpp"
#include "privest/rng.hpp"

namespace privest {

// Per-class counts t_i over a reduced output alphabet together with the
// centered counts v_i = t_i - n * q_i.
struct CountVector {
  std::int64_t n = 0;
  std::vector<std::int64_t> t;
  std::vector<double> v;
};

CountVector MakeCountVector(const ReducedMechanism& r, std::vector<std::int64_t> t);

// Per-coordinate bit counts for the subset mechanism: bit_counts[i] is the
// number of privatized samples whose i-th coordinate is 1.
struct SubsetCounts {
  std::int64_t n = 0;
  int d = 0;
  std::vector<std::int64_t> bit_counts;
};

struct Estimate {
  std::vector<double> p_hat;  // may leave the simplex
  std::optional<Distribution> projected;
};

// Prebuilt sampling state for one (mechanism, distribution) pair: the
// inverse-CDF table for X ~ p and one alias table per input for Y | X.
// Construction is done once; Run() is const and thread-safe.
class Sampler {
 public:
  Sampler(const Mechanism& m, Distribution p);

  const ReducedMechanism& reduced() const { return reduced_; }
  const Distribution& distribution() const { return p_; }
  bool is_subset() const { return !masks_.empty(); }
  int k() const { return reduced_.k; }

  struct Draws {
    CountVector counts;
    std::optional<SubsetCounts> subset;
  };
  Draws Run(std::int64_t n, CounterRng rng) const;

 private:
  Distribution p_;
  ReducedMechanism reduced_;
  CumulativeTable x_table_;
  std::vector<AliasTable> y_tables_;   // one per input symbol, over raw outputs
  std::vector<int> output_class_;      // raw output -> reduced class
  std::vector<std::uint32_t> masks_;   // subset mechanisms only
  int subset_d_ = 0;
};

// i.i.d. draws X ~ p, Y ~ Q(.|X); deterministic given the seed.
Sampler::Draws SamplePrivatized(const Mechanism& m, const Distribution& p,
                                std::int64_t n, std::uint64_t seed);
CountVector SamplePrivatized(const ReducedMechanism& r, const Distribution& p,
                             std::int64_t n, std::uint64_t seed);

// Coefficients of the affine estimator p_hat_i = a * T_i / n - b for the
// subset mechanism.
double EmpiricalCoefficientA(int k, double epsilon, int d);
double EmpiricalCoefficientB(int k, double epsilon, int d);

// The unbiased empirical estimator for subset-mechanism counts.
Estimate EmpiricalEstimate(const SubsetCounts& counts, int k, double epsilon, int d);

// Least-squares baseline for arbitrary channels: minimizes the Euclidean
// distance between t/n and the model marginal over the affine hyperplane
// sum_i p_i = 1. Requires q_cond to have rank k.
Estimate LeastSquaresEstimate(const CountVector& counts, const ReducedMechanism& r);

// Euclidean projection onto the probability simplex (sorted-threshold rule).
Distribution ProjectToSimplex(const std::vector<double>& p_hat);

}  // namespace privest

#endif  // PRIVEST_ESTIMATION_HPP_
