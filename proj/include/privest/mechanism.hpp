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

#ifndef PRIVEST_MECHANISM_HPP_
#define PRIVEST_MECHANISM_HPP_

#include <cstdint>
#include <string>
#include <vector>

#include "privest/linalg.hpp"

namespace privest {

// A point of the probability simplex over {1, ..., k}.
struct Distribution {
  std::vector<double> probs;

  int k() const { return static_cast<int>(probs.size()); }
};

Distribution UniformDistribution(int k);
// Validates nonnegativity and sum-to-one (1e-12 absolute).
Distribution MakeDistribution(std::vector<double> probs);

enum class MechanismKind { kSubset, kRandomizedResponse, kRappor, kCustom };

// A privatization channel: cond(y, x) = Q(y | x), column-stochastic in x.
// Instances are immutable once built and safe to share across threads.
struct Mechanism {
  int k = 0;
  double epsilon = 0.0;
  MechanismKind kind = MechanismKind::kCustom;
  int subset_d = 0;  // subset size, only meaningful for kSubset
  Matrix cond;       // outputs x k

  int outputs() const { return static_cast<int>(cond.rows()); }
  std::string label() const;
};

// The subset-selection channel: outputs are the weight-d length-k bit
// vectors in lexicographic order of their index sets; the coordinates that
// contain the input symbol are boosted by e^epsilon.
Mechanism SubsetMechanism(int k, double epsilon, int d);

// k-ary randomized response: keep the symbol w.p. e^eps/(e^eps+k-1).
Mechanism KrrMechanism(int k, double epsilon);

// k-RAPPOR: one-hot encode, then flip every bit independently with
// probability 1/(1+e^{eps/2}); the full 2^k-row matrix is materialized.
Mechanism KrapporMechanism(int k, double epsilon);

// Wraps an explicit conditional matrix (outputs x k); validates column
// stochasticity and nonnegativity.
Mechanism CustomMechanism(int k, double epsilon, Matrix cond);

struct LdpReport {
  bool ok = false;
  double worst_ratio = 0.0;  // +inf when some output has mixed zero/nonzero mass
  bool extremal = false;
  int zero_rows = 0;  // outputs with zero mass under every input (skipped)
};

// Checks the epsilon-LDP likelihood-ratio bound and whether every row,
// normalized by its minimum, is a {1, e^eps} pattern.
LdpReport VerifyLdp(const Mechanism& m, double epsilon);

// Output alphabet after merging proportional rows into equivalence classes.
struct ReducedMechanism {
  int k = 0;
  double epsilon = 0.0;
  Matrix q_cond;               // L x k, q_cond(i, j) = Q(A_i | j)
  std::vector<double> q_bar;   // q_i = (1/k) sum_j q_cond(i, j)
  std::vector<int> class_map;  // original output -> class index, -1 if dropped

  int classes() const { return static_cast<int>(q_cond.rows()); }
};

// Merges outputs whose rows are proportional (normalized forms equal within
// relative 1e-9); zero-mass rows are dropped. Class order is the order of
// first appearance.
ReducedMechanism ReduceAlphabet(const Mechanism& m);

// Re-embeds the merged alphabet as a plain mechanism (used to check that
// reduction is idempotent, and to feed reduced channels back into the APIs
// that take a Mechanism).
Mechanism EmbedAsMechanism(const ReducedMechanism& r);

// m_i = sum_j p_j q_{ij}.
std::vector<double> Marginal(const ReducedMechanism& r, const Distribution& p);

// JSON object {k, epsilon, label, outputs: [[Q(y|1..k)] per y]}.
std::string MechanismToJson(const Mechanism& m);
Mechanism MechanismFromJson(const std::string& text);

// Exact binomial coefficient; throws kAlphabetTooLarge on 64-bit overflow.
std::uint64_t BinomialCoefficient(int n, int r);

// All weight-d bitmasks over k positions, bit j set iff symbol j+1 is in the
// subset, in lexicographic order of the index sets.
std::vector<std::uint32_t> WeightDBitmasks(int k, int d);

}  // namespace privest

#endif  // PRIVEST_MECHANISM_HPP_
