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

#include "privest/mechanism.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <json.hpp>

#include "privest/errors.hpp"

namespace privest {
namespace {

constexpr double kColumnSumTol = 1e-10;
constexpr double kSimplexSumTol = 1e-12;
constexpr double kProportionalRelTol = 1e-9;
constexpr double kLdpSlack = 1e-9;
// Largest explicit subset output alphabet we are willing to materialize.
constexpr std::uint64_t kMaxSubsetOutputs = 1u << 20;

void ValidateEpsilon(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    Fail(ErrorCode::kInvalidArgument, "epsilon must be a positive finite number");
  }
}

void ValidateColumnStochastic(const Matrix& cond, int k) {
  for (int j = 0; j < k; ++j) {
    double col = 0.0;
    for (std::size_t y = 0; y < cond.rows(); ++y) {
      const double q = cond(y, j);
      if (q < 0.0 || !std::isfinite(q)) {
        Fail(ErrorCode::kInvalidArgument, "conditional probabilities must be >= 0");
      }
      col += q;
    }
    if (std::fabs(col - 1.0) > kColumnSumTol) {
      Fail(ErrorCode::kInvalidArgument,
           "column " + std::to_string(j + 1) + " sums to " + std::to_string(col));
    }
  }
}

}  // namespace

Distribution UniformDistribution(int k) {
  if (k < 2) Fail(ErrorCode::kInvalidArgument, "need k >= 2");
  return Distribution{std::vector<double>(k, 1.0 / k)};
}

Distribution MakeDistribution(std::vector<double> probs) {
  if (probs.size() < 2) Fail(ErrorCode::kInvalidArgument, "need k >= 2");
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0 || !std::isfinite(p)) {
      Fail(ErrorCode::kInvalidArgument, "probabilities must be >= 0");
    }
    sum += p;
  }
  if (std::fabs(sum - 1.0) > kSimplexSumTol) {
    Fail(ErrorCode::kInvalidArgument, "probabilities sum to " + std::to_string(sum));
  }
  return Distribution{std::move(probs)};
}

std::string Mechanism::label() const {
  switch (kind) {
    case MechanismKind::kSubset:
      return "subset-" + std::to_string(subset_d);
    case MechanismKind::kRandomizedResponse:
      return "rr";
    case MechanismKind::kRappor:
      return "rappor";
    case MechanismKind::kCustom:
      return "custom";
  }
  return "custom";
}

std::uint64_t BinomialCoefficient(int n, int r) {
  if (r < 0 || r > n) return 0;
  r = std::min(r, n - r);
  std::uint64_t c = 1;
  for (int i = 1; i <= r; ++i) {
    const std::uint64_t num = static_cast<std::uint64_t>(n - r + i);
    if (c > std::numeric_limits<std::uint64_t>::max() / num) {
      Fail(ErrorCode::kAlphabetTooLarge, "binomial coefficient overflows");
    }
    c = c * num / static_cast<std::uint64_t>(i);
  }
  return c;
}

std::vector<std::uint32_t> WeightDBitmasks(int k, int d) {
  std::vector<std::uint32_t> masks;
  masks.reserve(static_cast<std::size_t>(BinomialCoefficient(k, d)));
  std::vector<int> idx(d);
  for (int i = 0; i < d; ++i) idx[i] = i;
  while (true) {
    std::uint32_t m = 0;
    for (int i : idx) m |= (1u << i);
    masks.push_back(m);
    int pos = d - 1;
    while (pos >= 0 && idx[pos] == k - d + pos) --pos;
    if (pos < 0) break;
    ++idx[pos];
    for (int i = pos + 1; i < d; ++i) idx[i] = idx[i - 1] + 1;
  }
  return masks;
}

Mechanism SubsetMechanism(int k, double epsilon, int d) {
  if (k < 2) Fail(ErrorCode::kInvalidArgument, "need k >= 2");
  if (k > 30) Fail(ErrorCode::kAlphabetTooLarge, "subset mechanism limited to k <= 30");
  ValidateEpsilon(epsilon);
  if (d < 1 || d > k - 1) {
    Fail(ErrorCode::kDOutOfRange,
         "subset size d must satisfy 1 <= d <= k-1, got d=" + std::to_string(d));
  }
  const std::uint64_t count = BinomialCoefficient(k, d);
  if (count > kMaxSubsetOutputs) {
    Fail(ErrorCode::kAlphabetTooLarge,
         "C(" + std::to_string(k) + "," + std::to_string(d) + ") outputs exceed the explicit-matrix cap");
  }

  const double ee = std::exp(epsilon);
  const double denom = static_cast<double>(BinomialCoefficient(k - 1, d - 1)) * ee +
                       static_cast<double>(BinomialCoefficient(k - 1, d));
  const std::vector<std::uint32_t> masks = WeightDBitmasks(k, d);

  Mechanism m;
  m.k = k;
  m.epsilon = epsilon;
  m.kind = MechanismKind::kSubset;
  m.subset_d = d;
  m.cond = Matrix(masks.size(), k);
  for (std::size_t y = 0; y < masks.size(); ++y) {
    for (int j = 0; j < k; ++j) {
      m.cond(y, j) = ((masks[y] >> j) & 1u ? ee : 1.0) / denom;
    }
  }
  return m;
}

Mechanism KrrMechanism(int k, double epsilon) {
  if (k < 2) Fail(ErrorCode::kInvalidArgument, "need k >= 2");
  ValidateEpsilon(epsilon);
  const double ee = std::exp(epsilon);
  const double denom = ee + static_cast<double>(k) - 1.0;
  Mechanism m;
  m.k = k;
  m.epsilon = epsilon;
  m.kind = MechanismKind::kRandomizedResponse;
  m.cond = Matrix(k, k);
  for (int y = 0; y < k; ++y) {
    for (int j = 0; j < k; ++j) m.cond(y, j) = (y == j ? ee : 1.0) / denom;
  }
  return m;
}

Mechanism KrapporMechanism(int k, double epsilon) {
  if (k < 2) Fail(ErrorCode::kInvalidArgument, "need k >= 2");
  if (k > 12) Fail(ErrorCode::kAlphabetTooLarge, "k-RAPPOR limited to k <= 12 (2^k outputs)");
  ValidateEpsilon(epsilon);
  const double flip = 1.0 / (1.0 + std::exp(epsilon / 2.0));
  const std::size_t outputs = std::size_t{1} << k;
  Mechanism m;
  m.k = k;
  m.epsilon = epsilon;
  m.kind = MechanismKind::kRappor;
  m.cond = Matrix(outputs, k);
  for (std::size_t y = 0; y < outputs; ++y) {
    for (int j = 0; j < k; ++j) {
      double p = 1.0;
      for (int b = 0; b < k; ++b) {
        const bool bit = (y >> b) & 1u;
        const bool want = (b == j);  // one-hot encoding of the input
        p *= (bit == want) ? (1.0 - flip) : flip;
      }
      m.cond(y, j) = p;
    }
  }
  return m;
}

Mechanism CustomMechanism(int k, double epsilon, Matrix cond) {
  if (k < 2) Fail(ErrorCode::kInvalidArgument, "need k >= 2");
  ValidateEpsilon(epsilon);
  if (cond.cols() != static_cast<std::size_t>(k) || cond.rows() < 1) {
    Fail(ErrorCode::kDimensionMismatch, "conditional matrix must be outputs x k");
  }
  ValidateColumnStochastic(cond, k);
  Mechanism m;
  m.k = k;
  m.epsilon = epsilon;
  m.kind = MechanismKind::kCustom;
  m.cond = std::move(cond);
  return m;
}

LdpReport VerifyLdp(const Mechanism& m, double epsilon) {
  ValidateEpsilon(epsilon);
  const double ee = std::exp(epsilon);
  LdpReport report;
  report.worst_ratio = 1.0;
  report.extremal = true;

  bool saw_row = false;
  for (int y = 0; y < m.outputs(); ++y) {
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (int j = 0; j < m.k; ++j) {
      lo = std::min(lo, m.cond(y, j));
      hi = std::max(hi, m.cond(y, j));
    }
    if (hi <= 0.0) {
      ++report.zero_rows;
      continue;
    }
    saw_row = true;
    if (lo <= 0.0) {
      report.worst_ratio = std::numeric_limits<double>::infinity();
      report.extremal = false;
      continue;
    }
    report.worst_ratio = std::max(report.worst_ratio, hi / lo);
    for (int j = 0; j < m.k; ++j) {
      const double r = m.cond(y, j) / lo;
      if (std::fabs(r - 1.0) > kProportionalRelTol &&
          std::fabs(r - ee) > kProportionalRelTol * ee) {
        report.extremal = false;
      }
    }
  }
  if (!saw_row) Fail(ErrorCode::kInvalidArgument, "mechanism has no output with mass");
  report.ok = report.worst_ratio <= ee * (1.0 + kLdpSlack);
  return report;
}

ReducedMechanism ReduceAlphabet(const Mechanism& m) {
  const int k = m.k;
  // Normalized row forms; classes in order of first appearance.
  std::vector<std::vector<double>> reps;
  std::vector<std::vector<double>> sums;  // accumulated rows per class
  std::vector<int> class_map(m.outputs(), -1);

  for (int y = 0; y < m.outputs(); ++y) {
    double total = 0.0;
    for (int j = 0; j < k; ++j) total += m.cond(y, j);
    if (total <= 0.0) continue;  // zero-mass output carries no information
    std::vector<double> norm(k);
    for (int j = 0; j < k; ++j) norm[j] = m.cond(y, j) / total;

    int cls = -1;
    for (std::size_t c = 0; c < reps.size(); ++c) {
      bool same = true;
      for (int j = 0; j < k; ++j) {
        const double a = reps[c][j], b = norm[j];
        if (std::fabs(a - b) > kProportionalRelTol * std::max({a, b, 1e-300})) {
          same = false;
          break;
        }
      }
      if (same) {
        cls = static_cast<int>(c);
        break;
      }
    }
    if (cls < 0) {
      cls = static_cast<int>(reps.size());
      reps.push_back(norm);
      sums.emplace_back(k, 0.0);
    }
    class_map[y] = cls;
    for (int j = 0; j < k; ++j) sums[cls][j] += m.cond(y, j);
  }
  if (reps.empty()) Fail(ErrorCode::kInvalidArgument, "mechanism has no output with mass");

  ReducedMechanism r;
  r.k = k;
  r.epsilon = m.epsilon;
  r.class_map = std::move(class_map);
  r.q_cond = Matrix(reps.size(), k);
  r.q_bar.resize(reps.size());
  for (std::size_t i = 0; i < reps.size(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < k; ++j) {
      r.q_cond(i, j) = sums[i][j];
      acc += sums[i][j];
    }
    r.q_bar[i] = acc / static_cast<double>(k);
  }
  return r;
}

Mechanism EmbedAsMechanism(const ReducedMechanism& r) {
  Mechanism m;
  m.k = r.k;
  m.epsilon = r.epsilon;
  m.kind = MechanismKind::kCustom;
  m.cond = r.q_cond;
  return m;
}

std::vector<double> Marginal(const ReducedMechanism& r, const Distribution& p) {
  if (p.k() != r.k) {
    Fail(ErrorCode::kDimensionMismatch, "distribution has k=" + std::to_string(p.k()) +
                                            " but mechanism has k=" + std::to_string(r.k));
  }
  std::vector<double> out(r.classes(), 0.0);
  for (int i = 0; i < r.classes(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < r.k; ++j) acc += p.probs[j] * r.q_cond(i, j);
    out[i] = acc;
  }
  return out;
}

std::string MechanismToJson(const Mechanism& m) {
  nlohmann::ordered_json j;
  j["k"] = m.k;
  j["epsilon"] = m.epsilon;
  j["label"] = m.label();
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (int y = 0; y < m.outputs(); ++y) {
    nlohmann::ordered_json row = nlohmann::ordered_json::array();
    for (int x = 0; x < m.k; ++x) row.push_back(m.cond(y, x));
    rows.push_back(std::move(row));
  }
  j["outputs"] = std::move(rows);
  return j.dump(2);
}

Mechanism MechanismFromJson(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParseError, std::string("invalid mechanism JSON: ") + e.what());
  }
  try {
    const int k = j.at("k").get<int>();
    const double epsilon = j.at("epsilon").get<double>();
    const std::string label = j.value("label", std::string("custom"));
    const auto& rows = j.at("outputs");
    if (!rows.is_array() || rows.empty()) {
      Fail(ErrorCode::kParseError, "outputs must be a non-empty array");
    }
    Matrix cond(rows.size(), k);
    for (std::size_t y = 0; y < rows.size(); ++y) {
      const auto& row = rows[y];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(k)) {
        Fail(ErrorCode::kParseError, "each output row must have k entries");
      }
      for (int x = 0; x < k; ++x) cond(y, x) = row[x].get<double>();
    }
    Mechanism m = CustomMechanism(k, epsilon, std::move(cond));
    if (label == "rr") {
      m.kind = MechanismKind::kRandomizedResponse;
    } else if (label == "rappor") {
      m.kind = MechanismKind::kRappor;
    } else if (label.rfind("subset-", 0) == 0) {
      int d = 0;
      try {
        d = std::stoi(label.substr(7));
      } catch (const std::exception&) {
        Fail(ErrorCode::kParseError, "malformed subset label: " + label);
      }
      if (d < 1 || d > k - 1 ||
          BinomialCoefficient(k, d) != static_cast<std::uint64_t>(m.outputs())) {
        Fail(ErrorCode::kParseError, "label " + label + " does not match the output count");
      }
      m.kind = MechanismKind::kSubset;
      m.subset_d = d;
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    Fail(ErrorCode::kParseError, std::string("invalid mechanism JSON: ") + e.what());
  }
}

}  // namespace privest
