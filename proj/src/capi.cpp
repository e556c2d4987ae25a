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

#include "privest.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <vector>

#include "privest/bayes_lab.hpp"
#include "privest/errors.hpp"
#include "privest/estimation.hpp"
#include "privest/lower_bound.hpp"
#include "privest/mechanism.hpp"
#include "privest/risk.hpp"

namespace {

thread_local std::string g_last_error;

pe_status StatusFromCode(privest::ErrorCode code) {
  using privest::ErrorCode;
  switch (code) {
    case ErrorCode::kInvalidArgument:
      return PE_ERR_INVALID_ARGUMENT;
    case ErrorCode::kDOutOfRange:
      return PE_ERR_D_OUT_OF_RANGE;
    case ErrorCode::kAlphabetTooLarge:
      return PE_ERR_ALPHABET_TOO_LARGE;
    case ErrorCode::kDimensionMismatch:
      return PE_ERR_DIMENSION_MISMATCH;
    case ErrorCode::kEpsilonZero:
      return PE_ERR_EPSILON_ZERO;
    case ErrorCode::kRankDeficient:
      return PE_ERR_RANK_DEFICIENT;
    case ErrorCode::kZeroClassMass:
      return PE_ERR_ZERO_CLASS_MASS;
    case ErrorCode::kSingularPhi:
      return PE_ERR_SINGULAR_PHI;
    case ErrorCode::kNotPositiveDefinite:
      return PE_ERR_NOT_POSITIVE_DEFINITE;
    case ErrorCode::kNotExtremal:
      return PE_ERR_NOT_EXTREMAL;
    case ErrorCode::kSupportMismatch:
      return PE_ERR_SUPPORT_MISMATCH;
    case ErrorCode::kSimplexViolation:
      return PE_ERR_SIMPLEX_VIOLATION;
    case ErrorCode::kDegenerateDelta:
      return PE_ERR_DEGENERATE_DELTA;
    case ErrorCode::kDomainViolation:
      return PE_ERR_DOMAIN_VIOLATION;
    case ErrorCode::kResolutionTooCoarse:
      return PE_ERR_RESOLUTION_TOO_COARSE;
    case ErrorCode::kUnsupportedK:
      return PE_ERR_UNSUPPORTED_K;
    case ErrorCode::kParseError:
      return PE_ERR_PARSE;
  }
  return PE_ERR_INTERNAL;
}

template <typename Fn>
pe_status Guard(Fn&& fn) {
  try {
    fn();
    return PE_OK;
  } catch (const privest::Error& e) {
    g_last_error = e.what();
    return StatusFromCode(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return PE_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown failure";
    return PE_ERR_INTERNAL;
  }
}

privest::Distribution ResolveDistribution(const double* p, int32_t k) {
  if (p == nullptr) return privest::UniformDistribution(k);
  return privest::MakeDistribution(std::vector<double>(p, p + k));
}

privest::EstimatorKind ResolveEstimator(int32_t estimator,
                                        const privest::Mechanism& m) {
  switch (estimator) {
    case PE_ESTIMATOR_AUTO:
      return m.kind == privest::MechanismKind::kSubset
                 ? privest::EstimatorKind::kSubsetEmpirical
                 : privest::EstimatorKind::kLeastSquares;
    case PE_ESTIMATOR_EMPIRICAL:
      return privest::EstimatorKind::kSubsetEmpirical;
    case PE_ESTIMATOR_LEAST_SQUARES:
      return privest::EstimatorKind::kLeastSquares;
    default:
      privest::Fail(privest::ErrorCode::kInvalidArgument, "unknown estimator id");
  }
}

double Quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(pos);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

}  // namespace

struct pe_mechanism {
  privest::Mechanism impl;
};

struct pe_reduced {
  privest::ReducedMechanism impl;
};

struct pe_sampler {
  privest::Sampler impl;
  privest::EstimatorKind estimator;
  privest::Mechanism mechanism;  // for the empirical estimator's parameters
};

extern "C" {

const char* pe_last_error(void) { return g_last_error.c_str(); }

const char* pe_status_name(pe_status status) {
  switch (status) {
    case PE_OK: return "ok";
    case PE_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case PE_ERR_D_OUT_OF_RANGE: return "d_out_of_range";
    case PE_ERR_ALPHABET_TOO_LARGE: return "alphabet_too_large";
    case PE_ERR_DIMENSION_MISMATCH: return "dimension_mismatch";
    case PE_ERR_EPSILON_ZERO: return "epsilon_zero";
    case PE_ERR_RANK_DEFICIENT: return "rank_deficient";
    case PE_ERR_ZERO_CLASS_MASS: return "zero_class_mass";
    case PE_ERR_SINGULAR_PHI: return "singular_phi";
    case PE_ERR_NOT_POSITIVE_DEFINITE: return "not_positive_definite";
    case PE_ERR_NOT_EXTREMAL: return "not_extremal";
    case PE_ERR_SUPPORT_MISMATCH: return "support_mismatch";
    case PE_ERR_SIMPLEX_VIOLATION: return "simplex_violation";
    case PE_ERR_DEGENERATE_DELTA: return "degenerate_delta";
    case PE_ERR_DOMAIN_VIOLATION: return "domain_violation";
    case PE_ERR_RESOLUTION_TOO_COARSE: return "resolution_too_coarse";
    case PE_ERR_UNSUPPORTED_K: return "unsupported_k";
    case PE_ERR_PARSE: return "parse_error";
    case PE_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

int32_t pe_status_is_usage(pe_status status) {
  switch (status) {
    case PE_ERR_INVALID_ARGUMENT:
    case PE_ERR_D_OUT_OF_RANGE:
    case PE_ERR_ALPHABET_TOO_LARGE:
    case PE_ERR_DIMENSION_MISMATCH:
    case PE_ERR_EPSILON_ZERO:
    case PE_ERR_RESOLUTION_TOO_COARSE:
    case PE_ERR_UNSUPPORTED_K:
    case PE_ERR_PARSE:
      return 1;
    default:
      return 0;
  }
}

pe_status pe_mechanism_subset(int32_t k, double epsilon, int32_t d, pe_mechanism** out) {
  return Guard([&] { *out = new pe_mechanism{privest::SubsetMechanism(k, epsilon, d)}; });
}

pe_status pe_mechanism_krr(int32_t k, double epsilon, pe_mechanism** out) {
  return Guard([&] { *out = new pe_mechanism{privest::KrrMechanism(k, epsilon)}; });
}

pe_status pe_mechanism_krappor(int32_t k, double epsilon, pe_mechanism** out) {
  return Guard([&] { *out = new pe_mechanism{privest::KrapporMechanism(k, epsilon)}; });
}

pe_status pe_mechanism_from_json(const char* json, pe_mechanism** out) {
  return Guard([&] {
    if (json == nullptr) privest::Fail(privest::ErrorCode::kParseError, "null JSON");
    *out = new pe_mechanism{privest::MechanismFromJson(json)};
  });
}

pe_status pe_mechanism_to_json(const pe_mechanism* m, char** json_out) {
  return Guard([&] {
    const std::string text = privest::MechanismToJson(m->impl);
    char* buffer = new char[text.size() + 1];
    std::memcpy(buffer, text.c_str(), text.size() + 1);
    *json_out = buffer;
  });
}

void pe_mechanism_free(pe_mechanism* m) { delete m; }
void pe_string_free(char* s) { delete[] s; }

int32_t pe_mechanism_k(const pe_mechanism* m) { return m->impl.k; }
double pe_mechanism_epsilon(const pe_mechanism* m) { return m->impl.epsilon; }
int32_t pe_mechanism_outputs(const pe_mechanism* m) { return m->impl.outputs(); }
int32_t pe_mechanism_subset_d(const pe_mechanism* m) {
  return m->impl.kind == privest::MechanismKind::kSubset ? m->impl.subset_d : 0;
}

pe_status pe_verify_ldp(const pe_mechanism* m, double epsilon, pe_ldp_report* out) {
  return Guard([&] {
    const privest::LdpReport report = privest::VerifyLdp(m->impl, epsilon);
    out->ok = report.ok ? 1 : 0;
    out->worst_ratio = report.worst_ratio;
    out->extremal = report.extremal ? 1 : 0;
    out->zero_rows = report.zero_rows;
  });
}

pe_status pe_reduce(const pe_mechanism* m, pe_reduced** out) {
  return Guard([&] { *out = new pe_reduced{privest::ReduceAlphabet(m->impl)}; });
}

void pe_reduced_free(pe_reduced* r) { delete r; }
int32_t pe_reduced_k(const pe_reduced* r) { return r->impl.k; }
int32_t pe_reduced_classes(const pe_reduced* r) { return r->impl.classes(); }

pe_status pe_marginal(const pe_reduced* r, const double* p, int32_t k, double* out) {
  return Guard([&] {
    const std::vector<double> m = privest::Marginal(r->impl, ResolveDistribution(p, k));
    std::copy(m.begin(), m.end(), out);
  });
}

pe_status pe_optimal_d(int32_t k, double epsilon, int32_t* d_star, double* objective) {
  return Guard([&] {
    const privest::OptimalD opt = privest::OptimalSubsetSize(k, epsilon);
    if (d_star != nullptr) *d_star = opt.d_star;
    if (objective != nullptr) *objective = opt.objective;
  });
}

pe_status pe_worst_case_risk(int32_t k, double epsilon, int32_t d, int64_t n, double* out) {
  return Guard([&] { *out = privest::WorstCaseRisk(k, epsilon, d, n); });
}

pe_status pe_analytic_l2_risk(int32_t k, double epsilon, int32_t d, int64_t n,
                              const double* p, int32_t k_len, double* out) {
  return Guard([&] {
    *out = privest::AnalyticL2Risk(k, epsilon, d, n, ResolveDistribution(p, k_len));
  });
}

pe_status pe_big_m(int32_t k, double epsilon, double* out) {
  return Guard([&] { *out = privest::BigM(k, epsilon); });
}

pe_status pe_lower_bound_dominant(int32_t k, double epsilon, int64_t n, double* out) {
  return Guard([&] { *out = privest::LowerBoundDominant(k, epsilon, n); });
}

pe_status pe_sampler_new(const pe_mechanism* m, const double* p, int32_t k,
                         int32_t estimator, pe_sampler** out) {
  return Guard([&] {
    privest::Distribution dist = ResolveDistribution(p, k == 0 ? m->impl.k : k);
    const privest::EstimatorKind kind = ResolveEstimator(estimator, m->impl);
    if (kind == privest::EstimatorKind::kSubsetEmpirical &&
        m->impl.kind != privest::MechanismKind::kSubset) {
      privest::Fail(privest::ErrorCode::kInvalidArgument,
                    "the empirical estimator needs a subset mechanism");
    }
    *out = new pe_sampler{privest::Sampler(m->impl, std::move(dist)), kind, m->impl};
  });
}

void pe_sampler_free(pe_sampler* s) { delete s; }

int32_t pe_sampler_classes(const pe_sampler* s) { return s->impl.reduced().classes(); }

pe_status pe_sampler_trial(const pe_sampler* s, int64_t n, uint64_t seed,
                           uint64_t trial, int64_t* t_out, int32_t t_len,
                           double* p_hat_out, int32_t k_len, double* loss_out) {
  return Guard([&] {
    if (t_len != s->impl.reduced().classes() || k_len != s->impl.k()) {
      privest::Fail(privest::ErrorCode::kDimensionMismatch, "output buffer sizes");
    }
    const privest::Sampler::Draws draws =
        s->impl.Run(n, privest::CounterRng::Stream(seed, trial));
    privest::Estimate est;
    if (s->estimator == privest::EstimatorKind::kSubsetEmpirical) {
      est = privest::EmpiricalEstimate(*draws.subset, s->mechanism.k,
                                       s->mechanism.epsilon, s->mechanism.subset_d);
    } else {
      est = privest::LeastSquaresEstimate(draws.counts, s->impl.reduced());
    }
    std::copy(draws.counts.t.begin(), draws.counts.t.end(), t_out);
    std::copy(est.p_hat.begin(), est.p_hat.end(), p_hat_out);
    if (loss_out != nullptr) {
      double loss = 0.0;
      const privest::Distribution& p = s->impl.distribution();
      for (int i = 0; i < s->impl.k(); ++i) {
        const double diff = est.p_hat[i] - p.probs[i];
        loss += diff * diff;
      }
      *loss_out = loss;
    }
  });
}

pe_status pe_project_to_simplex(const double* p_hat, int32_t k, double* out) {
  return Guard([&] {
    const privest::Distribution p =
        privest::ProjectToSimplex(std::vector<double>(p_hat, p_hat + k));
    std::copy(p.probs.begin(), p.probs.end(), out);
  });
}

pe_status pe_empirical_estimate(int32_t k, double epsilon, int32_t d, int64_t n,
                                const int64_t* bit_counts, double* p_hat_out) {
  return Guard([&] {
    privest::SubsetCounts counts;
    counts.n = n;
    counts.d = d;
    counts.bit_counts.assign(bit_counts, bit_counts + k);
    const privest::Estimate est = privest::EmpiricalEstimate(counts, k, epsilon, d);
    std::copy(est.p_hat.begin(), est.p_hat.end(), p_hat_out);
  });
}

pe_status pe_least_squares_estimate(const pe_reduced* r, const int64_t* t,
                                    int32_t t_len, double* p_hat_out) {
  return Guard([&] {
    const privest::CountVector counts = privest::MakeCountVector(
        r->impl, std::vector<std::int64_t>(t, t + t_len));
    const privest::Estimate est = privest::LeastSquaresEstimate(counts, r->impl);
    std::copy(est.p_hat.begin(), est.p_hat.end(), p_hat_out);
  });
}

pe_status pe_monte_carlo_risk(const pe_mechanism* m, int32_t estimator,
                              const double* p, int32_t k, int64_t n, int64_t trials,
                              uint64_t seed, int32_t threads, pe_risk_report* out) {
  return Guard([&] {
    const privest::Distribution dist = ResolveDistribution(p, k == 0 ? m->impl.k : k);
    const privest::RiskReport report = privest::MonteCarloRisk(
        m->impl, ResolveEstimator(estimator, m->impl), dist, n, trials, seed, threads);
    out->analytic = report.analytic;
    out->worst_case = report.worst_case;
    out->mc_mean = report.mc_mean;
    out->mc_stderr = report.mc_stderr;
    out->trials = report.trials;
    out->n = report.n;
  });
}

pe_status pe_lower_bound(const pe_reduced* r, int64_t n, pe_lower_bound_report* out) {
  return Guard([&] {
    const privest::ReducedMechanism& rm = r->impl;
    const privest::PhiSummary summary = privest::SummarizePhi(rm, n);
    out->delta = summary.delta;
    out->delta0 = summary.delta0;
    out->branch_case2 = summary.delta < summary.delta0 ? 1 : 0;
    out->m_over_n = privest::LowerBoundDominant(rm.k, rm.epsilon, n);
    out->phi_singular = summary.phi_singular ? 1 : 0;
    out->trace_plus_quad = summary.phi_singular ? 0.0 : summary.trace_plus_quad;

    out->le_cam_unbounded = 0;
    out->le_cam_infeasible = 0;
    out->le_cam_bound = 0.0;
    try {
      const privest::LeCamBound bound = privest::LeCamTwoPoint(rm, n);
      out->le_cam_unbounded = bound.unbounded ? 1 : 0;
      out->le_cam_bound = bound.value;
    } catch (const privest::Error& e) {
      if (e.code() != privest::ErrorCode::kSimplexViolation) throw;
      out->le_cam_infeasible = 1;
    }
  });
}

namespace {

void CopyMatrix(const privest::Matrix& matrix, double* out) {
  std::copy(matrix.data().begin(), matrix.data().end(), out);
}

privest::CountVector CountsFrom(const pe_reduced* r, const int64_t* t, int32_t t_len) {
  return privest::MakeCountVector(r->impl, std::vector<std::int64_t>(t, t + t_len));
}

}  // namespace

pe_status pe_phi_matrix(const pe_reduced* r, int64_t n, double* out) {
  return Guard([&] { CopyMatrix(privest::PhiMatrix(r->impl, n), out); });
}

pe_status pe_w_vector(const pe_reduced* r, const int64_t* t, int32_t t_len,
                      double* out) {
  return Guard([&] {
    const std::vector<double> w = privest::WVector(r->impl, CountsFrom(r, t, t_len));
    std::copy(w.begin(), w.end(), out);
  });
}

pe_status pe_trace_plus_quad(const pe_reduced* r, int64_t n, double* out) {
  return Guard([&] { *out = privest::TracePlusQuad(privest::PhiMatrix(r->impl, n)); });
}

pe_status pe_delta(const pe_reduced* r, double* out) {
  return Guard([&] { *out = privest::Delta(r->impl); });
}

pe_status pe_delta0(int32_t k, double epsilon, double* out) {
  return Guard([&] { *out = privest::Delta0(k, epsilon); });
}

pe_status pe_fisher_information(const pe_reduced* r, int64_t n, double* out) {
  return Guard([&] { CopyMatrix(privest::FisherInformation(r->impl, n), out); });
}

pe_status pe_trace_gap(const double* a, int32_t dim, double* lhs, double* slack) {
  return Guard([&] {
    privest::Matrix matrix(dim, dim);
    for (int32_t i = 0; i < dim; ++i) {
      for (int32_t j = 0; j < dim; ++j) matrix(i, j) = a[i * dim + j];
    }
    const privest::TraceGap gap = privest::TraceInequalityGap(matrix);
    if (lhs != nullptr) *lhs = gap.lhs;
    if (slack != nullptr) *slack = gap.slack;
  });
}

pe_status pe_row_bound_check(const pe_reduced* r, double epsilon,
                             double* max_row_moment, double* bound, int32_t* ok) {
  return Guard([&] {
    const privest::RowBoundReport report = privest::RowBoundCheck(r->impl, epsilon);
    if (max_row_moment != nullptr) *max_row_moment = report.max_row_moment;
    if (bound != nullptr) *bound = report.bound;
    if (ok != nullptr) *ok = report.ok ? 1 : 0;
  });
}

pe_status pe_kl_divergence(const double* m1, const double* m2, int32_t len,
                           double* out) {
  return Guard([&] {
    *out = privest::KlDivergence(std::span<const double>(m1, len),
                                 std::span<const double>(m2, len));
  });
}

pe_status pe_tv_distance(const double* m1, const double* m2, int32_t len,
                         double* out) {
  return Guard([&] {
    *out = privest::TvDistance(std::span<const double>(m1, len),
                               std::span<const double>(m2, len));
  });
}

pe_status pe_le_cam_two_point(const pe_reduced* r, int64_t n, int32_t* unbounded,
                              double* value) {
  return Guard([&] {
    const privest::LeCamBound bound = privest::LeCamTwoPoint(r->impl, n);
    if (unbounded != nullptr) *unbounded = bound.unbounded ? 1 : 0;
    if (value != nullptr) *value = bound.value;
  });
}

pe_status pe_log_posterior_g(const pe_reduced* r, const int64_t* t, int32_t t_len,
                             const double* u, int32_t u_len, double* out) {
  return Guard([&] {
    *out = privest::LogPosteriorG(r->impl, CountsFrom(r, t, t_len),
                                  std::span<const double>(u, u_len));
  });
}

pe_status pe_quadratic_g2(const pe_reduced* r, const int64_t* t, int32_t t_len,
                          const double* u, int32_t u_len, double* out) {
  return Guard([&] {
    *out = privest::QuadraticG2(r->impl, CountsFrom(r, t, t_len),
                                std::span<const double>(u, u_len));
  });
}

pe_status pe_h_v(const pe_reduced* r, const int64_t* t, int32_t t_len,
                 const double* u, int32_t u_len, double* out) {
  return Guard([&] {
    *out = privest::HV(r->impl, CountsFrom(r, t, t_len),
                       std::span<const double>(u, u_len));
  });
}

pe_status pe_gaussian_params(const pe_reduced* r, const int64_t* t, int32_t t_len,
                             double* mean_out, double* cov_out) {
  return Guard([&] {
    const privest::GaussianParams params =
        privest::PosteriorGaussian(r->impl, CountsFrom(r, t, t_len));
    std::copy(params.mean.begin(), params.mean.end(), mean_out);
    CopyMatrix(params.covariance, cov_out);
  });
}

pe_status pe_grid_posterior_moments(const pe_reduced* r, const int64_t* t,
                                    int32_t t_len, double radius,
                                    int32_t resolution, double* mean_out,
                                    double* cov_out, double* tv_out) {
  return Guard([&] {
    const privest::CountVector counts = CountsFrom(r, t, t_len);
    privest::PriorSpec prior = privest::PriorSpec::Defaults(r->impl.k, counts.n);
    if (radius > 0.0) prior.radius = radius;
    const privest::GridMoments moments =
        privest::GridPosteriorMoments(r->impl, counts, prior, resolution);
    std::copy(moments.mean.begin(), moments.mean.end(), mean_out);
    if (cov_out != nullptr) CopyMatrix(moments.covariance, cov_out);
    if (tv_out != nullptr) *tv_out = moments.tv_to_gaussian;
  });
}

pe_status pe_log1p_quadratic_bound(double x, double* lhs, double* rhs, int32_t* ok) {
  return Guard([&] {
    const privest::Log1pBoundReport report = privest::Log1pQuadraticBound(x);
    if (lhs != nullptr) *lhs = report.lhs;
    if (rhs != nullptr) *rhs = report.rhs;
    if (ok != nullptr) *ok = report.ok ? 1 : 0;
  });
}

pe_status pe_bayes_demo(const pe_mechanism* m, int64_t n, double radius,
                        int64_t trials, uint64_t seed, int32_t resolution,
                        int32_t threads, pe_bayes_report* out) {
  return Guard([&] {
    const privest::ReducedMechanism reduced = privest::ReduceAlphabet(m->impl);
    privest::PriorSpec prior = privest::PriorSpec::Defaults(reduced.k, n);
    if (radius > 0.0) prior.radius = radius;
    const int res = resolution > 0 ? resolution : 256;
    const privest::BayesLossReport report =
        privest::BayesLossMc(reduced, prior, trials, seed, res, threads);

    out->loss = report.loss;
    out->stderr_of_loss = report.stderr_of_loss;
    out->reference = report.reference;
    out->ratio = report.loss / report.reference;
    out->radius = prior.radius;
    std::vector<double> tvs = report.tv_samples;
    const bool has_nan =
        std::any_of(tvs.begin(), tvs.end(), [](double x) { return std::isnan(x); });
    if (has_nan || tvs.empty()) {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      out->tv_p50 = out->tv_p90 = out->tv_p95 = out->tv_max = nan;
    } else {
      std::sort(tvs.begin(), tvs.end());
      out->tv_p50 = Quantile(tvs, 0.50);
      out->tv_p90 = Quantile(tvs, 0.90);
      out->tv_p95 = Quantile(tvs, 0.95);
      out->tv_max = tvs.back();
    }
  });
}

}  // extern "C"
