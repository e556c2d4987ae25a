/* Copyright 2026 The Privest Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface of the privest shared library: locally differentially private
 * distribution estimation with exact risk accounting and the matching
 * lower-bound calculus. Objects are opaque handles; every function returns a
 * pe_status, with outputs written through pointers. On failure,
 * pe_last_error() returns a thread-local description of the problem.
 */

#ifndef PRIVEST_H_
#define PRIVEST_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pe_status {
  PE_OK = 0,
  PE_ERR_INVALID_ARGUMENT = 1,
  PE_ERR_D_OUT_OF_RANGE = 2,
  PE_ERR_ALPHABET_TOO_LARGE = 3,
  PE_ERR_DIMENSION_MISMATCH = 4,
  PE_ERR_EPSILON_ZERO = 5,
  PE_ERR_RANK_DEFICIENT = 6,
  PE_ERR_ZERO_CLASS_MASS = 7,
  PE_ERR_SINGULAR_PHI = 8,
  PE_ERR_NOT_POSITIVE_DEFINITE = 9,
  PE_ERR_NOT_EXTREMAL = 10,
  PE_ERR_SUPPORT_MISMATCH = 11,
  PE_ERR_SIMPLEX_VIOLATION = 12,
  PE_ERR_DEGENERATE_DELTA = 13,
  PE_ERR_DOMAIN_VIOLATION = 14,
  PE_ERR_RESOLUTION_TOO_COARSE = 15,
  PE_ERR_UNSUPPORTED_K = 16,
  PE_ERR_PARSE = 17,
  PE_ERR_INTERNAL = 18
} pe_status;

/* Thread-local message for the most recent failure on this thread. */
const char* pe_last_error(void);
const char* pe_status_name(pe_status status);
/* 1 if the status describes a parameter/usage problem rather than a
 * numerical failure. */
int32_t pe_status_is_usage(pe_status status);

/* ---- mechanisms ---- */

typedef struct pe_mechanism pe_mechanism;
typedef struct pe_reduced pe_reduced;
typedef struct pe_sampler pe_sampler;

pe_status pe_mechanism_subset(int32_t k, double epsilon, int32_t d, pe_mechanism** out);
pe_status pe_mechanism_krr(int32_t k, double epsilon, pe_mechanism** out);
pe_status pe_mechanism_krappor(int32_t k, double epsilon, pe_mechanism** out);
pe_status pe_mechanism_from_json(const char* json, pe_mechanism** out);
/* Caller frees via pe_string_free. */
pe_status pe_mechanism_to_json(const pe_mechanism* m, char** json_out);
void pe_mechanism_free(pe_mechanism* m);
void pe_string_free(char* s);

int32_t pe_mechanism_k(const pe_mechanism* m);
double pe_mechanism_epsilon(const pe_mechanism* m);
int32_t pe_mechanism_outputs(const pe_mechanism* m);
/* Subset size d for subset mechanisms, 0 otherwise. */
int32_t pe_mechanism_subset_d(const pe_mechanism* m);

typedef struct pe_ldp_report {
  int32_t ok;
  double worst_ratio; /* +inf when an output mixes zero and nonzero mass */
  int32_t extremal;
  int32_t zero_rows;
} pe_ldp_report;

pe_status pe_verify_ldp(const pe_mechanism* m, double epsilon, pe_ldp_report* out);

pe_status pe_reduce(const pe_mechanism* m, pe_reduced** out);
void pe_reduced_free(pe_reduced* r);
int32_t pe_reduced_k(const pe_reduced* r);
int32_t pe_reduced_classes(const pe_reduced* r);
/* out must hold pe_reduced_classes(r) doubles; p holds k probabilities. */
pe_status pe_marginal(const pe_reduced* r, const double* p, int32_t k, double* out);

/* ---- closed-form risk ---- */

pe_status pe_optimal_d(int32_t k, double epsilon, int32_t* d_star, double* objective);
pe_status pe_worst_case_risk(int32_t k, double epsilon, int32_t d, int64_t n, double* out);
pe_status pe_analytic_l2_risk(int32_t k, double epsilon, int32_t d, int64_t n,
                              const double* p, int32_t k_len, double* out);
pe_status pe_big_m(int32_t k, double epsilon, double* out);
pe_status pe_lower_bound_dominant(int32_t k, double epsilon, int64_t n, double* out);

/* ---- sampling, estimation, Monte Carlo ---- */

#define PE_ESTIMATOR_AUTO 0          /* empirical for subset mechanisms, else least squares */
#define PE_ESTIMATOR_EMPIRICAL 1
#define PE_ESTIMATOR_LEAST_SQUARES 2

/* Builds sampling tables once for a (mechanism, distribution, estimator)
 * triple; p is NULL for the uniform distribution. */
pe_status pe_sampler_new(const pe_mechanism* m, const double* p, int32_t k,
                         int32_t estimator, pe_sampler** out);
void pe_sampler_free(pe_sampler* s);
/* Number of reduced output classes = length of the per-trial count vector. */
int32_t pe_sampler_classes(const pe_sampler* s);

/* Runs one trial: n draws on stream (seed, trial). Writes the reduced counts
 * (t_len = pe_sampler_classes), the raw estimate (k_len = k) and the l2^2
 * loss against the sampling distribution. Identical inputs produce identical
 * outputs on any thread. */
pe_status pe_sampler_trial(const pe_sampler* s, int64_t n, uint64_t seed,
                           uint64_t trial, int64_t* t_out, int32_t t_len,
                           double* p_hat_out, int32_t k_len, double* loss_out);

/* Euclidean projection of an arbitrary point onto the probability simplex. */
pe_status pe_project_to_simplex(const double* p_hat, int32_t k, double* out);

/* The unbiased affine estimator from subset-mechanism bit counts. */
pe_status pe_empirical_estimate(int32_t k, double epsilon, int32_t d, int64_t n,
                                const int64_t* bit_counts, double* p_hat_out);

/* Least-squares baseline from reduced per-class counts (t_len = classes). */
pe_status pe_least_squares_estimate(const pe_reduced* r, const int64_t* t,
                                    int32_t t_len, double* p_hat_out);

typedef struct pe_risk_report {
  double analytic;   /* NaN when the mechanism has no closed form */
  double worst_case; /* NaN when the mechanism has no closed form */
  double mc_mean;
  double mc_stderr;
  int64_t trials;
  int64_t n;
} pe_risk_report;

pe_status pe_monte_carlo_risk(const pe_mechanism* m, int32_t estimator,
                              const double* p, int32_t k, int64_t n, int64_t trials,
                              uint64_t seed, int32_t threads, pe_risk_report* out);

/* ---- lower-bound calculus ---- */

typedef struct pe_lower_bound_report {
  double delta;
  double delta0;
  int32_t branch_case2;   /* 1 when delta < delta0 */
  int32_t phi_singular;   /* 1 when trace_plus_quad is unavailable */
  double trace_plus_quad; /* tr(Phi^-1) + 1^T Phi^-1 1 at this n */
  double m_over_n;        /* M(k, eps) / n */
  int32_t le_cam_unbounded;  /* delta == 0 */
  int32_t le_cam_infeasible; /* n too small for the two-point alternative */
  double le_cam_bound;
} pe_lower_bound_report;

pe_status pe_lower_bound(const pe_reduced* r, int64_t n, pe_lower_bound_report* out);

/* Piecewise access to the same calculus. Matrix outputs are row-major with
 * dimension (k-1) x (k-1); count arrays have t_len = pe_reduced_classes(r). */
pe_status pe_phi_matrix(const pe_reduced* r, int64_t n, double* out);
pe_status pe_w_vector(const pe_reduced* r, const int64_t* t, int32_t t_len,
                      double* out);
pe_status pe_trace_plus_quad(const pe_reduced* r, int64_t n, double* out);
pe_status pe_delta(const pe_reduced* r, double* out);
pe_status pe_delta0(int32_t k, double epsilon, double* out);
pe_status pe_fisher_information(const pe_reduced* r, int64_t n, double* out);
/* a: dim x dim row-major symmetric positive definite matrix. */
pe_status pe_trace_gap(const double* a, int32_t dim, double* lhs, double* slack);
pe_status pe_row_bound_check(const pe_reduced* r, double epsilon,
                             double* max_row_moment, double* bound, int32_t* ok);
pe_status pe_kl_divergence(const double* m1, const double* m2, int32_t len,
                           double* out);
pe_status pe_tv_distance(const double* m1, const double* m2, int32_t len,
                         double* out);
pe_status pe_le_cam_two_point(const pe_reduced* r, int64_t n, int32_t* unbounded,
                              double* value);

/* Posterior functions of the Bayes lab; u has k-1 coordinates. */
pe_status pe_log_posterior_g(const pe_reduced* r, const int64_t* t, int32_t t_len,
                             const double* u, int32_t u_len, double* out);
pe_status pe_quadratic_g2(const pe_reduced* r, const int64_t* t, int32_t t_len,
                          const double* u, int32_t u_len, double* out);
pe_status pe_h_v(const pe_reduced* r, const int64_t* t, int32_t t_len,
                 const double* u, int32_t u_len, double* out);
/* mean_out: k-1 entries; cov_out: (k-1) x (k-1) row-major. */
pe_status pe_gaussian_params(const pe_reduced* r, const int64_t* t, int32_t t_len,
                             double* mean_out, double* cov_out);
/* radius <= 0 selects the default (sum t)^(-5/13). */
pe_status pe_grid_posterior_moments(const pe_reduced* r, const int64_t* t,
                                    int32_t t_len, double radius,
                                    int32_t resolution, double* mean_out,
                                    double* cov_out, double* tv_out);
pe_status pe_log1p_quadratic_bound(double x, double* lhs, double* rhs,
                                   int32_t* ok);

/* ---- Bayes lab ---- */

typedef struct pe_bayes_report {
  double loss;
  double stderr_of_loss;
  double reference; /* tr(Phi^-1) + 1^T Phi^-1 1 */
  double ratio;     /* loss / reference */
  double radius;    /* resolved prior radius */
  double tv_p50, tv_p90, tv_p95, tv_max;
} pe_bayes_report;

/* radius <= 0 selects the default n^(-5/13); resolution <= 0 selects 256. */
pe_status pe_bayes_demo(const pe_mechanism* m, int64_t n, double radius,
                        int64_t trials, uint64_t seed, int32_t resolution,
                        int32_t threads, pe_bayes_report* out);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* PRIVEST_H_ */
