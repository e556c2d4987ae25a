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

// Exercises the shared-library C surface end to end: handles, error codes
// and the report structs consumed by the CLI and by foreign-language
// bindings.

#include "privest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include <gtest/gtest.h>

namespace {

const double kLn2 = std::log(2.0);
const double kLn3 = std::log(3.0);

TEST(CApiMechanism, SubsetBuildVerifyAndJsonRoundTrip) {
  pe_mechanism* m = nullptr;
  ASSERT_EQ(pe_mechanism_subset(3, kLn2, 1, &m), PE_OK);
  EXPECT_EQ(pe_mechanism_k(m), 3);
  EXPECT_EQ(pe_mechanism_outputs(m), 3);
  EXPECT_EQ(pe_mechanism_subset_d(m), 1);

  pe_ldp_report verify{};
  ASSERT_EQ(pe_verify_ldp(m, kLn2, &verify), PE_OK);
  EXPECT_EQ(verify.ok, 1);
  EXPECT_EQ(verify.extremal, 1);
  EXPECT_NEAR(verify.worst_ratio, 2.0, 1e-12);

  char* json = nullptr;
  ASSERT_EQ(pe_mechanism_to_json(m, &json), PE_OK);
  pe_mechanism* back = nullptr;
  ASSERT_EQ(pe_mechanism_from_json(json, &back), PE_OK);
  EXPECT_EQ(pe_mechanism_subset_d(back), 1);
  pe_ldp_report verify_back{};
  ASSERT_EQ(pe_verify_ldp(back, kLn2, &verify_back), PE_OK);
  EXPECT_EQ(verify_back.ok, verify.ok);
  EXPECT_DOUBLE_EQ(verify_back.worst_ratio, verify.worst_ratio);

  pe_string_free(json);
  pe_mechanism_free(back);
  pe_mechanism_free(m);
}

TEST(CApiMechanism, ErrorsCarryCodesAndMessages) {
  pe_mechanism* m = nullptr;
  const pe_status status = pe_mechanism_subset(3, kLn2, 3, &m);
  EXPECT_EQ(status, PE_ERR_D_OUT_OF_RANGE);
  EXPECT_EQ(pe_status_is_usage(status), 1);
  EXPECT_NE(std::strstr(pe_last_error(), "1 <= d <= k-1"), nullptr);

  EXPECT_EQ(pe_mechanism_from_json("{broken", &m), PE_ERR_PARSE);
  EXPECT_EQ(pe_mechanism_krappor(13, 1.0, &m), PE_ERR_ALPHABET_TOO_LARGE);
}

TEST(CApiMechanism, ReduceAndMarginal) {
  pe_mechanism* m = nullptr;
  ASSERT_EQ(pe_mechanism_krappor(2, 1.0, &m), PE_OK);
  pe_reduced* r = nullptr;
  ASSERT_EQ(pe_reduce(m, &r), PE_OK);
  EXPECT_EQ(pe_reduced_k(r), 2);
  EXPECT_EQ(pe_reduced_classes(r), 3);  // all-zeros/all-ones rows merge

  std::vector<double> marginal(3);
  ASSERT_EQ(pe_marginal(r, nullptr, 2, marginal.data()), PE_OK);
  double total = 0.0;
  for (double x : marginal) total += x;
  EXPECT_NEAR(total, 1.0, 1e-12);

  pe_reduced_free(r);
  pe_mechanism_free(m);
}

TEST(CApiRisk, ClosedFormsMatchHandValues) {
  double value = 0.0;
  ASSERT_EQ(pe_worst_case_risk(10, kLn2, 3, 1, &value), PE_OK);
  EXPECT_NEAR(value, 13689.0 / 210.0, 1e-10);

  int32_t d_star = 0;
  double objective = 0.0;
  ASSERT_EQ(pe_optimal_d(10, kLn2, &d_star, &objective), PE_OK);
  EXPECT_EQ(d_star, 3);

  ASSERT_EQ(pe_big_m(2, kLn3, &value), PE_OK);
  EXPECT_NEAR(value, 2.0, 1e-12);

  ASSERT_EQ(pe_lower_bound_dominant(10, kLn2, 100000, &value), PE_OK);
  EXPECT_NEAR(value, 13689.0 / 210.0 / 1e5, 1e-15);

  const std::vector<double> p{0.5, 0.3, 0.2};
  ASSERT_EQ(pe_analytic_l2_risk(3, kLn2, 1, 10, p.data(), 3, &value), PE_OK);
  double uniform_value = 0.0;
  ASSERT_EQ(pe_analytic_l2_risk(3, kLn2, 1, 10, nullptr, 3, &uniform_value), PE_OK);
  EXPECT_LT(value, uniform_value);  // sum p_i^2 > 1/k lowers the loss
}

TEST(CApiSampler, TrialsAreDeterministicAndConsistent) {
  pe_mechanism* m = nullptr;
  ASSERT_EQ(pe_mechanism_subset(3, kLn2, 1, &m), PE_OK);
  pe_sampler* s = nullptr;
  ASSERT_EQ(pe_sampler_new(m, nullptr, 0, PE_ESTIMATOR_AUTO, &s), PE_OK);
  const int32_t classes = pe_sampler_classes(s);
  ASSERT_EQ(classes, 3);

  std::vector<int64_t> t1(classes), t2(classes);
  std::vector<double> p1(3), p2(3);
  double loss1 = 0.0, loss2 = 0.0;
  ASSERT_EQ(pe_sampler_trial(s, 1000, 42, 0, t1.data(), classes, p1.data(), 3, &loss1),
            PE_OK);
  ASSERT_EQ(pe_sampler_trial(s, 1000, 42, 0, t2.data(), classes, p2.data(), 3, &loss2),
            PE_OK);
  EXPECT_EQ(t1, t2);
  EXPECT_EQ(p1, p2);
  EXPECT_EQ(loss1, loss2);

  int64_t total = 0;
  for (int64_t t : t1) total += t;
  EXPECT_EQ(total, 1000);
  double sum = 0.0;
  for (double x : p1) sum += x;
  EXPECT_NEAR(sum, 1.0, 1e-9);

  pe_sampler_free(s);
  pe_mechanism_free(m);
}

TEST(CApiMonteCarlo, ThreadCountDoesNotChangeTheReport) {
  pe_mechanism* m = nullptr;
  ASSERT_EQ(pe_mechanism_subset(3, kLn2, 1, &m), PE_OK);
  pe_risk_report one{}, two{};
  ASSERT_EQ(pe_monte_carlo_risk(m, PE_ESTIMATOR_AUTO, nullptr, 0, 2000, 64, 5, 1, &one),
            PE_OK);
  ASSERT_EQ(pe_monte_carlo_risk(m, PE_ESTIMATOR_AUTO, nullptr, 0, 2000, 64, 5, 2, &two),
            PE_OK);
  EXPECT_EQ(one.mc_mean, two.mc_mean);
  EXPECT_EQ(one.mc_stderr, two.mc_stderr);
  EXPECT_NEAR(one.analytic, 32.0 / 3.0 / 2000.0, 1e-12);
  pe_mechanism_free(m);
}

TEST(CApiLowerBound, BinaryReportMatchesHandValues) {
  pe_mechanism* m = nullptr;
  ASSERT_EQ(pe_mechanism_krr(2, kLn3, &m), PE_OK);
  pe_reduced* r = nullptr;
  ASSERT_EQ(pe_reduce(m, &r), PE_OK);

  pe_lower_bound_report report{};
  ASSERT_EQ(pe_lower_bound(r, 1, &report), PE_OK);
  EXPECT_NEAR(report.delta, 1.0 / std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(report.delta0, 0.125, 1e-12);
  EXPECT_EQ(report.branch_case2, 0);
  EXPECT_EQ(report.phi_singular, 0);
  EXPECT_NEAR(report.trace_plus_quad, 2.0, 1e-12);
  EXPECT_NEAR(report.m_over_n, 2.0, 1e-12);
  EXPECT_EQ(report.le_cam_infeasible, 1);  // n = 1 is too small

  pe_lower_bound_report big{};
  ASSERT_EQ(pe_lower_bound(r, 100000, &big), PE_OK);
  EXPECT_EQ(big.le_cam_infeasible, 0);
  EXPECT_GT(big.le_cam_bound, 0.0);

  pe_reduced_free(r);
  pe_mechanism_free(m);
}

TEST(CApiLowerBound, SingularPhiRoutesToCaseTwo) {
  const char* json =
      "{\"k\": 2, \"epsilon\": 1.0, \"label\": \"custom\","
      " \"outputs\": [[0.5, 0.5], [0.5, 0.5]]}";
  pe_mechanism* m = nullptr;
  ASSERT_EQ(pe_mechanism_from_json(json, &m), PE_OK);
  pe_reduced* r = nullptr;
  ASSERT_EQ(pe_reduce(m, &r), PE_OK);
  pe_lower_bound_report report{};
  ASSERT_EQ(pe_lower_bound(r, 100, &report), PE_OK);
  EXPECT_EQ(report.phi_singular, 1);
  EXPECT_EQ(report.branch_case2, 1);
  EXPECT_EQ(report.le_cam_unbounded, 1);
  pe_reduced_free(r);
  pe_mechanism_free(m);
}

TEST(CApiBayes, DemoReportIsDeterministicAndCoherent) {
  pe_mechanism* m = nullptr;
  ASSERT_EQ(pe_mechanism_krr(2, kLn3, &m), PE_OK);
  pe_bayes_report a{}, b{};
  ASSERT_EQ(pe_bayes_demo(m, 500, 0.0, 32, 9, 128, 1, &a), PE_OK);
  ASSERT_EQ(pe_bayes_demo(m, 500, 0.0, 32, 9, 128, 2, &b), PE_OK);
  EXPECT_EQ(a.loss, b.loss);
  EXPECT_EQ(a.tv_p95, b.tv_p95);
  EXPECT_NEAR(a.reference, 2.0 / 500.0, 1e-12);
  EXPECT_NEAR(a.radius, std::pow(500.0, -5.0 / 13.0), 1e-15);
  EXPECT_GT(a.ratio, 0.0);
  EXPECT_LE(a.tv_p50, a.tv_p95);
  EXPECT_LE(a.tv_p95, a.tv_max);

  ASSERT_EQ(pe_bayes_demo(m, 500, 0.05, 8, 9, 128, 1, &b), PE_OK);
  EXPECT_DOUBLE_EQ(b.radius, 0.05);  // explicit radius overrides the default
  pe_mechanism_free(m);
}

TEST(CApiPiecewise, LowerBoundCalculusMatchesTheAggregateReport) {
  pe_mechanism* m = nullptr;
  ASSERT_EQ(pe_mechanism_krr(2, kLn3, &m), PE_OK);
  pe_reduced* r = nullptr;
  ASSERT_EQ(pe_reduce(m, &r), PE_OK);

  double phi = 0.0;
  ASSERT_EQ(pe_phi_matrix(r, 1, &phi), PE_OK);
  EXPECT_NEAR(phi, 1.0, 1e-12);
  double fisher = 0.0;
  ASSERT_EQ(pe_fisher_information(r, 1, &fisher), PE_OK);
  EXPECT_NEAR(fisher, phi, 1e-12);

  const std::vector<int64_t> t{3, 1};
  double w = 0.0;
  ASSERT_EQ(pe_w_vector(r, t.data(), 2, &w), PE_OK);
  EXPECT_NEAR(w, 2.0, 1e-12);

  double tpq = 0.0, delta = 0.0, delta0 = 0.0;
  ASSERT_EQ(pe_trace_plus_quad(r, 1, &tpq), PE_OK);
  ASSERT_EQ(pe_delta(r, &delta), PE_OK);
  ASSERT_EQ(pe_delta0(2, kLn3, &delta0), PE_OK);
  pe_lower_bound_report report{};
  ASSERT_EQ(pe_lower_bound(r, 1, &report), PE_OK);
  EXPECT_DOUBLE_EQ(tpq, report.trace_plus_quad);
  EXPECT_DOUBLE_EQ(delta, report.delta);
  EXPECT_DOUBLE_EQ(delta0, report.delta0);

  double mean = 0.0, cov = 0.0;
  ASSERT_EQ(pe_gaussian_params(r, t.data(), 2, &mean, &cov), PE_OK);
  EXPECT_NEAR(mean, 0.5, 1e-12);  // Phi^-1 w = 2/4 at n = 4
  EXPECT_NEAR(cov, 0.25, 1e-12);

  double g = 0.0;
  const double u = 0.05;
  ASSERT_EQ(pe_log_posterior_g(r, t.data(), 2, &u, 1, &g), PE_OK);
  EXPECT_NEAR(g, 3.0 * std::log(1.05) + std::log(0.95), 1e-13);

  pe_reduced_free(r);
  pe_mechanism_free(m);
}

TEST(CApiPiecewise, ScalarUtilities) {
  double out[3] = {0.0, 0.0, 0.0};
  const double raw[3] = {3.0, -1.0, -1.0};
  ASSERT_EQ(pe_project_to_simplex(raw, 3, out), PE_OK);
  EXPECT_NEAR(out[0], 1.0, 1e-12);
  EXPECT_NEAR(out[1], 0.0, 1e-12);

  const int64_t bits[3] = {10, 0, 0};
  double p_hat[3];
  ASSERT_EQ(pe_empirical_estimate(3, kLn2, 1, 10, bits, p_hat), PE_OK);
  EXPECT_NEAR(p_hat[0], 3.0, 1e-12);

  const double m1[2] = {1.0, 0.0};
  const double m2[2] = {0.5, 0.5};
  double kl = 0.0, tv = 0.0;
  ASSERT_EQ(pe_kl_divergence(m1, m2, 2, &kl), PE_OK);
  EXPECT_NEAR(kl, std::log(2.0), 1e-14);
  ASSERT_EQ(pe_tv_distance(m1, m2, 2, &tv), PE_OK);
  EXPECT_DOUBLE_EQ(tv, 0.5);
  EXPECT_EQ(pe_kl_divergence(m2, m1, 2, &kl), PE_ERR_SUPPORT_MISMATCH);

  // a(I+J) attains the trace bound with equality.
  const double family[4] = {2.0, 1.0, 1.0, 2.0};
  double lhs = 0.0, slack = 0.0;
  ASSERT_EQ(pe_trace_gap(family, 2, &lhs, &slack), PE_OK);
  EXPECT_NEAR(lhs, 2.0, 1e-12);
  EXPECT_NEAR(slack, 0.0, 1e-12);

  double b_lhs = 0.0, b_rhs = 0.0;
  int32_t ok = 0;
  ASSERT_EQ(pe_log1p_quadratic_bound(0.5, &b_lhs, &b_rhs, &ok), PE_OK);
  EXPECT_EQ(ok, 1);
  EXPECT_EQ(pe_log1p_quadratic_bound(-0.7, &b_lhs, &b_rhs, &ok),
            PE_ERR_DOMAIN_VIOLATION);
}

TEST(CApiBayes, UnsupportedKIsAUsageError) {
  pe_mechanism* m = nullptr;
  ASSERT_EQ(pe_mechanism_krr(5, 1.0, &m), PE_OK);
  pe_bayes_report report{};
  const pe_status status = pe_bayes_demo(m, 100, 0.0, 4, 0, 128, 1, &report);
  EXPECT_EQ(status, PE_ERR_UNSUPPORTED_K);
  EXPECT_EQ(pe_status_is_usage(status), 1);
  pe_mechanism_free(m);
}

}  // namespace
