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

// Command-line front end for the privest shared library. Every command is
// deterministic under a fixed seed: outputs are byte-identical across runs
// and worker counts.

#include <atomic>
#include <cinttypes>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "privest.h"

namespace {

using nlohmann::ordered_json;

constexpr int kExitUsage = 2;
constexpr int kExitNumerical = 3;

class CliError : public std::runtime_error {
 public:
  CliError(int exit_code, const std::string& message)
      : std::runtime_error(message), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

void Check(pe_status status) {
  if (status == PE_OK) return;
  const int code = pe_status_is_usage(status) ? kExitUsage : kExitNumerical;
  throw CliError(code, std::string(pe_status_name(status)) + ": " + pe_last_error());
}

std::string FormatDouble(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

// ---- option plumbing: flags override --config file values ----

std::map<std::string, std::string> LoadConfigFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kExitUsage, "cannot open config file: " + path);
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto begin = s.find_first_not_of(" \t\r");
      const auto end = s.find_last_not_of(" \t\r");
      return begin == std::string::npos ? std::string() : s.substr(begin, end - begin + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!key.empty()) kv[key] = value;
  }
  return kv;
}

// String-valued options resolved as: command line > config file > default.
class OptionSet {
 public:
  OptionSet(CLI::App* cmd, const std::map<std::string, std::string>& config)
      : cmd_(cmd), config_(config) {}

  void Add(const std::string& key, const std::string& default_value,
           const std::string& help) {
    values_[key] = default_value;
    cmd_->add_option("--" + key, values_[key], help);
  }
  void AddFlag(const std::string& key, const std::string& help) {
    flags_[key] = false;
    cmd_->add_flag("--" + key, flags_[key], help);
  }

  // Applies config-file fallbacks; call after CLI11 parsing.
  void Finalize() {
    for (auto& [key, value] : values_) {
      if (cmd_->count("--" + key) == 0) {
        const auto it = config_.find(key);
        if (it != config_.end()) value = it->second;
      }
    }
    for (auto& [key, value] : flags_) {
      if (cmd_->count("--" + key) == 0) {
        const auto it = config_.find(key);
        if (it != config_.end()) value = (it->second == "true" || it->second == "1");
      }
    }
  }

  const std::string& Str(const std::string& key) const { return values_.at(key); }
  bool Flag(const std::string& key) const { return flags_.at(key); }

  std::int64_t Int(const std::string& key) const {
    try {
      std::size_t pos = 0;
      const std::int64_t v = std::stoll(Str(key), &pos);
      if (pos != Str(key).size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw CliError(kExitUsage, "option --" + key + " expects an integer, got '" +
                                     Str(key) + "'");
    }
  }
  double Real(const std::string& key) const {
    try {
      std::size_t pos = 0;
      const double v = std::stod(Str(key), &pos);
      if (pos != Str(key).size()) throw std::invalid_argument(key);
      return v;
    } catch (const std::exception&) {
      throw CliError(kExitUsage,
                     "option --" + key + " expects a number, got '" + Str(key) + "'");
    }
  }
  std::vector<std::int64_t> IntList(const std::string& key) const {
    std::vector<std::int64_t> out;
    std::stringstream ss(Str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stoll(item));
      } catch (const std::exception&) {
        throw CliError(kExitUsage, "option --" + key + ": bad integer '" + item + "'");
      }
    }
    if (out.empty()) throw CliError(kExitUsage, "option --" + key + " is empty");
    return out;
  }
  std::vector<double> RealList(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(Str(key));
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        out.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw CliError(kExitUsage, "option --" + key + ": bad number '" + item + "'");
      }
    }
    if (out.empty()) throw CliError(kExitUsage, "option --" + key + " is empty");
    return out;
  }

 private:
  CLI::App* cmd_;
  const std::map<std::string, std::string>& config_;
  std::map<std::string, std::string> values_;
  std::map<std::string, bool> flags_;
};

void WriteOutput(const std::string& out_path, const std::string& content) {
  if (out_path.empty()) {
    std::fwrite(content.data(), 1, content.size(), stdout);
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw CliError(kExitUsage, "cannot open output file: " + out_path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
}

// ---- shared pieces ----

using MechanismPtr = std::unique_ptr<pe_mechanism, decltype(&pe_mechanism_free)>;
using ReducedPtr = std::unique_ptr<pe_reduced, decltype(&pe_reduced_free)>;
using SamplerPtr = std::unique_ptr<pe_sampler, decltype(&pe_sampler_free)>;

int ResolveD(const std::string& d_text, std::int64_t k, double eps) {
  if (d_text == "auto") {
    int32_t d_star = 0;
    Check(pe_optimal_d(static_cast<int32_t>(k), eps, &d_star, nullptr));
    return d_star;
  }
  try {
    return std::stoi(d_text);
  } catch (const std::exception&) {
    throw CliError(kExitUsage, "--d expects an integer or 'auto', got '" + d_text + "'");
  }
}

MechanismPtr BuildMechanism(const OptionSet& opts, int* resolved_d) {
  pe_mechanism* raw = nullptr;
  const std::string file = opts.Str("mechanism-file");
  if (!file.empty()) {
    std::ifstream in(file);
    if (!in) throw CliError(kExitUsage, "cannot open mechanism file: " + file);
    std::stringstream ss;
    ss << in.rdbuf();
    std::string text = ss.str();
    // Accept both a bare mechanism object and the `mech` command's wrapper.
    try {
      const nlohmann::json parsed = nlohmann::json::parse(text);
      if (parsed.is_object() && parsed.contains("mechanism")) {
        text = parsed.at("mechanism").dump();
      }
    } catch (const nlohmann::json::exception&) {
      // Fall through; the library reports the parse error with context.
    }
    Check(pe_mechanism_from_json(text.c_str(), &raw));
    if (resolved_d != nullptr) *resolved_d = pe_mechanism_subset_d(raw);
    return MechanismPtr(raw, &pe_mechanism_free);
  }

  const std::string kind = opts.Str("kind");
  const std::int64_t k = opts.Int("k");
  const double eps = opts.Real("eps");
  if (kind == "subset") {
    const int d = ResolveD(opts.Str("d"), k, eps);
    if (resolved_d != nullptr) *resolved_d = d;
    Check(pe_mechanism_subset(static_cast<int32_t>(k), eps, d, &raw));
  } else if (kind == "rr") {
    Check(pe_mechanism_krr(static_cast<int32_t>(k), eps, &raw));
    if (resolved_d != nullptr) *resolved_d = 0;
  } else if (kind == "rappor") {
    Check(pe_mechanism_krappor(static_cast<int32_t>(k), eps, &raw));
    if (resolved_d != nullptr) *resolved_d = 0;
  } else {
    throw CliError(kExitUsage, "--kind must be subset, rr or rappor, got '" + kind + "'");
  }
  return MechanismPtr(raw, &pe_mechanism_free);
}

// Parses "--p uniform" or "--p file:<path>"; empty result means uniform.
std::vector<double> LoadDistribution(const std::string& spec) {
  if (spec == "uniform") return {};
  if (spec.rfind("file:", 0) != 0) {
    throw CliError(kExitUsage, "--p expects 'uniform' or 'file:<path>', got '" + spec + "'");
  }
  const std::string path = spec.substr(5);
  std::ifstream in(path);
  if (!in) throw CliError(kExitUsage, "cannot open distribution file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw CliError(kExitUsage, std::string("bad distribution file: ") + e.what());
  }
  if (!j.is_array() || j.empty()) {
    throw CliError(kExitUsage, "distribution file must hold a JSON array of probabilities");
  }
  std::vector<double> p;
  for (const auto& x : j) {
    if (!x.is_number()) {
      throw CliError(kExitUsage, "distribution file must hold numbers only");
    }
    p.push_back(x.get<double>());
  }
  return p;
}

int ParseEstimator(const std::string& text) {
  if (text == "auto") return PE_ESTIMATOR_AUTO;
  if (text == "empirical") return PE_ESTIMATOR_EMPIRICAL;
  if (text == "ls") return PE_ESTIMATOR_LEAST_SQUARES;
  throw CliError(kExitUsage, "--estimator must be auto, empirical or ls");
}

// Fixed-order pairwise sum; the reduction result is independent of which
// worker produced each entry.
double PairwiseSum(const double* values, std::size_t count) {
  if (count == 0) return 0.0;
  if (count <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < count; ++i) s += values[i];
    return s;
  }
  const std::size_t half = count / 2;
  return PairwiseSum(values, half) + PairwiseSum(values + half, count - half);
}

void RunParallel(std::int64_t count, int threads, const std::function<void(std::int64_t)>& fn) {
  int workers = threads > 0 ? threads : static_cast<int>(std::thread::hardware_concurrency());
  if (workers < 1) workers = 1;
  workers = static_cast<int>(std::min<std::int64_t>(workers, count));
  if (workers <= 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::thread> pool;
  std::atomic<bool> failed{false};
  std::string error_text;
  int error_code = kExitNumerical;
  std::mutex error_mutex;
  auto work = [&]() {
    while (!failed.load()) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (const CliError& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        error_text = e.what();
        error_code = e.exit_code();
        return;
      } catch (const std::exception& e) {
        std::lock_guard<std::mutex> lock(error_mutex);
        failed.store(true);
        error_text = e.what();
        return;
      }
    }
  };
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  if (failed.load()) throw CliError(error_code, error_text);
}

ordered_json VerifyToJson(const pe_ldp_report& report) {
  ordered_json v;
  v["ok"] = report.ok != 0;
  if (std::isfinite(report.worst_ratio)) {
    v["worst_ratio"] = report.worst_ratio;
  } else {
    v["worst_ratio"] = "infinity";
  }
  v["extremal"] = report.extremal != 0;
  v["zero_rows"] = report.zero_rows;
  return v;
}

// ---- commands ----

int CmdMech(const OptionSet& opts) {
  if (opts.Str("format") != "json") {
    throw CliError(kExitUsage, "mech emits JSON; use --format json");
  }
  int resolved_d = 0;
  const MechanismPtr mech = BuildMechanism(opts, &resolved_d);

  pe_ldp_report verify{};
  Check(pe_verify_ldp(mech.get(), pe_mechanism_epsilon(mech.get()), &verify));

  char* mech_json = nullptr;
  Check(pe_mechanism_to_json(mech.get(), &mech_json));
  const ordered_json mechanism = ordered_json::parse(mech_json);
  pe_string_free(mech_json);

  ordered_json out;
  out["command"] = "mech";
  ordered_json config;
  config["k"] = pe_mechanism_k(mech.get());
  config["eps"] = pe_mechanism_epsilon(mech.get());
  if (resolved_d > 0) config["d"] = resolved_d;
  config["label"] = mechanism.at("label");
  out["config"] = std::move(config);
  out["mechanism"] = mechanism;
  out["verify"] = VerifyToJson(verify);
  WriteOutput(opts.Str("out"), out.dump(2) + "\n");
  return 0;
}

int CmdRiskTable(const OptionSet& opts) {
  if (opts.Str("format") == "json") {
    throw CliError(kExitUsage, "risk-table emits CSV; use --format csv");
  }
  const std::vector<std::int64_t> ks = opts.IntList("k");
  const std::vector<double> epss = opts.RealList("eps");
  const std::vector<std::int64_t> ns = opts.IntList("n");
  const std::string d_text = opts.Str("d");
  const bool mc = opts.Flag("mc");
  const std::int64_t trials = opts.Int("trials");
  const std::uint64_t seed = static_cast<std::uint64_t>(opts.Int("seed"));
  const int threads = static_cast<int>(opts.Int("threads"));
  const std::vector<double> p = LoadDistribution(opts.Str("p"));
  if (!p.empty() && ks.size() > 1) {
    throw CliError(kExitUsage, "a distribution file needs a single --k value");
  }

  std::string csv;
  csv += "# privest risk-table\n";
  csv += "# k=" + opts.Str("k") + " eps=" + opts.Str("eps") + " d=" + d_text +
         " n=" + opts.Str("n") + " p=" + opts.Str("p") +
         " mc=" + (mc ? std::string("true") : std::string("false")) +
         " trials=" + std::to_string(trials) + " seed=" + std::to_string(seed) + "\n";
  csv += "k,epsilon,d,n,analytic,worst_case,mc_mean,mc_stderr,trials,seed\n";

  for (const std::int64_t k : ks) {
    for (const double eps : epss) {
      const int d = ResolveD(d_text, k, eps);
      for (const std::int64_t n : ns) {
        double analytic = 0.0, worst = 0.0;
        Check(pe_analytic_l2_risk(static_cast<int32_t>(k), eps, d, n,
                                  p.empty() ? nullptr : p.data(),
                                  static_cast<int32_t>(p.empty() ? k : p.size()),
                                  &analytic));
        Check(pe_worst_case_risk(static_cast<int32_t>(k), eps, d, n, &worst));

        csv += std::to_string(k) + "," + FormatDouble(eps) + "," + std::to_string(d) +
               "," + std::to_string(n) + "," + FormatDouble(analytic) + "," +
               FormatDouble(worst);
        if (mc) {
          pe_mechanism* raw = nullptr;
          Check(pe_mechanism_subset(static_cast<int32_t>(k), eps, d, &raw));
          const MechanismPtr mech(raw, &pe_mechanism_free);
          pe_risk_report report{};
          Check(pe_monte_carlo_risk(mech.get(), PE_ESTIMATOR_EMPIRICAL,
                                    p.empty() ? nullptr : p.data(),
                                    static_cast<int32_t>(p.empty() ? k : p.size()), n,
                                    trials, seed, threads, &report));
          csv += "," + FormatDouble(report.mc_mean) + "," +
                 FormatDouble(report.mc_stderr) + "," + std::to_string(report.trials);
        } else {
          csv += ",,,";
        }
        csv += "," + std::to_string(seed) + "\n";
      }
    }
  }
  WriteOutput(opts.Str("out"), csv);
  return 0;
}

int CmdLowerBound(const OptionSet& opts) {
  int resolved_d = 0;
  const MechanismPtr mech = BuildMechanism(opts, &resolved_d);
  pe_reduced* raw = nullptr;
  Check(pe_reduce(mech.get(), &raw));
  const ReducedPtr reduced(raw, &pe_reduced_free);
  const std::vector<std::int64_t> ns = opts.IntList("n");
  const int32_t k = pe_reduced_k(reduced.get());
  const double eps = pe_mechanism_epsilon(mech.get());

  std::vector<pe_lower_bound_report> reports;
  for (const std::int64_t n : ns) {
    pe_lower_bound_report report{};
    Check(pe_lower_bound(reduced.get(), n, &report));
    reports.push_back(report);
  }

  auto le_cam_text = [](const pe_lower_bound_report& r) -> std::string {
    if (r.le_cam_unbounded) return "inf";
    if (r.le_cam_infeasible) return "";
    return FormatDouble(r.le_cam_bound);
  };

  if (opts.Str("format") == "json") {
    ordered_json out;
    out["command"] = "lower-bound";
    ordered_json config;
    config["k"] = k;
    config["eps"] = eps;
    config["mechanism"] = opts.Str("mechanism-file").empty()
                              ? opts.Str("kind")
                              : std::string("file");
    if (resolved_d > 0) config["d"] = resolved_d;
    config["n"] = opts.Str("n");
    out["config"] = std::move(config);
    out["note"] =
        "minimax lower bound: M(k,eps)/n - C(k,eps) n^(-14/13); the remainder "
        "constant is not computable, only M_over_n is tabulated";
    ordered_json rows = ordered_json::array();
    for (std::size_t i = 0; i < ns.size(); ++i) {
      const pe_lower_bound_report& r = reports[i];
      ordered_json row;
      row["k"] = k;
      row["epsilon"] = eps;
      row["n"] = ns[i];
      row["delta"] = r.delta;
      row["delta0"] = r.delta0;
      row["branch"] = r.branch_case2 ? "case2" : "case1";
      if (r.phi_singular) {
        row["trace_plus_quad"] = nullptr;
      } else {
        row["trace_plus_quad"] = r.trace_plus_quad;
      }
      row["M_over_n"] = r.m_over_n;
      if (r.le_cam_unbounded) {
        row["le_cam_bound"] = "inf";
      } else if (r.le_cam_infeasible) {
        row["le_cam_bound"] = nullptr;
      } else {
        row["le_cam_bound"] = r.le_cam_bound;
      }
      rows.push_back(std::move(row));
    }
    out["rows"] = std::move(rows);
    WriteOutput(opts.Str("out"), out.dump(2) + "\n");
    return 0;
  }

  std::string csv;
  csv += "# privest lower-bound\n";
  csv += "# mechanism=" +
         (opts.Str("mechanism-file").empty() ? opts.Str("kind")
                                             : opts.Str("mechanism-file")) +
         " k=" + std::to_string(k) + " eps=" + FormatDouble(eps) +
         (resolved_d > 0 ? " d=" + std::to_string(resolved_d) : std::string()) +
         " n=" + opts.Str("n") + "\n";
  csv += "# minimax lower bound: M(k,eps)/n - C(k,eps) n^(-14/13); the remainder "
         "constant is not computable, only M_over_n is tabulated\n";
  csv += "k,epsilon,n,delta,delta0,branch,trace_plus_quad,M_over_n,le_cam_bound\n";
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const pe_lower_bound_report& r = reports[i];
    csv += std::to_string(k) + "," + FormatDouble(eps) + "," + std::to_string(ns[i]) +
           "," + FormatDouble(r.delta) + "," + FormatDouble(r.delta0) + "," +
           (r.branch_case2 ? "case2" : "case1") + "," +
           (r.phi_singular ? std::string() : FormatDouble(r.trace_plus_quad)) + "," +
           FormatDouble(r.m_over_n) + "," + le_cam_text(r) + "\n";
  }
  WriteOutput(opts.Str("out"), csv);
  return 0;
}

int CmdSimulate(const OptionSet& opts) {
  if (opts.Str("format") != "json") {
    throw CliError(kExitUsage, "simulate emits JSON; use --format json");
  }
  int resolved_d = 0;
  const MechanismPtr mech = BuildMechanism(opts, &resolved_d);
  const std::vector<double> p = LoadDistribution(opts.Str("p"));
  const std::int64_t n = opts.Int("n");
  const std::int64_t trials = opts.Int("trials");
  if (trials < 1) throw CliError(kExitUsage, "--trials must be >= 1");
  const std::uint64_t seed = static_cast<std::uint64_t>(opts.Int("seed"));
  const int threads = static_cast<int>(opts.Int("threads"));
  const int estimator = ParseEstimator(opts.Str("estimator"));

  pe_sampler* raw = nullptr;
  Check(pe_sampler_new(mech.get(), p.empty() ? nullptr : p.data(),
                       static_cast<int32_t>(p.empty() ? 0 : p.size()), estimator, &raw));
  const SamplerPtr sampler(raw, &pe_sampler_free);
  const int32_t classes = pe_sampler_classes(sampler.get());
  const int32_t k = pe_mechanism_k(mech.get());

  std::vector<std::vector<std::int64_t>> counts(trials,
                                                std::vector<std::int64_t>(classes));
  std::vector<std::vector<double>> estimates(trials, std::vector<double>(k));
  std::vector<double> losses(trials);
  RunParallel(trials, threads, [&](std::int64_t trial) {
    Check(pe_sampler_trial(sampler.get(), n, seed, static_cast<std::uint64_t>(trial),
                           counts[trial].data(), classes, estimates[trial].data(), k,
                           &losses[trial]));
  });

  ordered_json out;
  out["command"] = "simulate";
  ordered_json config;
  config["k"] = k;
  config["eps"] = pe_mechanism_epsilon(mech.get());
  if (resolved_d > 0) config["d"] = resolved_d;
  config["n"] = n;
  config["trials"] = trials;
  config["seed"] = seed;
  config["p"] = opts.Str("p");
  config["estimator"] = opts.Str("estimator");
  out["config"] = std::move(config);

  ordered_json records = ordered_json::array();
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    ordered_json rec;
    rec["trial"] = trial;
    rec["n"] = n;
    rec["t"] = counts[trial];
    rec["p_hat"] = estimates[trial];
    rec["loss"] = losses[trial];
    records.push_back(std::move(rec));
  }
  out["trials"] = std::move(records);

  const double mean = PairwiseSum(losses.data(), losses.size()) /
                      static_cast<double>(trials);
  ordered_json summary;
  summary["mc_mean"] = mean;
  if (trials >= 2) {
    std::vector<double> sq(trials);
    for (std::int64_t i = 0; i < trials; ++i) {
      const double d = losses[i] - mean;
      sq[i] = d * d;
    }
    const double var =
        PairwiseSum(sq.data(), sq.size()) / static_cast<double>(trials - 1);
    summary["mc_stderr"] = std::sqrt(var / static_cast<double>(trials));
  }
  out["summary"] = std::move(summary);
  WriteOutput(opts.Str("out"), out.dump(2) + "\n");
  return 0;
}

int CmdBayesDemo(const OptionSet& opts) {
  if (opts.Str("format") != "json") {
    throw CliError(kExitUsage, "bayes-demo emits JSON; use --format json");
  }
  int resolved_d = 0;
  const MechanismPtr mech = BuildMechanism(opts, &resolved_d);
  const std::int64_t n = opts.Int("n");
  const std::int64_t trials = opts.Int("trials");
  const std::uint64_t seed = static_cast<std::uint64_t>(opts.Int("seed"));
  const int threads = static_cast<int>(opts.Int("threads"));
  const int resolution = static_cast<int>(opts.Int("resolution"));
  const double radius = opts.Str("radius") == "auto" ? 0.0 : opts.Real("radius");

  pe_bayes_report report{};
  Check(pe_bayes_demo(mech.get(), n, radius, trials, seed, resolution, threads, &report));

  ordered_json out;
  out["command"] = "bayes-demo";
  ordered_json config;
  config["k"] = pe_mechanism_k(mech.get());
  config["eps"] = pe_mechanism_epsilon(mech.get());
  if (resolved_d > 0) config["d"] = resolved_d;
  config["n"] = n;
  config["trials"] = trials;
  config["seed"] = seed;
  config["radius"] = opts.Str("radius");
  config["resolution"] = resolution;
  out["config"] = std::move(config);

  ordered_json rep;
  rep["k"] = pe_mechanism_k(mech.get());
  rep["epsilon"] = pe_mechanism_epsilon(mech.get());
  rep["n"] = n;
  rep["radius"] = report.radius;
  rep["trials"] = trials;
  rep["loss"] = report.loss;
  rep["stderr"] = report.stderr_of_loss;
  rep["reference"] = report.reference;
  rep["ratio"] = report.ratio;
  ordered_json tv;
  tv["p50"] = report.tv_p50;
  tv["p90"] = report.tv_p90;
  tv["p95"] = report.tv_p95;
  tv["max"] = report.tv_max;
  rep["tv_quantiles"] = std::move(tv);
  out["report"] = std::move(rep);
  WriteOutput(opts.Str("out"), out.dump(2) + "\n");
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privest: locally differentially private distribution estimation"};
  app.require_subcommand(1);

  // --config is resolved before anything else so option defaults can fall
  // back to the file.
  std::string config_path;
  app.add_option("--config", config_path, "key=value configuration file")
      ->expected(1);
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--config") config_path = argv[i + 1];
  }
  std::map<std::string, std::string> config;
  try {
    if (!config_path.empty()) config = LoadConfigFile(config_path);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  }

  auto add_mechanism_options = [&](OptionSet& opts, const std::string& default_kind) {
    opts.Add("kind", default_kind, "mechanism family: subset, rr or rappor");
    opts.Add("k", "3", "input alphabet size");
    opts.Add("eps", "1.0", "privacy parameter (nats)");
    opts.Add("d", "auto", "subset size, or 'auto' for the optimal d*");
    opts.Add("mechanism-file", "", "load the mechanism from a JSON file instead");
  };
  // --threads is accepted by every command; purely sequential ones ignore it.
  auto add_threads_option = [&](OptionSet& opts) {
    opts.Add("threads", "0", "worker threads (0 = all cores)");
  };

  std::map<std::string, std::unique_ptr<OptionSet>> option_sets;
  std::map<std::string, std::function<int(const OptionSet&)>> handlers;

  CLI::App* mech = app.add_subcommand("mech", "build a mechanism and verify its privacy");
  mech->fallthrough();
  option_sets["mech"] = std::make_unique<OptionSet>(mech, config);
  add_mechanism_options(*option_sets["mech"], "subset");
  add_threads_option(*option_sets["mech"]);
  option_sets["mech"]->Add("format", "json", "output format (json)");
  option_sets["mech"]->Add("out", "", "output path (default: stdout)");
  handlers["mech"] = CmdMech;

  CLI::App* risk = app.add_subcommand("risk-table", "tabulate closed-form and Monte Carlo risk");
  risk->fallthrough();
  option_sets["risk-table"] = std::make_unique<OptionSet>(risk, config);
  option_sets["risk-table"]->Add("k", "3", "input alphabet sizes (comma separated)");
  option_sets["risk-table"]->Add("eps", "1.0", "privacy parameters (comma separated)");
  option_sets["risk-table"]->Add("d", "auto", "subset size, or 'auto'");
  option_sets["risk-table"]->Add("n", "100000", "sample counts (comma separated)");
  option_sets["risk-table"]->AddFlag("mc", "attach Monte Carlo columns");
  option_sets["risk-table"]->Add("trials", "100", "Monte Carlo trials per row");
  option_sets["risk-table"]->Add("seed", "0", "RNG seed");
  option_sets["risk-table"]->Add("threads", "0", "worker threads (0 = all cores)");
  option_sets["risk-table"]->Add("p", "uniform", "distribution: uniform or file:<path>");
  option_sets["risk-table"]->Add("format", "csv", "output format (csv)");
  option_sets["risk-table"]->Add("out", "", "output path (default: stdout)");
  handlers["risk-table"] = CmdRiskTable;

  CLI::App* lower = app.add_subcommand("lower-bound", "delta, trace and Le Cam lower-bound report");
  lower->fallthrough();
  option_sets["lower-bound"] = std::make_unique<OptionSet>(lower, config);
  add_mechanism_options(*option_sets["lower-bound"], "subset");
  add_threads_option(*option_sets["lower-bound"]);
  option_sets["lower-bound"]->Add("n", "100000", "sample counts (comma separated)");
  option_sets["lower-bound"]->Add("format", "csv", "output format: csv or json");
  option_sets["lower-bound"]->Add("out", "", "output path (default: stdout)");
  handlers["lower-bound"] = CmdLowerBound;

  CLI::App* simulate = app.add_subcommand("simulate", "sample privatized data and estimate");
  simulate->fallthrough();
  option_sets["simulate"] = std::make_unique<OptionSet>(simulate, config);
  add_mechanism_options(*option_sets["simulate"], "subset");
  option_sets["simulate"]->Add("p", "uniform", "distribution: uniform or file:<path>");
  option_sets["simulate"]->Add("n", "1000", "samples per trial");
  option_sets["simulate"]->Add("trials", "10", "number of trials");
  option_sets["simulate"]->Add("seed", "0", "RNG seed");
  option_sets["simulate"]->Add("threads", "0", "worker threads (0 = all cores)");
  option_sets["simulate"]->Add("estimator", "auto", "estimator: auto, empirical or ls");
  option_sets["simulate"]->Add("format", "json", "output format (json)");
  option_sets["simulate"]->Add("out", "", "output path (default: stdout)");
  handlers["simulate"] = CmdSimulate;

  CLI::App* bayes = app.add_subcommand("bayes-demo", "grid-posterior Bayes loss check (k = 2 or 3)");
  bayes->fallthrough();
  option_sets["bayes-demo"] = std::make_unique<OptionSet>(bayes, config);
  add_mechanism_options(*option_sets["bayes-demo"], "subset");
  option_sets["bayes-demo"]->Add("n", "5000", "samples per trial");
  option_sets["bayes-demo"]->Add("trials", "500", "number of trials");
  option_sets["bayes-demo"]->Add("seed", "0", "RNG seed");
  option_sets["bayes-demo"]->Add("threads", "0", "worker threads (0 = all cores)");
  option_sets["bayes-demo"]->Add("radius", "auto", "prior ellipsoid radius ('auto' = n^(-5/13))");
  option_sets["bayes-demo"]->Add("resolution", "256", "grid nodes per axis");
  option_sets["bayes-demo"]->Add("format", "json", "output format (json)");
  option_sets["bayes-demo"]->Add("out", "", "output path (default: stdout)");
  handlers["bayes-demo"] = CmdBayesDemo;

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_name() == "CallForHelp" || e.get_name() == "CallForAllHelp") {
      return app.exit(e);
    }
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    for (auto& [name, handler] : handlers) {
      if (app.got_subcommand(name)) {
        option_sets[name]->Finalize();
        return handler(*option_sets[name]);
      }
    }
    std::cerr << "error: no command given\n";
    return kExitUsage;
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
}
