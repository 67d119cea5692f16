// Copyright 2026 The simband Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef SIMBAND_EXPERIMENT_HPP_
#define SIMBAND_EXPERIMENT_HPP_

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "simband/band.hpp"
#include "simband/empirical.hpp"
#include "simband/models.hpp"
#include "simband/subsampling.hpp"

namespace simband {

// One coverage or quantile-region experiment: scenario, data sizes,
// configuration sweep and seeding. B is always derived as floor(N / R_s).
struct ExperimentConfig {
  std::string scenario;                  // identity | mm1 | network
  long min_n = 0;                        // minimum input data size
  std::vector<double> ratios;            // per-source data size multipliers
  std::vector<double> thetas;            // subsample ratios (1 = full bootstrap)
  std::vector<int> inner_runs;           // R_s sweep
  long long budget = 0;                  // N = B * R_s
  int runs = 0;                          // R; 0 means "use min_n"
  int limit_samples = 10000;             // R_q
  double alpha = 0.05;
  double grid_lo = 0.0, grid_hi = 1.0;
  int grid_k = 100;
  int replications = 0;
  long proxy_runs = 100000;
  std::uint64_t seed = 0;
  std::vector<double> levels{0.25, 0.5, 0.75};  // quantile experiment only

  static std::vector<double> default_ratios(const std::string& scenario) {
    if (scenario == "mm1") return {1.0, 2.0};  // n_2 = 2 n_1
    if (scenario == "network") return std::vector<double>(13, 1.0);
    if (scenario == "identity") return {1.0};
    throw std::invalid_argument("ExperimentConfig: unknown scenario '" + scenario + "'");
  }

  void validate() const {
    (void)default_ratios(scenario);
    if (min_n < 1) throw std::invalid_argument("ExperimentConfig: min_n must be >= 1");
    if (thetas.empty() || inner_runs.empty()) {
      throw std::invalid_argument("ExperimentConfig: theta and R_s sweeps must be nonempty");
    }
    for (double t : thetas) {
      if (!(t > 0.0 && t <= 1.0)) {
        throw std::invalid_argument("ExperimentConfig: theta must lie in (0,1]");
      }
    }
    for (int r : inner_runs) {
      if (r < 2) throw std::invalid_argument("ExperimentConfig: R_s must be >= 2");
      if (budget / r < 2) {
        throw std::invalid_argument("ExperimentConfig: budget too small for R_s = " +
                                    std::to_string(r));
      }
    }
    if (budget < 4) throw std::invalid_argument("ExperimentConfig: N must be >= 4");
    if (runs < 0) throw std::invalid_argument("ExperimentConfig: R must be >= 1");
    if (limit_samples < 100) {
      throw std::invalid_argument("ExperimentConfig: R_q must be >= 100");
    }
    if (!(alpha > 0.0 && alpha < 1.0)) {
      throw std::invalid_argument("ExperimentConfig: alpha must lie in (0,1)");
    }
    if (!(grid_lo < grid_hi) || grid_k < 2) {
      throw std::invalid_argument("ExperimentConfig: bad grid specification");
    }
    if (replications < 1) {
      throw std::invalid_argument("ExperimentConfig: replications must be >= 1");
    }
    if (proxy_runs < 1) {
      throw std::invalid_argument("ExperimentConfig: proxy_runs must be >= 1");
    }
    for (double s : levels) {
      if (!(s > 0.0 && s < 1.0)) {
        throw std::invalid_argument("ExperimentConfig: levels must lie in (0,1)");
      }
    }
    if (!ratios.empty() &&
        ratios.size() != default_ratios(scenario).size()) {
      throw std::invalid_argument("ExperimentConfig: ratios must list one entry per source");
    }
  }

  int effective_runs() const { return runs > 0 ? runs : static_cast<int>(min_n); }

  std::vector<std::size_t> data_sizes() const {
    auto r = ratios.empty() ? default_ratios(scenario) : ratios;
    double lo = r[0];
    for (double v : r) lo = std::min(lo, v);
    std::vector<std::size_t> sizes;
    sizes.reserve(r.size());
    for (double v : r) {
      sizes.push_back(static_cast<std::size_t>(
          std::llround(static_cast<double>(min_n) * v / lo)));
    }
    return sizes;
  }
};

namespace detail {

inline std::vector<double> parse_number_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t pos = 0;
    const double v = std::stod(item, &pos);
    while (pos < item.size() && std::isspace(static_cast<unsigned char>(item[pos]))) ++pos;
    if (pos != item.size()) {
      throw std::invalid_argument("config: malformed number in '" + key + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) throw std::invalid_argument("config: empty list for '" + key + "'");
  return out;
}

}  // namespace detail

// key = value lines, '#' comments, unknown keys rejected.
inline ExperimentConfig parse_experiment_config(std::istream& is) {
  ExperimentConfig cfg;
  bool saw_scenario = false, saw_min_n = false, saw_theta = false, saw_rs = false,
       saw_budget = false, saw_reps = false, saw_seed = false;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto not_space = line.find_first_not_of(" \t\r\n");
    if (not_space == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    }
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r\n");
      const auto e = s.find_last_not_of(" \t\r\n");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": empty key or value");
    }
    if (key == "scenario") {
      cfg.scenario = value;
      saw_scenario = true;
    } else if (key == "min_n") {
      cfg.min_n = std::stol(value);
      saw_min_n = true;
    } else if (key == "ratios") {
      cfg.ratios = detail::parse_number_list(value, key);
    } else if (key == "theta") {
      cfg.thetas = detail::parse_number_list(value, key);
      saw_theta = true;
    } else if (key == "R_s") {
      cfg.inner_runs.clear();
      for (double v : detail::parse_number_list(value, key)) {
        cfg.inner_runs.push_back(static_cast<int>(v));
      }
      saw_rs = true;
    } else if (key == "N") {
      cfg.budget = std::stoll(value);
      saw_budget = true;
    } else if (key == "R") {
      cfg.runs = std::stoi(value);
    } else if (key == "R_q") {
      cfg.limit_samples = std::stoi(value);
    } else if (key == "alpha") {
      cfg.alpha = std::stod(value);
    } else if (key == "grid") {
      const auto v = detail::parse_number_list(value, key);
      if (v.size() != 3) throw std::invalid_argument("config: grid expects lo,hi,k");
      cfg.grid_lo = v[0];
      cfg.grid_hi = v[1];
      cfg.grid_k = static_cast<int>(v[2]);
    } else if (key == "replications") {
      cfg.replications = std::stoi(value);
      saw_reps = true;
    } else if (key == "proxy_runs") {
      cfg.proxy_runs = std::stol(value);
    } else if (key == "seed") {
      cfg.seed = std::stoull(value);
      saw_seed = true;
    } else if (key == "levels") {
      cfg.levels = detail::parse_number_list(value, key);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  if (!saw_scenario || !saw_min_n || !saw_theta || !saw_rs || !saw_budget || !saw_reps ||
      !saw_seed) {
    throw std::invalid_argument(
        "config: required keys are scenario, min_n, theta, R_s, N, replications, seed");
  }
  cfg.validate();
  return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file " + path);
  return parse_experiment_config(is);
}

struct ExperimentRow {
  std::string scenario;
  long min_n;
  double theta;
  int outer_resamples;  // B
  int inner_runs;       // R_s
  std::string method;
  double coverage;
  double mean_halfwidth;
  int replications;
  std::uint64_t seed;
};

struct ExperimentReport {
  std::vector<ExperimentRow> rows;
  int aborted_replications = 0;
  // Diagnostics, not exported to CSV.
  int budget_violations = 0;       // inflated runs != B*R_s + R
  int implication_violations = 0;  // band covered but region did not
  int inflation_violations = 0;    // inflated halfwidth below classic

  std::string to_csv() const {
    std::ostringstream os;
    os << "scenario,min_n,theta,B,R_s,method,coverage,mean_halfwidth,replications,seed\n";
    for (const auto& r : rows) {
      os << r.scenario << ',' << r.min_n << ',' << format_double(r.theta) << ','
         << r.outer_resamples << ',' << r.inner_runs << ',' << r.method << ','
         << format_double(r.coverage) << ',' << format_double(r.mean_halfwidth) << ','
         << r.replications << ',' << r.seed << "\n";
    }
    return os.str();
  }
};

inline void save_report_csv(const std::string& path, const ExperimentReport& report) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open report file " + path);
  os << report.to_csv();
}

namespace detail {

// Children of the master stream; replication streams hang off kReplications.
constexpr std::uint64_t kProxyChild = 0;
constexpr std::uint64_t kReplicationsChild = 1;
constexpr std::uint64_t kDataStage = 0;

inline std::uint64_t cov_stage(std::size_t combo) { return 1 + 2 * combo; }
inline std::uint64_t band_stage(std::size_t combo) { return 2 + 2 * combo; }

}  // namespace detail

// ECDF of `proxy_runs` outputs under the true parametric inputs; stands in
// for the unknown continuous output CDF. Cached to disk keyed by
// (scenario, proxy_runs, seed) when a cache directory is given.
inline EmpiricalDistribution build_truth_proxy(const std::string& scenario, long proxy_runs,
                                               std::uint64_t seed,
                                               const std::string& cache_dir = "") {
  if (proxy_runs < 1) throw std::invalid_argument("build_truth_proxy: runs must be >= 1");
  if (proxy_runs < 10000) {
    std::cerr << "warning: truth proxy built from only " << proxy_runs
              << " runs; its own noise may dominate coverage results\n";
  }
  std::filesystem::path cache_path;
  if (!cache_dir.empty()) {
    cache_path = std::filesystem::path(cache_dir) /
                 ("truth_" + scenario + "_" + std::to_string(proxy_runs) + "_" +
                  std::to_string(seed) + ".txt");
    if (std::filesystem::exists(cache_path)) {
      return load_ecdf(cache_path.string());
    }
  }
  const auto model = builtin_model(scenario);
  const auto laws = true_input_distributions(scenario);
  auto rng = RandomStream(seed).derive(detail::kProxyChild);
  std::vector<double> outputs;
  outputs.reserve(static_cast<std::size_t>(proxy_runs));
  for (long r = 0; r < proxy_runs; ++r) {
    outputs.push_back(simulate(model, laws, rng));
  }
  EmpiricalDistribution proxy(std::move(outputs));
  if (!cache_dir.empty()) {
    std::filesystem::create_directories(cache_path.parent_path());
    save_ecdf(cache_path.string(), proxy);
  }
  return proxy;
}

namespace detail {

struct ComboOutcome {
  bool ok = false;
  bool inflated_covered = false;
  bool classic_covered = false;
  bool inflated_region_covered = false;
  bool classic_region_covered = false;
  double inflated_halfwidth = 0.0;
  double classic_halfwidth = 0.0;
  bool budget_exact = false;
  bool implication_ok = true;
  bool inflation_ok = true;
};

struct ReplicationOutcome {
  bool aborted = false;
  std::vector<ComboOutcome> combos;
};

template <class PerReplication>
void run_replications(int replications, int threads, PerReplication&& body) {
  if (threads <= 1) {
    for (int r = 0; r < replications; ++r) body(r);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::thread> pool;
  const int workers = std::min(threads, replications);
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (int r = next.fetch_add(1); r < replications; r = next.fetch_add(1)) body(r);
    });
  }
  for (auto& t : pool) t.join();
}

// Shared implementation of the coverage and quantile-region experiments; the
// two differ only in which event enters the coverage column.
inline ExperimentReport run_experiment(const ExperimentConfig& cfg, bool quantile_mode,
                                       int threads, const std::string& cache_dir) {
  cfg.validate();
  const auto model = builtin_model(cfg.scenario);
  const auto laws = true_input_distributions(cfg.scenario);
  const auto sizes = cfg.data_sizes();
  if (sizes.size() != static_cast<std::size_t>(model.source_count())) {
    throw std::invalid_argument("run_experiment: ratio count does not match the model");
  }
  const Grid grid = uniform_grid(cfg.grid_lo, cfg.grid_hi, cfg.grid_k);
  const int R = cfg.effective_runs();

  const EmpiricalDistribution proxy =
      build_truth_proxy(cfg.scenario, cfg.proxy_runs, cfg.seed, cache_dir);
  std::vector<double> proxy_quantiles;
  for (double s : cfg.levels) proxy_quantiles.push_back(proxy.quantile(s));

  struct Combo {
    double theta;
    int inner;
    int outer;
  };
  std::vector<Combo> combos;
  for (double theta : cfg.thetas) {
    for (int rs : cfg.inner_runs) {
      combos.push_back(Combo{theta, rs, static_cast<int>(cfg.budget / rs)});
    }
  }

  const auto reps_root = RandomStream(cfg.seed).derive(kReplicationsChild);
  std::vector<ReplicationOutcome> outcomes(static_cast<std::size_t>(cfg.replications));
  std::mutex log_mutex;

  run_replications(cfg.replications, threads, [&](int r) {
    auto& outcome = outcomes[static_cast<std::size_t>(r)];
    outcome.combos.resize(combos.size());
    const auto rep_root = reps_root.derive(static_cast<std::uint64_t>(r));
    try {
      auto data_rng = rep_root.derive(kDataStage);
      const InputDataset data = draw_dataset(laws, sizes, data_rng);
      for (std::size_t c = 0; c < combos.size(); ++c) {
        auto& result = outcome.combos[c];
        long long model_runs = 0;
        const auto counted = model.counting(&model_runs);
        const SubsampleConfig sub(combos[c].theta, combos[c].outer, combos[c].inner);

        auto cov_rng = rep_root.derive(cov_stage(c));
        const auto cov = estimate_covariance(counted, data, sub, grid, cov_rng);

        auto band_rng = rep_root.derive(band_stage(c));
        const auto inflated =
            build_inflated_band(counted, data, R, cov, grid, cfg.alpha, cfg.limit_samples,
                                band_rng,
                                combos[c].theta == 1.0 ? BandMethod::bootstrap_full
                                                       : BandMethod::inflated);
        result.budget_exact =
            model_runs == static_cast<long long>(sub.budget()) + R;

        const auto classic = build_classic_ks_band(inflated.center(), R, cfg.alpha);
        result.inflated_halfwidth = inflated.halfwidth();
        result.classic_halfwidth = classic.halfwidth();
        result.inflation_ok = inflated.halfwidth() >= classic.halfwidth();

        result.inflated_covered = band_covers(inflated, proxy);
        result.classic_covered = band_covers(classic, proxy);
        if (quantile_mode) {
          result.inflated_region_covered = region_covers(
              extract_quantile_region(inflated, cfg.levels), proxy_quantiles);
          result.classic_region_covered = region_covers(
              extract_quantile_region(classic, cfg.levels), proxy_quantiles);
          result.implication_ok =
              !result.inflated_covered || result.inflated_region_covered;
        }
        result.ok = true;
      }
    } catch (const std::exception& e) {
      outcome.aborted = true;
      std::lock_guard<std::mutex> lock(log_mutex);
      std::cerr << "replication " << r << " aborted: " << e.what() << "\n";
    }
  });

  ExperimentReport report;
  int completed = 0;
  for (const auto& o : outcomes) {
    if (o.aborted) {
      ++report.aborted_replications;
    } else {
      ++completed;
    }
  }
  if (report.aborted_replications * 100 > cfg.replications) {
    throw std::runtime_error("run_experiment: more than 1% of replications aborted (" +
                             std::to_string(report.aborted_replications) + " of " +
                             std::to_string(cfg.replications) + ")");
  }

  for (std::size_t c = 0; c < combos.size(); ++c) {
    long inflated_cov = 0, classic_cov = 0;
    double inflated_hw = 0, classic_hw = 0;
    for (const auto& o : outcomes) {
      if (o.aborted) continue;
      const auto& result = o.combos[c];
      if (!result.budget_exact) ++report.budget_violations;
      if (!result.implication_ok) ++report.implication_violations;
      if (!result.inflation_ok) ++report.inflation_violations;
      const bool inf_event =
          quantile_mode ? result.inflated_region_covered : result.inflated_covered;
      const bool ks_event =
          quantile_mode ? result.classic_region_covered : result.classic_covered;
      inflated_cov += inf_event ? 1 : 0;
      classic_cov += ks_event ? 1 : 0;
      inflated_hw += result.inflated_halfwidth;
      classic_hw += result.classic_halfwidth;
    }
    ExperimentRow base;
    base.scenario = cfg.scenario;
    base.min_n = cfg.min_n;
    base.theta = combos[c].theta;
    base.outer_resamples = combos[c].outer;
    base.inner_runs = combos[c].inner;
    base.replications = completed;
    base.seed = cfg.seed;

    ExperimentRow inflated_row = base;
    inflated_row.method = "inflated";
    inflated_row.coverage = completed ? static_cast<double>(inflated_cov) / completed : 0.0;
    inflated_row.mean_halfwidth = completed ? inflated_hw / completed : 0.0;
    report.rows.push_back(inflated_row);

    ExperimentRow classic_row = base;
    classic_row.method = "classic_ks";
    classic_row.coverage = completed ? static_cast<double>(classic_cov) / completed : 0.0;
    classic_row.mean_halfwidth = completed ? classic_hw / completed : 0.0;
    report.rows.push_back(classic_row);
  }
  return report;
}

}  // namespace detail

// Coverage of the whole output CDF: per replication, fresh data from the true
// inputs, covariance subsampling plus band construction per (theta, R_s)
// combination, and the exact band-covers event against the cached truth
// proxy. theta = 1 rows are the standard-bootstrap baseline; classic KS rows
// share the center ECDF.
inline ExperimentReport run_coverage_experiment(const ExperimentConfig& cfg, int threads = 1,
                                                const std::string& cache_dir = "") {
  return detail::run_experiment(cfg, /*quantile_mode=*/false, threads, cache_dir);
}

// Same sweep, but the event is simultaneous coverage of the proxy quantiles
// at cfg.levels by the inverted band.
inline ExperimentReport run_quantile_experiment(const ExperimentConfig& cfg, int threads = 1,
                                                const std::string& cache_dir = "") {
  return detail::run_experiment(cfg, /*quantile_mode=*/true, threads, cache_dir);
}

}  // namespace simband

#endif  // SIMBAND_EXPERIMENT_HPP_
