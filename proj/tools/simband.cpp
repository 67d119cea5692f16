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

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "simband/band.hpp"
#include "simband/experiment.hpp"
#include "simband/models.hpp"
#include "simband/network.hpp"
#include "simband/subsampling.hpp"

namespace {

using namespace simband;

InputDataset load_dataset(const std::string& dir, int sources) {
  InputDataset data;
  for (int i = 1; i <= sources; ++i) {
    const auto path = std::filesystem::path(dir) / ("input_" + std::to_string(i) + ".txt");
    std::ifstream is(path);
    if (!is) {
      throw std::runtime_error("cannot open " + path.string() +
                               " (expected one sample per line per source)");
    }
    std::vector<double> xs;
    double x;
    while (is >> x) xs.push_back(x);
    if (xs.empty()) throw std::runtime_error(path.string() + " holds no samples");
    data.sources.emplace_back(std::move(xs));
  }
  return data;
}

void write_or_print(const std::string& out, const std::string& text) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot open " + out);
  os << text;
}

void check_long_running(const std::string& scenario, bool allow_long) {
  if (scenario == "network" && !allow_long) {
    throw std::runtime_error(
        "the network scenario is long-running; pass --allow-long to run it");
  }
}

int run_experiment_command(const std::string& config_path, const std::string& out,
                           int threads, std::uint64_t seed_override, bool has_seed,
                           const std::string& cache_dir, bool allow_long, bool quantiles) {
  auto cfg = load_experiment_config(config_path);
  if (has_seed) cfg.seed = seed_override;
  check_long_running(cfg.scenario, allow_long);
  const auto report = quantiles ? run_quantile_experiment(cfg, threads, cache_dir)
                                : run_coverage_experiment(cfg, threads, cache_dir);
  if (out.empty()) {
    std::cout << report.to_csv();
  } else {
    save_report_csv(out, report);
    std::cout << "wrote " << report.rows.size() << " rows to " << out << "\n";
  }
  if (report.aborted_replications > 0) {
    std::cerr << report.aborted_replications << " replications aborted\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "simband: confidence bands for simulation output distributions under input "
      "uncertainty"};
  app.require_subcommand(1);

  // truth: cache an output ECDF under the true input distributions.
  auto* truth = app.add_subcommand("truth", "build a truth-proxy output ECDF");
  std::string truth_scenario = "mm1";
  long truth_runs = 100000;
  std::uint64_t truth_seed = 1;
  std::string truth_cache = "truth_cache";
  std::string truth_out;
  truth->add_option("--scenario", truth_scenario, "identity | mm1 | network");
  truth->add_option("--runs", truth_runs, "simulation runs behind the proxy");
  truth->add_option("--seed", truth_seed, "master seed");
  truth->add_option("--cache-dir", truth_cache, "proxy cache directory");
  truth->add_option("--out", truth_out, "also write the ECDF to this file");

  // band: one confidence band from data on disk or freshly drawn data.
  auto* band_cmd = app.add_subcommand("band", "construct a single confidence band");
  std::string band_scenario = "mm1";
  std::string band_data_dir;
  long band_min_n = 500;
  std::uint64_t band_seed = 1;
  double band_theta = 0.03;
  int band_inner = 30;
  long long band_budget = 1000;
  int band_runs = 0;
  int band_rq = 10000;
  double band_alpha = 0.05;
  std::vector<double> band_grid{0.0, 10.0, 100.0};
  std::string band_method = "inflated";
  std::string band_out;
  std::string band_cov_out;
  band_cmd->add_option("--scenario", band_scenario, "identity | mm1 | network");
  band_cmd->add_option("--data-dir", band_data_dir,
                       "directory with input_<i>.txt files; omit to draw fresh data");
  band_cmd->add_option("--min-n", band_min_n, "minimum data size when drawing fresh data");
  band_cmd->add_option("--seed", band_seed, "master seed");
  band_cmd->add_option("--theta", band_theta, "subsample ratio (1 = standard bootstrap)");
  band_cmd->add_option("--R-s", band_inner, "inner simulation runs per resample");
  band_cmd->add_option("--N", band_budget, "covariance budget; B = floor(N / R_s)");
  band_cmd->add_option("--R", band_runs, "runs behind the output ECDF (default min_n)");
  band_cmd->add_option("--R-q", band_rq, "limiting-distribution samples");
  band_cmd->add_option("--alpha", band_alpha, "1 - confidence level");
  band_cmd->add_option("--grid", band_grid, "grid as lo hi k")->expected(3);
  band_cmd->add_option("--method", band_method, "inflated | classic");
  band_cmd->add_option("--out", band_out, "band CSV output path");
  band_cmd->add_option("--cov-out", band_cov_out, "covariance CSV output path");
  std::vector<double> band_levels{0.25, 0.5, 0.75};
  band_cmd->add_option("--levels", band_levels,
                       "quantile levels for the inverted region printout");

  // coverage / quantiles: the experiment harness.
  std::string cov_config, cov_out, cov_cache = "truth_cache";
  int cov_threads = 1;
  std::uint64_t cov_seed = 0;
  bool cov_allow_long = false;
  auto* coverage = app.add_subcommand("coverage", "coverage experiment over a config file");
  coverage->add_option("--config", cov_config, "experiment config file")->required();
  coverage->add_option("--out", cov_out, "report CSV path (default stdout)");
  coverage->add_option("--threads", cov_threads, "worker threads");
  auto* cov_seed_opt = coverage->add_option("--seed", cov_seed, "override the config seed");
  coverage->add_option("--cache-dir", cov_cache, "truth proxy cache directory");
  coverage->add_flag("--allow-long", cov_allow_long, "permit the network scenario");

  std::string q_config, q_out, q_cache = "truth_cache";
  int q_threads = 1;
  std::uint64_t q_seed = 0;
  bool q_allow_long = false;
  auto* quantiles =
      app.add_subcommand("quantiles", "quantile-region experiment over a config file");
  quantiles->add_option("--config", q_config, "experiment config file")->required();
  quantiles->add_option("--out", q_out, "report CSV path (default stdout)");
  quantiles->add_option("--threads", q_threads, "worker threads");
  auto* q_seed_opt = quantiles->add_option("--seed", q_seed, "override the config seed");
  quantiles->add_option("--cache-dir", q_cache, "truth proxy cache directory");
  quantiles->add_flag("--allow-long", q_allow_long, "permit the network scenario");

  // network-params: audit export of the embedded constants.
  auto* net = app.add_subcommand("network-params", "dump the network parameter tables");
  std::string net_out;
  net->add_option("--out", net_out, "CSV path (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*truth) {
      const auto proxy =
          simband::build_truth_proxy(truth_scenario, truth_runs, truth_seed, truth_cache);
      if (!truth_out.empty()) simband::save_ecdf(truth_out, proxy);
      std::cout << "truth proxy for " << truth_scenario << ": " << proxy.count()
                << " samples, range [" << proxy.min() << ", " << proxy.max() << "]\n";
      return 0;
    }

    if (*band_cmd) {
      const auto model = simband::builtin_model(band_scenario);
      simband::InputDataset data;
      simband::RandomStream root(band_seed);
      if (!band_data_dir.empty()) {
        data = load_dataset(band_data_dir, model.source_count());
      } else {
        simband::ExperimentConfig shape;
        shape.scenario = band_scenario;
        shape.min_n = band_min_n;
        auto data_rng = root.derive(0);
        data = simband::draw_dataset(simband::true_input_distributions(band_scenario),
                                     shape.data_sizes(), data_rng);
      }
      const auto grid = simband::uniform_grid(band_grid[0], band_grid[1],
                                              static_cast<int>(band_grid[2]));
      const int R = band_runs > 0 ? band_runs : static_cast<int>(data.min_size());

      simband::ConfidenceBand band = [&] {
        if (band_method == "classic") {
          auto sim_rng = root.derive(1);
          std::vector<double> outputs;
          outputs.reserve(static_cast<std::size_t>(R));
          for (int r = 0; r < R; ++r) {
            outputs.push_back(simband::simulate(model, data, sim_rng));
          }
          return simband::build_classic_ks_band(
              simband::EmpiricalDistribution(std::move(outputs)), R, band_alpha);
        }
        const simband::SubsampleConfig sub(
            band_theta, static_cast<int>(band_budget / band_inner), band_inner);
        for (const auto& w : simband::check_budget_rates(sub, data).warnings) {
          std::cerr << "warning: " << w << "\n";
        }
        auto alg1_rng = root.derive(1);
        const auto cov = simband::estimate_covariance(model, data, sub, grid, alg1_rng);
        if (!band_cov_out.empty()) simband::save_covariance_csv(band_cov_out, cov);
        auto band_rng = root.derive(2);
        return simband::build_inflated_band(model, data, R, cov, grid, band_alpha, band_rq,
                                            band_rng,
                                            band_theta == 1.0
                                                ? simband::BandMethod::bootstrap_full
                                                : simband::BandMethod::inflated);
      }();

      if (!band_out.empty()) {
        simband::save_band_csv(band_out, band);
        std::cout << "wrote band to " << band_out << "\n";
      }
      std::cout << "method=" << simband::band_method_name(band.method())
                << " halfwidth=" << band.halfwidth() << " R=" << R
                << " n=" << data.average_size() << "\n";
      if (!band_levels.empty()) {
        const auto region = simband::extract_quantile_region(band, band_levels);
        std::cout << "level,lower,upper\n";
        for (const auto& iv : region.intervals) {
          std::cout << simband::format_double(iv.level) << ','
                    << simband::format_quantile_bound(iv.lower) << ','
                    << simband::format_quantile_bound(iv.upper) << "\n";
        }
      }
      return 0;
    }

    if (*coverage) {
      return run_experiment_command(cov_config, cov_out, cov_threads, cov_seed,
                                    cov_seed_opt->count() > 0, cov_cache, cov_allow_long,
                                    false);
    }
    if (*quantiles) {
      return run_experiment_command(q_config, q_out, q_threads, q_seed,
                                    q_seed_opt->count() > 0, q_cache, q_allow_long, true);
    }

    if (*net) {
      std::ostringstream os;
      os << "from,to,rate_per_s\n";
      for (const auto& od : simband::network_od_pairs()) {
        os << od.from << ',' << od.to << ',' << od.rate << "\n";
      }
      os << "channel,endpoint_a,endpoint_b,length_miles,capacity_bits\n";
      const simband::NetworkParams params;
      for (int c = 1; c <= simband::kNetworkNodes; ++c) {
        os << c << ',' << c << ',' << (c % simband::kNetworkNodes) + 1 << ','
           << params.channel_length_miles[static_cast<std::size_t>(c - 1)] << ','
           << params.channel_capacity_bits << "\n";
      }
      os << "route_from,route_to,channels\n";
      for (const auto& od : simband::network_od_pairs()) {
        os << od.from << ',' << od.to << ',';
        const auto& route = simband::network_route(od.from, od.to);
        for (std::size_t i = 0; i < route.channels.size(); ++i) {
          os << (i ? "-" : "") << route.channels[i];
        }
        os << "\n";
      }
      write_or_print(net_out, os.str());
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
