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

#ifndef SIMBAND_SUBSAMPLING_HPP_
#define SIMBAND_SUBSAMPLING_HPP_

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "simband/covariance.hpp"
#include "simband/empirical.hpp"
#include "simband/models.hpp"
#include "simband/rng.hpp"

namespace simband {

// Configuration of the subsampled covariance bootstrap: subsample ratio
// theta, outer resamples B and inner simulation runs R_s. The total
// simulation budget is B * R_s.
struct SubsampleConfig {
  double theta;
  int outer_resamples;  // B
  int inner_runs;       // R_s

  SubsampleConfig(double theta_, int outer, int inner)
      : theta(theta_), outer_resamples(outer), inner_runs(inner) {
    if (!(theta > 0.0 && theta <= 1.0)) {
      throw std::invalid_argument("SubsampleConfig: theta must lie in (0,1]");
    }
    if (outer_resamples < 2) {
      throw std::invalid_argument("SubsampleConfig: B must be >= 2");
    }
    if (inner_runs < 2) {
      throw std::invalid_argument("SubsampleConfig: R_s must be >= 2");
    }
  }

  long long budget() const {
    return static_cast<long long>(outer_resamples) * inner_runs;
  }

  // s_i = floor(theta * n_i); a source whose subsample would be empty is a
  // configuration error, not something to bump silently.
  std::vector<std::size_t> subsample_sizes(const InputDataset& data) const {
    std::vector<std::size_t> sizes;
    sizes.reserve(data.sources.size());
    for (std::size_t i = 0; i < data.sources.size(); ++i) {
      const auto s = static_cast<std::size_t>(
          std::floor(theta * static_cast<double>(data.sources[i].count()) + 1e-9));
      if (s == 0) {
        throw std::invalid_argument("SubsampleConfig: theta " + std::to_string(theta) +
                                    " gives an empty subsample for source " +
                                    std::to_string(i + 1));
      }
      sizes.push_back(s);
    }
    return sizes;
  }
};

// Covariance of two conditional expectations by two-layer sampling:
// outer(rng) draws the conditioning element Z_b, inner(Z_b, rng) draws one
// (X, Y) pair given it. Returns (1/(B-1)) sum_b (Xbar_b - Xbarbar)(Ybar_b -
// Ybarbar), whose mean is Cov(E[X|Z], E[Y|Z]) + (1/R) E[Cov(X, Y|Z)].
template <class Outer, class Inner>
double nested_cov(Outer&& outer, Inner&& inner, int B, int R, RandomStream& rng) {
  if (B < 2) throw std::invalid_argument("nested_cov: B must be >= 2");
  if (R < 2) throw std::invalid_argument("nested_cov: R must be >= 2");
  std::vector<double> xbar(static_cast<std::size_t>(B)), ybar(static_cast<std::size_t>(B));
  for (int b = 0; b < B; ++b) {
    auto z = outer(rng);
    double sx = 0, sy = 0;
    for (int r = 0; r < R; ++r) {
      const auto [x, y] = inner(z, rng);
      sx += x;
      sy += y;
    }
    xbar[static_cast<std::size_t>(b)] = sx / R;
    ybar[static_cast<std::size_t>(b)] = sy / R;
  }
  double mx = 0, my = 0;
  for (int b = 0; b < B; ++b) {
    mx += xbar[static_cast<std::size_t>(b)];
    my += ybar[static_cast<std::size_t>(b)];
  }
  mx /= B;
  my /= B;
  double acc = 0;
  for (int b = 0; b < B; ++b) {
    acc += (xbar[static_cast<std::size_t>(b)] - mx) * (ybar[static_cast<std::size_t>(b)] - my);
  }
  return acc / (B - 1);
}

// Per-resample output ECDF values on a grid: B rows, one per bootstrap
// resample, each nondecreasing across the sorted grid.
struct BootstrapMatrix {
  Grid grid;
  int rows;                  // B
  std::vector<double> q;     // rows x k, row-major, entries in [0,1]

  BootstrapMatrix(Grid grid_, int rows_, std::vector<double> values)
      : grid(std::move(grid_)), rows(rows_), q(std::move(values)) {
    if (rows < 1 || q.size() != static_cast<std::size_t>(rows) * grid.size()) {
      throw std::invalid_argument("BootstrapMatrix: shape mismatch");
    }
    for (int b = 0; b < rows; ++b) {
      double prev = 0.0;
      for (std::size_t l = 0; l < grid.size(); ++l) {
        const double v = at(b, l);
        if (!(v >= 0.0 && v <= 1.0) || v < prev) {
          throw std::invalid_argument("BootstrapMatrix: rows must be CDF values");
        }
        prev = v;
      }
    }
  }

  double at(int b, std::size_t l) const {
    return q[static_cast<std::size_t>(b) * grid.size() + l];
  }
};

// Final step of the subsampling estimator: V = theta*n times the sample
// covariance of the rows. Built as a Gram matrix of centered rows, so the
// result is symmetric PSD by construction.
inline CovarianceEstimate cov_from_bootstrap_matrix(const BootstrapMatrix& qmat,
                                                    double theta, double n) {
  const int B = qmat.rows;
  if (B < 2) throw std::invalid_argument("cov_from_bootstrap_matrix: B must be >= 2");
  if (!(theta > 0.0 && theta <= 1.0) || !(n >= 1.0)) {
    throw std::invalid_argument("cov_from_bootstrap_matrix: bad theta or n");
  }
  const auto k = static_cast<Eigen::Index>(qmat.grid.size());
  Eigen::MatrixXd centered(B, k);
  for (Eigen::Index l = 0; l < k; ++l) {
    // Shift by the first row before averaging so that identical rows center
    // to exactly zero.
    const double shift = qmat.at(0, static_cast<std::size_t>(l));
    double mean = 0.0;
    for (int b = 0; b < B; ++b) mean += qmat.at(b, static_cast<std::size_t>(l)) - shift;
    mean /= B;
    for (int b = 0; b < B; ++b) {
      centered(b, l) = (qmat.at(b, static_cast<std::size_t>(l)) - shift) - mean;
    }
  }
  Eigen::MatrixXd v = (theta * n / (B - 1)) * (centered.transpose() * centered);
  v = 0.5 * (v + v.transpose());  // exact symmetry despite rounding
  return CovarianceEstimate(qmat.grid, std::move(v));
}

// Subsampling bootstrap for the covariance of the input-noise process: for
// each of B resamples, subsample every source to size s_i with replacement,
// drive R_s simulation runs from the subsample empirical distributions and
// record the output ECDF on the grid. Consumes exactly B * R_s model runs.
inline BootstrapMatrix bootstrap_output_cdfs(const FiniteHorizonModel& model,
                                             const InputDataset& data,
                                             const SubsampleConfig& config, const Grid& grid,
                                             RandomStream& rng) {
  if (data.sources.size() != static_cast<std::size_t>(model.source_count())) {
    throw std::invalid_argument("bootstrap_output_cdfs: dataset does not match the model");
  }
  const auto sizes = config.subsample_sizes(data);
  const int B = config.outer_resamples;
  const int Rs = config.inner_runs;
  std::vector<double> rows;
  rows.reserve(static_cast<std::size_t>(B) * grid.size());
  auto root = rng.split();
  std::vector<double> outputs(static_cast<std::size_t>(Rs));
  for (int b = 0; b < B; ++b) {
    auto rb = root.derive(static_cast<std::uint64_t>(b));
    std::vector<InputSource> resampled;
    resampled.reserve(data.sources.size());
    for (std::size_t i = 0; i < data.sources.size(); ++i) {
      resampled.emplace_back(data.sources[i].resample(sizes[i], rb));
    }
    for (int r = 0; r < Rs; ++r) {
      outputs[static_cast<std::size_t>(r)] = simulate(model, resampled, rb);
    }
    std::sort(outputs.begin(), outputs.end());
    for (std::size_t l = 0; l < grid.size(); ++l) {
      const auto it = std::upper_bound(outputs.begin(), outputs.end(), grid[l]);
      rows.push_back(static_cast<double>(it - outputs.begin()) / Rs);
    }
  }
  return BootstrapMatrix(grid, B, std::move(rows));
}

inline CovarianceEstimate estimate_covariance(const FiniteHorizonModel& model,
                                              const InputDataset& data,
                                              const SubsampleConfig& config,
                                              const Grid& grid, RandomStream& rng) {
  const auto qmat = bootstrap_output_cdfs(model, data, config, grid, rng);
  return cov_from_bootstrap_matrix(qmat, config.theta, data.average_size());
}

// Error-minimizing configuration for a budget N: s* of order N^{1/4} and
// R_s* of order N^{1/3} (s*)^{2/3} = N^{1/2}, all order constants taken as 1.
// Advisory; experiment sweeps still use explicit (theta, B, R_s) grids.
inline SubsampleConfig optimal_config(long long budget, const InputDataset& data) {
  if (budget < 16) throw std::invalid_argument("optimal_config: budget must be >= 16");
  const double n = data.average_size();
  const auto s = std::max<long long>(2, std::llround(std::pow(static_cast<double>(budget), 0.25)));
  const double theta = std::min(1.0, static_cast<double>(s) / n);
  const auto inner =
      std::max<long long>(2, std::llround(std::sqrt(static_cast<double>(budget))));
  const auto outer = std::max<long long>(2, budget / inner);
  return SubsampleConfig(theta, static_cast<int>(outer), static_cast<int>(inner));
}

// Finite-sample proxies for the consistency conditions theta = omega(1/n),
// B = omega(1), R_s = omega(s). Diagnostics only; never fails.
struct BudgetDiagnostics {
  double theta_n = 0.0;
  double avg_subsample = 0.0;
  bool theta_n_ok = true;
  bool outer_ok = true;
  bool inner_ok = true;
  std::vector<std::string> warnings;
};

inline BudgetDiagnostics check_budget_rates(const SubsampleConfig& config,
                                            const InputDataset& data) {
  BudgetDiagnostics d;
  d.theta_n = config.theta * data.average_size();
  double s = 0;
  for (std::size_t i = 0; i < data.sources.size(); ++i) {
    const double si =
        std::floor(config.theta * static_cast<double>(data.sources[i].count()) + 1e-9);
    if (si == 0.0) {
      d.warnings.push_back("theta gives an empty subsample for source " +
                           std::to_string(i + 1));
    }
    s += si;
  }
  d.avg_subsample = s / static_cast<double>(data.sources.size());
  if (d.theta_n < 10.0) {
    d.theta_n_ok = false;
    d.warnings.push_back("theta*n = " + std::to_string(d.theta_n) +
                         " < 10: subsamples may be too small for the bootstrap limit");
  }
  if (config.outer_resamples < 10) {
    d.outer_ok = false;
    d.warnings.push_back("B = " + std::to_string(config.outer_resamples) +
                         " < 10: outer resample count may be too small");
  }
  if (static_cast<double>(config.inner_runs) < 2.0 * d.avg_subsample) {
    d.inner_ok = false;
    d.warnings.push_back("R_s = " + std::to_string(config.inner_runs) + " < 2s = " +
                         std::to_string(2.0 * d.avg_subsample) +
                         ": inner runs may not outpace the subsample size");
  }
  return d;
}

}  // namespace simband

#endif  // SIMBAND_SUBSAMPLING_HPP_
