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

#ifndef SIMBAND_MAX_STAT_HPP_
#define SIMBAND_MAX_STAT_HPP_

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "simband/brownian_bridge.hpp"
#include "simband/covariance.hpp"
#include "simband/rng.hpp"

namespace simband {

// Monte Carlo quantile of the limiting statistic
//   max_j | Z_j / sqrt(n) + W_j / sqrt(R) |
// with Z ~ N(0, cov) and W a Brownian bridge evaluated at the output ECDF
// values, drawn independently. Returns the upper order statistic at index
// ceil(R_q (1-alpha)). Each of the R_q samples uses its own derived
// substream, so the loop can be partitioned without changing the result.
inline double max_stat_quantile(const CovarianceEstimate& cov,
                                std::span<const double> ecdf_at_grid, double n, double R,
                                double alpha, int R_q, RandomStream& rng) {
  const std::size_t k = cov.size();
  if (ecdf_at_grid.size() != k) {
    throw std::invalid_argument("max_stat_quantile: ecdf values must match the grid");
  }
  for (std::size_t j = 0; j < k; ++j) {
    if (!(ecdf_at_grid[j] >= 0.0 && ecdf_at_grid[j] <= 1.0)) {
      throw std::invalid_argument("max_stat_quantile: ecdf values must lie in [0,1]");
    }
    if (j > 0 && ecdf_at_grid[j] < ecdf_at_grid[j - 1]) {
      throw std::invalid_argument("max_stat_quantile: ecdf values must be nondecreasing");
    }
  }
  if (!(n >= 1.0)) throw std::invalid_argument("max_stat_quantile: n must be >= 1");
  if (!(R >= 1.0)) throw std::invalid_argument("max_stat_quantile: R must be >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("max_stat_quantile: alpha must lie in (0,1)");
  }
  if (R_q < 100) throw std::invalid_argument("max_stat_quantile: R_q must be >= 100");

  const BridgeSampler bridge(ecdf_at_grid);
  const double inv_sqrt_n = 1.0 / std::sqrt(n);
  const double inv_sqrt_R = 1.0 / std::sqrt(R);

  auto root = rng.split();
  std::vector<double> z(k), w(k), e(static_cast<std::size_t>(R_q));
  for (int i = 0; i < R_q; ++i) {
    auto sub = root.derive(static_cast<std::uint64_t>(i));
    cov.sample(sub, z);
    bridge.sample(sub, w);
    double m = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      m = std::max(m, std::fabs(z[j] * inv_sqrt_n + w[j] * inv_sqrt_R));
    }
    e[static_cast<std::size_t>(i)] = m;
  }

  auto rank = static_cast<std::size_t>(std::ceil(R_q * (1.0 - alpha) - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, static_cast<std::size_t>(R_q));
  std::nth_element(e.begin(), e.begin() + static_cast<long>(rank - 1), e.end());
  return e[rank - 1];
}

}  // namespace simband

#endif  // SIMBAND_MAX_STAT_HPP_
