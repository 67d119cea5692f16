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

#ifndef SIMBAND_BROWNIAN_BRIDGE_HPP_
#define SIMBAND_BROWNIAN_BRIDGE_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "simband/rng.hpp"

namespace simband {

// Joint sampler for a standard Brownian bridge at a fixed set of times in
// [0,1]. Times may repeat and arrive unsorted; the sampler dedups once and
// broadcasts, so identical input times always receive identical values.
class BridgeSampler {
 public:
  explicit BridgeSampler(std::span<const double> times) {
    index_.reserve(times.size());
    std::vector<double> sorted;
    for (double t : times) {
      if (!(t >= 0.0 && t <= 1.0)) {
        throw std::invalid_argument("BridgeSampler: times must lie in [0,1]");
      }
      sorted.push_back(t);
    }
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    unique_ = std::move(sorted);
    for (double t : times) {
      const auto it = std::lower_bound(unique_.begin(), unique_.end(), t);
      index_.push_back(static_cast<std::size_t>(it - unique_.begin()));
    }
    // Gaussian increments of the driving Brownian motion over the gaps
    // between consecutive unique times, with t = 1 appended to pin the bridge.
    double prev = 0.0;
    for (double t : unique_) {
      gap_sd_.push_back(std::sqrt(t - prev));
      prev = t;
    }
    final_gap_sd_ = std::sqrt(1.0 - prev);
  }

  std::size_t size() const { return index_.size(); }

  // One joint draw, written to out (same length and order as the input
  // times). Stateless, so one sampler can serve concurrent workers holding
  // their own streams.
  void sample(RandomStream& rng, std::span<double> out) const {
    if (out.size() != index_.size()) {
      throw std::invalid_argument("BridgeSampler: output span has wrong length");
    }
    std::vector<double> motion(unique_.size());
    double w = 0.0;
    for (std::size_t i = 0; i < unique_.size(); ++i) {
      if (gap_sd_[i] > 0.0) w += gap_sd_[i] * rng.normal();
      motion[i] = w;
    }
    if (final_gap_sd_ > 0.0) w += final_gap_sd_ * rng.normal();
    const double w1 = w;
    for (std::size_t i = 0; i < index_.size(); ++i) {
      const std::size_t u = index_[i];
      out[i] = motion[u] - unique_[u] * w1;
    }
  }

 private:
  std::vector<double> unique_;
  std::vector<std::size_t> index_;
  std::vector<double> gap_sd_;
  double final_gap_sd_ = 0.0;
};

inline std::vector<double> sample_brownian_bridge_at(std::span<const double> times,
                                                     RandomStream& rng) {
  BridgeSampler sampler(times);
  std::vector<double> out(times.size());
  sampler.sample(rng, out);
  return out;
}

}  // namespace simband

#endif  // SIMBAND_BROWNIAN_BRIDGE_HPP_
