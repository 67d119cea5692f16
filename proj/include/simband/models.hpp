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

#ifndef SIMBAND_MODELS_HPP_
#define SIMBAND_MODELS_HPP_

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "simband/empirical.hpp"
#include "simband/network.hpp"
#include "simband/rng.hpp"

namespace simband {

// Finite-horizon simulation model: the output is a deterministic function of
// T_i i.i.d. draws from each of m input sources, consumed in source order
// i = 1..m and index order j = 1..T_i.
class FiniteHorizonModel {
 public:
  using OutputMap = std::function<double(std::span<const double>)>;

  FiniteHorizonModel(std::string name, std::vector<int> draw_counts, OutputMap output_map)
      : name_(std::move(name)),
        draw_counts_(std::move(draw_counts)),
        output_map_(std::move(output_map)) {
    if (draw_counts_.empty()) {
      throw std::invalid_argument("FiniteHorizonModel: needs at least one source");
    }
    for (int t : draw_counts_) {
      if (t < 1) throw std::invalid_argument("FiniteHorizonModel: draw counts must be >= 1");
    }
    total_draws_ = std::accumulate(draw_counts_.begin(), draw_counts_.end(), 0);
  }

  const std::string& name() const { return name_; }
  int source_count() const { return static_cast<int>(draw_counts_.size()); }
  const std::vector<int>& draw_counts() const { return draw_counts_; }
  int total_draws() const { return total_draws_; }

  double output(std::span<const double> draws) const {
    if (draws.size() != static_cast<std::size_t>(total_draws_)) {
      throw std::invalid_argument("FiniteHorizonModel: wrong number of draws");
    }
    return output_map_(draws);
  }

  // Same model with the output map wrapped to bump `counter` per evaluation.
  FiniteHorizonModel counting(long long* counter) const {
    OutputMap inner = output_map_;
    return FiniteHorizonModel(name_, draw_counts_,
                              [inner, counter](std::span<const double> d) {
                                ++*counter;
                                return inner(d);
                              });
  }

 private:
  std::string name_;
  std::vector<int> draw_counts_;
  OutputMap output_map_;
  int total_draws_;
};

using ParametricSampler = std::function<double(RandomStream&)>;

// One input source: either observed data (resampled uniformly) or a
// parametric law used for ground-truth generation.
class InputSource {
 public:
  InputSource(EmpiricalDistribution data) : source_(std::move(data)) {}
  InputSource(ParametricSampler law) : source_(std::move(law)) {}

  double draw(RandomStream& rng) const {
    if (const auto* d = std::get_if<EmpiricalDistribution>(&source_)) return d->sample(rng);
    return std::get<ParametricSampler>(source_)(rng);
  }

 private:
  std::variant<EmpiricalDistribution, ParametricSampler> source_;
};

// Observed data, one empirical distribution per input source.
struct InputDataset {
  std::vector<EmpiricalDistribution> sources;

  double average_size() const {
    double s = 0;
    for (const auto& d : sources) s += static_cast<double>(d.count());
    return s / static_cast<double>(sources.size());
  }

  std::size_t min_size() const {
    std::size_t m = sources.front().count();
    for (const auto& d : sources) m = std::min(m, d.count());
    return m;
  }
};

inline double simulate(const FiniteHorizonModel& model, std::span<const InputSource> inputs,
                       RandomStream& rng) {
  if (inputs.size() != static_cast<std::size_t>(model.source_count())) {
    throw std::invalid_argument("simulate: input count does not match the model");
  }
  std::vector<double> draws;
  draws.reserve(static_cast<std::size_t>(model.total_draws()));
  for (std::size_t i = 0; i < inputs.size(); ++i) {
    const int t = model.draw_counts()[i];
    for (int j = 0; j < t; ++j) draws.push_back(inputs[i].draw(rng));
  }
  return model.output(draws);
}

inline double simulate(const FiniteHorizonModel& model, const InputDataset& data,
                       RandomStream& rng) {
  std::vector<InputSource> inputs(data.sources.begin(), data.sources.end());
  return simulate(model, inputs, rng);
}

inline double simulate(const FiniteHorizonModel& model,
                       std::span<const ParametricSampler> laws, RandomStream& rng) {
  std::vector<InputSource> inputs(laws.begin(), laws.end());
  return simulate(model, inputs, rng);
}

// Average sojourn time of the first 10 customers of a single queue that
// starts empty: W_1 = 0, W_j = max(W_{j-1} + S_{j-1} - A_j, 0), output
// (1/10) sum_j (W_j + S_j). A_1 is accepted but unused.
inline double mm1_output(std::span<const double> interarrivals,
                         std::span<const double> services) {
  constexpr int kCustomers = 10;
  if (interarrivals.size() != kCustomers || services.size() != kCustomers) {
    throw std::invalid_argument("mm1_output: expected 10 interarrivals and 10 services");
  }
  for (int j = 0; j < kCustomers; ++j) {
    if (!(interarrivals[static_cast<std::size_t>(j)] >= 0) ||
        !(services[static_cast<std::size_t>(j)] >= 0)) {
      throw std::invalid_argument("mm1_output: times must be nonnegative");
    }
  }
  double wait = 0.0;
  double total = services[0];
  for (int j = 1; j < kCustomers; ++j) {
    wait = std::max(wait + services[static_cast<std::size_t>(j - 1)] -
                        interarrivals[static_cast<std::size_t>(j)],
                    0.0);
    total += wait + services[static_cast<std::size_t>(j)];
  }
  return total / kCustomers;
}

inline FiniteHorizonModel builtin_model(const std::string& name) {
  if (name == "identity") {
    return FiniteHorizonModel("identity", {1},
                              [](std::span<const double> d) { return d[0]; });
  }
  if (name == "max2") {
    return FiniteHorizonModel("max2", {2}, [](std::span<const double> d) {
      return std::max(d[0], d[1]);
    });
  }
  if (name == "sum2") {
    return FiniteHorizonModel("sum2", {1, 1}, [](std::span<const double> d) {
      return d[0] + d[1];
    });
  }
  if (name == "mm1") {
    return FiniteHorizonModel("mm1", {10, 10}, [](std::span<const double> d) {
      return mm1_output(d.subspan(0, 10), d.subspan(10, 10));
    });
  }
  if (name == "network") {
    std::vector<int> counts(kNetworkStreams, kNetworkArrivalDraws);
    counts.push_back(kNetworkLengthDraws);
    return FiniteHorizonModel("network", std::move(counts),
                              [](std::span<const double> d) { return network_output(d); });
  }
  throw std::invalid_argument("builtin_model: unknown model '" + name + "'");
}

// Ground-truth input laws used for data generation and true-CDF proxies.
inline std::vector<ParametricSampler> true_input_distributions(const std::string& name) {
  auto exponential = [](double rate) {
    return ParametricSampler([rate](RandomStream& rng) { return rng.exponential(rate); });
  };
  auto uniform = [] {
    return ParametricSampler([](RandomStream& rng) { return rng.uniform01(); });
  };
  if (name == "identity") return {uniform()};
  if (name == "max2") return {uniform()};
  if (name == "sum2") return {uniform(), uniform()};
  if (name == "mm1") return {exponential(0.5), exponential(1.0)};
  if (name == "network") {
    std::vector<ParametricSampler> laws;
    for (const auto& od : network_od_pairs()) laws.push_back(exponential(od.rate));
    laws.push_back(exponential(1.0 / 300.0));  // message length, mean 300 bits
    return laws;
  }
  throw std::invalid_argument("true_input_distributions: unknown model '" + name + "'");
}

// Fresh dataset of the given per-source sizes drawn from the true laws.
inline InputDataset draw_dataset(const std::vector<ParametricSampler>& laws,
                                 const std::vector<std::size_t>& sizes, RandomStream& rng) {
  if (laws.size() != sizes.size()) {
    throw std::invalid_argument("draw_dataset: laws/sizes mismatch");
  }
  InputDataset data;
  for (std::size_t i = 0; i < laws.size(); ++i) {
    std::vector<double> xs;
    xs.reserve(sizes[i]);
    for (std::size_t j = 0; j < sizes[i]; ++j) xs.push_back(laws[i](rng));
    data.sources.emplace_back(std::move(xs));
  }
  return data;
}

}  // namespace simband

#endif  // SIMBAND_MODELS_HPP_
