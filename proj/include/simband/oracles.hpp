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

#ifndef SIMBAND_ORACLES_HPP_
#define SIMBAND_ORACLES_HPP_

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "simband/models.hpp"
#include "simband/rng.hpp"

namespace simband {

struct EnumerationBudget {
  long long max_combinations = 10'000'000;
};

// Exact output CDF under the empirical inputs by full enumeration of all
// index tuples with equal weights, iterated in lexicographic order. Refuses
// when prod_i n_i^{T_i} exceeds the budget.
inline double exact_output_cdf(const FiniteHorizonModel& model, const InputDataset& data,
                               double t, EnumerationBudget budget = {}) {
  if (data.sources.size() != static_cast<std::size_t>(model.source_count())) {
    throw std::invalid_argument("exact_output_cdf: dataset does not match the model");
  }
  long double total_ld = 1.0L;
  for (std::size_t i = 0; i < data.sources.size(); ++i) {
    for (int j = 0; j < model.draw_counts()[i]; ++j) {
      total_ld *= static_cast<long double>(data.sources[i].count());
      if (total_ld > static_cast<long double>(budget.max_combinations)) {
        throw std::invalid_argument(
            "exact_output_cdf: enumeration needs more than " +
            std::to_string(budget.max_combinations) + " tuples; refused");
      }
    }
  }
  const auto total = static_cast<long long>(total_ld);

  // One mixed-radix digit per draw position; digit for source i counts in
  // base n_i.
  const auto positions = static_cast<std::size_t>(model.total_draws());
  std::vector<std::size_t> digit(positions, 0);
  std::vector<std::size_t> base;
  base.reserve(positions);
  for (std::size_t i = 0; i < data.sources.size(); ++i) {
    for (int j = 0; j < model.draw_counts()[i]; ++j) base.push_back(data.sources[i].count());
  }
  std::vector<const std::vector<double>*> values;
  values.reserve(positions);
  for (std::size_t i = 0; i < data.sources.size(); ++i) {
    for (int j = 0; j < model.draw_counts()[i]; ++j) {
      values.push_back(&data.sources[i].samples());
    }
  }

  std::vector<double> draws(positions);
  long long hits = 0;
  for (long long it = 0; it < total; ++it) {
    for (std::size_t p = 0; p < positions; ++p) draws[p] = (*values[p])[digit[p]];
    if (model.output(draws) <= t) ++hits;
    for (std::size_t p = positions; p-- > 0;) {
      if (++digit[p] < base[p]) break;
      digit[p] = 0;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(total);
}

// Input-noise covariance of the identity model in closed form: with one
// source and one draw the influence function is I(x <= t) - F(t), so
// Cov(G(t), G(s)) = (1/beta) (F(t ^ s) - F(t) F(s)).
inline double analytic_identity_cov(double f_t, double f_s, double beta) {
  if (!(f_t >= 0.0 && f_t <= 1.0 && f_s >= 0.0 && f_s <= 1.0)) {
    throw std::invalid_argument("analytic_identity_cov: CDF values must lie in [0,1]");
  }
  if (!(beta > 0.0)) throw std::invalid_argument("analytic_identity_cov: beta must be > 0");
  return (std::min(f_t, f_s) - f_t * f_s) / beta;
}

// Monte Carlo counterpart of exact_output_cdf for equivalence tests.
inline double mc_output_cdf(const FiniteHorizonModel& model, const InputDataset& data,
                            double t, long runs, RandomStream& rng) {
  if (runs < 1) throw std::invalid_argument("mc_output_cdf: runs must be >= 1");
  long hits = 0;
  for (long r = 0; r < runs; ++r) {
    if (simulate(model, data, rng) <= t) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(runs);
}

}  // namespace simband

#endif  // SIMBAND_ORACLES_HPP_
