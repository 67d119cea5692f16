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

#include "simband/models.hpp"

#include <cmath>
#include <vector>

#include "doctest.h"
#include "simband/network.hpp"

using namespace simband;

TEST_SUITE_BEGIN("models");

TEST_CASE("simulate consumes draws in source order") {
  RandomStream rng(1);
  auto identity = builtin_model("identity");
  std::vector<InputSource> in{EmpiricalDistribution({7})};
  CHECK(simulate(identity, in, rng) == 7.0);

  auto mm1 = builtin_model("mm1");
  std::vector<InputSource> degenerate{EmpiricalDistribution({2}), EmpiricalDistribution({1})};
  const auto before = rng.draws();
  CHECK(simulate(mm1, degenerate, rng) == doctest::Approx(1.0));
  CHECK(rng.draws() - before == 20);

  CHECK_THROWS_AS(simulate(mm1, in, rng), std::invalid_argument);
}

TEST_CASE("simulate is deterministic under a fixed seed") {
  auto mm1 = builtin_model("mm1");
  auto laws = true_input_distributions("mm1");
  RandomStream a(77), b(77);
  for (int i = 0; i < 20; ++i) {
    CHECK(simulate(mm1, laws, a) == simulate(mm1, laws, b));
  }
}

TEST_CASE("max2 resampling distribution") {
  RandomStream rng(9);
  auto max2 = builtin_model("max2");
  std::vector<InputSource> in{EmpiricalDistribution({1, 2})};
  int hits = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    if (simulate(max2, in, rng) == 2.0) ++hits;
  }
  // P(max of two uniform picks from {1,2} equals 2) = 3/4.
  const double se = std::sqrt(n * 0.25 * 0.75);
  CHECK(std::fabs(hits - 0.75 * n) <= 3 * se);
}

TEST_CASE("mm1_output runs the waiting-time recursion") {
  std::vector<double> a2(10, 2.0), s1(10, 1.0), a05(10, 0.5), a1(10, 1.0);
  CHECK(mm1_output(a2, s1) == doctest::Approx(1.0));
  CHECK(mm1_output(a05, s1) == doctest::Approx(3.25));
  CHECK(mm1_output(a1, s1) == doctest::Approx(1.0));

  std::vector<double> bad(10, 1.0);
  bad[3] = -0.5;
  CHECK_THROWS_AS(mm1_output(bad, s1), std::invalid_argument);
  CHECK_THROWS_AS(mm1_output(std::vector<double>(9, 1.0), s1), std::invalid_argument);
}

TEST_CASE("mm1 sojourn dominates the mean service time") {
  RandomStream rng(13);
  for (int rep = 0; rep < 200; ++rep) {
    std::vector<double> a(10), s(10);
    double mean_service = 0;
    for (int j = 0; j < 10; ++j) {
      a[static_cast<std::size_t>(j)] = rng.exponential(0.5);
      s[static_cast<std::size_t>(j)] = rng.exponential(1.0);
      mean_service += s[static_cast<std::size_t>(j)] / 10.0;
    }
    CHECK(mm1_output(a, s) >= mean_service - 1e-12);
  }
}

TEST_CASE("builtin model shapes") {
  auto mm1 = builtin_model("mm1");
  CHECK(mm1.source_count() == 2);
  CHECK(mm1.draw_counts() == std::vector<int>{10, 10});

  auto net = builtin_model("network");
  CHECK(net.source_count() == 13);
  for (int i = 0; i < 12; ++i) CHECK(net.draw_counts()[static_cast<std::size_t>(i)] == 40);
  CHECK(net.draw_counts()[12] == 480);

  auto identity = builtin_model("identity");
  CHECK(identity.source_count() == 1);
  CHECK(identity.draw_counts() == std::vector<int>{1});

  CHECK_THROWS_AS(builtin_model("mm2"), std::invalid_argument);
  CHECK_THROWS_AS(true_input_distributions("mm2"), std::invalid_argument);
}

TEST_CASE("true input laws have the advertised means") {
  auto laws = true_input_distributions("mm1");
  REQUIRE(laws.size() == 2);
  RandomStream rng(21);
  const int n = 100000;
  double s0 = 0, s1 = 0;
  for (int i = 0; i < n; ++i) {
    s0 += laws[0](rng);
    s1 += laws[1](rng);
  }
  CHECK(s0 / n == doctest::Approx(2.0).epsilon(0.01));   // Exp(0.5)
  CHECK(s1 / n == doctest::Approx(1.0).epsilon(0.01));   // Exp(1)

  auto net_laws = true_input_distributions("network");
  REQUIRE(net_laws.size() == 13);
  double first = 0, len = 0;
  const int m = 40000;
  for (int i = 0; i < m; ++i) {
    first += net_laws[0](rng);   // node 1 -> 2 arrivals at rate 40
    len += net_laws[12](rng);    // message lengths, mean 300 bits
  }
  CHECK(first / m == doctest::Approx(1.0 / 40.0).epsilon(0.03));
  CHECK(len / m == doctest::Approx(300.0).epsilon(0.03));

  auto u = true_input_distributions("identity");
  double su = 0;
  for (int i = 0; i < n; ++i) su += u[0](rng);
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.01));
}

TEST_CASE("single message crosses one hop at hand-computed cost") {
  NetworkParams params;
  params.channel_capacity_bits = 1e18;
  params.channel_length_miles = {0, 0, 0, 0};
  params.deliveries_target = 1;
  std::vector<std::vector<double>> streams(kNetworkStreams);
  streams[0] = {0.5};  // one message node 1 -> node 2
  std::vector<double> lengths{300.0};
  auto run = network_run(params, streams, lengths);
  CHECK(run.delays.size() == 1);
  CHECK(run.mean_delay == doctest::Approx(2 * 0.001 + 300.0 / 275000.0).epsilon(1e-12));
}

namespace {

std::pair<std::vector<std::vector<double>>, std::vector<double>> draw_network_inputs(
    RandomStream& rng) {
  auto laws = true_input_distributions("network");
  std::vector<std::vector<double>> streams(kNetworkStreams);
  for (int s = 0; s < kNetworkStreams; ++s) {
    for (int j = 0; j < kNetworkArrivalDraws; ++j) {
      streams[static_cast<std::size_t>(s)].push_back(laws[static_cast<std::size_t>(s)](rng));
    }
  }
  std::vector<double> lengths;
  for (int j = 0; j < kNetworkLengthDraws; ++j) lengths.push_back(laws[12](rng));
  return {streams, lengths};
}

}  // namespace

TEST_CASE("network delays are finite and dominate the path cost") {
  for (std::uint64_t seed : {101u, 102u, 103u}) {
    RandomStream rng(seed);
    auto [streams, lengths] = draw_network_inputs(rng);
    auto run = network_run(NetworkParams{}, streams, lengths);
    REQUIRE(run.delays.size() == 30);
    for (std::size_t i = 0; i < run.delays.size(); ++i) {
      CHECK(std::isfinite(run.delays[i]));
      CHECK(run.delays[i] >= 0.0);
      CHECK(run.delays[i] >= run.min_path_costs[i] - 1e-12);
    }
  }
}

TEST_CASE("doubling message lengths never speeds up delivery") {
  for (std::uint64_t seed : {7u, 8u, 9u, 10u}) {
    RandomStream rng(seed);
    auto [streams, lengths] = draw_network_inputs(rng);
    const double base = network_run(NetworkParams{}, streams, lengths).mean_delay;
    for (double& l : lengths) l *= 2.0;
    const double doubled = network_run(NetworkParams{}, streams, lengths).mean_delay;
    CHECK(doubled >= base - 1e-12);
  }
}

TEST_CASE("network model plugs into simulate") {
  auto net = builtin_model("network");
  auto laws = true_input_distributions("network");
  RandomStream rng(55);
  const auto before = rng.draws();
  const double y = simulate(net, laws, rng);
  CHECK(rng.draws() - before == 12 * 40 + 480);
  CHECK(y > 0.0);
  CHECK(std::isfinite(y));
}

TEST_CASE("routing table is fewest-hop with low-channel ties") {
  CHECK(network_route(1, 3).channels == std::vector<int>{1, 2});
  CHECK(network_route(3, 1).channels == std::vector<int>{2, 1});
  CHECK(network_route(2, 4).channels == std::vector<int>{1, 4});
  CHECK(network_route(4, 2).channels == std::vector<int>{3, 2});
  CHECK(network_route(1, 2).channels == std::vector<int>{1});
  CHECK_THROWS_AS(network_route(1, 1), std::invalid_argument);
}

TEST_SUITE_END();
