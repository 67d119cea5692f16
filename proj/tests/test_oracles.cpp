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

#include "simband/oracles.hpp"

#include <cmath>

#include "doctest.h"
#include "simband/models.hpp"

using namespace simband;

TEST_SUITE_BEGIN("oracles");

TEST_CASE("exact output cdf by enumeration") {
  InputDataset d123{{EmpiricalDistribution({1, 2, 3})}};
  CHECK(exact_output_cdf(builtin_model("identity"), d123, 2.0) ==
        doctest::Approx(2.0 / 3.0));

  InputDataset d12{{EmpiricalDistribution({1, 2})}};
  CHECK(exact_output_cdf(builtin_model("max2"), d12, 1.0) == doctest::Approx(0.25));

  InputDataset d2{{EmpiricalDistribution({0, 1}), EmpiricalDistribution({0, 1})}};
  CHECK(exact_output_cdf(builtin_model("sum2"), d2, 1.0) == doctest::Approx(0.75));
}

TEST_CASE("enumeration refuses above the budget") {
  std::vector<double> big(200);
  for (int i = 0; i < 200; ++i) big[static_cast<std::size_t>(i)] = i;
  InputDataset data{{EmpiricalDistribution(big)}};
  EnumerationBudget tiny{100};
  CHECK_THROWS_WITH_AS(exact_output_cdf(builtin_model("identity"), data, 3.0, tiny),
                       doctest::Contains("100"), std::invalid_argument);
}

TEST_CASE("exact output cdf is a cdf in t") {
  RandomStream rng(17);
  std::vector<double> xs;
  for (int i = 0; i < 5; ++i) xs.push_back(rng.uniform01());
  InputDataset data{{EmpiricalDistribution(xs)}};
  auto max2 = builtin_model("max2");
  double prev = 0.0;
  for (double t = -0.2; t <= 1.2; t += 0.01) {
    const double f = exact_output_cdf(max2, data, t);
    CHECK(f >= prev);
    prev = f;
  }
  CHECK(prev == 1.0);
}

TEST_CASE("analytic identity covariance") {
  CHECK(analytic_identity_cov(0.5, 0.5, 1.0) == doctest::Approx(0.25));
  CHECK(analytic_identity_cov(0.3, 0.7, 1.0) == doctest::Approx(0.09));
  CHECK(analytic_identity_cov(0.3, 0.7, 2.0) ==
        doctest::Approx(0.5 * analytic_identity_cov(0.3, 0.7, 1.0)));
  CHECK_THROWS_AS(analytic_identity_cov(-0.1, 0.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(analytic_identity_cov(0.1, 0.5, 0.0), std::invalid_argument);
}

TEST_CASE("monte carlo cdf simple cases") {
  RandomStream rng(19);
  InputDataset d5{{EmpiricalDistribution({5})}};
  CHECK(mc_output_cdf(builtin_model("identity"), d5, 5.0, 100, rng) == 1.0);
  CHECK(mc_output_cdf(builtin_model("identity"), d5, 4.9, 100, rng) == 0.0);

  // Degenerate M/M/1 inputs give a point mass at the deterministic output.
  InputDataset dmm1{{EmpiricalDistribution({2}), EmpiricalDistribution({1})}};
  CHECK(mc_output_cdf(builtin_model("mm1"), dmm1, 1.0, 50, rng) == 1.0);
  CHECK(mc_output_cdf(builtin_model("mm1"), dmm1, 0.99, 50, rng) == 0.0);
}

TEST_CASE("monte carlo cdf matches enumeration") {
  RandomStream rng(23);
  InputDataset d12{{EmpiricalDistribution({1, 2})}};
  auto max2 = builtin_model("max2");
  const long runs = 200000;
  const double mc = mc_output_cdf(max2, d12, 1.0, runs, rng);
  const double exact = exact_output_cdf(max2, d12, 1.0);
  const double se = std::sqrt(exact * (1 - exact) / static_cast<double>(runs));
  CHECK(std::fabs(mc - exact) <= 3 * se);
}

TEST_SUITE_END();
