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

#include "simband/empirical.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "doctest.h"

using namespace simband;

TEST_SUITE_BEGIN("empirical");

TEST_CASE("ecdf counts with right continuity") {
  EmpiricalDistribution d({1, 2, 3});
  CHECK(d.ecdf(2) == doctest::Approx(2.0 / 3.0));
  CHECK(d.ecdf(0.5) == 0.0);
  CHECK(d.ecdf(3) == 1.0);
  CHECK(d.ecdf(100) == 1.0);

  EmpiricalDistribution ties({1, 1, 2});
  CHECK(ties.ecdf(1) == doctest::Approx(2.0 / 3.0));
  CHECK(ties.ecdf_left(1) == 0.0);

  CHECK_THROWS_AS(EmpiricalDistribution(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(EmpiricalDistribution({1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("ecdf is monotone with 0/1 tails") {
  RandomStream rng(11);
  std::vector<double> xs;
  for (int i = 0; i < 57; ++i) xs.push_back(rng.normal());
  EmpiricalDistribution d(xs);
  double prev = -1.0;
  for (double t = -4.0; t <= 4.0; t += 0.01) {
    const double f = d.ecdf(t);
    CHECK(f >= prev);
    prev = f;
  }
  CHECK(d.ecdf(d.min() - 1e-9) == 0.0);
  CHECK(d.ecdf(d.max()) == 1.0);
}

TEST_CASE("resample draws uniformly with replacement") {
  RandomStream rng(5);
  EmpiricalDistribution single({5});
  auto r = single.resample(3, rng);
  CHECK(r.samples() == std::vector<double>{5, 5, 5});

  CHECK_THROWS_AS(single.resample(0, rng), std::invalid_argument);

  // Binomial oracle: picking from {1,2} once is a fair coin.
  EmpiricalDistribution two({1, 2});
  int ones = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    if (two.resample(1, rng).samples()[0] == 1.0) ++ones;
  }
  const double se = std::sqrt(n * 0.25);
  CHECK(std::fabs(ones - n / 2.0) <= 3 * se);

  // Determinism: same (dist, size, seed) gives the same multiset.
  RandomStream a(99), b(99);
  EmpiricalDistribution three({1, 2, 3});
  CHECK(three.resample(3, a).samples() == three.resample(3, b).samples());
  const auto before = a.draws();
  (void)three.resample(7, a);
  CHECK(a.draws() - before == 7);
}

TEST_CASE("uniform_grid spans endpoints inclusively") {
  auto g = uniform_grid(0, 10, 100);
  CHECK(g.size() == 100);
  CHECK(g[0] == 0.0);
  CHECK(g[99] == 10.0);
  CHECK(g[1] == doctest::Approx(10.0 / 99.0));

  auto g2 = uniform_grid(0, 1, 2);
  CHECK(g2.points() == std::vector<double>{0.0, 1.0});

  auto g3 = uniform_grid(0, 0.04, 100);
  CHECK(g3.size() == 100);
  CHECK(g3[0] == 0.0);
  CHECK(g3[99] == 0.04);

  CHECK_THROWS_AS(uniform_grid(1, 1, 10), std::invalid_argument);
  CHECK_THROWS_AS(uniform_grid(0, 1, 1), std::invalid_argument);
  CHECK_THROWS_AS(Grid({1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("step_sup_distance hand values") {
  EmpiricalDistribution a({1, 2}), b({1, 3});
  CHECK(step_sup_distance(a, a) == 0.0);
  CHECK(step_sup_distance(a, b) == doctest::Approx(0.5));
  EmpiricalDistribution c({1}), d({2});
  CHECK(step_sup_distance(c, d) == doctest::Approx(1.0));
}

TEST_CASE("step_sup_distance is a metric on random triples") {
  RandomStream rng(31);
  for (int rep = 0; rep < 40; ++rep) {
    auto make = [&](int n) {
      std::vector<double> xs;
      for (int i = 0; i < n; ++i) xs.push_back(rng.normal());
      return EmpiricalDistribution(xs);
    };
    auto a = make(5 + static_cast<int>(rng.index(20)));
    auto b = make(5 + static_cast<int>(rng.index(20)));
    auto c = make(5 + static_cast<int>(rng.index(20)));
    const double ab = step_sup_distance(a, b);
    const double ba = step_sup_distance(b, a);
    const double ac = step_sup_distance(a, c);
    const double cb = step_sup_distance(c, b);
    CHECK(ab == ba);
    CHECK(ab >= 0.0);
    CHECK(ab <= ac + cb + 1e-12);
    CHECK(step_sup_distance(a, a) == 0.0);
  }
}

TEST_CASE("step_sup_distance agrees with a dense-grid scan") {
  RandomStream rng(47);
  for (int rep = 0; rep < 100; ++rep) {
    auto make = [&](int n) {
      std::vector<double> xs;
      for (int i = 0; i < n; ++i) xs.push_back(rng.uniform01());
      return EmpiricalDistribution(xs);
    };
    const int na = 3 + static_cast<int>(rng.index(60));
    const int nb = 3 + static_cast<int>(rng.index(60));
    auto a = make(na);
    auto b = make(nb);
    const double exact = step_sup_distance(a, b);
    const double lo = std::min(a.min(), b.min()) - 0.01;
    const double hi = std::max(a.max(), b.max()) + 0.01;
    double brute = 0.0;
    const int points = 100000;
    for (int i = 0; i < points; ++i) {
      const double t = lo + (hi - lo) * i / (points - 1);
      brute = std::max(brute, std::fabs(a.ecdf(t) - b.ecdf(t)));
    }
    CHECK(exact >= brute - 1e-12);
    // A step piece narrower than the grid spacing can hide at most one jump
    // of each function from the scan.
    CHECK(exact - brute <= 1.0 / na + 1.0 / nb + 1e-12);
  }
}

TEST_CASE("quantile is the left-continuous inverse") {
  EmpiricalDistribution d({1, 2, 3, 4});
  CHECK(d.quantile(0.5) == 2.0);
  CHECK(d.quantile(0.5 + 1e-6) == 3.0);
  CHECK(d.quantile(0.25) == 1.0);
  CHECK(d.quantile(1.0) == 4.0);
  CHECK(d.quantile(0.1) == 1.0);
  CHECK_THROWS_AS(d.quantile(0.0), std::invalid_argument);
  CHECK_THROWS_AS(d.quantile(1.5), std::invalid_argument);
}

TEST_CASE("ecdf text round trip is exact") {
  RandomStream rng(3);
  std::vector<double> xs;
  for (int i = 0; i < 23; ++i) xs.push_back(rng.exponential(1.0));
  EmpiricalDistribution d(xs);
  std::stringstream ss;
  save_ecdf(ss, d);
  std::string first_line = ss.str().substr(0, ss.str().find('\n'));
  CHECK(first_line == "# ecdf count=23");
  auto back = load_ecdf(ss);
  CHECK(back.samples() == d.samples());
}

TEST_SUITE_END();
