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

#ifndef SIMBAND_KOLMOGOROV_HPP_
#define SIMBAND_KOLMOGOROV_HPP_

#include <cmath>
#include <stdexcept>

namespace simband {

// CDF of sup_{t in [0,1]} |BB(t)| for a standard Brownian bridge:
// K(x) = 1 - 2 sum_{j>=1} (-1)^{j-1} exp(-2 j^2 x^2).
inline double kolmogorov_cdf(double x) {
  if (x <= 0.0) return 0.0;
  double sum = 0.0;
  double sign = 1.0;
  for (int j = 1;; ++j) {
    const double term = std::exp(-2.0 * j * j * x * x);
    sum += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  const double k = 1.0 - 2.0 * sum;
  return k < 0.0 ? 0.0 : (k > 1.0 ? 1.0 : k);
}

// Quantile of sup |BB(t)|: the x with K(x) = p, found by bisection to 1e-8.
inline double kolmogorov_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("kolmogorov_quantile: p must lie in (0,1)");
  }
  double lo = 0.0, hi = 10.0;
  while (hi - lo > 1e-8) {
    const double mid = 0.5 * (lo + hi);
    if (kolmogorov_cdf(mid) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace simband

#endif  // SIMBAND_KOLMOGOROV_HPP_
