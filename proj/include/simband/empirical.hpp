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

#ifndef SIMBAND_EMPIRICAL_HPP_
#define SIMBAND_EMPIRICAL_HPP_

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "simband/rng.hpp"

namespace simband {

// A finite real sample acting both as a resampling source and as a
// right-continuous step CDF. Samples are kept sorted ascending; duplicates
// are counted with multiplicity.
class EmpiricalDistribution {
 public:
  explicit EmpiricalDistribution(std::vector<double> samples)
      : samples_(std::move(samples)) {
    if (samples_.empty()) {
      throw std::invalid_argument("EmpiricalDistribution: samples must be nonempty");
    }
    for (double x : samples_) {
      if (!std::isfinite(x)) {
        throw std::invalid_argument("EmpiricalDistribution: samples must be finite");
      }
    }
    std::sort(samples_.begin(), samples_.end());
  }

  std::size_t count() const { return samples_.size(); }
  const std::vector<double>& samples() const { return samples_; }
  double min() const { return samples_.front(); }
  double max() const { return samples_.back(); }

  // F(t) = (#samples <= t) / count, right-continuous.
  double ecdf(double t) const {
    const auto it = std::upper_bound(samples_.begin(), samples_.end(), t);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
  }

  // Left limit F(t-) = (#samples < t) / count.
  double ecdf_left(double t) const {
    const auto it = std::lower_bound(samples_.begin(), samples_.end(), t);
    return static_cast<double>(it - samples_.begin()) / static_cast<double>(samples_.size());
  }

  // Left-continuous inverse: inf{t : F(t) >= s} for s in (0,1].
  double quantile(double s) const {
    if (!(s > 0.0 && s <= 1.0)) {
      throw std::invalid_argument("quantile: level must lie in (0,1]");
    }
    const double n = static_cast<double>(samples_.size());
    auto j = static_cast<std::size_t>(std::ceil(s * n - 1e-9));
    if (j < 1) j = 1;
    if (j > samples_.size()) j = samples_.size();
    return samples_[j - 1];
  }

  // One uniform draw from the sample; consumes exactly one index draw.
  double sample(RandomStream& rng) const { return samples_[rng.index(samples_.size())]; }

  // `size` independent uniform-with-replacement draws, as a new distribution.
  EmpiricalDistribution resample(std::size_t size, RandomStream& rng) const {
    if (size == 0) throw std::invalid_argument("resample: size must be >= 1");
    std::vector<double> out;
    out.reserve(size);
    for (std::size_t i = 0; i < size; ++i) out.push_back(sample(rng));
    return EmpiricalDistribution(std::move(out));
  }

 private:
  std::vector<double> samples_;
};

// Exact sup_t |F_a(t) - F_b(t)|, scanning the merged jump points and the left
// limit at each, so the value is not grid-approximate.
inline double step_sup_distance(const EmpiricalDistribution& a,
                                const EmpiricalDistribution& b) {
  const auto& xa = a.samples();
  const auto& xb = b.samples();
  const double na = static_cast<double>(xa.size());
  const double nb = static_cast<double>(xb.size());
  std::size_t ia = 0, ib = 0;
  double best = 0.0;
  while (ia < xa.size() || ib < xb.size()) {
    double v;
    if (ib == xb.size() || (ia < xa.size() && xa[ia] <= xb[ib])) {
      v = xa[ia];
    } else {
      v = xb[ib];
    }
    const double left = std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb);
    while (ia < xa.size() && xa[ia] == v) ++ia;
    while (ib < xb.size() && xb[ib] == v) ++ib;
    const double at = std::fabs(static_cast<double>(ia) / na - static_cast<double>(ib) / nb);
    best = std::max(best, std::max(left, at));
  }
  return best;
}

// Strictly increasing evaluation points t_1 < ... < t_k.
class Grid {
 public:
  explicit Grid(std::vector<double> points) : points_(std::move(points)) {
    if (points_.empty()) throw std::invalid_argument("Grid: needs at least one point");
    for (std::size_t i = 0; i < points_.size(); ++i) {
      if (!std::isfinite(points_[i])) {
        throw std::invalid_argument("Grid: points must be finite");
      }
      if (i > 0 && !(points_[i] > points_[i - 1])) {
        throw std::invalid_argument("Grid: points must be strictly increasing");
      }
    }
  }

  const std::vector<double>& points() const { return points_; }
  std::size_t size() const { return points_.size(); }
  double operator[](std::size_t i) const { return points_[i]; }

 private:
  std::vector<double> points_;
};

// k equally spaced points including both endpoints.
inline Grid uniform_grid(double lo, double hi, int k) {
  if (!(lo < hi)) throw std::invalid_argument("uniform_grid: lo must be < hi");
  if (k < 2) throw std::invalid_argument("uniform_grid: k must be >= 2");
  std::vector<double> pts(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    pts[static_cast<std::size_t>(i)] = lo + (hi - lo) * static_cast<double>(i) / (k - 1);
  }
  pts.back() = hi;
  return Grid(std::move(pts));
}

inline void save_ecdf(std::ostream& os, const EmpiricalDistribution& dist) {
  os << "# ecdf count=" << dist.count() << "\n";
  os.precision(17);
  for (double x : dist.samples()) os << x << "\n";
}

inline void save_ecdf(const std::string& path, const EmpiricalDistribution& dist) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_ecdf: cannot open " + path);
  save_ecdf(os, dist);
}

inline EmpiricalDistribution load_ecdf(std::istream& is) {
  std::string header;
  if (!std::getline(is, header) || header.rfind("# ecdf count=", 0) != 0) {
    throw std::runtime_error("load_ecdf: missing '# ecdf count=' header");
  }
  const std::size_t n = std::stoull(header.substr(13));
  std::vector<double> xs;
  xs.reserve(n);
  double x;
  while (is >> x) xs.push_back(x);
  if (xs.size() != n) {
    throw std::runtime_error("load_ecdf: sample count does not match header");
  }
  return EmpiricalDistribution(std::move(xs));
}

inline EmpiricalDistribution load_ecdf(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("load_ecdf: cannot open " + path);
  return load_ecdf(is);
}

}  // namespace simband

#endif  // SIMBAND_EMPIRICAL_HPP_
