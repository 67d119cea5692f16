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

#ifndef SIMBAND_BAND_HPP_
#define SIMBAND_BAND_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "simband/covariance.hpp"
#include "simband/empirical.hpp"
#include "simband/kolmogorov.hpp"
#include "simband/max_stat.hpp"
#include "simband/models.hpp"
#include "simband/rng.hpp"

namespace simband {

// Shortest round-trip decimal representation.
inline std::string format_double(double v) {
  char buf[40];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc{}) return "nan";
  return std::string(buf, p);
}

enum class BandMethod { inflated, classic_ks, bootstrap_full };

inline const char* band_method_name(BandMethod m) {
  switch (m) {
    case BandMethod::inflated: return "inflated";
    case BandMethod::classic_ks: return "classic_ks";
    case BandMethod::bootstrap_full: return "bootstrap_full";
  }
  return "unknown";
}

struct BandMetadata {
  double n = 0.0;       // average input data size
  int runs = 0;         // R, simulation runs behind the center ECDF
  double alpha = 0.0;
  std::string grid_label;
  std::uint64_t seed = 0;
};

// Constant-width band around an output ECDF: L(t) = F(t) - q, U(t) = F(t) + q.
// Coverage arithmetic uses the unclamped values; exports clamp to [0,1],
// which covers the same references since any CDF lies in [0,1].
class ConfidenceBand {
 public:
  ConfidenceBand(EmpiricalDistribution center, double halfwidth, BandMethod method,
                 BandMetadata metadata)
      : center_(std::move(center)),
        halfwidth_(halfwidth),
        method_(method),
        metadata_(std::move(metadata)) {
    if (!(halfwidth_ >= 0.0)) {
      throw std::invalid_argument("ConfidenceBand: halfwidth must be >= 0");
    }
  }

  const EmpiricalDistribution& center() const { return center_; }
  double halfwidth() const { return halfwidth_; }
  BandMethod method() const { return method_; }
  const BandMetadata& metadata() const { return metadata_; }

  double lower(double t) const { return center_.ecdf(t) - halfwidth_; }
  double upper(double t) const { return center_.ecdf(t) + halfwidth_; }

 private:
  EmpiricalDistribution center_;
  double halfwidth_;
  BandMethod method_;
  BandMetadata metadata_;
};

// Input-uncertainty-inflated band: R runs under the full-data empirical
// inputs form the center ECDF, and the halfwidth is the (1-alpha) quantile
// of max_j |Z_j/sqrt(n) + BB(Qhat(t_j))/sqrt(R)| with Z ~ N(0, cov).
inline ConfidenceBand build_inflated_band(const FiniteHorizonModel& model,
                                          const InputDataset& data, int runs,
                                          const CovarianceEstimate& cov, const Grid& grid,
                                          double alpha, int limit_samples, RandomStream& rng,
                                          BandMethod tag = BandMethod::inflated) {
  if (runs < 1) throw std::invalid_argument("build_inflated_band: R must be >= 1");
  auto root = rng.split();
  auto sim_rng = root.derive(0);
  auto limit_rng = root.derive(1);

  std::vector<double> outputs(static_cast<std::size_t>(runs));
  for (int r = 0; r < runs; ++r) {
    outputs[static_cast<std::size_t>(r)] = simulate(model, data, sim_rng);
  }
  EmpiricalDistribution center(std::move(outputs));

  std::vector<double> ecdf_at_grid(grid.size());
  for (std::size_t l = 0; l < grid.size(); ++l) ecdf_at_grid[l] = center.ecdf(grid[l]);

  const double n = data.average_size();
  const double q = max_stat_quantile(cov, ecdf_at_grid, n, static_cast<double>(runs), alpha,
                                     limit_samples, limit_rng);
  BandMetadata meta;
  meta.n = n;
  meta.runs = runs;
  meta.alpha = alpha;
  meta.grid_label = "[" + std::to_string(grid[0]) + "," +
                    std::to_string(grid[grid.size() - 1]) +
                    "] k=" + std::to_string(grid.size());
  meta.seed = rng.stream_id();
  return ConfidenceBand(std::move(center), q, tag, std::move(meta));
}

// Classic Kolmogorov-Smirnov band, ignoring input uncertainty entirely:
// halfwidth q_{1-alpha} / sqrt(R) regardless of the data.
inline ConfidenceBand build_classic_ks_band(const EmpiricalDistribution& center, int runs,
                                            double alpha) {
  if (runs < 1) throw std::invalid_argument("build_classic_ks_band: R must be >= 1");
  BandMetadata meta;
  meta.runs = runs;
  meta.alpha = alpha;
  return ConfidenceBand(center, kolmogorov_quantile(1.0 - alpha) / std::sqrt(runs),
                        BandMethod::classic_ks, std::move(meta));
}

// Exact coverage event: the band contains the whole reference step function,
// decided via the exact sup distance rather than a grid scan.
inline bool band_covers(const ConfidenceBand& band, const EmpiricalDistribution& reference) {
  return step_sup_distance(band.center(), reference) <= band.halfwidth();
}

struct QuantileInterval {
  double level;
  double lower;  // -inf when the band floor never reaches the level
  double upper;  // +inf when the band ceiling never reaches the level
};

struct QuantileRegion {
  std::vector<QuantileInterval> intervals;
};

// Inverts the band into simultaneous quantile intervals:
// upper_s = inf{t : F(t) - q >= s}, lower_s = inf{t : F(t) + q >= s}.
inline QuantileRegion extract_quantile_region(const ConfidenceBand& band,
                                              std::span<const double> levels) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  QuantileRegion region;
  region.intervals.reserve(levels.size());
  for (double s : levels) {
    if (!(s > 0.0 && s < 1.0)) {
      throw std::invalid_argument("extract_quantile_region: levels must lie in (0,1)");
    }
    QuantileInterval iv{s, -kInf, kInf};
    const double c_lower = s - band.halfwidth();
    if (c_lower > 0.0) iv.lower = band.center().quantile(std::min(c_lower, 1.0));
    const double c_upper = s + band.halfwidth();
    if (c_upper <= 1.0) iv.upper = band.center().quantile(c_upper);
    region.intervals.push_back(iv);
  }
  return region;
}

// True iff every true quantile lies in its interval; unbounded sides always hold.
inline bool region_covers(const QuantileRegion& region,
                          std::span<const double> true_quantiles) {
  if (true_quantiles.size() != region.intervals.size()) {
    throw std::invalid_argument("region_covers: one true quantile per level required");
  }
  for (std::size_t i = 0; i < true_quantiles.size(); ++i) {
    const auto& iv = region.intervals[i];
    if (!(true_quantiles[i] >= iv.lower && true_quantiles[i] <= iv.upper)) return false;
  }
  return true;
}

// CSV export with header metadata, one row per jump point of the center
// ECDF, lower/upper clamped to [0,1]. Unbounded values elsewhere use
// explicit -inf/inf tokens; the band file itself is always finite.
inline void save_band_csv(std::ostream& os, const ConfidenceBand& band) {
  os << "# method=" << band_method_name(band.method()) << "\n";
  os << "# alpha=" << format_double(band.metadata().alpha) << "\n";
  os << "# halfwidth=" << format_double(band.halfwidth()) << "\n";
  os << "# seed=" << band.metadata().seed << "\n";
  os << "t,lower,upper\n";
  const auto& xs = band.center().samples();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i > 0 && xs[i] == xs[i - 1]) continue;
    const double lo = std::max(0.0, band.lower(xs[i]));
    const double hi = std::min(1.0, band.upper(xs[i]));
    os << format_double(xs[i]) << "," << format_double(lo) << "," << format_double(hi)
       << "\n";
  }
}

inline void save_band_csv(const std::string& path, const ConfidenceBand& band) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_band_csv: cannot open " + path);
  save_band_csv(os, band);
}

// Unbounded interval endpoints carry explicit tokens in exports.
inline std::string format_quantile_bound(double v) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  if (v == kInf) return "inf";
  if (v == -kInf) return "-inf";
  return format_double(v);
}

}  // namespace simband

#endif  // SIMBAND_BAND_HPP_
