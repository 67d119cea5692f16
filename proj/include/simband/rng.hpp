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

#ifndef SIMBAND_RNG_HPP_
#define SIMBAND_RNG_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>

namespace simband {

// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
// easy as 1, 2, 3"). Counter-based: each (key, counter) pair yields 128
// output bits, so streams can be derived, replayed and partitioned across
// workers without shared state.
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                               std::uint32_t k0,
                                               std::uint32_t k1) {
  constexpr std::uint32_t kMul0 = 0xD2511F53u;
  constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
  constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
  constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
    const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0,
           static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1,
           static_cast<std::uint32_t>(p0)};
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return ctr;
}

inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

// Quantile function of the standard normal. Rational approximation (Acklam)
// polished with one Halley step against erfc, accurate to ~1 ulp over (0,1).
inline double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::invalid_argument("inverse_normal_cdf: p must lie in (0,1)");
  }
  constexpr double a[6] = {-3.969683028665376e+01, 2.209460984245205e+02,
                           -2.759285104469687e+02, 1.383577518672690e+02,
                           -3.066479806614716e+01, 2.506628277459239e+00};
  constexpr double b[5] = {-5.447609879822406e+01, 1.615858368580409e+02,
                           -1.556989798598866e+02, 6.680131188771972e+01,
                           -1.328068155288572e+01};
  constexpr double c[6] = {-7.784894002430293e-03, -3.223964580411365e-01,
                           -2.400758277161838e+00, -2.549732539343734e+00,
                           4.374664141464968e+00,  2.938163982698783e+00};
  constexpr double d[4] = {7.784695709041462e-03, 3.224671290700398e-01,
                           2.445134137142996e+00, 3.754408661907416e+00};
  constexpr double plow = 0.02425;
  double x;
  if (p < plow) {
    const double q = std::sqrt(-2.0 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  } else if (p <= 1.0 - plow) {
    const double q = p - 0.5;
    const double r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
  } else {
    const double q = std::sqrt(-2.0 * std::log1p(-p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  constexpr double kSqrt2Pi = 2.506628274631000502;
  const double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  const double u = e * kSqrt2Pi * std::exp(x * x / 2.0);
  return x - u / (1.0 + x * u / 2.0);
}

// One independent random stream. The 64-bit stream id occupies half of the
// Philox counter block and the position occupies the other half, so distinct
// ids never share output. Every variate consumes exactly one 64-bit draw,
// which keeps consumption accounting exact.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed, std::uint64_t stream_id = 0)
      : key0_(static_cast<std::uint32_t>(seed)),
        key1_(static_cast<std::uint32_t>(seed >> 32)),
        id_(stream_id) {}

  // Child stream keyed by (parent id, child index); the parent is untouched,
  // so derive() can be replayed and partitioned deterministically.
  RandomStream derive(std::uint64_t child) const {
    RandomStream s(0, mix64(id_ + mix64(child + 0x9E3779B97F4A7C15ull)));
    s.key0_ = key0_;
    s.key1_ = key1_;
    return s;
  }

  // Consumes one draw and returns a fresh child lineage; successive split()
  // calls give unrelated children.
  RandomStream split() { return derive(next_u64()); }

  std::uint64_t next_u64() {
    ++draws_;
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const auto out = philox4x32({static_cast<std::uint32_t>(block_),
                                 static_cast<std::uint32_t>(block_ >> 32),
                                 static_cast<std::uint32_t>(id_),
                                 static_cast<std::uint32_t>(id_ >> 32)},
                                key0_, key1_);
    ++block_;
    spare_ = out[2] | (std::uint64_t{out[3]} << 32);
    have_spare_ = true;
    return out[0] | (std::uint64_t{out[1]} << 32);
  }

  // Uniform on [0,1) with 53 random bits.
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1); safe argument for inverse CDFs.
  double uniform01_open() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return inverse_normal_cdf(uniform01_open()); }

  double exponential(double rate) {
    if (!(rate > 0.0)) throw std::invalid_argument("exponential: rate must be > 0");
    return -std::log1p(-uniform01()) / rate;
  }

  // Uniform index in [0, n) by 128-bit multiply-shift.
  std::uint64_t index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("index: n must be >= 1");
    return static_cast<std::uint64_t>(
        (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
  }

  // Number of variates handed out so far.
  std::uint64_t draws() const { return draws_; }

  std::uint64_t stream_id() const { return id_; }

 private:
  std::uint32_t key0_;
  std::uint32_t key1_;
  std::uint64_t id_;
  std::uint64_t block_ = 0;
  std::uint64_t spare_ = 0;
  bool have_spare_ = false;
  std::uint64_t draws_ = 0;
};

}  // namespace simband

#endif  // SIMBAND_RNG_HPP_
