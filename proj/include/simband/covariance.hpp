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

#ifndef SIMBAND_COVARIANCE_HPP_
#define SIMBAND_COVARIANCE_HPP_

#include <Eigen/Dense>
#include <cmath>
#include <fstream>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "simband/empirical.hpp"
#include "simband/rng.hpp"

namespace simband {

// Estimated covariance matrix of the input-noise Gaussian process on a grid.
// Validated at construction (symmetry, nonnegative diagonal, eigenvalues no
// lower than -1e-10 * trace/k) and factored once, so sampling is a matvec.
// Immutable afterwards and safe to share across threads.
class CovarianceEstimate {
 public:
  CovarianceEstimate(Grid grid, Eigen::MatrixXd matrix)
      : grid_(std::move(grid)), matrix_(std::move(matrix)) {
    const auto k = static_cast<Eigen::Index>(grid_.size());
    if (matrix_.rows() != k || matrix_.cols() != k) {
      throw std::invalid_argument("CovarianceEstimate: matrix size must match the grid");
    }
    const double scale = std::max(1.0, matrix_.cwiseAbs().maxCoeff());
    if ((matrix_ - matrix_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
      throw std::invalid_argument("CovarianceEstimate: matrix is not symmetric");
    }
    for (Eigen::Index i = 0; i < k; ++i) {
      if (matrix_(i, i) < -1e-12 * scale) {
        throw std::invalid_argument("CovarianceEstimate: negative diagonal entry");
      }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(matrix_);
    if (eig.info() != Eigen::Success) {
      throw std::invalid_argument("CovarianceEstimate: eigendecomposition failed");
    }
    min_eigenvalue_ = eig.eigenvalues().minCoeff();
    const double floor = -1e-10 * std::max(0.0, matrix_.trace()) / static_cast<double>(k);
    if (min_eigenvalue_ < floor) {
      throw std::invalid_argument(
          "CovarianceEstimate: matrix is indefinite beyond tolerance (min eigenvalue " +
          std::to_string(min_eigenvalue_) + ")");
    }
    Eigen::LLT<Eigen::MatrixXd> llt(matrix_);
    if (llt.info() == Eigen::Success) {
      factor_ = llt.matrixL();
    } else {
      // Round-off can push the Gram estimator just below PSD; clip and refactor.
      factor_ = eig.eigenvectors() *
                eig.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal();
    }
  }

  const Grid& grid() const { return grid_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  std::size_t size() const { return grid_.size(); }
  double at(std::size_t i, std::size_t j) const {
    return matrix_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
  }
  double min_eigenvalue() const { return min_eigenvalue_; }

  // Mean-zero jointly Gaussian draw with this covariance.
  void sample(RandomStream& rng, std::span<double> out) const {
    const auto k = static_cast<Eigen::Index>(size());
    if (out.size() != static_cast<std::size_t>(k)) {
      throw std::invalid_argument("CovarianceEstimate::sample: wrong output length");
    }
    Eigen::VectorXd xi(k);
    for (Eigen::Index i = 0; i < k; ++i) xi(i) = rng.normal();
    Eigen::Map<Eigen::VectorXd>(out.data(), k) = factor_ * xi;
  }

 private:
  Grid grid_;
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd factor_;
  double min_eigenvalue_ = 0.0;
};

inline std::vector<double> sample_gaussian(const CovarianceEstimate& cov, RandomStream& rng) {
  std::vector<double> out(cov.size());
  cov.sample(rng, out);
  return out;
}

// CSV export: first row the grid points, then the k matrix rows.
inline void save_covariance_csv(std::ostream& os, const CovarianceEstimate& cov) {
  os.precision(17);
  const auto k = cov.size();
  for (std::size_t j = 0; j < k; ++j) {
    os << (j ? "," : "") << cov.grid()[j];
  }
  os << "\n";
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      os << (j ? "," : "") << cov.at(i, j);
    }
    os << "\n";
  }
}

inline void save_covariance_csv(const std::string& path, const CovarianceEstimate& cov) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("save_covariance_csv: cannot open " + path);
  save_covariance_csv(os, cov);
}

}  // namespace simband

#endif  // SIMBAND_COVARIANCE_HPP_
