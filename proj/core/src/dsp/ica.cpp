/*
 * Copyright 2026 The npds Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "npds/dsp/ica.hpp"

#include <cmath>
#include <random>
#include <string>

#include "npds/error.hpp"

namespace npds::dsp {
namespace {

// W <- (W W^T)^{-1/2} W
Eigen::MatrixXd symmetric_decorrelation(const Eigen::MatrixXd& w) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(w * w.transpose());
  const Eigen::VectorXd inv_sqrt = eig.eigenvalues().cwiseSqrt().cwiseInverse();
  return eig.eigenvectors() * inv_sqrt.asDiagonal() *
         eig.eigenvectors().transpose() * w;
}

}  // namespace

Eigen::MatrixXd row_covariance(const Eigen::MatrixXd& x) {
  const Eigen::MatrixXd centered = x.colwise() - x.rowwise().mean();
  return centered * centered.transpose() / static_cast<double>(x.cols());
}

IcaResult fastica(const Eigen::MatrixXd& signals, int max_iterations,
                  double tolerance, std::uint64_t seed) {
  const Eigen::Index k = signals.rows();
  const Eigen::Index n = signals.cols();
  if (k < 2) throw Error(Errc::kInvalidArgument, "ICA needs at least two channels");
  if (n < 10 * k) {
    throw Error(Errc::kInvalidArgument,
                "ICA needs at least " + std::to_string(10 * k) + " samples");
  }
  if (max_iterations < 1 || !(tolerance > 0.0)) {
    throw Error(Errc::kInvalidArgument, "bad ICA iteration limits");
  }

  IcaResult result;
  result.mean = signals.rowwise().mean();
  const Eigen::MatrixXd centered = signals.colwise() - result.mean;
  const Eigen::MatrixXd cov = centered * centered.transpose() / static_cast<double>(n);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  const Eigen::VectorXd& evals = eig.eigenvalues();  // ascending
  if (!(evals(0) >= 1e-12 * evals(k - 1)) || !(evals(k - 1) > 0.0)) {
    throw Error(Errc::kRankDeficient, "covariance is rank deficient");
  }
  result.whitening_matrix = evals.cwiseSqrt().cwiseInverse().asDiagonal() *
                            eig.eigenvectors().transpose();
  const Eigen::MatrixXd z = result.whitening_matrix * centered;

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd w(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < k; ++j) w(i, j) = normal(rng);
  }
  w = symmetric_decorrelation(w);

  const double inv_n = 1.0 / static_cast<double>(n);
  for (int iter = 1; iter <= max_iterations; ++iter) {
    const Eigen::MatrixXd g = (w * z).array().tanh().matrix();
    const Eigen::VectorXd g_prime_mean =
        (1.0 - g.array().square()).matrix().rowwise().sum() * inv_n;
    Eigen::MatrixXd w_new = g * z.transpose() * inv_n - g_prime_mean.asDiagonal() * w;
    w_new = symmetric_decorrelation(w_new);

    const double min_overlap =
        (w_new * w.transpose()).diagonal().cwiseAbs().minCoeff();
    w = std::move(w_new);
    result.iterations_used = iter;
    if (min_overlap > 1.0 - tolerance) {
      result.converged = true;
      break;
    }
  }

  result.rotation = w;
  result.unmixing_matrix = w * result.whitening_matrix;
  result.sources = w * z;
  return result;
}

}  // namespace npds::dsp
