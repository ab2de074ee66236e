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

#ifndef NPDS_DSP_ICA_HPP_
#define NPDS_DSP_ICA_HPP_

#include <cstdint>

#include <Eigen/Dense>

namespace npds::dsp {

inline constexpr int kDefaultIcaMaxIterations = 500;
inline constexpr double kDefaultIcaTolerance = 1e-5;

struct IcaResult {
  // Maps centered observations to sources: sources = unmixing * (X - mean).
  // Equals rotation * whitening.
  Eigen::MatrixXd unmixing_matrix;
  Eigen::MatrixXd whitening_matrix;
  Eigen::MatrixXd rotation;
  Eigen::VectorXd mean;
  // k x n, unit variance, mutually uncorrelated.
  Eigen::MatrixXd sources;
  int iterations_used = 0;
  bool converged = false;
};

// Symmetric FastICA with g(u) = tanh(u) on a k x n matrix (rows are
// channels). Convergence: min |diag(W_new * W_old^T)| > 1 - tolerance. When
// max_iterations is exhausted the partial result comes back with
// converged == false. Throws Errc::kRankDeficient, Errc::kInvalidArgument.
IcaResult fastica(const Eigen::MatrixXd& signals,
                  int max_iterations = kDefaultIcaMaxIterations,
                  double tolerance = kDefaultIcaTolerance,
                  std::uint64_t seed = 0);

// Covariance (1/n normalization) of the rows of a k x n matrix.
Eigen::MatrixXd row_covariance(const Eigen::MatrixXd& x);

}  // namespace npds::dsp

#endif  // NPDS_DSP_ICA_HPP_
