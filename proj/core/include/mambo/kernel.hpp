/*
 * Copyright 2026 the mambo authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef MAMBO_KERNEL_HPP
#define MAMBO_KERNEL_HPP

#include <Eigen/Core>

namespace mambo {

/// Anisotropic squared-exponential covariance
///   k(x, x') = process_variance * exp(-Σ_j θ_j (x_j - x'_j)^2),
/// with one rate θ_j > 0 per input dimension (units 1/length^2).
struct KernelSpec {
  Eigen::VectorXd lengthscale_rates;  // θ
  double process_variance = 1.0;      // σ_F^2

  int dim() const { return static_cast<int>(lengthscale_rates.size()); }

  static KernelSpec isotropic(int dim, double rate, double variance) {
    return {Eigen::VectorXd::Constant(dim, rate), variance};
  }

  /// Throws std::invalid_argument unless all θ_j > 0 and σ_F^2 > 0.
  void validate() const;
};

double kernel_eval(const KernelSpec& kernel, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// n x n covariance matrix of the rows of X.
Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Eigen::MatrixXd& X);

/// Covariance vector between a query x and every row of X.
Eigen::VectorXd kernel_vector(const KernelSpec& kernel, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& x);

/// Cross-covariance between the rows of A and the rows of B.
Eigen::MatrixXd kernel_cross(const KernelSpec& kernel, const Eigen::MatrixXd& A,
                             const Eigen::MatrixXd& B);

}  // namespace mambo

#endif  // MAMBO_KERNEL_HPP
