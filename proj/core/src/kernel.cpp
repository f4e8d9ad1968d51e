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

#include "mambo/kernel.hpp"

#include <stdexcept>

namespace mambo {

void KernelSpec::validate() const {
  if (lengthscale_rates.size() == 0)
    throw std::invalid_argument("KernelSpec: needs at least one rate");
  if (!(process_variance > 0.0)) throw std::invalid_argument("KernelSpec: process variance <= 0");
  if (!(lengthscale_rates.array() > 0.0).all())
    throw std::invalid_argument("KernelSpec: all lengthscale rates must be > 0");
}

double kernel_eval(const KernelSpec& kernel, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size() || x.size() != kernel.lengthscale_rates.size())
    throw std::invalid_argument("kernel_eval: dimension mismatch");
  const double d = (kernel.lengthscale_rates.array() * (x - y).array().square()).sum();
  return kernel.process_variance * std::exp(-d);
}

namespace {

// Weighted squared distances between the rows of A and B via the scaled-norm
// expansion; tiny negative results from cancellation are clamped.
Eigen::MatrixXd weighted_sqdist(const Eigen::VectorXd& rates, const Eigen::MatrixXd& A,
                                const Eigen::MatrixXd& B) {
  const Eigen::VectorXd w = rates.cwiseSqrt();
  const Eigen::MatrixXd As = A * w.asDiagonal();
  const Eigen::MatrixXd Bs = B * w.asDiagonal();
  const Eigen::VectorXd an = As.rowwise().squaredNorm();
  const Eigen::VectorXd bn = Bs.rowwise().squaredNorm();
  Eigen::MatrixXd d = (-2.0 * As * Bs.transpose());
  d.colwise() += an;
  d.rowwise() += bn.transpose();
  return d.cwiseMax(0.0);
}

}  // namespace

Eigen::MatrixXd kernel_matrix(const KernelSpec& kernel, const Eigen::MatrixXd& X) {
  if (X.cols() != kernel.lengthscale_rates.size())
    throw std::invalid_argument("kernel_matrix: dimension mismatch");
  Eigen::MatrixXd K =
      kernel.process_variance * (-weighted_sqdist(kernel.lengthscale_rates, X, X)).array().exp();
  K.diagonal().setConstant(kernel.process_variance);
  return K;
}

Eigen::VectorXd kernel_vector(const KernelSpec& kernel, const Eigen::MatrixXd& X,
                              const Eigen::VectorXd& x) {
  if (X.cols() != x.size() || x.size() != kernel.lengthscale_rates.size())
    throw std::invalid_argument("kernel_vector: dimension mismatch");
  const Eigen::ArrayXd d =
      ((X.rowwise() - x.transpose()).array().square().rowwise() *
       kernel.lengthscale_rates.transpose().array())
          .rowwise()
          .sum();
  return kernel.process_variance * (-d).exp();
}

Eigen::MatrixXd kernel_cross(const KernelSpec& kernel, const Eigen::MatrixXd& A,
                             const Eigen::MatrixXd& B) {
  if (A.cols() != B.cols() || A.cols() != kernel.lengthscale_rates.size())
    throw std::invalid_argument("kernel_cross: dimension mismatch");
  return kernel.process_variance *
         (-weighted_sqdist(kernel.lengthscale_rates, A, B)).array().exp();
}

}  // namespace mambo
