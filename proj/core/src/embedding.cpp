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

#include "mambo/embedding.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>
#include <string>

namespace mambo {

Embedding Embedding::identity(int d) {
  return {Eigen::MatrixXd::Identity(d, d), EmbeddingKind::identity};
}

Embedding gaussian_embedding(int d, int target_dim, RngStream& rng) {
  if (target_dim < 1 || target_dim > d)
    throw std::invalid_argument("gaussian_embedding: need 1 <= target_dim <= d");
  const double scale = 1.0 / std::sqrt(static_cast<double>(target_dim));
  Eigen::MatrixXd P(target_dim, d);
  for (int i = 0; i < target_dim; ++i)
    for (int j = 0; j < d; ++j) P(i, j) = scale * rng.normal();
  return {std::move(P), EmbeddingKind::gaussian};
}

Embedding pca_embedding(const Eigen::MatrixXd& X, int target_dim) {
  const auto n = X.rows();
  const auto d = X.cols();
  if (n < 2) throw std::invalid_argument("pca_embedding: needs at least two rows");
  if (target_dim < 1 || target_dim > std::min(n, d))
    throw std::invalid_argument("pca_embedding: need 1 <= target_dim <= min(n, d)");
  Eigen::MatrixXd C = X.rowwise() - X.colwise().mean();
  Eigen::BDCSVD<Eigen::MatrixXd> svd(C, Eigen::ComputeThinV);
  const Eigen::VectorXd& sv = svd.singularValues();
  int rank = 0;
  const double tol = 1e-10 * std::max(sv.size() > 0 ? sv(0) : 0.0, 1e-300);
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > tol) ++rank;
  if (rank < target_dim)
    throw std::invalid_argument("pca_embedding: rank of centered data is " +
                                std::to_string(rank) + ", below the requested " +
                                std::to_string(target_dim));
  Eigen::MatrixXd P = svd.matrixV().leftCols(target_dim).transpose();
  // reproducible sign: largest-magnitude entry of each row made positive
  for (int i = 0; i < target_dim; ++i) {
    Eigen::Index j;
    P.row(i).cwiseAbs().maxCoeff(&j);
    if (P(i, j) < 0.0) P.row(i) = -P.row(i);
  }
  return {std::move(P), EmbeddingKind::pca};
}

Eigen::VectorXd project(const Embedding& e, const Eigen::VectorXd& x) {
  if (x.size() != e.matrix.cols()) throw std::invalid_argument("project: dimension mismatch");
  return e.matrix * x;
}

Eigen::MatrixXd project_rows(const Embedding& e, const Eigen::MatrixXd& X) {
  if (X.cols() != e.matrix.cols()) throw std::invalid_argument("project_rows: dimension mismatch");
  return X * e.matrix.transpose();
}

std::pair<bool, double> is_subspace_embedding(const Embedding& e, const Eigen::MatrixXd& V,
                                              double eps) {
  if (V.rows() != e.matrix.cols())
    throw std::invalid_argument("is_subspace_embedding: V has wrong row count");
  const auto k = V.cols();
  const Eigen::MatrixXd gram = V.transpose() * V;
  if ((gram - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff() > 1e-8)
    throw std::invalid_argument("is_subspace_embedding: V is not orthonormal");
  const Eigen::MatrixXd W = e.matrix * V;
  const Eigen::MatrixXd M = W.transpose() * W - Eigen::MatrixXd::Identity(k, k);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  const double distortion = es.eigenvalues().cwiseAbs().maxCoeff();
  return {distortion <= eps, distortion};
}

}  // namespace mambo
