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

#ifndef MAMBO_EMBEDDING_HPP
#define MAMBO_EMBEDDING_HPP

#include <Eigen/Core>
#include <utility>

#include "mambo/rng.hpp"

namespace mambo {

enum class EmbeddingKind { gaussian, pca, identity };

/// Linear map Π from R^d down to R^{d_i} (rows of the matrix are the image
/// directions). Immutable after construction.
struct Embedding {
  Eigen::MatrixXd matrix;  // d_i x d
  EmbeddingKind kind = EmbeddingKind::identity;

  int source_dim() const { return static_cast<int>(matrix.cols()); }
  int target_dim() const { return static_cast<int>(matrix.rows()); }

  static Embedding identity(int d);
};

/// Π with i.i.d. N(0, 1/d_i) entries, so E[Π^T Π] = I_d.
Embedding gaussian_embedding(int d, int target_dim, RngStream& rng);

/// Rows are the top principal directions of the column-centered rows of X,
/// orthonormal, sign-fixed so the largest-magnitude entry of each row is
/// positive. Throws if rank(centered X) < target_dim, naming the achievable
/// rank.
Embedding pca_embedding(const Eigen::MatrixXd& X, int target_dim);

Eigen::VectorXd project(const Embedding& e, const Eigen::VectorXd& x);

/// Projects every row of X.
Eigen::MatrixXd project_rows(const Embedding& e, const Eigen::MatrixXd& X);

/// Distortion ‖V^T Π^T Π V − I‖_2 for an orthonormal V (d x k); ok iff the
/// distortion is at most eps.
std::pair<bool, double> is_subspace_embedding(const Embedding& e, const Eigen::MatrixXd& V,
                                              double eps);

}  // namespace mambo

#endif  // MAMBO_EMBEDDING_HPP
