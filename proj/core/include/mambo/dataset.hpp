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

#ifndef MAMBO_DATASET_HPP
#define MAMBO_DATASET_HPP

#include <Eigen/Core>
#include <span>
#include <vector>

namespace mambo {

/// Design points with per-point replicate statistics: sample mean, sample
/// variance and replicate count. Points are pairwise distinct; replicate
/// batches are merged with a numerically stable pooled update.
class ReplicatedDataset {
 public:
  ReplicatedDataset() = default;
  explicit ReplicatedDataset(int dim);

  /// Assemble directly from per-point statistics (lists must agree in length).
  ReplicatedDataset(Eigen::MatrixXd points, Eigen::VectorXd means, Eigen::VectorXd variances,
                    std::vector<int> counts);

  int size() const { return static_cast<int>(points_.rows()); }
  int dim() const { return dim_; }
  bool empty() const { return size() == 0; }

  const Eigen::MatrixXd& points() const { return points_; }
  Eigen::VectorXd point(int i) const { return points_.row(i).transpose(); }
  const Eigen::VectorXd& sample_means() const { return means_; }
  const Eigen::VectorXd& sample_variances() const { return variances_; }
  const std::vector<int>& replicate_counts() const { return counts_; }

  double sample_mean(int i) const { return means_(i); }
  double sample_variance(int i) const { return variances_(i); }
  int replicate_count(int i) const { return counts_[static_cast<std::size_t>(i)]; }
  long long total_replications() const;

  /// Adds a new point with its first batch of replicates; returns its index.
  /// Throws if x exactly duplicates an existing point.
  int add_point(const Eigen::VectorXd& x, std::span<const double> replicates);

  /// Merges a batch of replicates into point i.
  void add_replicates(int i, std::span<const double> replicates);

  /// Index of the point within L-inf distance tol of x, or -1.
  int find_point(const Eigen::VectorXd& x, double tol) const;

  ReplicatedDataset subset(const std::vector<int>& indices) const;

  /// Same statistics over transformed inputs X * P^T (P maps R^d -> R^k).
  ReplicatedDataset with_points(Eigen::MatrixXd new_points) const;

 private:
  int dim_ = 0;
  Eigen::MatrixXd points_;     // n x d
  Eigen::VectorXd means_;      // n
  Eigen::VectorXd variances_;  // n
  std::vector<int> counts_;    // n
};

}  // namespace mambo

#endif  // MAMBO_DATASET_HPP
