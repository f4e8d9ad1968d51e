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

#include "mambo/dataset.hpp"

#include <cmath>
#include <stdexcept>

namespace mambo {

namespace {

struct BatchStats {
  double mean = 0.0;
  double m2 = 0.0;  // sum of squared deviations
  long long n = 0;
};

BatchStats welford(std::span<const double> ys) {
  BatchStats s;
  for (double y : ys) {
    ++s.n;
    const double delta = y - s.mean;
    s.mean += delta / static_cast<double>(s.n);
    s.m2 += delta * (y - s.mean);
  }
  return s;
}

}  // namespace

ReplicatedDataset::ReplicatedDataset(int dim) : dim_(dim) {
  if (dim < 1) throw std::invalid_argument("ReplicatedDataset: dim must be >= 1");
  points_.resize(0, dim);
}

ReplicatedDataset::ReplicatedDataset(Eigen::MatrixXd points, Eigen::VectorXd means,
                                     Eigen::VectorXd variances, std::vector<int> counts)
    : dim_(static_cast<int>(points.cols())),
      points_(std::move(points)),
      means_(std::move(means)),
      variances_(std::move(variances)),
      counts_(std::move(counts)) {
  const auto n = points_.rows();
  if (means_.size() != n || variances_.size() != n ||
      static_cast<Eigen::Index>(counts_.size()) != n) {
    throw std::invalid_argument("ReplicatedDataset: statistic lists have mismatched lengths");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    if (variances_(i) < 0.0) throw std::invalid_argument("ReplicatedDataset: negative variance");
    if (counts_[static_cast<std::size_t>(i)] < 1)
      throw std::invalid_argument("ReplicatedDataset: replicate count must be >= 1");
  }
}

long long ReplicatedDataset::total_replications() const {
  long long t = 0;
  for (int c : counts_) t += c;
  return t;
}

int ReplicatedDataset::add_point(const Eigen::VectorXd& x, std::span<const double> replicates) {
  if (dim_ == 0) {
    dim_ = static_cast<int>(x.size());
    points_.resize(0, dim_);
  }
  if (x.size() != dim_) throw std::invalid_argument("add_point: dimension mismatch");
  if (replicates.empty()) throw std::invalid_argument("add_point: needs at least one replicate");
  if (find_point(x, 0.0) >= 0) throw std::invalid_argument("add_point: duplicate design point");

  const BatchStats s = welford(replicates);
  const auto n = points_.rows();
  points_.conservativeResize(n + 1, dim_);
  points_.row(n) = x.transpose();
  means_.conservativeResize(n + 1);
  variances_.conservativeResize(n + 1);
  means_(n) = s.mean;
  variances_(n) = s.n > 1 ? s.m2 / static_cast<double>(s.n - 1) : 0.0;
  counts_.push_back(static_cast<int>(s.n));
  return static_cast<int>(n);
}

void ReplicatedDataset::add_replicates(int i, std::span<const double> replicates) {
  if (i < 0 || i >= size()) throw std::out_of_range("add_replicates: bad index");
  if (replicates.empty()) return;
  const BatchStats b = welford(replicates);
  const auto n1 = static_cast<double>(counts_[static_cast<std::size_t>(i)]);
  const double m2a = variances_(i) * (n1 - 1.0);
  const double delta = b.mean - means_(i);
  const double n = n1 + static_cast<double>(b.n);
  means_(i) += delta * static_cast<double>(b.n) / n;
  const double m2 = m2a + b.m2 + delta * delta * n1 * static_cast<double>(b.n) / n;
  variances_(i) = n > 1.0 ? m2 / (n - 1.0) : 0.0;
  counts_[static_cast<std::size_t>(i)] += static_cast<int>(b.n);
}

int ReplicatedDataset::find_point(const Eigen::VectorXd& x, double tol) const {
  for (Eigen::Index i = 0; i < points_.rows(); ++i) {
    if ((points_.row(i).transpose() - x).cwiseAbs().maxCoeff() <= tol) return static_cast<int>(i);
  }
  return -1;
}

ReplicatedDataset ReplicatedDataset::subset(const std::vector<int>& indices) const {
  Eigen::MatrixXd pts(static_cast<Eigen::Index>(indices.size()), dim_);
  Eigen::VectorXd mu(static_cast<Eigen::Index>(indices.size()));
  Eigen::VectorXd va(static_cast<Eigen::Index>(indices.size()));
  std::vector<int> cnt;
  cnt.reserve(indices.size());
  Eigen::Index r = 0;
  for (int i : indices) {
    if (i < 0 || i >= size()) throw std::out_of_range("subset: bad index");
    pts.row(r) = points_.row(i);
    mu(r) = means_(i);
    va(r) = variances_(i);
    cnt.push_back(counts_[static_cast<std::size_t>(i)]);
    ++r;
  }
  return ReplicatedDataset(std::move(pts), std::move(mu), std::move(va), std::move(cnt));
}

ReplicatedDataset ReplicatedDataset::with_points(Eigen::MatrixXd new_points) const {
  if (new_points.rows() != points_.rows())
    throw std::invalid_argument("with_points: row count mismatch");
  return ReplicatedDataset(std::move(new_points), means_, variances_, counts_);
}

}  // namespace mambo
