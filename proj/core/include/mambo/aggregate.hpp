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

#ifndef MAMBO_AGGREGATE_HPP
#define MAMBO_AGGREGATE_HPP

#include <Eigen/Core>
#include <optional>
#include <utility>
#include <vector>

#include "mambo/dataset.hpp"
#include "mambo/embedding.hpp"
#include "mambo/gp.hpp"
#include "mambo/rng.hpp"

namespace mambo {

/// One embedded GP: its embedding, the indices of its data subset, the GP
/// fitted on the projected inputs, and its BIC-approximated log evidence.
struct Submodel {
  Embedding embedding;
  std::vector<int> subset_indices;
  PosteriorGP gp;
  double log_evidence = 0.0;
  int n_i = 0;
  int d_i = 0;
};

/// Weighted collection of submodels. Weights are nonnegative and sum to one;
/// the model is immutable once built and safe for concurrent prediction.
struct AggregatedModel {
  std::vector<Submodel> submodels;
  Eigen::VectorXd weights;
  double eta = 1.0;
  int input_dim = 0;
  int dropped_submodels = 0;

  int size() const { return static_cast<int>(submodels.size()); }
};

/// How each submodel chooses its embedded dimension d_i.
struct DimPolicy {
  enum class Kind {
    random_range,  // uniform on {⌈d/10⌉ .. min(⌈d/2⌉, n_i - 2)}, clamped
    fixed,         // always fixed_dim (clamped to [1, d])
    full           // d_i = d with the identity embedding
  };
  Kind kind = Kind::random_range;
  int fixed_dim = 0;

  int sample(int d, int n_i, RngStream& rng) const;
};

struct AggregateOptions {
  int num_submodels = 0;  // 0 = auto: clamp(⌈n/50⌉, 2, 10), never above n
  DimPolicy dim_policy{};
  EmbeddingKind embedding = EmbeddingKind::gaussian;
  double eta = 1.0;
  int hyper_restarts = 2;
  double fit_flop_budget = 1e8;  // per build; caps hyperparameter search work
  std::optional<KernelSpec> fixed_kernel;  // skip estimation (dims must match d_i)
  double mean_prior_sd = 10.0;
  HyperBounds bounds{};
  GpFitOptions fit{};
  bool parallel = false;  // dispatch submodel fits concurrently
};

/// Uniformly random partition of {0..n-1} into m disjoint groups whose sizes
/// differ by at most one. Throws if m > n or m < 1.
std::vector<std::vector<int>> partition(int n, int m, RngStream& rng);

int auto_num_submodels(int n);

/// Unnormalized model prior (n_i/n)^2 (d_i/d)^eta.
double model_prior(int n_i, int n, int d_i, int d, double eta);

/// Posterior model weights w_i ∝ exp(log_evidence_i) * prior_i, computed with
/// the max shift so nothing overflows. Throws if every evidence is -inf.
Eigen::VectorXd bayes_weights(const std::vector<Submodel>& submodels, double eta);

/// Algorithm: draw a fresh partition, a fresh embedding per subset, fit each
/// submodel (hyperparameters estimated unless a fixed kernel is supplied) and
/// compute the weights. A submodel whose fit fails is dropped with the
/// remaining weights renormalized (propagated if it was the only one).
AggregatedModel build_aggregated_model(const ReplicatedDataset& data, const AggregateOptions& opts,
                                       RngStream& rng);

/// Aggregated mean Σ w_i m_i(Π_i x) and variance Σ w_i^2 C_i(Π_i x, Π_i x).
std::pair<double, double> predict_aggregated(const AggregatedModel& model,
                                             const Eigen::VectorXd& x);

double aggregated_cov(const AggregatedModel& model, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y);

/// Joint (means, covariance) of the aggregated process at the rows of Q.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> aggregated_joint(const AggregatedModel& model,
                                                             const Eigen::MatrixXd& Q);

/// Picks eta from the grid by k-fold cross-validation: for each eta the score
/// is the mean held-out squared prediction error of the aggregated predictor
/// (submodels are fitted once per fold; only the weights depend on eta).
/// Returns the argmin, ties resolved toward the smaller eta.
double select_eta_cv(const ReplicatedDataset& data, const std::vector<double>& grid, int folds,
                     RngStream& rng, const AggregateOptions& opts = {});

}  // namespace mambo

#endif  // MAMBO_AGGREGATE_HPP
