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

#ifndef MAMBO_LOOP_HPP
#define MAMBO_LOOP_HPP

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "mambo/acquisition.hpp"
#include "mambo/aggregate.hpp"
#include "mambo/allocation.hpp"
#include "mambo/box.hpp"
#include "mambo/dataset.hpp"
#include "mambo/rng.hpp"

namespace mambo {

/// Noisy black-box objective: one replication per call.
struct Problem {
  int dim = 0;
  Box box;
  std::function<double(const Eigen::VectorXd&, RngStream&)> observe;
  bool concurrent_safe = false;
};

struct MamboConfig {
  int n0 = 20;
  long long total_budget = 0;  // N, in replications; must satisfy N >= n0 * r_min
  int r_min = 2;
  AcquisitionSpec acquisition{};
  int num_submodels = 0;  // 0 = auto
  DimPolicy dim_policy{};
  EmbeddingKind embedding = EmbeddingKind::gaussian;
  double eta = 1.0;
  std::vector<double> eta_grid;  // nonempty -> cross-validated on the initial data
  int cv_folds = 4;
  double s_c = 5.0;
  int hyper_restarts = 2;
  double fit_flop_budget = 1e8;
  long long iteration_cap = 10000;
  bool parallel_submodels = false;
  unsigned long long seed = 1;
};

struct TraceRow {
  long long iteration = 0;  // n0 + loop index, i.e. total points so far
  Eigen::VectorXd proposed;
  double sample_mean = 0.0;         // of the proposed point after this iteration
  long long replications_spent = 0; // r_min + allocation, this iteration
  double best_so_far = 0.0;         // lowest sample mean
  Eigen::VectorXd incumbent;        // point attaining best_so_far
  double elapsed_s = 0.0;           // wall time since the run started
  double fit_s = 0.0;               // model rebuild time, this iteration
};

using TraceSink = std::function<void(const TraceRow&)>;

struct RunResult {
  Eigen::VectorXd incumbent;
  double incumbent_mean = 0.0;
  std::vector<TraceRow> trace;
  std::string termination_reason;
  long long replications_used = 0;
  Eigen::VectorXd initial_incumbent;
  double initial_best_mean = 0.0;
  ReplicatedDataset data;
  Eigen::MatrixXd fixed_embedding;  // set by the single-embedding baseline only
  double selected_eta = 0.0;
  int model_rebuild_retries = 0;
  int validity_warnings = 0;
};

/// Maximin-improved Latin hypercube design: best of 10 LHS draws by minimum
/// pairwise distance. Deterministic under the rng seed.
std::vector<Eigen::VectorXd> initial_design(int n0, const Box& box, RngStream& rng);

/// Point with the lowest sample mean; ties prefer the larger replicate count,
/// then the earlier index. Throws on an empty dataset.
std::pair<int, double> incumbent(const ReplicatedDataset& data);

/// The optimizer driver: initial design, then iterate
/// propose -> observe r_min replications -> allocation stage -> rebuild the
/// aggregated model (fresh partition, embeddings and weights), until the
/// replication budget or the iteration cap runs out. Returns the sampled
/// point with the lowest sample mean.
RunResult run_mambo(const Problem& problem, const MamboConfig& config, RngStream& rng,
                    const TraceSink& sink = {});

}  // namespace mambo

#endif  // MAMBO_LOOP_HPP
