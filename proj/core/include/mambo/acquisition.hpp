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

#ifndef MAMBO_ACQUISITION_HPP
#define MAMBO_ACQUISITION_HPP

#include <Eigen/Core>

#include "mambo/aggregate.hpp"
#include "mambo/box.hpp"
#include "mambo/rng.hpp"

namespace mambo {

enum class AcquisitionKind { expected_improvement, lower_confidence_bound, thompson };

struct AcquisitionSpec {
  AcquisitionKind kind = AcquisitionKind::expected_improvement;
  double kappa = 2.0;        // confidence-bound width (LCB only)
  int candidate_count = 512;
  int refine_steps = 20;
};

/// Closed-form expected improvement below the incumbent `best` (minimization):
///   Δ = best − mean;  EI = Δ Φ(Δ/√v) + √v φ(Δ/√v),  or max(Δ, 0) at v = 0.
/// Throws on variance below -1e-8; smaller negatives are clamped to zero.
double expected_improvement(double mean, double variance, double best);

/// mean − kappa √variance; the next point is its argmin.
double lcb(double mean, double variance, double kappa);

struct ThompsonPick {
  Eigen::Index index = 0;
  bool joint_draw = true;  // false when the factorization fell back to marginals
};

/// Draws one joint sample of the aggregated process at the candidate rows and
/// returns the argmin index. Falls back (flagged) to independent marginal
/// draws if the candidate covariance cannot be factorized even with jitter.
ThompsonPick thompson_pick(const AggregatedModel& model, const Eigen::MatrixXd& candidates,
                           RngStream& rng);

/// Proposes the next original-space point: Latin-hypercube candidates scored
/// by the acquisition (EI ties broken by lower mean), the winner refined by
/// coordinate pattern search (step halved on failure, clipped to the box).
/// Candidates within L-inf 1e-9 of a sampled row are excluded; throws if that
/// excludes everything.
Eigen::VectorXd propose_next(const AggregatedModel& model, const Box& space,
                             const Eigen::MatrixXd& sampled, const AcquisitionSpec& spec,
                             double best_mean, RngStream& rng);

}  // namespace mambo

#endif  // MAMBO_ACQUISITION_HPP
