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

#include "mambo/acquisition.hpp"

#include <Eigen/Cholesky>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "mambo/math.hpp"
#include "mambo/sampling.hpp"

namespace mambo {

namespace {
constexpr double kNegVarianceTol = -1e-8;
constexpr double kExclusionTol = 1e-9;

double checked_variance(double variance) {
  if (variance < 0.0) {
    if (variance < kNegVarianceTol)
      throw std::invalid_argument("acquisition: variance below -1e-8");
    return 0.0;
  }
  return variance;
}
}  // namespace

double expected_improvement(double mean, double variance, double best) {
  const double v = checked_variance(variance);
  const double delta = best - mean;
  if (v == 0.0) return std::max(delta, 0.0);
  const double sd = std::sqrt(v);
  const double z = delta / sd;
  return std::max(delta * normal_cdf(z) + sd * normal_pdf(z), 0.0);
}

double lcb(double mean, double variance, double kappa) {
  return mean - kappa * std::sqrt(checked_variance(variance));
}

ThompsonPick thompson_pick(const AggregatedModel& model, const Eigen::MatrixXd& candidates,
                           RngStream& rng) {
  if (candidates.rows() < 1) throw std::invalid_argument("thompson_pick: no candidates");
  auto [means, cov] = aggregated_joint(model, candidates);
  const auto c = candidates.rows();
  Eigen::VectorXd z(c);
  for (Eigen::Index i = 0; i < c; ++i) z(i) = rng.normal();

  const double scale = std::max(cov.diagonal().maxCoeff(), 1e-300);
  double jitter = 1e-10 * scale;
  Eigen::VectorXd sample;
  bool joint = false;
  for (int attempt = 0; attempt < 8; ++attempt) {
    Eigen::MatrixXd work = cov;
    work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      sample = means + Eigen::MatrixXd(llt.matrixL()) * z;
      joint = true;
      break;
    }
    jitter *= 10.0;
  }
  if (!joint) {
    // flagged fallback: independent marginal draws
    sample = means + cov.diagonal().cwiseMax(0.0).cwiseSqrt().cwiseProduct(z);
  }
  Eigen::Index best;
  sample.minCoeff(&best);
  return {best, joint};
}

namespace {

struct Score {
  double primary;    // maximized
  double secondary;  // tie-break, maximized
  bool better_than(const Score& o) const {
    if (primary != o.primary) return primary > o.primary;
    return secondary > o.secondary;
  }
};

Score score_point(const AggregatedModel& model, const AcquisitionSpec& spec, double best_mean,
                  const Eigen::VectorXd& x) {
  const auto [mean, var] = predict_aggregated(model, x);
  if (spec.kind == AcquisitionKind::lower_confidence_bound)
    return {-lcb(mean, var, spec.kappa), 0.0};
  return {expected_improvement(mean, var, best_mean), -mean};
}

bool near_sampled(const Eigen::MatrixXd& sampled, const Eigen::VectorXd& x) {
  for (Eigen::Index i = 0; i < sampled.rows(); ++i) {
    if ((sampled.row(i).transpose() - x).cwiseAbs().maxCoeff() <= kExclusionTol) return true;
  }
  return false;
}

}  // namespace

Eigen::VectorXd propose_next(const AggregatedModel& model, const Box& space,
                             const Eigen::MatrixXd& sampled, const AcquisitionSpec& spec,
                             double best_mean, RngStream& rng) {
  if (spec.candidate_count < 1) throw std::invalid_argument("propose_next: candidate_count >= 1");
  if (!space.lo.allFinite() || !space.hi.allFinite())
    throw std::invalid_argument("propose_next: box bounds must be finite");

  const Eigen::MatrixXd cand = latin_hypercube(spec.candidate_count, space, rng);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < cand.rows(); ++i)
    if (!near_sampled(sampled, cand.row(i).transpose())) keep.push_back(i);
  if (keep.empty())
    throw std::runtime_error(
        "propose_next: every candidate collides with a sampled point; enlarge the space or "
        "loosen the exclusion");

  if (spec.kind == AcquisitionKind::thompson) {
    Eigen::MatrixXd kept(static_cast<Eigen::Index>(keep.size()), cand.cols());
    for (std::size_t i = 0; i < keep.size(); ++i) kept.row(static_cast<Eigen::Index>(i)) = cand.row(keep[i]);
    const ThompsonPick pick = thompson_pick(model, kept, rng);
    return kept.row(pick.index).transpose();
  }

  Eigen::VectorXd best_x = cand.row(keep.front()).transpose();
  Score best_s = score_point(model, spec, best_mean, best_x);
  for (std::size_t i = 1; i < keep.size(); ++i) {
    Eigen::VectorXd x = cand.row(keep[i]).transpose();
    const Score s = score_point(model, spec, best_mean, x);
    if (s.better_than(best_s)) {
      best_s = s;
      best_x = std::move(x);
    }
  }

  // coordinate pattern refinement, step halved when no axis improves
  double step = 0.1;
  const Eigen::VectorXd range = space.range();
  for (int it = 0; it < spec.refine_steps; ++it) {
    Score round_best = best_s;
    Eigen::VectorXd round_x = best_x;
    for (int j = 0; j < space.dim(); ++j) {
      for (double dir : {1.0, -1.0}) {
        Eigen::VectorXd x = best_x;
        x(j) = std::clamp(x(j) + dir * step * range(j), space.lo(j), space.hi(j));
        if (near_sampled(sampled, x)) continue;
        const Score s = score_point(model, spec, best_mean, x);
        if (s.better_than(round_best)) {
          round_best = s;
          round_x = std::move(x);
        }
      }
    }
    if (round_best.better_than(best_s)) {
      best_s = round_best;
      best_x = std::move(round_x);
    } else {
      step *= 0.5;
    }
  }
  return best_x;
}

}  // namespace mambo
