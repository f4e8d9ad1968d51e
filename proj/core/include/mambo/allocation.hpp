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

#ifndef MAMBO_ALLOCATION_HPP
#define MAMBO_ALLOCATION_HPP

#include <Eigen/Core>
#include <vector>

namespace mambo {

/// Replication budget accounting. N = consumed + remaining at all times.
struct BudgetState {
  long long total = 0;      // N
  long long remaining = 0;  // A
  int r_min = 2;
  double s_c = 5.0;         // coefficient of the replication floor sequence

  long long consumed() const { return total - remaining; }
  void spend(long long k);
};

/// Replication floor after i points: max(r_min, ⌈c ln^2(i+1)⌉). Nondecreasing,
/// diverging, and fast enough that Σ i exp(-a s_i) < ∞ for every a > 0.
int s_sequence(long long i, double c, int r_min);

/// Stage budget B = Σ_x max(0, s_n − M(x)), capped at the remaining budget.
long long stage_budget(const std::vector<int>& counts, int s_n, long long remaining);

struct PointStats {
  double mean = 0.0;  // sample mean
  double sd = 0.0;    // sample standard deviation
  int count = 0;      // current replicate count
};

/// Continuous OCBA targets (unnormalized): with x_b the lowest-mean point,
/// t_i = (s(x_i)/d_{b,i})^2 for i ≠ b and t_b = s(x_b) √(Σ_{i≠b} t_i^2/s^2(x_i)).
/// Tied means use epsilon-regularized distances; an all-zero-sd instance
/// yields equal targets.
Eigen::VectorXd ocba_targets(const std::vector<PointStats>& stats);

/// Distributes an integer budget proportionally to the OCBA targets, rounded
/// by largest remainder so the total is exactly `budget` and every share is
/// nonnegative.
std::vector<long long> ocba_split(const std::vector<PointStats>& stats, long long budget);

/// Allocation stage of the optimizer loop: when the remaining budget covers
/// the total deficiency the floors are met exactly (every point topped up to
/// s_n); under scarcity the capped budget is distributed by the OCBA split,
/// capped pointwise at each deficiency with leftover waterfilled to the
/// largest remaining deficits.
std::vector<long long> plan_allocation(const std::vector<PointStats>& stats,
                                       const std::vector<int>& counts, int s_n,
                                       long long remaining);

}  // namespace mambo

#endif  // MAMBO_ALLOCATION_HPP
