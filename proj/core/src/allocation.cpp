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

#include "mambo/allocation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace mambo {

void BudgetState::spend(long long k) {
  if (k < 0 || k > remaining) throw std::runtime_error("BudgetState: overspend");
  remaining -= k;
}

int s_sequence(long long i, double c, int r_min) {
  if (i < 1) throw std::invalid_argument("s_sequence: i must be >= 1");
  if (!(c > 0.0)) throw std::invalid_argument("s_sequence: c must be > 0");
  const double l = std::log(static_cast<double>(i) + 1.0);
  const double v = std::ceil(c * l * l);
  return std::max(r_min, static_cast<int>(v));
}

long long stage_budget(const std::vector<int>& counts, int s_n, long long remaining) {
  long long demand = 0;
  for (int m : counts) demand += std::max(0, s_n - m);
  return std::min(demand, std::max<long long>(remaining, 0));
}

Eigen::VectorXd ocba_targets(const std::vector<PointStats>& stats) {
  const auto n = static_cast<Eigen::Index>(stats.size());
  if (n < 2) throw std::invalid_argument("ocba_targets: needs at least two points");

  Eigen::Index b = 0;
  double lo = stats[0].mean, hi = stats[0].mean;
  for (Eigen::Index i = 1; i < n; ++i) {
    const double m = stats[static_cast<std::size_t>(i)].mean;
    if (m < stats[static_cast<std::size_t>(b)].mean) b = i;
    lo = std::min(lo, m);
    hi = std::max(hi, m);
  }

  bool all_zero_sd = true;
  for (const auto& s : stats) all_zero_sd = all_zero_sd && s.sd == 0.0;
  if (all_zero_sd) return Eigen::VectorXd::Ones(n);

  const double eps = 1e-9 * (hi > lo ? hi - lo : 1.0);
  Eigen::VectorXd t = Eigen::VectorXd::Zero(n);
  double best_sum = 0.0;  // Σ_{i≠b} t_i^2 / s_i^2
  for (Eigen::Index i = 0; i < n; ++i) {
    if (i == b) continue;
    const auto& s = stats[static_cast<std::size_t>(i)];
    const double dist = std::max(std::abs(s.mean - stats[static_cast<std::size_t>(b)].mean), eps);
    const double ti = (s.sd / dist) * (s.sd / dist);
    t(i) = ti;
    if (s.sd > 0.0) best_sum += (ti / s.sd) * (ti / s.sd);
  }
  t(b) = stats[static_cast<std::size_t>(b)].sd * std::sqrt(best_sum);
  return t;
}

namespace {

/// Largest-remainder apportionment of `budget` across nonnegative targets.
std::vector<long long> apportion(const Eigen::VectorXd& targets, long long budget) {
  const auto n = targets.size();
  std::vector<long long> out(static_cast<std::size_t>(n), 0);
  const double total = targets.sum();
  if (budget <= 0) return out;
  if (total <= 0.0) {
    // no information: equal split
    for (Eigen::Index i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = budget / n;
    long long left = budget - (budget / n) * n;
    for (Eigen::Index i = 0; left > 0; ++i, --left) ++out[static_cast<std::size_t>(i)];
    return out;
  }
  std::vector<double> frac(static_cast<std::size_t>(n));
  long long assigned = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double share = static_cast<double>(budget) * targets(i) / total;
    out[static_cast<std::size_t>(i)] = static_cast<long long>(std::floor(share));
    frac[static_cast<std::size_t>(i)] = share - std::floor(share);
    assigned += out[static_cast<std::size_t>(i)];
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index c) {
    return frac[static_cast<std::size_t>(a)] > frac[static_cast<std::size_t>(c)];
  });
  for (std::size_t k = 0; assigned < budget; ++k, ++assigned)
    ++out[static_cast<std::size_t>(order[k % order.size()])];
  return out;
}

}  // namespace

std::vector<long long> ocba_split(const std::vector<PointStats>& stats, long long budget) {
  if (stats.size() < 2) throw std::invalid_argument("ocba_split: needs at least two points");
  if (budget < 0) throw std::invalid_argument("ocba_split: negative budget");
  return apportion(ocba_targets(stats), budget);
}

std::vector<long long> plan_allocation(const std::vector<PointStats>& stats,
                                       const std::vector<int>& counts, int s_n,
                                       long long remaining) {
  if (stats.size() != counts.size())
    throw std::invalid_argument("plan_allocation: stats/counts size mismatch");
  const std::size_t n = counts.size();
  std::vector<long long> deficit(n);
  long long demand = 0;
  for (std::size_t i = 0; i < n; ++i) {
    deficit[i] = std::max(0, s_n - counts[i]);
    demand += deficit[i];
  }
  const long long budget = std::min(demand, std::max<long long>(remaining, 0));
  if (budget == demand) return deficit;  // floors met exactly

  // scarce budget: OCBA proposal, capped at each deficiency, leftover to the
  // largest remaining deficits
  std::vector<long long> out(n, 0);
  if (n >= 2) {
    const auto prop = ocba_split(stats, budget);
    for (std::size_t i = 0; i < n; ++i) out[i] = std::min(prop[i], deficit[i]);
  }
  long long assigned = std::accumulate(out.begin(), out.end(), 0LL);
  while (assigned < budget) {
    std::size_t pick = n;
    long long best_gap = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const long long gap = deficit[i] - out[i];
      if (gap > best_gap) {
        best_gap = gap;
        pick = i;
      }
    }
    if (pick == n) break;
    ++out[pick];
    ++assigned;
  }
  return out;
}

}  // namespace mambo
