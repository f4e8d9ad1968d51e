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

#include "mambo/sampling.hpp"

#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mambo {

Eigen::MatrixXd latin_hypercube(int n, const Box& box, RngStream& rng) {
  if (n < 1) throw std::invalid_argument("latin_hypercube: n must be >= 1");
  const int d = box.dim();
  Eigen::MatrixXd X(n, d);
  std::vector<int> strata(static_cast<std::size_t>(n));
  for (int j = 0; j < d; ++j) {
    std::iota(strata.begin(), strata.end(), 0);
    rng.shuffle(strata);
    for (int i = 0; i < n; ++i) {
      const double u = (static_cast<double>(strata[static_cast<std::size_t>(i)]) + rng.uniform()) /
                       static_cast<double>(n);
      X(i, j) = box.lo(j) + u * (box.hi(j) - box.lo(j));
    }
  }
  return X;
}

Eigen::MatrixXd maximin_latin_hypercube(int n, const Box& box, int draws, RngStream& rng) {
  Eigen::MatrixXd best;
  double best_sep = -1.0;
  for (int k = 0; k < draws; ++k) {
    Eigen::MatrixXd X = latin_hypercube(n, box, rng);
    double sep = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        sep = std::min(sep, (X.row(i) - X.row(j)).squaredNorm());
    if (sep > best_sep) {
      best_sep = sep;
      best = std::move(X);
    }
  }
  return best;
}

}  // namespace mambo
