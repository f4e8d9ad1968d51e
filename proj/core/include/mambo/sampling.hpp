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

#ifndef MAMBO_SAMPLING_HPP
#define MAMBO_SAMPLING_HPP

#include <Eigen/Core>

#include "mambo/box.hpp"
#include "mambo/rng.hpp"

namespace mambo {

/// Latin hypercube sample of n points in the box: one stratum per point per
/// dimension, uniform placement within the stratum. Rows are points.
Eigen::MatrixXd latin_hypercube(int n, const Box& box, RngStream& rng);

/// Best of `draws` Latin hypercube samples by minimum pairwise Euclidean
/// distance (maximin criterion).
Eigen::MatrixXd maximin_latin_hypercube(int n, const Box& box, int draws, RngStream& rng);

}  // namespace mambo

#endif  // MAMBO_SAMPLING_HPP
