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

#ifndef MAMBO_BOX_HPP
#define MAMBO_BOX_HPP

#include <Eigen/Core>
#include <stdexcept>

namespace mambo {

/// Axis-aligned search box [lo, hi]^d.
struct Box {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  Box() = default;
  Box(Eigen::VectorXd lower, Eigen::VectorXd upper)
      : lo(std::move(lower)), hi(std::move(upper)) {
    if (lo.size() != hi.size()) throw std::invalid_argument("Box: bound sizes differ");
    if ((hi.array() < lo.array()).any()) throw std::invalid_argument("Box: hi < lo");
  }

  static Box unit(int dim) {
    return Box(Eigen::VectorXd::Zero(dim), Eigen::VectorXd::Ones(dim));
  }

  static Box cube(int dim, double lo_v, double hi_v) {
    return Box(Eigen::VectorXd::Constant(dim, lo_v), Eigen::VectorXd::Constant(dim, hi_v));
  }

  int dim() const { return static_cast<int>(lo.size()); }

  bool contains(const Eigen::VectorXd& x, double tol = 0.0) const {
    return x.size() == lo.size() && (x.array() >= lo.array() - tol).all() &&
           (x.array() <= hi.array() + tol).all();
  }

  Eigen::VectorXd clip(const Eigen::VectorXd& x) const {
    return x.cwiseMax(lo).cwiseMin(hi);
  }

  Eigen::VectorXd range() const { return hi - lo; }
};

}  // namespace mambo

#endif  // MAMBO_BOX_HPP
