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

#ifndef MAMBO_PROBLEMS_HPP
#define MAMBO_PROBLEMS_HPP

#include <Eigen/Core>
#include <functional>
#include <string>
#include <vector>

#include "mambo/box.hpp"
#include "mambo/loop.hpp"
#include "mambo/rng.hpp"

namespace mambo {

/// Benchmark objective: an analytic evaluator on its k active coordinates,
/// optionally lifted into a higher-dimensional search box whose inactive
/// coordinates are ignored. The noise standard deviation at x is the
/// Griewank function of the active coordinates (mapped to [-5,5]^k) divided
/// by k, floored at 1e-6.
struct TestProblem {
  std::string name;
  int active_dim = 0;   // k
  int ambient_dim = 0;  // d
  std::vector<int> active_indices;
  Box box;         // the search box (ambient space)
  Box native_box;  // per active dimension
  std::function<double(const Eigen::VectorXd&)> eval_native;  // on the native box
  double f_star = 0.0;
  Eigen::VectorXd x_star_native;
  bool has_optimum = false;

  /// Maps the active coordinates of a search-box point to the native box.
  Eigen::VectorXd to_native(const Eigen::VectorXd& x) const;

  /// Noiseless objective at a search-box point.
  double evaluate(const Eigen::VectorXd& x) const;

  double noise_sd(const Eigen::VectorXd& x) const;

  /// One noisy replication: f(x) + noise_sd(x) * z, z ~ N(0,1).
  double observe(const Eigen::VectorXd& x, RngStream& rng) const;
};

/// Analytic test functions on their native boxes.
/// Names: branin, camel, eggholder, hartman6. Throws on an unknown name.
double eval_testfunc(const std::string& name, const Eigen::VectorXd& u);

double griewank(const Eigen::VectorXd& u);

/// Negated ten-product logit revenue; the optimization objective is -revenue.
double price_revenue(const Eigen::VectorXd& p);

/// |f(x̂*) − f(x*)| on the noiseless objective.
double simple_regret(double best_observed_f, double f_star);

enum class LiftAssignment { first_k, seeded_permutation };

/// Embeds a native problem into d dimensions on the unit box: the k active
/// coordinates map affinely onto the native box, the rest are ignored, and
/// the optimum value is unchanged.
TestProblem lift_to_highdim(const TestProblem& p, int d, LiftAssignment assignment,
                            std::uint64_t seed = 1137);

/// Named registry: branin | camel | eggholder | hartman6 | price10 and their
/// 100-dimensional lifts branin100 | camel100 | eggholder100 | hartman6100 |
/// price100 (seeded-permutation placement, fixed seed).
TestProblem make_test_problem(const std::string& name);

std::vector<std::string> test_problem_names();

/// Adapter to the optimizer's noisy-objective interface.
Problem as_noisy_problem(const TestProblem& p);

struct OracleResult {
  double value = 0.0;
  Eigen::VectorXd argmin;
  int starts = 0;
  std::uint64_t seed = 0;
};

/// Multistart coordinate-search minimizer of a deterministic function over a
/// box; the oracle used to derive and check cached optima.
OracleResult multistart_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Box& box, int starts, RngStream& rng);

}  // namespace mambo

#endif  // MAMBO_PROBLEMS_HPP
