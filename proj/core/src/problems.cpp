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

#include "mambo/problems.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "mambo/math.hpp"
#include "mambo/sampling.hpp"

namespace mambo {

namespace {

double branin_fn(const Eigen::VectorXd& u) {
  const double x1 = u(0), x2 = u(1);
  const double a = 1.0, b = 5.1 / (4.0 * kPi * kPi), c = 5.0 / kPi, r = 6.0, s = 10.0,
               t = 1.0 / (8.0 * kPi);
  const double q = x2 - b * x1 * x1 + c * x1 - r;
  return a * q * q + s * (1.0 - t) * std::cos(x1) + s;
}

double camel_fn(const Eigen::VectorXd& u) {
  const double x1 = u(0), x2 = u(1);
  return (4.0 - 2.1 * x1 * x1 + x1 * x1 * x1 * x1 / 3.0) * x1 * x1 + x1 * x2 +
         (-4.0 + 4.0 * x2 * x2) * x2 * x2;
}

double eggholder_fn(const Eigen::VectorXd& u) {
  const double x1 = u(0), x2 = u(1);
  return -(x2 + 47.0) * std::sin(std::sqrt(std::abs(x2 + x1 / 2.0 + 47.0))) -
         x1 * std::sin(std::sqrt(std::abs(x1 - (x2 + 47.0))));
}

// standard 4-term, 6-dimensional parameterization on [0,1]^6
const double kHartAlpha[4] = {1.0, 1.2, 3.0, 3.2};
const double kHartA[4][6] = {{10, 3, 17, 3.5, 1.7, 8},
                             {0.05, 10, 17, 0.1, 8, 14},
                             {3, 3.5, 1.7, 10, 17, 8},
                             {17, 8, 0.05, 10, 0.1, 14}};
const double kHartP[4][6] = {{0.1312, 0.1696, 0.5569, 0.0124, 0.8283, 0.5886},
                             {0.2329, 0.4135, 0.8307, 0.3736, 0.1004, 0.9991},
                             {0.2348, 0.1451, 0.3522, 0.2883, 0.3047, 0.6650},
                             {0.4047, 0.8828, 0.8732, 0.5743, 0.1091, 0.0381}};

double hartman6_fn(const Eigen::VectorXd& u) {
  double v = 0.0;
  for (int i = 0; i < 4; ++i) {
    double e = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double d = u(j) - kHartP[i][j];
      e += kHartA[i][j] * d * d;
    }
    v -= kHartAlpha[i] * std::exp(-e);
  }
  return v;
}

const double kPriceA[10] = {4.42, 2.06, -5.32, 0.61, -4.41, 1.90, -5.96, -6.41, -1.82, 3.60};
const double kPriceB[10] = {0.0010, 0.0024, 0.0023, 0.0057, 0.0065,
                            0.0021, 0.0080, 0.0056, 0.0064, 0.0087};

// Frozen oracle constants (multistart_minimize; regenerate with `oracle`).
constexpr double kBraninMin = 0.39788735772973816;
constexpr double kCamelMin = -1.0316284534898774;
constexpr double kEggholderMin = -959.6406627208506;
constexpr double kHartman6Min = -3.322368011415515;
constexpr double kPrice10Min = -2505.2289489;
constexpr std::uint64_t kLiftSeed = 1137;

}  // namespace

double eval_testfunc(const std::string& name, const Eigen::VectorXd& u) {
  auto need = [&](int k) {
    if (u.size() != k) throw std::invalid_argument("eval_testfunc: " + name + " expects dim " +
                                                   std::to_string(k));
  };
  if (name == "branin") {
    need(2);
    return branin_fn(u);
  }
  if (name == "camel") {
    need(2);
    return camel_fn(u);
  }
  if (name == "eggholder") {
    need(2);
    return eggholder_fn(u);
  }
  if (name == "hartman6") {
    need(6);
    return hartman6_fn(u);
  }
  throw std::invalid_argument("eval_testfunc: unknown function '" + name + "'");
}

double griewank(const Eigen::VectorXd& u) {
  double s = 0.0, p = 1.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    s += u(i) * u(i) / 4000.0;
    p *= std::cos(u(i) / std::sqrt(static_cast<double>(i + 1)));
  }
  return 1.0 + s - p;
}

double price_revenue(const Eigen::VectorXd& p) {
  if (p.size() != 10) throw std::invalid_argument("price_revenue: expects 10 prices");
  double denom = 1.0, num = 0.0;
  for (int i = 0; i < 10; ++i) denom += std::exp(kPriceA[i] - kPriceB[i] * p(i));
  for (int i = 0; i < 10; ++i) num += p(i) * std::exp(kPriceA[i] - kPriceB[i] * p(i));
  return -num / denom;
}

double simple_regret(double best_observed_f, double f_star) {
  return std::abs(best_observed_f - f_star);
}

Eigen::VectorXd TestProblem::to_native(const Eigen::VectorXd& x) const {
  Eigen::VectorXd u(active_dim);
  for (int j = 0; j < active_dim; ++j) {
    const int idx = active_indices[static_cast<std::size_t>(j)];
    const double t = (x(idx) - box.lo(idx)) / (box.hi(idx) - box.lo(idx));
    u(j) = native_box.lo(j) + t * (native_box.hi(j) - native_box.lo(j));
  }
  return u;
}

double TestProblem::evaluate(const Eigen::VectorXd& x) const {
  if (x.size() != ambient_dim) throw std::invalid_argument("TestProblem: dimension mismatch");
  return eval_native(to_native(x));
}

double TestProblem::noise_sd(const Eigen::VectorXd& x) const {
  Eigen::VectorXd g(active_dim);
  for (int j = 0; j < active_dim; ++j) {
    const int idx = active_indices[static_cast<std::size_t>(j)];
    const double t = (x(idx) - box.lo(idx)) / (box.hi(idx) - box.lo(idx));
    g(j) = -5.0 + 10.0 * t;
  }
  return std::max(griewank(g) / active_dim, 1e-6);
}

double TestProblem::observe(const Eigen::VectorXd& x, RngStream& rng) const {
  return evaluate(x) + noise_sd(x) * rng.normal();
}

namespace {

TestProblem native_problem(const std::string& name) {
  TestProblem p;
  p.name = name;
  if (name == "branin") {
    p.active_dim = 2;
    p.native_box = Box({Eigen::Vector2d(-5.0, 0.0)}, {Eigen::Vector2d(10.0, 15.0)});
    p.eval_native = branin_fn;
    p.f_star = kBraninMin;
    p.x_star_native = Eigen::Vector2d(kPi, 2.275);
    p.has_optimum = true;
  } else if (name == "camel") {
    p.active_dim = 2;
    p.native_box = Box({Eigen::Vector2d(-3.0, -2.0)}, {Eigen::Vector2d(3.0, 2.0)});
    p.eval_native = camel_fn;
    p.f_star = kCamelMin;
    p.x_star_native = Eigen::Vector2d(0.0898420131, -0.7126564032);
    p.has_optimum = true;
  } else if (name == "eggholder") {
    p.active_dim = 2;
    p.native_box = Box::cube(2, -512.0, 512.0);
    p.eval_native = eggholder_fn;
    p.f_star = kEggholderMin;
    p.x_star_native = Eigen::Vector2d(512.0, 404.2318801);
    p.has_optimum = true;
  } else if (name == "hartman6") {
    p.active_dim = 6;
    p.native_box = Box::unit(6);
    p.eval_native = hartman6_fn;
    p.f_star = kHartman6Min;
    p.x_star_native = (Eigen::VectorXd(6) << 0.20168951, 0.15001069, 0.47687398, 0.27533243,
                       0.31165162, 0.65730054)
                          .finished();
    p.has_optimum = true;
  } else if (name == "price10") {
    p.active_dim = 10;
    p.native_box = Box::cube(10, 0.0, 4000.0);
    p.eval_native = price_revenue;
    p.f_star = kPrice10Min;
    p.has_optimum = true;
  } else {
    throw std::invalid_argument("unknown test problem '" + name + "'");
  }
  p.ambient_dim = p.active_dim;
  p.active_indices.resize(static_cast<std::size_t>(p.active_dim));
  std::iota(p.active_indices.begin(), p.active_indices.end(), 0);
  p.box = p.native_box;
  return p;
}

}  // namespace

TestProblem lift_to_highdim(const TestProblem& p, int d, LiftAssignment assignment,
                            std::uint64_t seed) {
  if (d < p.active_dim) throw std::invalid_argument("lift_to_highdim: d below the active dim");
  TestProblem out = p;
  out.ambient_dim = d;
  out.box = Box::unit(d);
  out.active_indices.resize(static_cast<std::size_t>(p.active_dim));
  if (assignment == LiftAssignment::first_k) {
    std::iota(out.active_indices.begin(), out.active_indices.end(), 0);
  } else {
    std::vector<int> perm(static_cast<std::size_t>(d));
    std::iota(perm.begin(), perm.end(), 0);
    RngStream rng(seed);
    rng.shuffle(perm);
    for (int j = 0; j < p.active_dim; ++j)
      out.active_indices[static_cast<std::size_t>(j)] = perm[static_cast<std::size_t>(j)];
  }
  return out;
}

TestProblem make_test_problem(const std::string& name) {
  const std::string suffix = "100";
  if (name.size() > suffix.size() &&
      name.compare(name.size() - suffix.size(), suffix.size(), suffix) == 0 &&
      name != "price10") {
    const std::string base = name.substr(0, name.size() - suffix.size());
    TestProblem p = lift_to_highdim(native_problem(base), 100,
                                    LiftAssignment::seeded_permutation, kLiftSeed);
    p.name = name;
    return p;
  }
  return native_problem(name);
}

std::vector<std::string> test_problem_names() {
  return {"branin",   "camel",   "eggholder",   "hartman6",    "price10",
          "branin100", "camel100", "eggholder100", "hartman6100", "price100"};
}

Problem as_noisy_problem(const TestProblem& p) {
  Problem out;
  out.dim = p.ambient_dim;
  out.box = p.box;
  out.concurrent_safe = true;
  out.observe = [p](const Eigen::VectorXd& x, RngStream& rng) { return p.observe(x, rng); };
  return out;
}

OracleResult multistart_minimize(const std::function<double(const Eigen::VectorXd&)>& f,
                                 const Box& box, int starts, RngStream& rng) {
  if (starts < 1) throw std::invalid_argument("multistart_minimize: starts must be >= 1");
  OracleResult best;
  best.value = std::numeric_limits<double>::infinity();
  best.starts = starts;
  best.seed = rng.seed();
  const Eigen::MatrixXd inits = latin_hypercube(starts, box, rng);
  const Eigen::VectorXd range = box.range();
  for (int s = 0; s < starts; ++s) {
    Eigen::VectorXd x = inits.row(s).transpose();
    double fx = f(x);
    double step = 0.1;
    while (step > 1e-10) {
      bool moved = false;
      for (int j = 0; j < box.dim(); ++j) {
        for (double dir : {1.0, -1.0}) {
          Eigen::VectorXd y = x;
          y(j) = std::clamp(y(j) + dir * step * range(j), box.lo(j), box.hi(j));
          const double fy = f(y);
          if (fy < fx) {
            x = std::move(y);
            fx = fy;
            moved = true;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    if (fx < best.value) {
      best.value = fx;
      best.argmin = x;
    }
  }
  return best;
}

}  // namespace mambo
