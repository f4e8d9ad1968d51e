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

#include <Eigen/Dense>
#include <cmath>
#include <limits>

#include "doctest.h"
#include "mambo/gp.hpp"
#include "oracles.hpp"

using namespace mambo;

namespace {

ReplicatedDataset noiseless_points(const Eigen::MatrixXd& X, const Eigen::VectorXd& y) {
  std::vector<int> counts(static_cast<std::size_t>(X.rows()), 2);
  return ReplicatedDataset(X, y, Eigen::VectorXd::Zero(X.rows()), counts);
}

}  // namespace

TEST_CASE("kernel_eval basics") {
  KernelSpec k;
  k.lengthscale_rates = Eigen::VectorXd::Constant(1, 1.0);
  k.process_variance = 1.0;
  Eigen::VectorXd x(1), y(1);
  x << 0.0;
  y << 1.0;
  CHECK(kernel_eval(k, x, y) == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  CHECK(kernel_eval(k, x, x) == doctest::Approx(1.0));

  KernelSpec k3 = KernelSpec::isotropic(3, 2.5, 4.0);
  Eigen::VectorXd a(3);
  a << 1, 2, 3;
  CHECK(kernel_eval(k3, a, a) == doctest::Approx(4.0));

  RngStream rng(11);
  for (int t = 0; t < 100; ++t) {
    Eigen::VectorXd u(3), v(3);
    for (int j = 0; j < 3; ++j) {
      u(j) = rng.uniform(-2, 2);
      v(j) = rng.uniform(-2, 2);
    }
    const double kv = kernel_eval(k3, u, v);
    CHECK(kv == kernel_eval(k3, v, u));
    CHECK(kv <= k3.process_variance);
  }

  Eigen::VectorXd bad(2);
  CHECK_THROWS_AS(kernel_eval(k3, a, bad), std::invalid_argument);
}

TEST_CASE("kernel matrix agrees with scalar evaluation") {
  RngStream rng(5);
  Eigen::MatrixXd X(7, 3);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 3; ++j) X(i, j) = rng.uniform(-1, 1);
  KernelSpec k;
  k.lengthscale_rates = (Eigen::VectorXd(3) << 0.5, 2.0, 7.0).finished();
  k.process_variance = 1.7;
  const Eigen::MatrixXd K = kernel_matrix(k, X);
  for (int i = 0; i < 7; ++i)
    for (int j = 0; j < 7; ++j)
      CHECK(K(i, j) ==
            doctest::Approx(kernel_eval(k, X.row(i).transpose(), X.row(j).transpose()))
                .epsilon(1e-12));
}

TEST_CASE("single noiseless point interpolates under a diffuse prior") {
  Eigen::MatrixXd X(1, 1);
  X << 0.3;
  Eigen::VectorXd y(1);
  y << 1.7;
  const auto gp = fit_gp(noiseless_points(X, y), KernelSpec::isotropic(1, 1.0, 1.0),
                         MeanPrior::constant(1000.0));
  const auto [mean, var] = posterior_predict(gp, X.row(0).transpose());
  CHECK(std::abs(mean - 1.7) < 1e-6);
  CHECK(var < 1e-6);
}

TEST_CASE("refitting the same dataset is bit-identical") {
  RngStream rng(42);
  const auto data = oracle::random_dataset(12, 2, rng);
  const KernelSpec k = KernelSpec::isotropic(2, 3.0, 1.5);
  const auto a = fit_gp(data, k, MeanPrior::constant());
  const auto b = fit_gp(data, k, MeanPrior::constant());
  CHECK(a.beta_hat() == b.beta_hat());
  Eigen::VectorXd q(2);
  q << 0.4, 0.6;
  CHECK(posterior_predict(a, q).first == posterior_predict(b, q).first);
}

TEST_CASE("predict, cov and evidence match the dense direct-inverse reference") {
  RngStream rng(123);
  for (int inst = 0; inst < 8; ++inst) {
    const int n = 5 + rng.uniform_int(16);
    const auto data = oracle::random_dataset(n, 2, rng);
    KernelSpec k;
    k.lengthscale_rates =
        (Eigen::VectorXd(2) << 1.0 + rng.uniform() * 4, 1.0 + rng.uniform() * 4).finished();
    k.process_variance = 0.5 + rng.uniform();
    const auto gp = fit_gp(data, k, MeanPrior::constant());
    const auto ref = oracle::dense_view(data, k, gp.applied_jitter());

    for (int t = 0; t < 25; ++t) {
      Eigen::VectorXd x(2), z(2);
      x << rng.uniform(), rng.uniform();
      z << rng.uniform(), rng.uniform();
      const auto [m, v] = posterior_predict(gp, x);
      const auto [mr, vr] = ref.predict(x);
      CHECK(std::abs(m - mr) < 1e-8);
      CHECK(std::abs(v - vr) < 1e-8);
      CHECK(std::abs(posterior_cov(gp, x, z) - ref.cov(x, z)) < 1e-8);
      CHECK(posterior_cov(gp, x, z) == doctest::Approx(posterior_cov(gp, z, x)).epsilon(1e-10));
      CHECK(posterior_cov(gp, x, x) == doctest::Approx(posterior_predict(gp, x).second));
    }
    CHECK(std::abs(log_marginal_likelihood(gp) - ref.log_marginal()) < 1e-8);
  }
}

TEST_CASE("cholesky factor reproduces the covariance") {
  RngStream rng(9);
  const auto data = oracle::random_dataset(20, 3, rng);
  const KernelSpec k = KernelSpec::isotropic(3, 2.0, 1.3);
  const auto gp = fit_gp(data, k, MeanPrior::constant());
  const Eigen::MatrixXd L = gp.cholesky_factor();
  Eigen::MatrixXd sigma = kernel_matrix(k, data.points());
  sigma.diagonal() += gp.noise_diag();
  sigma.diagonal().array() += gp.applied_jitter();
  CHECK((L * L.transpose() - sigma).norm() / sigma.norm() < 1e-8);
}

TEST_CASE("evidence is invariant under permutation of the training points") {
  RngStream rng(31);
  const auto data = oracle::random_dataset(10, 2, rng);
  const KernelSpec k = KernelSpec::isotropic(2, 2.0, 1.0);
  const double base = log_marginal_likelihood(fit_gp(data, k, MeanPrior::constant()));
  std::vector<int> perm{7, 3, 9, 0, 5, 1, 8, 2, 6, 4};
  const double shuffled =
      log_marginal_likelihood(fit_gp(data.subset(perm), k, MeanPrior::constant()));
  CHECK(base == doctest::Approx(shuffled).epsilon(1e-9));
}

TEST_CASE("single-point evidence is the univariate gaussian density") {
  Eigen::MatrixXd X(1, 1);
  X << 0.5;
  Eigen::VectorXd y(1);
  y << 0.0;
  Eigen::VectorXd var(1);
  var << 0.08;
  ReplicatedDataset data(X, y, var, {4});
  KernelSpec k = KernelSpec::isotropic(1, 1.0, 2.0);
  const auto gp = fit_gp(data, k, MeanPrior::constant(3.0));
  const double total = 2.0 + 0.08 / 4 + 9.0 + gp.applied_jitter();
  CHECK(log_marginal_likelihood(gp) ==
        doctest::Approx(-0.5 * std::log(2.0 * 3.14159265358979323846 * total)).epsilon(1e-10));
}

TEST_CASE("noiseless fits interpolate every training point") {
  RngStream rng(77);
  Eigen::MatrixXd X(15, 2);
  Eigen::VectorXd y(15);
  for (int i = 0; i < 15; ++i) {
    X(i, 0) = rng.uniform();
    X(i, 1) = rng.uniform();
    y(i) = std::sin(4 * X(i, 0)) + X(i, 1);
  }
  const auto gp =
      fit_gp(noiseless_points(X, y), KernelSpec::isotropic(2, 4.0, 1.0), MeanPrior::constant());
  for (int i = 0; i < 15; ++i) {
    const auto [m, v] = posterior_predict(gp, X.row(i).transpose());
    CHECK(std::abs(m - y(i)) <= 1e-6);
  }
}

TEST_CASE("diffuse prior recovers the GLS coefficient") {
  RngStream rng(55);
  const auto data = oracle::random_dataset(18, 2, rng);
  const KernelSpec k = KernelSpec::isotropic(2, 2.0, 1.0);
  MeanPrior diffuse = MeanPrior::constant();
  diffuse.prior_cov *= 1e6;
  const auto gp = fit_gp(data, k, diffuse);

  Eigen::MatrixXd sigma = kernel_matrix(k, data.points());
  sigma.diagonal() += gp.noise_diag();
  sigma.diagonal().array() += gp.applied_jitter();
  const Eigen::MatrixXd Sinv = sigma.inverse();
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(18);
  const double gls = ones.dot(Sinv * data.sample_means()) / ones.dot(Sinv * ones);
  CHECK(std::abs(gp.beta_hat()(0) - gls) / std::abs(gls) < 1e-4);
}

TEST_CASE("predictive variance is nonnegative everywhere") {
  RngStream rng(2024);
  const auto data = oracle::random_dataset(30, 2, rng);
  const auto gp = fit_gp(data, KernelSpec::isotropic(2, 5.0, 1.0), MeanPrior::constant());
  for (int t = 0; t < 1000; ++t) {
    Eigen::VectorXd x(2);
    x << rng.uniform(-0.5, 1.5), rng.uniform(-0.5, 1.5);
    CHECK(posterior_predict(gp, x).second >= 0.0);
  }
  // no excursion beyond -1e-8 happened on this instance
  CHECK(gp.variance_clamp_warnings() == 0);
}

TEST_CASE("far from the data the prediction falls back to the prior-mean state") {
  RngStream rng(4);
  const auto data = oracle::random_dataset(10, 2, rng);
  const KernelSpec k = KernelSpec::isotropic(2, 50.0, 1.4);
  const auto gp = fit_gp(data, k, MeanPrior::constant());
  Eigen::VectorXd far(2);
  far << 60.0, -55.0;
  const auto [mean, var] = posterior_predict(gp, far);
  const Eigen::VectorXd l = Eigen::VectorXd::Ones(1);
  CHECK(mean == doctest::Approx(l.dot(gp.beta_hat())).epsilon(1e-9));
  const double expected = k.process_variance + (l.transpose() * gp.coefficient_cov() * l)(0);
  CHECK(var == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("fit failures surface as errors naming the matrix") {
  const double inf = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd X(2, 2);
  X << inf, 0.0, inf, 1.0;
  Eigen::VectorXd y(2);
  y << 0.0, 1.0;
  CHECK_THROWS_WITH_AS(
      fit_gp(noiseless_points(X, y), KernelSpec::isotropic(2, 1.0, 1.0), MeanPrior::constant()),
      doctest::Contains("Sigma"), std::runtime_error);

  PosteriorGP unfitted;
  Eigen::VectorXd q(2);
  q << 0, 0;
  CHECK_THROWS_AS(posterior_predict(unfitted, q), std::runtime_error);
  CHECK_THROWS_AS(log_marginal_likelihood(unfitted), std::runtime_error);
}

TEST_CASE("hyperparameter search recovers the generating variance scale") {
  // data drawn from a known GP (rate 5, variance 2) in one dimension
  double sum_log_var = 0.0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    RngStream rng(1000 + s);
    const int n = 40;
    Eigen::MatrixXd X(n, 1);
    for (int i = 0; i < n; ++i) X(i, 0) = rng.uniform(0.0, 3.0);
    KernelSpec truth = KernelSpec::isotropic(1, 5.0, 2.0);
    Eigen::MatrixXd K = kernel_matrix(truth, X);
    K.diagonal().array() += 1e-10;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    Eigen::VectorXd z(n);
    for (int i = 0; i < n; ++i) z(i) = rng.normal();
    const Eigen::VectorXd f = Eigen::MatrixXd(llt.matrixL()) * z;

    ReplicatedDataset data(1);
    for (int i = 0; i < n; ++i) {
      const double reps[2] = {f(i) + 0.05 * rng.normal(), f(i) + 0.05 * rng.normal()};
      data.add_point(X.row(i).transpose(), reps);
    }
    RngStream est_rng(77 + s);
    const auto fit = estimate_hyperparameters(data, HyperBounds{}, 3, est_rng);
    sum_log_var += std::log(fit.kernel.process_variance);
  }
  CHECK(std::abs(sum_log_var / seeds - std::log(2.0)) <= 0.5);
}

TEST_CASE("constant observations drive the variance to its lower bound") {
  RngStream rng(8);
  ReplicatedDataset data(1);
  for (int i = 0; i < 12; ++i) {
    Eigen::VectorXd x(1);
    x << i * 0.1;
    const double reps[4] = {0.5, 0.5, 0.5, 0.5};
    data.add_point(x, reps);
  }
  HyperBounds b;
  b.log_var_lo = std::log(1e-4);
  const auto fit = estimate_hyperparameters(data, b, 2, rng);
  CHECK(std::log(fit.kernel.process_variance) <= b.log_var_lo + 1.0);
}

TEST_CASE("hyperparameter estimation is deterministic under the seed") {
  RngStream base(99);
  const auto data = oracle::random_dataset(15, 2, base);
  RngStream r1(123), r2(123);
  const auto a = estimate_hyperparameters(data, HyperBounds{}, 3, r1);
  const auto b = estimate_hyperparameters(data, HyperBounds{}, 3, r2);
  CHECK(a.kernel.process_variance == b.kernel.process_variance);
  CHECK(a.kernel.lengthscale_rates == b.kernel.lengthscale_rates);
  CHECK(a.log_marginal == b.log_marginal);
  CHECK_THROWS_AS(
      estimate_hyperparameters(oracle::random_dataset(2, 1, base), HyperBounds{}, 2, r1),
      std::invalid_argument);
}
