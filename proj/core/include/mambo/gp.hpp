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

#ifndef MAMBO_GP_HPP
#define MAMBO_GP_HPP

#include <Eigen/Cholesky>
#include <Eigen/Core>
#include <atomic>
#include <functional>
#include <memory>
#include <utility>

#include "mambo/dataset.hpp"
#include "mambo/kernel.hpp"
#include "mambo/rng.hpp"

namespace mambo {

/// Gaussian prior N(b, Ω) on the coefficients of the linear mean l(x)^T β.
struct MeanPrior {
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> basis;  // l(x)
  Eigen::VectorXd prior_mean;                                    // b
  Eigen::MatrixXd prior_cov;                                     // Ω

  int size() const { return static_cast<int>(prior_mean.size()); }

  /// Constant basis l(x) = (1) with b = 0 and Ω = (prior_sd^2); weakly
  /// informative default.
  static MeanPrior constant(double prior_sd = 10.0);

  void validate() const;
};

struct GpFitOptions {
  double jitter_rel = 1e-10;      // initial diagonal jitter, times σ_F^2
  double jitter_max_rel = 1e-4;   // doubling stops here
  double noise_floor = 1e-6;      // single-replicate fallback when no pooling
};

/// Fitted stochastic GP: kernel + mean prior + replicated data, with the
/// Cholesky factor of (Σ_F + Σ_ξ) and the posterior coefficient state cached.
/// Immutable after fit_gp; predictions are read-only and thread-safe.
class PosteriorGP {
 public:
  PosteriorGP() = default;

  bool fitted() const { return fitted_; }
  const KernelSpec& kernel() const { return kernel_; }
  const MeanPrior& mean_prior() const { return prior_; }
  const ReplicatedDataset& data() const { return data_; }
  const Eigen::VectorXd& noise_diag() const { return noise_diag_; }
  const Eigen::VectorXd& beta_hat() const { return beta_hat_; }
  double applied_jitter() const { return jitter_; }

  /// Lower-triangular factor L with L L^T = Σ_F + Σ_ξ + jitter I.
  Eigen::MatrixXd cholesky_factor() const { return chol_.matrixL(); }

  /// Posterior covariance of the mean coefficients, [Ω^-1 + L Σ^-1 L^T]^-1.
  Eigen::MatrixXd coefficient_cov() const {
    const auto q = beta_hat_.size();
    return coef_llt_.solve(Eigen::MatrixXd::Identity(q, q));
  }

  /// Number of predictive variances clamped to zero from below -1e-8.
  long long variance_clamp_warnings() const { return clamp_warnings_ ? clamp_warnings_->load() : 0; }

  friend PosteriorGP fit_gp(const ReplicatedDataset&, const KernelSpec&, const MeanPrior&,
                            const GpFitOptions&);
  friend std::pair<double, double> posterior_predict(const PosteriorGP&, const Eigen::VectorXd&);
  friend double posterior_cov(const PosteriorGP&, const Eigen::VectorXd&, const Eigen::VectorXd&);
  friend double log_marginal_likelihood(const PosteriorGP&);
  friend Eigen::VectorXd loo_standardized_residuals(const PosteriorGP&);
  friend std::pair<Eigen::VectorXd, Eigen::MatrixXd> posterior_joint(
      const PosteriorGP&, const Eigen::MatrixXd&);

 private:
  KernelSpec kernel_;
  MeanPrior prior_;
  ReplicatedDataset data_;
  Eigen::VectorXd noise_diag_;      // Σ_ξ diagonal
  Eigen::LLT<Eigen::MatrixXd> chol_;
  Eigen::MatrixXd basis_matrix_;    // L = [l(x_1) ... l(x_n)], q x n
  Eigen::VectorXd beta_hat_;        // posterior coefficient mean
  Eigen::LLT<Eigen::MatrixXd> coef_llt_;  // of A = Ω^-1 + L Σ^-1 L^T
  Eigen::VectorXd alpha_;           // Σ^-1 (Ybar - L^T β̂)
  double log_marginal_ = 0.0;
  double jitter_ = 0.0;
  bool fitted_ = false;
  std::shared_ptr<std::atomic<long long>> clamp_warnings_;
};

/// Fits the GP. The noise diagonal is the stochastic-kriging plug-in
/// s^2(x_i)/M(x_i); points with a single replicate borrow the pooled average
/// sample variance of the M >= 2 points, or opts.noise_floor when none exist.
/// Throws std::runtime_error naming the offending matrix if the covariance is
/// not positive definite even at the maximum jitter.
PosteriorGP fit_gp(const ReplicatedDataset& data, const KernelSpec& kernel,
                   const MeanPrior& prior, const GpFitOptions& opts = {});

/// Posterior mean and variance at x. Variance is clamped at zero; excursions
/// below -1e-8 increment the model's warning counter.
std::pair<double, double> posterior_predict(const PosteriorGP& gp, const Eigen::VectorXd& x);

double posterior_cov(const PosteriorGP& gp, const Eigen::VectorXd& x, const Eigen::VectorXd& y);

/// Log density of the sample means under N(L^T b, Σ_F + Σ_ξ + L^T Ω L), i.e.
/// the model evidence with the mean coefficients marginalized out.
double log_marginal_likelihood(const PosteriorGP& gp);

/// Joint posterior (mean vector, covariance matrix) at the rows of Q.
std::pair<Eigen::VectorXd, Eigen::MatrixXd> posterior_joint(const PosteriorGP& gp,
                                                            const Eigen::MatrixXd& Q);

/// Leave-one-out standardized residuals of the marginal Gaussian model, used
/// by the initial-model validity screen.
Eigen::VectorXd loo_standardized_residuals(const PosteriorGP& gp);

/// Optimization box for hyperparameter search, in log space.
struct HyperBounds {
  double log_theta_lo = -9.21034037197618;   // θ ∈ [1e-4, 1e4]
  double log_theta_hi = 9.21034037197618;
  double log_var_lo = -13.815510557964274;   // σ_F^2 ∈ [1e-6, 1e6]
  double log_var_hi = 13.815510557964274;
};

struct HyperFitResult {
  KernelSpec kernel;
  double log_marginal = 0.0;
  bool improved = false;  // false when no search point beat the initial guess
};

/// Maximizes the log marginal likelihood over (θ, σ_F^2) by multi-start
/// compass search in log space. Deterministic given the rng seed.
/// max_evals caps the number of likelihood evaluations (0 = default budget).
HyperFitResult estimate_hyperparameters(const ReplicatedDataset& data, const HyperBounds& bounds,
                                        int restarts, RngStream& rng, int max_evals = 0,
                                        const GpFitOptions& opts = {});

}  // namespace mambo

#endif  // MAMBO_GP_HPP
