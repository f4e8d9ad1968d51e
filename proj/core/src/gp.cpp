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

#include "mambo/gp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "mambo/math.hpp"

namespace mambo {

namespace {

constexpr double kNegVarianceTol = -1e-8;
constexpr double kInf = std::numeric_limits<double>::infinity();

Eigen::VectorXd noise_diagonal(const ReplicatedDataset& data, double floor_value) {
  const int n = data.size();
  Eigen::VectorXd v(n);
  // pooled fallback for single-replicate points
  double pooled = 0.0;
  int pooled_n = 0;
  for (int i = 0; i < n; ++i) {
    if (data.replicate_count(i) >= 2) {
      pooled += data.sample_variance(i);
      ++pooled_n;
    }
  }
  pooled = pooled_n > 0 ? pooled / pooled_n : floor_value;
  for (int i = 0; i < n; ++i) {
    const int m = data.replicate_count(i);
    v(i) = m >= 2 ? data.sample_variance(i) / m : pooled;
  }
  return v;
}

Eigen::MatrixXd basis_over(const MeanPrior& prior, const Eigen::MatrixXd& X) {
  const int q = prior.size();
  Eigen::MatrixXd L(q, X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    const Eigen::VectorXd l = prior.basis(X.row(i).transpose());
    if (l.size() != q) throw std::invalid_argument("MeanPrior: basis size != dim(b)");
    L.col(i) = l;
  }
  return L;
}

/// Factorizes M + jitter I, escalating the jitter from rel_lo*scale by
/// doubling up to rel_hi*scale. Throws naming `what` on failure.
Eigen::LLT<Eigen::MatrixXd> robust_llt(Eigen::MatrixXd M, double scale, double rel_lo,
                                       double rel_hi, const char* what, double* used = nullptr) {
  if (!M.allFinite())
    throw std::runtime_error(std::string("matrix not positive definite at maximum jitter: ") +
                             what);
  double jitter = rel_lo * scale;
  const double max_jitter = rel_hi * scale;
  Eigen::MatrixXd work = M;
  while (true) {
    work = M;
    work.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(work);
    if (llt.info() == Eigen::Success) {
      if (used) *used = jitter;
      return llt;
    }
    if (jitter >= max_jitter) break;
    jitter = std::min(2.0 * jitter, max_jitter);
  }
  throw std::runtime_error(std::string("matrix not positive definite at maximum jitter: ") + what);
}

double gaussian_log_density(const Eigen::LLT<Eigen::MatrixXd>& llt, const Eigen::VectorXd& r) {
  const Eigen::VectorXd s = llt.solve(r);
  double logdet = 0.0;
  const auto& Lm = llt.matrixLLT();
  for (Eigen::Index i = 0; i < Lm.rows(); ++i) logdet += std::log(Lm(i, i));
  return -0.5 * (r.dot(s) + static_cast<double>(r.size()) * std::log(2.0 * kPi)) - logdet;
}

}  // namespace

MeanPrior MeanPrior::constant(double prior_sd) {
  MeanPrior p;
  p.basis = [](const Eigen::VectorXd&) { return Eigen::VectorXd::Ones(1); };
  p.prior_mean = Eigen::VectorXd::Zero(1);
  p.prior_cov = Eigen::MatrixXd::Constant(1, 1, prior_sd * prior_sd);
  return p;
}

void MeanPrior::validate() const {
  if (!basis) throw std::invalid_argument("MeanPrior: no basis function");
  if (prior_cov.rows() != prior_cov.cols() || prior_cov.rows() != prior_mean.size())
    throw std::invalid_argument("MeanPrior: dimension mismatch between b and Omega");
  Eigen::LLT<Eigen::MatrixXd> llt(prior_cov);
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("MeanPrior: Omega not positive definite");
}

PosteriorGP fit_gp(const ReplicatedDataset& data, const KernelSpec& kernel, const MeanPrior& prior,
                   const GpFitOptions& opts) {
  if (data.empty()) throw std::invalid_argument("fit_gp: empty dataset");
  if (kernel.dim() != data.dim()) throw std::invalid_argument("fit_gp: kernel dimension mismatch");
  kernel.validate();
  prior.validate();

  PosteriorGP gp;
  gp.kernel_ = kernel;
  gp.prior_ = prior;
  gp.data_ = data;
  gp.noise_diag_ = noise_diagonal(data, opts.noise_floor);
  gp.basis_matrix_ = basis_over(prior, data.points());
  gp.clamp_warnings_ = std::make_shared<std::atomic<long long>>(0);

  Eigen::MatrixXd sigma = kernel_matrix(kernel, data.points());
  sigma.diagonal() += gp.noise_diag_;
  gp.chol_ = robust_llt(sigma, kernel.process_variance, opts.jitter_rel, opts.jitter_max_rel,
                        "Sigma_F + Sigma_xi", &gp.jitter_);

  const Eigen::MatrixXd& L = gp.basis_matrix_;
  const int q = prior.size();
  const Eigen::MatrixXd omega_inv =
      Eigen::LLT<Eigen::MatrixXd>(prior.prior_cov).solve(Eigen::MatrixXd::Identity(q, q));
  const Eigen::MatrixXd sigma_inv_Lt = gp.chol_.solve(L.transpose());  // n x q
  Eigen::MatrixXd A = omega_inv + L * sigma_inv_Lt;
  gp.coef_llt_ = robust_llt(A, A.diagonal().maxCoeff(), 0.0, 1e-8,
                            "Omega^-1 + L Sigma^-1 L^T", nullptr);
  const Eigen::VectorXd ybar = data.sample_means();
  gp.beta_hat_ = gp.coef_llt_.solve(omega_inv * prior.prior_mean + L * gp.chol_.solve(ybar));
  gp.alpha_ = gp.chol_.solve(ybar - L.transpose() * gp.beta_hat_);

  // marginal evidence of the sample means with the coefficients integrated out
  Eigen::MatrixXd G = sigma + L.transpose() * prior.prior_cov * L;
  const auto marg =
      robust_llt(G, kernel.process_variance, opts.jitter_rel, opts.jitter_max_rel,
                 "Sigma_F + Sigma_xi + L^T Omega L", nullptr);
  gp.log_marginal_ = gaussian_log_density(marg, ybar - L.transpose() * prior.prior_mean);

  gp.fitted_ = true;
  return gp;
}

std::pair<double, double> posterior_predict(const PosteriorGP& gp, const Eigen::VectorXd& x) {
  if (!gp.fitted_) throw std::runtime_error("posterior_predict: model not fitted");
  if (x.size() != gp.data_.dim())
    throw std::invalid_argument("posterior_predict: dimension mismatch");
  const Eigen::VectorXd kx = kernel_vector(gp.kernel_, gp.data_.points(), x);
  const Eigen::VectorXd lx = gp.prior_.basis(x);
  const double mean = lx.dot(gp.beta_hat_) + kx.dot(gp.alpha_);
  const Eigen::VectorXd w = gp.chol_.solve(kx);
  const Eigen::VectorXd u = lx - gp.basis_matrix_ * w;
  double var = gp.kernel_.process_variance - kx.dot(w) + u.dot(gp.coef_llt_.solve(u));
  if (var < 0.0) {
    if (var < kNegVarianceTol && gp.clamp_warnings_) ++(*gp.clamp_warnings_);
    var = 0.0;
  }
  return {mean, var};
}

double posterior_cov(const PosteriorGP& gp, const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (!gp.fitted_) throw std::runtime_error("posterior_cov: model not fitted");
  if (x.size() != gp.data_.dim() || y.size() != gp.data_.dim())
    throw std::invalid_argument("posterior_cov: dimension mismatch");
  if (x == y) return posterior_predict(gp, x).second;
  const Eigen::VectorXd kx = kernel_vector(gp.kernel_, gp.data_.points(), x);
  const Eigen::VectorXd ky = kernel_vector(gp.kernel_, gp.data_.points(), y);
  const Eigen::VectorXd wy = gp.chol_.solve(ky);
  const Eigen::VectorXd ux = gp.prior_.basis(x) - gp.basis_matrix_ * gp.chol_.solve(kx);
  const Eigen::VectorXd uy = gp.prior_.basis(y) - gp.basis_matrix_ * wy;
  return kernel_eval(gp.kernel_, x, y) - kx.dot(wy) + ux.dot(gp.coef_llt_.solve(uy));
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> posterior_joint(const PosteriorGP& gp,
                                                            const Eigen::MatrixXd& Q) {
  if (!gp.fitted_) throw std::runtime_error("posterior_joint: model not fitted");
  if (Q.cols() != gp.data_.dim())
    throw std::invalid_argument("posterior_joint: dimension mismatch");
  const Eigen::MatrixXd Kc = kernel_cross(gp.kernel_, gp.data_.points(), Q);  // n x C
  const Eigen::MatrixXd W = gp.chol_.solve(Kc);
  const Eigen::MatrixXd Lq = basis_over(gp.prior_, Q);                        // q x C
  const Eigen::MatrixXd U = Lq - gp.basis_matrix_ * W;
  const Eigen::VectorXd means =
      Lq.transpose() * gp.beta_hat_ + Kc.transpose() * gp.alpha_;
  Eigen::MatrixXd cov = kernel_cross(gp.kernel_, Q, Q) - Kc.transpose() * W +
                        U.transpose() * gp.coef_llt_.solve(U);
  return {means, cov};
}

double log_marginal_likelihood(const PosteriorGP& gp) {
  if (!gp.fitted_) throw std::runtime_error("log_marginal_likelihood: model not fitted");
  return gp.log_marginal_;
}

Eigen::VectorXd loo_standardized_residuals(const PosteriorGP& gp) {
  if (!gp.fitted_) throw std::runtime_error("loo_standardized_residuals: model not fitted");
  const Eigen::MatrixXd& L = gp.basis_matrix_;
  Eigen::MatrixXd G = kernel_matrix(gp.kernel_, gp.data_.points());
  G.diagonal() += gp.noise_diag_;
  G.diagonal().array() += gp.jitter_;
  G += L.transpose() * gp.prior_.prior_cov * L;
  const int n = gp.data_.size();
  const Eigen::MatrixXd Ginv =
      Eigen::LLT<Eigen::MatrixXd>(G).solve(Eigen::MatrixXd::Identity(n, n));
  const Eigen::VectorXd r = gp.data_.sample_means() - L.transpose() * gp.prior_.prior_mean;
  const Eigen::VectorXd gr = Ginv * r;
  Eigen::VectorXd out(n);
  for (int i = 0; i < n; ++i) out(i) = gr(i) / std::sqrt(std::max(Ginv(i, i), 1e-300));
  return out;
}

// ---------------------------------------------------------------------------
// Hyperparameter estimation
// ---------------------------------------------------------------------------

namespace {

/// Evaluates the marginal likelihood as a function of (θ, σ_F²) with the data
/// geometry, noise and mean-prior contribution precomputed. Coordinate moves
/// update the weighted distance matrix incrementally.
class MarginalObjective {
 public:
  MarginalObjective(const ReplicatedDataset& data, const MeanPrior& prior,
                    const GpFitOptions& opts)
      : n_(data.size()),
        d_(data.dim()),
        noise_(noise_diagonal(data, opts.noise_floor)),
        jitter_rel_(opts.jitter_rel) {
    const Eigen::MatrixXd& X = data.points();
    const Eigen::MatrixXd L = basis_over(prior, X);
    prior_part_ = L.transpose() * prior.prior_cov * L;
    resid_ = data.sample_means() - L.transpose() * prior.prior_mean;
    cache_dims_ = static_cast<long long>(n_) * n_ * d_ <= 50'000'000;
    if (cache_dims_) {
      dim_sq_.reserve(static_cast<std::size_t>(d_));
      for (int j = 0; j < d_; ++j) {
        const Eigen::VectorXd c = X.col(j);
        Eigen::MatrixXd D = c.replicate(1, n_) - c.transpose().replicate(n_, 1);
        dim_sq_.push_back(D.cwiseProduct(D));
      }
    } else {
      points_ = X;
    }
  }

  int dim() const { return d_; }
  long long evals() const { return evals_; }

  /// log marginal likelihood at the given log parameters (-inf if the
  /// factorization fails; the final fit applies the full jitter escalation).
  double operator()(const Eigen::VectorXd& log_params) {
    ++evals_;
    const Eigen::VectorXd theta = log_params.head(d_).array().exp();
    const double var = std::exp(log_params(d_));
    Eigen::MatrixXd D;
    if (cache_dims_) {
      D = theta(0) * dim_sq_[0];
      for (int j = 1; j < d_; ++j) D += theta(j) * dim_sq_[static_cast<std::size_t>(j)];
    } else {
      const Eigen::VectorXd w = theta.cwiseSqrt();
      const Eigen::MatrixXd Xs = points_ * w.asDiagonal();
      const Eigen::VectorXd sn = Xs.rowwise().squaredNorm();
      D = (-2.0 * Xs * Xs.transpose());
      D.colwise() += sn;
      D.rowwise() += sn.transpose();
      D = D.cwiseMax(0.0);
    }
    Eigen::MatrixXd G = var * (-D.array()).exp().matrix();
    G.diagonal() += noise_;
    G.diagonal().array() += jitter_rel_ * var;
    G += prior_part_;
    Eigen::LLT<Eigen::MatrixXd> llt(std::move(G));
    if (llt.info() != Eigen::Success) return -kInf;
    return gaussian_log_density(llt, resid_);
  }

 private:
  int n_, d_;
  Eigen::VectorXd noise_;
  double jitter_rel_;
  Eigen::MatrixXd prior_part_;
  Eigen::VectorXd resid_;
  bool cache_dims_ = false;
  std::vector<Eigen::MatrixXd> dim_sq_;
  Eigen::MatrixXd points_;
  long long evals_ = 0;
};

struct SearchState {
  Eigen::VectorXd p;
  double value = -kInf;
};

Eigen::VectorXd clamp_params(Eigen::VectorXd p, const HyperBounds& b) {
  const int d = static_cast<int>(p.size()) - 1;
  for (int j = 0; j < d; ++j) p(j) = std::clamp(p(j), b.log_theta_lo, b.log_theta_hi);
  p(d) = std::clamp(p(d), b.log_var_lo, b.log_var_hi);
  return p;
}

/// Compass search over the common log-θ shift and log σ², then coordinate
/// sweeps over every log parameter. Evaluation-budgeted.
void local_search(MarginalObjective& obj, const HyperBounds& bounds, SearchState& s,
                  long long eval_budget) {
  const int d = obj.dim();
  const long long start_evals = obj.evals();
  auto left = [&] { return eval_budget - (obj.evals() - start_evals); };

  // stage A: shared scale and variance
  double step = 1.0;
  const long long stage_a = std::max<long long>(10, (2 * eval_budget) / 5);
  while (step > 1e-3 && (obj.evals() - start_evals) < stage_a) {
    SearchState best = s;
    for (int dir = 0; dir < 4 && left() > 0; ++dir) {
      Eigen::VectorXd p = s.p;
      const double delta = (dir % 2 == 0) ? step : -step;
      if (dir < 2)
        p.head(d).array() += delta;  // shared θ shift
      else
        p(d) += delta;
      p = clamp_params(std::move(p), bounds);
      const double v = obj(p);
      if (v > best.value) best = {std::move(p), v};
    }
    if (best.value > s.value)
      s = std::move(best);
    else
      step *= 0.5;
  }

  // stage B: per-coordinate sweeps
  step = 0.6;
  while (step > 1e-3 && left() > 0) {
    bool any = false;
    for (int j = 0; j <= d && left() > 0; ++j) {
      for (double delta : {step, -step}) {
        Eigen::VectorXd p = s.p;
        p(j) += delta;
        p = clamp_params(std::move(p), bounds);
        const double v = obj(p);
        if (v > s.value) {
          s = {std::move(p), v};
          any = true;
          break;
        }
        if (left() <= 0) break;
      }
    }
    if (!any) step *= 0.5;
  }
}

}  // namespace

HyperFitResult estimate_hyperparameters(const ReplicatedDataset& data, const HyperBounds& bounds,
                                        int restarts, RngStream& rng, int max_evals,
                                        const GpFitOptions& opts) {
  if (data.size() < 3) throw std::invalid_argument("estimate_hyperparameters: needs n >= 3");
  if (restarts < 1) throw std::invalid_argument("estimate_hyperparameters: restarts >= 1");
  const int d = data.dim();
  const MeanPrior prior = MeanPrior::constant();
  MarginalObjective obj(data, prior, opts);
  const long long budget = max_evals > 0 ? max_evals : 1200;

  // heuristic start: rate 1/(d * column variance), variance of the means
  Eigen::VectorXd p0(d + 1);
  const Eigen::MatrixXd& X = data.points();
  for (int j = 0; j < d; ++j) {
    const double centered =
        (X.col(j).array() - X.col(j).mean()).square().sum() / std::max(1, data.size() - 1);
    p0(j) = -std::log(std::max(centered * d, 1e-12));
  }
  const Eigen::VectorXd& mu = data.sample_means();
  const double var_mu =
      data.size() > 1 ? (mu.array() - mu.mean()).square().sum() / (data.size() - 1) : 1.0;
  p0(d) = std::log(std::max(var_mu, 1e-8));
  p0 = clamp_params(std::move(p0), bounds);

  SearchState global{p0, obj(p0)};
  const double initial_value = global.value;

  for (int r = 0; r < restarts; ++r) {
    SearchState s;
    if (r == 0) {
      s = {p0, initial_value};
    } else {
      Eigen::VectorXd p(d + 1);
      const double shared = rng.uniform(bounds.log_theta_lo, bounds.log_theta_hi);
      for (int j = 0; j < d; ++j) p(j) = shared + rng.uniform(-0.5, 0.5);
      p(d) = rng.uniform(std::max(bounds.log_var_lo, p0(d) - 3.0),
                         std::min(bounds.log_var_hi, p0(d) + 3.0));
      p = clamp_params(std::move(p), bounds);
      s = {p, obj(p)};
    }
    local_search(obj, bounds, s, std::max<long long>(30, budget / restarts));
    if (s.value > global.value) global = std::move(s);
  }

  HyperFitResult out;
  out.kernel.lengthscale_rates = global.p.head(d).array().exp();
  out.kernel.process_variance = std::exp(global.p(d));
  out.log_marginal = global.value;
  out.improved = global.value > initial_value;
  return out;
}

}  // namespace mambo
