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

#include "mambo/aggregate.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "mambo/math.hpp"

namespace mambo {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

int DimPolicy::sample(int d, int n_i, RngStream& rng) const {
  switch (kind) {
    case Kind::full:
      return d;
    case Kind::fixed:
      return std::clamp(fixed_dim, 1, d);
    case Kind::random_range: {
      const int lo = (d + 9) / 10;
      const int hi = std::min((d + 1) / 2, n_i - 2);
      if (hi < 1) return 1;
      if (hi <= lo) return std::min(hi, d);
      return lo + rng.uniform_int(hi - lo + 1);
    }
  }
  return 1;
}

int auto_num_submodels(int n) {
  const int m = std::clamp((n + 49) / 50, 2, 10);
  return std::min(m, n);
}

std::vector<std::vector<int>> partition(int n, int m, RngStream& rng) {
  if (m < 1) throw std::invalid_argument("partition: m must be >= 1");
  if (m > n) throw std::invalid_argument("partition: m exceeds n");
  std::vector<int> idx(static_cast<std::size_t>(n));
  std::iota(idx.begin(), idx.end(), 0);
  rng.shuffle(idx);
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(m));
  for (int i = 0; i < n; ++i) groups[static_cast<std::size_t>(i % m)].push_back(idx[static_cast<std::size_t>(i)]);
  return groups;
}

double model_prior(int n_i, int n, int d_i, int d, double eta) {
  if (n_i < 1 || n_i > n || d_i < 1 || d_i > d)
    throw std::invalid_argument("model_prior: invalid sizes");
  const double ns = static_cast<double>(n_i) / n;
  const double ds = static_cast<double>(d_i) / d;
  return ns * ns * std::pow(ds, eta);
}

namespace {

Eigen::VectorXd weights_from(const std::vector<double>& log_evidence,
                             const std::vector<double>& prior) {
  const auto m = log_evidence.size();
  std::vector<double> lw(m);
  for (std::size_t i = 0; i < m; ++i) lw[i] = log_evidence[i] + std::log(prior[i]);
  const double lse = log_sum_exp(lw);
  if (!std::isfinite(lse)) throw std::runtime_error("bayes_weights: all evidences are -inf");
  Eigen::VectorXd w(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) w(static_cast<Eigen::Index>(i)) = std::exp(lw[i] - lse);
  w /= w.sum();
  return w;
}

}  // namespace

Eigen::VectorXd bayes_weights(const std::vector<Submodel>& submodels, double eta) {
  if (submodels.empty()) throw std::invalid_argument("bayes_weights: no submodels");
  int n = 0, d = 0;
  for (const auto& s : submodels) {
    n += s.n_i;
    d = std::max(d, s.embedding.source_dim());
  }
  std::vector<double> le, pr;
  for (const auto& s : submodels) {
    le.push_back(s.log_evidence);
    pr.push_back(model_prior(s.n_i, n, s.d_i, d, eta));
  }
  return weights_from(le, pr);
}

namespace {

struct FitContext {
  const ReplicatedDataset* data;
  const AggregateOptions* opts;
  int n;
  int d;
};

/// Fits one submodel on its subset; throws on fit failure (caller drops it).
Submodel fit_submodel(const FitContext& ctx, std::vector<int> subset, RngStream rng,
                      long long hyper_evals) {
  Submodel sm;
  sm.subset_indices = std::move(subset);
  sm.n_i = static_cast<int>(sm.subset_indices.size());
  const AggregateOptions& o = *ctx.opts;

  const ReplicatedDataset sub = ctx.data->subset(sm.subset_indices);
  if (o.embedding == EmbeddingKind::identity || o.dim_policy.kind == DimPolicy::Kind::full) {
    sm.embedding = Embedding::identity(ctx.d);
  } else if (o.embedding == EmbeddingKind::pca) {
    const int want = o.dim_policy.sample(ctx.d, sm.n_i, rng);
    const int cap = std::max(1, std::min<int>(sm.n_i - 1, ctx.d));
    sm.embedding = pca_embedding(sub.points(), std::min(want, cap));
  } else {
    sm.embedding = gaussian_embedding(ctx.d, o.dim_policy.sample(ctx.d, sm.n_i, rng), rng);
  }
  sm.d_i = sm.embedding.target_dim();

  const ReplicatedDataset proj = sub.with_points(project_rows(sm.embedding, sub.points()));
  const MeanPrior prior = MeanPrior::constant(o.mean_prior_sd);

  KernelSpec kernel;
  double max_loglik;
  if (o.fixed_kernel) {
    kernel = *o.fixed_kernel;
    if (kernel.dim() != sm.d_i)
      throw std::invalid_argument("build_aggregated_model: fixed kernel dimension mismatch");
    sm.gp = fit_gp(proj, kernel, prior, o.fit);
    max_loglik = log_marginal_likelihood(sm.gp);
  } else if (proj.size() < 3) {
    // too little data to estimate; heuristic rates
    kernel = KernelSpec::isotropic(sm.d_i, 1.0, std::max(1e-8, proj.sample_variances().mean() + 1.0));
    sm.gp = fit_gp(proj, kernel, prior, o.fit);
    max_loglik = log_marginal_likelihood(sm.gp);
  } else {
    const auto est = estimate_hyperparameters(proj, o.bounds, o.hyper_restarts, rng,
                                              static_cast<int>(hyper_evals), o.fit);
    kernel = est.kernel;
    sm.gp = fit_gp(proj, kernel, prior, o.fit);
    max_loglik = est.log_marginal;
  }
  // BIC approximation with p_i = d_i + 1 free kernel parameters
  sm.log_evidence = max_loglik - 0.5 * (sm.d_i + 1) * std::log(static_cast<double>(sm.n_i));
  return sm;
}

long long hyper_eval_budget(const AggregateOptions& o, int m, int n_i) {
  if (o.fit_flop_budget <= 0.0) return 0;  // estimator default
  const double n = n_i;
  const double cost_per_eval = n * n * n / 3.0 + 2.0 * n * n + 50.0;
  const double evals = o.fit_flop_budget / (static_cast<double>(m) * cost_per_eval);
  return std::llround(std::clamp(evals, 200.0, 3000.0));
}

}  // namespace

AggregatedModel build_aggregated_model(const ReplicatedDataset& data, const AggregateOptions& opts,
                                       RngStream& rng) {
  const int n = data.size();
  if (n < 1) throw std::invalid_argument("build_aggregated_model: empty dataset");
  const int m = opts.num_submodels > 0 ? opts.num_submodels : auto_num_submodels(n);
  if (m > n) throw std::invalid_argument("build_aggregated_model: m exceeds n");

  AggregatedModel model;
  model.eta = opts.eta;
  model.input_dim = data.dim();

  auto groups = partition(n, m, rng);
  FitContext ctx{&data, &opts, n, data.dim()};

  std::vector<Submodel> fitted;
  std::exception_ptr failure;
  if (opts.parallel && m > 1) {
    std::vector<std::future<Submodel>> jobs;
    for (int i = 0; i < m; ++i) {
      jobs.push_back(std::async(std::launch::async, [&, i] {
        return fit_submodel(ctx, groups[static_cast<std::size_t>(i)], rng.substream(i + 1),
                            hyper_eval_budget(opts, m, static_cast<int>(groups[static_cast<std::size_t>(i)].size())));
      }));
    }
    for (auto& j : jobs) {
      try {
        fitted.push_back(j.get());
      } catch (...) {
        ++model.dropped_submodels;
        failure = std::current_exception();
      }
    }
  } else {
    for (int i = 0; i < m; ++i) {
      try {
        fitted.push_back(fit_submodel(ctx, groups[static_cast<std::size_t>(i)], rng.substream(i + 1),
                                      hyper_eval_budget(opts, m, static_cast<int>(groups[static_cast<std::size_t>(i)].size()))));
      } catch (...) {
        ++model.dropped_submodels;
        failure = std::current_exception();
      }
    }
  }

  if (fitted.empty()) {
    if (failure) std::rethrow_exception(failure);
    throw std::runtime_error("build_aggregated_model: no submodel could be fitted");
  }
  if (m >= 2 && model.dropped_submodels > 0) {
    // dropped with a warning; remaining weights renormalize below
  } else if (m == 1 && model.dropped_submodels > 0 && failure) {
    std::rethrow_exception(failure);
  }

  model.submodels = std::move(fitted);
  model.weights = bayes_weights(model.submodels, opts.eta);
  return model;
}

std::pair<double, double> predict_aggregated(const AggregatedModel& model,
                                             const Eigen::VectorXd& x) {
  if (model.submodels.empty()) throw std::runtime_error("predict_aggregated: model not built");
  if (x.size() != model.input_dim)
    throw std::invalid_argument("predict_aggregated: dimension mismatch");
  double mean = 0.0, var = 0.0;
  for (int i = 0; i < model.size(); ++i) {
    const auto& s = model.submodels[static_cast<std::size_t>(i)];
    const auto [mi, vi] = posterior_predict(s.gp, project(s.embedding, x));
    const double w = model.weights(i);
    mean += w * mi;
    var += w * w * vi;
  }
  return {mean, std::max(var, 0.0)};
}

double aggregated_cov(const AggregatedModel& model, const Eigen::VectorXd& x,
                      const Eigen::VectorXd& y) {
  if (model.submodels.empty()) throw std::runtime_error("aggregated_cov: model not built");
  double c = 0.0;
  for (int i = 0; i < model.size(); ++i) {
    const auto& s = model.submodels[static_cast<std::size_t>(i)];
    const double w = model.weights(i);
    c += w * w * posterior_cov(s.gp, project(s.embedding, x), project(s.embedding, y));
  }
  return c;
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> aggregated_joint(const AggregatedModel& model,
                                                             const Eigen::MatrixXd& Q) {
  if (model.submodels.empty()) throw std::runtime_error("aggregated_joint: model not built");
  Eigen::VectorXd means = Eigen::VectorXd::Zero(Q.rows());
  Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(Q.rows(), Q.rows());
  for (int i = 0; i < model.size(); ++i) {
    const auto& s = model.submodels[static_cast<std::size_t>(i)];
    const double w = model.weights(i);
    const auto [mi, ci] = posterior_joint(s.gp, project_rows(s.embedding, Q));
    means += w * mi;
    cov += (w * w) * ci;
  }
  return {means, cov};
}

double select_eta_cv(const ReplicatedDataset& data, const std::vector<double>& grid, int folds,
                     RngStream& rng, const AggregateOptions& opts) {
  if (grid.empty()) throw std::invalid_argument("select_eta_cv: empty grid");
  if (grid.size() == 1) return grid.front();
  if (folds < 2) throw std::invalid_argument("select_eta_cv: folds must be >= 2");
  if (data.size() < 2 * folds) throw std::invalid_argument("select_eta_cv: needs n >= 2*folds");

  std::vector<double> etas = grid;
  std::sort(etas.begin(), etas.end());

  const auto fold_sets = partition(data.size(), folds, rng);
  std::vector<double> score(etas.size(), 0.0);
  long long held_out = 0;

  for (int f = 0; f < folds; ++f) {
    std::vector<int> train;
    for (int g = 0; g < folds; ++g)
      if (g != f)
        train.insert(train.end(), fold_sets[static_cast<std::size_t>(g)].begin(),
                     fold_sets[static_cast<std::size_t>(g)].end());
    std::sort(train.begin(), train.end());
    const ReplicatedDataset tr = data.subset(train);
    RngStream fold_rng = rng.substream(100 + f);
    AggregateOptions o = opts;
    o.num_submodels = std::min(opts.num_submodels > 0 ? opts.num_submodels
                                                      : auto_num_submodels(tr.size()),
                               tr.size());
    AggregatedModel model = build_aggregated_model(tr, o, fold_rng);

    // eta only enters through the weights, so score every eta on one fit
    for (std::size_t e = 0; e < etas.size(); ++e) {
      AggregatedModel reweighted = model;
      reweighted.eta = etas[e];
      reweighted.weights = bayes_weights(model.submodels, etas[e]);
      for (int i : fold_sets[static_cast<std::size_t>(f)]) {
        const auto [mu, var] = predict_aggregated(reweighted, data.point(i));
        (void)var;
        const double err = mu - data.sample_mean(i);
        score[e] += err * err;
      }
    }
    held_out += static_cast<long long>(fold_sets[static_cast<std::size_t>(f)].size());
  }

  std::size_t best = 0;
  for (std::size_t e = 1; e < etas.size(); ++e)
    if (score[e] < score[best]) best = e;
  (void)held_out;
  return etas[best];
}

}  // namespace mambo
