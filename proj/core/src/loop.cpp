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

#include "mambo/loop.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "mambo/sampling.hpp"

namespace mambo {

namespace {

// substream ids for the driver's independent random streams
enum : std::uint64_t { kDesign = 1, kModel = 2, kAcq = 3, kObserve = 4, kCv = 5 };

AggregateOptions aggregate_options(const MamboConfig& c, double eta) {
  AggregateOptions o;
  o.num_submodels = c.num_submodels;
  o.dim_policy = c.dim_policy;
  o.embedding = c.embedding;
  o.eta = eta;
  o.hyper_restarts = c.hyper_restarts;
  o.fit_flop_budget = c.fit_flop_budget;
  o.parallel = c.parallel_submodels;
  return o;
}

std::vector<PointStats> point_stats(const ReplicatedDataset& data) {
  std::vector<PointStats> s;
  s.reserve(static_cast<std::size_t>(data.size()));
  for (int i = 0; i < data.size(); ++i)
    s.push_back({data.sample_mean(i), std::sqrt(data.sample_variance(i)),
                 data.replicate_count(i)});
  return s;
}

/// Initial-model screen: leave-one-out standardized residuals across all
/// submodels; more than 10% beyond |3| triggers one re-estimation with
/// doubled restarts (warn, never abort).
bool model_looks_valid(const AggregatedModel& model) {
  int total = 0, bad = 0;
  for (const auto& s : model.submodels) {
    const Eigen::VectorXd r = loo_standardized_residuals(s.gp);
    total += static_cast<int>(r.size());
    bad += static_cast<int>((r.cwiseAbs().array() > 3.0).count());
  }
  return total == 0 || static_cast<double>(bad) / total <= 0.1;
}

}  // namespace

std::vector<Eigen::VectorXd> initial_design(int n0, const Box& box, RngStream& rng) {
  if (n0 < 2) throw std::invalid_argument("initial_design: n0 must be >= 2");
  const Eigen::MatrixXd X = maximin_latin_hypercube(n0, box, 10, rng);
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(n0));
  for (int i = 0; i < n0; ++i) pts.push_back(X.row(i).transpose());
  return pts;
}

std::pair<int, double> incumbent(const ReplicatedDataset& data) {
  if (data.empty()) throw std::invalid_argument("incumbent: empty dataset");
  int best = 0;
  for (int i = 1; i < data.size(); ++i) {
    const double mi = data.sample_mean(i), mb = data.sample_mean(best);
    if (mi < mb || (mi == mb && data.replicate_count(i) > data.replicate_count(best))) best = i;
  }
  return {best, data.sample_mean(best)};
}

RunResult run_mambo(const Problem& problem, const MamboConfig& config, RngStream& rng,
                    const TraceSink& sink) {
  if (config.n0 < 2) throw std::invalid_argument("run_mambo: n0 must be >= 2");
  if (config.r_min < 2) throw std::invalid_argument("run_mambo: r_min must be >= 2");
  if (config.total_budget < static_cast<long long>(config.n0) * config.r_min)
    throw std::invalid_argument("run_mambo: total budget below n0 * r_min");
  if (!problem.observe) throw std::invalid_argument("run_mambo: problem has no observer");

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  RngStream rng_design = rng.substream(kDesign);
  RngStream rng_model = rng.substream(kModel);
  RngStream rng_acq = rng.substream(kAcq);
  RngStream rng_obs = rng.substream(kObserve);
  RngStream rng_cv = rng.substream(kCv);

  BudgetState budget{config.total_budget, config.total_budget, config.r_min, config.s_c};
  RunResult result;

  auto observe_batch = [&](const Eigen::VectorXd& x, long long reps) {
    std::vector<double> ys(static_cast<std::size_t>(reps));
    for (auto& y : ys) y = problem.observe(x, rng_obs);
    return ys;
  };

  // initial space-filling design, r_min replications each
  ReplicatedDataset data(problem.dim);
  for (const Eigen::VectorXd& x : initial_design(config.n0, problem.box, rng_design)) {
    data.add_point(x, observe_batch(x, config.r_min));
    budget.spend(config.r_min);
  }
  {
    const auto [idx, mean] = incumbent(data);
    result.initial_incumbent = data.point(idx);
    result.initial_best_mean = mean;
  }

  // eta: cross-validated on the initial data when a grid is supplied
  double eta = config.eta;
  if (config.eta_grid.size() > 1 && data.size() >= 2 * config.cv_folds) {
    eta = select_eta_cv(data, config.eta_grid, config.cv_folds, rng_cv,
                        aggregate_options(config, config.eta));
  } else if (config.eta_grid.size() == 1) {
    eta = config.eta_grid.front();
  }
  result.selected_eta = eta;

  const AggregateOptions agg_opts = aggregate_options(config, eta);

  auto rebuild = [&](std::uint64_t iter) {
    RngStream r = rng_model.substream(iter);
    return build_aggregated_model(data, agg_opts, r);
  };

  AggregatedModel model;
  bool have_model = budget.remaining >= config.r_min && config.iteration_cap > 0;
  if (have_model) {
    model = rebuild(0);
    if (!model_looks_valid(model)) {
      ++result.validity_warnings;
      AggregateOptions retry = agg_opts;
      retry.hyper_restarts = 2 * agg_opts.hyper_restarts;
      RngStream r = rng_model.substream(1'000'000);
      model = build_aggregated_model(data, retry, r);
    }
  }

  result.termination_reason = "budget_exhausted";
  double running_best = result.initial_best_mean;
  for (long long iter = 1; iter <= config.iteration_cap; ++iter) {
    if (budget.remaining < config.r_min) break;
    if (iter > config.iteration_cap) break;

    // search stage
    const auto [inc_idx, inc_mean] = incumbent(data);
    RngStream r_acq = rng_acq.substream(static_cast<std::uint64_t>(iter));
    Eigen::VectorXd x_next;
    try {
      x_next = propose_next(model, problem.box, data.points(), config.acquisition, inc_mean, r_acq);
    } catch (const std::exception&) {
      result.termination_reason = "proposal_failure";
      break;
    }

    const int new_idx = data.add_point(x_next, observe_batch(x_next, config.r_min));
    budget.spend(config.r_min);

    // allocation stage: replication floors plus OCBA under scarcity
    const int s_n = s_sequence(data.size(), config.s_c, config.r_min);
    const auto plan = plan_allocation(point_stats(data), data.replicate_counts(), s_n,
                                      budget.remaining);
    long long alloc_spent = 0;
    for (std::size_t i = 0; i < plan.size(); ++i) {
      if (plan[i] <= 0) continue;
      data.add_replicates(static_cast<int>(i), observe_batch(data.point(static_cast<int>(i)), plan[i]));
      alloc_spent += plan[i];
    }
    budget.spend(alloc_spent);

    // rebuild stage: fresh partition, embeddings and weights
    const auto fit_start = std::chrono::steady_clock::now();
    try {
      model = rebuild(static_cast<std::uint64_t>(iter));
    } catch (const std::exception&) {
      ++result.model_rebuild_retries;
      try {
        RngStream r = rng_model.substream(2'000'000 + static_cast<std::uint64_t>(iter));
        model = build_aggregated_model(data, agg_opts, r);
      } catch (const std::exception&) {
        result.termination_reason = "model_failure";
        break;
      }
    }
    const double fit_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - fit_start).count();

    const auto [best_idx, best_mean] = incumbent(data);
    running_best = std::min(running_best, best_mean);
    TraceRow row;
    row.iteration = static_cast<long long>(data.size());
    row.proposed = x_next;
    row.sample_mean = data.sample_mean(new_idx);
    row.replications_spent = config.r_min + alloc_spent;
    row.best_so_far = running_best;
    row.incumbent = data.point(best_idx);
    row.elapsed_s = elapsed();
    row.fit_s = fit_s;
    result.trace.push_back(row);
    if (sink) sink(row);

    if (iter == config.iteration_cap) {
      result.termination_reason = "iteration_cap";
      break;
    }
  }

  const auto [idx, mean] = incumbent(data);
  result.incumbent = data.point(idx);
  result.incumbent_mean = mean;
  result.replications_used = budget.consumed();
  result.data = std::move(data);
  return result;
}

}  // namespace mambo
