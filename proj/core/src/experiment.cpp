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

#include "mambo/experiment.hpp"

#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <thread>

#include "mambo/math.hpp"

namespace mambo {

namespace fs = std::filesystem;

namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::string join_vector(const Eigen::VectorXd& v) {
  std::string out;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (i) out += ';';
    out += fmt_double(v(i));
  }
  return out;
}

long long auto_budget(const MamboConfig& c, int iterations) {
  const long long points = c.n0 + iterations;
  const long long s_final = s_sequence(points, c.s_c, c.r_min);
  return points * (s_final + c.r_min);
}

}  // namespace

RunResult single_embedding_baseline(const TestProblem& problem, const ExperimentConfig& cfg,
                                    RngStream& rng, const TraceSink& sink) {
  const MamboConfig& lc = cfg.loop;
  if (lc.n0 < 2) throw std::invalid_argument("baseline: n0 must be >= 2");
  if (lc.r_min < 2) throw std::invalid_argument("baseline: r_min must be >= 2");

  const auto t0 = std::chrono::steady_clock::now();
  auto elapsed = [&] {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  RngStream rng_design = rng.substream(1);
  RngStream rng_model = rng.substream(2);
  RngStream rng_acq = rng.substream(3);
  RngStream rng_obs = rng.substream(4);
  RngStream rng_embed = rng.substream(6);

  const Problem noisy = as_noisy_problem(problem);
  auto observe_batch = [&](const Eigen::VectorXd& x, long long reps) {
    std::vector<double> ys(static_cast<std::size_t>(reps));
    for (auto& y : ys) y = noisy.observe(x, rng_obs);
    return ys;
  };

  ReplicatedDataset data(noisy.dim);
  for (const Eigen::VectorXd& x : initial_design(lc.n0, noisy.box, rng_design))
    data.add_point(x, observe_batch(x, lc.r_min));

  RunResult result;
  {
    const auto [idx, mean] = incumbent(data);
    result.initial_incumbent = data.point(idx);
    result.initial_best_mean = mean;
  }

  // one fixed embedding drawn from the initial design only
  Embedding embedding;
  const int d = noisy.dim;
  if (cfg.baseline_embedding == EmbeddingKind::identity) {
    embedding = Embedding::identity(d);
  } else if (cfg.baseline_embedding == EmbeddingKind::pca) {
    const int cap = std::max(1, std::min(d, lc.n0 - 1));
    embedding = pca_embedding(data.points(), std::min(cfg.baseline_dim, cap));
  } else {
    embedding = gaussian_embedding(d, std::clamp(cfg.baseline_dim, 1, d), rng_embed);
  }
  result.fixed_embedding = embedding.matrix;

  AcquisitionSpec acq = lc.acquisition;
  acq.kind = AcquisitionKind::expected_improvement;
  const MeanPrior prior = MeanPrior::constant();

  auto refit = [&](std::uint64_t iter) {
    const ReplicatedDataset proj = data.with_points(project_rows(embedding, data.points()));
    RngStream r = rng_model.substream(iter);
    KernelSpec kernel;
    double loglik;
    if (proj.size() >= 3) {
      const auto est = estimate_hyperparameters(proj, HyperBounds{}, lc.hyper_restarts, r, 1200);
      kernel = est.kernel;
      loglik = est.log_marginal;
    } else {
      kernel = KernelSpec::isotropic(embedding.target_dim(), 1.0, 1.0);
      loglik = 0.0;
    }
    Submodel sm;
    sm.embedding = embedding;
    sm.subset_indices.resize(static_cast<std::size_t>(data.size()));
    std::iota(sm.subset_indices.begin(), sm.subset_indices.end(), 0);
    sm.n_i = data.size();
    sm.d_i = embedding.target_dim();
    sm.gp = fit_gp(proj, kernel, prior);
    sm.log_evidence = loglik - 0.5 * (sm.d_i + 1) * std::log(static_cast<double>(sm.n_i));
    AggregatedModel model;
    model.submodels.push_back(std::move(sm));
    model.weights = Eigen::VectorXd::Ones(1);
    model.input_dim = d;
    return model;
  };

  AggregatedModel model = refit(0);
  result.termination_reason = "iteration_cap";
  double running_best = result.initial_best_mean;
  for (int iter = 1; iter <= cfg.iterations; ++iter) {
    const auto [inc_idx, inc_mean] = incumbent(data);
    RngStream r_acq = rng_acq.substream(static_cast<std::uint64_t>(iter));
    Eigen::VectorXd x_next;
    try {
      x_next = propose_next(model, noisy.box, data.points(), acq, inc_mean, r_acq);
    } catch (const std::exception&) {
      result.termination_reason = "proposal_failure";
      break;
    }
    const int new_idx = data.add_point(x_next, observe_batch(x_next, lc.r_min));

    const auto fit_start = std::chrono::steady_clock::now();
    model = refit(static_cast<std::uint64_t>(iter));
    const double fit_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - fit_start).count();

    const auto [best_idx, best_mean] = incumbent(data);
    TraceRow row;
    row.iteration = static_cast<long long>(data.size());
    row.proposed = x_next;
    row.sample_mean = data.sample_mean(new_idx);
    row.replications_spent = lc.r_min;
    row.best_so_far = best_mean;
    row.incumbent = data.point(best_idx);
    row.elapsed_s = elapsed();
    row.fit_s = fit_s;
    result.trace.push_back(row);
    if (sink) sink(row);
  }

  const auto [idx, mean] = incumbent(data);
  result.incumbent = data.point(idx);
  result.incumbent_mean = mean;
  result.replications_used = data.total_replications();
  result.data = std::move(data);
  return result;
}

void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace,
                     const TestProblem& problem) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open trace file " + path);
  out << "iteration,proposed_x,sample_mean,replications_spent,best_so_far,simple_regret,"
         "elapsed_s\n";
  for (const auto& r : trace) {
    const double regret = simple_regret(problem.evaluate(r.incumbent), problem.f_star);
    out << r.iteration << ',' << join_vector(r.proposed) << ',' << fmt_double(r.sample_mean)
        << ',' << r.replications_spent << ',' << fmt_double(r.best_so_far) << ','
        << fmt_double(regret) << ',' << fmt_double(r.elapsed_s) << '\n';
  }
}

void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open summary file " + path);
  out << "iteration,mean_regret,ci_lo,ci_hi,q1,median,q3\n";
  for (const auto& r : rows) {
    out << r.iteration << ',' << fmt_double(r.mean_regret) << ',' << fmt_double(r.ci_lo) << ','
        << fmt_double(r.ci_hi) << ',';
    if (r.q1) out << fmt_double(*r.q1);
    out << ',';
    if (r.median) out << fmt_double(*r.median);
    out << ',';
    if (r.q3) out << fmt_double(*r.q3);
    out << '\n';
  }
}

void write_oracle_cache(const std::string& path, const std::string& problem,
                        const OracleResult& oracle, const std::string& description) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open oracle cache " + path);
  out << "problem = " << problem << '\n';
  out << "value = " << fmt_double(oracle.value) << '\n';
  out << "argmin = " << join_vector(oracle.argmin) << '\n';
  out << "starts = " << oracle.starts << '\n';
  out << "seed = " << oracle.seed << '\n';
  out << "oracle = " << description << '\n';
}

MacrorepSummary run_macroreps(const ExperimentConfig& cfg) {
  if (cfg.macroreps < 1) throw std::invalid_argument("run_macroreps: macroreps must be >= 1");
  const TestProblem problem = make_test_problem(cfg.problem);
  const Problem noisy = as_noisy_problem(problem);
  const bool baseline = cfg.algo == "baseline";
  if (!baseline && cfg.algo != "mambo")
    throw std::invalid_argument("run_macroreps: unknown algo '" + cfg.algo + "'");

  MamboConfig lc = cfg.loop;
  lc.iteration_cap = cfg.iterations;
  if (lc.total_budget <= 0) lc.total_budget = auto_budget(lc, cfg.iterations);

  const auto wall0 = std::chrono::steady_clock::now();
  std::vector<RunResult> results(static_cast<std::size_t>(cfg.macroreps));
  std::vector<bool> ok(static_cast<std::size_t>(cfg.macroreps), false);

  auto run_one = [&](int rep) {
    RngStream rng(cfg.seed + static_cast<unsigned long long>(rep));
    ExperimentConfig local = cfg;
    local.loop = lc;
    if (baseline)
      results[static_cast<std::size_t>(rep)] = single_embedding_baseline(problem, local, rng);
    else
      results[static_cast<std::size_t>(rep)] = run_mambo(noisy, lc, rng);
    ok[static_cast<std::size_t>(rep)] = true;
  };

  int workers = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  workers = std::clamp(workers, 1, cfg.macroreps);

  MacrorepSummary summary;
  if (workers == 1) {
    for (int rep = 0; rep < cfg.macroreps; ++rep) {
      try {
        run_one(rep);
      } catch (const std::exception& e) {
        std::cerr << "warning: macroreplication " << rep << " failed: " << e.what() << "\n";
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (int rep = next.fetch_add(1); rep < cfg.macroreps; rep = next.fetch_add(1)) {
          try {
            run_one(rep);
          } catch (const std::exception& e) {
            std::cerr << "warning: macroreplication " << rep << " failed: " << e.what() << "\n";
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  // regret traces
  std::size_t len = 0;
  for (int rep = 0; rep < cfg.macroreps; ++rep) {
    RegretTrace rt;
    rt.seed = cfg.seed + static_cast<unsigned long long>(rep);
    rt.failed = !ok[static_cast<std::size_t>(rep)];
    if (!rt.failed) {
      for (const auto& row : results[static_cast<std::size_t>(rep)].trace) {
        rt.iterations.push_back(row.iteration);
        rt.regret.push_back(simple_regret(problem.evaluate(row.incumbent), problem.f_star));
      }
      len = std::max(len, rt.regret.size());
    } else {
      ++summary.failures;
    }
    summary.traces.push_back(std::move(rt));
  }

  for (std::size_t it = 0; it < len; ++it) {
    std::vector<double> vals;
    for (const auto& rt : summary.traces) {
      if (rt.failed || rt.regret.empty()) continue;
      vals.push_back(it < rt.regret.size() ? rt.regret[it] : rt.regret.back());
    }
    if (vals.empty()) break;
    const MeanCi ci = mean_ci95(vals);
    SummaryRow row;
    row.iteration = static_cast<long long>(cfg.loop.n0) + static_cast<long long>(it) + 1;
    row.mean_regret = ci.mean;
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    if (it + 1 == len) {
      row.q1 = quantile(vals, 0.25);
      row.median = quantile(vals, 0.5);
      row.q3 = quantile(vals, 0.75);
      summary.final_regrets = vals;
    }
    summary.rows.push_back(row);
  }

  if (!cfg.out_dir.empty()) {
    fs::create_directories(cfg.out_dir);
    for (int rep = 0; rep < cfg.macroreps; ++rep) {
      if (!ok[static_cast<std::size_t>(rep)]) continue;
      const auto seed = cfg.seed + static_cast<unsigned long long>(rep);
      const std::string path = (fs::path(cfg.out_dir) /
                                (cfg.problem + "_" + cfg.algo + "_seed" + std::to_string(seed) +
                                 "_trace.csv"))
                                   .string();
      write_trace_csv(path, results[static_cast<std::size_t>(rep)].trace, problem);
      summary.trace_files.push_back(path);
    }
    const std::string spath =
        (fs::path(cfg.out_dir) / (cfg.problem + "_summary.csv")).string();
    write_summary_csv(spath, summary.rows);
    summary.summary_file = spath;

    const std::string mpath =
        (fs::path(cfg.out_dir) / (cfg.problem + "_" + cfg.algo + "_metadata.txt")).string();
    std::ofstream meta(mpath, std::ios::trunc);
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    char stamp[64];
    std::strftime(stamp, sizeof(stamp), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
    meta << "problem = " << cfg.problem << "\nalgo = " << cfg.algo
         << "\nmacroreps = " << cfg.macroreps << "\niterations = " << cfg.iterations
         << "\nseed = " << cfg.seed << "\nfailures = " << summary.failures
         << "\nfinished_at = " << stamp << "\nwall_s = "
         << fmt_double(std::chrono::duration<double>(std::chrono::steady_clock::now() - wall0)
                           .count())
         << '\n';
  }
  return summary;
}

}  // namespace mambo
