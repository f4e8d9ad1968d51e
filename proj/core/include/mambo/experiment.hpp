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

#ifndef MAMBO_EXPERIMENT_HPP
#define MAMBO_EXPERIMENT_HPP

#include <optional>
#include <string>
#include <vector>

#include "mambo/loop.hpp"
#include "mambo/problems.hpp"

namespace mambo {

struct ExperimentConfig {
  std::string problem = "branin100";
  std::string algo = "mambo";  // mambo | baseline
  int iterations = 200;        // points proposed after the initial design
  int macroreps = 10;
  unsigned long long seed = 1;
  std::string out_dir;
  MamboConfig loop{};
  EmbeddingKind baseline_embedding = EmbeddingKind::pca;
  int baseline_dim = 6;
  int threads = 0;  // 0 = hardware concurrency
};

/// Straightforward BO with one fixed embedding drawn from the initial design
/// only (PCA by default), a single GP submodel refit each iteration, EI
/// acquisition, and no allocation stage beyond r_min.
RunResult single_embedding_baseline(const TestProblem& problem, const ExperimentConfig& cfg,
                                    RngStream& rng, const TraceSink& sink = {});

struct RegretTrace {
  unsigned long long seed = 0;
  std::vector<long long> iterations;
  std::vector<double> regret;  // incumbent simple regret per iteration
  bool failed = false;
};

struct SummaryRow {
  long long iteration = 0;
  double mean_regret = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::optional<double> q1, median, q3;  // populated on the final row
};

struct MacrorepSummary {
  std::vector<SummaryRow> rows;
  std::vector<RegretTrace> traces;     // one per macroreplication
  std::vector<double> final_regrets;   // successful reps only
  int failures = 0;
  std::string summary_file;            // empty when out_dir is unset
  std::vector<std::string> trace_files;
};

/// Runs the configured algorithm once per macroreplication (seeds seed+0,
/// seed+1, ...; reps may execute concurrently), collects regret-vs-iteration
/// traces, and — when out_dir is set — writes one trace CSV per seed plus a
/// summary CSV (mean, 95% normal CI per iteration; final-row quartiles) and a
/// metadata file with the wall-clock details.
MacrorepSummary run_macroreps(const ExperimentConfig& cfg);

/// Trace CSV columns: iteration, proposed_x (semicolon-joined), sample_mean,
/// replications_spent, best_so_far, simple_regret, elapsed_s.
void write_trace_csv(const std::string& path, const std::vector<TraceRow>& trace,
                     const TestProblem& problem);

/// Summary CSV columns: iteration, mean_regret, ci_lo, ci_hi, q1, median, q3.
void write_summary_csv(const std::string& path, const std::vector<SummaryRow>& rows);

void write_oracle_cache(const std::string& path, const std::string& problem,
                        const OracleResult& oracle, const std::string& description);

}  // namespace mambo

#endif  // MAMBO_EXPERIMENT_HPP
