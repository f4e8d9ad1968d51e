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

#include "mambo/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mambo {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value) {
  throw std::invalid_argument("config: bad value '" + value + "' for key '" + key + "'");
}

long long to_ll(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const long long x = std::stoll(v, &pos);
    if (pos != v.size()) bad_value(key, v);
    return x;
  } catch (const std::invalid_argument&) {
    bad_value(key, v);
  } catch (const std::out_of_range&) {
    bad_value(key, v);
  }
}

int to_int(const std::string& key, const std::string& v) {
  const long long x = to_ll(key, v);
  if (x < -2147483647LL || x > 2147483647LL) bad_value(key, v);
  return static_cast<int>(x);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) bad_value(key, v);
    return x;
  } catch (const std::invalid_argument&) {
    bad_value(key, v);
  } catch (const std::out_of_range&) {
    bad_value(key, v);
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad_value(key, v);
}

EmbeddingKind to_embedding(const std::string& key, const std::string& v) {
  if (v == "gaussian") return EmbeddingKind::gaussian;
  if (v == "pca") return EmbeddingKind::pca;
  if (v == "identity") return EmbeddingKind::identity;
  bad_value(key, v);
}

std::vector<double> to_grid(const std::string& key, const std::string& v) {
  std::vector<double> grid;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) grid.push_back(to_double(key, item));
  }
  if (grid.empty()) bad_value(key, v);
  return grid;
}

}  // namespace

FlatConfig FlatConfig::parse_string(const std::string& text) {
  FlatConfig cfg;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw std::invalid_argument("config: line " + std::to_string(lineno) +
                                  " has an empty key or value");
    cfg.values_[key] = value;
  }
  return cfg;
}

FlatConfig FlatConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("config file not found: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str());
}

ExperimentConfig experiment_config_from(const FlatConfig& cfg, ExperimentConfig out) {
  for (const auto& [key, v] : cfg.values()) {
    if (key == "problem") {
      out.problem = v;
    } else if (key == "algo") {
      if (v != "mambo" && v != "baseline") bad_value(key, v);
      out.algo = v;
    } else if (key == "iterations" || key == "iters") {
      out.iterations = to_int(key, v);
    } else if (key == "macroreps") {
      out.macroreps = to_int(key, v);
    } else if (key == "seed") {
      out.seed = static_cast<unsigned long long>(to_ll(key, v));
      out.loop.seed = out.seed;
    } else if (key == "out") {
      out.out_dir = v;
    } else if (key == "threads") {
      out.threads = to_int(key, v);
    } else if (key == "baseline_embedding") {
      out.baseline_embedding = to_embedding(key, v);
    } else if (key == "baseline_dim") {
      out.baseline_dim = to_int(key, v);
    } else if (key == "n0") {
      out.loop.n0 = to_int(key, v);
    } else if (key == "total_budget") {
      out.loop.total_budget = to_ll(key, v);
    } else if (key == "r_min") {
      out.loop.r_min = to_int(key, v);
    } else if (key == "acquisition") {
      if (v == "ei")
        out.loop.acquisition.kind = AcquisitionKind::expected_improvement;
      else if (v == "lcb")
        out.loop.acquisition.kind = AcquisitionKind::lower_confidence_bound;
      else if (v == "thompson")
        out.loop.acquisition.kind = AcquisitionKind::thompson;
      else
        bad_value(key, v);
    } else if (key == "kappa") {
      out.loop.acquisition.kappa = to_double(key, v);
    } else if (key == "candidate_count") {
      out.loop.acquisition.candidate_count = to_int(key, v);
    } else if (key == "refine_steps") {
      out.loop.acquisition.refine_steps = to_int(key, v);
    } else if (key == "num_submodels") {
      out.loop.num_submodels = to_int(key, v);
    } else if (key == "dim_policy") {
      if (v == "random")
        out.loop.dim_policy.kind = DimPolicy::Kind::random_range;
      else if (v == "fixed")
        out.loop.dim_policy.kind = DimPolicy::Kind::fixed;
      else if (v == "full")
        out.loop.dim_policy.kind = DimPolicy::Kind::full;
      else
        bad_value(key, v);
    } else if (key == "fixed_dim") {
      out.loop.dim_policy.fixed_dim = to_int(key, v);
    } else if (key == "embedding") {
      out.loop.embedding = to_embedding(key, v);
    } else if (key == "eta") {
      out.loop.eta = to_double(key, v);
    } else if (key == "eta_grid") {
      out.loop.eta_grid = to_grid(key, v);
    } else if (key == "cv_folds") {
      out.loop.cv_folds = to_int(key, v);
    } else if (key == "s_c") {
      out.loop.s_c = to_double(key, v);
    } else if (key == "hyper_restarts") {
      out.loop.hyper_restarts = to_int(key, v);
    } else if (key == "fit_flop_budget") {
      out.loop.fit_flop_budget = to_double(key, v);
    } else if (key == "iteration_cap") {
      out.loop.iteration_cap = to_ll(key, v);
    } else if (key == "parallel_submodels") {
      out.loop.parallel_submodels = to_bool(key, v);
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  return out;
}

}  // namespace mambo
