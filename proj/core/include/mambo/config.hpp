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

#ifndef MAMBO_CONFIG_HPP
#define MAMBO_CONFIG_HPP

#include <map>
#include <string>

#include "mambo/experiment.hpp"

namespace mambo {

/// Flat `key = value` configuration ('#' starts a comment). Keys mirror the
/// ExperimentConfig / MamboConfig field names; unknown keys are an error.
class FlatConfig {
 public:
  static FlatConfig parse_file(const std::string& path);
  static FlatConfig parse_string(const std::string& text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, std::string>& values() const { return values_; }
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

 private:
  std::map<std::string, std::string> values_;
};

/// Applies the entries onto defaults; throws std::invalid_argument on an
/// unknown key or an unparsable value (fail-closed).
ExperimentConfig experiment_config_from(const FlatConfig& cfg, ExperimentConfig defaults = {});

}  // namespace mambo

#endif  // MAMBO_CONFIG_HPP
