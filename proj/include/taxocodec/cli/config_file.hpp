/* Copyright 2026 The taxocodec Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TAXOCODEC_CLI_CONFIG_FILE_HPP_
#define TAXOCODEC_CLI_CONFIG_FILE_HPP_

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "taxocodec/agg/aggregate.hpp"
#include "taxocodec/bench/tasknet.hpp"
#include "taxocodec/train/experiments.hpp"

namespace txc::cli {

// Plain-text key-value experiment configuration. Every key has a registered
// default; unknown keys are rejected. The resolved config hash is embedded in
// every artifact a run emits.
class ExperimentConfig {
 public:
  ExperimentConfig();  // defaults

  static ExperimentConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  const std::string& gets(const std::string& key) const;
  int geti(const std::string& key) const;
  double getd(const std::string& key) const;
  std::vector<double> get_reals(const std::string& key) const;
  std::vector<uint64_t> get_u64s(const std::string& key) const;

  // Canonical "key = value" dump in key order.
  std::string dump() const;
  uint64_t hash() const;

  // Typed views over the relevant key groups.
  bench::PretrainConfig pretrain_config() const;
  agg::AggregateConfig agg_config() const;
  train::RDConfig rd_config() const;
  train::SweepSettings sweep_settings() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace txc::cli

#endif  // TAXOCODEC_CLI_CONFIG_FILE_HPP_
