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

#ifndef TAXOCODEC_CLI_COMMANDS_HPP_
#define TAXOCODEC_CLI_COMMANDS_HPP_

#include "taxocodec/cli/config_file.hpp"

namespace txc::cli {

// Pretrained task-network bundle persisted as one checkpoint.
struct TaskNets {
  std::map<bench::TaskId, std::shared_ptr<bench::TaskNet<float>>> nets;
  nlohmann::json meta;
};

void save_tasknets(const std::string& path, bench::TaskBench& bench, const nlohmann::json& extra_meta);
TaskNets load_tasknets(const std::string& path);

// Bench assembled from on-disk artifacts (no pretraining).
bench::TaskBench assemble_bench(const std::string& data_dir, const std::string& nets_path);

// ---- subcommands; each throws txc::Error on failure ------------------------

void cmd_gen(const ExperimentConfig& cfg, const std::string& out_dir);

void cmd_pretrain(const ExperimentConfig& cfg, const std::string& data_dir, const std::string& out_path);

struct TrainArgs {
  std::string data_dir, nets_path, out_path;
  std::string tasks_csv;    // ports, in order
  std::string lambdas_csv;  // one value, or one per task; empty = all 1
  uint64_t seed = 1;
  bool control = false;  // disable the rate term
  bool freeze = false;   // mark the saved model as stage-2 ready
};
void cmd_train(const ExperimentConfig& cfg, const TrainArgs& args);

struct EncodeArgs {
  std::string model_path, nets_path, data_dir, split = "val", out_path;
  int index = 0;
};
void cmd_encode(const EncodeArgs& args);

struct DecodeArgs {
  std::string model_path, nets_path, in_path, out_prefix;
};
void cmd_decode(const DecodeArgs& args);

struct EvalRdArgs {
  std::string data_dir, nets_path, out_dir;
  std::string tasks_csv;  // one task = customized curve, several = grouped
  std::string lambda_grid_csv, seeds_csv;  // optional overrides
};
void cmd_eval_rd(const ExperimentConfig& cfg, const EvalRdArgs& args);

void cmd_plateau(const ExperimentConfig& cfg, const std::string& curve_csv_path, const std::string& out_path);

void cmd_aggregate(const ExperimentConfig& cfg, const std::string& data_dir, const std::string& nets_path,
                   const std::string& group_csv, const std::string& out_dir);

void cmd_unseen(const ExperimentConfig& cfg, const std::string& data_dir, const std::string& nets_path,
                const std::string& out_dir);

// Shared helpers.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace txc::cli

#endif  // TAXOCODEC_CLI_COMMANDS_HPP_
