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

#include <cstdio>

#include "CLI11.hpp"
#include "taxocodec/cli/commands.hpp"
#include "taxocodec/version.hpp"

namespace {

txc::cli::ExperimentConfig load_config(const std::string& path) {
  return path.empty() ? txc::cli::ExperimentConfig() : txc::cli::ExperimentConfig::load(path);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"taxocodec: learned multi-task feature compression toolkit"};
  app.set_version_flag("--version", txc::kToolVersion);
  app.require_subcommand(1);

  std::string config_path, out, data_dir, nets_path, model_path, in_path, tasks, group, lambda_grid, seeds, lambdas,
      split = "val";
  uint64_t seed = 1;
  int index = 0;
  bool control = false, freeze = false;

  auto add_config = [&](CLI::App* cmd) { cmd->add_option("--config", config_path, "experiment config file"); };

  auto* gen = app.add_subcommand("gen", "generate the synthetic multi-task dataset");
  add_config(gen);
  gen->add_option("--out", out, "output directory")->required();

  auto* pretrain = app.add_subcommand("pretrain", "pretrain and freeze the task networks");
  add_config(pretrain);
  pretrain->add_option("--data", data_dir, "dataset directory")->required();
  pretrain->add_option("--out", out, "output checkpoint path")->required();

  auto* train_cmd = app.add_subcommand("train", "stage-1 R-D training of an aggregate model");
  add_config(train_cmd);
  train_cmd->add_option("--data", data_dir)->required();
  train_cmd->add_option("--nets", nets_path)->required();
  train_cmd->add_option("--tasks", tasks, "comma-separated port tasks")->required();
  train_cmd->add_option("--lambda", lambdas, "lambda per task (or one shared value)");
  train_cmd->add_option("--seed", seed);
  train_cmd->add_flag("--control", control, "train without the rate term");
  train_cmd->add_flag("--freeze", freeze, "freeze the trained model for stage 2");
  train_cmd->add_option("--out", out, "model checkpoint path")->required();

  auto* encode = app.add_subcommand("encode", "compress one sample's features to a .txc bitstream");
  encode->add_option("--model", model_path)->required();
  encode->add_option("--nets", nets_path)->required();
  encode->add_option("--data", data_dir)->required();
  encode->add_option("--split", split, "train|val|test");
  encode->add_option("--index", index, "sample index");
  encode->add_option("--out", out, "output .txc path")->required();

  auto* decode = app.add_subcommand("decode", "reconstruct features and emit task predictions");
  decode->add_option("--model", model_path)->required();
  decode->add_option("--nets", nets_path)->required();
  decode->add_option("--in", in_path, "input .txc path")->required();
  decode->add_option("--out", out, "output prefix")->required();

  auto* eval_rd = app.add_subcommand("eval-rd", "train the lambda sweep and emit the RD curve CSV");
  add_config(eval_rd);
  eval_rd->add_option("--data", data_dir)->required();
  eval_rd->add_option("--nets", nets_path)->required();
  eval_rd->add_option("--tasks", tasks, "task set of this curve");
  eval_rd->add_option("--lambda-grid", lambda_grid, "comma-separated lambda grid override");
  eval_rd->add_option("--seeds", seeds, "comma-separated seed list override");
  eval_rd->add_option("--out", out, "output directory")->required();

  auto* plateau = app.add_subcommand("plateau", "plateau bit-rate per task from an RD curve CSV");
  add_config(plateau);
  plateau->add_option("--curve", in_path, "rd_curve.csv path")->required();
  plateau->add_option("--out", out, "output CSV path")->required();

  auto* aggregate = app.add_subcommand("aggregate", "customized-vs-grouped bit-rate savings study");
  add_config(aggregate);
  aggregate->add_option("--data", data_dir)->required();
  aggregate->add_option("--nets", nets_path)->required();
  aggregate->add_option("--group", group, "tasks compressed jointly");
  aggregate->add_option("--out", out, "output directory")->required();

  auto* unseen = app.add_subcommand("unseen", "Binary / Binary+ unseen-task study");
  add_config(unseen);
  unseen->add_option("--data", data_dir)->required();
  unseen->add_option("--nets", nets_path)->required();
  unseen->add_option("--out", out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    const auto cfg = load_config(config_path);
    if (gen->parsed()) {
      txc::cli::cmd_gen(cfg, out);
    } else if (pretrain->parsed()) {
      txc::cli::cmd_pretrain(cfg, data_dir, out);
    } else if (train_cmd->parsed()) {
      txc::cli::TrainArgs args{data_dir, nets_path, out, tasks, lambdas, seed, control, freeze};
      txc::cli::cmd_train(cfg, args);
    } else if (encode->parsed()) {
      txc::cli::EncodeArgs args{model_path, nets_path, data_dir, split, out, index};
      txc::cli::cmd_encode(args);
    } else if (decode->parsed()) {
      txc::cli::DecodeArgs args{model_path, nets_path, in_path, out};
      txc::cli::cmd_decode(args);
    } else if (eval_rd->parsed()) {
      txc::cli::EvalRdArgs args{data_dir, nets_path, out, tasks, lambda_grid, seeds};
      txc::cli::cmd_eval_rd(cfg, args);
    } else if (plateau->parsed()) {
      txc::cli::cmd_plateau(cfg, in_path, out);
    } else if (aggregate->parsed()) {
      txc::cli::cmd_aggregate(cfg, data_dir, nets_path, group, out);
    } else if (unseen->parsed()) {
      txc::cli::cmd_unseen(cfg, data_dir, nets_path, out);
    }
  } catch (const txc::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: INTERNAL %s\n", e.what());
    return 1;
  }
  return 0;
}
