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

#ifndef TAXOCODEC_TRAIN_TRAINER_HPP_
#define TAXOCODEC_TRAIN_TRAINER_HPP_

#include <utility>

#include "taxocodec/agg/aggregate.hpp"
#include "taxocodec/bench/taskbench.hpp"
#include "taxocodec/train/rd.hpp"

namespace txc::train {

struct StageResult {
  std::vector<double> loss_history;
  int best_step = -1;
  double best_val_cost = 0.0;
};

// Stage 1: joint R-D training of the codec, peripheral and split weights
// against the frozen task networks. cfg.lambdas align with model.ports;
// a checkpoint with the lowest validation R-D cost is restored at the end.
StageResult train_stage1(agg::AggregateModel<float>& model, bench::TaskBench& bench, const RDConfig& cfg);

// Stage 2: trains an external decoder for a task that never supervised the
// frozen model. Only the returned decoder's weights are mutated.
std::pair<agg::UnseenDecoder<float>, StageResult> train_stage2_unseen(const agg::AggregateModel<float>& model,
                                                                      bench::TaskBench& bench,
                                                                      bench::TaskId unseen_task, const RDConfig& cfg);

// Eval-mode R-D cost (hard quantization, rate estimate, lambda-weighted task
// losses) averaged over a split subset; the checkpoint-selection criterion.
double eval_rd_cost(const agg::AggregateModel<float>& model, bench::TaskBench& bench, const RDConfig& cfg,
                    bench::Split split, int max_samples);

// Eval-mode loss of one (possibly unseen) task through the full coded path.
double eval_task_loss(const agg::AggregateModel<float>& model, bench::TaskBench& bench, bench::TaskId task,
                      const agg::UnseenDecoder<float>* unseen_decoder, bench::Split split, int max_samples);

}  // namespace txc::train

#endif  // TAXOCODEC_TRAIN_TRAINER_HPP_
