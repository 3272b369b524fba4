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

#ifndef TAXOCODEC_TRAIN_EXPERIMENTS_HPP_
#define TAXOCODEC_TRAIN_EXPERIMENTS_HPP_

#include <map>
#include <optional>
#include <string>

#include "taxocodec/train/trainer.hpp"

namespace txc::train {

// Shared settings of one lambda-sweep study.
struct SweepSettings {
  std::vector<double> lambda_grid;
  std::vector<uint64_t> seeds;
  RDConfig base;             // lambdas are overwritten per run
  agg::AggregateConfig agg;  // model architecture template
  int eval_samples = 96;     // validation items for metrics and bpp
  int workers = 0;           // 0 = TAXOCODEC_THREADS or hardware concurrency
};

// One trained-and-evaluated model.
struct EvalPoint {
  double lambda = 0.0;  // shared multiplier of this run (0 for control)
  uint64_t seed = 0;
  bool control = false;
  double bpp = 0.0;
  std::vector<double> metrics;  // aligned with the study's task list
  double final_loss = 0.0;
};

// Sweep of one task set (customized when tasks.size() == 1, grouped
// otherwise): all (lambda, seed) runs plus the rate-unconstrained controls.
struct CurveStudy {
  std::vector<bench::TaskId> tasks;
  std::vector<EvalPoint> raw;       // trained runs, one per (lambda, seed)
  std::vector<EvalPoint> controls;  // one per seed
  RDCurve averaged_curve() const;   // seed-averaged, one point per lambda
  std::vector<double> control_metrics() const;  // seed-averaged
};

// Evaluates a trained model on a split subset: mean container bpp through the
// actual coder plus the task metrics through the decoded features.
EvalPoint evaluate_model(const agg::AggregateModel<float>& model, bench::TaskBench& bench,
                         const std::vector<bench::TaskId>& tasks, bench::Split split, int max_samples);

// Builds an aggregate model over `tasks` with the bench feature contract.
agg::AggregateModel<float> build_bench_model(const std::vector<bench::TaskId>& tasks,
                                             const agg::AggregateConfig& acfg, uint64_t seed);

// Trains and evaluates the full (lambda x seed) grid plus controls.
CurveStudy run_curve_study(bench::TaskBench& bench, const std::vector<bench::TaskId>& tasks,
                           const SweepSettings& settings);

// Customized-vs-grouped comparison at plateau level (the aggregation study).
struct AggregationStudy {
  std::vector<bench::TaskId> tasks;
  std::vector<CurveStudy> customized;  // one per task
  CurveStudy grouped;
  std::vector<std::optional<double>> customized_plateaus;
  std::optional<double> grouped_plateau;
  double customized_total_bpp = 0.0;
  double saving = 0.0;  // 1 - grouped / customized_total, when both finite
  bool feasible = false;
};

AggregationStudy run_aggregation_study(bench::TaskBench& bench, const std::vector<bench::TaskId>& tasks,
                                       const SweepSettings& settings, double plateau_eps);

// Frozen-representation support for an unseen task (Binary / Binary+).
struct UnseenRun {
  uint64_t seed = 0;
  double bpp = 0.0;
  double trained_loss = 0.0;  // held-out loss of the stage-2 decoder
  double random_loss = 0.0;   // untouched random-init decoder baseline
  double trained_metric = 0.0;
};

struct UnseenStudy {
  std::vector<UnseenRun> binary, plus;
  double mean_trained_loss(bool plus_variant) const;
  double mean_random_loss(bool plus_variant) const;
  double mean_metric(bool plus_variant) const;
};

UnseenStudy run_unseen_study(bench::TaskBench& bench, const std::vector<bench::TaskId>& supervised,
                             bench::TaskId unseen_task, double lambda, const SweepSettings& settings);

// ---- reports ----------------------------------------------------------------

// CSV with columns lambda_set, seed, bpp and one column per task metric.
// Header comment rows pin config hash, seed list and tool version.
std::string curve_csv(const CurveStudy& study, uint64_t config_hash);

std::string aggregation_report_csv(const AggregationStudy& study, uint64_t config_hash);

// Worker cap: TAXOCODEC_THREADS when set, hardware concurrency otherwise.
int worker_count(int requested);

}  // namespace txc::train

#endif  // TAXOCODEC_TRAIN_EXPERIMENTS_HPP_
