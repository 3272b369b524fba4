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

#include "taxocodec/train/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <thread>

#include "taxocodec/version.hpp"

namespace txc::train {

namespace {

using bench::Split;
using bench::TaskId;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

// Index-stamped job runner; results land in caller-owned slots, so the
// outcome is independent of scheduling.
void run_jobs(const std::vector<std::function<void()>>& jobs, int workers) {
  if (workers <= 1) {
    for (const auto& job : jobs) job();
    return;
  }
  std::atomic<size_t> next{0};
  std::vector<std::thread> pool;
  const int n = std::min<int>(workers, static_cast<int>(jobs.size()));
  for (int w = 0; w < n; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const size_t i = next.fetch_add(1);
        if (i >= jobs.size()) return;
        jobs[i]();
      }
    });
  }
  for (auto& t : pool) t.join();
}

std::vector<agg::PortSpec> port_specs(const std::vector<TaskId>& tasks) {
  std::vector<agg::PortSpec> specs;
  specs.reserve(tasks.size());
  for (TaskId t : tasks) {
    specs.push_back({bench::task_name(t),
                     {bench::kFeatureChannels, bench::kFeatureSize, bench::kFeatureSize},
                     false});
  }
  return specs;
}

}  // namespace

int worker_count(int requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("TAXOCODEC_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

agg::AggregateModel<float> build_bench_model(const std::vector<TaskId>& tasks, const agg::AggregateConfig& acfg,
                                             uint64_t seed) {
  Rng rng(substream(seed, "model"));
  return agg::make_aggregate_model<float>(port_specs(tasks), acfg, rng);
}

EvalPoint evaluate_model(const agg::AggregateModel<float>& model, bench::TaskBench& bench,
                         const std::vector<TaskId>& tasks, Split split, int max_samples) {
  const auto& ds = bench.dataset(split);
  const int n = std::min(ds.size(), max_samples);
  require(n > 0, "BAD_ARGUMENT", "evaluate_model: empty evaluation set");

  std::vector<bench::MetricAccumulator> accs;
  for (TaskId t : tasks) accs.emplace_back(t);

  double bpp_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    std::vector<int> idx{i};
    std::vector<nn::TensorPtr<float>> feats;
    for (const auto& p : model.ports) feats.push_back(bench.feature_batch(split, bench::parse_task(p.task_id), idx));
    auto out = agg::aggregate_compress(model, feats);
    bpp_sum += out.record.bpp;
    auto shared = agg::aggregate_decode_shared(model, out.bitstream);
    for (size_t t = 0; t < tasks.size(); ++t) {
      auto feat_hat = agg::aggregate_split(model, shared, bench::task_name(tasks[t]));
      auto head_out = bench.net(tasks[t]).head(feat_hat);
      bench::accumulate_metric(accs[t], tasks[t], head_out, ds, idx);
    }
  }

  EvalPoint point;
  point.bpp = bpp_sum / n;
  for (auto& acc : accs) point.metrics.push_back(acc.value());
  return point;
}

RDCurve CurveStudy::averaged_curve() const {
  RDCurve curve;
  std::vector<double> lambdas;
  for (const auto& p : raw)
    if (std::find(lambdas.begin(), lambdas.end(), p.lambda) == lambdas.end()) lambdas.push_back(p.lambda);
  for (double l : lambdas) {
    RDPoint point;
    point.lambdas = {l};
    int count = 0;
    for (const auto& p : raw) {
      if (p.lambda != l) continue;
      if (point.distortions.empty()) point.distortions.assign(p.metrics.size(), 0.0);
      point.bpp += p.bpp;
      for (size_t t = 0; t < p.metrics.size(); ++t) point.distortions[t] += p.metrics[t];
      ++count;
      point.seed = p.seed;
    }
    point.bpp /= count;
    for (auto& d : point.distortions) d /= count;
    curve.points.push_back(std::move(point));
  }
  return curve;
}

std::vector<double> CurveStudy::control_metrics() const {
  require(!controls.empty(), "BAD_ARGUMENT", "curve study has no control runs");
  std::vector<double> mean(controls[0].metrics.size(), 0.0);
  for (const auto& c : controls)
    for (size_t t = 0; t < mean.size(); ++t) mean[t] += c.metrics[t];
  for (auto& m : mean) m /= static_cast<double>(controls.size());
  return mean;
}

CurveStudy run_curve_study(bench::TaskBench& bench, const std::vector<TaskId>& tasks, const SweepSettings& settings) {
  CurveStudy study;
  study.tasks = tasks;

  // Feature caches are built up front so worker threads only read them.
  for (TaskId t : tasks) {
    bench.feature_batch(Split::train, t, {0});
    bench.feature_batch(Split::val, t, {0});
  }

  struct RunSpec {
    double lambda;
    uint64_t seed;
    bool control;
  };
  std::vector<RunSpec> runs;
  for (double l : settings.lambda_grid)
    for (uint64_t s : settings.seeds) runs.push_back({l, s, false});
  for (uint64_t s : settings.seeds) runs.push_back({0.0, s, true});

  std::vector<EvalPoint> results(runs.size());
  std::vector<std::function<void()>> jobs;
  for (size_t i = 0; i < runs.size(); ++i) {
    jobs.emplace_back([&, i] {
      const RunSpec& spec = runs[i];
      // One init per seed, shared across the lambda grid, so sweep points are
      // paired comparisons.
      auto model = build_bench_model(tasks, settings.agg, spec.seed);
      RDConfig cfg = settings.base;
      cfg.seed = substream(spec.seed, spec.control ? "run.control" : "run." + fmt(spec.lambda));
      cfg.rate_term_enabled = !spec.control;
      cfg.lambdas.assign(tasks.size(), spec.control ? 1.0 : spec.lambda);
      auto trained = train_stage1(model, bench, cfg);
      EvalPoint point = evaluate_model(model, bench, tasks, Split::val, settings.eval_samples);
      point.lambda = spec.lambda;
      point.seed = spec.seed;
      point.control = spec.control;
      point.final_loss = trained.loss_history.empty() ? 0.0 : trained.loss_history.back();
      results[i] = std::move(point);
    });
  }
  run_jobs(jobs, worker_count(settings.workers));

  for (size_t i = 0; i < runs.size(); ++i) {
    if (runs[i].control)
      study.controls.push_back(results[i]);
    else
      study.raw.push_back(results[i]);
  }
  return study;
}

AggregationStudy run_aggregation_study(bench::TaskBench& bench, const std::vector<TaskId>& tasks,
                                       const SweepSettings& settings, double plateau_eps) {
  AggregationStudy study;
  study.tasks = tasks;

  std::vector<bool> single_dir;
  for (TaskId t : tasks) {
    study.customized.push_back(run_curve_study(bench, {t}, settings));
  }
  study.grouped = run_curve_study(bench, tasks, settings);

  study.customized_total_bpp = 0.0;
  bool all_finite = true;
  for (size_t t = 0; t < tasks.size(); ++t) {
    const auto& cs = study.customized[t];
    const auto plateau = plateau_search(cs.averaged_curve(), cs.control_metrics(),
                                        {task_spec(tasks[t]).higher_better}, plateau_eps);
    study.customized_plateaus.push_back(plateau);
    if (plateau)
      study.customized_total_bpp += *plateau;
    else
      all_finite = false;
  }

  std::vector<bool> dirs;
  for (TaskId t : tasks) dirs.push_back(task_spec(t).higher_better);
  study.grouped_plateau =
      plateau_search(study.grouped.averaged_curve(), study.grouped.control_metrics(), dirs, plateau_eps);

  study.feasible = all_finite && study.grouped_plateau.has_value();
  if (study.feasible) study.saving = 1.0 - *study.grouped_plateau / study.customized_total_bpp;
  return study;
}

double UnseenStudy::mean_trained_loss(bool plus_variant) const {
  const auto& runs = plus_variant ? plus : binary;
  double s = 0.0;
  for (const auto& r : runs) s += r.trained_loss;
  return s / static_cast<double>(runs.size());
}

double UnseenStudy::mean_random_loss(bool plus_variant) const {
  const auto& runs = plus_variant ? plus : binary;
  double s = 0.0;
  for (const auto& r : runs) s += r.random_loss;
  return s / static_cast<double>(runs.size());
}

double UnseenStudy::mean_metric(bool plus_variant) const {
  const auto& runs = plus_variant ? plus : binary;
  double s = 0.0;
  for (const auto& r : runs) s += r.trained_metric;
  return s / static_cast<double>(runs.size());
}

UnseenStudy run_unseen_study(bench::TaskBench& bench, const std::vector<TaskId>& supervised, TaskId unseen_task,
                             double lambda, const SweepSettings& settings) {
  UnseenStudy study;

  std::vector<TaskId> all_tasks = supervised;
  all_tasks.push_back(unseen_task);
  for (TaskId t : all_tasks) {
    bench.feature_batch(Split::train, t, {0});
    bench.feature_batch(Split::val, t, {0});
    bench.feature_batch(Split::test, t, {0});
  }

  struct Slot {
    bool plus;
    uint64_t seed;
    UnseenRun run;
  };
  std::vector<Slot> slots;
  for (uint64_t s : settings.seeds) slots.push_back({false, s, {}});
  for (uint64_t s : settings.seeds) slots.push_back({true, s, {}});

  std::vector<std::function<void()>> jobs;
  for (size_t i = 0; i < slots.size(); ++i) {
    jobs.emplace_back([&, i] {
      Slot& slot = slots[i];
      // Binary: only the supervised tasks feed the codec. Binary+: the unseen
      // task's source feature is included as a port but carries lambda = 0.
      std::vector<TaskId> ports = supervised;
      RDConfig cfg = settings.base;
      cfg.lambdas.assign(supervised.size(), lambda);
      if (slot.plus) {
        ports.push_back(unseen_task);
        cfg.lambdas.push_back(0.0);
      }
      cfg.seed = substream(slot.seed, slot.plus ? "unseen.plus" : "unseen.binary");
      auto model = build_bench_model(ports, settings.agg, cfg.seed);
      train_stage1(model, bench, cfg);
      model.freeze();

      RDConfig stage2 = settings.base;
      stage2.lambdas = {1.0};
      stage2.rate_term_enabled = false;
      stage2.seed = substream(slot.seed, slot.plus ? "unseen.plus.stage2" : "unseen.binary.stage2");
      auto [decoder, result] = train_stage2_unseen(model, bench, unseen_task, stage2);

      Rng random_rng(substream(slot.seed, "unseen.random"));
      agg::UnseenDecoder<float> random_decoder(
          bench::task_name(unseen_task), {bench::kFeatureChannels, bench::kFeatureSize, bench::kFeatureSize},
          model.acfg, model.fused_channels(), random_rng);

      slot.run.seed = slot.seed;
      slot.run.trained_loss =
          eval_task_loss(model, bench, unseen_task, &decoder, Split::test, settings.eval_samples);
      slot.run.random_loss =
          eval_task_loss(model, bench, unseen_task, &random_decoder, Split::test, settings.eval_samples);

      agg::attach_unseen_decoder(model, std::move(decoder));
      const auto& ds = bench.dataset(Split::test);
      bench::MetricAccumulator acc(unseen_task);
      double bpp_sum = 0.0;
      const int n = std::min(ds.size(), settings.eval_samples);
      for (int s = 0; s < n; ++s) {
        std::vector<int> idx{s};
        std::vector<nn::TensorPtr<float>> feats;
        for (const auto& p : model.ports)
          feats.push_back(bench.feature_batch(Split::test, bench::parse_task(p.task_id), idx));
        auto out = agg::aggregate_compress(model, feats);
        bpp_sum += out.record.bpp;
        auto feat_hat = aggregate_decompress(model, out.bitstream, bench::task_name(unseen_task));
        auto head_out = bench.net(unseen_task).head(feat_hat);
        bench::accumulate_metric(acc, unseen_task, head_out, ds, idx);
      }
      slot.run.bpp = bpp_sum / n;
      slot.run.trained_metric = acc.value();
    });
  }
  run_jobs(jobs, worker_count(settings.workers));

  for (auto& slot : slots) {
    if (slot.plus)
      study.plus.push_back(slot.run);
    else
      study.binary.push_back(slot.run);
  }
  return study;
}

std::string curve_csv(const CurveStudy& study, uint64_t config_hash) {
  std::string out;
  out += "# tool_version=" + std::string(kToolVersion) + "\n";
  out += "# config_hash=" + hash_hex(config_hash) + "\n";
  out += "lambda_set,seed,bpp";
  for (TaskId t : study.tasks) out += std::string(",") + bench::task_name(t) + "_" + task_spec(t).metric;
  out += "\n";
  auto row = [&](const EvalPoint& p, const std::string& lambda_repr) {
    out += lambda_repr + "," + std::to_string(p.seed) + "," + fmt(p.bpp);
    for (double m : p.metrics) out += "," + fmt(m);
    out += "\n";
  };
  for (const auto& p : study.raw) row(p, fmt(p.lambda));
  for (const auto& p : study.controls) row(p, "control");
  return out;
}

std::string aggregation_report_csv(const AggregationStudy& study, uint64_t config_hash) {
  std::string out;
  out += "# tool_version=" + std::string(kToolVersion) + "\n";
  out += "# config_hash=" + hash_hex(config_hash) + "\n";
  out += "setting,task,plateau_bpp\n";
  for (size_t t = 0; t < study.tasks.size(); ++t) {
    out += std::string("customized,") + bench::task_name(study.tasks[t]) + "," +
           (study.customized_plateaus[t] ? fmt(*study.customized_plateaus[t]) : "infeasible") + "\n";
  }
  out += "customized,total," + fmt(study.customized_total_bpp) + "\n";
  out += std::string("grouped,all,") + (study.grouped_plateau ? fmt(*study.grouped_plateau) : "infeasible") + "\n";
  out += "grouped,saving," + fmt(study.saving) + "\n";
  return out;
}

}  // namespace txc::train
