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

#include "taxocodec/bench/tasknet.hpp"

#include <cmath>

namespace txc::bench {

namespace {

constexpr size_t kPixels = static_cast<size_t>(kImageSize) * kImageSize;

std::vector<int> argmax_rows(const nn::TensorPtr<float>& logits) {
  const int n = logits->dim(0), k = logits->dim(1);
  std::vector<int> out(static_cast<size_t>(n));
  for (int b = 0; b < n; ++b) {
    const float* row = logits->data.data() + static_cast<int64_t>(b) * k;
    int best = 0;
    for (int c = 1; c < k; ++c)
      if (row[c] > row[best]) best = c;
    out[static_cast<size_t>(b)] = best;
  }
  return out;
}

std::vector<int> argmax_pixels(const nn::TensorPtr<float>& logits, int batch_index) {
  const int k = logits->dim(1), h = logits->dim(2), w = logits->dim(3);
  const int64_t plane = static_cast<int64_t>(h) * w;
  std::vector<int> out(static_cast<size_t>(plane));
  const float* base = logits->data.data() + static_cast<int64_t>(batch_index) * k * plane;
  for (int64_t p = 0; p < plane; ++p) {
    int best = 0;
    for (int c = 1; c < k; ++c)
      if (base[c * plane + p] > base[best * plane + p]) best = c;
    out[static_cast<size_t>(p)] = best;
  }
  return out;
}

double threshold_for(TaskId task, const PretrainConfig& cfg) {
  switch (task) {
    case TaskId::scene:
      return cfg.min_scene_acc;
    case TaskId::count:
      return cfg.min_count_acc;
    case TaskId::seg:
      return cfg.min_seg_miou;
    case TaskId::orient:
      return cfg.max_orient_l1;
    case TaskId::shading:
      return cfg.max_shading_l1;
    default:
      return cfg.max_edges_l1;
  }
}

}  // namespace

std::vector<int> class_labels(const Dataset& ds, const std::vector<int>& idx, TaskId task) {
  std::vector<int> labels;
  if (task == TaskId::scene || task == TaskId::count) {
    labels.reserve(idx.size());
    for (int i : idx) labels.push_back(task == TaskId::scene ? ds[i].scene_class : ds[i].count_class);
    return labels;
  }
  require(task == TaskId::seg, "BAD_ARGUMENT", "class_labels on a regression task");
  labels.reserve(idx.size() * kPixels);
  for (int i : idx)
    for (size_t p = 0; p < kPixels; ++p) labels.push_back(ds[i].seg[p]);
  return labels;
}

void accumulate_metric(MetricAccumulator& acc, TaskId task, const nn::TensorPtr<float>& head_out, const Dataset& ds,
                       const std::vector<int>& idx) {
  const auto& spec = task_spec(task);
  if (spec.classification) {
    acc.add_classes(argmax_rows(head_out), class_labels(ds, idx, task));
    return;
  }
  if (task == TaskId::seg) {
    for (size_t b = 0; b < idx.size(); ++b) {
      std::vector<int> label(kPixels);
      for (size_t p = 0; p < kPixels; ++p) label[p] = ds[idx[b]].seg[p];
      acc.add_classes(argmax_pixels(head_out, static_cast<int>(b)), label);
    }
    return;
  }
  const auto target = dense_targets<float>(ds, idx, task);
  const size_t per = static_cast<size_t>(spec.out_channels) * kPixels;
  for (size_t b = 0; b < idx.size(); ++b) {
    std::vector<float> pred(head_out->data.begin() + static_cast<int64_t>(b * per),
                            head_out->data.begin() + static_cast<int64_t>((b + 1) * per));
    std::vector<float> lab(target->data.begin() + static_cast<int64_t>(b * per),
                           target->data.begin() + static_cast<int64_t>((b + 1) * per));
    acc.add_values(pred, lab);
  }
}

double eval_tasknet(const TaskNet<float>& net, const Dataset& ds, int max_samples) {
  const int n = std::min(ds.size(), max_samples);
  require(n > 0, "BAD_ARGUMENT", "eval_tasknet: empty dataset");
  MetricAccumulator acc(net.task);
  const int batch = 32;
  for (int start = 0; start < n; start += batch) {
    std::vector<int> idx;
    for (int i = start; i < std::min(n, start + batch); ++i) idx.push_back(i);
    auto out = net.head(net.features(batch_images<float>(ds, idx)));
    accumulate_metric(acc, net.task, out, ds, idx);
  }
  return acc.value();
}

PretrainReport pretrain(TaskNet<float>& net, const BenchSplits& splits, const PretrainConfig& cfg) {
  net.set_trainable(true);
  nn::ParamSet<float> params;
  net.collect(params, std::string("net.") + task_name(net.task));
  nn::Adam<float> opt(params.params(), {cfg.lr, 0.9, 0.999, 1e-8});
  Rng rng(substream(cfg.seed, std::string("pretrain.") + task_name(net.task)));

  PretrainReport report;
  for (int step = 0; step < cfg.steps; ++step) {
    std::vector<int> idx(static_cast<size_t>(cfg.batch));
    for (auto& i : idx) i = static_cast<int>(rng.next_below(static_cast<uint64_t>(splits.train.size())));
    opt.zero_grad();
    auto loss = task_loss<float>(net.task, net.head(net.features(batch_images<float>(splits.train, idx))),
                                 splits.train, idx);
    const double lv = loss->item();
    require(std::isfinite(lv), "DIVERGED",
            std::string("pretraining ") + task_name(net.task) + " diverged at step " + std::to_string(step));
    report.loss_history.push_back(lv);
    loss->backward();
    opt.step();
  }

  net.set_trainable(false);
  report.val_metric = eval_tasknet(net, splits.val, cfg.eval_samples);
  report.threshold = threshold_for(net.task, cfg);
  report.higher_better = task_spec(net.task).higher_better;
  const bool ok =
      report.higher_better ? report.val_metric >= report.threshold : report.val_metric <= report.threshold;
  if (!ok) {
    fail("QUALIFICATION_FAILED", std::string("task ") + task_name(net.task) + " reached " +
                                     std::to_string(report.val_metric) + " vs threshold " +
                                     std::to_string(report.threshold));
  }
  report.frozen_hash = net.weights_hash();
  return report;
}

}  // namespace txc::bench
