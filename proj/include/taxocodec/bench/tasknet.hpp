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

#ifndef TAXOCODEC_BENCH_TASKNET_HPP_
#define TAXOCODEC_BENCH_TASKNET_HPP_

#include <string>

#include "taxocodec/bench/dataset.hpp"
#include "taxocodec/bench/metrics.hpp"
#include "taxocodec/nn/adam.hpp"
#include "taxocodec/nn/layers.hpp"

namespace txc::bench {

inline constexpr int kFeatureChannels = 12;
inline constexpr int kFeatureSize = 16;

// Hourglass-flavored task network: a three-stage convolutional stem shared by
// all tasks, tapped at the bottleneck, plus a task-specific tail. The tapped
// activation is the compressible feature.
template <typename T>
struct TaskNet {
  TaskId task = TaskId::scene;
  int tap_index = 3;  // feature taken after the third stem layer

  nn::Conv2dLayer<T> stem0, stem1, stem2;
  // dense tail
  nn::Conv2dLayer<T> tail0, tail1;
  // classification tail: keeps the spatial layout through a flatten, which
  // the counting task needs
  nn::Conv2dLayer<T> cls0, cls1;
  nn::LinearLayer<T> cls2;

  TaskNet() = default;
  TaskNet(TaskId task_, Rng& rng)
      : task(task_),
        stem0(3, 10, 3, 2, 1, rng),
        stem1(10, 14, 3, 2, 1, rng),
        stem2(14, kFeatureChannels, 3, 1, 1, rng) {
    const auto& spec = task_spec(task);
    if (spec.classification) {
      cls0 = nn::Conv2dLayer<T>(kFeatureChannels, 12, 3, 2, 1, rng);
      cls1 = nn::Conv2dLayer<T>(12, 8, 3, 2, 1, rng);
      cls2 = nn::LinearLayer<T>(8 * 4 * 4, spec.out_channels, rng);
    } else {
      tail0 = nn::Conv2dLayer<T>(kFeatureChannels, 10, 3, 1, 1, rng);
      tail1 = nn::Conv2dLayer<T>(10, spec.out_channels, 3, 1, 1, rng);
    }
  }

  // (N,3,64,64) -> (N,12,16,16), the compressible feature h.
  nn::TensorPtr<T> features(const nn::TensorPtr<T>& images) const {
    auto x = nn::relu(stem0.forward(images));
    x = nn::relu(stem1.forward(x));
    return nn::relu(stem2.forward(x));
  }

  // Tail from the (possibly reconstructed) feature to logits (N,K) for
  // classification tasks or maps (N,C,64,64) for dense tasks.
  nn::TensorPtr<T> head(const nn::TensorPtr<T>& feature) const {
    if (task_spec(task).classification) {
      auto x = nn::relu(cls0.forward(feature));
      x = nn::relu(cls1.forward(x));
      return cls2.forward(nn::reshape(x, {x->dim(0), 8 * 4 * 4}));
    }
    auto x = nn::bilinear_resize(feature, 2 * kFeatureSize, 2 * kFeatureSize);
    x = nn::relu(tail0.forward(x));
    x = tail1.forward(x);
    return nn::bilinear_resize(x, kImageSize, kImageSize);
  }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) {
    stem0.collect(set, prefix + ".stem0");
    stem1.collect(set, prefix + ".stem1");
    stem2.collect(set, prefix + ".stem2");
    if (task_spec(task).classification) {
      cls0.collect(set, prefix + ".cls0");
      cls1.collect(set, prefix + ".cls1");
      cls2.collect(set, prefix + ".cls2");
    } else {
      tail0.collect(set, prefix + ".tail0");
      tail1.collect(set, prefix + ".tail1");
    }
  }

  void set_trainable(bool t) {
    nn::ParamSet<T> set;
    collect(set, "net");
    for (auto* p : set.params()) p->set_trainable(t);
  }

  uint64_t weights_hash() {
    nn::ParamSet<T> set;
    collect(set, "net");
    return set.content_hash();
  }
};

// ---- batch assembly helpers ------------------------------------------------

template <typename T>
nn::TensorPtr<T> batch_images(const Dataset& ds, const std::vector<int>& idx) {
  require(!idx.empty(), "BAD_ARGUMENT", "empty batch");
  const int n = static_cast<int>(idx.size());
  auto out = nn::make_tensor<T>({n, 3, kImageSize, kImageSize});
  const size_t per = static_cast<size_t>(3) * kImageSize * kImageSize;
  for (int b = 0; b < n; ++b) {
    const auto& img = ds[idx[static_cast<size_t>(b)]].image;
    for (size_t i = 0; i < per; ++i) out->data[static_cast<size_t>(b) * per + i] = static_cast<T>(img[i]);
  }
  return out;
}

// Per-row labels for scene/count, per-pixel labels for seg.
std::vector<int> class_labels(const Dataset& ds, const std::vector<int>& idx, TaskId task);

template <typename T>
nn::TensorPtr<T> dense_targets(const Dataset& ds, const std::vector<int>& idx, TaskId task) {
  const auto& spec = task_spec(task);
  require(!spec.classification && spec.metric == std::string("l1"), "BAD_ARGUMENT",
          "dense_targets on non-regression task");
  const int n = static_cast<int>(idx.size());
  const size_t plane = static_cast<size_t>(kImageSize) * kImageSize;
  auto out = nn::make_tensor<T>({n, spec.out_channels, kImageSize, kImageSize});
  for (int b = 0; b < n; ++b) {
    const auto& s = ds[idx[static_cast<size_t>(b)]];
    T* dst = out->data.data() + static_cast<size_t>(b) * spec.out_channels * plane;
    if (task == TaskId::orient) {
      for (size_t i = 0; i < 2 * plane; ++i) dst[i] = static_cast<T>(s.orient[i]);
    } else if (task == TaskId::shading) {
      for (size_t i = 0; i < plane; ++i) dst[i] = static_cast<T>(s.shading[i]);
    } else {
      for (size_t i = 0; i < plane; ++i) dst[i] = static_cast<T>(s.edges[i]);
    }
  }
  return out;
}

// Task distortion on a head output: cross-entropy for classification and
// segmentation, mean absolute error for the dense regressions.
template <typename T>
nn::TensorPtr<T> task_loss(TaskId task, const nn::TensorPtr<T>& head_out, const Dataset& ds,
                           const std::vector<int>& idx) {
  const auto& spec = task_spec(task);
  if (spec.classification || task == TaskId::seg) {
    return nn::softmax_cross_entropy(head_out, class_labels(ds, idx, task));
  }
  return nn::l1_loss(head_out, dense_targets<T>(ds, idx, task));
}

// Argmax/value predictions from one head output row, fed to the metrics.
void accumulate_metric(MetricAccumulator& acc, TaskId task, const nn::TensorPtr<float>& head_out, const Dataset& ds,
                       const std::vector<int>& idx);

// ---- pretraining -----------------------------------------------------------

struct PretrainConfig {
  int steps = 700;
  int batch = 16;
  double lr = 1e-3;
  uint64_t seed = 1;
  int eval_samples = 256;
  // Per-task qualification thresholds on the validation split; the bench is
  // invalid without competent task networks.
  double min_scene_acc = 0.90;
  double min_count_acc = 0.60;
  double min_seg_miou = 0.50;
  double max_orient_l1 = 0.45;
  double max_shading_l1 = 0.10;
  double max_edges_l1 = 0.08;
};

struct PretrainReport {
  double val_metric = 0.0;
  double threshold = 0.0;
  bool higher_better = true;
  uint64_t frozen_hash = 0;
  std::vector<double> loss_history;
};

// Trains the network on the train split, validates against the task's
// qualification threshold, freezes the weights and records their hash.
// Aborts with QUALIFICATION_FAILED when the threshold is not met.
PretrainReport pretrain(TaskNet<float>& net, const BenchSplits& splits, const PretrainConfig& cfg);

// Validation metric of a frozen net on a dataset subset.
double eval_tasknet(const TaskNet<float>& net, const Dataset& ds, int max_samples);

}  // namespace txc::bench

#endif  // TAXOCODEC_BENCH_TASKNET_HPP_
