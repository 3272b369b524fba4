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

#include "taxocodec/bench/metrics.hpp"

#include <cmath>

namespace txc::bench {

double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels) {
  require(!predictions.empty(), "BAD_ARGUMENT", "accuracy: empty input");
  require(predictions.size() == labels.size(), "SHAPE_MISMATCH", "accuracy: prediction/label size mismatch");
  int64_t correct = 0;
  for (size_t i = 0; i < predictions.size(); ++i) correct += predictions[i] == labels[i] ? 1 : 0;
  return static_cast<double>(correct) / static_cast<double>(predictions.size());
}

double mean_iou(const std::vector<int>& predictions, const std::vector<int>& labels, int num_classes) {
  require(!predictions.empty(), "BAD_ARGUMENT", "mean_iou: empty input");
  require(predictions.size() == labels.size(), "SHAPE_MISMATCH", "mean_iou: prediction/label size mismatch");
  std::vector<int64_t> inter(static_cast<size_t>(num_classes), 0), uni(static_cast<size_t>(num_classes), 0);
  for (size_t i = 0; i < predictions.size(); ++i) {
    const int p = predictions[i], l = labels[i];
    require(0 <= p && p < num_classes && 0 <= l && l < num_classes, "BAD_ARGUMENT", "mean_iou: class out of range");
    if (p == l) {
      ++inter[static_cast<size_t>(p)];
      ++uni[static_cast<size_t>(p)];
    } else {
      ++uni[static_cast<size_t>(p)];
      ++uni[static_cast<size_t>(l)];
    }
  }
  double sum = 0.0;
  int present = 0;
  for (int c = 0; c < num_classes; ++c) {
    if (uni[static_cast<size_t>(c)] == 0) continue;  // absent from both sides
    sum += static_cast<double>(inter[static_cast<size_t>(c)]) / static_cast<double>(uni[static_cast<size_t>(c)]);
    ++present;
  }
  require(present > 0, "BAD_ARGUMENT", "mean_iou: no classes present");
  return sum / present;
}

double mean_l1(const std::vector<float>& predictions, const std::vector<float>& labels) {
  require(!predictions.empty(), "BAD_ARGUMENT", "mean_l1: empty input");
  require(predictions.size() == labels.size(), "SHAPE_MISMATCH", "mean_l1: prediction/label size mismatch");
  double acc = 0.0;
  for (size_t i = 0; i < predictions.size(); ++i) acc += std::abs(static_cast<double>(predictions[i]) - labels[i]);
  return acc / static_cast<double>(predictions.size());
}

void MetricAccumulator::add_classes(const std::vector<int>& pred, const std::vector<int>& label) {
  require(spec_.metric != std::string("l1"), "BAD_ARGUMENT", "class predictions on a regression task");
  require(!pred.empty() && pred.size() == label.size(), "SHAPE_MISMATCH", "metric accumulator size mismatch");
  if (inter_.empty()) {
    inter_.assign(static_cast<size_t>(spec_.out_channels), 0);
    uni_.assign(static_cast<size_t>(spec_.out_channels), 0);
  }
  for (size_t i = 0; i < pred.size(); ++i) {
    const int p = pred[i], l = label[i];
    require(0 <= p && p < spec_.out_channels && 0 <= l && l < spec_.out_channels, "BAD_ARGUMENT",
            "metric accumulator: class out of range");
    if (p == l) {
      ++correct_;
      ++inter_[static_cast<size_t>(p)];
      ++uni_[static_cast<size_t>(p)];
    } else {
      ++uni_[static_cast<size_t>(p)];
      ++uni_[static_cast<size_t>(l)];
    }
    ++total_;
  }
}

void MetricAccumulator::add_values(const std::vector<float>& pred, const std::vector<float>& label) {
  require(spec_.metric == std::string("l1"), "BAD_ARGUMENT", "value predictions on a classification task");
  require(!pred.empty() && pred.size() == label.size(), "SHAPE_MISMATCH", "metric accumulator size mismatch");
  for (size_t i = 0; i < pred.size(); ++i) abs_sum_ += std::abs(static_cast<double>(pred[i]) - label[i]);
  count_ += static_cast<int64_t>(pred.size());
}

double MetricAccumulator::value() const {
  const std::string metric = spec_.metric;
  if (metric == "acc") {
    require(total_ > 0, "BAD_ARGUMENT", "metric accumulator is empty");
    return static_cast<double>(correct_) / static_cast<double>(total_);
  }
  if (metric == "miou") {
    require(total_ > 0, "BAD_ARGUMENT", "metric accumulator is empty");
    double sum = 0.0;
    int present = 0;
    for (size_t c = 0; c < uni_.size(); ++c) {
      if (uni_[c] == 0) continue;
      sum += static_cast<double>(inter_[c]) / static_cast<double>(uni_[c]);
      ++present;
    }
    return sum / present;
  }
  require(count_ > 0, "BAD_ARGUMENT", "metric accumulator is empty");
  return abs_sum_ / static_cast<double>(count_);
}

}  // namespace txc::bench
