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

#ifndef TAXOCODEC_BENCH_METRICS_HPP_
#define TAXOCODEC_BENCH_METRICS_HPP_

#include <vector>

#include "taxocodec/bench/tasks.hpp"

namespace txc::bench {

// Fraction of matching entries.
double accuracy(const std::vector<int>& predictions, const std::vector<int>& labels);

// Mean over classes of |intersection| / |union|, counted globally over all
// provided positions. Classes absent from both prediction and label are
// skipped.
double mean_iou(const std::vector<int>& predictions, const std::vector<int>& labels, int num_classes);

// Mean absolute difference.
double mean_l1(const std::vector<float>& predictions, const std::vector<float>& labels);

// Incremental accumulator so metrics can be aggregated over a whole split.
class MetricAccumulator {
 public:
  explicit MetricAccumulator(TaskId task) : task_(task), spec_(task_spec(task)) {}

  void add_classes(const std::vector<int>& pred, const std::vector<int>& label);
  void add_values(const std::vector<float>& pred, const std::vector<float>& label);

  // acc / miou / l1 depending on the task.
  double value() const;
  TaskId task() const { return task_; }

 private:
  TaskId task_;
  TaskSpec spec_;
  // classification / segmentation counters
  int64_t correct_ = 0, total_ = 0;
  std::vector<int64_t> inter_, uni_;
  // regression accumulators
  double abs_sum_ = 0.0;
  int64_t count_ = 0;
};

}  // namespace txc::bench

#endif  // TAXOCODEC_BENCH_METRICS_HPP_
