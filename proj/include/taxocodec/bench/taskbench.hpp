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

#ifndef TAXOCODEC_BENCH_TASKBENCH_HPP_
#define TAXOCODEC_BENCH_TASKBENCH_HPP_

#include <map>
#include <memory>

#include "taxocodec/bench/tasknet.hpp"

namespace txc::bench {

enum class Split { train = 0, val, test };

// Dataset splits plus the frozen pretrained task networks. Tap features of
// the frozen stems are immutable, so they are computed once per split and
// cached; compression training then never re-runs the stems.
class TaskBench {
 public:
  TaskBench() = default;

  BenchSplits splits;
  std::map<TaskId, std::shared_ptr<TaskNet<float>>> nets;
  std::map<TaskId, PretrainReport> reports;

  const Dataset& dataset(Split s) const {
    switch (s) {
      case Split::train:
        return splits.train;
      case Split::val:
        return splits.val;
      default:
        return splits.test;
    }
  }

  const TaskNet<float>& net(TaskId t) const {
    auto it = nets.find(t);
    require(it != nets.end(), "UNKNOWN_TASK", std::string("no pretrained network for task ") + task_name(t));
    return *it->second;
  }

  // Combined hash over every pretrained analytics weight; must be bitwise
  // stable across both training stages.
  uint64_t analytics_hash() const;

  // (|idx|, 12, 16, 16) batch of cached tap features.
  nn::TensorPtr<float> feature_batch(Split split, TaskId task, const std::vector<int>& idx);

 private:
  void ensure_cached(Split split, TaskId task);

  std::map<std::pair<int, TaskId>, std::vector<std::vector<float>>> cache_;
};

// Generates (or loads) the splits and pretrains all six task networks.
TaskBench make_taskbench(BenchSplits splits, const PretrainConfig& cfg);

}  // namespace txc::bench

#endif  // TAXOCODEC_BENCH_TASKBENCH_HPP_
