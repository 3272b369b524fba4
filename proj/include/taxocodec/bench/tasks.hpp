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

#ifndef TAXOCODEC_BENCH_TASKS_HPP_
#define TAXOCODEC_BENCH_TASKS_HPP_

#include <array>
#include <string>
#include <vector>

#include "taxocodec/error.hpp"

namespace txc::bench {

inline constexpr int kImageSize = 64;
inline constexpr int kSceneClasses = 4;
inline constexpr int kCountClasses = 4;
inline constexpr int kSegClasses = 4;  // background + three shape types

// Six synthetic tasks: three semantic (scene class, object count,
// segmentation) and three geometric (orientation field, shading, edges).
enum class TaskId { scene = 0, count, seg, orient, shading, edges };

struct TaskSpec {
  TaskId id;
  const char* name;
  bool classification;  // classification head vs dense map head
  int out_channels;     // classes for classification, map channels otherwise
  bool higher_better;   // direction of the eval metric
  const char* metric;   // "acc", "miou" or "l1"
};

inline constexpr std::array<TaskSpec, 6> kTaskSpecs = {{
    {TaskId::scene, "scene", true, kSceneClasses, true, "acc"},
    {TaskId::count, "count", true, kCountClasses, true, "acc"},
    {TaskId::seg, "seg", false, kSegClasses, true, "miou"},
    {TaskId::orient, "orient", false, 2, false, "l1"},
    {TaskId::shading, "shading", false, 1, false, "l1"},
    {TaskId::edges, "edges", false, 1, false, "l1"},
}};

inline const TaskSpec& task_spec(TaskId id) { return kTaskSpecs[static_cast<size_t>(id)]; }

inline const char* task_name(TaskId id) { return task_spec(id).name; }

inline TaskId parse_task(const std::string& name) {
  for (const auto& spec : kTaskSpecs)
    if (name == spec.name) return spec.id;
  fail("UNKNOWN_TASK", "no task named '" + name + "'");
}

inline std::vector<TaskId> parse_task_list(const std::string& csv) {
  std::vector<TaskId> out;
  size_t pos = 0;
  while (pos <= csv.size()) {
    const size_t comma = csv.find(',', pos);
    const std::string item = csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    if (!item.empty()) out.push_back(parse_task(item));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  require(!out.empty(), "BAD_CONFIG", "empty task list '" + csv + "'");
  return out;
}

}  // namespace txc::bench

#endif  // TAXOCODEC_BENCH_TASKS_HPP_
