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

#include "taxocodec/bench/taskbench.hpp"

namespace txc::bench {

uint64_t TaskBench::analytics_hash() const {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& [task, net] : nets) {
    nn::ParamSet<float> set;
    net->collect(set, std::string("net.") + task_name(task));
    const uint64_t nh = set.content_hash();
    h = fnv1a64(&nh, sizeof nh, h);
  }
  return h;
}

void TaskBench::ensure_cached(Split split, TaskId task) {
  const auto key = std::make_pair(static_cast<int>(split), task);
  if (cache_.count(key)) return;
  const Dataset& ds = dataset(split);
  const auto& n = net(task);
  std::vector<std::vector<float>> feats(static_cast<size_t>(ds.size()));
  const int chunk = 32;
  for (int start = 0; start < ds.size(); start += chunk) {
    std::vector<int> idx;
    for (int i = start; i < std::min(ds.size(), start + chunk); ++i) idx.push_back(i);
    auto f = n.features(batch_images<float>(ds, idx));
    const size_t per = static_cast<size_t>(kFeatureChannels) * kFeatureSize * kFeatureSize;
    for (size_t b = 0; b < idx.size(); ++b) {
      feats[static_cast<size_t>(idx[b])].assign(f->data.begin() + static_cast<int64_t>(b * per),
                                                f->data.begin() + static_cast<int64_t>((b + 1) * per));
    }
  }
  cache_.emplace(key, std::move(feats));
}

nn::TensorPtr<float> TaskBench::feature_batch(Split split, TaskId task, const std::vector<int>& idx) {
  require(!idx.empty(), "BAD_ARGUMENT", "feature_batch: empty batch");
  ensure_cached(split, task);
  const auto& feats = cache_.at(std::make_pair(static_cast<int>(split), task));
  const size_t per = static_cast<size_t>(kFeatureChannels) * kFeatureSize * kFeatureSize;
  auto out = nn::make_tensor<float>({static_cast<int>(idx.size()), kFeatureChannels, kFeatureSize, kFeatureSize});
  for (size_t b = 0; b < idx.size(); ++b) {
    const auto& src = feats.at(static_cast<size_t>(idx[b]));
    std::copy(src.begin(), src.end(), out->data.begin() + static_cast<int64_t>(b * per));
  }
  return out;
}

TaskBench make_taskbench(BenchSplits splits, const PretrainConfig& cfg) {
  TaskBench bench;
  bench.splits = std::move(splits);
  for (const auto& spec : kTaskSpecs) {
    Rng rng(substream(cfg.seed, std::string("tasknet.") + spec.name));
    auto net = std::make_shared<TaskNet<float>>(spec.id, rng);
    bench.reports[spec.id] = pretrain(*net, bench.splits, cfg);
    bench.nets[spec.id] = std::move(net);
  }
  return bench;
}

}  // namespace txc::bench
