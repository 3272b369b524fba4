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

#ifndef TAXOCODEC_AGG_AGGREGATE_HPP_
#define TAXOCODEC_AGG_AGGREGATE_HPP_

#include <string>
#include <vector>

#include "taxocodec/codec/codec.hpp"

namespace txc::agg {

struct AggregateConfig {
  int port_channels = 8;
  int peripheral_hidden = 10;
  int split_hidden = 10;
  int port_h = 16;
  int port_w = 16;
  codec::CodecConfig codec_base;  // input dims are overwritten from the ports
};

struct PortSpec {
  std::string task_id;
  nn::Shape feature_shape;  // (C,H,W)
  bool identity = false;    // pass-through peripheral and split (degenerate mode)
};

// Per-task peripheral transform into the shared latent contract plus the
// split decoder back to the task's feature space.
template <typename T>
struct TaskPort {
  std::string task_id;
  nn::Shape feature_shape;
  bool identity = false;
  nn::Conv2dLayer<T> p0, p1;  // peripheral: feature -> hidden -> port channels
  nn::Conv2dLayer<T> s0, s1;  // split: fused reconstruction -> hidden -> feature channels

  TaskPort() = default;
  TaskPort(const PortSpec& spec, const AggregateConfig& acfg, int fused_channels, Rng& rng)
      : task_id(spec.task_id), feature_shape(spec.feature_shape), identity(spec.identity) {
    require(feature_shape.size() == 3, "SHAPE_MISMATCH", "port feature shape must be (C,H,W)");
    if (identity) {
      require(feature_shape[0] == acfg.port_channels && feature_shape[1] == acfg.port_h &&
                  feature_shape[2] == acfg.port_w && fused_channels == acfg.port_channels,
              "BAD_CONFIG", "identity port requires the feature to already match the port contract");
      return;
    }
    p0 = nn::Conv2dLayer<T>(feature_shape[0], acfg.peripheral_hidden, 3, 1, 1, rng);
    p1 = nn::Conv2dLayer<T>(acfg.peripheral_hidden, acfg.port_channels, 3, 1, 1, rng);
    s0 = nn::Conv2dLayer<T>(fused_channels, acfg.split_hidden, 3, 1, 1, rng);
    s1 = nn::Conv2dLayer<T>(acfg.split_hidden, feature_shape[0], 3, 1, 1, rng);
  }

  // (N,C,H,W) task feature -> (N, port_channels, port_h, port_w).
  nn::TensorPtr<T> peripheral(const nn::TensorPtr<T>& x, const AggregateConfig& acfg) const {
    require(x->shape.size() == 4 && x->dim(1) == feature_shape[0] && x->dim(2) == feature_shape[1] &&
                x->dim(3) == feature_shape[2],
            "SHAPE_MISMATCH",
            "port " + task_id + " expects feature " + nn::shape_str(feature_shape) + ", got " +
                nn::shape_str(x->shape));
    if (identity) return x;
    auto h = x;
    if (feature_shape[1] != acfg.port_h || feature_shape[2] != acfg.port_w)
      h = nn::bilinear_resize(h, acfg.port_h, acfg.port_w);
    return p1.forward(nn::relu(p0.forward(h)));
  }

  // Fused reconstruction -> this task's feature tensor.
  nn::TensorPtr<T> split(const nn::TensorPtr<T>& decoded) const {
    if (identity) return decoded;
    auto h = s1.forward(nn::relu(s0.forward(decoded)));
    if (h->dim(2) != feature_shape[1] || h->dim(3) != feature_shape[2])
      h = nn::bilinear_resize(h, feature_shape[1], feature_shape[2]);
    return h;
  }

  void collect_peripheral(nn::ParamSet<T>& set, const std::string& prefix) {
    if (identity) return;
    p0.collect(set, prefix + ".p0");
    p1.collect(set, prefix + ".p1");
  }

  void collect_split(nn::ParamSet<T>& set, const std::string& prefix) {
    if (identity) return;
    s0.collect(set, prefix + ".s0");
    s1.collect(set, prefix + ".s1");
  }
};

// Decoder for a task that never supervised stage-1 training; consumes the
// same shared reconstruction the split decoders read.
template <typename T>
struct UnseenDecoder {
  std::string task_id;
  nn::Shape feature_shape;
  nn::Conv2dLayer<T> s0, s1;

  UnseenDecoder() = default;
  UnseenDecoder(std::string task_id_, nn::Shape feature_shape_, const AggregateConfig& acfg, int fused_channels,
                Rng& rng)
      : task_id(std::move(task_id_)),
        feature_shape(std::move(feature_shape_)),
        s0(fused_channels, acfg.split_hidden, 3, 1, 1, rng),
        s1(acfg.split_hidden, feature_shape[0], 3, 1, 1, rng) {}

  nn::TensorPtr<T> decode(const nn::TensorPtr<T>& decoded) const {
    auto h = s1.forward(nn::relu(s0.forward(decoded)));
    if (h->dim(2) != feature_shape[1] || h->dim(3) != feature_shape[2])
      h = nn::bilinear_resize(h, feature_shape[1], feature_shape[2]);
    return h;
  }

  void collect(nn::ParamSet<T>& set, const std::string& prefix) {
    s0.collect(set, prefix + ".s0");
    s1.collect(set, prefix + ".s1");
  }
};

// Aggregation transformed compression: peripheral transforms feed a single
// shared codec over the channel-concatenated latent; split decoders and any
// stage-2 unseen decoders consume the shared reconstruction.
template <typename T>
struct AggregateModel {
  AggregateConfig acfg;
  std::vector<TaskPort<T>> ports;
  codec::CodecModel<T> shared_codec;
  std::vector<UnseenDecoder<T>> unseen;
  bool frozen = false;

  int fused_channels() const { return static_cast<int>(ports.size()) * acfg.port_channels; }

  int port_index(const std::string& task_id) const {
    for (size_t i = 0; i < ports.size(); ++i)
      if (ports[i].task_id == task_id) return static_cast<int>(i);
    return -1;
  }

  int unseen_index(const std::string& task_id) const {
    for (size_t i = 0; i < unseen.size(); ++i)
      if (unseen[i].task_id == task_id) return static_cast<int>(i);
    return -1;
  }

  // Concatenates the peripheral outputs along channels; one feature per port.
  nn::TensorPtr<T> fuse(const std::vector<nn::TensorPtr<T>>& features) const {
    require(features.size() == ports.size(), "TASK_SET_MISMATCH",
            "expected " + std::to_string(ports.size()) + " task features, got " + std::to_string(features.size()));
    std::vector<nn::TensorPtr<T>> transformed;
    transformed.reserve(ports.size());
    for (size_t i = 0; i < ports.size(); ++i) transformed.push_back(ports[i].peripheral(features[i], acfg));
    return transformed.size() == 1 ? transformed[0] : nn::concat_channels(transformed);
  }

  void collect_codec(nn::ParamSet<T>& set) { shared_codec.collect(set, "codec"); }
  void collect_peripherals(nn::ParamSet<T>& set) {
    for (auto& p : ports) p.collect_peripheral(set, "port." + p.task_id);
  }
  void collect_splits(nn::ParamSet<T>& set) {
    for (auto& p : ports) p.collect_split(set, "split." + p.task_id);
  }
  void collect_unseen(nn::ParamSet<T>& set) {
    for (auto& u : unseen) u.collect(set, "unseen." + u.task_id);
  }

  // Canonical ordering for checkpoints and whole-model hashes.
  nn::ParamSet<T> all_params() {
    nn::ParamSet<T> set;
    collect_peripherals(set);
    collect_splits(set);
    collect_codec(set);
    collect_unseen(set);
    return set;
  }

  // The exact parameter group stage-1 training may mutate.
  nn::ParamSet<T> stage1_params() {
    nn::ParamSet<T> set;
    collect_peripherals(set);
    collect_splits(set);
    collect_codec(set);
    return set;
  }

  void freeze() {
    auto set = stage1_params();
    for (auto* p : set.params()) p->set_trainable(false);
    frozen = true;
  }
};

template <typename T>
AggregateModel<T> make_aggregate_model(const std::vector<PortSpec>& specs, const AggregateConfig& acfg, Rng& rng) {
  require(!specs.empty(), "BAD_CONFIG", "aggregate model needs at least one port");
  AggregateModel<T> m;
  m.acfg = acfg;
  const int fused = acfg.port_channels * static_cast<int>(specs.size());
  for (const auto& spec : specs) {
    require(m.port_index(spec.task_id) < 0, "BAD_CONFIG", "duplicate port task id " + spec.task_id);
    m.ports.emplace_back(spec, acfg, fused, rng);
  }
  codec::CodecConfig ccfg = acfg.codec_base;
  ccfg.input_channels = fused;
  ccfg.input_h = acfg.port_h;
  ccfg.input_w = acfg.port_w;
  m.shared_codec = codec::CodecModel<T>(ccfg, rng);
  return m;
}

// ---- float-only pipeline entry points (implemented in aggregate.cpp) -------

// Fuses one feature per port and codes the result as a single bitstream.
codec::CompressOutput aggregate_compress(const AggregateModel<float>& m,
                                         const std::vector<nn::TensorPtr<float>>& features);

// One entropy-decode pass shared by all task decodes of a bitstream.
struct SharedDecode {
  nn::TensorPtr<float> decoded;  // (1, fused_channels, port_h, port_w)
  uint64_t latent_hash = 0;      // hash of the decoded integer latent
};

SharedDecode aggregate_decode_shared(const AggregateModel<float>& m, const codec::Bitstream& bs);

// Applies the task's split (or stage-2 unseen) decoder to the shared
// reconstruction. Unknown task ids are rejected.
nn::TensorPtr<float> aggregate_split(const AggregateModel<float>& m, const SharedDecode& shared,
                                     const std::string& task_id);

nn::TensorPtr<float> aggregate_decompress(const AggregateModel<float>& m, const codec::Bitstream& bs,
                                          const std::string& task_id);

// Registers a stage-2 decoder on a frozen model; existing bitstreams are
// unaffected because the coding path never touches the new weights.
void attach_unseen_decoder(AggregateModel<float>& m, UnseenDecoder<float> decoder);

// Checkpoint round trip for the whole aggregate model.
void save_aggregate(const std::string& path, AggregateModel<float>& m, const nlohmann::json& extra_meta);
AggregateModel<float> load_aggregate(const std::string& path);

}  // namespace txc::agg

#endif  // TAXOCODEC_AGG_AGGREGATE_HPP_
