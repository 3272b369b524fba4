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

#include "taxocodec/agg/aggregate.hpp"

#include "taxocodec/codec/checkpoint.hpp"

namespace txc::agg {

codec::CompressOutput aggregate_compress(const AggregateModel<float>& m,
                                         const std::vector<nn::TensorPtr<float>>& features) {
  return codec::compress(m.shared_codec, m.fuse(features));
}

SharedDecode aggregate_decode_shared(const AggregateModel<float>& m, const codec::Bitstream& bs) {
  const auto symbols = codec::decompress_symbols(m.shared_codec, bs);
  SharedDecode out;
  out.latent_hash = fnv1a64_values(symbols.z.symbols);
  out.decoded = codec::synthesize_features(m.shared_codec, symbols.z);
  return out;
}

nn::TensorPtr<float> aggregate_split(const AggregateModel<float>& m, const SharedDecode& shared,
                                     const std::string& task_id) {
  const int pi = m.port_index(task_id);
  if (pi >= 0) return m.ports[static_cast<size_t>(pi)].split(shared.decoded);
  const int ui = m.unseen_index(task_id);
  if (ui >= 0) return m.unseen[static_cast<size_t>(ui)].decode(shared.decoded);
  fail("UNKNOWN_TASK", "no registered port or unseen decoder for task '" + task_id + "'");
}

nn::TensorPtr<float> aggregate_decompress(const AggregateModel<float>& m, const codec::Bitstream& bs,
                                          const std::string& task_id) {
  require(m.port_index(task_id) >= 0 || m.unseen_index(task_id) >= 0, "UNKNOWN_TASK",
          "no registered port or unseen decoder for task '" + task_id + "'");
  return aggregate_split(m, aggregate_decode_shared(m, bs), task_id);
}

void attach_unseen_decoder(AggregateModel<float>& m, UnseenDecoder<float> decoder) {
  require(m.frozen, "NOT_FROZEN", "unseen decoders may only be attached to a frozen stage-2 model");
  require(m.port_index(decoder.task_id) < 0 && m.unseen_index(decoder.task_id) < 0, "BAD_CONFIG",
          "task '" + decoder.task_id + "' already has a decoder");
  m.unseen.push_back(std::move(decoder));
}

void save_aggregate(const std::string& path, AggregateModel<float>& m, const nlohmann::json& extra_meta) {
  nlohmann::json meta = extra_meta;
  meta["kind"] = "aggregate";
  meta["frozen"] = m.frozen;
  meta["codec_config"] = m.shared_codec.cfg;
  meta["agg"] = {{"port_channels", m.acfg.port_channels},
                 {"peripheral_hidden", m.acfg.peripheral_hidden},
                 {"split_hidden", m.acfg.split_hidden},
                 {"port_h", m.acfg.port_h},
                 {"port_w", m.acfg.port_w}};
  meta["codebook_hash"] = m.shared_codec.codebook.content_hash();
  nlohmann::json ports = nlohmann::json::array();
  for (const auto& p : m.ports) {
    ports.push_back({{"task_id", p.task_id},
                     {"feature_shape", p.feature_shape},
                     {"identity", p.identity}});
  }
  meta["ports"] = ports;
  nlohmann::json unseen = nlohmann::json::array();
  for (const auto& u : m.unseen) unseen.push_back({{"task_id", u.task_id}, {"feature_shape", u.feature_shape}});
  meta["unseen"] = unseen;
  auto params = m.all_params();
  codec::save_checkpoint(path, meta, params);
}

AggregateModel<float> load_aggregate(const std::string& path) {
  const auto meta = codec::peek_checkpoint_meta(path);
  require(meta.value("kind", "") == std::string("aggregate"), "BAD_CHECKPOINT",
          path + " is not an aggregate model checkpoint");

  AggregateConfig acfg;
  const auto& ja = meta.at("agg");
  acfg.port_channels = ja.at("port_channels").get<int>();
  acfg.peripheral_hidden = ja.at("peripheral_hidden").get<int>();
  acfg.split_hidden = ja.at("split_hidden").get<int>();
  acfg.port_h = ja.at("port_h").get<int>();
  acfg.port_w = ja.at("port_w").get<int>();
  acfg.codec_base = meta.at("codec_config").get<codec::CodecConfig>();

  std::vector<PortSpec> specs;
  for (const auto& jp : meta.at("ports")) {
    PortSpec spec;
    spec.task_id = jp.at("task_id").get<std::string>();
    spec.feature_shape = jp.at("feature_shape").get<nn::Shape>();
    spec.identity = jp.at("identity").get<bool>();
    specs.push_back(std::move(spec));
  }

  Rng rng(0);  // layout only; every value is overwritten by the checkpoint
  auto m = make_aggregate_model<float>(specs, acfg, rng);
  for (const auto& ju : meta.at("unseen")) {
    m.unseen.emplace_back(ju.at("task_id").get<std::string>(), ju.at("feature_shape").get<nn::Shape>(), m.acfg,
                          m.fused_channels(), rng);
  }
  auto params = m.all_params();
  codec::load_checkpoint(path, params);
  const bool frozen = meta.at("frozen").get<bool>();
  if (frozen) {
    m.freeze();
  }
  const uint32_t expect_hash = meta.at("codebook_hash").get<uint32_t>();
  require(m.shared_codec.codebook.content_hash() == expect_hash, "HASH_MISMATCH",
          "codebook hash drifted across the checkpoint round trip");
  return m;
}

}  // namespace txc::agg
