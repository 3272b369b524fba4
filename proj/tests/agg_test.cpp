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

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>

#include "taxocodec/agg/aggregate.hpp"

using namespace txc;

namespace {

agg::AggregateConfig small_agg_config() {
  agg::AggregateConfig acfg;
  acfg.port_channels = 4;
  acfg.peripheral_hidden = 6;
  acfg.split_hidden = 6;
  acfg.port_h = 8;
  acfg.port_w = 8;
  acfg.codec_base.latent_channels = 6;
  acfg.codec_base.hyper_j = 4;
  acfg.codec_base.tau = 4;
  acfg.codec_base.codebook_s = 8;
  acfg.codec_base.prior_n = 6;
  acfg.codec_base.enc_hidden = 8;
  acfg.codec_base.dec_hidden = 8;
  acfg.codec_base.hyper_hidden = 6;
  acfg.codec_base.head_hidden = 8;
  return acfg;
}

nn::TensorPtr<float> random_feature(const nn::Shape& shape, uint64_t seed) {
  Rng rng(seed);
  nn::Shape batched = {1};
  batched.insert(batched.end(), shape.begin(), shape.end());
  auto t = nn::make_tensor<float>(batched);
  for (auto& v : t->data) v = static_cast<float>(rng.next_uniform(-2.0, 2.0));
  return t;
}

}  // namespace

TEST(Aggregate, SinglePortIdentityReducesToPlainCodec) {
  const auto acfg = small_agg_config();
  Rng rng(5);
  // Identity port: the feature already satisfies the port contract.
  auto m = agg::make_aggregate_model<float>({{"seg", {4, 8, 8}, true}}, acfg, rng);
  auto feature = random_feature({4, 8, 8}, 21);

  auto agg_out = agg::aggregate_compress(m, {feature});
  auto plain_out = codec::compress(m.shared_codec, feature);
  EXPECT_EQ(codec::emit_bitstream(agg_out.bitstream), codec::emit_bitstream(plain_out.bitstream));

  auto agg_rec = agg::aggregate_decompress(m, agg_out.bitstream, "seg");
  auto plain_rec = codec::decompress(m.shared_codec, plain_out.bitstream);
  EXPECT_EQ(agg_rec->data, plain_rec->data);  // bitwise
}

TEST(Aggregate, ChannelBookkeeping) {
  const auto acfg = small_agg_config();
  Rng rng(7);
  auto m = agg::make_aggregate_model<float>({{"scene", {12, 16, 16}, false}, {"seg", {12, 16, 16}, false}}, acfg, rng);
  EXPECT_EQ(m.fused_channels(), 8);
  auto fused = m.fuse({random_feature({12, 16, 16}, 1), random_feature({12, 16, 16}, 2)});
  EXPECT_EQ(fused->shape, (nn::Shape{1, 8, 8, 8}));
}

TEST(Aggregate, MissingOrExtraFeaturesRejected) {
  const auto acfg = small_agg_config();
  Rng rng(9);
  auto m = agg::make_aggregate_model<float>({{"scene", {12, 16, 16}, false}, {"seg", {12, 16, 16}, false}}, acfg, rng);
  try {
    m.fuse({random_feature({12, 16, 16}, 1)});
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "TASK_SET_MISMATCH");
  }
  EXPECT_THROW(
      m.fuse({random_feature({12, 16, 16}, 1), random_feature({12, 16, 16}, 2), random_feature({12, 16, 16}, 3)}),
      Error);
}

TEST(Aggregate, UnknownTaskRejected) {
  const auto acfg = small_agg_config();
  Rng rng(11);
  auto m = agg::make_aggregate_model<float>({{"scene", {12, 16, 16}, false}}, acfg, rng);
  auto out = agg::aggregate_compress(m, {random_feature({12, 16, 16}, 4)});
  try {
    agg::aggregate_decompress(m, out.bitstream, "orient");
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "UNKNOWN_TASK");
  }
}

TEST(Aggregate, SharedDecodeIsSingleEntropyPass) {
  const auto acfg = small_agg_config();
  Rng rng(13);
  auto m = agg::make_aggregate_model<float>({{"scene", {12, 16, 16}, false}, {"seg", {12, 16, 16}, false}}, acfg, rng);
  auto out = agg::aggregate_compress(m, {random_feature({12, 16, 16}, 5), random_feature({12, 16, 16}, 6)});
  auto shared = agg::aggregate_decode_shared(m, out.bitstream);
  auto a = agg::aggregate_split(m, shared, "scene");
  auto b = agg::aggregate_split(m, shared, "seg");
  EXPECT_EQ(a->shape, (nn::Shape{1, 12, 16, 16}));
  EXPECT_EQ(b->shape, (nn::Shape{1, 12, 16, 16}));
  // Both consume the same decoded latent.
  EXPECT_EQ(shared.latent_hash, fnv1a64_values(out.z.symbols));
}

TEST(Aggregate, AttachToUnfrozenModelRejected) {
  const auto acfg = small_agg_config();
  Rng rng(17);
  auto m = agg::make_aggregate_model<float>({{"scene", {12, 16, 16}, false}}, acfg, rng);
  Rng drng(18);
  agg::UnseenDecoder<float> dec("count", {12, 16, 16}, acfg, m.fused_channels(), drng);
  try {
    agg::attach_unseen_decoder(m, std::move(dec));
    FAIL() << "expected rejection";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "NOT_FROZEN");
  }
}

TEST(Aggregate, FrozenCodecInvarianceAcrossAttachment) {
  const auto acfg = small_agg_config();
  Rng rng(19);
  auto m = agg::make_aggregate_model<float>({{"scene", {12, 16, 16}, false}}, acfg, rng);
  auto feature = random_feature({12, 16, 16}, 7);
  m.freeze();
  const auto before = codec::emit_bitstream(agg::aggregate_compress(m, {feature}).bitstream);

  Rng drng(20);
  agg::UnseenDecoder<float> dec("count", {12, 16, 16}, acfg, m.fused_channels(), drng);
  agg::attach_unseen_decoder(m, std::move(dec));
  const auto after = codec::emit_bitstream(agg::aggregate_compress(m, {feature}).bitstream);
  EXPECT_EQ(before, after);

  // The attached decoder answers for its task.
  auto rec = agg::aggregate_decompress(m, agg::aggregate_compress(m, {feature}).bitstream, "count");
  EXPECT_EQ(rec->shape, (nn::Shape{1, 12, 16, 16}));
}

TEST(Aggregate, DuplicateDecoderRejected) {
  const auto acfg = small_agg_config();
  Rng rng(23);
  auto m = agg::make_aggregate_model<float>({{"scene", {12, 16, 16}, false}}, acfg, rng);
  m.freeze();
  Rng drng(24);
  agg::attach_unseen_decoder(m, agg::UnseenDecoder<float>("count", {12, 16, 16}, acfg, m.fused_channels(), drng));
  EXPECT_THROW(
      agg::attach_unseen_decoder(m, agg::UnseenDecoder<float>("count", {12, 16, 16}, acfg, m.fused_channels(), drng)),
      Error);
  EXPECT_THROW(
      agg::attach_unseen_decoder(m, agg::UnseenDecoder<float>("scene", {12, 16, 16}, acfg, m.fused_channels(), drng)),
      Error);
}

TEST(Aggregate, CheckpointRoundTripReproducesCompression) {
  const auto acfg = small_agg_config();
  Rng rng(29);
  auto m = agg::make_aggregate_model<float>({{"scene", {12, 16, 16}, false}, {"count", {12, 16, 16}, false}}, acfg,
                                            rng);
  m.freeze();
  Rng drng(30);
  agg::attach_unseen_decoder(m, agg::UnseenDecoder<float>("seg", {12, 16, 16}, acfg, m.fused_channels(), drng));

  const auto path = (std::filesystem::temp_directory_path() / "txc_agg_test.ckpt").string();
  agg::save_aggregate(path, m, {{"note", "test"}});
  auto loaded = agg::load_aggregate(path);
  EXPECT_TRUE(loaded.frozen);
  ASSERT_EQ(loaded.unseen.size(), 1u);

  auto f0 = random_feature({12, 16, 16}, 8);
  auto f1 = random_feature({12, 16, 16}, 9);
  auto a = agg::aggregate_compress(m, {f0, f1});
  auto b = agg::aggregate_compress(loaded, {f0, f1});
  EXPECT_EQ(codec::emit_bitstream(a.bitstream), codec::emit_bitstream(b.bitstream));

  auto rec_a = agg::aggregate_decompress(m, a.bitstream, "seg");
  auto rec_b = agg::aggregate_decompress(loaded, b.bitstream, "seg");
  EXPECT_EQ(rec_a->data, rec_b->data);
  std::remove(path.c_str());
}
