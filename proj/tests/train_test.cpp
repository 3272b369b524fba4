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

#include "taxocodec/train/experiments.hpp"

using namespace txc;
using bench::TaskId;

namespace {

// Tiny bench with seeded but untrained frozen nets; training dynamics are
// exercised without the cost of full pretraining.
bench::TaskBench tiny_bench(uint64_t seed, int n_train = 64, int n_val = 24, int n_test = 24) {
  bench::TaskBench b;
  b.splits = bench::generate_splits(seed, n_train, n_val, n_test);
  for (const auto& spec : bench::kTaskSpecs) {
    Rng rng(substream(seed, std::string("net.") + spec.name));
    auto net = std::make_shared<bench::TaskNet<float>>(spec.id, rng);
    net->set_trainable(false);
    b.nets[spec.id] = std::move(net);
  }
  return b;
}

agg::AggregateConfig tiny_agg_config() {
  agg::AggregateConfig acfg;
  acfg.port_channels = 4;
  acfg.peripheral_hidden = 6;
  acfg.split_hidden = 6;
  acfg.port_h = bench::kFeatureSize;
  acfg.port_w = bench::kFeatureSize;
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

train::RDConfig tiny_rd_config(int steps) {
  train::RDConfig cfg;
  cfg.steps = steps;
  cfg.batch = 4;
  cfg.seed = 3;
  cfg.val_every = 0;  // no checkpoint selection in the tiny runs
  cfg.val_samples = 8;
  return cfg;
}

}  // namespace

TEST(RdLoss, DegenerateWeightingKeepsOnlyRate) {
  train::RDConfig cfg;
  cfg.lambdas = {0.0, 0.0};
  cfg.source_pixels = 4096;
  EXPECT_DOUBLE_EQ(train::rd_loss(128.0, {0.7, 0.9}, cfg), 128.0 / 4096.0);
}

TEST(RdLoss, ControlGroupKeepsOnlyDistortion) {
  train::RDConfig cfg;
  cfg.lambdas = {1.0};
  cfg.rate_term_enabled = false;
  EXPECT_DOUBLE_EQ(train::rd_loss(9999.0, {0.35}, cfg), 0.35);
}

TEST(RdLoss, ArithmeticOracle) {
  train::RDConfig cfg;
  cfg.lambdas = {1.0, 2.0};
  cfg.source_pixels = 64 * 64;
  EXPECT_DOUBLE_EQ(train::rd_loss(128.0, {0.5, 0.25}, cfg), 1.03125);
}

TEST(RdLoss, LinearInEachLambdaWithDistortionSlope) {
  train::RDConfig cfg;
  cfg.lambdas = {0.8, 1.6, 0.2};
  cfg.source_pixels = 4096;
  const std::vector<double> d{0.3, 0.7, 1.1};
  const double bits = 512.0;
  for (size_t i = 0; i < d.size(); ++i) {
    auto up = cfg;
    up.lambdas[i] += 1e-3;
    auto down = cfg;
    down.lambdas[i] -= 1e-3;
    const double slope = (train::rd_loss(bits, d, up) - train::rd_loss(bits, d, down)) / 2e-3;
    EXPECT_NEAR(slope, d[i], 1e-9);
  }
}

TEST(Plateau, FixtureFromDefinition) {
  train::RDCurve curve;
  const double bpps[] = {0.01, 0.02, 0.04, 0.08};
  const double dists[] = {0.30, 0.20, 0.19, 0.19};
  for (int i = 0; i < 4; ++i) {
    train::RDPoint p;
    p.bpp = bpps[i];
    p.distortions = {dists[i]};
    curve.points.push_back(p);
  }
  auto plateau = train::plateau_search(curve, {0.19}, {false}, 0.02);
  ASSERT_TRUE(plateau.has_value());
  EXPECT_DOUBLE_EQ(*plateau, 0.04);
}

TEST(Plateau, UnreachableControlIsInfeasible) {
  train::RDCurve curve;
  train::RDPoint p;
  p.bpp = 0.5;
  p.distortions = {1.0};
  curve.points.push_back(p);
  EXPECT_FALSE(train::plateau_search(curve, {0.1}, {false}, 0.02).has_value());
}

TEST(Plateau, SingletonQualifyingPoint) {
  train::RDCurve curve;
  train::RDPoint p;
  p.bpp = 0.125;
  p.distortions = {0.95};
  curve.points.push_back(p);
  auto plateau = train::plateau_search(curve, {1.0}, {false}, 0.02);
  ASSERT_TRUE(plateau.has_value());
  EXPECT_DOUBLE_EQ(*plateau, 0.125);
}

TEST(Plateau, HigherBetterDirection) {
  train::RDCurve curve;
  train::RDPoint lo, hi;
  lo.bpp = 0.01;
  lo.distortions = {0.70};  // accuracy below the band
  hi.bpp = 0.05;
  hi.distortions = {0.79};
  curve.points = {lo, hi};
  auto plateau = train::plateau_search(curve, {0.80}, {true}, 0.02);
  ASSERT_TRUE(plateau.has_value());
  EXPECT_DOUBLE_EQ(*plateau, 0.05);
}

TEST(Plateau, MonotoneInEps) {
  Rng rng(44);
  train::RDCurve curve;
  for (int i = 0; i < 12; ++i) {
    train::RDPoint p;
    p.bpp = rng.next_uniform(0.001, 0.2);
    p.distortions = {rng.next_uniform(0.1, 0.4), rng.next_uniform(0.5, 1.0)};
    curve.points.push_back(p);
  }
  const std::vector<double> control{0.2, 0.9};
  const std::vector<bool> dirs{false, true};
  double prev = std::numeric_limits<double>::infinity();
  for (double eps : {0.0, 0.01, 0.02, 0.05, 0.1, 0.5}) {
    auto plateau = train::plateau_search(curve, control, dirs, eps);
    const double value = plateau ? *plateau : std::numeric_limits<double>::infinity();
    EXPECT_LE(value, prev) << "eps " << eps;
    if (plateau) prev = value;
  }
}

TEST(Plateau, EmptyCurveRejected) {
  train::RDCurve curve;
  EXPECT_THROW(train::plateau_search(curve, {0.1}, {false}, 0.02), Error);
}

TEST(Stage1, ZeroStepsLeaveModelUnchanged) {
  auto bench_obj = tiny_bench(101);
  auto model = train::build_bench_model({TaskId::scene}, tiny_agg_config(), 5);
  const uint64_t before = model.all_params().content_hash();
  train::RDConfig cfg = tiny_rd_config(0);
  cfg.lambdas = {1.0};
  auto result = train::train_stage1(model, bench_obj, cfg);
  EXPECT_TRUE(result.loss_history.empty());
  EXPECT_EQ(model.all_params().content_hash(), before);
}

TEST(Stage1, PinnedSeedReproducesLossHistory) {
  auto run = [] {
    auto bench_obj = tiny_bench(102);
    auto model = train::build_bench_model({TaskId::scene, TaskId::shading}, tiny_agg_config(), 6);
    train::RDConfig cfg = tiny_rd_config(12);
    cfg.lambdas = {1.0, 1.0};
    return train::train_stage1(model, bench_obj, cfg).loss_history;
  };
  EXPECT_EQ(run(), run());
}

TEST(Stage1, MutatesExactlyTheDeclaredParameterGroups) {
  auto bench_obj = tiny_bench(103);
  const uint64_t analytics_before = bench_obj.analytics_hash();
  auto model = train::build_bench_model({TaskId::scene, TaskId::seg}, tiny_agg_config(), 7);

  nn::ParamSet<float> codec_set, periph_set, split_set;
  model.collect_codec(codec_set);
  model.collect_peripherals(periph_set);
  model.collect_splits(split_set);
  const uint64_t codec_before = codec_set.content_hash();
  const uint64_t periph_before = periph_set.content_hash();
  const uint64_t split_before = split_set.content_hash();

  train::RDConfig cfg = tiny_rd_config(10);
  cfg.lambdas = {1.0, 1.0};
  train::train_stage1(model, bench_obj, cfg);

  EXPECT_EQ(bench_obj.analytics_hash(), analytics_before);  // frozen analytics
  EXPECT_NE(codec_set.content_hash(), codec_before);
  EXPECT_NE(periph_set.content_hash(), periph_before);
  EXPECT_NE(split_set.content_hash(), split_before);
}

TEST(Stage1, RequiresUnfrozenModelAndMatchingLambdas) {
  auto bench_obj = tiny_bench(104);
  auto model = train::build_bench_model({TaskId::scene}, tiny_agg_config(), 8);
  train::RDConfig bad = tiny_rd_config(1);
  bad.lambdas = {1.0, 2.0};
  EXPECT_THROW(train::train_stage1(model, bench_obj, bad), Error);
  model.freeze();
  train::RDConfig cfg = tiny_rd_config(1);
  cfg.lambdas = {1.0};
  EXPECT_THROW(train::train_stage1(model, bench_obj, cfg), Error);
}

TEST(Stage2, MutatesOnlyTheNewDecoderAndKeepsBitstreamsInvariant) {
  auto bench_obj = tiny_bench(105);
  auto model = train::build_bench_model({TaskId::scene, TaskId::seg}, tiny_agg_config(), 9);
  train::RDConfig cfg = tiny_rd_config(8);
  cfg.lambdas = {1.0, 1.0};
  train::train_stage1(model, bench_obj, cfg);
  model.freeze();

  auto stage1_params = model.stage1_params();
  const uint64_t frozen_before = stage1_params.content_hash();
  const uint64_t analytics_before = bench_obj.analytics_hash();

  auto feature_s = bench_obj.feature_batch(bench::Split::val, TaskId::scene, {0});
  auto feature_g = bench_obj.feature_batch(bench::Split::val, TaskId::seg, {0});
  const auto bytes_before = codec::emit_bitstream(agg::aggregate_compress(model, {feature_s, feature_g}).bitstream);

  train::RDConfig s2 = tiny_rd_config(8);
  s2.lambdas = {1.0};
  s2.rate_term_enabled = false;
  auto [decoder, result] = train::train_stage2_unseen(model, bench_obj, TaskId::count, s2);
  EXPECT_EQ(result.loss_history.size(), 8u);

  EXPECT_EQ(stage1_params.content_hash(), frozen_before);
  EXPECT_EQ(bench_obj.analytics_hash(), analytics_before);
  const auto bytes_after = codec::emit_bitstream(agg::aggregate_compress(model, {feature_s, feature_g}).bitstream);
  EXPECT_EQ(bytes_before, bytes_after);
}

TEST(Stage2, RequiresFrozenModel) {
  auto bench_obj = tiny_bench(106);
  auto model = train::build_bench_model({TaskId::scene}, tiny_agg_config(), 10);
  train::RDConfig cfg = tiny_rd_config(2);
  cfg.lambdas = {1.0};
  EXPECT_THROW(train::train_stage2_unseen(model, bench_obj, TaskId::count, cfg), Error);
}

TEST(Stage1, DivergenceAbortsWithStepIndex) {
  auto bench_obj = tiny_bench(107);
  auto model = train::build_bench_model({TaskId::scene}, tiny_agg_config(), 11);
  // Poison one encoder weight so the first forward pass goes non-finite.
  nn::ParamSet<float> codec_set;
  model.collect_codec(codec_set);
  codec_set.items()[0].param->value->data[0] = std::numeric_limits<float>::infinity();
  train::RDConfig cfg = tiny_rd_config(4);
  cfg.lambdas = {1.0};
  try {
    train::train_stage1(model, bench_obj, cfg);
    FAIL() << "expected divergence abort";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "DIVERGED");
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(CurveStudy, AveragingAndCsvShape) {
  train::CurveStudy study;
  study.tasks = {TaskId::scene};
  for (uint64_t seed : {1u, 2u}) {
    train::EvalPoint p;
    p.lambda = 0.5;
    p.seed = seed;
    p.bpp = seed == 1 ? 0.02 : 0.04;
    p.metrics = {seed == 1 ? 0.8 : 0.9};
    study.raw.push_back(p);
    train::EvalPoint c;
    c.control = true;
    c.seed = seed;
    c.metrics = {0.95};
    study.controls.push_back(c);
  }
  auto curve = study.averaged_curve();
  ASSERT_EQ(curve.points.size(), 1u);
  EXPECT_DOUBLE_EQ(curve.points[0].bpp, 0.03);
  EXPECT_DOUBLE_EQ(curve.points[0].distortions[0], 0.85);
  EXPECT_DOUBLE_EQ(study.control_metrics()[0], 0.95);

  const auto csv = train::curve_csv(study, 0x1234);
  EXPECT_NE(csv.find("lambda_set,seed,bpp,scene_acc"), std::string::npos);
  EXPECT_NE(csv.find("control"), std::string::npos);
  EXPECT_NE(csv.find("config_hash"), std::string::npos);
}
