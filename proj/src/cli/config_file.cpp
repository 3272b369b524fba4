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

#include "taxocodec/cli/config_file.hpp"

#include <fstream>

#include "taxocodec/hash.hpp"

namespace txc::cli {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

const std::map<std::string, std::string>& default_values() {
  static const std::map<std::string, std::string> defaults = {
      {"bench.seed", "7"},
      {"bench.train", "4096"},
      {"bench.val", "512"},
      {"bench.test", "512"},
      {"pretrain.steps", "700"},
      {"pretrain.batch", "16"},
      {"pretrain.lr", "0.001"},
      {"pretrain.eval_samples", "256"},
      {"pretrain.min_scene_acc", "0.90"},
      {"pretrain.min_count_acc", "0.60"},
      {"pretrain.min_seg_miou", "0.50"},
      {"pretrain.max_orient_l1", "0.45"},
      {"pretrain.max_shading_l1", "0.10"},
      {"pretrain.max_edges_l1", "0.08"},
      {"codec.latent_channels", "12"},
      {"codec.hyper_j", "8"},
      {"codec.tau", "8"},
      {"codec.codebook_s", "16"},
      {"codec.prior_n", "16"},
      {"codec.enc_hidden", "24"},
      {"codec.dec_hidden", "24"},
      {"codec.hyper_hidden", "16"},
      {"codec.head_hidden", "24"},
      {"codec.alphabet_min", "-64"},
      {"codec.alphabet_max", "63"},
      {"agg.port_channels", "8"},
      {"agg.peripheral_hidden", "10"},
      {"agg.split_hidden", "10"},
      {"train.steps", "600"},
      {"train.batch", "8"},
      {"train.lr", "0.001"},
      {"train.val_every", "100"},
      {"train.val_samples", "48"},
      {"train.eval_samples", "96"},
      {"train.lambda_grid", "0.015625,0.03125,0.0625,0.125,0.25,0.5,1,2,4,8,16,32,64"},
      {"train.seeds", "1,2,3"},
      {"train.plateau_eps", "0.02"},
      {"tasks", "scene,count,seg,orient,shading,edges"},
      {"group", "scene,count,seg"},
      {"unseen.supervised", "scene,seg"},
      {"unseen.task", "count"},
      {"unseen.lambda", "1"},
  };
  return defaults;
}

template <typename T>
std::vector<T> split_numbers(const std::string& csv, const std::string& key) {
  std::vector<T> out;
  size_t pos = 0;
  while (pos <= csv.size()) {
    const size_t comma = csv.find(',', pos);
    const std::string item = trim(csv.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos));
    if (!item.empty()) {
      try {
        if constexpr (std::is_same_v<T, double>)
          out.push_back(std::stod(item));
        else
          out.push_back(static_cast<T>(std::stoull(item)));
      } catch (const std::exception&) {
        fail("BAD_CONFIG", "key " + key + ": '" + item + "' is not a number");
      }
    }
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  require(!out.empty(), "BAD_CONFIG", "key " + key + " holds no values");
  return out;
}

}  // namespace

ExperimentConfig::ExperimentConfig() : values_(default_values()) {}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream f(path);
  require(f.good(), "CONFIG_NOT_FOUND", path);
  ExperimentConfig cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const size_t hash_pos = line.find('#');
    if (hash_pos != std::string::npos) line = line.substr(0, hash_pos);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    require(eq != std::string::npos, "BAD_CONFIG", path + ":" + std::to_string(lineno) + ": expected key = value");
    cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  require(values_.count(key) > 0, "BAD_CONFIG", "unknown configuration key '" + key + "'");
  values_[key] = value;
}

const std::string& ExperimentConfig::gets(const std::string& key) const {
  auto it = values_.find(key);
  require(it != values_.end(), "BAD_CONFIG", "unknown configuration key '" + key + "'");
  return it->second;
}

int ExperimentConfig::geti(const std::string& key) const {
  try {
    return std::stoi(gets(key));
  } catch (const std::exception&) {
    fail("BAD_CONFIG", "key " + key + ": '" + gets(key) + "' is not an integer");
  }
}

double ExperimentConfig::getd(const std::string& key) const {
  try {
    return std::stod(gets(key));
  } catch (const std::exception&) {
    fail("BAD_CONFIG", "key " + key + ": '" + gets(key) + "' is not a number");
  }
}

std::vector<double> ExperimentConfig::get_reals(const std::string& key) const {
  return split_numbers<double>(gets(key), key);
}

std::vector<uint64_t> ExperimentConfig::get_u64s(const std::string& key) const {
  return split_numbers<uint64_t>(gets(key), key);
}

std::string ExperimentConfig::dump() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

uint64_t ExperimentConfig::hash() const {
  const std::string d = dump();
  return fnv1a64(d.data(), d.size());
}

bench::PretrainConfig ExperimentConfig::pretrain_config() const {
  bench::PretrainConfig cfg;
  cfg.steps = geti("pretrain.steps");
  cfg.batch = geti("pretrain.batch");
  cfg.lr = getd("pretrain.lr");
  cfg.seed = static_cast<uint64_t>(geti("bench.seed"));
  cfg.eval_samples = geti("pretrain.eval_samples");
  cfg.min_scene_acc = getd("pretrain.min_scene_acc");
  cfg.min_count_acc = getd("pretrain.min_count_acc");
  cfg.min_seg_miou = getd("pretrain.min_seg_miou");
  cfg.max_orient_l1 = getd("pretrain.max_orient_l1");
  cfg.max_shading_l1 = getd("pretrain.max_shading_l1");
  cfg.max_edges_l1 = getd("pretrain.max_edges_l1");
  return cfg;
}

agg::AggregateConfig ExperimentConfig::agg_config() const {
  agg::AggregateConfig acfg;
  acfg.port_channels = geti("agg.port_channels");
  acfg.peripheral_hidden = geti("agg.peripheral_hidden");
  acfg.split_hidden = geti("agg.split_hidden");
  acfg.port_h = bench::kFeatureSize;
  acfg.port_w = bench::kFeatureSize;
  acfg.codec_base.latent_channels = geti("codec.latent_channels");
  acfg.codec_base.hyper_j = geti("codec.hyper_j");
  acfg.codec_base.tau = geti("codec.tau");
  acfg.codec_base.codebook_s = geti("codec.codebook_s");
  acfg.codec_base.prior_n = geti("codec.prior_n");
  acfg.codec_base.enc_hidden = geti("codec.enc_hidden");
  acfg.codec_base.dec_hidden = geti("codec.dec_hidden");
  acfg.codec_base.hyper_hidden = geti("codec.hyper_hidden");
  acfg.codec_base.head_hidden = geti("codec.head_hidden");
  acfg.codec_base.alphabet_min = geti("codec.alphabet_min");
  acfg.codec_base.alphabet_max = geti("codec.alphabet_max");
  acfg.codec_base.source_h = bench::kImageSize;
  acfg.codec_base.source_w = bench::kImageSize;
  return acfg;
}

train::RDConfig ExperimentConfig::rd_config() const {
  train::RDConfig cfg;
  cfg.steps = geti("train.steps");
  cfg.batch = geti("train.batch");
  cfg.lr = getd("train.lr");
  cfg.val_every = geti("train.val_every");
  cfg.val_samples = geti("train.val_samples");
  cfg.source_pixels = bench::kImageSize * bench::kImageSize;
  return cfg;
}

train::SweepSettings ExperimentConfig::sweep_settings() const {
  train::SweepSettings settings;
  settings.lambda_grid = get_reals("train.lambda_grid");
  settings.seeds = get_u64s("train.seeds");
  settings.base = rd_config();
  settings.agg = agg_config();
  settings.eval_samples = geti("train.eval_samples");
  return settings;
}

}  // namespace txc::cli
