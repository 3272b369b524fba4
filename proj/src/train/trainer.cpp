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

#include "taxocodec/train/trainer.hpp"

#include <cmath>
#include <limits>

namespace txc::train {

namespace {

using bench::Split;
using bench::TaskId;

std::vector<TaskId> port_tasks(const agg::AggregateModel<float>& model) {
  std::vector<TaskId> tasks;
  tasks.reserve(model.ports.size());
  for (const auto& p : model.ports) tasks.push_back(bench::parse_task(p.task_id));
  return tasks;
}

std::vector<int> sample_batch(Rng& rng, int dataset_size, int batch) {
  std::vector<int> idx(static_cast<size_t>(batch));
  for (auto& i : idx) i = static_cast<int>(rng.next_below(static_cast<uint64_t>(dataset_size)));
  return idx;
}

std::vector<nn::TensorPtr<float>> gather_features(const agg::AggregateModel<float>& model, bench::TaskBench& bench,
                                                  Split split, const std::vector<int>& idx) {
  std::vector<nn::TensorPtr<float>> feats;
  feats.reserve(model.ports.size());
  for (const auto& p : model.ports) feats.push_back(bench.feature_batch(split, bench::parse_task(p.task_id), idx));
  return feats;
}

// Training-mode loss graph: additive-noise quantization proxy on z and v,
// rate through the interval integrals, distortions through the frozen tails.
nn::TensorPtr<float> stage1_loss_node(const agg::AggregateModel<float>& model, bench::TaskBench& bench,
                                      const RDConfig& cfg, const std::vector<int>& idx, Rng& noise_rng) {
  const auto& cm = model.shared_codec;
  const auto tasks = port_tasks(model);
  const auto& ds = bench.dataset(Split::train);
  auto fused = model.fuse(gather_features(model, bench, Split::train, idx));
  auto y = cm.encoder.forward(fused);
  auto z_noisy = nn::add_uniform_noise(y, noise_rng);
  auto v_pre = cm.hyper.forward(z_noisy);
  auto v_noisy = nn::add_uniform_noise(v_pre, noise_rng);
  auto [mu, sigma] = cm.conditionals_from_v(v_noisy, cm.cfg.latent_h(), cm.cfg.latent_w());

  nn::TensorPtr<float> loss;
  if (cfg.rate_term_enabled) {
    auto bits = entropy::rate_bits_train(z_noisy, mu, sigma, v_noisy, cm.hyper_scales.sigma());
    loss = nn::scale(bits, 1.0f / (static_cast<float>(idx.size()) * static_cast<float>(cfg.source_pixels)));
  } else {
    loss = nn::make_scalar<float>(0.0f);
  }

  auto decoded = cm.decoder.forward(z_noisy);
  for (size_t i = 0; i < model.ports.size(); ++i) {
    if (cfg.lambdas[i] == 0.0) continue;
    auto feat_hat = model.ports[i].split(decoded);
    auto head_out = bench.net(tasks[i]).head(feat_hat);
    auto d = bench::task_loss<float>(tasks[i], head_out, ds, idx);
    loss = nn::add(loss, nn::scale(d, static_cast<float>(cfg.lambdas[i])));
  }
  return loss;
}

// Hard-quantized shared reconstruction for a batch, identical to what a
// decoder recovers from the coded stream (the coded symbols are lossless).
nn::TensorPtr<float> decode_batch_eval(const agg::AggregateModel<float>& model, bench::TaskBench& bench, Split split,
                                       const std::vector<int>& idx, std::vector<int32_t>* z_out = nullptr,
                                       std::vector<int32_t>* v_out = nullptr) {
  const auto& cm = model.shared_codec;
  auto fused = model.fuse(gather_features(model, bench, split, idx));
  auto y = cm.encoder.forward(fused);
  auto z_syms = entropy::quantize_eval(y->data, cm.alphabet);
  auto z_real = nn::make_tensor<float>(y->shape);
  for (size_t i = 0; i < z_syms.size(); ++i) z_real->data[i] = static_cast<float>(z_syms[i]);
  if (z_out) *z_out = std::move(z_syms);
  if (v_out) {
    auto v_pre = cm.hyper.forward(z_real);
    *v_out = entropy::quantize_eval(v_pre->data, cm.alphabet);
  }
  return cm.decoder.forward(z_real);
}

void snapshot_params(const nn::ParamSet<float>& params, std::vector<std::vector<float>>& out) {
  out.clear();
  out.reserve(params.size());
  for (const auto& item : params.items()) out.push_back(item.param->value->data);
}

void restore_params(const nn::ParamSet<float>& params, const std::vector<std::vector<float>>& saved) {
  for (size_t i = 0; i < params.items().size(); ++i) params.items()[i].param->value->data = saved[i];
}

}  // namespace

double eval_rd_cost(const agg::AggregateModel<float>& model, bench::TaskBench& bench, const RDConfig& cfg,
                    Split split, int max_samples) {
  const auto& cm = model.shared_codec;
  const auto tasks = port_tasks(model);
  const auto& ds = bench.dataset(split);
  const int n = std::min(ds.size(), max_samples);
  require(n > 0, "BAD_ARGUMENT", "eval_rd_cost: empty evaluation set");

  double total = 0.0;
  const int chunk = 16;
  for (int start = 0; start < n; start += chunk) {
    std::vector<int> idx;
    for (int i = start; i < std::min(n, start + chunk); ++i) idx.push_back(i);
    const int b = static_cast<int>(idx.size());

    std::vector<int32_t> z_syms, v_syms;
    auto decoded = decode_batch_eval(model, bench, split, idx, &z_syms, &v_syms);

    double batch_cost = 0.0;
    if (cfg.rate_term_enabled) {
      // Per-item rate estimate from the discretized PMFs.
      auto v_real = nn::make_tensor<float>({b, cm.cfg.hyper_j});
      for (size_t i = 0; i < v_syms.size(); ++i) v_real->data[i] = static_cast<float>(v_syms[i]);
      auto [mu, sigma] = cm.conditionals_from_v(v_real, cm.cfg.latent_h(), cm.cfg.latent_w());
      const auto scales = cm.hyper_scales.sigma()->data;
      const size_t z_per = static_cast<size_t>(cm.cfg.latent_size());
      const size_t v_per = static_cast<size_t>(cm.cfg.hyper_j);
      for (int i = 0; i < b; ++i) {
        entropy::QuantizedLatent z;
        z.symbols.assign(z_syms.begin() + static_cast<int64_t>(i * z_per),
                         z_syms.begin() + static_cast<int64_t>((i + 1) * z_per));
        z.shape = {cm.cfg.latent_channels, cm.cfg.latent_h(), cm.cfg.latent_w()};
        z.alphabet = cm.alphabet;
        entropy::HyperVector v;
        v.symbols.assign(v_syms.begin() + static_cast<int64_t>(i * v_per),
                         v_syms.begin() + static_cast<int64_t>((i + 1) * v_per));
        v.alphabet = cm.alphabet;
        v.scales = scales;
        entropy::GaussianParams params;
        params.mu.assign(mu->data.begin() + static_cast<int64_t>(i * z_per),
                         mu->data.begin() + static_cast<int64_t>((i + 1) * z_per));
        params.sigma.assign(sigma->data.begin() + static_cast<int64_t>(i * z_per),
                            sigma->data.begin() + static_cast<int64_t>((i + 1) * z_per));
        params.shape = z.shape;
        batch_cost += entropy::rate_bits_eval(z, v, params) / static_cast<double>(cfg.source_pixels);
      }
    }
    for (size_t t = 0; t < model.ports.size(); ++t) {
      if (cfg.lambdas[t] == 0.0) continue;
      auto feat_hat = model.ports[t].split(decoded);
      auto head_out = bench.net(tasks[t]).head(feat_hat);
      const double d = bench::task_loss<float>(tasks[t], head_out, ds, idx)->item();
      batch_cost += cfg.lambdas[t] * d * b;
    }
    total += batch_cost;
  }
  return total / n;
}

StageResult train_stage1(agg::AggregateModel<float>& model, bench::TaskBench& bench, const RDConfig& cfg) {
  cfg.validate();
  require(!model.frozen, "FROZEN", "stage-1 training on a frozen model");
  require(cfg.lambdas.size() == model.ports.size(), "BAD_CONFIG",
          "stage-1 needs one lambda per port: " + std::to_string(cfg.lambdas.size()) + " vs " +
              std::to_string(model.ports.size()));

  auto params = model.stage1_params();
  for (auto* p : params.params()) p->set_trainable(true);
  nn::Adam<float> opt(params.params(), {cfg.lr, 0.9, 0.999, 1e-8});
  Rng batch_rng(substream(cfg.seed, "stage1.batch"));
  Rng noise_rng(substream(cfg.seed, "stage1.noise"));

  StageResult res;
  res.best_val_cost = std::numeric_limits<double>::infinity();
  std::vector<std::vector<float>> best_values;

  for (int step = 0; step < cfg.steps; ++step) {
    const auto idx = sample_batch(batch_rng, bench.dataset(Split::train).size(), cfg.batch);
    opt.zero_grad();
    auto loss = stage1_loss_node(model, bench, cfg, idx, noise_rng);
    const double lv = loss->item();
    require(std::isfinite(lv), "DIVERGED", "stage-1 loss diverged at step " + std::to_string(step));
    res.loss_history.push_back(lv);
    loss->backward();
    opt.step();

    if (cfg.val_every > 0 && (step + 1) % cfg.val_every == 0) {
      const double cost = eval_rd_cost(model, bench, cfg, Split::val, cfg.val_samples);
      if (cost < res.best_val_cost) {
        res.best_val_cost = cost;
        res.best_step = step;
        snapshot_params(params, best_values);
      }
    }
  }
  if (res.best_step >= 0) restore_params(params, best_values);
  return res;
}

double eval_task_loss(const agg::AggregateModel<float>& model, bench::TaskBench& bench, TaskId task,
                      const agg::UnseenDecoder<float>* unseen_decoder, Split split, int max_samples) {
  const auto& ds = bench.dataset(split);
  const int n = std::min(ds.size(), max_samples);
  require(n > 0, "BAD_ARGUMENT", "eval_task_loss: empty evaluation set");
  double total = 0.0;
  const int chunk = 16;
  for (int start = 0; start < n; start += chunk) {
    std::vector<int> idx;
    for (int i = start; i < std::min(n, start + chunk); ++i) idx.push_back(i);
    auto decoded = decode_batch_eval(model, bench, split, idx);
    nn::TensorPtr<float> feat_hat;
    if (unseen_decoder) {
      feat_hat = unseen_decoder->decode(decoded);
    } else {
      const int pi = model.port_index(bench::task_name(task));
      require(pi >= 0, "UNKNOWN_TASK", std::string("no port for task ") + bench::task_name(task));
      feat_hat = model.ports[static_cast<size_t>(pi)].split(decoded);
    }
    auto head_out = bench.net(task).head(feat_hat);
    total += bench::task_loss<float>(task, head_out, ds, idx)->item() * static_cast<double>(idx.size());
  }
  return total / n;
}

std::pair<agg::UnseenDecoder<float>, StageResult> train_stage2_unseen(const agg::AggregateModel<float>& model,
                                                                      bench::TaskBench& bench, TaskId unseen_task,
                                                                      const RDConfig& cfg) {
  require(model.frozen, "NOT_FROZEN", "stage-2 training requires a frozen model");
  Rng init_rng(substream(cfg.seed, std::string("stage2.init.") + bench::task_name(unseen_task)));
  agg::UnseenDecoder<float> decoder(bench::task_name(unseen_task),
                                    {bench::kFeatureChannels, bench::kFeatureSize, bench::kFeatureSize}, model.acfg,
                                    model.fused_channels(), init_rng);

  nn::ParamSet<float> dparams;
  decoder.collect(dparams, std::string("unseen.") + bench::task_name(unseen_task));
  nn::Adam<float> opt(dparams.params(), {cfg.lr, 0.9, 0.999, 1e-8});
  Rng batch_rng(substream(cfg.seed, "stage2.batch"));

  // The frozen codec maps each sample to a fixed reconstruction; cache it.
  const auto& train_ds = bench.dataset(Split::train);
  std::vector<std::vector<float>> cache(static_cast<size_t>(train_ds.size()));
  const size_t per = static_cast<size_t>(model.fused_channels()) * model.acfg.port_h * model.acfg.port_w;
  auto decoded_batch = [&](const std::vector<int>& idx) {
    std::vector<int> misses;
    for (int i : idx)
      if (cache[static_cast<size_t>(i)].empty()) misses.push_back(i);
    if (!misses.empty()) {
      auto dec = decode_batch_eval(model, bench, Split::train, misses);
      for (size_t b = 0; b < misses.size(); ++b) {
        cache[static_cast<size_t>(misses[b])].assign(dec->data.begin() + static_cast<int64_t>(b * per),
                                                     dec->data.begin() + static_cast<int64_t>((b + 1) * per));
      }
    }
    auto out = nn::make_tensor<float>(
        {static_cast<int>(idx.size()), model.fused_channels(), model.acfg.port_h, model.acfg.port_w});
    for (size_t b = 0; b < idx.size(); ++b) {
      const auto& src = cache[static_cast<size_t>(idx[b])];
      std::copy(src.begin(), src.end(), out->data.begin() + static_cast<int64_t>(b * per));
    }
    return out;
  };

  StageResult res;
  res.best_val_cost = std::numeric_limits<double>::infinity();
  std::vector<std::vector<float>> best_values;

  for (int step = 0; step < cfg.steps; ++step) {
    const auto idx = sample_batch(batch_rng, train_ds.size(), cfg.batch);
    opt.zero_grad();
    auto feat_hat = decoder.decode(decoded_batch(idx));
    auto head_out = bench.net(unseen_task).head(feat_hat);
    auto loss = bench::task_loss<float>(unseen_task, head_out, train_ds, idx);
    const double lv = loss->item();
    require(std::isfinite(lv), "DIVERGED", "stage-2 loss diverged at step " + std::to_string(step));
    res.loss_history.push_back(lv);
    loss->backward();
    opt.step();

    if (cfg.val_every > 0 && (step + 1) % cfg.val_every == 0) {
      const double cost = eval_task_loss(model, bench, unseen_task, &decoder, Split::val, cfg.val_samples);
      if (cost < res.best_val_cost) {
        res.best_val_cost = cost;
        res.best_step = step;
        snapshot_params(dparams, best_values);
      }
    }
  }
  if (res.best_step >= 0) restore_params(dparams, best_values);
  return {std::move(decoder), std::move(res)};
}

}  // namespace txc::train
