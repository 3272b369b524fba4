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

#include "taxocodec/cli/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "taxocodec/codec/checkpoint.hpp"
#include "taxocodec/version.hpp"

namespace txc::cli {

namespace {

using bench::Split;
using bench::TaskId;

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::train;
  if (name == "val") return Split::val;
  if (name == "test") return Split::test;
  fail("BAD_ARGUMENT", "unknown split '" + name + "' (expected train, val or test)");
}

nlohmann::json stamp(const ExperimentConfig& cfg, uint64_t seed) {
  return {{"tool_version", kToolVersion}, {"config_hash", hash_hex(cfg.hash())}, {"seed", seed}};
}

}  // namespace

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::trunc | std::ios::binary);
  require(f.good(), "IO_ERROR", "cannot write " + path);
  f << content;
  require(f.good(), "IO_ERROR", "short write to " + path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  require(f.good(), "FILE_NOT_FOUND", path);
  std::string out((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return out;
}

void save_tasknets(const std::string& path, bench::TaskBench& bench, const nlohmann::json& extra_meta) {
  nn::ParamSet<float> params;
  for (const auto& [task, net] : bench.nets) net->collect(params, std::string("net.") + bench::task_name(task));
  nlohmann::json meta = extra_meta;
  meta["kind"] = "tasknets";
  nlohmann::json reports = nlohmann::json::object();
  for (const auto& [task, report] : bench.reports) {
    reports[bench::task_name(task)] = {{"val_metric", report.val_metric},
                                       {"threshold", report.threshold},
                                       {"higher_better", report.higher_better},
                                       {"frozen_hash", hash_hex(report.frozen_hash)}};
  }
  meta["reports"] = reports;
  codec::save_checkpoint(path, meta, params);
}

TaskNets load_tasknets(const std::string& path) {
  TaskNets out;
  out.meta = codec::peek_checkpoint_meta(path);
  require(out.meta.value("kind", "") == std::string("tasknets"), "BAD_CHECKPOINT",
          path + " is not a task-network bundle");
  Rng rng(0);  // layout only
  nn::ParamSet<float> params;
  for (const auto& spec : bench::kTaskSpecs) {
    auto net = std::make_shared<bench::TaskNet<float>>(spec.id, rng);
    net->collect(params, std::string("net.") + spec.name);
    out.nets[spec.id] = std::move(net);
  }
  codec::load_checkpoint(path, params);
  for (auto& [task, net] : out.nets) net->set_trainable(false);
  return out;
}

bench::TaskBench assemble_bench(const std::string& data_dir, const std::string& nets_path) {
  bench::TaskBench b;
  b.splits = bench::load_splits(data_dir);
  auto nets = load_tasknets(nets_path);
  b.nets = std::move(nets.nets);
  return b;
}

void cmd_gen(const ExperimentConfig& cfg, const std::string& out_dir) {
  const uint64_t seed = static_cast<uint64_t>(cfg.geti("bench.seed"));
  auto splits = bench::generate_splits(seed, cfg.geti("bench.train"), cfg.geti("bench.val"), cfg.geti("bench.test"));
  bench::save_splits(out_dir, splits, seed, stamp(cfg, seed));
}

void cmd_pretrain(const ExperimentConfig& cfg, const std::string& data_dir, const std::string& out_path) {
  auto splits = bench::load_splits(data_dir);
  auto bench_obj = bench::make_taskbench(std::move(splits), cfg.pretrain_config());
  save_tasknets(out_path, bench_obj, stamp(cfg, static_cast<uint64_t>(cfg.geti("bench.seed"))));
}

void cmd_train(const ExperimentConfig& cfg, const TrainArgs& args) {
  auto bench_obj = assemble_bench(args.data_dir, args.nets_path);
  const auto tasks = bench::parse_task_list(args.tasks_csv);

  std::vector<agg::PortSpec> specs;
  for (TaskId t : tasks)
    specs.push_back(
        {bench::task_name(t), {bench::kFeatureChannels, bench::kFeatureSize, bench::kFeatureSize}, false});
  Rng rng(substream(args.seed, "model"));
  auto model = agg::make_aggregate_model<float>(specs, cfg.agg_config(), rng);

  train::RDConfig rd = cfg.rd_config();
  rd.seed = args.seed;
  rd.rate_term_enabled = !args.control;
  if (args.lambdas_csv.empty()) {
    rd.lambdas.assign(tasks.size(), 1.0);
  } else {
    ExperimentConfig tmp;  // reuse the csv number parser
    tmp.set("train.lambda_grid", args.lambdas_csv);
    rd.lambdas = tmp.get_reals("train.lambda_grid");
    if (rd.lambdas.size() == 1 && tasks.size() > 1) rd.lambdas.assign(tasks.size(), rd.lambdas[0]);
    require(rd.lambdas.size() == tasks.size(), "BAD_CONFIG", "need one lambda per task");
  }

  auto result = train::train_stage1(model, bench_obj, rd);
  if (args.freeze) model.freeze();

  nlohmann::json meta = stamp(cfg, args.seed);
  meta["tasks"] = args.tasks_csv;
  meta["lambdas"] = rd.lambdas;
  meta["control"] = args.control;
  agg::save_aggregate(args.out_path, model, meta);

  std::string history = "# tool_version=" + std::string(kToolVersion) + "\n# config_hash=" + hash_hex(cfg.hash()) +
                        "\n# seed=" + std::to_string(args.seed) + "\nstep,loss\n";
  for (size_t i = 0; i < result.loss_history.size(); ++i)
    history += std::to_string(i) + "," + fmt(result.loss_history[i]) + "\n";
  write_text_file(args.out_path + ".history.csv", history);
}

void cmd_encode(const EncodeArgs& args) {
  auto model = agg::load_aggregate(args.model_path);
  auto bench_obj = assemble_bench(args.data_dir, args.nets_path);
  const Split split = parse_split(args.split);
  const auto& ds = bench_obj.dataset(split);
  require(args.index >= 0 && args.index < ds.size(), "BAD_ARGUMENT",
          "sample index " + std::to_string(args.index) + " outside split of size " + std::to_string(ds.size()));
  std::vector<nn::TensorPtr<float>> feats;
  for (const auto& p : model.ports)
    feats.push_back(bench_obj.feature_batch(split, bench::parse_task(p.task_id), {args.index}));
  auto out = agg::aggregate_compress(model, feats);
  codec::save_bitstream(args.out_path, out.bitstream);
}

void cmd_decode(const DecodeArgs& args) {
  auto model = agg::load_aggregate(args.model_path);
  auto nets = load_tasknets(args.nets_path);
  auto bs = codec::load_bitstream(args.in_path);
  auto shared = agg::aggregate_decode_shared(model, bs);

  nlohmann::json pred;
  pred["tool_version"] = kToolVersion;
  pred["latent_hash"] = hash_hex(shared.latent_hash);
  nlohmann::json per_task = nlohmann::json::object();

  std::string feat_blob;
  auto append_u32 = [&feat_blob](uint32_t v) {
    for (int i = 0; i < 4; ++i) feat_blob.push_back(static_cast<char>(v >> (8 * i)));
  };
  feat_blob += "TXCF";
  append_u32(static_cast<uint32_t>(model.ports.size() + model.unseen.size()));

  auto emit_task = [&](const std::string& task_id) {
    auto feat = agg::aggregate_split(model, shared, task_id);
    const TaskId task = bench::parse_task(task_id);
    auto head_out = nets.nets.at(task)->head(feat);

    append_u32(static_cast<uint32_t>(task_id.size()));
    feat_blob += task_id;
    append_u32(static_cast<uint32_t>(feat->data.size()));
    feat_blob.append(reinterpret_cast<const char*>(feat->data.data()), feat->data.size() * sizeof(float));

    nlohmann::json entry;
    entry["feature_hash"] = hash_hex(fnv1a64_values(feat->data));
    entry["output_hash"] = hash_hex(fnv1a64_values(head_out->data));
    if (task_spec(task).classification) {
      const float* row = head_out->data.data();
      int best = 0;
      for (int c = 1; c < head_out->dim(1); ++c)
        if (row[c] > row[best]) best = c;
      entry["class"] = best;
    }
    per_task[task_id] = entry;
  };

  for (const auto& p : model.ports) emit_task(p.task_id);
  for (const auto& u : model.unseen) emit_task(u.task_id);

  pred["tasks"] = per_task;
  write_text_file(args.out_prefix + ".features.bin", feat_blob);
  write_text_file(args.out_prefix + ".pred.json", pred.dump(2) + "\n");
}

void cmd_eval_rd(const ExperimentConfig& cfg, const EvalRdArgs& args) {
  auto bench_obj = assemble_bench(args.data_dir, args.nets_path);
  const auto tasks = bench::parse_task_list(args.tasks_csv.empty() ? cfg.gets("tasks") : args.tasks_csv);

  ExperimentConfig resolved = cfg;
  if (!args.lambda_grid_csv.empty()) resolved.set("train.lambda_grid", args.lambda_grid_csv);
  if (!args.seeds_csv.empty()) resolved.set("train.seeds", args.seeds_csv);

  auto study = train::run_curve_study(bench_obj, tasks, resolved.sweep_settings());
  std::filesystem::create_directories(args.out_dir);
  write_text_file(args.out_dir + "/rd_curve.csv", train::curve_csv(study, resolved.hash()));
}

void cmd_plateau(const ExperimentConfig& cfg, const std::string& curve_csv_path, const std::string& out_path) {
  const std::string text = read_text_file(curve_csv_path);

  // Parse the rd_curve.csv format back: comment rows, a header row naming the
  // task metric columns, then one row per (lambda | control, seed).
  std::vector<std::string> lines;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    lines.push_back(text.substr(pos, nl - pos));
    pos = nl + 1;
  }
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  for (const auto& line : lines) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    size_t fpos = 0;
    while (fpos <= line.size()) {
      size_t comma = line.find(',', fpos);
      if (comma == std::string::npos) comma = line.size();
      fields.push_back(line.substr(fpos, comma - fpos));
      fpos = comma + 1;
    }
    if (header.empty())
      header = fields;
    else
      rows.push_back(fields);
  }
  require(header.size() >= 4 && header[0] == "lambda_set", "BAD_ARGUMENT",
          curve_csv_path + " is not an rd_curve.csv file");
  const size_t n_tasks = header.size() - 3;

  std::vector<TaskId> tasks;
  for (size_t t = 0; t < n_tasks; ++t) {
    const std::string& col = header[3 + t];
    tasks.push_back(bench::parse_task(col.substr(0, col.rfind('_'))));
  }

  // Seed-average trained rows per lambda and the control rows.
  std::map<std::string, std::pair<int, train::RDPoint>> by_lambda;
  std::vector<double> control_sum(n_tasks, 0.0);
  int control_count = 0;
  for (const auto& row : rows) {
    require(row.size() == header.size(), "BAD_ARGUMENT", "malformed curve row");
    if (row[0] == "control") {
      for (size_t t = 0; t < n_tasks; ++t) control_sum[t] += std::stod(row[3 + t]);
      ++control_count;
      continue;
    }
    auto& [count, point] = by_lambda[row[0]];
    if (count == 0) point.distortions.assign(n_tasks, 0.0);
    point.bpp += std::stod(row[2]);
    for (size_t t = 0; t < n_tasks; ++t) point.distortions[t] += std::stod(row[3 + t]);
    ++count;
  }
  require(control_count > 0, "BAD_ARGUMENT", "curve file holds no control rows");
  require(!by_lambda.empty(), "BAD_ARGUMENT", "curve file holds no trained rows");

  train::RDCurve curve;
  for (auto& [lambda, entry] : by_lambda) {
    auto& [count, point] = entry;
    point.bpp /= count;
    for (auto& d : point.distortions) d /= count;
    curve.points.push_back(point);
  }
  std::vector<double> control(n_tasks);
  for (size_t t = 0; t < n_tasks; ++t) control[t] = control_sum[t] / control_count;

  const double eps = cfg.getd("train.plateau_eps");
  std::string out = "# tool_version=" + std::string(kToolVersion) + "\n# config_hash=" + hash_hex(cfg.hash()) +
                    "\n# eps=" + fmt(eps) + "\ntask,control,plateau_bpp\n";
  for (size_t t = 0; t < n_tasks; ++t) {
    // Per-task plateau: the minimal rate at which this task alone matches its
    // control within tolerance.
    train::RDCurve single;
    for (const auto& p : curve.points) {
      train::RDPoint sp;
      sp.bpp = p.bpp;
      sp.distortions = {p.distortions[t]};
      single.points.push_back(sp);
    }
    auto plateau = train::plateau_search(single, {control[t]}, {task_spec(tasks[t]).higher_better}, eps);
    out += std::string(bench::task_name(tasks[t])) + "," + fmt(control[t]) + "," +
           (plateau ? fmt(*plateau) : "infeasible") + "\n";
  }
  if (n_tasks > 1) {
    std::vector<bool> dirs;
    for (TaskId t : tasks) dirs.push_back(task_spec(t).higher_better);
    auto plateau = train::plateau_search(curve, control, dirs, eps);
    out += std::string("all,,") + (plateau ? fmt(*plateau) : "infeasible") + "\n";
  }
  write_text_file(out_path, out);
}

void cmd_aggregate(const ExperimentConfig& cfg, const std::string& data_dir, const std::string& nets_path,
                   const std::string& group_csv, const std::string& out_dir) {
  auto bench_obj = assemble_bench(data_dir, nets_path);
  const auto tasks = bench::parse_task_list(group_csv.empty() ? cfg.gets("group") : group_csv);
  auto study = train::run_aggregation_study(bench_obj, tasks, cfg.sweep_settings(), cfg.getd("train.plateau_eps"));
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir + "/aggregation_report.csv", train::aggregation_report_csv(study, cfg.hash()));
  for (size_t t = 0; t < tasks.size(); ++t) {
    write_text_file(out_dir + "/customized_" + bench::task_name(tasks[t]) + ".csv",
                    train::curve_csv(study.customized[t], cfg.hash()));
  }
  write_text_file(out_dir + "/grouped.csv", train::curve_csv(study.grouped, cfg.hash()));
}

void cmd_unseen(const ExperimentConfig& cfg, const std::string& data_dir, const std::string& nets_path,
                const std::string& out_dir) {
  auto bench_obj = assemble_bench(data_dir, nets_path);
  const auto supervised = bench::parse_task_list(cfg.gets("unseen.supervised"));
  const TaskId unseen_task = bench::parse_task(cfg.gets("unseen.task"));
  auto study =
      train::run_unseen_study(bench_obj, supervised, unseen_task, cfg.getd("unseen.lambda"), cfg.sweep_settings());

  std::string out = "# tool_version=" + std::string(kToolVersion) + "\n# config_hash=" + hash_hex(cfg.hash()) + "\n";
  out += "variant,seed,bpp,trained_loss,random_loss,trained_metric\n";
  for (const auto& r : study.binary)
    out += "binary," + std::to_string(r.seed) + "," + fmt(r.bpp) + "," + fmt(r.trained_loss) + "," +
           fmt(r.random_loss) + "," + fmt(r.trained_metric) + "\n";
  for (const auto& r : study.plus)
    out += "binary_plus," + std::to_string(r.seed) + "," + fmt(r.bpp) + "," + fmt(r.trained_loss) + "," +
           fmt(r.random_loss) + "," + fmt(r.trained_metric) + "\n";
  out += "binary,mean," + fmt(0.0) + "," + fmt(study.mean_trained_loss(false)) + "," +
         fmt(study.mean_random_loss(false)) + "," + fmt(study.mean_metric(false)) + "\n";
  out += "binary_plus,mean," + fmt(0.0) + "," + fmt(study.mean_trained_loss(true)) + "," +
         fmt(study.mean_random_loss(true)) + "," + fmt(study.mean_metric(true)) + "\n";
  std::filesystem::create_directories(out_dir);
  write_text_file(out_dir + "/unseen_report.csv", out);
}

}  // namespace txc::cli
