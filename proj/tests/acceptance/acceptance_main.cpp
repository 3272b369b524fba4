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

// End-to-end acceptance suite. Each criterion prints one pass/fail line; the
// process exits nonzero if any criterion fails. Heavy criteria write their
// full reports under --out for inspection.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <numeric>

#include "taxocodec/cli/commands.hpp"
#include "taxocodec/coder/range_coder.hpp"
#include "taxocodec/nn/grad_check.hpp"

using namespace txc;
using bench::Split;
using bench::TaskId;
namespace fs = std::filesystem;

namespace {

struct CriterionResult {
  int id;
  bool pass;
  std::string detail;
  double seconds;
};

std::vector<CriterionResult> g_results;

class Timer {
 public:
  Timer() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_;
};

void record(int id, bool pass, const std::string& detail, double seconds) {
  g_results.push_back({id, pass, detail, seconds});
  std::printf("[%s] criterion %d: %s (%.1fs)\n", pass ? "PASS" : "FAIL", id, detail.c_str(), seconds);
  std::fflush(stdout);
}

std::string fmt(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// ---- criterion 1: coder correctness -----------------------------------------

void criterion1_coder() {
  Timer timer;
  Rng rng(20261);
  std::vector<coder::CdfTable> pool;
  for (int i = 0; i < 64; ++i) {
    const int size = 2 + static_cast<int>(rng.next_below(128));
    std::vector<float> pmf(static_cast<size_t>(size));
    double total = 0;
    for (auto& p : pmf) {
      p = static_cast<float>(rng.next_uniform(1.0 / 65536.0, 1.0));
      total += p;
    }
    for (auto& p : pmf) p = static_cast<float>(p / total);
    pool.push_back(coder::build_cdf(pmf));
  }

  int failures = 0;
  double worst_excess = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const size_t count = 1 + rng.next_below(64);
    std::vector<int32_t> symbols(count);
    std::vector<const coder::CdfTable*> refs(count);
    double oracle_bits = 0.0;
    for (size_t i = 0; i < count; ++i) {
      const auto& t = pool[rng.next_below(pool.size())];
      refs[i] = &t;
      const uint32_t u = static_cast<uint32_t>(rng.next_below(65536));
      int s = 0;
      while (t.cum[static_cast<size_t>(s) + 1] <= u) ++s;
      symbols[i] = s;
      oracle_bits += -std::log2(static_cast<double>(t.freq(s)) / 65536.0);
    }
    const auto segment = coder::encode_symbols(symbols, refs);
    const double actual_bits = 8.0 * static_cast<double>(segment.bytes.size());
    const double bound = 32.0 + 0.01 * oracle_bits;
    worst_excess = std::max(worst_excess, std::abs(actual_bits - oracle_bits) - bound);
    if (coder::decode_symbols(segment, refs) != symbols || std::abs(actual_bits - oracle_bits) > bound) ++failures;
  }
  const double secs = timer.seconds();
  const bool pass = failures == 0 && secs < 60.0;
  record(1, pass,
         "coder: 10000-trial fuzz, " + std::to_string(failures) + " failures, worst bound excess " +
             fmt(worst_excess) + " bits, runtime bound 60s",
         secs);
}

// ---- criterion 2: entropy-model soundness ------------------------------------

double normal_mass_quadrature(double lo, double hi) {
  const int n = 8192;
  const double h = (hi - lo) / n;
  auto density = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * 3.14159265358979323846); };
  double acc = density(lo) + density(hi);
  for (int i = 1; i < n; ++i) acc += density(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

void criterion2_entropy_model() {
  Timer timer;
  entropy::Alphabet a(-64, 63);
  Rng rng(20262);
  double worst_sum_err = 0.0;
  for (int trial = 0; trial < 2000; ++trial) {
    double sigma;
    if (trial == 0)
      sigma = 1e-4;
    else if (trial == 1)
      sigma = 1e4;
    else
      sigma = std::pow(10.0, rng.next_uniform(-4.0, 4.0));
    const double mu = rng.next_uniform(-80.0, 80.0);
    auto pmf = entropy::discretized_gaussian_pmf(mu, sigma, a);
    const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
    worst_sum_err = std::max(worst_sum_err, std::abs(total - 1.0));
  }
  const double oracle = normal_mass_quadrature(-0.5, 0.5);
  const double center = entropy::gaussian_interval_prob(0, 0.0, 1.0, a);
  const double center_err = std::abs(center - oracle);
  const bool oracle_matches_stated = std::abs(oracle - 0.382925) < 1e-6;

  const bool pass = worst_sum_err <= 1e-9 && center_err <= 1e-5 && oracle_matches_stated;
  record(2, pass,
         "entropy model: worst PMF sum error " + fmt(worst_sum_err) + ", P(0;0,1)=" + fmt(center) +
             " vs quadrature oracle " + fmt(oracle),
         timer.seconds());
}

// ---- criterion 3: gradient fidelity ------------------------------------------

void criterion3_gradients() {
  Timer timer;
  // Double-precision replica of the full stage-1 composition: peripherals,
  // analysis/synthesis transforms, hyper path, codebook synthesis, prediction
  // head, rate term, split decoders and both frozen tail flavors.
  agg::AggregateConfig acfg;
  acfg.port_channels = 3;
  acfg.peripheral_hidden = 4;
  acfg.split_hidden = 4;
  acfg.port_h = bench::kFeatureSize;
  acfg.port_w = bench::kFeatureSize;
  acfg.codec_base.latent_channels = 3;
  acfg.codec_base.hyper_j = 2;
  acfg.codec_base.tau = 2;
  acfg.codec_base.codebook_s = 4;
  acfg.codec_base.prior_n = 3;
  acfg.codec_base.enc_hidden = 4;
  acfg.codec_base.dec_hidden = 4;
  acfg.codec_base.hyper_hidden = 3;
  acfg.codec_base.head_hidden = 4;

  Rng rng(20263);
  const nn::Shape fshape{bench::kFeatureChannels, bench::kFeatureSize, bench::kFeatureSize};
  auto model = agg::make_aggregate_model<double>({{"scene", fshape, false}, {"shading", fshape, false}}, acfg, rng);
  bench::TaskNet<double> scene_net(TaskId::scene, rng);
  bench::TaskNet<double> shading_net(TaskId::shading, rng);
  scene_net.set_trainable(false);
  shading_net.set_trainable(false);

  auto ds = bench::generate(20264, 1);
  bench::Dataset data;
  data.samples = std::move(ds);
  const std::vector<int> idx{0};

  auto f_scene = nn::make_tensor<double>({1, fshape[0], fshape[1], fshape[2]});
  auto f_shading = nn::make_tensor<double>({1, fshape[0], fshape[1], fshape[2]});
  for (auto& v : f_scene->data) v = rng.next_uniform(-1.0, 1.0);
  for (auto& v : f_shading->data) v = rng.next_uniform(-1.0, 1.0);

  const auto& cm = model.shared_codec;
  // Quantization noise drawn once so the loss is a deterministic function of
  // the parameters.
  auto u_z = nn::make_tensor<double>({1, 3, 4, 4});
  auto u_v = nn::make_tensor<double>({1, 2});
  for (auto& v : u_z->data) v = rng.next_uniform(-0.5, 0.5);
  for (auto& v : u_v->data) v = rng.next_uniform(-0.5, 0.5);

  auto loss_fn = [&] {
    auto fused = model.fuse({f_scene, f_shading});
    auto y = cm.encoder.forward(fused);
    auto z_noisy = nn::add(y, u_z);
    auto v_pre = cm.hyper.forward(z_noisy);
    auto v_noisy = nn::add(v_pre, u_v);
    auto [mu, sigma] = cm.conditionals_from_v(v_noisy, cm.cfg.latent_h(), cm.cfg.latent_w());
    auto bits = entropy::rate_bits_train<double>(z_noisy, mu, sigma, v_noisy, cm.hyper_scales.sigma());
    auto loss = nn::scale(bits, 1.0 / 4096.0);
    auto decoded = cm.decoder.forward(z_noisy);
    auto scene_out = scene_net.head(model.ports[0].split(decoded));
    loss = nn::add(loss, bench::task_loss<double>(TaskId::scene, scene_out, data, idx));
    auto shading_out = shading_net.head(model.ports[1].split(decoded));
    loss = nn::add(loss, bench::task_loss<double>(TaskId::shading, shading_out, data, idx));
    return loss;
  };

  auto params = model.stage1_params();
  for (auto* p : params.params()) p->set_trainable(true);
  size_t n_params = 0;
  for (const auto& item : params.items()) n_params += item.param->value->data.size();

  auto report = nn::grad_check_adaptive(loss_fn, params, 1e-5, 1e-4);
  const double secs = timer.seconds();
  const bool pass = report.pass && secs < 120.0;
  record(3, pass,
         "gradients: max rel error " + fmt(report.max_rel_error) + " over " + std::to_string(n_params) +
             " parameters (worst " + report.worst_param + "), runtime bound 120s",
         secs);
}

// ---- criterion 4: cross-process determinism ---------------------------------

int run_cli(const std::string& bin, const std::string& args) {
  const int status = std::system((bin + " " + args + " >/dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

void criterion4_determinism(const std::string& bin, const fs::path& out_dir) {
  Timer timer;
  const fs::path dir = out_dir / "determinism";
  fs::remove_all(dir);
  fs::create_directories(dir);

  auto splits = bench::generate_splits(404, 24, 12, 12);
  bench::save_splits((dir / "data").string(), splits, 404, {});
  bench::TaskBench b;
  b.splits = std::move(splits);
  for (const auto& spec : bench::kTaskSpecs) {
    Rng rng(substream(404, std::string("net.") + spec.name));
    auto net = std::make_shared<bench::TaskNet<float>>(spec.id, rng);
    net->set_trainable(false);
    b.nets[spec.id] = std::move(net);
  }
  cli::save_tasknets((dir / "nets.ckpt").string(), b, {});
  agg::AggregateConfig acfg;
  auto model = train::build_bench_model({TaskId::scene, TaskId::seg}, acfg, 405);
  agg::save_aggregate((dir / "model.ckpt").string(), model, {});

  const std::string base = " --model " + (dir / "model.ckpt").string() + " --nets " + (dir / "nets.ckpt").string();
  bool pass = true;
  std::string detail;
  if (run_cli(bin, "encode" + base + " --data " + (dir / "data").string() + " --split val --index 2 --out " +
                       (dir / "a.txc").string()) != 0 ||
      run_cli(bin, "encode" + base + " --data " + (dir / "data").string() + " --split val --index 2 --out " +
                       (dir / "b.txc").string()) != 0 ||
      run_cli(bin, "decode" + base + " --in " + (dir / "a.txc").string() + " --out " + (dir / "p1").string()) != 0 ||
      run_cli(bin, "decode" + base + " --in " + (dir / "a.txc").string() + " --out " + (dir / "p2").string()) != 0) {
    pass = false;
    detail = "pipeline process failed";
  } else {
    const bool streams_equal =
        cli::read_text_file((dir / "a.txc").string()) == cli::read_text_file((dir / "b.txc").string());
    const bool features_equal = cli::read_text_file((dir / "p1.features.bin").string()) ==
                                cli::read_text_file((dir / "p2.features.bin").string());
    const bool preds_equal =
        cli::read_text_file((dir / "p1.pred.json").string()) == cli::read_text_file((dir / "p2.pred.json").string());
    pass = streams_equal && features_equal && preds_equal;
    detail = std::string("two-process encode/decode: streams ") + (streams_equal ? "identical" : "DIFFER") +
             ", features " + (features_equal ? "identical" : "DIFFER") + ", predictions " +
             (preds_equal ? "identical" : "DIFFER");
  }
  record(4, pass, detail, timer.seconds());
}

// ---- criteria 5-7: trained studies -------------------------------------------

struct StudyBundle {
  std::vector<TaskId> all_tasks;
  std::map<TaskId, train::CurveStudy> customized;
  train::CurveStudy grouped;
  train::SweepSettings settings;
};

train::SweepSettings acceptance_settings() {
  train::SweepSettings settings;
  settings.lambda_grid = {0.25, 2.0, 16.0, 64.0};
  settings.seeds = {1, 2, 3};
  settings.base.steps = 400;
  settings.base.batch = 8;
  settings.base.lr = 1e-3;
  settings.base.val_every = 100;
  settings.base.val_samples = 32;
  settings.base.source_pixels = bench::kImageSize * bench::kImageSize;
  settings.eval_samples = 64;
  return settings;
}

void criterion5_rd_behavior(bench::TaskBench& bench_obj, StudyBundle& bundle, const fs::path& out_dir) {
  Timer timer;
  bundle.settings = acceptance_settings();
  bundle.all_tasks = {TaskId::scene, TaskId::count, TaskId::seg, TaskId::orient, TaskId::shading, TaskId::edges};

  bool pareto_ok = true, bpp_ok = true, plateau_ok = true;
  std::string notes;
  for (TaskId task : bundle.all_tasks) {
    auto study = train::run_curve_study(bench_obj, {task}, bundle.settings);
    cli::write_text_file((out_dir / (std::string("rd_curve_") + bench::task_name(task) + ".csv")).string(),
                         train::curve_csv(study, 0));
    auto curve = study.averaged_curve();
    // Points arrive in lambda-grid order.
    const auto& first = curve.points.front();
    const auto& last = curve.points.back();
    const bool higher = task_spec(task).higher_better;
    // Distortion of a higher-better metric m is (1 - m).
    const double d_small = higher ? 1.0 - first.distortions[0] : first.distortions[0];
    const double d_large = higher ? 1.0 - last.distortions[0] : last.distortions[0];
    if (d_large > d_small) {
      pareto_ok = false;
      notes += std::string(" pareto(") + bench::task_name(task) + ")";
    }
    for (size_t i = 0; i + 1 < curve.points.size(); ++i) {
      if (curve.points[i + 1].bpp < curve.points[i].bpp) {
        bpp_ok = false;
        notes += std::string(" bpp(") + bench::task_name(task) + ")";
        break;
      }
    }
    auto plateau = train::plateau_search(curve, study.control_metrics(), {higher}, 0.02);
    if (!plateau) {
      plateau_ok = false;
      notes += std::string(" plateau(") + bench::task_name(task) + ")";
    } else {
      notes += std::string(" ") + bench::task_name(task) + "@" + fmt(*plateau);
    }
    bundle.customized.emplace(task, std::move(study));
  }
  const double secs = timer.seconds();
  const bool pass = pareto_ok && bpp_ok && plateau_ok && secs < 3600.0;
  record(5, pass, "R-D sweep (4 lambdas x 3 seeds, 6 tasks):" + notes + ", runtime bound 3600s", secs);
}

void criterion6_aggregation(bench::TaskBench& bench_obj, StudyBundle& bundle, const fs::path& out_dir) {
  Timer timer;
  const std::vector<TaskId> semantic{TaskId::scene, TaskId::count, TaskId::seg};

  train::AggregationStudy study;
  study.tasks = semantic;
  for (TaskId t : semantic) study.customized.push_back(bundle.customized.at(t));
  study.grouped = train::run_curve_study(bench_obj, semantic, bundle.settings);
  cli::write_text_file((out_dir / "rd_curve_grouped_semantic.csv").string(), train::curve_csv(study.grouped, 0));

  bool all_finite = true;
  study.customized_total_bpp = 0.0;
  for (size_t t = 0; t < semantic.size(); ++t) {
    const auto& cs = study.customized[t];
    auto plateau =
        train::plateau_search(cs.averaged_curve(), cs.control_metrics(), {task_spec(semantic[t]).higher_better}, 0.02);
    study.customized_plateaus.push_back(plateau);
    if (plateau)
      study.customized_total_bpp += *plateau;
    else
      all_finite = false;
  }
  std::vector<bool> dirs;
  for (TaskId t : semantic) dirs.push_back(task_spec(t).higher_better);
  study.grouped_plateau = train::plateau_search(study.grouped.averaged_curve(), study.grouped.control_metrics(), dirs, 0.02);
  study.feasible = all_finite && study.grouped_plateau.has_value();
  if (study.feasible) study.saving = 1.0 - *study.grouped_plateau / study.customized_total_bpp;

  cli::write_text_file((out_dir / "aggregation_report.csv").string(), train::aggregation_report_csv(study, 0));

  const bool target_met = study.feasible && study.saving >= 0.05;
  const bool pass = study.feasible && study.saving > 0.0;
  std::string detail = "aggregation: customized total " + fmt(study.customized_total_bpp) + " bpp, grouped " +
                       (study.grouped_plateau ? fmt(*study.grouped_plateau) : "infeasible") + " bpp, saving " +
                       fmt(100.0 * study.saving) + "% (target >=5% " + (target_met ? "met" : "NOT met; fallback: positive saving, report emitted") +
                       ")";
  record(6, pass, detail, timer.seconds());
}

void criterion7_unseen(bench::TaskBench& bench_obj, const StudyBundle& bundle, const fs::path& out_dir) {
  Timer timer;
  auto settings = bundle.settings;
  auto study = train::run_unseen_study(bench_obj, {TaskId::scene, TaskId::seg}, TaskId::count, 1.0, settings);

  std::string csv = "variant,seed,bpp,trained_loss,random_loss,trained_metric\n";
  for (const auto& r : study.binary)
    csv += "binary," + std::to_string(r.seed) + "," + fmt(r.bpp) + "," + fmt(r.trained_loss) + "," +
           fmt(r.random_loss) + "," + fmt(r.trained_metric) + "\n";
  for (const auto& r : study.plus)
    csv += "binary_plus," + std::to_string(r.seed) + "," + fmt(r.bpp) + "," + fmt(r.trained_loss) + "," +
           fmt(r.random_loss) + "," + fmt(r.trained_metric) + "\n";
  cli::write_text_file((out_dir / "unseen_report.csv").string(), csv);

  const double trained = study.mean_trained_loss(false);
  const double random = study.mean_random_loss(false);
  const double trained_plus = study.mean_trained_loss(true);
  const double random_plus = study.mean_random_loss(true);
  const double metric_binary = study.mean_metric(false);
  const double metric_plus = study.mean_metric(true);

  const bool improves = trained <= 0.8 * random && trained_plus <= 0.8 * random_plus;
  const bool plus_at_least_binary = metric_plus >= 0.99 * metric_binary;  // ties within 1%
  const bool pass = improves && plus_at_least_binary;
  record(7, pass,
         "unseen task: trained loss " + fmt(trained) + " vs random " + fmt(random) + " (binary), " +
             fmt(trained_plus) + " vs " + fmt(random_plus) + " (binary+); metric binary " + fmt(metric_binary) +
             " vs binary+ " + fmt(metric_plus),
         timer.seconds());
}

void criterion8_stage_separation(bench::TaskBench& bench_obj) {
  Timer timer;
  const uint64_t analytics_0 = bench_obj.analytics_hash();

  agg::AggregateConfig acfg;
  auto model = train::build_bench_model({TaskId::scene, TaskId::seg}, acfg, 808);
  nn::ParamSet<float> codec_set, periph_set, split_set;
  model.collect_codec(codec_set);
  model.collect_peripherals(periph_set);
  model.collect_splits(split_set);
  const uint64_t codec_0 = codec_set.content_hash();
  const uint64_t periph_0 = periph_set.content_hash();
  const uint64_t split_0 = split_set.content_hash();

  train::RDConfig cfg;
  cfg.lambdas = {1.0, 1.0};
  cfg.steps = 40;
  cfg.batch = 8;
  cfg.seed = 809;
  cfg.val_every = 0;
  train::train_stage1(model, bench_obj, cfg);

  const bool stage1_ok = bench_obj.analytics_hash() == analytics_0 && codec_set.content_hash() != codec_0 &&
                         periph_set.content_hash() != periph_0 && split_set.content_hash() != split_0;

  model.freeze();
  const uint64_t codec_1 = codec_set.content_hash();
  const uint64_t periph_1 = periph_set.content_hash();
  const uint64_t split_1 = split_set.content_hash();

  train::RDConfig s2;
  s2.lambdas = {1.0};
  s2.rate_term_enabled = false;
  s2.steps = 40;
  s2.batch = 8;
  s2.seed = 810;
  s2.val_every = 0;
  auto [decoder, result] = train::train_stage2_unseen(model, bench_obj, TaskId::count, s2);

  nn::ParamSet<float> dec_set;
  decoder.collect(dec_set, "unseen.count");
  Rng fresh(substream(s2.seed, "stage2.init.count"));
  agg::UnseenDecoder<float> untouched("count", {bench::kFeatureChannels, bench::kFeatureSize, bench::kFeatureSize},
                                      model.acfg, model.fused_channels(), fresh);
  nn::ParamSet<float> untouched_set;
  untouched.collect(untouched_set, "unseen.count");

  const bool stage2_ok = bench_obj.analytics_hash() == analytics_0 && codec_set.content_hash() == codec_1 &&
                         periph_set.content_hash() == periph_1 && split_set.content_hash() == split_1 &&
                         dec_set.content_hash() != untouched_set.content_hash();

  record(8, stage1_ok && stage2_ok,
         std::string("stage separation: stage-1 groups ") + (stage1_ok ? "correct" : "WRONG") + ", stage-2 groups " +
             (stage2_ok ? "correct" : "WRONG") + ", analytics weights bitwise constant",
         timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  std::string out = "acceptance_out", bin;
  for (int i = 1; i + 1 < argc; i += 2) {
    if (std::strcmp(argv[i], "--out") == 0) out = argv[i + 1];
    if (std::strcmp(argv[i], "--bin") == 0) bin = argv[i + 1];
  }
  const fs::path out_dir(out);
  fs::create_directories(out_dir);

  try {
    criterion1_coder();
    criterion2_entropy_model();
    criterion3_gradients();
    if (!bin.empty()) {
      criterion4_determinism(bin, out_dir);
    } else {
      record(4, false, "determinism: --bin not provided", 0.0);
    }

    // Shared bench for the training criteria: full desk-scale dataset and
    // qualified pretrained task networks.
    Timer bench_timer;
    std::printf("-- building the synthetic bench (generation + pretraining)...\n");
    std::fflush(stdout);
    auto splits = bench::generate_splits(7, 4096, 512, 512);
    bench::PretrainConfig pcfg;
    pcfg.seed = 7;
    auto bench_obj = bench::make_taskbench(std::move(splits), pcfg);
    std::printf("-- bench ready (%.1fs); task qualification:\n", bench_timer.seconds());
    for (const auto& [task, report] : bench_obj.reports) {
      std::printf("   %-8s val %.4f vs threshold %.4f (%s)\n", bench::task_name(task), report.val_metric,
                  report.threshold, report.higher_better ? "higher better" : "lower better");
    }
    std::fflush(stdout);

    criterion8_stage_separation(bench_obj);

    StudyBundle bundle;
    criterion5_rd_behavior(bench_obj, bundle, out_dir);
    criterion6_aggregation(bench_obj, bundle, out_dir);
    criterion7_unseen(bench_obj, bundle, out_dir);
  } catch (const Error& e) {
    std::printf("[FAIL] acceptance aborted: %s\n", e.what());
    return 2;
  }

  int failures = 0;
  for (const auto& r : g_results) failures += r.pass ? 0 : 1;
  std::printf("acceptance: %zu criteria, %d failed\n", g_results.size(), failures);
  return failures == 0 ? 0 : 1;
}
