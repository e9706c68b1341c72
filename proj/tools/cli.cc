/* Copyright 2026 The LAM Authors. All Rights Reserved.

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

#include "cli.h"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>

#include "CLI11.hpp"
#include "lam/annotator.h"
#include "lam/dataio.h"
#include "lam/errors.h"
#include "lam/gradcheck.h"
#include "lam/metrics.h"
#include "lam/synth.h"
#include "lam/trainer.h"

namespace lam {
namespace fs = std::filesystem;
namespace {

struct TrainArgs {
  std::string seed_features;
  std::string seed_labels;
  std::string out;
  int classes = 0;
  std::string mode = "self";
  TrainConfig config;
};

struct AnnotateArgs {
  std::string model;
  std::string features_dir;
  std::string out_dir;
  std::string mode;
  std::string gt_dir;
  std::string palette;
  bool emit_color = false;
};

struct EvalArgs {
  std::string pred_dir;
  std::string gt_dir;
  int classes = 0;
};

struct SynthArgs {
  std::string out_dir;
  int count = 1;
  int classes = 12;
  int channels = 16;
  std::string size = "64x64";
  double noise = 0.1;
  std::uint64_t rng_seed = 0;
};

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::pair<int, int> parse_size(const std::string& s) {
  const auto x = s.find('x');
  if (x == std::string::npos) throw InvalidInputError("size must be HxW, got '" + s + "'");
  try {
    std::size_t used_h = 0, used_w = 0;
    const int h = std::stoi(s.substr(0, x), &used_h);
    const int w = std::stoi(s.substr(x + 1), &used_w);
    if (used_h != x || used_w != s.size() - x - 1 || h <= 0 || w <= 0) {
      throw std::invalid_argument(s);
    }
    return {h, w};
  } catch (const std::logic_error&) {
    throw InvalidInputError("size must be HxW with positive integers, got '" + s + "'");
  }
}

int run_train(const TrainArgs& a, std::ostream& out, std::ostream& err) {
  const FeatureTensor features = load_features(a.seed_features);
  const LabelMap labels = load_labels(a.seed_labels);
  int classes = a.classes;
  if (classes == 0) {
    for (std::uint16_t id : labels.ids()) {
      if (id != kIgnoreLabel) classes = std::max(classes, id + 1);
    }
  }
  TrainConfig config = a.config;
  config.mode = parse_guidance_mode(a.mode);
  const TrainResult result = train_from_seed(features, labels, classes, config);
  save_model(a.out, result.model);
  out << "epoch,loss\n0," << format_double(result.initial_loss) << '\n';
  for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
    out << e + 1 << ',' << format_double(result.loss_history[e]) << '\n';
  }
  err << "trained " << result.model.param_count() << " parameters (N="
      << result.model.sca.n_in << ", C=" << classes
      << ", K=" << result.model.optou.layers() << ") -> " << a.out << '\n';
  return 0;
}

int run_annotate(const AnnotateArgs& a, std::ostream& out, std::ostream& err) {
  const LamModel model = load_model(a.model);
  const GuidanceMode mode = a.mode.empty() ? model.mode : parse_guidance_mode(a.mode);
  AnnotateOptions options;
  if (!a.gt_dir.empty()) options.gt_dir = fs::path(a.gt_dir);
  if (mode == GuidanceMode::kOracle) {
    if (!options.gt_dir) throw InvalidInputError("--mode oracle requires --gt-dir");
    err << "note: oracle mode steers the cascade with the labels in " << a.gt_dir
        << "; scores against those labels are ground-truth-guided\n";
  }
  std::optional<Palette> palette;
  if (a.emit_color) {
    palette = a.palette.empty() ? default_palette(model.class_count)
                                : load_palette(a.palette);
    options.palette = &*palette;
  }
  const auto files = list_files(a.features_dir, kFeatureExtension);
  const auto summaries = annotate_dataset(files, model, a.out_dir, mode, options);
  fs::create_directories(a.out_dir);
  std::ofstream summary_file(fs::path(a.out_dir) / "summary.csv");
  write_summary_csv(summary_file, summaries, model.class_count);
  write_summary_csv(out, summaries, model.class_count);
  const auto failed = std::count_if(summaries.begin(), summaries.end(),
                                    [](const ImageSummary& s) { return !s.ok(); });
  err << "annotated " << summaries.size() - static_cast<std::size_t>(failed) << " of "
      << summaries.size() << " file(s) in mode " << to_string(mode) << '\n';
  return 0;
}

int run_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  const auto preds = list_files(a.pred_dir, kLabelExtension);
  if (preds.empty()) throw InvalidInputError("no " + std::string(kLabelExtension) +
                                             " files in " + a.pred_dir);
  ConfusionMatrix total(a.classes);
  for (const fs::path& pred_path : preds) {
    const LabelMap pred = load_labels(pred_path);
    const LabelMap gt = load_labels(fs::path(a.gt_dir) / pred_path.filename());
    total += confusion(pred, gt, a.classes);
  }
  write_metrics_csv(out, total);
  err << "evaluated " << preds.size() << " file(s), " << total.total()
      << " labeled pixels\n";
  return 0;
}

int run_gradcheck_cmd(const GradcheckOptions& options, std::ostream& out) {
  const GradcheckReport report = run_gradcheck(options);
  write_gradcheck_csv(out, report);
  return report.passed() ? 0 : 1;
}

int run_synth(const SynthArgs& a, std::ostream& err) {
  const auto [h, w] = parse_size(a.size);
  if (a.count < 0) throw InvalidInputError("--count must be >= 0");
  fs::create_directories(a.out_dir);
  for (int i = 0; i < a.count; ++i) {
    const Scene scene = generate_scene(a.rng_seed + static_cast<std::uint64_t>(i),
                                       a.classes, a.channels, h, w, a.noise);
    char stem[32];
    std::snprintf(stem, sizeof(stem), "scene_%04d", i);
    save_features(fs::path(a.out_dir) / (std::string(stem) + kFeatureExtension),
                  scene.features);
    save_labels(fs::path(a.out_dir) / (std::string(stem) + kLabelExtension),
                scene.labels);
  }
  err << "wrote " << a.count << " scene(s) to " << a.out_dir << '\n';
  return 0;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Single-seed semantic annotation: train, annotate, evaluate", "lam"};
  app.require_subcommand(1);

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Learn adapter and cascade from one seed");
  train_cmd->add_option("--seed-features", train.seed_features, "Seed features (.lft)")->required();
  train_cmd->add_option("--seed-labels", train.seed_labels, "Seed labels (.llb)")->required();
  train_cmd->add_option("--out", train.out, "Output model (.lamm)")->required();
  train_cmd->add_option("--epochs", train.config.epochs, "Optimizer steps")->capture_default_str();
  train_cmd->add_option("--lr", train.config.learning_rate, "Adam learning rate")->capture_default_str();
  train_cmd->add_option("--k", train.config.k_layers, "Cascade layers")->capture_default_str();
  train_cmd->add_option("--alpha0", train.config.alpha0, "Initial scale factors")->capture_default_str();
  train_cmd->add_option("--eta0", train.config.eta0, "Initial step sizes")->capture_default_str();
  train_cmd->add_option("--weight-decay", train.config.weight_decay, "Decoupled weight decay")->capture_default_str();
  train_cmd->add_option("--rng-seed", train.config.rng_seed, "Adapter init seed")->capture_default_str();
  train_cmd->add_option("--classes", train.classes, "Class count (default: max label + 1)");
  train_cmd->add_option("--mode", train.mode, "Default labeling mode stored in the model")
      ->check(CLI::IsMember({"oracle", "self", "scale-only"}))
      ->capture_default_str();

  AnnotateArgs annotate_args;
  auto* annotate_cmd = app.add_subcommand("annotate", "Label a directory of feature files");
  annotate_cmd->add_option("--model", annotate_args.model, "Trained model (.lamm)")->required();
  annotate_cmd->add_option("--features-dir", annotate_args.features_dir, "Directory of .lft files")->required();
  annotate_cmd->add_option("--out-dir", annotate_args.out_dir, "Output directory")->required();
  annotate_cmd->add_option("--mode", annotate_args.mode, "Guidance mode (default: model's)")
      ->check(CLI::IsMember({"oracle", "self", "scale-only"}));
  annotate_cmd->add_option("--gt-dir", annotate_args.gt_dir, "Ground truth for oracle mode");
  annotate_cmd->add_option("--palette", annotate_args.palette, "Palette CSV");
  annotate_cmd->add_flag("--emit-color", annotate_args.emit_color, "Also write PPM images");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "mIoU / mF1 of predictions against ground truth");
  eval_cmd->add_option("--pred-dir", eval.pred_dir, "Predicted labels")->required();
  eval_cmd->add_option("--gt-dir", eval.gt_dir, "Ground-truth labels")->required();
  eval_cmd->add_option("--classes", eval.classes, "Class count")->required()->check(CLI::PositiveNumber);

  GradcheckOptions gradcheck;
  auto* gradcheck_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient audit");
  gradcheck_cmd->add_option("--rng-seed", gradcheck.rng_seed, "Instance seed")->capture_default_str();
  gradcheck_cmd->add_option("--instances", gradcheck.instances, "Instances per suite")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write synthetic feature/label pairs");
  synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
  synth_cmd->add_option("--count", synth.count, "Number of scenes")->capture_default_str();
  synth_cmd->add_option("--classes", synth.classes, "Class count")->capture_default_str();
  synth_cmd->add_option("--channels", synth.channels, "Feature channels")->capture_default_str();
  synth_cmd->add_option("--size", synth.size, "HxW")->capture_default_str();
  synth_cmd->add_option("--noise", synth.noise, "Gaussian noise sigma")->capture_default_str();
  synth_cmd->add_option("--rng-seed", synth.rng_seed, "Generator seed")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return 2;
  }

  try {
    if (*train_cmd) return run_train(train, out, err);
    if (*annotate_cmd) return run_annotate(annotate_args, out, err);
    if (*eval_cmd) return run_eval(eval, out, err);
    if (*gradcheck_cmd) return run_gradcheck_cmd(gradcheck, out);
    if (*synth_cmd) return run_synth(synth, err);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace lam
