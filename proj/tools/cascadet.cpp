// Copyright 2026 The cascadet Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


// cascadet command-line tool.
//   detect        run the pipeline from a config file
//   eval          score a detection log against ground truth
//   train-demo    train the classifier head on synthetic clusters
//   selfcheck     run the acceptance checks
//   make-fixtures write a seeded weights + frames + config set
// Exit codes: 0 ok, 1 usage, 2 data error, 3 internal error.

#include <cstdio>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "cascadet/eval.hpp"
#include "cascadet/fixtures.hpp"
#include "cascadet/log.hpp"
#include "cascadet/pipeline.hpp"
#include "cascadet/train.hpp"
#include "cascadet/weights.hpp"
#include "checks.hpp"

namespace {

using namespace cascadet;

constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kInternal = 3;

int detect(const std::string& config_path) {
  const RunConfig config = load_run_config(config_path);
  const RunSummary summary = run(config);
  std::cout << summary.to_json() << '\n';
  if (summary.exit_code() != 0) {
    log::error(std::to_string(summary.failed) + " of " + std::to_string(summary.frames) +
               " frames failed");
  }
  return summary.exit_code();
}

struct EvalArgs {
  std::string log, truth, csv, table = "full";
  double iou = 0.5;
  bool baselines = false;
};

int evaluate(const EvalArgs& a) {
  if (!(a.iou > 0.0 && a.iou <= 1.0)) throw ArgumentError("--iou must lie in (0, 1]");
  const auto dets = read_detection_log(a.log);
  const auto truths = read_ground_truth(a.truth);
  const EvalReport report = make_report(match_detections(dets, truths, a.iou));

  TableLayout layout = TableLayout::kFull;
  std::vector<BaselineRow> rows;
  if (a.table == "accuracy-recall") {
    layout = TableLayout::kAccuracyRecall;
    rows = cascaded_framework_baseline();
  } else if (a.table == "precision-recall") {
    layout = TableLayout::kPrecisionRecall;
    rows = retinafacemask_baseline();
  } else {
    rows = reported_framework_results();
  }
  if (!a.baselines) rows.clear();

  const auto& c = report.counts;
  std::printf("detections %zu, truths %zu, iou >= %.2f\n", dets.size(), truths.size(), a.iou);
  std::printf("face TP %ld FP %ld FN %ld | mask TP %ld TN %ld FP %ld FN %ld\n\n", c.face.tp,
              c.face.fp, c.face.fn, c.mask.tp, c.mask.tn, c.mask.fp, c.mask.fn);
  std::cout << render_report(report, rows, layout);
  if (!a.csv.empty()) {
    std::ofstream os(a.csv);
    if (!os) throw Error("cannot write " + a.csv);
    os << render_csv(report, rows, layout);
  }
  return 0;
}

int train_demo_cmd(std::uint64_t seed, const std::string& csv, int epochs, double lr) {
  DemoSetup setup;
  if (epochs >= 0) setup.options.epochs = epochs;
  if (lr >= 0) setup.options.learning_rate = lr;
  const TrainResult r = train_demo(seed, setup);
  const auto& first = r.curve.front();
  const auto& last = r.curve.back();
  std::printf("seed %llu: %d samples, %d epochs, loss %.6f -> %.6f, accuracy %.1f%% -> %.1f%%\n",
              static_cast<unsigned long long>(seed), setup.samples, last.epoch, first.loss,
              last.loss, 100.0 * first.accuracy, 100.0 * last.accuracy);
  if (!csv.empty()) {
    std::ofstream os(csv);
    if (!os) throw Error("cannot write " + csv);
    write_loss_curve_csv(os, r.curve);
  } else {
    write_loss_curve_csv(std::cout, r.curve);
  }
  return 0;
}

int selfcheck(const acceptance::CheckOptions& options, int only) {
  int failures = 0;
  for (int id = 1; id <= 9; ++id) {
    if (only != 0 && id != only) continue;
    for (const auto& r : acceptance::run_checks(options, id)) {
      std::cout << acceptance::format_line(r) << std::endl;
      failures += r.passed ? 0 : 1;
    }
  }
  return failures == 0 ? 0 : kInternal;
}

int make_fixtures(const std::string& out, const FixtureSetOptions& options) {
  const FixtureSetPaths p = write_fixture_set(out, options);
  std::cout << "config  " << p.config.string() << "\nmanifest " << p.manifest.string()
            << "\ntruth   " << p.truth.string() << "\ncascade " << p.cascade_weights.string()
            << "\nclassifier " << p.classifier_weights.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Face detection and mask classification over frame sequences"};
  app.require_subcommand(1);

  std::string config_path;
  auto* detect_cmd = app.add_subcommand("detect", "Run detection and classification over a manifest");
  detect_cmd->add_option("--config", config_path, "key = value config file")->required();

  EvalArgs eval_args;
  auto* eval_cmd = app.add_subcommand("eval", "Match a detection log against ground truth");
  eval_cmd->add_option("--log", eval_args.log, "detections.jsonl")->required();
  eval_cmd->add_option("--truth", eval_args.truth, "ground-truth JSONL")->required();
  eval_cmd->add_option("--iou", eval_args.iou, "match threshold")->capture_default_str();
  eval_cmd->add_option("--csv", eval_args.csv, "also write the table as CSV");
  eval_cmd->add_option("--table", eval_args.table, "column layout")
      ->check(CLI::IsMember({"full", "accuracy-recall", "precision-recall"}))
      ->capture_default_str();
  eval_cmd->add_flag("--baselines", eval_args.baselines, "append literature rows");

  std::uint64_t seed = 7;
  std::string curve_csv;
  int epochs = -1;
  double lr = -1;
  auto* train_cmd = app.add_subcommand("train-demo", "Train the classifier head on synthetic features");
  train_cmd->add_option("--seed", seed, "generator seed")->capture_default_str();
  train_cmd->add_option("--csv", curve_csv, "write the loss curve here instead of stdout");
  train_cmd->add_option("--epochs", epochs, "override the epoch count");
  train_cmd->add_option("--lr", lr, "override the learning rate");

  acceptance::CheckOptions check_options;
  int only = 0;
  std::string scratch;
  auto* check_cmd = app.add_subcommand("selfcheck", "Run the acceptance checks");
  check_cmd->add_option("--only", only, "run a single check")->check(CLI::Range(1, 9));
  check_cmd->add_option("--scratch", scratch, "directory for temporary files");
  check_cmd->add_option("--threads", check_options.threads, "workers for the parallel run")
      ->capture_default_str();

  FixtureSetOptions fixture_options;
  std::string fixture_dir;
  auto* fixture_cmd = app.add_subcommand("make-fixtures", "Write a seeded fixture set");
  fixture_cmd->add_option("--out", fixture_dir, "output directory")->required();
  fixture_cmd->add_option("--seed", fixture_options.seed)->capture_default_str();
  fixture_cmd->add_option("--frames", fixture_options.frames)->capture_default_str();
  fixture_cmd->add_option("--width", fixture_options.width)->capture_default_str();
  fixture_cmd->add_option("--height", fixture_options.height)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*detect_cmd) return detect(config_path);
    if (*eval_cmd) return evaluate(eval_args);
    if (*train_cmd) return train_demo_cmd(seed, curve_csv, epochs, lr);
    if (*check_cmd) {
      check_options.scratch = scratch;
      return selfcheck(check_options, only);
    }
    if (*fixture_cmd) return make_fixtures(fixture_dir, fixture_options);
  } catch (const Error& e) {
    log::error(e.what());
    return kDataError;
  } catch (const std::exception& e) {
    log::error(std::string("internal error: ") + e.what());
    return kInternal;
  }
  return kUsage;
}
