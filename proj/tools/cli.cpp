/*
 * Copyright 2026 The vmwatt Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cli.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <memory>
#include <ostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vmwatt/clock.hpp"
#include "vmwatt/csv.hpp"
#include "vmwatt/dataset.hpp"
#include "vmwatt/error.hpp"
#include "vmwatt/evaluation.hpp"
#include "vmwatt/gbrt.hpp"
#include "vmwatt/inference.hpp"
#include "vmwatt/log.hpp"
#include "vmwatt/metrics.hpp"
#include "vmwatt/plot.hpp"
#include "vmwatt/power.hpp"
#include "vmwatt/replay.hpp"
#include "vmwatt/synthetic.hpp"
#include "vmwatt/version.hpp"
#include "vmwatt/workload.hpp"

namespace vmwatt::cli {
namespace {

struct Globals {
  std::uint64_t seed = 0;
  CLI::Option* seed_opt = nullptr;
  bool quiet = false;

  bool has_seed() const { return seed_opt->count() > 0; }
};

std::unique_ptr<Clock> make_clock(bool simulate) {
  if (simulate) {
    SystemClock wall;
    return std::make_unique<ManualClock>(std::ceil(wall.now()));
  }
  return std::make_unique<SystemClock>();
}

// "-" writes to `out`; anything else is a file path.
void write_to(const std::string& path, std::ostream& out,
              const std::function<void(std::ostream&)>& body) {
  if (path == "-") {
    body(out);
    out.flush();
    return;
  }
  auto file = csv::open_output(path);
  body(file);
  if (!file.flush()) throw Error(ErrorKind::kIo, "write failed: " + path);
}

nlohmann::json read_json(const std::string& path) {
  auto in = csv::open_input(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return nlohmann::json::parse(buf.str());
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kParse, path + ": at byte " + std::to_string(e.byte) +
                                       ": " + e.what());
  }
}

void add_hyperparameter_options(CLI::App* sub, GbrHyperparameters& hp) {
  sub->add_option("--n-trees", hp.n_trees, "Number of boosting rounds")
      ->capture_default_str();
  sub->add_option("--learning-rate", hp.learning_rate, "Shrinkage per tree")
      ->capture_default_str();
  sub->add_option("--max-depth", hp.max_depth, "Maximum tree depth")
      ->capture_default_str();
  sub->add_option("--min-samples-leaf", hp.min_samples_leaf,
                  "Minimum rows per leaf")
      ->capture_default_str();
}

struct CollectArgs {
  double interval = 1;
  double duration = 0;
  std::string out;
  std::string source = "system";
  bool simulate_clock = false;
};

struct LogPowerArgs {
  long pid = 0;
  double interval = 1;
  double duration = 0;
  std::string backend;
  std::string out;
  bool simulate_clock = false;
};

struct JoinArgs {
  std::string metrics;
  std::string power;
  double tolerance = 0.5;
  bool keep_flagged = false;
  std::string out;
};

struct MergeArgs {
  std::string out;
  std::vector<std::string> inputs;
};

struct TrainArgs {
  std::string data;
  GbrHyperparameters hp;
  std::string out;
  bool importances = false;
};

struct EvalArgs {
  std::string data;
  GbrHyperparameters hp;
  std::size_t folds = 100;
  double test_fraction = 0.2;
  std::string report;
  std::size_t export_fold = 0;
  CLI::Option* export_fold_opt = nullptr;
  std::string export_path;
  unsigned threads = 0;
};

struct PlotArgs {
  std::string in;
  std::string out;
  std::string title = PlotOptions{}.title;
};

struct InferArgs {
  std::string model;
  std::string source = "system";
  double interval = 1;
  double duration = 0;
  std::string out = "-";
  bool simulate_clock = false;
};

struct GenWorkloadArgs {
  std::string kind;
  std::string config;
  std::string out;
  std::string commands;
};

struct ReplayArgs {
  std::string schedule;
  std::string base_url;
  bool dry_run = false;
  std::string report = "-";
  double timeout = 10;
};

struct SimulateArgs {
  std::string config;
  std::string profile = "mixed";
  CLI::Option* profile_opt = nullptr;
  double duration = 3600;
  CLI::Option* duration_opt = nullptr;
  double noise = 2.0;
  CLI::Option* noise_opt = nullptr;
  std::string out_metrics;
  std::string out_power;
};

int run_collect(const CollectArgs& a, std::ostream& err) {
  auto source = make_metrics_source(a.source);
  auto clock = make_clock(a.simulate_clock);
  CollectorOptions options{a.interval, a.duration, &stop_flag()};
  auto file = csv::open_output(a.out);
  const auto result = run_collector(*source, *clock, options, file);
  if (result.source_exhausted) log_warning("metrics source exhausted early");
  if (result.stopped) log_warning("collection stopped by signal");
  if (!is_quiet()) err << "wrote " << result.count << " samples to " << a.out << '\n';
  return 0;
}

int run_log_power(const LogPowerArgs& a, std::ostream& err) {
  auto backend = make_power_backend(a.backend);
  auto clock = make_clock(a.simulate_clock);
  PowerLoggerOptions options{a.pid, a.interval, a.duration, &stop_flag()};
  auto file = csv::open_output(a.out);
  const auto result = run_power_logger(*backend, *clock, options, file);
  if (result.backend_gone) {
    log_warning("power backend went away; " + a.out + " is partial");
  }
  if (!is_quiet()) err << "wrote " << result.count << " readings to " << a.out << '\n';
  return 0;
}

int run_join(const JoinArgs& a, std::ostream& err) {
  const auto metrics = load_metrics_csv(a.metrics);
  const auto power = load_power_csv(a.power);
  JoinOptions options{a.tolerance, a.keep_flagged};
  const auto dataset = join(metrics, power, options, a.metrics, a.power);
  save_dataset(a.out, dataset);
  if (!is_quiet()) {
    const auto& s = dataset.provenance.joins.back();
    err << "matched " << s.matched << " rows (" << s.unmatched_metrics
        << " metrics and " << s.unmatched_power << " power rows unmatched, "
        << s.excluded_flagged << " flagged rows excluded)\n";
  }
  return 0;
}

int run_merge(const MergeArgs& a, std::ostream& err) {
  std::vector<TrainingDataset> parts;
  for (const auto& path : a.inputs) parts.push_back(load_dataset(path));
  const auto merged = merge_datasets(parts);
  save_dataset(a.out, merged);
  if (!is_quiet()) err << "merged " << merged.size() << " rows into " << a.out << '\n';
  return 0;
}

void print_importances(const GbrModel& model, std::ostream& out) {
  const auto imp = mdi_importances(model);
  if (imp.no_splits) {
    out << "no splits: every tree is a single leaf\n";
    return;
  }
  out << "feature,importance_percent\n";
  for (std::size_t f = 0; f < kFeatureCount; ++f) {
    out << model.feature_names[f] << ',' << csv::format_number(imp.percentages[f])
        << '\n';
  }
}

int run_train(const TrainArgs& a, const Globals& g, std::ostream& out,
              std::ostream& err) {
  auto hp = a.hp;
  if (g.has_seed()) hp.seed = g.seed;
  const auto dataset = load_dataset(a.data);
  const auto model = fit_gbr(dataset, hp);
  save_model(model, a.out);
  if (!is_quiet()) {
    err << "trained " << model.trees.size() << " trees on " << dataset.size()
        << " rows\n";
  }
  if (a.importances) print_importances(model, out);
  return 0;
}

int run_eval(const EvalArgs& a, const Globals& g, std::ostream& out) {
  ShuffleSplitPlan plan;
  plan.n_splits = a.folds;
  plan.test_fraction = a.test_fraction;
  if (g.has_seed()) plan.seed = g.seed;
  auto hp = a.hp;
  hp.seed = plan.seed;
  CvOptions options;
  options.threads = a.threads;
  if (a.export_fold_opt->count() > 0 || !a.export_path.empty()) {
    options.export_fold = a.export_fold;
  }
  const auto dataset = load_dataset(a.data);
  const auto result = cross_validate(dataset, hp, plan, options);
  const auto report = report_to_json(result.report);
  if (a.report.empty()) {
    out << report;
  } else {
    write_to(a.report, out, [&](std::ostream& o) { o << report; });
  }
  if (!a.export_path.empty()) {
    write_to(a.export_path, out, [&](std::ostream& o) {
      write_truth_prediction_csv(o, result.exported);
    });
  }
  if (!is_quiet() && !a.report.empty()) {
    std::ostringstream line;
    line << "mean R2 " << result.report.mean_r2 << ", MAE "
         << result.report.mean_mae << ", RMSE " << result.report.mean_rmse
         << " over " << plan.n_splits << " folds";
    log_info(line.str());
  }
  return 0;
}

int run_plot(const PlotArgs& a, std::ostream& out) {
  auto in = csv::open_input(a.in);
  const auto rows = read_truth_prediction_csv(in, a.in);
  PlotOptions options;
  options.title = a.title;
  const auto svg = render_truth_prediction_svg(rows, options);
  write_to(a.out, out, [&](std::ostream& o) { o << svg; });
  return 0;
}

int run_infer(const InferArgs& a, std::ostream& out) {
  const auto model = load_model(a.model);
  auto source = make_metrics_source(a.source);
  auto clock = make_clock(a.simulate_clock);
  std::size_t rows = 0;
  write_to(a.out, out, [&](std::ostream& o) {
    InferenceSession session{&model, source.get(), a.interval, &o, &stop_flag()};
    rows = infer_live(session, a.duration, *clock);
  });
  log_info("emitted " + std::to_string(rows) + " estimates");
  return 0;
}

int run_gen_workload(const GenWorkloadArgs& a, const Globals& g,
                     std::ostream& out) {
  const nlohmann::json config =
      a.config.empty() ? nlohmann::json::object() : read_json(a.config);
  std::uint64_t seed;
  if (g.has_seed()) {
    seed = g.seed;
  } else if (config.contains("seed")) {
    seed = config.at("seed").get<std::uint64_t>();
  } else {
    // Recorded in the schedule file so the run can be repeated.
    seed = std::random_device{}();
    log_info("no --seed given; using " + std::to_string(seed));
  }

  WorkloadSchedule schedule;
  if (a.kind == "web") {
    auto c = web_config_from_json(config);
    c.seed = seed;
    schedule = gen_web_schedule(c);
  } else {
    auto c = db_config_from_json(config);
    c.seed = seed;
    schedule = gen_db_schedule(c);
  }
  write_to(a.out, out, [&](std::ostream& o) { o << schedule_to_json(schedule); });
  if (!a.commands.empty()) {
    write_to(a.commands, out,
             [&](std::ostream& o) { write_db_commands(o, schedule); });
  }
  log_info("generated " + std::to_string(schedule.size()) + " events");
  return 0;
}

int run_replay(const ReplayArgs& a, std::ostream& out) {
  const auto schedule = load_schedule(a.schedule);
  ReplayOptions options;
  options.dry_run = a.dry_run;
  options.timeout_seconds = a.timeout;
  SystemClock clock;
  const auto report = replay_web(schedule, a.base_url, clock, options);
  write_to(a.report, out,
           [&](std::ostream& o) { o << replay_report_to_json(report); });
  return 0;
}

int run_simulate(const SimulateArgs& a, const Globals& g, std::ostream& err) {
  nlohmann::json j = a.config.empty() ? nlohmann::json::object() : read_json(a.config);
  if (a.profile_opt->count() > 0) j["profile"] = a.profile;
  if (a.duration_opt->count() > 0 || !j.contains("duration")) j["duration"] = a.duration;
  if (a.noise_opt->count() > 0 || !j.contains("noise_sigma")) j["noise_sigma"] = a.noise;
  if (g.has_seed()) {
    j["seed"] = g.seed;
  } else if (!j.contains("seed")) {
    throw Error(ErrorKind::kConfig,
                "simulate needs --seed or a seed in the config file");
  }
  const auto config = synthetic_config_from_json(j);
  const auto logs = generate(config);
  save_metrics_csv(a.out_metrics, logs.metrics);
  save_power_csv(a.out_power, logs.power);
  if (!is_quiet()) {
    err << "wrote " << logs.metrics.size() << " paired rows (" << to_string(config.profile)
        << ", seed " << config.seed << ")\n";
  }
  return 0;
}

}  // namespace

std::atomic<bool>& stop_flag() {
  static std::atomic<bool> flag{false};
  return flag;
}

int dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"vmwatt: estimate virtual machine power from guest metrics"};
  app.name("vmwatt");
  app.require_subcommand(1);
  app.fallthrough();
  app.set_version_flag("--version", kVersion);

  Globals g;
  g.seed_opt = app.add_option("--seed", g.seed,
                              "Seed for randomized commands (simulate, "
                              "gen-workload, eval, train)");
  app.add_flag("--quiet", g.quiet, "Suppress informational messages");

  CollectArgs collect;
  auto* c = app.add_subcommand("collect", "Sample guest metrics to a CSV log");
  c->add_option("--interval", collect.interval, "Seconds between samples (>= 1)")
      ->capture_default_str();
  c->add_option("--duration", collect.duration, "Seconds to collect")->required();
  c->add_option("--out", collect.out, "Metrics CSV to write")->required();
  c->add_option("--source", collect.source,
                "system[:PROC_ROOT], replay:FILE or synthetic:CONFIG")
      ->capture_default_str();
  c->add_flag("--simulate-clock", collect.simulate_clock,
              "Advance a simulated clock instead of sleeping");

  LogPowerArgs power;
  auto* lp = app.add_subcommand("log-power", "Log host power for one VM process");
  lp->add_option("--pid", power.pid, "Host PID of the VM")->required();
  lp->add_option("--interval", power.interval, "Seconds between readings (>= 1)")
      ->capture_default_str();
  lp->add_option("--duration", power.duration, "Seconds to log")->required();
  lp->add_option("--backend", power.backend,
                 "counter-file:ZONE_DIR, external-csv:FILE or synthetic:CONFIG")
      ->required();
  lp->add_option("--out", power.out, "Power CSV to write")->required();
  lp->add_flag("--simulate-clock", power.simulate_clock,
               "Advance a simulated clock instead of sleeping");

  JoinArgs join_args;
  auto* jn = app.add_subcommand("join", "Align metrics and power logs into a dataset");
  jn->add_option("--metrics", join_args.metrics, "Metrics CSV")->required();
  jn->add_option("--power", join_args.power, "Power CSV")->required();
  jn->add_option("--tolerance", join_args.tolerance,
                 "Maximum timestamp distance in seconds")
      ->capture_default_str();
  jn->add_flag("--keep-flagged", join_args.keep_flagged,
               "Keep baseline, counter-reset and implausible rows");
  jn->add_option("--out", join_args.out, "Dataset CSV to write")->required();

  MergeArgs merge;
  auto* mg = app.add_subcommand("merge", "Concatenate datasets");
  mg->add_option("--out", merge.out, "Dataset CSV to write")->required();
  mg->add_option("inputs", merge.inputs, "Dataset CSVs to merge")->required();

  TrainArgs train;
  auto* tr = app.add_subcommand("train", "Fit a gradient-boosted model");
  tr->add_option("--data", train.data, "Dataset CSV")->required();
  add_hyperparameter_options(tr, train.hp);
  tr->add_option("--out", train.out, "Model JSON to write")->required();
  tr->add_flag("--importances", train.importances,
               "Print MDI feature importances to stdout");

  EvalArgs eval;
  auto* ev = app.add_subcommand("eval", "Shuffle-split cross-validation");
  ev->add_option("--data", eval.data, "Dataset CSV")->required();
  add_hyperparameter_options(ev, eval.hp);
  ev->add_option("--folds", eval.folds, "Number of shuffle splits")
      ->capture_default_str();
  ev->add_option("--test-fraction", eval.test_fraction, "Held-out fraction per fold")
      ->capture_default_str();
  ev->add_option("--report", eval.report, "Report JSON to write (default stdout)");
  eval.export_fold_opt = ev->add_option("--export-fold", eval.export_fold,
                                        "Fold whose held-out rows are exported");
  ev->add_option("--export", eval.export_path, "Truth/prediction CSV to write");
  ev->add_option("--threads", eval.threads, "Worker threads (0 = all cores)");

  PlotArgs plot;
  auto* pl = app.add_subcommand("plot", "Render a truth/prediction CSV as SVG");
  pl->add_option("--in", plot.in, "Truth/prediction CSV")->required();
  pl->add_option("--out", plot.out, "SVG file to write")->required();
  pl->add_option("--title", plot.title, "Chart title")->capture_default_str();

  InferArgs infer;
  auto* inf = app.add_subcommand("infer", "Emit live power estimates");
  inf->add_option("--model", infer.model, "Model JSON")->required();
  inf->add_option("--source", infer.source,
                  "system[:PROC_ROOT], replay:FILE or synthetic:CONFIG")
      ->capture_default_str();
  inf->add_option("--interval", infer.interval, "Seconds between estimates (>= 1)")
      ->capture_default_str();
  inf->add_option("--duration", infer.duration, "Seconds to run")->required();
  inf->add_option("--out", infer.out, "Estimate CSV to write ('-' for stdout)")
      ->capture_default_str();
  inf->add_flag("--simulate-clock", infer.simulate_clock,
                "Advance a simulated clock instead of sleeping");

  GenWorkloadArgs gen;
  auto* gw = app.add_subcommand("gen-workload", "Generate a web or db schedule");
  gw->add_option("kind", gen.kind, "web or db")
      ->required()
      ->check(CLI::IsMember({"web", "db"}));
  gw->add_option("--config", gen.config, "Workload config JSON (defaults if omitted)");
  gw->add_option("--out", gen.out, "Schedule JSON to write")->required();
  gw->add_option("--commands", gen.commands,
                 "db only: write 'offset,command' bench lines here");

  ReplayArgs replay;
  auto* rp = app.add_subcommand("replay", "Replay a web schedule over HTTP");
  rp->add_option("--schedule", replay.schedule, "Schedule JSON")->required();
  rp->add_option("--base-url", replay.base_url, "Target, e.g. http://host:8080")
      ->required();
  rp->add_flag("--dry-run", replay.dry_run, "Report the plan without sending requests");
  rp->add_option("--report", replay.report, "Report JSON to write ('-' for stdout)")
      ->capture_default_str();
  rp->add_option("--timeout", replay.timeout, "Per-request timeout in seconds")
      ->capture_default_str();

  SimulateArgs sim;
  auto* sm = app.add_subcommand("simulate", "Generate paired synthetic logs");
  sm->add_option("--config", sim.config, "Synthetic config JSON");
  sim.profile_opt =
      sm->add_option("--profile", sim.profile, "cpu-heavy, net-heavy, disk-heavy, mixed")
          ->capture_default_str();
  sim.duration_opt = sm->add_option("--duration", sim.duration, "Seconds (1 Hz rows)")
                         ->capture_default_str();
  sim.noise_opt =
      sm->add_option("--noise", sim.noise, "Gaussian noise sigma in watts")
          ->capture_default_str();
  sm->add_option("--out-metrics", sim.out_metrics, "Metrics CSV to write")->required();
  sm->add_option("--out-power", sim.out_power, "Power CSV to write")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }
  set_quiet(g.quiet);

  try {
    if (c->parsed()) return run_collect(collect, err);
    if (lp->parsed()) return run_log_power(power, err);
    if (jn->parsed()) return run_join(join_args, err);
    if (mg->parsed()) return run_merge(merge, err);
    if (tr->parsed()) return run_train(train, g, out, err);
    if (ev->parsed()) return run_eval(eval, g, out);
    if (pl->parsed()) return run_plot(plot, out);
    if (inf->parsed()) return run_infer(infer, out);
    if (gw->parsed()) return run_gen_workload(gen, g, out);
    if (rp->parsed()) return run_replay(replay, out);
    if (sm->parsed()) return run_simulate(sim, g, err);
  } catch (const Error& e) {
    err << "vmwatt: " << to_string(e.kind()) << " error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "vmwatt: runtime error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace vmwatt::cli
