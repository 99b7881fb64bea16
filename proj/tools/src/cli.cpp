/*
 * Copyright 2026 The icu-gaze Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "icugaze_cli/cli.hpp"

#include "icugaze/evaluation.hpp"
#include "icugaze/io/config.hpp"
#include "icugaze/io/files.hpp"
#include "icugaze/io/recording.hpp"
#include "icugaze/io/tables.hpp"
#include "icugaze/pipeline.hpp"
#include "icugaze/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

namespace icugaze::cli {

namespace fs = std::filesystem;

namespace {

struct ScreenSize {
  int width = 1920;
  int height = 1080;
};

ScreenSize parse_screen(const std::string& text) {
  const auto x = text.find('x');
  if (x == std::string::npos) throw ParseError("--screen expects WIDTHxHEIGHT, got '" + text + "'");
  ScreenSize s{static_cast<int>(io::parse_int(std::string_view(text).substr(0, x), "--screen width")),
               static_cast<int>(io::parse_int(std::string_view(text).substr(x + 1), "--screen height"))};
  if (s.width <= 0 || s.height <= 0) throw ValidationError("--screen dimensions must be positive");
  return s;
}

void setup_logging() {
  static const auto logger = [] {
    auto l = spdlog::stderr_color_mt("icugaze");
    spdlog::set_default_logger(l);
    spdlog::set_pattern("[%l] %v");
    return l;
  }();
  spdlog::level::level_enum level = spdlog::level::info;
  if (const char* env = std::getenv("ICUGAZE_LOG_LEVEL"); env && *env) {
    level = spdlog::level::from_str(env);
  }
  logger->set_level(level);
}

// Writes the heatmaps for both statistics and returns their file names.
std::vector<std::string> write_heatmaps(const fs::path& dir, const Evaluation& e, ScreenSize screen, double sigma) {
  std::vector<std::string> names;
  for (Statistic stat : {Statistic::accuracy, Statistic::precision}) {
    const Heatmap h = heatmap(e.trials, e.definitions, screen.width, screen.height, sigma, stat);
    const std::string name = fmt::format("heatmap_{}.pgm", to_string(stat));
    io::write_file_atomic(dir / name, io::format_heatmap_pgm(h));
    names.push_back(name);
  }
  return names;
}

void log_pooled(const Evaluation& e) {
  spdlog::info("pooled median accuracy {:.3f} deg, precision {:.3f} deg ({} trials, {} skipped, {} samples)",
               e.pooled.accuracy, e.pooled.precision, e.pooled.trials, e.skipped_trials, e.pooled.samples);
}

struct SimulateArgs {
  std::string scenario;
  std::string out;
  std::string config;
  std::optional<std::uint64_t> seed;
};

int cmd_simulate(const SimulateArgs& a) {
  Scenario s = a.scenario.empty() ? Scenario::replicated_lab() : io::load_scenario(a.scenario);
  if (a.seed) s.seed = *a.seed;
  s.validate();
  const PipelineConfig cfg = a.config.empty() ? PipelineConfig{} : io::load_config(a.config);
  const fs::path out(a.out);

  spdlog::info("generating scenario '{}' (seed {})", s.name, s.seed);
  const auto run = std::make_shared<const SyntheticRun>(generate(s));
  io::write_synthetic_recording(run, cfg, out / "recording.ndjson");
  io::write_file_atomic(out / "trials.csv", io::format_trials(run->trials()));
  io::write_file_atomic(out / "truth.csv", io::format_truth(run->truth()));
  io::write_file_atomic(out / "scenario.ini", io::format_scenario(s));
  spdlog::info("wrote {} head frames, {} scene frames, {} trials to {}", run->head_frames().size(),
               run->scene_frames().size(), run->trials().size(), out.string());
  return kOk;
}

struct RunArgs {
  std::string recording;
  std::string out;
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string trials;
  std::string format = "csv";
  std::string screen = "1920x1080";
  double sigma = kDefaultHeatmapSigma;
};

int cmd_run(const RunArgs& a) {
  const io::LogFormat format = io::log_format_from_string(a.format);
  const ScreenSize screen = parse_screen(a.screen);
  const auto rec = std::make_shared<const io::Recording>(io::Recording::load(a.recording));
  PipelineConfig cfg = a.config.empty() ? rec->config() : io::load_config(a.config);
  if (a.seed) cfg.seed = *a.seed;
  cfg.validate();
  const std::vector<TrialDefinition> trials =
      a.trials.empty() ? std::vector<TrialDefinition>{} : io::parse_trials(io::read_file(a.trials));

  PluginRegistry registry;
  io::register_replay_plugins(registry);
  register_oracle_plugins(registry);
  PluginSet plugins = registry.create(cfg.plugins, PluginContext{rec, "recording"});

  Pipeline pipeline(cfg, std::move(plugins), rec->header().head_k, rec->header().scene_k,
                    rec->header().board_to_head_camera);
  io::RecordingHeadSource head(rec);
  io::RecordingSceneSource scene(rec);
  ResultCollector sink;
  io::RunReport report;
  report.stats = pipeline.run(head, scene, sink);
  report.validate();
  spdlog::info("{} head frames: {} samples, {} rejected, {:.1f} samples/s", report.stats.head_frames,
               report.stats.samples, report.stats.rejected(), report.stats.samples_per_second());

  const fs::path out(a.out);
  if (!trials.empty()) {
    const auto samples = io::samples_only(sink.results);
    try {
      report.evaluation = evaluate(samples, trials);
    } catch (const TooFewSamples& e) {
      spdlog::warn("no trial could be scored: {}", e.what());
    }
  }
  const std::string log_name = format == io::LogFormat::csv ? "samples.csv" : "samples.jsonl";
  io::write_file_atomic(out / log_name, io::format_sample_log(sink.results, format));
  if (report.evaluation) {
    log_pooled(*report.evaluation);
    io::write_file_atomic(out / "metrics.csv", io::format_metrics_csv(report.evaluation->trials));
    report.heatmaps = write_heatmaps(out, *report.evaluation, screen, a.sigma);
  }
  io::write_file_atomic(out / "run_report.json", io::format_run_report(report));
  return kOk;
}

struct EvaluateArgs {
  std::string samples;
  std::string trials;
  std::string out;
  std::string screen = "1920x1080";
  double sigma = kDefaultHeatmapSigma;
};

int cmd_evaluate(const EvaluateArgs& a) {
  const ScreenSize screen = parse_screen(a.screen);
  const auto results = io::parse_sample_log(io::read_file(a.samples));
  const auto trials = io::parse_trials(io::read_file(a.trials));
  const auto samples = io::samples_only(results);
  const Evaluation e = evaluate(samples, trials);
  const fs::path out(a.out);
  io::write_file_atomic(out / "metrics.csv", io::format_metrics_csv(e.trials));
  io::write_file_atomic(out / "evaluation.json", io::format_evaluation_json(e));
  write_heatmaps(out, e, screen, a.sigma);
  log_pooled(e);
  std::cout << fmt::format("accuracy_deg {}\nprecision_deg {}\n", io::format_double(e.pooled.accuracy),
                           io::format_double(e.pooled.precision));
  return kOk;
}

struct RequirementsArgs {
  std::string csv;
  std::string out;
};

int cmd_requirements(const RequirementsArgs& a) {
  const auto m = io::parse_measurements(io::read_file(a.csv));
  const RequirementSummary r = derive_requirements(m);
  if (!a.out.empty()) io::write_file_atomic(fs::path(a.out) / "requirements.json", io::format_requirements_json(r));
  std::cout << fmt::format("required_accuracy_deg {:.4f}\nrequired_precision_deg {:.4f}\n", r.required_accuracy,
                           r.required_precision);
  if (!r.precision_within_accuracy()) spdlog::warn("required precision exceeds required accuracy");
  return kOk;
}

struct ReportArgs {
  std::string run_dir;
  std::string requirements;
};

std::string render_report(const io::RunReport& r, const std::vector<DensityHistogram>& densities,
                          const std::optional<RequirementSummary>& req) {
  const PipelineStats& s = r.stats;
  std::string out = fmt::format("head frames      {}\nscene frames     {}\nsamples          {}\n", s.head_frames,
                                s.scene_frames, s.samples);
  for (std::size_t i = 0; i < kRejectionReasonCount; ++i) {
    out += fmt::format("rejected {:<15} {}\n", to_string(static_cast<RejectionReason>(i)), s.rejections[i]);
  }
  out += fmt::format("board pose failures {}\nthroughput       {:.1f} samples/s\n", s.board_pose_failures,
                     s.samples_per_second());
  if (r.evaluation) {
    const Evaluation& e = *r.evaluation;
    out += fmt::format("\naccuracy (median)  {:.3f} deg\nprecision (median) {:.3f} deg\n", e.pooled.accuracy,
                       e.pooled.precision);
    out += fmt::format("per-marker medians {:.3f} / {:.3f} deg over {} trials ({} skipped)\n",
                       e.pooled.accuracy_by_marker, e.pooled.precision_by_marker, e.pooled.trials, e.skipped_trials);
    out += "\nmarker visit accuracy precision n\n";
    for (const auto& t : e.trials) {
      out += fmt::format("{:>6} {:>5} {:>8.3f} {:>9.3f} {}\n", t.marker, t.visit, t.accuracy, t.precision, t.n_used);
    }
  }
  out += "\ndensity           count   mean\n";
  for (const auto& h : densities) {
    if (h.variable == DensityVariable::blink) {
      out += fmt::format("{:<16} {:>6} {:>7.3f} (closed fraction)\n", to_string(h.variable), h.count,
                         h.density.size() == 2 ? h.density[1] : 0.0);
      continue;
    }
    double mean = 0.0;
    for (std::size_t b = 0; b < h.density.size(); ++b) mean += 0.5 * (h.edges[b] + h.edges[b + 1]) * h.density[b];
    out += fmt::format("{:<16} {:>6} {:>7.3f}\n", to_string(h.variable), h.count, mean);
  }
  if (req && r.evaluation) {
    const bool acc_ok = r.evaluation->pooled.accuracy < req->required_accuracy;
    const bool prec_ok = r.evaluation->pooled.precision < req->required_precision;
    out += fmt::format("\nrequired accuracy  {:.3f} deg, achieved {:.3f} deg: {}\n", req->required_accuracy,
                       r.evaluation->pooled.accuracy, acc_ok ? "met" : "not met");
    out += fmt::format("required precision {:.3f} deg, achieved {:.3f} deg: {}\n", req->required_precision,
                       r.evaluation->pooled.precision, prec_ok ? "met" : "not met");
  }
  return out;
}

int cmd_report(const ReportArgs& a) {
  const fs::path dir(a.run_dir);
  const io::RunReport report = io::parse_run_report(io::read_file(dir / "run_report.json"));
  const fs::path log = fs::exists(dir / "samples.csv") ? dir / "samples.csv" : dir / "samples.jsonl";
  const auto results = io::parse_sample_log(io::read_file(log));
  const auto densities = aggregate_densities(results);
  std::optional<RequirementSummary> req;
  if (!a.requirements.empty()) {
    const fs::path p(a.requirements);
    req = p.extension() == ".csv" ? derive_requirements(io::parse_measurements(io::read_file(p)))
                                  : io::parse_requirements_json(io::read_file(p));
  }
  const std::string text = render_report(report, densities, req);
  io::write_file_atomic(dir / "densities.json", io::format_densities_json(densities));
  io::write_file_atomic(dir / "report.txt", text);
  std::cout << text;
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
  setup_logging();
  CLI::App app{"Free-viewing gaze estimation pipeline"};
  app.require_subcommand(0, 1);
  bool dump_config = false;
  bool dump_scenario = false;
  app.add_flag("--dump-config", dump_config, "Print the default pipeline configuration and exit");
  app.add_flag("--dump-scenario", dump_scenario, "Print the default synthetic scenario and exit");

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic recording with ground truth");
  simulate->add_option("scenario", sim.scenario, "Scenario file (default: replicated lab)");
  simulate->add_option("--out", sim.out, "Output directory")->required();
  simulate->add_option("--config", sim.config, "Pipeline config stored in the recording");
  simulate->add_option("--seed", sim.seed, "Override the scenario seed");

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Run the pipeline over a recording");
  run_cmd->add_option("recording", run.recording, "Recording (.ndjson)")->required();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--config", run.config, "Pipeline config (default: the recording's snapshot)");
  run_cmd->add_option("--seed", run.seed, "Override the pipeline seed");
  run_cmd->add_option("--trials", run.trials, "Trial definitions CSV; adds metrics and heatmaps");
  run_cmd->add_option("--format", run.format, "Sample log format")->check(CLI::IsMember({"csv", "json"}));
  run_cmd->add_option("--screen", run.screen, "Heatmap size in pixels, WIDTHxHEIGHT");
  run_cmd->add_option("--sigma", run.sigma, "Heatmap smoothing sigma in pixels");

  EvaluateArgs ev;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score a sample log against trial definitions");
  eval_cmd->add_option("samples", ev.samples, "Sample log (csv or jsonl)")->required();
  eval_cmd->add_option("trials", ev.trials, "Trial definitions CSV")->required();
  eval_cmd->add_option("--out", ev.out, "Output directory")->required();
  eval_cmd->add_option("--screen", ev.screen, "Heatmap size in pixels, WIDTHxHEIGHT");
  eval_cmd->add_option("--sigma", ev.sigma, "Heatmap smoothing sigma in pixels");

  RequirementsArgs req;
  auto* req_cmd = app.add_subcommand("requirements", "Derive angular requirements from scene measurements");
  req_cmd->add_option("csv", req.csv, "Measurement CSV")->required();
  req_cmd->add_option("--out", req.out, "Directory for requirements.json");

  ReportArgs rep;
  auto* rep_cmd = app.add_subcommand("report", "Summarize a run directory");
  rep_cmd->add_option("run_dir", rep.run_dir, "Directory written by `run`")->required();
  rep_cmd->add_option("--requirements", rep.requirements, "requirements.json or measurement CSV to check against");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (dump_config) {
      std::cout << io::format_config(PipelineConfig{});
      return kOk;
    }
    if (dump_scenario) {
      std::cout << io::format_scenario(Scenario::replicated_lab());
      return kOk;
    }
    if (*simulate) return cmd_simulate(sim);
    if (*run_cmd) return cmd_run(run);
    if (*eval_cmd) return cmd_evaluate(ev);
    if (*req_cmd) return cmd_requirements(req);
    if (*rep_cmd) return cmd_report(rep);
    std::cerr << app.help();
    return kUsage;
  } catch (const ParseError& e) {
    spdlog::error("parse error: {}", e.what());
    return kParse;
  } catch (const ValidationError& e) {
    spdlog::error("validation error: {}", e.what());
    return kValidation;
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kRuntime;
  }
}

}  // namespace icugaze::cli
