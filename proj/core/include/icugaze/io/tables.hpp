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

#pragma once

// Tabular and report outputs: sample logs (CSV or JSON lines), trial and
// ground-truth tables, scene measurements, metrics, heatmaps (16-bit PGM)
// and JSON reports. Each writer has a matching reader.

#include "icugaze/evaluation.hpp"
#include "icugaze/pipeline.hpp"
#include "icugaze/synthetic.hpp"

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace icugaze::io {

enum class LogFormat { csv, jsonl };

std::string_view to_string(LogFormat f);
// Accepts "csv" and "json"/"jsonl"; throws ParseError otherwise.
LogFormat log_format_from_string(std::string_view s);

// One row per head frame, samples and rejections interleaved in frame
// order. Doubles are written in shortest round-trip form.
std::string format_sample_log(std::span<const FrameResult> results, LogFormat format);
// Format is detected from the first character.
std::vector<FrameResult> parse_sample_log(std::string_view text);

std::vector<GazeSample> samples_only(std::span<const FrameResult> results);

std::string format_trials(std::span<const TrialDefinition> trials);
std::vector<TrialDefinition> parse_trials(std::string_view text);

std::string format_truth(std::span<const TruthFrame> truth);
std::vector<TruthFrame> parse_truth(std::string_view text);

// Columns: kind (pairwise_distance | object_size), magnitude_m,
// head_distance_m.
std::string format_measurements(std::span<const SceneMeasurement> m);
std::vector<SceneMeasurement> parse_measurements(std::string_view text);

std::string format_metrics_csv(std::span<const TrialMetrics> metrics);
std::vector<TrialMetrics> parse_metrics_csv(std::string_view text);

std::string format_evaluation_json(const Evaluation& e);
Evaluation parse_evaluation_json(std::string_view text);

// Binary 16-bit PGM scaled to the grid maximum. The header comment records
// statistic, sigma and the degrees-per-level scale.
std::string format_heatmap_pgm(const Heatmap& h);
Heatmap parse_heatmap_pgm(std::string_view bytes);

std::string format_densities_json(std::span<const DensityHistogram> d);
std::vector<DensityHistogram> parse_densities_json(std::string_view text);

std::string format_requirements_json(const RequirementSummary& r);
RequirementSummary parse_requirements_json(std::string_view text);

struct RunReport {
  PipelineStats stats;
  std::optional<Evaluation> evaluation;
  std::vector<std::string> heatmaps;  // file names next to the report

  // Throws ValidationError when samples + rejections != head frames.
  void validate() const;
};

std::string format_run_report(const RunReport& r);
RunReport parse_run_report(std::string_view text);

}  // namespace icugaze::io
