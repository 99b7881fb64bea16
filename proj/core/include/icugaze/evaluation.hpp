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

// Marker-trial evaluation: angular accuracy and precision, the middle-20
// trimming protocol, screen heatmaps, requirement derivation from scene
// measurements, and aggregate density histograms.

#include "icugaze/camera.hpp"
#include "icugaze/geometry.hpp"
#include "icugaze/pipeline.hpp"

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace icugaze {

// Where and when one marker was shown.
struct TrialDefinition {
  int marker = 0;  // grid cell, row-major
  int visit = 0;   // presentation index
  Vec3 centre = Vec3::Zero();  // scene-camera frame
  PixelPoint screen_px;
  double size_m = 0.1;
  double size_px = 0.0;
  Timestamp start = 0;  // inclusive
  Timestamp end = 0;    // exclusive
};

struct MarkerTrial {
  TrialDefinition definition;
  std::vector<GazeSample> samples;  // time-ordered, each with a gaze ray
};

struct TrialMetrics {
  int marker = 0;
  int visit = 0;
  double accuracy = 0.0;   // degrees
  double precision = 0.0;  // degrees
  std::size_t n_used = 0;
};

// 40 samples keep indices 10..29; any other n >= 4 keeps the central
// ceil(n/2); fewer than 4 samples leave the trial empty.
MarkerTrial trim_trial(const MarkerTrial& t);
std::pair<std::size_t, std::size_t> trim_range(std::size_t n);

// Mean angle (degrees) between each gaze direction and the direction from
// its origin to `target`. Throws EmptyTrial, or ValidationError when a
// sample has no scene ray or coincides with the target.
double accuracy(std::span<const Ray> gaze, const Vec3& target);
double accuracy(std::span<const GazeSample> samples, const Vec3& target);

// Root mean square of successive angular differences, divided by the
// number of differences. Throws TooFewSamples below two samples.
double precision(std::span<const UnitVec3> gaze);
double precision(std::span<const GazeSample> samples);

// Per-sample terms of the two metrics, for pooling.
std::vector<double> accuracy_terms(std::span<const GazeSample> samples, const Vec3& target);
std::vector<double> precision_terms(std::span<const GazeSample> samples);

// Samples with a scene ray whose timestamps fall inside each window.
std::vector<MarkerTrial> assign_trials(std::span<const GazeSample> samples, std::span<const TrialDefinition> trials);

struct PooledMetrics {
  // Medians over every scored sample (headline).
  double accuracy = 0.0;
  double precision = 0.0;
  // Medians over per-trial metrics.
  double accuracy_by_marker = 0.0;
  double precision_by_marker = 0.0;
  std::size_t trials = 0;
  std::size_t samples = 0;
};

struct Evaluation {
  std::vector<TrialMetrics> trials;  // trials with at least two samples after trimming
  std::vector<TrialDefinition> definitions;  // parallel to `trials`
  std::size_t skipped_trials = 0;
  PooledMetrics pooled;
};

// Assign, trim, score. Throws TooFewSamples when no trial can be scored.
Evaluation evaluate(std::span<const GazeSample> samples, std::span<const TrialDefinition> trials);

double median(std::vector<double> values);

enum class Statistic { accuracy, precision };

std::string_view to_string(Statistic s);

struct Heatmap {
  int width = 0;
  int height = 0;
  double sigma = 0.0;
  Statistic statistic = Statistic::accuracy;
  std::vector<double> grid;  // row-major, width * height

  double at(int x, int y) const { return grid[static_cast<std::size_t>(y) * width + x]; }
};

constexpr double kDefaultHeatmapSigma = 25.0;

// Median statistic per marker painted over each marker's square footprint
// (overlaps average), then smoothed with a normalized Gaussian under
// reflective padding. sigma <= 0 returns the raw raster.
Heatmap heatmap(std::span<const TrialMetrics> metrics, std::span<const TrialDefinition> definitions, int width,
                int height, double sigma, Statistic statistic);

// Separable normalized Gaussian with half-sample symmetric padding.
std::vector<double> gaussian_blur(const std::vector<double>& grid, int width, int height, double sigma);

enum class MeasurementKind { pairwise_distance, object_size };

std::string_view to_string(MeasurementKind k);

struct SceneMeasurement {
  MeasurementKind kind = MeasurementKind::pairwise_distance;
  double magnitude = 0.0;      // metres
  double head_distance = 0.0;  // metres
};

// atan(m/d) for distances, 2 atan(s/2d) for sizes; degrees. Throws
// ValidationError for non-positive magnitudes.
double measurement_angle(const SceneMeasurement& m);

struct RequirementSummary {
  double required_accuracy = 0.0;   // median pairwise angle
  double required_precision = 0.0;  // median size angle
  std::vector<double> pairwise_angles;
  std::vector<double> size_angles;

  bool precision_within_accuracy() const { return required_precision <= required_accuracy; }
};

// Throws EmptySet unless both kinds are present.
RequirementSummary derive_requirements(std::span<const SceneMeasurement> m);

enum class DensityVariable { eye_yaw, eye_pitch, head_yaw, head_pitch, head_roll, blink };
constexpr std::size_t kDensityVariableCount = 6;

std::string_view to_string(DensityVariable v);

struct DensityHistogram {
  DensityVariable variable = DensityVariable::eye_yaw;
  std::vector<double> edges;    // bins + 1
  std::vector<double> density;  // sums to 1 unless count == 0
  std::size_t count = 0;
};

struct DensityBins {
  double angle_min_deg = -60.0;
  double angle_max_deg = 60.0;
  int angle_bins = 48;
};

// Yaw/pitch/roll (radians) of the head relative to facing the head camera.
Vec3 head_angles(const RigidTransform& head_pose);

// Eye angles come from the head-frame gaze, head angles from head_angles(),
// blink is the open/closed split over samples and blink rejections. Values
// outside the angle range fall into the end bins.
std::vector<DensityHistogram> aggregate_densities(std::span<const FrameResult> results, const DensityBins& bins = {});

}  // namespace icugaze
