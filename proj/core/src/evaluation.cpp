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

#include "icugaze/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>

namespace icugaze {

namespace {

const Ray& ray_of(const GazeSample& s) {
  if (!s.gaze_ray) throw ValidationError("evaluation: sample " + std::to_string(s.sequence) + " has no scene ray");
  return *s.gaze_ray;
}

UnitVec3 target_direction(const Ray& r, const Vec3& target) {
  const Vec3 d = target - r.origin;
  if (!(d.norm() > 0.0)) throw ValidationError("evaluation: target coincides with the head position");
  return UnitVec3(d);
}

std::vector<UnitVec3> directions(std::span<const GazeSample> samples) {
  std::vector<UnitVec3> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(ray_of(s).direction);
  return out;
}

double mean(const std::vector<double>& v) {
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

// Half-sample symmetric index: ... c b a | a b c ... | c b a ...
int reflect(int i, int n) {
  const int period = 2 * n;
  i %= period;
  if (i < 0) i += period;
  return i < n ? i : period - 1 - i;
}

}  // namespace

std::pair<std::size_t, std::size_t> trim_range(std::size_t n) {
  if (n < 4) return {0, 0};
  if (n == 40) return {10, 30};
  const std::size_t keep = (n + 1) / 2;
  const std::size_t first = (n - keep) / 2;
  return {first, first + keep};
}

MarkerTrial trim_trial(const MarkerTrial& t) {
  const auto [first, last] = trim_range(t.samples.size());
  MarkerTrial out;
  out.definition = t.definition;
  out.samples.assign(t.samples.begin() + static_cast<std::ptrdiff_t>(first),
                     t.samples.begin() + static_cast<std::ptrdiff_t>(last));
  return out;
}

double accuracy(std::span<const Ray> gaze, const Vec3& target) {
  if (gaze.empty()) throw EmptyTrial("accuracy: no samples");
  double sum = 0.0;
  for (const Ray& r : gaze) sum += angle_between(r.direction, target_direction(r, target));
  return sum / static_cast<double>(gaze.size());
}

double accuracy(std::span<const GazeSample> samples, const Vec3& target) {
  if (samples.empty()) throw EmptyTrial("accuracy: no samples");
  return mean(accuracy_terms(samples, target));
}

double precision(std::span<const UnitVec3> gaze) {
  if (gaze.size() < 2) throw TooFewSamples("precision: need at least two samples");
  double sum = 0.0;
  for (std::size_t i = 1; i < gaze.size(); ++i) {
    const double a = angle_between(gaze[i], gaze[i - 1]);
    sum += a * a;
  }
  return std::sqrt(sum / static_cast<double>(gaze.size() - 1));
}

double precision(std::span<const GazeSample> samples) {
  const auto d = directions(samples);
  return precision(std::span<const UnitVec3>(d));
}

std::vector<double> accuracy_terms(std::span<const GazeSample> samples, const Vec3& target) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    const Ray& r = ray_of(s);
    out.push_back(angle_between(r.direction, target_direction(r, target)));
  }
  return out;
}

std::vector<double> precision_terms(std::span<const GazeSample> samples) {
  const auto d = directions(samples);
  std::vector<double> out;
  for (std::size_t i = 1; i < d.size(); ++i) out.push_back(angle_between(d[i], d[i - 1]));
  return out;
}

std::vector<MarkerTrial> assign_trials(std::span<const GazeSample> samples, std::span<const TrialDefinition> trials) {
  std::vector<MarkerTrial> out;
  out.reserve(trials.size());
  for (const auto& def : trials) {
    MarkerTrial t;
    t.definition = def;
    const auto lo = std::lower_bound(samples.begin(), samples.end(), def.start,
                                     [](const GazeSample& s, Timestamp v) { return s.timestamp < v; });
    for (auto it = lo; it != samples.end() && it->timestamp < def.end; ++it) {
      if (it->gaze_ray) t.samples.push_back(*it);
    }
    out.push_back(std::move(t));
  }
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw EmptySet("median: no values");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

Evaluation evaluate(std::span<const GazeSample> samples, std::span<const TrialDefinition> trials) {
  Evaluation e;
  std::vector<double> acc_terms, prec_terms, acc_trials, prec_trials;
  for (const MarkerTrial& raw : assign_trials(samples, trials)) {
    const MarkerTrial t = trim_trial(raw);
    if (t.samples.size() < 2) {
      ++e.skipped_trials;
      continue;
    }
    TrialMetrics m;
    m.marker = t.definition.marker;
    m.visit = t.definition.visit;
    m.accuracy = accuracy(t.samples, t.definition.centre);
    m.precision = precision(t.samples);
    m.n_used = t.samples.size();
    e.trials.push_back(m);
    e.definitions.push_back(t.definition);
    acc_trials.push_back(m.accuracy);
    prec_trials.push_back(m.precision);
    const auto a = accuracy_terms(t.samples, t.definition.centre);
    const auto p = precision_terms(t.samples);
    acc_terms.insert(acc_terms.end(), a.begin(), a.end());
    prec_terms.insert(prec_terms.end(), p.begin(), p.end());
  }
  if (e.trials.empty()) throw TooFewSamples("evaluate: no trial has two samples after trimming");
  e.pooled.accuracy = median(acc_terms);
  e.pooled.precision = median(prec_terms);
  e.pooled.accuracy_by_marker = median(acc_trials);
  e.pooled.precision_by_marker = median(prec_trials);
  e.pooled.trials = e.trials.size();
  e.pooled.samples = acc_terms.size();
  return e;
}

std::string_view to_string(Statistic s) { return s == Statistic::accuracy ? "accuracy" : "precision"; }

std::vector<double> gaussian_blur(const std::vector<double>& grid, int width, int height, double sigma) {
  if (!(sigma > 0.0)) return grid;
  const int radius = std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-0.5 * (i * i) / (sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = w;
    total += w;
  }
  for (double& w : kernel) w /= total;

  std::vector<double> tmp(grid.size()), out(grid.size());
  const auto idx = [width](int x, int y) { return static_cast<std::size_t>(y) * width + x; };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[static_cast<std::size_t>(i + radius)] * grid[idx(reflect(x + i, width), y)];
      tmp[idx(x, y)] = acc;
    }
  }
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) acc += kernel[static_cast<std::size_t>(i + radius)] * tmp[idx(x, reflect(y + i, height))];
      out[idx(x, y)] = acc;
    }
  }
  return out;
}

Heatmap heatmap(std::span<const TrialMetrics> metrics, std::span<const TrialDefinition> definitions, int width,
                int height, double sigma, Statistic statistic) {
  if (metrics.empty()) throw EmptySet("heatmap: no trials");
  if (metrics.size() != definitions.size()) throw ValidationError("heatmap: metrics and definitions differ in length");
  if (width <= 0 || height <= 0) throw ValidationError("heatmap: empty screen");

  struct Marker {
    TrialDefinition def;
    std::vector<double> values;
  };
  std::map<int, Marker> markers;
  for (std::size_t i = 0; i < metrics.size(); ++i) {
    auto& m = markers[metrics[i].marker];
    m.def = definitions[i];
    m.values.push_back(statistic == Statistic::accuracy ? metrics[i].accuracy : metrics[i].precision);
  }

  Heatmap h;
  h.width = width;
  h.height = height;
  h.sigma = sigma;
  h.statistic = statistic;
  std::vector<double> sum(static_cast<std::size_t>(width) * height, 0.0), count(sum.size(), 0.0);
  for (auto& [id, m] : markers) {
    const double value = median(m.values);
    const double half = 0.5 * m.def.size_px;
    // Pixel (x, y) has its centre at (x + 0.5, y + 0.5).
    const int x0 = std::max(0, static_cast<int>(std::ceil(m.def.screen_px.u - half - 0.5)));
    const int x1 = std::min(width - 1, static_cast<int>(std::floor(m.def.screen_px.u + half - 0.5)));
    const int y0 = std::max(0, static_cast<int>(std::ceil(m.def.screen_px.v - half - 0.5)));
    const int y1 = std::min(height - 1, static_cast<int>(std::floor(m.def.screen_px.v + half - 0.5)));
    for (int y = y0; y <= y1; ++y) {
      for (int x = x0; x <= x1; ++x) {
        sum[static_cast<std::size_t>(y) * width + x] += value;
        count[static_cast<std::size_t>(y) * width + x] += 1.0;
      }
    }
  }
  for (std::size_t i = 0; i < sum.size(); ++i) {
    if (count[i] > 0.0) sum[i] /= count[i];
  }
  h.grid = gaussian_blur(sum, width, height, sigma);
  return h;
}

std::string_view to_string(MeasurementKind k) {
  return k == MeasurementKind::pairwise_distance ? "pairwise_distance" : "object_size";
}

double measurement_angle(const SceneMeasurement& m) {
  if (!(m.magnitude > 0.0) || !(m.head_distance > 0.0)) {
    throw ValidationError("measurement: magnitude and head distance must be positive");
  }
  if (m.kind == MeasurementKind::pairwise_distance) return rad_to_deg(std::atan(m.magnitude / m.head_distance));
  return rad_to_deg(2.0 * std::atan(m.magnitude / (2.0 * m.head_distance)));
}

RequirementSummary derive_requirements(std::span<const SceneMeasurement> m) {
  RequirementSummary r;
  for (const auto& x : m) {
    (x.kind == MeasurementKind::pairwise_distance ? r.pairwise_angles : r.size_angles).push_back(measurement_angle(x));
  }
  if (r.pairwise_angles.empty()) throw EmptySet("requirements: no pairwise distances");
  if (r.size_angles.empty()) throw EmptySet("requirements: no object sizes");
  r.required_accuracy = median(r.pairwise_angles);
  r.required_precision = median(r.size_angles);
  return r;
}

std::string_view to_string(DensityVariable v) {
  constexpr std::string_view names[] = {"eye_yaw", "eye_pitch", "head_yaw", "head_pitch", "head_roll", "blink"};
  return names[static_cast<std::size_t>(v)];
}

Vec3 head_angles(const RigidTransform& head_pose) {
  // Relative to a head squarely facing the camera (a half turn about +y),
  // decomposed as yaw about y, then pitch about x, then roll about z.
  const Eigen::Matrix3d r =
      Rotation::from_axis_angle(Vec3::UnitY(), std::numbers::pi).matrix().transpose() * head_pose.rotation().matrix();
  const double pitch = std::asin(std::clamp(-r(1, 2), -1.0, 1.0));
  const double yaw = std::atan2(r(0, 2), r(2, 2));
  const double roll = std::atan2(r(1, 0), r(1, 1));
  return {yaw, pitch, roll};
}

std::vector<DensityHistogram> aggregate_densities(std::span<const FrameResult> results, const DensityBins& bins) {
  if (bins.angle_bins < 1 || !(bins.angle_max_deg > bins.angle_min_deg)) {
    throw ValidationError("densities: bad bin specification");
  }
  std::vector<DensityHistogram> out(kDensityVariableCount);
  const double step = (bins.angle_max_deg - bins.angle_min_deg) / bins.angle_bins;
  for (std::size_t v = 0; v < kDensityVariableCount; ++v) {
    auto& h = out[v];
    h.variable = static_cast<DensityVariable>(v);
    if (h.variable == DensityVariable::blink) {
      h.edges = {0.0, 0.5, 1.0};
    } else {
      for (int i = 0; i <= bins.angle_bins; ++i) h.edges.push_back(bins.angle_min_deg + i * step);
    }
    h.density.assign(h.edges.size() - 1, 0.0);
  }
  const auto add = [&](DensityVariable v, double deg) {
    auto& h = out[static_cast<std::size_t>(v)];
    const auto n = static_cast<long>(h.density.size());
    const long bin = std::clamp(static_cast<long>(std::floor((deg - h.edges.front()) / step)), 0L, n - 1);
    h.density[static_cast<std::size_t>(bin)] += 1.0;
    ++h.count;
  };
  const auto add_blink = [&](bool closed) {
    auto& h = out[static_cast<std::size_t>(DensityVariable::blink)];
    h.density[closed ? 1 : 0] += 1.0;
    ++h.count;
  };
  for (const auto& r : results) {
    if (const auto* s = std::get_if<GazeSample>(&r)) {
      const Vec3& g = s->gaze.vec();
      add(DensityVariable::eye_yaw, rad_to_deg(std::atan2(g.x(), g.z())));
      add(DensityVariable::eye_pitch, rad_to_deg(std::atan2(-g.y(), std::hypot(g.x(), g.z()))));
      const Vec3 a = head_angles(s->head_pose);
      add(DensityVariable::head_yaw, rad_to_deg(a.x()));
      add(DensityVariable::head_pitch, rad_to_deg(a.y()));
      add(DensityVariable::head_roll, rad_to_deg(a.z()));
      add_blink(s->blink.is_blink);
    } else if (std::get<Rejection>(r).reason == RejectionReason::blink) {
      add_blink(true);
    }
  }
  for (auto& h : out) {
    if (h.count == 0) continue;
    for (double& d : h.density) d /= static_cast<double>(h.count);
  }
  return out;
}

}  // namespace icugaze
