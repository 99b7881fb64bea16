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

#include "icugaze/errors.hpp"
#include "icugaze/evaluation.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <numeric>

namespace icugaze {
namespace {

GazeSample sample(std::uint64_t seq, const Vec3& origin, const Vec3& direction) {
  GazeSample s;
  s.sequence = seq;
  s.timestamp = static_cast<Timestamp>(seq) * 20 * kNanosPerMilli;
  s.gaze = UnitVec3(direction);
  s.gaze_ray = Ray{origin, UnitVec3(direction), FrameId::scene_camera};
  s.resolution = Resolution::hit;
  return s;
}

// Direction `deg` degrees away from +z, rotated about +z by `azimuth_deg`.
Vec3 off_axis(double deg, double azimuth_deg = 0.0) {
  const double t = deg_to_rad(deg), a = deg_to_rad(azimuth_deg);
  return {std::sin(t) * std::cos(a), std::sin(t) * std::sin(a), std::cos(t)};
}

MarkerTrial trial_of(std::size_t n) {
  MarkerTrial t;
  for (std::size_t i = 0; i < n; ++i) t.samples.push_back(sample(i, Vec3::Zero(), Vec3::UnitZ()));
  return t;
}

TEST(TrimTrial, FortySamplesKeepMiddleTwenty) {
  const MarkerTrial t = trim_trial(trial_of(40));
  ASSERT_EQ(t.samples.size(), 20u);
  EXPECT_EQ(t.samples.front().sequence, 10u);  // 11th sample, 1-indexed
  EXPECT_EQ(t.samples.back().sequence, 29u);   // 30th
}

TEST(TrimTrial, OtherLengthsKeepCentralHalf) {
  const MarkerTrial twenty = trim_trial(trial_of(20));
  ASSERT_EQ(twenty.samples.size(), 10u);
  EXPECT_EQ(twenty.samples.front().sequence, 5u);
  EXPECT_EQ(trim_range(5), std::make_pair(std::size_t{1}, std::size_t{4}));
  EXPECT_EQ(trim_range(4), std::make_pair(std::size_t{1}, std::size_t{3}));
  EXPECT_EQ(trim_range(41).second - trim_range(41).first, 21u);
}

TEST(TrimTrial, TooShortIsEmpty) {
  EXPECT_TRUE(trim_trial(trial_of(2)).samples.empty());
  EXPECT_TRUE(trim_trial(trial_of(3)).samples.empty());
  EXPECT_TRUE(trim_trial(trial_of(0)).samples.empty());
}

TEST(Accuracy, ExactGazeIsZero) {
  const Vec3 target(0.3, -0.2, 2.0);
  std::vector<GazeSample> s;
  for (int i = 0; i < 5; ++i) s.push_back(sample(i, Vec3(0.01 * i, 0, 0), target - Vec3(0.01 * i, 0, 0)));
  EXPECT_NEAR(accuracy(s, target), 0.0, 1e-9);
}

TEST(Accuracy, MeanOfOffsets) {
  const Vec3 target(0, 0, 5);
  const std::vector<GazeSample> s = {sample(0, Vec3::Zero(), off_axis(10.0, 30.0)), sample(1, Vec3::Zero(), off_axis(20.0, 200.0))};
  EXPECT_NEAR(accuracy(s, target), 15.0, 1e-9);
}

TEST(Accuracy, Errors) {
  EXPECT_THROW(accuracy(std::span<const GazeSample>(), Vec3(0, 0, 1)), EmptyTrial);
  const std::vector<GazeSample> s = {sample(0, Vec3(0, 0, 1), Vec3::UnitZ())};
  EXPECT_THROW(accuracy(s, Vec3(0, 0, 1)), ValidationError);
  GazeSample no_ray = s[0];
  no_ray.gaze_ray.reset();
  EXPECT_THROW(accuracy(std::vector<GazeSample>{no_ray}, Vec3(0, 0, 3)), ValidationError);
}

TEST(Accuracy, ZeroOnlyForExactDirections) {
  const Vec3 target(0, 0, 2);
  std::vector<GazeSample> s = {sample(0, Vec3::Zero(), Vec3::UnitZ()), sample(1, Vec3::Zero(), off_axis(1e-4))};
  EXPECT_GT(accuracy(s, target), 0.0);
  s.pop_back();
  EXPECT_EQ(accuracy(s, target), 0.0);
}

TEST(Precision, ConstantGazeIsZero) {
  std::vector<GazeSample> s;
  for (int i = 0; i < 6; ++i) s.push_back(sample(i, Vec3::Zero(), Vec3(0.2, 0.1, 1)));
  EXPECT_EQ(precision(s), 0.0);
}

TEST(Precision, AlternatingFiveDegrees) {
  const std::vector<GazeSample> s = {sample(0, Vec3::Zero(), off_axis(0)), sample(1, Vec3::Zero(), off_axis(5)),
                                     sample(2, Vec3::Zero(), off_axis(0))};
  EXPECT_NEAR(precision(s), 5.0, 1e-9);
}

TEST(Precision, DividesByNumberOfDifferences) {
  // One 3 degree step followed by two still frames: sqrt(9 / 3).
  const std::vector<GazeSample> s = {sample(0, Vec3::Zero(), off_axis(0)), sample(1, Vec3::Zero(), off_axis(3)),
                                     sample(2, Vec3::Zero(), off_axis(3)), sample(3, Vec3::Zero(), off_axis(3))};
  EXPECT_NEAR(precision(s), std::sqrt(3.0), 1e-9);
}

TEST(Precision, TooFewSamples) {
  EXPECT_THROW(precision(std::vector<GazeSample>{sample(0, Vec3::Zero(), Vec3::UnitZ())}), TooFewSamples);
  EXPECT_THROW(precision(std::span<const GazeSample>()), TooFewSamples);
}

TEST(Metrics, RotationInvariance) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> jitter(-0.1, 0.1);
  std::vector<GazeSample> s;
  const Vec3 target(0.4, -0.1, 2.0);
  for (int i = 0; i < 20; ++i) {
    const Vec3 o(jitter(rng), jitter(rng), jitter(rng));
    s.push_back(sample(i, o, target - o + Vec3(jitter(rng), jitter(rng), jitter(rng))));
  }
  const double acc = accuracy(s, target), prec = precision(s);
  for (int k = 0; k < 1000; ++k) {
    const Rotation r = testing::random_rotation(rng);
    std::vector<GazeSample> rs;
    for (const auto& x : s) rs.push_back(sample(x.sequence, r * x.gaze_ray->origin, r * x.gaze_ray->direction.vec()));
    EXPECT_NEAR(accuracy(rs, r * target), acc, 1e-7);
    EXPECT_NEAR(precision(rs), prec, 1e-7);
  }
}

TEST(Metrics, PrecisionIgnoresTranslation) {
  std::mt19937_64 rng(5);
  std::vector<GazeSample> s, moved;
  for (int i = 0; i < 10; ++i) {
    const UnitVec3 d = testing::random_unit(rng);
    s.push_back(sample(i, Vec3::Zero(), d.vec()));
    moved.push_back(sample(i, testing::random_vec(rng, -5, 5), d.vec()));
  }
  EXPECT_EQ(precision(s), precision(moved));
}

TEST(Metrics, TrimComposesWithMetrics) {
  std::mt19937_64 rng(9);
  MarkerTrial t;
  for (int i = 0; i < 40; ++i) t.samples.push_back(sample(i, Vec3::Zero(), Vec3(0, 0, 1) + 0.05 * testing::random_vec(rng, -1, 1)));
  const Vec3 target(0, 0, 2);
  const std::vector<GazeSample> by_hand(t.samples.begin() + 10, t.samples.begin() + 30);
  const MarkerTrial trimmed = trim_trial(t);
  EXPECT_EQ(accuracy(trimmed.samples, target), accuracy(by_hand, target));
  EXPECT_EQ(precision(trimmed.samples), precision(by_hand));
}

TEST(Median, OddAndEven) {
  EXPECT_EQ(median({3, 1, 2}), 2.0);
  EXPECT_EQ(median({4, 1, 3, 2}), 2.5);
  EXPECT_THROW(median({}), EmptySet);
}

TEST(Evaluate, AssignsTrimsAndPools) {
  std::vector<TrialDefinition> defs(2);
  defs[0].centre = Vec3(0, 0, 2);
  defs[0].start = 0;
  defs[0].end = 40 * 20 * kNanosPerMilli;
  defs[1] = defs[0];
  defs[1].marker = 1;
  defs[1].visit = 1;
  defs[1].centre = Vec3(0.5, 0, 2);
  defs[1].start = defs[0].end;
  defs[1].end = 2 * defs[0].end;
  std::vector<GazeSample> s;
  for (int i = 0; i < 80; ++i) {
    // Trial 0 is 1 degree off its target during the middle twenty.
    const Vec3 target = i < 40 ? defs[0].centre : defs[1].centre;
    const bool middle = (i % 40) >= 10 && (i % 40) < 30;
    const Vec3 d = i < 40 && middle ? Vec3(std::tan(deg_to_rad(1.0)) * 2.0, 0, 2) : target;
    s.push_back(sample(i, Vec3::Zero(), d));
  }
  s[55].gaze_ray.reset();  // unresolved: ignored, trial 1 keeps 39 samples
  const Evaluation e = evaluate(s, defs);
  ASSERT_EQ(e.trials.size(), 2u);
  EXPECT_EQ(e.trials[0].n_used, 20u);
  EXPECT_EQ(e.trials[1].n_used, 20u);  // ceil(39 / 2)
  EXPECT_NEAR(e.trials[0].accuracy, 1.0, 1e-9);
  EXPECT_NEAR(e.trials[0].precision, 0.0, 1e-9);
  EXPECT_NEAR(e.trials[1].accuracy, 0.0, 1e-9);
  EXPECT_EQ(e.pooled.samples, 40u);
  EXPECT_NEAR(e.pooled.accuracy_by_marker, 0.5, 1e-9);
}

TEST(Evaluate, NothingScorable) {
  std::vector<TrialDefinition> defs(1);
  defs[0].end = kNanosPerSecond;
  std::vector<GazeSample> s = {sample(0, Vec3::Zero(), Vec3::UnitZ())};
  EXPECT_THROW(evaluate(s, defs), TooFewSamples);
}

TrialDefinition marker_at(int id, double u, double v, double size_px) {
  TrialDefinition d;
  d.marker = id;
  d.screen_px = {u, v};
  d.size_px = size_px;
  return d;
}

TEST(Heatmap, SingleMarkerPeaksAtCentre) {
  const std::vector<TrialMetrics> m = {{0, 0, 3.0, 1.0, 20}};
  const std::vector<TrialDefinition> d = {marker_at(0, 100.5, 60.5, 21)};
  const Heatmap h = heatmap(m, d, 200, 120, 10.0, Statistic::accuracy);
  ASSERT_EQ(h.grid.size(), 200u * 120u);
  const auto it = std::max_element(h.grid.begin(), h.grid.end());
  const auto idx = static_cast<int>(it - h.grid.begin());
  EXPECT_EQ(idx % 200, 100);
  EXPECT_EQ(idx / 200, 60);
  EXPECT_TRUE(std::all_of(h.grid.begin(), h.grid.end(), [](double v) { return v >= 0.0; }));
}

TEST(Heatmap, ZeroSigmaIsRawRaster) {
  const std::vector<TrialMetrics> m = {{0, 0, 3.0, 1.5, 20}, {1, 1, 5.0, 2.5, 20}};
  const std::vector<TrialDefinition> d = {marker_at(0, 50, 50, 20), marker_at(1, 150, 50, 20)};
  const Heatmap raw = heatmap(m, d, 200, 100, 0.0, Statistic::precision);
  EXPECT_EQ(raw.at(50, 50), 1.5);
  EXPECT_EQ(raw.at(150, 50), 2.5);
  EXPECT_EQ(raw.at(100, 50), 0.0);
  EXPECT_EQ(raw.at(40, 40), 1.5);   // footprint covers pixel centres within 10 px
  EXPECT_EQ(raw.at(39, 50), 0.0);
  const Heatmap tiny = heatmap(m, d, 200, 100, 1e-3, Statistic::precision);
  for (std::size_t i = 0; i < raw.grid.size(); ++i) EXPECT_NEAR(tiny.grid[i], raw.grid[i], 1e-12);
}

TEST(Heatmap, MedianOverRepeatVisits) {
  const std::vector<TrialMetrics> m = {{0, 0, 1.0, 0, 20}, {0, 1, 7.0, 0, 20}, {0, 2, 2.0, 0, 20}};
  const std::vector<TrialDefinition> d(3, marker_at(0, 10, 10, 4));
  EXPECT_EQ(heatmap(m, d, 20, 20, 0.0, Statistic::accuracy).at(10, 10), 2.0);
}

TEST(Heatmap, ConvolutionPreservesMass) {
  const std::vector<TrialMetrics> m = {{0, 0, 4.0, 1.0, 20}, {1, 1, 2.0, 1.0, 20}};
  const std::vector<TrialDefinition> d = {marker_at(0, 160, 90, 40), marker_at(1, 20, 170, 30)};
  const Heatmap raw = heatmap(m, d, 320, 180, 0.0, Statistic::accuracy);
  const Heatmap smooth = heatmap(m, d, 320, 180, 25.0, Statistic::accuracy);
  const double a = std::accumulate(raw.grid.begin(), raw.grid.end(), 0.0);
  const double b = std::accumulate(smooth.grid.begin(), smooth.grid.end(), 0.0);
  EXPECT_NEAR(b / a, 1.0, 0.01);
}

TEST(Heatmap, Errors) {
  EXPECT_THROW(heatmap({}, {}, 10, 10, 1.0, Statistic::accuracy), EmptySet);
}

TEST(Requirements, AngleConversions) {
  EXPECT_NEAR(measurement_angle({MeasurementKind::pairwise_distance, 0.551, 2.0}), 15.40, 0.005);
  EXPECT_NEAR(measurement_angle({MeasurementKind::object_size, 0.1, 2.0}), 2.86, 0.005);
  EXPECT_NEAR(measurement_angle({MeasurementKind::pairwise_distance, 1.0, 1.0}), 45.0, 1e-12);
  EXPECT_NEAR(measurement_angle({MeasurementKind::object_size, 2.0, 1.0}), 90.0, 1e-12);
  EXPECT_LT(measurement_angle({MeasurementKind::object_size, 0.5, 1e12}), 1e-9);
  EXPECT_THROW(measurement_angle({MeasurementKind::object_size, 0.0, 2.0}), ValidationError);
  EXPECT_THROW(measurement_angle({MeasurementKind::object_size, 0.1, -1.0}), ValidationError);
}

TEST(Requirements, MonotoneInDistance) {
  for (auto kind : {MeasurementKind::pairwise_distance, MeasurementKind::object_size}) {
    double previous = 180.0;
    for (double d = 0.5; d < 10.0; d += 0.25) {
      const double a = measurement_angle({kind, 0.3, d});
      EXPECT_LT(a, previous);
      previous = a;
    }
  }
}

TEST(Requirements, MediansOfDistributions) {
  const std::vector<SceneMeasurement> m = {{MeasurementKind::pairwise_distance, 0.2, 2.0},
                                           {MeasurementKind::pairwise_distance, 0.551, 2.0},
                                           {MeasurementKind::pairwise_distance, 1.5, 2.0},
                                           {MeasurementKind::object_size, 0.1, 2.0},
                                           {MeasurementKind::object_size, 0.3, 2.0}};
  const RequirementSummary r = derive_requirements(m);
  EXPECT_NEAR(r.required_accuracy, 15.40, 0.005);
  EXPECT_EQ(r.pairwise_angles.size(), 3u);
  EXPECT_NEAR(r.required_precision,
              0.5 * (measurement_angle(m[3]) + measurement_angle(m[4])), 1e-12);
  EXPECT_TRUE(r.precision_within_accuracy());
}

TEST(Requirements, NeedBothKinds) {
  const std::vector<SceneMeasurement> only = {{MeasurementKind::pairwise_distance, 0.2, 2.0}};
  EXPECT_THROW(derive_requirements(only), EmptySet);
  EXPECT_THROW(derive_requirements({}), EmptySet);
}

TEST(HeadAngles, RecoversYawPitchRoll) {
  const Rotation facing = Rotation::from_axis_angle(Vec3::UnitY(), std::numbers::pi);
  const Vec3 zero = head_angles({facing, Vec3(0, 0, 1), FrameId::head_camera, FrameId::head});
  EXPECT_LT(zero.norm(), 1e-12);
  const Vec3 a = head_angles({facing * Rotation::from_ypr(0.3, -0.2, 0.1), Vec3(0, 0, 1), FrameId::head_camera,
                              FrameId::head});
  EXPECT_NEAR(a.x(), 0.3, 1e-12);
  EXPECT_NEAR(a.y(), -0.2, 1e-12);
  EXPECT_NEAR(a.z(), 0.1, 1e-12);
}

double total(const DensityHistogram& h) { return std::accumulate(h.density.begin(), h.density.end(), 0.0); }

TEST(Densities, SingleSampleIsDelta) {
  const std::vector<FrameResult> r = {sample(0, Vec3::Zero(), Vec3(0.1, 0.0, 1.0))};
  const auto hs = aggregate_densities(r);
  ASSERT_EQ(hs.size(), kDensityVariableCount);
  for (const auto& h : hs) {
    EXPECT_EQ(h.count, 1u);
    EXPECT_NEAR(total(h), 1.0, 1e-9);
    EXPECT_EQ(std::count(h.density.begin(), h.density.end(), 1.0), 1);
  }
}

TEST(Densities, EmptyStream) {
  for (const auto& h : aggregate_densities({})) {
    EXPECT_EQ(h.count, 0u);
    EXPECT_EQ(total(h), 0.0);
  }
}

TEST(Densities, UniformYawIsFlat) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> yaw(-30.0, 30.0);
  std::vector<FrameResult> r;
  const int n = 60000;
  for (int i = 0; i < n; ++i) r.emplace_back(sample(i, Vec3::Zero(), off_axis(yaw(rng), 0.0)));
  DensityBins bins;
  bins.angle_min_deg = -30.0;
  bins.angle_max_deg = 30.0;
  bins.angle_bins = 12;
  const auto h = aggregate_densities(r, bins)[static_cast<std::size_t>(DensityVariable::eye_yaw)];
  EXPECT_NEAR(total(h), 1.0, 1e-9);
  const double p = 1.0 / 12.0, sd = std::sqrt(p * (1 - p) / n);
  for (double d : h.density) EXPECT_NEAR(d, p, 5 * sd);
}

TEST(Densities, BlinkFractionCountsRejections) {
  std::vector<FrameResult> r;
  for (int i = 0; i < 100; ++i) {
    if (i % 10 == 3) {
      r.emplace_back(Rejection{static_cast<std::uint64_t>(i), 0, RejectionReason::blink, 0.9, BlinkEstimate{{0.95, 0.95}, true}});
    } else {
      r.emplace_back(sample(i, Vec3::Zero(), Vec3::UnitZ()));
    }
  }
  r.emplace_back(Rejection{100, 0, RejectionReason::low_confidence, 0.3, std::nullopt});
  const auto h = aggregate_densities(r)[static_cast<std::size_t>(DensityVariable::blink)];
  EXPECT_EQ(h.count, 100u);
  EXPECT_NEAR(h.density[1], 0.10, 1e-12);
}

}  // namespace
}  // namespace icugaze
