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
#include "icugaze/synthetic.hpp"

#include <gtest/gtest.h>

namespace icugaze {
namespace {

struct Collect : SampleSink {
  std::vector<GazeSample> samples;
  std::vector<Rejection> rejections;
  void on_sample(const GazeSample& s) override { samples.push_back(s); }
  void on_rejection(const Rejection& r) override { rejections.push_back(r); }
};

struct Outcome {
  std::shared_ptr<const SyntheticRun> run;
  Collect sink;
  PipelineStats stats;
};

Outcome close_loop(const Scenario& s) {
  Outcome o;
  o.run = std::make_shared<const SyntheticRun>(generate(s));
  PipelineConfig cfg;
  cfg.seed = s.seed;
  Pipeline p(cfg, oracle_plugins(o.run), s.head_k, s.scene_k, o.run->board_to_head_camera());
  SyntheticHeadSource head(o.run);
  SyntheticSceneSource scene(o.run);
  o.stats = p.run(head, scene, o.sink);
  return o;
}

Scenario quiet() {
  Scenario s;
  s.noise = NoiseModel::none();
  return s;
}

TEST(Scenario, DefaultsMatchLabProtocol) {
  const Scenario s = Scenario::replicated_lab();
  EXPECT_EQ(s.bed_incline_deg, 30.0);
  EXPECT_EQ(s.markers.marker_size_m, 0.1);
  EXPECT_EQ(s.markers.samples_per_marker, 40);
  EXPECT_NEAR((s.screen_centre - s.head_position).norm(), 2.0, 0.05);
  EXPECT_NO_THROW(s.validate());
}

TEST(Scenario, Validation) {
  Scenario s;
  s.noise.gaze_deg = -1;
  EXPECT_THROW(s.validate(), InvalidScenario);
  s = {};
  s.blinks = {{11.0, 13.0}};  // 15 markers x 40 frames at 50 Hz = 12 s
  EXPECT_THROW(s.validate(), InvalidScenario);
  s = {};
  s.markers.lead_in_frames = 40;
  EXPECT_THROW(generate(s), InvalidScenario);
  s = {};
  s.head_k.fx = 0;
  EXPECT_THROW(s.validate(), InvalidScenario);
}

TEST(Generate, RatesAndCounts) {
  const SyntheticRun run = generate(Scenario{});
  ASSERT_EQ(run.head_frames().size(), 600u);
  ASSERT_EQ(run.truth().size(), 600u);
  EXPECT_EQ(run.head_frames()[1].timestamp, 20 * kNanosPerMilli);
  EXPECT_EQ(run.scene_frames().size(), 360u);
  EXPECT_EQ(run.scene_frames()[3].timestamp, 100 * kNanosPerMilli);
  EXPECT_EQ(run.trials().size(), 15u);
  std::vector<int> seen;
  for (const auto& t : run.trials()) seen.push_back(t.marker);
  std::sort(seen.begin(), seen.end());
  for (int i = 0; i < 15; ++i) EXPECT_EQ(seen[static_cast<std::size_t>(i)], i);
  // 5 mm screen sampling.
  EXPECT_EQ(run.cloud_size(), std::size_t{213} * 120);
}

TEST(Generate, TargetCloudSize) {
  Scenario s;
  s.target_cloud_points = 100000;
  s.duration_s = 1.0;
  const SyntheticRun run = generate(s);
  EXPECT_GE(run.cloud_size(), 100000u);
  EXPECT_LT(run.cloud_size(), 101000u);
  EXPECT_EQ(run.cloud(0).points.size(), run.cloud_size());
}

TEST(Generate, Deterministic) {
  Scenario s;
  s.noise.depth_m = 0.003;
  const SyntheticRun a = generate(s), b = generate(s);
  for (std::size_t i = 0; i < a.truth().size(); ++i) {
    EXPECT_EQ(a.truth()[i].head_pose.translation(), b.truth()[i].head_pose.translation());
    EXPECT_EQ(a.gaze_error(i), b.gaze_error(i));
  }
  EXPECT_EQ(a.cloud(7).points, b.cloud(7).points);
  s.seed = 2;
  const SyntheticRun c = generate(s);
  EXPECT_NE(a.gaze_error(3), c.gaze_error(3));
}

TEST(Generate, FixationFramesLookAtMarkerCentre) {
  const SyntheticRun run = generate(Scenario{});
  for (std::size_t i = 0; i < run.truth().size(); ++i) {
    const TruthFrame& f = run.truth()[i];
    const std::size_t j = i % 40;
    if (j < 6 || j >= 36) continue;
    const Vec3& c = run.trials()[static_cast<std::size_t>(f.trial)].centre;
    EXPECT_LT((f.target - c).norm(), 1e-12);
    ASSERT_TRUE(f.intersection);
    EXPECT_LT((*f.intersection - c).norm(), 1e-9);
  }
}

TEST(Generate, GazeFrameConsistency) {
  const SyntheticRun run = generate(Scenario{});
  const RigidTransform& cam = run.head_camera_in_scene();
  for (const TruthFrame& f : run.truth()) {
    EXPECT_LT(transform_error(compose(cam, f.head_pose), f.head_in_scene).rotation_deg, 1e-9);
    EXPECT_NEAR(angle_between(transform_direction(f.head_in_scene, f.gaze_head), f.gaze_scene), 0.0, 1e-7);
  }
}

// Intersection by solving o + t d = p0 + a u + b v for every plane.
std::optional<Vec3> solve_planes(const std::vector<ScenePlane>& planes, const Vec3& o, const Vec3& d) {
  std::optional<Vec3> best;
  double best_t = 0;
  for (const auto& p : planes) {
    Eigen::Matrix3d m;
    m.col(0) = d;
    m.col(1) = -p.u_axis.normalized();
    m.col(2) = -p.v_axis.normalized();
    const Eigen::FullPivLU<Eigen::Matrix3d> lu(m);
    if (!lu.isInvertible()) continue;
    const Vec3 x = lu.solve(p.origin - o);
    if (x(0) <= 0 || x(1) < -1e-12 || x(2) < -1e-12 || x(1) > p.u_extent + 1e-12 || x(2) > p.v_extent + 1e-12) continue;
    if (!best || x(0) < best_t) {
      best = o + x(0) * d;
      best_t = x(0);
    }
  }
  return best;
}

TEST(Generate, TruthIntersectionMatchesIndependentCast) {
  Scenario s;
  s.target_cloud_points = 50000;  // adds the back wall
  const SyntheticRun run = generate(s);
  ASSERT_EQ(run.planes().size(), 2u);
  for (const TruthFrame& f : run.truth()) {
    const auto expect = solve_planes(run.planes(), f.head_in_scene.translation(), f.gaze_scene.vec());
    ASSERT_EQ(expect.has_value(), f.intersection.has_value());
    if (expect) EXPECT_LT((*expect - *f.intersection).norm(), 1e-6);
  }
}

TEST(Generate, ScreenPointCorners) {
  const Scenario s;
  EXPECT_LT((screen_point(s, {0, 0}) - (s.screen_centre - Vec3(0.53, 0.298, 0))).norm(), 1e-12);
  EXPECT_LT((screen_point(s, {1920, 1080}) - (s.screen_centre + Vec3(0.53, 0.298, 0))).norm(), 1e-12);
}

TEST(Oracle, EventSemantics) {
  Scenario s;
  s.blinks = {{1.0, 1.5}};
  s.occlusions = {{3.0, 3.5}};
  auto run = std::make_shared<const SyntheticRun>(generate(s));
  const PluginSet p = oracle_plugins(run);
  for (const HeadFrame& f : run->head_frames()) {
    const TruthFrame& t = run->truth()[f.image_handle];
    const auto d = p.face_detector->detect(f);
    ASSERT_TRUE(d);
    if (t.occluded) {
      EXPECT_GE(d->confidence, 0.0);
      EXPECT_LE(d->confidence, 0.5);
    } else {
      EXPECT_GE(d->confidence, s.noise.confidence_floor);
    }
    const auto b = p.blink_estimator->estimate(f, {});
    if (t.blink) {
      EXPECT_GE(std::min(b[0], b[1]), 0.9);
    } else {
      EXPECT_LT(std::max(b[0], b[1]), 0.5);
    }
  }
}

TEST(Oracle, NoiselessOutputs) {
  auto run = std::make_shared<const SyntheticRun>(generate(quiet()));
  const PluginSet p = oracle_plugins(run);
  const HeadFrame& f = run->head_frames()[123];
  const TruthFrame& t = run->truth()[123];
  EXPECT_EQ(p.face_detector->detect(f)->confidence, 1.0);
  const LandmarkSet l = p.landmark_estimator->estimate(f, {});
  const PixelPoint expect = project(run->scenario().head_k, t.head_pose.apply(run->head_model().points[30]));
  EXPECT_NEAR(l.points[30].u, expect.u, 1e-9);
  EXPECT_NEAR(l.points[30].v, expect.v, 1e-9);
  const GazeEstimate g = p.gaze_regressor->regress(f, {}, t.head_pose);
  EXPECT_NEAR(angle_between(g.eyes[0], t.gaze_head), 0.0, 1e-7);
  EXPECT_EQ(p.blink_estimator->estimate(f, {}), (std::array<double, 2>{0.0, 0.0}));
}

TEST(Oracle, GazeNoiseStatistics) {
  Scenario s;
  s.duration_s = 200.0;
  const SyntheticRun run = generate(s);
  double sum = 0, sq = 0, lag = 0;
  const std::size_t n = run.head_frames().size();
  for (std::size_t i = 0; i < n; ++i) {
    const double e = run.gaze_error(i).x();
    sum += e;
    sq += e * e;
    if (i > 0) lag += e * run.gaze_error(i - 1).x();
  }
  const double sd = std::sqrt(sq / n);
  EXPECT_NEAR(rad_to_deg(sd), 2.0, 0.1);
  EXPECT_NEAR(lag / sq, 0.6, 0.03);
}

TEST(Oracle, RegistryNeedsSyntheticContext) {
  PluginRegistry reg;
  register_oracle_plugins(reg);
  const PluginRegistry::Names names{"oracle", "oracle", "oracle", "oracle"};
  EXPECT_THROW(reg.create(names, {}), PluginError);
  auto run = std::make_shared<const SyntheticRun>(generate(quiet()));
  EXPECT_TRUE(reg.create(names, {run, "synthetic"}).complete());
}

TEST(ClosedLoop, ZeroNoiseStaticHeadRecoversPose) {
  Scenario s = quiet();
  s.sway_deg = 0;
  s.sway_m = 0;
  const Outcome o = close_loop(s);
  ASSERT_EQ(o.sink.samples.size(), o.run->head_frames().size());
  for (const GazeSample& g : o.sink.samples) {
    const auto err = transform_error(g.head_pose, o.run->truth()[g.sequence].head_pose);
    EXPECT_LT(err.rotation_deg, 0.01);
  }
}

TEST(ClosedLoop, ZeroNoiseIsLossless) {
  const Outcome o = close_loop(quiet());
  const Evaluation e = evaluate(o.sink.samples, o.run->trials());
  EXPECT_EQ(e.trials.size(), 15u);
  EXPECT_LT(e.pooled.accuracy, 0.1);
  EXPECT_LT(e.pooled.precision, 0.1);
  for (const auto& t : e.trials) EXPECT_EQ(t.n_used, 20u);
  for (const GazeSample& g : o.sink.samples) {
    EXPECT_EQ(g.resolution, Resolution::hit);
    const TruthFrame& t = o.run->truth()[g.sequence];
    // The first sample inside the hit cylinder lies within r / cos(incidence)
    // of the exact intersection on the screen plane.
    const double cos_incidence = std::abs(g.gaze_ray->direction.z());
    EXPECT_LT((g.scene_hit->point - *t.intersection).norm(), kDefaultHitRadius / cos_incidence + 1e-9);
  }
}

TEST(ClosedLoop, AccuracyGrowsWithNoise) {
  double previous = -1.0;
  for (double gaze : {0.0, 1.0, 3.0}) {
    Scenario s;
    s.noise.gaze_deg = gaze;
    const Outcome o = close_loop(s);
    const double acc = evaluate(o.sink.samples, o.run->trials()).pooled.accuracy;
    EXPECT_GE(acc, previous);
    previous = acc;
  }
  previous = -1.0;
  for (double px : {0.0, 0.5, 1.5}) {
    Scenario s;
    s.noise.gaze_deg = 0.0;
    s.noise.landmark_px = px;
    const Outcome o = close_loop(s);
    const double acc = evaluate(o.sink.samples, o.run->trials()).pooled.accuracy;
    EXPECT_GE(acc, previous);
    previous = acc;
  }
}

TEST(ClosedLoop, OcclusionGatesEveryFrame) {
  Scenario s;
  s.occlusions = {{2.0, 3.0}, {7.5, 8.0}};
  const Outcome o = close_loop(s);
  EXPECT_EQ(o.stats.samples + o.stats.rejected(), o.run->head_frames().size());
  for (const GazeSample& g : o.sink.samples) EXPECT_FALSE(o.run->truth()[g.sequence].occluded);
  std::size_t occluded = 0;
  for (const auto& t : o.run->truth()) occluded += t.occluded;
  EXPECT_EQ(o.stats.rejections[static_cast<std::size_t>(RejectionReason::low_confidence)], occluded);
}

}  // namespace
}  // namespace icugaze
