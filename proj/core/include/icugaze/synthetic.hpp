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

// Ground-truth scenario generator and oracle plugins standing in for the
// learned stages. Everything is a pure function of (scenario, seed).
//
// Scene layout (scene-camera frame, +X right, +Y down, +Z toward the
// screen): the patient's head sits in front of and below the scene camera
// and faces the screen ~2 m away; the head camera sits at the screen's
// bottom-left corner looking back at the patient, with the calibration
// board rigidly attached to it.

#include "icugaze/camera.hpp"
#include "icugaze/evaluation.hpp"
#include "icugaze/geometry.hpp"
#include "icugaze/head_model.hpp"
#include "icugaze/octree.hpp"
#include "icugaze/pipeline.hpp"
#include "icugaze/plugins.hpp"
#include "icugaze/pnp.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace icugaze {

struct NoiseModel {
  double landmark_px = 1.0;
  // Per-axis (yaw, pitch) standard deviation of the regressed gaze.
  double gaze_deg = 2.0;
  // Lag-one correlation of the gaze error between consecutive head frames.
  double gaze_correlation = 0.6;
  // Unoccluded detector confidence is drawn from [confidence_floor, 1].
  double confidence_floor = 0.8;
  double depth_m = 0.0;
  double board_corner_px = 0.2;

  static NoiseModel none() { return {0.0, 0.0, 0.0, 1.0, 0.0, 0.0}; }
  void validate() const;
};

struct TimeWindow {
  double start_s = 0.0;
  double end_s = 0.0;

  bool contains(double t) const { return t >= start_s && t < end_s; }
};

// Rectangle origin + s*u_axis + t*v_axis, s in [0, u_extent], t in [0, v_extent].
struct ScenePlane {
  Vec3 origin = Vec3::Zero();
  Vec3 u_axis = Vec3::UnitX();
  Vec3 v_axis = Vec3::UnitY();
  double u_extent = 1.0;
  double v_extent = 1.0;
  double spacing = 0.01;
};

struct MarkerProtocol {
  int rows = 3;
  int cols = 5;
  double marker_size_m = 0.1;
  int samples_per_marker = 40;
  // Frames at the start of each window spent moving in from the previous
  // marker, and at the end spent leaving toward the next one.
  int lead_in_frames = 6;
  int lead_out_frames = 4;
};

struct Scenario {
  std::string name = "replicated_lab";
  std::uint64_t seed = 1;
  double head_rate_hz = 50.0;
  double scene_rate_hz = 30.0;
  // 0 runs exactly one pass over the marker grid; otherwise markers cycle
  // until the duration is reached.
  double duration_s = 0.0;

  CameraIntrinsics head_k = CameraIntrinsics::head_camera_default();
  CameraIntrinsics scene_k = CameraIntrinsics::scene_camera_default();

  // Screen, centred at screen_centre and facing the patient.
  Vec3 screen_centre{0.0, 0.0, 2.5};
  double screen_width_m = 1.06;
  double screen_height_m = 0.596;
  int screen_width_px = 1920;
  int screen_height_px = 1080;
  double screen_spacing_m = 0.005;

  Vec3 head_position{0.0, 0.25, 0.5};
  double bed_incline_deg = 30.0;
  double sway_deg = 2.0;
  double sway_m = 0.005;
  double ipd = kDefaultIpd;

  // Head camera placement relative to the screen's bottom-left corner.
  Vec3 head_camera_offset{-0.05, 0.05, -0.02};
  double board_size_m = 0.2;
  int board_corners_per_side = 5;

  MarkerProtocol markers;
  std::vector<ScenePlane> extra_planes;
  // When nonzero, a back wall is added with a spacing that brings the cloud
  // to about this many points.
  std::size_t target_cloud_points = 0;

  NoiseModel noise;
  std::vector<TimeWindow> blinks;
  std::vector<TimeWindow> occlusions;

  // Throws InvalidScenario.
  void validate() const;

  static Scenario replicated_lab();
};

struct TruthFrame {
  std::uint64_t sequence = 0;
  Timestamp timestamp = 0;
  RigidTransform head_pose = RigidTransform::identity(FrameId::head_camera, FrameId::head);
  RigidTransform head_in_scene = RigidTransform::identity(FrameId::scene_camera, FrameId::head);
  UnitVec3 gaze_head;   // noiseless, head frame
  UnitVec3 gaze_scene;  // noiseless, scene frame
  Vec3 target = Vec3::Zero();
  std::optional<Vec3> intersection;  // analytic cast against the scene planes
  bool blink = false;
  bool occluded = false;
  int trial = -1;  // index into SyntheticRun::trials
};

struct SceneFrameSpec {
  std::uint64_t sequence = 0;
  Timestamp timestamp = 0;
  std::vector<Correspondence> board;
};

// One generated scenario. Head frames and truth are materialized; point
// clouds are produced on demand by cloud().
class SyntheticRun {
 public:
  const Scenario& scenario() const { return scenario_; }
  const std::vector<HeadFrame>& head_frames() const { return head_frames_; }
  const std::vector<TruthFrame>& truth() const { return truth_; }
  const std::vector<SceneFrameSpec>& scene_frames() const { return scene_frames_; }
  const std::vector<TrialDefinition>& trials() const { return trials_; }
  const std::vector<ScenePlane>& planes() const { return planes_; }
  const RigidTransform& board_to_head_camera() const { return board_to_head_camera_; }
  const RigidTransform& head_camera_in_scene() const { return head_camera_in_scene_; }
  const HeadModel& head_model() const { return model_; }

  // Cloud for scene frame i, with depth noise seeded per frame.
  PointCloud cloud(std::size_t i) const;
  std::size_t cloud_size() const { return base_cloud_.size(); }

  // Seeded gaze error (yaw, pitch) in radians for head frame i.
  Eigen::Vector2d gaze_error(std::size_t i) const { return gaze_error_[i]; }

 private:
  friend SyntheticRun generate(const Scenario& s);

  Scenario scenario_;
  HeadModel model_;
  RigidTransform board_to_head_camera_ = RigidTransform::identity(FrameId::board, FrameId::head_camera);
  RigidTransform head_camera_in_scene_ = RigidTransform::identity(FrameId::scene_camera, FrameId::head_camera);
  std::vector<HeadFrame> head_frames_;
  std::vector<TruthFrame> truth_;
  std::vector<SceneFrameSpec> scene_frames_;
  std::vector<TrialDefinition> trials_;
  std::vector<ScenePlane> planes_;
  std::vector<Vec3> base_cloud_;
  std::vector<Eigen::Vector2d> gaze_error_;
};

SyntheticRun generate(const Scenario& s);

// Nearest forward intersection of a ray with the scene rectangles.
std::optional<Vec3> cast_planes(const std::vector<ScenePlane>& planes, const Vec3& origin, const Vec3& dir);

// Screen pixel -> scene-camera point on the screen plane.
Vec3 screen_point(const Scenario& s, const PixelPoint& px);

// The four oracle plugins over a generated run.
PluginSet oracle_plugins(std::shared_ptr<const SyntheticRun> run);

// Registers the "oracle" factories; the context payload must be a
// SyntheticRun with source_kind "synthetic".
void register_oracle_plugins(PluginRegistry& registry);

class SyntheticHeadSource : public HeadFrameSource {
 public:
  explicit SyntheticHeadSource(std::shared_ptr<const SyntheticRun> run) : run_(std::move(run)) {}
  std::optional<HeadFrame> next() override;

 private:
  std::shared_ptr<const SyntheticRun> run_;
  std::size_t next_ = 0;
};

class SyntheticSceneSource : public SceneFrameSource {
 public:
  explicit SyntheticSceneSource(std::shared_ptr<const SyntheticRun> run) : run_(std::move(run)) {}
  std::optional<SceneFrame> next() override;

 private:
  std::shared_ptr<const SyntheticRun> run_;
  std::size_t next_ = 0;
};

}  // namespace icugaze
