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

#include "icugaze/bounded_queue.hpp"
#include "icugaze/camera.hpp"
#include "icugaze/octree.hpp"
#include "icugaze/plugins.hpp"
#include "icugaze/pnp.hpp"
#include "icugaze/transform_tree.hpp"

#include <array>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

namespace icugaze {

struct PipelineConfig {
  double face_gate_threshold = 0.6;
  double blink_threshold = 0.5;
  Timestamp sync_tolerance = 50 * kNanosPerMilli;
  double ipd = kDefaultIpd;
  double hit_radius = kDefaultHitRadius;
  RansacParams ransac;
  OctreeOptions octree;
  std::size_t queue_depth = 4;
  std::size_t tree_buffer = 512;
  std::uint64_t seed = 0;
  PluginRegistry::Names plugins{"replay", "replay", "replay", "replay"};

  // Throws ValidationError when a threshold leaves [0, 1] or a size is zero.
  void validate() const;
};

enum class RejectionReason { no_face, low_confidence, pnp_failure, blink, no_valid_eye, dropped };
constexpr std::size_t kRejectionReasonCount = 6;

std::string_view to_string(RejectionReason r);

struct Rejection {
  std::uint64_t sequence = 0;
  Timestamp timestamp = 0;
  RejectionReason reason = RejectionReason::no_face;
  double face_confidence = 0.0;
  std::optional<BlinkEstimate> blink;  // set for blink rejections
};

enum class Resolution { pending, hit, miss, unpaired, unresolved };

std::string_view to_string(Resolution r);

struct GazeSample {
  std::uint64_t sequence = 0;
  Timestamp timestamp = 0;
  RigidTransform head_pose = RigidTransform::identity(FrameId::head_camera, FrameId::head);
  UnitVec3 gaze;  // head frame
  BlinkEstimate blink;
  double face_confidence = 0.0;
  std::size_t pnp_inliers = 0;
  double reprojection_error_px = 0.0;

  Resolution resolution = Resolution::pending;
  std::optional<Timestamp> scene_timestamp;
  std::optional<Ray> gaze_ray;  // scene-camera frame; origin at the head-pose translation
  std::optional<RayHit> scene_hit;
};

using FrameResult = std::variant<GazeSample, Rejection>;

bool gate_face(const FaceDetection& d, double threshold);

// Normalized mean of the valid, non-blinking eyes (blinking means the eye's
// probability reached `blink_threshold`); nullopt when none qualify.
std::optional<UnitVec3> fuse_eye_gazes(const GazeEstimate& g, const BlinkEstimate& b, double blink_threshold = 0.5);

// Per-frame head branch: detection, gate, landmarks, robust PnP, eye
// patches, gaze regression, blink, fusion. Only PluginError propagates.
FrameResult process_head_frame(const HeadFrame& frame, const PluginSet& plugins, const PipelineConfig& cfg,
                               const HeadModel& model, const CameraIntrinsics& head_k);

// Transports the gaze into the scene-camera frame through `tree` and casts
// it against `octree`. Extrapolation or a missing path marks the sample
// unresolved.
GazeSample resolve_gaze(GazeSample sample, const TransformTree& tree, const Octree& octree,
                        const PipelineConfig& cfg);

// Nearest scene stamp within tolerance for each head stamp; ties go to the
// earlier scene frame. Both inputs must be time-ordered.
std::vector<std::optional<std::size_t>> synchronize(std::span<const Timestamp> head, std::span<const Timestamp> scene,
                                                    Timestamp tolerance);

struct SceneFrame {
  std::uint64_t sequence = 0;
  Timestamp timestamp = 0;
  std::shared_ptr<const PointCloud> cloud;
  std::vector<Correspondence> board;
};

class HeadFrameSource {
 public:
  virtual ~HeadFrameSource() = default;
  virtual std::optional<HeadFrame> next() = 0;
};

class SceneFrameSource {
 public:
  virtual ~SceneFrameSource() = default;
  virtual std::optional<SceneFrame> next() = 0;
};

class SampleSink {
 public:
  virtual ~SampleSink() = default;
  virtual void on_sample(const GazeSample& sample) = 0;
  virtual void on_rejection(const Rejection& rejection) = 0;
};

// Keeps every delivered result in arrival order.
class ResultCollector : public SampleSink {
 public:
  void on_sample(const GazeSample& sample) override { results.emplace_back(sample); }
  void on_rejection(const Rejection& rejection) override { results.emplace_back(rejection); }

  std::vector<FrameResult> results;
};

struct PipelineStats {
  std::size_t head_frames = 0;
  std::size_t scene_frames = 0;
  std::size_t samples = 0;
  std::array<std::size_t, kRejectionReasonCount> rejections{};
  std::array<std::size_t, 5> resolutions{};  // indexed by Resolution
  std::size_t board_pose_failures = 0;
  double wall_seconds = 0.0;
  double octree_build_seconds = 0.0;

  std::size_t rejected() const;
  double samples_per_second() const { return wall_seconds > 0 ? samples / wall_seconds : 0.0; }
};

// Three concurrent stages joined by bounded queues: head-frame processing,
// scene ingest (board pose + octree build), and resolution on the calling
// thread. Outputs are delivered to the sink in head-frame order.
//
// With QueuePolicy::block the result is a deterministic function of the
// inputs. With drop_oldest, head frames that arrive while the head stage's
// input queue is full are evicted oldest first and reported as `dropped`.
class Pipeline {
 public:
  // `board_to_head_camera` is the static calibration edge (parent board,
  // child head_camera).
  Pipeline(PipelineConfig cfg, PluginSet plugins, CameraIntrinsics head_k, CameraIntrinsics scene_k,
           RigidTransform board_to_head_camera);

  PipelineStats run(HeadFrameSource& head, SceneFrameSource& scene, SampleSink& sink,
                    QueuePolicy policy = QueuePolicy::block);

  const PipelineConfig& config() const { return cfg_; }

 private:
  PipelineConfig cfg_;
  PluginSet plugins_;
  CameraIntrinsics head_k_;
  CameraIntrinsics scene_k_;
  RigidTransform board_to_head_camera_;
  HeadModel model_;
};

// Mixes a base seed with a frame sequence number (splitmix64 finalizer).
std::uint64_t mix_seed(std::uint64_t base, std::uint64_t sequence);

}  // namespace icugaze
