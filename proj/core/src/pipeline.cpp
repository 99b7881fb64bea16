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

#include "icugaze/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <deque>
#include <exception>
#include <mutex>
#include <numeric>
#include <thread>

namespace icugaze {

namespace {

constexpr std::array<std::string_view, kRejectionReasonCount> kReasonNames = {
    "no_face", "low_confidence", "pnp_failure", "blink", "no_valid_eye", "dropped"};
constexpr std::array<std::string_view, 5> kResolutionNames = {"pending", "hit", "miss", "unpaired", "unresolved"};

Rejection reject(const HeadFrame& f, RejectionReason reason, double confidence) {
  return Rejection{f.sequence, f.timestamp, reason, confidence, std::nullopt};
}

// Incremental nearest-stamp matcher shared by synchronize() and the
// pipeline's resolution stage.
std::optional<std::size_t> nearest(std::span<const Timestamp> scene, std::size_t& first, Timestamp t,
                                   Timestamp tolerance) {
  while (first < scene.size() && scene[first] < t - tolerance) ++first;
  std::optional<std::size_t> best;
  Timestamp best_gap = 0;
  for (std::size_t i = first; i < scene.size() && scene[i] <= t + tolerance; ++i) {
    const Timestamp gap = scene[i] > t ? scene[i] - t : t - scene[i];
    if (!best || gap < best_gap) {  // strict: equal gaps keep the earlier frame
      best = i;
      best_gap = gap;
    }
  }
  return best;
}

}  // namespace

std::string_view to_string(RejectionReason r) { return kReasonNames.at(static_cast<std::size_t>(r)); }
std::string_view to_string(Resolution r) { return kResolutionNames.at(static_cast<std::size_t>(r)); }

void PipelineConfig::validate() const {
  const auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(face_gate_threshold)) throw ValidationError("config: face_gate_threshold outside [0, 1]");
  if (!unit(blink_threshold)) throw ValidationError("config: blink_threshold outside [0, 1]");
  if (sync_tolerance < 0) throw ValidationError("config: negative sync tolerance");
  if (!(hit_radius > 0.0)) throw ValidationError("config: hit_radius must be positive");
  if (!(ipd >= kMinIpd && ipd <= kMaxIpd)) throw ValidationError("config: ipd outside [0.04, 0.08]");
  if (queue_depth == 0 || tree_buffer == 0) throw ValidationError("config: zero queue or buffer size");
  if (ransac.sample_size < 4 || ransac.iterations <= 0) throw ValidationError("config: bad RANSAC parameters");
  if (!(ransac.reproj_threshold_px > 0.0)) throw ValidationError("config: reproj_threshold_px must be positive");
  if (!(ransac.confidence > 0.0 && ransac.confidence < 1.0)) throw ValidationError("config: RANSAC confidence");
  if (octree.leaf_capacity == 0 || octree.max_depth < 0 || octree.max_depth > 255) {
    throw ValidationError("config: bad octree options");
  }
}

std::size_t PipelineStats::rejected() const { return std::accumulate(rejections.begin(), rejections.end(), std::size_t{0}); }

std::uint64_t mix_seed(std::uint64_t base, std::uint64_t sequence) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (sequence + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

bool gate_face(const FaceDetection& d, double threshold) { return d.confidence >= threshold; }

std::optional<UnitVec3> fuse_eye_gazes(const GazeEstimate& g, const BlinkEstimate& b, double blink_threshold) {
  Vec3 sum = Vec3::Zero();
  int used = 0;
  for (std::size_t eye = 0; eye < 2; ++eye) {
    if (!g.valid[eye] || b.probability[eye] >= blink_threshold) continue;
    sum += g.eyes[eye].vec();
    ++used;
  }
  if (used == 0 || sum.norm() == 0.0) return std::nullopt;
  return UnitVec3(sum);
}

FrameResult process_head_frame(const HeadFrame& frame, const PluginSet& plugins, const PipelineConfig& cfg,
                               const HeadModel& model, const CameraIntrinsics& head_k) {
  const std::optional<FaceDetection> face = plugins.face_detector->detect(frame);
  if (!face) return reject(frame, RejectionReason::no_face, 0.0);
  if (!gate_face(*face, cfg.face_gate_threshold)) {
    return reject(frame, RejectionReason::low_confidence, face->confidence);
  }

  LandmarkSet landmarks = plugins.landmark_estimator->estimate(frame, *face);
  landmarks.flag_out_of_frame(head_k);

  RansacParams ransac = cfg.ransac;
  ransac.seed = mix_seed(cfg.seed ^ cfg.ransac.seed, frame.sequence);
  std::optional<PoseEstimate> pose;
  try {
    pose = solve_pnp_ransac(model.points, landmarks, head_k, ransac);
  } catch (const ConsensusFailure&) {
  } catch (const Degenerate&) {
  } catch (const NoConvergence&) {
  }
  if (!pose) return reject(frame, RejectionReason::pnp_failure, face->confidence);

  const EyePatches patches = eye_patches(landmarks);
  const GazeEstimate gaze = plugins.gaze_regressor->regress(frame, patches, pose->pose);
  const BlinkEstimate blink =
      BlinkEstimate::from_probabilities(plugins.blink_estimator->estimate(frame, patches), cfg.blink_threshold);
  if (blink.is_blink) {
    Rejection r = reject(frame, RejectionReason::blink, face->confidence);
    r.blink = blink;
    return r;
  }
  const std::optional<UnitVec3> fused = fuse_eye_gazes(gaze, blink, cfg.blink_threshold);
  if (!fused) return reject(frame, RejectionReason::no_valid_eye, face->confidence);

  GazeSample s;
  s.sequence = frame.sequence;
  s.timestamp = frame.timestamp;
  s.head_pose = pose->pose;
  s.gaze = *fused;
  s.blink = blink;
  s.face_confidence = face->confidence;
  s.pnp_inliers = pose->inliers.size();
  s.reprojection_error_px = pose->mean_reprojection_error;
  return s;
}

GazeSample resolve_gaze(GazeSample sample, const TransformTree& tree, const Octree& octree,
                        const PipelineConfig& cfg) {
  std::optional<RigidTransform> scene_from_camera;
  try {
    scene_from_camera = tree.lookup(FrameId::scene_camera, FrameId::head_camera, sample.timestamp);
  } catch (const Extrapolation&) {
  } catch (const NoPath&) {
  }
  if (!scene_from_camera) {
    sample.resolution = Resolution::unresolved;
    sample.gaze_ray.reset();
    sample.scene_hit.reset();
    return sample;
  }
  const RigidTransform scene_from_head = compose(*scene_from_camera, sample.head_pose);
  const Ray ray{scene_from_head.translation(), transform_direction(scene_from_head, sample.gaze),
                FrameId::scene_camera};
  sample.gaze_ray = ray;
  sample.scene_hit = octree.intersect(ray, cfg.hit_radius);
  sample.resolution = sample.scene_hit ? Resolution::hit : Resolution::miss;
  return sample;
}

std::vector<std::optional<std::size_t>> synchronize(std::span<const Timestamp> head, std::span<const Timestamp> scene,
                                                    Timestamp tolerance) {
  std::vector<std::optional<std::size_t>> out;
  out.reserve(head.size());
  std::size_t first = 0;
  for (Timestamp t : head) out.push_back(nearest(scene, first, t, tolerance));
  return out;
}

Pipeline::Pipeline(PipelineConfig cfg, PluginSet plugins, CameraIntrinsics head_k, CameraIntrinsics scene_k,
                   RigidTransform board_to_head_camera)
    : cfg_(std::move(cfg)),
      plugins_(std::move(plugins)),
      head_k_(head_k),
      scene_k_(scene_k),
      board_to_head_camera_(std::move(board_to_head_camera)),
      model_(build_head_model(cfg_.ipd)) {
  cfg_.validate();
  head_k_.validate();
  scene_k_.validate();
  if (!plugins_.complete()) throw PluginError("pipeline: incomplete plugin set");
  if (board_to_head_camera_.parent() != FrameId::board || board_to_head_camera_.child() != FrameId::head_camera) {
    throw ValidationError("pipeline: static calibration must map head_camera into board");
  }
}

PipelineStats Pipeline::run(HeadFrameSource& head, SceneFrameSource& scene, SampleSink& sink, QueuePolicy policy) {
  const auto started = std::chrono::steady_clock::now();
  PipelineStats stats;

  TransformTree tree({cfg_.tree_buffer, cfg_.sync_tolerance});
  tree.set_static(board_to_head_camera_);

  struct SceneProduct {
    Timestamp timestamp;
    std::shared_ptr<const Octree> octree;
  };
  BoundedQueue<HeadFrame> ingest(cfg_.queue_depth, policy);
  BoundedQueue<FrameResult> results(cfg_.queue_depth, QueuePolicy::block);
  BoundedQueue<SceneProduct> scenes(cfg_.queue_depth, QueuePolicy::block);

  std::mutex dropped_mutex;
  std::deque<HeadFrame> dropped;
  std::atomic<std::size_t> head_frames{0}, scene_frames{0}, board_failures{0};
  std::atomic<double> build_seconds{0.0};

  std::mutex error_mutex;
  std::exception_ptr error;
  const auto fail = [&](std::exception_ptr e) {
    {
      std::lock_guard lock(error_mutex);
      if (!error) error = e;
    }
    ingest.close();
    results.close();
    scenes.close();
  };

  std::thread ingest_thread([&] {
    try {
      while (auto f = head.next()) {
        ++head_frames;
        if (auto evicted = ingest.push(*f)) {
          std::lock_guard lock(dropped_mutex);
          dropped.push_back(*evicted);
        }
      }
    } catch (...) {
      fail(std::current_exception());
    }
    ingest.close();
  });

  std::thread head_thread([&] {
    const auto flush_dropped = [&](std::optional<std::uint64_t> before) {
      std::deque<HeadFrame> out;
      {
        std::lock_guard lock(dropped_mutex);
        while (!dropped.empty() && (!before || dropped.front().sequence < *before)) {
          out.push_back(dropped.front());
          dropped.pop_front();
        }
      }
      for (const auto& f : out) results.push(reject(f, RejectionReason::dropped, 0.0));
    };
    try {
      while (auto f = ingest.pop()) {
        flush_dropped(f->sequence);
        results.push(process_head_frame(*f, plugins_, cfg_, model_, head_k_));
      }
      flush_dropped(std::nullopt);
    } catch (...) {
      fail(std::current_exception());
    }
    results.close();
  });

  std::thread scene_thread([&] {
    try {
      while (auto sf = scene.next()) {
        ++scene_frames;
        try {
          const PoseEstimate board = estimate_board_pose(sf->board, scene_k_);
          tree.insert(sf->timestamp, board.pose);
        } catch (const Degenerate&) {
          ++board_failures;
        } catch (const NoConvergence&) {
          ++board_failures;
        }
        const auto t0 = std::chrono::steady_clock::now();
        auto octree = std::make_shared<const Octree>(
            Octree::build(sf->cloud ? *sf->cloud : PointCloud{{}, sf->timestamp}, cfg_.octree));
        const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        build_seconds.store(build_seconds.load() + dt);
        scenes.push({sf->timestamp, std::move(octree)});
      }
    } catch (...) {
      fail(std::current_exception());
    }
    scenes.close();
  });

  try {
    std::deque<SceneProduct> window;
    bool scene_done = false;
    const auto fill_until = [&](Timestamp limit) {
      while (!scene_done && (window.empty() || window.back().timestamp <= limit)) {
        auto p = scenes.pop();
        if (!p) {
          scene_done = true;
        } else {
          window.push_back(std::move(*p));
        }
      }
    };

    while (auto r = results.pop()) {
      if (auto* rej = std::get_if<Rejection>(&*r)) {
        ++stats.rejections[static_cast<std::size_t>(rej->reason)];
        sink.on_rejection(*rej);
        continue;
      }
      GazeSample sample = std::get<GazeSample>(std::move(*r));
      const Timestamp t = sample.timestamp;
      fill_until(t + cfg_.sync_tolerance);
      while (!window.empty() && window.front().timestamp < t - cfg_.sync_tolerance) window.pop_front();

      std::vector<Timestamp> stamps(window.size());
      std::transform(window.begin(), window.end(), stamps.begin(), [](const SceneProduct& p) { return p.timestamp; });
      std::size_t first = 0;
      const auto match = nearest(stamps, first, t, cfg_.sync_tolerance);
      if (!match) {
        sample.resolution = Resolution::unpaired;
      } else {
        sample = resolve_gaze(std::move(sample), tree, *window[*match].octree, cfg_);
        sample.scene_timestamp = window[*match].timestamp;
      }
      ++stats.samples;
      ++stats.resolutions[static_cast<std::size_t>(sample.resolution)];
      sink.on_sample(sample);
    }
    while (!scene_done) {
      if (!scenes.pop()) scene_done = true;
    }
  } catch (...) {
    fail(std::current_exception());
  }

  ingest_thread.join();
  head_thread.join();
  scene_thread.join();
  if (error) std::rethrow_exception(error);

  stats.head_frames = head_frames;
  stats.scene_frames = scene_frames;
  stats.board_pose_failures = board_failures;
  stats.octree_build_seconds = build_seconds;
  stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return stats;
}

}  // namespace icugaze
