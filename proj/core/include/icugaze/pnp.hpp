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

// Perspective-n-point pose recovery.
//
// The direct solver is a closed-form linear least-squares initialization
// (control-point formulation for general point sets, homography
// decomposition for planar sets) followed by Levenberg-Marquardt refinement
// of the pixel reprojection error. solve_pnp_ransac wraps it in a seeded
// RANSAC loop with local optimization of each new best hypothesis.

#include "icugaze/camera.hpp"
#include "icugaze/geometry.hpp"
#include "icugaze/head_model.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace icugaze {

struct PoseEstimate {
  RigidTransform pose;  // model frame -> camera frame
  std::vector<std::size_t> inliers;
  double mean_reprojection_error = 0.0;  // pixels, over inliers only
};

struct RefineOptions {
  int max_iterations = 50;
  double step_tolerance = 1e-10;
};

struct RansacParams {
  int iterations = 100;
  std::size_t sample_size = 6;
  double reproj_threshold_px = 3.0;
  std::size_t min_inliers = 34;
  // Adaptive early exit once this confidence of having drawn an all-inlier
  // sample is reached; `iterations` stays the hard cap.
  double confidence = 0.999;
  std::uint64_t seed = 0;
};

struct Correspondence {
  Vec3 object;       // board frame, metres
  PixelPoint image;  // pixels
};

// Generic solver over parallel arrays. The returned pose has the given
// frames (parent = camera frame, child = model frame); inliers are all input
// indices. Throws Degenerate (fewer than 4 points, collinear or ill-posed
// geometry) or NoConvergence.
PoseEstimate solve_pnp(std::span<const Vec3> object, std::span<const PixelPoint> image,
                       const CameraIntrinsics& k, FrameId camera_frame, FrameId model_frame,
                       const RefineOptions& refine = {});

// Reprojection error in pixels of one point; +inf when behind the camera.
double reprojection_error(const RigidTransform& pose, const Vec3& object, const PixelPoint& image,
                          const CameraIntrinsics& k);

// Direct least squares over `subset` of the 68 landmarks. The returned
// inlier set equals the subset.
PoseEstimate solve_pnp_dls(const std::array<Vec3, kLandmarkCount>& model, const LandmarkSet& obs,
                           const CameraIntrinsics& k, std::span<const std::size_t> subset);

// Robust head pose. Landmarks flagged out-of-frame are never sampled or
// counted. Throws ConsensusFailure when fewer than min_inliers agree.
PoseEstimate solve_pnp_ransac(const std::array<Vec3, kLandmarkCount>& model, const LandmarkSet& obs,
                              const CameraIntrinsics& k, const RansacParams& params);

// Board -> scene camera from corner correspondences (planar allowed).
PoseEstimate estimate_board_pose(std::span<const Correspondence> corr, const CameraIntrinsics& k);

}  // namespace icugaze
