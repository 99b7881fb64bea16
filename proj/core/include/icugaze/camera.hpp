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

#include "icugaze/geometry.hpp"

namespace icugaze {

// Pinhole intrinsics, pre-rectified (no lens distortion).
struct CameraIntrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int width = 0;
  int height = 0;

  // Throws ValidationError when fx, fy <= 0 or the principal point is
  // outside the image.
  void validate() const;

  Eigen::Matrix3d matrix() const;

  bool contains(double u, double v) const { return u >= 0.0 && v >= 0.0 && u < width && v < height; }

  static CameraIntrinsics head_camera_default() { return {900.0, 900.0, 512.0, 384.0, 1024, 768}; }
  static CameraIntrinsics scene_camera_default() { return {1400.0, 1400.0, 960.0, 540.0, 1920, 1080}; }

  bool operator==(const CameraIntrinsics&) const = default;
};

struct PixelPoint {
  double u = 0.0;
  double v = 0.0;

  Eigen::Vector2d vec() const { return {u, v}; }
};

struct Ray {
  Vec3 origin = Vec3::Zero();
  UnitVec3 direction;
  FrameId frame = FrameId::scene_camera;

  Vec3 at(double s) const { return origin + s * direction.vec(); }
};

// u = fx x/z + cx, v = fy y/z + cy. Throws BehindCamera when z <= 0.
PixelPoint project(const CameraIntrinsics& k, const Vec3& p);

// Ray from the camera centre through the pixel, expressed in `frame`.
Ray backproject(const CameraIntrinsics& k, const PixelPoint& px, FrameId frame = FrameId::head_camera);

// Normalized image coordinates (x/z, y/z) of a pixel.
Eigen::Vector2d normalize(const CameraIntrinsics& k, const PixelPoint& px);

}  // namespace icugaze
