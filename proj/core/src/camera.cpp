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

#include "icugaze/camera.hpp"

#include "icugaze/errors.hpp"

#include <cmath>
#include <string>

namespace icugaze {

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw ValidationError("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw ValidationError("intrinsics: resolution must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height)) {
    throw ValidationError("intrinsics: principal point outside the image");
  }
}

Eigen::Matrix3d CameraIntrinsics::matrix() const {
  Eigen::Matrix3d k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

PixelPoint project(const CameraIntrinsics& k, const Vec3& p) {
  if (!(p.z() > 0.0)) throw BehindCamera("project: z = " + std::to_string(p.z()));
  return {k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy};
}

Eigen::Vector2d normalize(const CameraIntrinsics& k, const PixelPoint& px) {
  return {(px.u - k.cx) / k.fx, (px.v - k.cy) / k.fy};
}

Ray backproject(const CameraIntrinsics& k, const PixelPoint& px, FrameId frame) {
  const Eigen::Vector2d n = normalize(k, px);
  return {Vec3::Zero(), UnitVec3(n.x(), n.y(), 1.0), frame};
}

}  // namespace icugaze
