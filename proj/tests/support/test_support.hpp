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

// Seeded generators shared by the unit and acceptance suites.

#include "icugaze/camera.hpp"
#include "icugaze/geometry.hpp"

#include <random>

namespace icugaze::testing {

inline Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Rotation(Eigen::Quaterniond(n(rng), n(rng), n(rng), n(rng)));
}

inline Vec3 random_vec(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  return {u(rng), u(rng), u(rng)};
}

inline UnitVec3 random_unit(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return UnitVec3(n(rng), n(rng), n(rng));
}

inline RigidTransform random_transform(std::mt19937_64& rng, FrameId parent, FrameId child) {
  return {random_rotation(rng), random_vec(rng, -3.0, 3.0), parent, child};
}

// Head pose facing the camera from roughly `depth` metres: the head frame's
// +z (out of the face) points back toward the camera, perturbed by up to
// `max_angle_deg` of yaw, pitch and roll.
inline RigidTransform random_head_pose(std::mt19937_64& rng, double depth, double max_angle_deg) {
  std::uniform_real_distribution<double> a(-deg_to_rad(max_angle_deg), deg_to_rad(max_angle_deg));
  std::uniform_real_distribution<double> lateral(-0.25, 0.25);
  std::uniform_real_distribution<double> dz(-0.2, 0.2);
  const Rotation facing = Rotation::from_axis_angle(Vec3::UnitY(), std::numbers::pi);
  const Rotation r = Rotation::from_ypr(a(rng), a(rng), a(rng)) * facing;
  return {r, Vec3(lateral(rng), lateral(rng), depth + dz(rng)), FrameId::head_camera, FrameId::head};
}

}  // namespace icugaze::testing
