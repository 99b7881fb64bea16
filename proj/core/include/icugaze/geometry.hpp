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

// Rigid-body primitives shared across the engine.
//
// Frame convention (all frames): right-handed, +X right, +Y down, +Z forward.
// For cameras +Z is the optical axis. A positive rotation about +Y ("yaw")
// turns +Z toward +X. Angles are radians internally and degrees at every
// external interface.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>

namespace icugaze {

using Vec3 = Eigen::Vector3d;

// Nanoseconds since the recording epoch.
using Timestamp = std::int64_t;

constexpr Timestamp kNanosPerSecond = 1'000'000'000;
constexpr Timestamp kNanosPerMilli = 1'000'000;

constexpr double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / std::numbers::pi; }

constexpr double to_seconds(Timestamp t) {
  return static_cast<double>(t) / static_cast<double>(kNanosPerSecond);
}
constexpr Timestamp from_seconds(double s) {
  return static_cast<Timestamp>(s * static_cast<double>(kNanosPerSecond) + (s >= 0 ? 0.5 : -0.5));
}

bool is_finite(const Vec3& v);

// Direction of unit length. Construction normalizes; a zero or non-finite
// input throws std::invalid_argument.
class UnitVec3 {
 public:
  UnitVec3() : v_(0.0, 0.0, 1.0) {}
  explicit UnitVec3(const Vec3& v);
  UnitVec3(double x, double y, double z) : UnitVec3(Vec3(x, y, z)) {}

  const Vec3& vec() const { return v_; }
  double x() const { return v_.x(); }
  double y() const { return v_.y(); }
  double z() const { return v_.z(); }
  double dot(const UnitVec3& o) const { return v_.dot(o.v_); }

  bool operator==(const UnitVec3& o) const { return v_ == o.v_; }

 private:
  Vec3 v_;
};

// Unit quaternion, canonicalized to w >= 0.
class Rotation {
 public:
  Rotation() : q_(Eigen::Quaterniond::Identity()) {}
  explicit Rotation(const Eigen::Quaterniond& q);
  explicit Rotation(const Eigen::Matrix3d& m) : Rotation(Eigen::Quaterniond(m)) {}

  static Rotation identity() { return {}; }
  static Rotation from_axis_angle(const Vec3& axis, double angle_rad);
  // Rotation vector (axis * angle, radians).
  static Rotation from_rotation_vector(const Vec3& rv);
  // Intrinsic Y (yaw), then X (pitch), then Z (roll).
  static Rotation from_ypr(double yaw_rad, double pitch_rad, double roll_rad);

  const Eigen::Quaterniond& quat() const { return q_; }
  Eigen::Matrix3d matrix() const { return q_.toRotationMatrix(); }
  Vec3 rotation_vector() const;
  double angle() const;

  Rotation inverse() const { return Rotation(q_.conjugate()); }
  Vec3 operator*(const Vec3& v) const { return q_ * v; }
  Rotation operator*(const Rotation& o) const { return Rotation(q_ * o.q_); }

  static Rotation slerp(const Rotation& a, const Rotation& b, double s);

 private:
  Eigen::Quaterniond q_;
};

// Angle of the relative rotation a^-1 b, radians.
double angular_distance(const Rotation& a, const Rotation& b);

enum class FrameId : std::uint8_t { scene_camera, board, head_camera, head, screen, world };

std::string_view to_string(FrameId f);
std::optional<FrameId> frame_from_string(std::string_view s);

// Maps child-frame coordinates into parent-frame coordinates:
//   p_parent = rotation * p_child + translation
class RigidTransform {
 public:
  RigidTransform(Rotation rotation, Vec3 translation, FrameId parent, FrameId child);

  static RigidTransform identity(FrameId parent, FrameId child);

  const Rotation& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }
  FrameId parent() const { return parent_; }
  FrameId child() const { return child_; }

  Vec3 apply(const Vec3& p) const { return rotation_ * p + translation_; }

 private:
  Rotation rotation_;
  Vec3 translation_;
  FrameId parent_;
  FrameId child_;
};

// a.child must equal b.parent; the result maps b.child into a.parent.
RigidTransform compose(const RigidTransform& a, const RigidTransform& b);
RigidTransform invert(const RigidTransform& t);

// Rotation only; translation never affects a direction.
UnitVec3 transform_direction(const RigidTransform& t, const UnitVec3& v);

// Degrees in [0, 180]. The dot product is clamped to [-1, 1].
double angle_between(const UnitVec3& u, const UnitVec3& v);
double angle_between_rad(const UnitVec3& u, const UnitVec3& v);

// Largest rotation-angle / translation discrepancy between two transforms.
struct TransformError {
  double rotation_deg;
  double translation_m;
};
TransformError transform_error(const RigidTransform& a, const RigidTransform& b);

}  // namespace icugaze
