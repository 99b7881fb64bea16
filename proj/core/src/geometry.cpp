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

#include "icugaze/geometry.hpp"

#include "icugaze/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace icugaze {

namespace {

Eigen::Quaterniond canonical(Eigen::Quaterniond q) {
  q.normalize();
  if (q.w() < 0.0) q.coeffs() = -q.coeffs();
  return q;
}

constexpr std::array<std::string_view, 6> kFrameNames = {
    "scene_camera", "board", "head_camera", "head", "screen", "world"};

}  // namespace

bool is_finite(const Vec3& v) { return v.allFinite(); }

UnitVec3::UnitVec3(const Vec3& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || n == 0.0) throw std::invalid_argument("UnitVec3: zero or non-finite vector");
  v_ = v / n;
}

Rotation::Rotation(const Eigen::Quaterniond& q) : q_(canonical(q)) {}

Rotation Rotation::from_axis_angle(const Vec3& axis, double angle_rad) {
  return Rotation(Eigen::Quaterniond(Eigen::AngleAxisd(angle_rad, axis.normalized())));
}

Rotation Rotation::from_rotation_vector(const Vec3& rv) {
  const double angle = rv.norm();
  if (angle < 1e-300) return identity();
  return from_axis_angle(rv / angle, angle);
}

Rotation Rotation::from_ypr(double yaw_rad, double pitch_rad, double roll_rad) {
  const Eigen::Quaterniond q = Eigen::AngleAxisd(yaw_rad, Vec3::UnitY()) *
                               Eigen::AngleAxisd(pitch_rad, Vec3::UnitX()) *
                               Eigen::AngleAxisd(roll_rad, Vec3::UnitZ());
  return Rotation(q);
}

Vec3 Rotation::rotation_vector() const {
  const Eigen::AngleAxisd aa(q_);
  return aa.axis() * aa.angle();
}

double Rotation::angle() const {
  // w >= 0, so the half-angle lies in [0, pi/2].
  return 2.0 * std::atan2(q_.vec().norm(), q_.w());
}

Rotation Rotation::slerp(const Rotation& a, const Rotation& b, double s) {
  return Rotation(a.q_.slerp(s, b.q_));
}

double angular_distance(const Rotation& a, const Rotation& b) { return (a.inverse() * b).angle(); }

std::string_view to_string(FrameId f) { return kFrameNames.at(static_cast<std::size_t>(f)); }

std::optional<FrameId> frame_from_string(std::string_view s) {
  for (std::size_t i = 0; i < kFrameNames.size(); ++i) {
    if (kFrameNames[i] == s) return static_cast<FrameId>(i);
  }
  return std::nullopt;
}

RigidTransform::RigidTransform(Rotation rotation, Vec3 translation, FrameId parent, FrameId child)
    : rotation_(rotation), translation_(std::move(translation)), parent_(parent), child_(child) {
  if (!translation_.allFinite()) throw std::invalid_argument("RigidTransform: non-finite translation");
}

RigidTransform RigidTransform::identity(FrameId parent, FrameId child) {
  return {Rotation::identity(), Vec3::Zero(), parent, child};
}

RigidTransform compose(const RigidTransform& a, const RigidTransform& b) {
  if (a.child() != b.parent()) {
    throw FrameMismatch("compose: " + std::string(to_string(a.child())) + " != " +
                        std::string(to_string(b.parent())));
  }
  return {a.rotation() * b.rotation(), a.rotation() * b.translation() + a.translation(), a.parent(),
          b.child()};
}

RigidTransform invert(const RigidTransform& t) {
  const Rotation r = t.rotation().inverse();
  return {r, -(r * t.translation()), t.child(), t.parent()};
}

UnitVec3 transform_direction(const RigidTransform& t, const UnitVec3& v) {
  return UnitVec3(t.rotation() * v.vec());
}

double angle_between_rad(const UnitVec3& u, const UnitVec3& v) {
  // atan2 form of acos(clamp(u.v, -1, 1)); stays accurate near 0 and 180.
  const double c = std::clamp(u.dot(v), -1.0, 1.0);
  const double s = u.vec().cross(v.vec()).norm();
  return std::atan2(s, c);
}

double angle_between(const UnitVec3& u, const UnitVec3& v) { return rad_to_deg(angle_between_rad(u, v)); }

TransformError transform_error(const RigidTransform& a, const RigidTransform& b) {
  return {rad_to_deg(angular_distance(a.rotation(), b.rotation())),
          (a.translation() - b.translation()).norm()};
}

}  // namespace icugaze
