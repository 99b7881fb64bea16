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
#include "icugaze/geometry.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace icugaze {
namespace {

using testing::random_rotation;
using testing::random_transform;
using testing::random_unit;

RigidTransform translate(double x, double y, double z, FrameId parent, FrameId child) {
  return {Rotation::identity(), Vec3(x, y, z), parent, child};
}

void expect_near(const RigidTransform& a, const RigidTransform& b, double tol) {
  const auto e = transform_error(a, b);
  EXPECT_LT(deg_to_rad(e.rotation_deg), tol);
  EXPECT_LT(e.translation_m, tol);
  EXPECT_EQ(a.parent(), b.parent());
  EXPECT_EQ(a.child(), b.child());
}

TEST(Compose, IdentityIsNeutral) {
  std::mt19937_64 rng(1);
  const auto t = random_transform(rng, FrameId::board, FrameId::head_camera);
  expect_near(compose(RigidTransform::identity(FrameId::board, FrameId::board), t), t, 1e-12);
}

TEST(Compose, InverseGivesIdentity) {
  std::mt19937_64 rng(2);
  const auto t = random_transform(rng, FrameId::board, FrameId::head_camera);
  expect_near(compose(t, invert(t)), RigidTransform::identity(FrameId::board, FrameId::board), 1e-9);
}

TEST(Compose, TranslationsAdd) {
  const auto a = translate(1, 0, 0, FrameId::scene_camera, FrameId::board);
  const auto b = translate(0, 2, 0, FrameId::board, FrameId::head_camera);
  const auto c = compose(a, b);
  EXPECT_DOUBLE_EQ(c.translation().x(), 1.0);
  EXPECT_DOUBLE_EQ(c.translation().y(), 2.0);
  EXPECT_DOUBLE_EQ(c.translation().z(), 0.0);
  EXPECT_EQ(c.parent(), FrameId::scene_camera);
  EXPECT_EQ(c.child(), FrameId::head_camera);
}

TEST(Compose, FrameMismatchThrows) {
  const auto a = translate(1, 0, 0, FrameId::scene_camera, FrameId::board);
  const auto b = translate(0, 2, 0, FrameId::head_camera, FrameId::head);
  EXPECT_THROW(compose(a, b), FrameMismatch);
}

TEST(Compose, AssociativeOnRandomTransforms) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 1000; ++i) {
    const auto a = random_transform(rng, FrameId::world, FrameId::scene_camera);
    const auto b = random_transform(rng, FrameId::scene_camera, FrameId::board);
    const auto c = random_transform(rng, FrameId::board, FrameId::head_camera);
    expect_near(compose(compose(a, b), c), compose(a, compose(b, c)), 1e-9);
  }
}

TEST(Compose, MapsChildPointsIntoParent) {
  std::mt19937_64 rng(4);
  const auto a = random_transform(rng, FrameId::scene_camera, FrameId::board);
  const auto b = random_transform(rng, FrameId::board, FrameId::head_camera);
  const Vec3 p(0.3, -0.2, 1.7);
  EXPECT_LT((compose(a, b).apply(p) - a.apply(b.apply(p))).norm(), 1e-12);
}

TEST(Rotation, CanonicalizedToNonNegativeW) {
  const Rotation r(Eigen::Quaterniond(-0.5, 0.5, 0.5, 0.5));
  EXPECT_GE(r.quat().w(), 0.0);
  EXPECT_NEAR(r.quat().norm(), 1.0, 1e-12);
}

TEST(TransformDirection, Identity) {
  const auto t = RigidTransform::identity(FrameId::head_camera, FrameId::head);
  const UnitVec3 v = transform_direction(t, UnitVec3(0, 0, 1));
  EXPECT_EQ(v, UnitVec3(0, 0, 1));
}

TEST(TransformDirection, PositiveYawTurnsZTowardX) {
  const RigidTransform t(Rotation::from_axis_angle(Vec3::UnitY(), deg_to_rad(90.0)), Vec3::Zero(),
                         FrameId::head_camera, FrameId::head);
  const UnitVec3 v = transform_direction(t, UnitVec3(0, 0, 1));
  EXPECT_NEAR(v.x(), 1.0, 1e-12);
  EXPECT_NEAR(v.y(), 0.0, 1e-12);
  EXPECT_NEAR(v.z(), 0.0, 1e-12);
}

TEST(TransformDirection, IgnoresTranslation) {
  const auto t = translate(5, 5, 5, FrameId::head_camera, FrameId::head);
  EXPECT_EQ(transform_direction(t, UnitVec3(0, 0, 1)), UnitVec3(0, 0, 1));
}

TEST(AngleBetween, AnalyticValues) {
  EXPECT_EQ(angle_between(UnitVec3(1, 0, 0), UnitVec3(1, 0, 0)), 0.0);
  EXPECT_NEAR(angle_between(UnitVec3(1, 0, 0), UnitVec3(0, 1, 0)), 90.0, 1e-9);
  EXPECT_NEAR(angle_between(UnitVec3(1, 0, 0), UnitVec3(1, 1, 0)), 45.0, 1e-9);
  EXPECT_NEAR(angle_between(UnitVec3(1, 0, 0), UnitVec3(-1, 0, 0)), 180.0, 1e-9);
}

TEST(AngleBetween, SymmetricAndRotationInvariant) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 1000; ++i) {
    const UnitVec3 u = random_unit(rng);
    const UnitVec3 v = random_unit(rng);
    const Rotation r = random_rotation(rng);
    const double a = angle_between(u, v);
    EXPECT_EQ(a, angle_between(v, u));
    EXPECT_NEAR(a, angle_between(UnitVec3(r * u.vec()), UnitVec3(r * v.vec())), 1e-7);
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 180.0);
  }
}

TEST(UnitVec3, RejectsZero) { EXPECT_THROW(UnitVec3(0, 0, 0), std::invalid_argument); }

TEST(FrameId, NamesRoundTrip) {
  for (auto f : {FrameId::scene_camera, FrameId::board, FrameId::head_camera, FrameId::head, FrameId::screen,
                 FrameId::world}) {
    EXPECT_EQ(frame_from_string(to_string(f)), f);
  }
  EXPECT_FALSE(frame_from_string("nowhere"));
}

}  // namespace
}  // namespace icugaze
