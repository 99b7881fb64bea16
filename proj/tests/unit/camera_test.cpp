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

#include <gtest/gtest.h>

#include <random>

namespace icugaze {
namespace {

const CameraIntrinsics kK{1000.0, 1000.0, 512.0, 384.0, 1024, 768};

TEST(Project, PrincipalPoint) {
  const PixelPoint p = project(kK, Vec3(0, 0, 1));
  EXPECT_DOUBLE_EQ(p.u, 512.0);
  EXPECT_DOUBLE_EQ(p.v, 384.0);
}

TEST(Project, OffAxisPoint) {
  const PixelPoint p = project(kK, Vec3(0.1, 0, 1));
  EXPECT_NEAR(p.u, 612.0, 1e-12);
  EXPECT_NEAR(p.v, 384.0, 1e-12);
}

TEST(Project, BehindCameraThrows) {
  EXPECT_THROW(project(kK, Vec3(0, 0, -1)), BehindCamera);
  EXPECT_THROW(project(kK, Vec3(0, 0, 0)), BehindCamera);
}

TEST(Project, ScaleInvariant) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> xy(-1.0, 1.0), z(0.2, 5.0), lambda(0.01, 100.0);
  for (int i = 0; i < 1000; ++i) {
    const Vec3 p(xy(rng), xy(rng), z(rng));
    const double s = lambda(rng);
    const PixelPoint a = project(kK, p);
    const PixelPoint b = project(kK, s * p);
    EXPECT_NEAR(a.u, b.u, 1e-9);
    EXPECT_NEAR(a.v, b.v, 1e-9);
  }
}

TEST(Backproject, PrincipalPointLooksDownAxis) {
  const Ray r = backproject(kK, {512.0, 384.0});
  EXPECT_EQ(r.direction, UnitVec3(0, 0, 1));
  EXPECT_EQ(r.origin, Vec3::Zero());
}

TEST(Backproject, OffAxisDirection) {
  const Ray r = backproject(kK, {612.0, 384.0});
  const Vec3 expected = Vec3(0.1, 0, 1).normalized();
  EXPECT_NEAR((r.direction.vec() - expected).norm(), 0.0, 1e-12);
}

TEST(Backproject, RoundTripOnRandomPixels) {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> u(0.0, 1024.0), v(0.0, 768.0), depth(0.1, 10.0);
  for (int i = 0; i < 10000; ++i) {
    const PixelPoint px{u(rng), v(rng)};
    const Ray r = backproject(kK, px);
    const PixelPoint back = project(kK, r.at(depth(rng)));
    ASSERT_NEAR(back.u, px.u, 1e-9);
    ASSERT_NEAR(back.v, px.v, 1e-9);
  }
}

TEST(Intrinsics, Validation) {
  EXPECT_NO_THROW(CameraIntrinsics::head_camera_default().validate());
  EXPECT_NO_THROW(CameraIntrinsics::scene_camera_default().validate());
  EXPECT_THROW((CameraIntrinsics{0, 900, 512, 384, 1024, 768}.validate()), ValidationError);
  EXPECT_THROW((CameraIntrinsics{900, 900, 1024, 384, 1024, 768}.validate()), ValidationError);
  EXPECT_THROW((CameraIntrinsics{900, 900, 512, -1, 1024, 768}.validate()), ValidationError);
}

}  // namespace
}  // namespace icugaze
