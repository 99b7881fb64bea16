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

#include "icugaze/head_model.hpp"
#include "icugaze/pnp.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace icugaze {
namespace {

LandmarkSet observe(const HeadModel& m, const RigidTransform& pose, const CameraIntrinsics& k, double outliers,
                    std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, k.width), v(0.0, k.height), pick(0.0, 1.0);
  LandmarkSet obs;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    obs.points[i] = project(k, pose.apply(m.points[i]));
    obs.points[i].u += noise(rng);
    obs.points[i].v += noise(rng);
    if (pick(rng) < outliers) obs.points[i] = {u(rng), v(rng)};
  }
  obs.flag_out_of_frame(k);
  return obs;
}

RigidTransform facing_pose() {
  const Rotation r = Rotation::from_ypr(0.2, 0.1, 0.05) * Rotation::from_axis_angle(Vec3::UnitY(), std::numbers::pi);
  return {r, Vec3(0.1, -0.05, 2.0), FrameId::head_camera, FrameId::head};
}

void BM_Ransac(benchmark::State& state) {
  const auto k = CameraIntrinsics::head_camera_default();
  const HeadModel m = build_head_model(kDefaultIpd);
  const LandmarkSet obs = observe(m, facing_pose(), k, static_cast<double>(state.range(0)) / 100.0, 4);
  RansacParams p;
  p.seed = 9;
  for (auto _ : state) benchmark::DoNotOptimize(solve_pnp_ransac(m.points, obs, k, p));
}
BENCHMARK(BM_Ransac)->Arg(0)->Arg(20)->Unit(benchmark::kMicrosecond);

void BM_BoardPose(benchmark::State& state) {
  const auto k = CameraIntrinsics::scene_camera_default();
  const RigidTransform pose(Rotation::from_ypr(0.1, 0.2, 0.0), Vec3(-0.5, 0.4, 2.4), FrameId::scene_camera,
                            FrameId::board);
  std::vector<Correspondence> corr;
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) {
      const Vec3 obj(0.05 * c, 0.05 * r, 0.0);
      corr.push_back({obj, project(k, pose.apply(obj))});
    }
  }
  for (auto _ : state) benchmark::DoNotOptimize(estimate_board_pose(corr, k));
}
BENCHMARK(BM_BoardPose)->Unit(benchmark::kMicrosecond);

}  // namespace
}  // namespace icugaze
