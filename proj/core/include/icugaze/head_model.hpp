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

#include "icugaze/camera.hpp"
#include "icugaze/geometry.hpp"

#include <array>
#include <string>
#include <string_view>

namespace icugaze {

constexpr std::size_t kLandmarkCount = 68;

// iBUG-300W landmark indices used by the engine. "Right" is the subject's
// right, which appears on the image left in a frontal view.
namespace landmark {
constexpr std::size_t kRightEyeOuter = 36;
constexpr std::size_t kRightEyeInner = 39;
constexpr std::size_t kLeftEyeInner = 42;
constexpr std::size_t kLeftEyeOuter = 45;
constexpr std::size_t kRightEyeBegin = 36;
constexpr std::size_t kLeftEyeBegin = 42;
constexpr std::size_t kEyePointCount = 6;
}  // namespace landmark

constexpr double kDefaultIpd = 0.06;
constexpr double kMinIpd = 0.04;
constexpr double kMaxIpd = 0.08;

// Generic 68-point head in the head frame (+x subject's right, +y down,
// +z out of the face), centroid at the origin. The pupil anchors are the
// midpoints of the eye-corner pairs.
struct HeadModel {
  std::array<Vec3, kLandmarkCount> points;
  double ipd = kDefaultIpd;

  Vec3 right_pupil() const;
  Vec3 left_pupil() const;
};

// Parses the versioned text table ("index x y z" rows, '#' comments).
// Throws ParseError on malformed input or when indices are not 0..67.
HeadModel parse_head_model(std::string_view text);

// The model shipped in core/data/head_model_v1.txt.
const HeadModel& canonical_head_model();

// Canonical model scaled uniformly so that the pupil anchors are `ipd`
// apart. Throws OutOfRange outside [0.04, 0.08] m.
HeadModel build_head_model(double ipd);

struct LandmarkSet {
  std::array<PixelPoint, kLandmarkCount> points{};
  std::array<bool, kLandmarkCount> out_of_frame{};
  Timestamp timestamp = 0;

  // Flags every landmark that falls outside the image.
  void flag_out_of_frame(const CameraIntrinsics& k);
  std::size_t in_frame_count() const;
};

}  // namespace icugaze
