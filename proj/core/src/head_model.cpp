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

#include "icugaze/errors.hpp"

#include <algorithm>
#include <sstream>
#include <string>

namespace icugaze {

// Generated from core/data/head_model_v1.txt at configure time.
extern const char* const kCanonicalHeadModelText;

Vec3 HeadModel::right_pupil() const {
  return 0.5 * (points[landmark::kRightEyeOuter] + points[landmark::kRightEyeInner]);
}

Vec3 HeadModel::left_pupil() const {
  return 0.5 * (points[landmark::kLeftEyeOuter] + points[landmark::kLeftEyeInner]);
}

HeadModel parse_head_model(std::string_view text) {
  HeadModel model;
  std::array<bool, kLandmarkCount> seen{};
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream row(line);
    long index = -1;
    double x = 0.0, y = 0.0, z = 0.0;
    std::string extra;
    if (!(row >> index >> x >> y >> z) || (row >> extra)) {
      throw ParseError("head model line " + std::to_string(line_no) + ": expected 'index x y z'");
    }
    if (index < 0 || index >= static_cast<long>(kLandmarkCount) || seen[index]) {
      throw ParseError("head model line " + std::to_string(line_no) + ": bad or duplicate index");
    }
    seen[index] = true;
    model.points[index] = Vec3(x, y, z);
  }
  if (!std::all_of(seen.begin(), seen.end(), [](bool b) { return b; })) {
    throw ParseError("head model: expected 68 rows");
  }
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : model.points) centroid += p;
  centroid /= static_cast<double>(kLandmarkCount);
  for (auto& p : model.points) p -= centroid;
  model.ipd = (model.right_pupil() - model.left_pupil()).norm();
  return model;
}

const HeadModel& canonical_head_model() {
  static const HeadModel model = parse_head_model(kCanonicalHeadModelText);
  return model;
}

HeadModel build_head_model(double ipd) {
  if (!(ipd >= kMinIpd && ipd <= kMaxIpd)) {
    throw OutOfRange("build_head_model: ipd " + std::to_string(ipd) + " m outside [0.04, 0.08]");
  }
  const HeadModel& canonical = canonical_head_model();
  const double scale = ipd / canonical.ipd;
  HeadModel model;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) model.points[i] = scale * canonical.points[i];
  model.ipd = ipd;
  return model;
}

void LandmarkSet::flag_out_of_frame(const CameraIntrinsics& k) {
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    out_of_frame[i] = out_of_frame[i] || !k.contains(points[i].u, points[i].v);
  }
}

std::size_t LandmarkSet::in_frame_count() const {
  return static_cast<std::size_t>(std::count(out_of_frame.begin(), out_of_frame.end(), false));
}

}  // namespace icugaze
