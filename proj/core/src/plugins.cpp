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

#include "icugaze/plugins.hpp"

#include <algorithm>

namespace icugaze {

EyePatches eye_patches(const LandmarkSet& landmarks, double margin) {
  EyePatches patches;
  const std::array<std::size_t, 2> begin = {landmark::kRightEyeBegin, landmark::kLeftEyeBegin};
  for (std::size_t eye = 0; eye < 2; ++eye) {
    double u0 = landmarks.points[begin[eye]].u, u1 = u0;
    double v0 = landmarks.points[begin[eye]].v, v1 = v0;
    for (std::size_t i = begin[eye]; i < begin[eye] + landmark::kEyePointCount; ++i) {
      u0 = std::min(u0, landmarks.points[i].u);
      u1 = std::max(u1, landmarks.points[i].u);
      v0 = std::min(v0, landmarks.points[i].v);
      v1 = std::max(v1, landmarks.points[i].v);
    }
    const double w = (u1 - u0) * (1.0 + 2.0 * margin);
    // Eye crops keep a 5:3 aspect regardless of lid aperture.
    const double h = std::max(v1 - v0, 0.6 * w);
    const double cu = 0.5 * (u0 + u1), cv = 0.5 * (v0 + v1);
    patches.boxes[eye] = {cu - 0.5 * w, cv - 0.5 * h, w, h};
  }
  return patches;
}

BlinkEstimate BlinkEstimate::from_probabilities(std::array<double, 2> p, double threshold) {
  BlinkEstimate b;
  b.probability = p;
  b.is_blink = std::max(p[0], p[1]) >= threshold;
  return b;
}

PluginSet PluginRegistry::create(const Names& names, const PluginContext& context) const {
  const auto find = [](const auto& table, const std::string& name, const char* kind) {
    const auto it = table.find(name);
    if (it == table.end()) throw PluginError(std::string("unknown ") + kind + " plugin '" + name + "'");
    return it->second;
  };
  PluginSet set;
  set.face_detector = find(face_, names.face_detector, "face detector")(context);
  set.landmark_estimator = find(landmark_, names.landmark_estimator, "landmark estimator")(context);
  set.gaze_regressor = find(gaze_, names.gaze_regressor, "gaze regressor")(context);
  set.blink_estimator = find(blink_, names.blink_estimator, "blink estimator")(context);
  if (!set.complete()) throw PluginError("plugin factory returned null");
  return set;
}

}  // namespace icugaze
