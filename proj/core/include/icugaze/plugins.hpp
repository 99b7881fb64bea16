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

// Contracts for the four learned stages of the head-camera branch. The core
// never interprets pixels: a HeadFrame carries an opaque image handle and each
// plugin returns the domain types below.

#include "icugaze/camera.hpp"
#include "icugaze/errors.hpp"
#include "icugaze/geometry.hpp"
#include "icugaze/head_model.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace icugaze {

struct HeadFrame {
  std::uint64_t sequence = 0;
  Timestamp timestamp = 0;
  std::uint64_t image_handle = 0;
};

struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double width = 0.0;
  double height = 0.0;
};

struct FaceDetection {
  BoundingBox box;
  double confidence = 0.0;
};

enum Eye : std::size_t { kRightEye = 0, kLeftEye = 1 };

// Eye regions derived from the eye-corner landmarks (index by Eye).
struct EyePatches {
  std::array<BoundingBox, 2> boxes{};
};

EyePatches eye_patches(const LandmarkSet& landmarks, double margin = 0.4);

// Per-eye gaze in the head frame.
struct GazeEstimate {
  std::array<UnitVec3, 2> eyes{};
  std::array<bool, 2> valid{};
};

struct BlinkEstimate {
  std::array<double, 2> probability{};
  bool is_blink = false;

  // is_blink = max probability >= threshold.
  static BlinkEstimate from_probabilities(std::array<double, 2> p, double threshold);
};

// Plugin I/O failures; the only errors process_head_frame propagates.
class PluginError : public RuntimeError {
 public:
  using RuntimeError::RuntimeError;
};

class FaceDetector {
 public:
  virtual ~FaceDetector() = default;
  // nullopt when no face candidate exists in the frame.
  virtual std::optional<FaceDetection> detect(const HeadFrame& frame) = 0;
};

class LandmarkEstimator {
 public:
  virtual ~LandmarkEstimator() = default;
  virtual LandmarkSet estimate(const HeadFrame& frame, const FaceDetection& face) = 0;
};

class GazeRegressor {
 public:
  virtual ~GazeRegressor() = default;
  virtual GazeEstimate regress(const HeadFrame& frame, const EyePatches& patches,
                               const RigidTransform& head_pose) = 0;
};

class BlinkEstimator {
 public:
  virtual ~BlinkEstimator() = default;
  // Per-eye blink probability in [0, 1].
  virtual std::array<double, 2> estimate(const HeadFrame& frame, const EyePatches& patches) = 0;
};

struct PluginSet {
  std::shared_ptr<FaceDetector> face_detector;
  std::shared_ptr<LandmarkEstimator> landmark_estimator;
  std::shared_ptr<GazeRegressor> gaze_regressor;
  std::shared_ptr<BlinkEstimator> blink_estimator;

  bool complete() const { return face_detector && landmark_estimator && gaze_regressor && blink_estimator; }
};

// Everything a plugin factory may draw on. Fields are optional; a factory
// throws PluginError when what it needs is absent.
struct PluginContext {
  std::shared_ptr<const void> source;  // backend-specific payload
  std::string source_kind;             // names the payload type, e.g. "recording"
};

// Name -> factory tables for the four plugin kinds.
class PluginRegistry {
 public:
  template <typename T>
  using Factory = std::function<std::shared_ptr<T>(const PluginContext&)>;

  void add_face_detector(const std::string& name, Factory<FaceDetector> f) { face_[name] = std::move(f); }
  void add_landmark_estimator(const std::string& name, Factory<LandmarkEstimator> f) { landmark_[name] = std::move(f); }
  void add_gaze_regressor(const std::string& name, Factory<GazeRegressor> f) { gaze_[name] = std::move(f); }
  void add_blink_estimator(const std::string& name, Factory<BlinkEstimator> f) { blink_[name] = std::move(f); }

  struct Names {
    std::string face_detector;
    std::string landmark_estimator;
    std::string gaze_regressor;
    std::string blink_estimator;
  };

  // Throws PluginError for an unknown name.
  PluginSet create(const Names& names, const PluginContext& context) const;

 private:
  std::map<std::string, Factory<FaceDetector>> face_;
  std::map<std::string, Factory<LandmarkEstimator>> landmark_;
  std::map<std::string, Factory<GazeRegressor>> gaze_;
  std::map<std::string, Factory<BlinkEstimator>> blink_;
};

}  // namespace icugaze
