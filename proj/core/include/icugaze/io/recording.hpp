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

// Recording format: one JSON object per line (header, head and scene
// records in time order, end marker) plus a binary sidecar holding the
// point clouds as little-endian float32 xyz triples. Scene records index
// the sidecar by point offset and count; consecutive identical clouds share
// one stored copy.

#include "icugaze/io/files.hpp"
#include "icugaze/pipeline.hpp"
#include "icugaze/synthetic.hpp"

#include <array>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace icugaze::io {

constexpr int kRecordingVersion = 1;

struct RecordingHeader {
  int version = kRecordingVersion;
  CameraIntrinsics head_k;
  CameraIntrinsics scene_k;
  RigidTransform board_to_head_camera = RigidTransform::identity(FrameId::board, FrameId::head_camera);
  std::string config;      // pipeline config text
  std::string cloud_file;  // sidecar name, relative to the recording
};

// Captured plugin outputs for one head frame. Stages the detector never
// reached are absent.
struct HeadRecord {
  std::uint64_t sequence = 0;
  Timestamp timestamp = 0;
  std::optional<FaceDetection> face;
  std::optional<LandmarkSet> landmarks;
  std::optional<GazeEstimate> gaze;
  std::optional<std::array<double, 2>> blink;
};

struct SceneRecord {
  std::uint64_t sequence = 0;
  Timestamp timestamp = 0;
  std::uint64_t cloud_offset = 0;  // points
  std::uint64_t cloud_count = 0;
  std::vector<Correspondence> board;
};

class RecordingWriter {
 public:
  // The sidecar is written next to `path` as <stem>.clouds.bin; the header's
  // cloud_file is filled in. Nothing is visible until finish().
  RecordingWriter(const std::filesystem::path& path, RecordingHeader header);

  // Throws ValidationError when timestamps do not strictly increase.
  void write_head(const HeadRecord& record);
  void write_scene(std::uint64_t sequence, Timestamp timestamp, const PointCloud& cloud,
                   const std::vector<Correspondence>& board);
  void finish();

 private:
  void write_line(const std::string& line);

  AtomicFile text_;
  AtomicFile clouds_;
  std::optional<Timestamp> last_head_;
  std::optional<Timestamp> last_scene_;
  std::size_t head_count_ = 0;
  std::size_t scene_count_ = 0;
  std::uint64_t points_written_ = 0;
  std::vector<float> last_cloud_;
  std::uint64_t last_offset_ = 0;
  bool finished_ = false;
};

class Recording {
 public:
  // Throws ParseError for malformed records and ValidationError for a
  // version mismatch, a missing end record, out-of-order timestamps or a
  // short sidecar.
  static Recording load(const std::filesystem::path& path);

  const RecordingHeader& header() const { return header_; }
  const std::vector<HeadRecord>& head() const { return head_; }
  const std::vector<SceneRecord>& scene() const { return scene_; }

  // Parsed header config.
  PipelineConfig config() const;

  // Cloud for scene record i, read from the sidecar. Repeated requests for
  // the same stored cloud return the same object.
  std::shared_ptr<const PointCloud> cloud(std::size_t i) const;

 private:
  RecordingHeader header_;
  std::vector<HeadRecord> head_;
  std::vector<SceneRecord> scene_;
  std::filesystem::path cloud_path_;

  struct Cache {
    std::mutex mutex;
    std::uint64_t offset = 0;
    std::uint64_t count = 0;
    std::shared_ptr<const PointCloud> cloud;
  };
  std::shared_ptr<Cache> cache_ = std::make_shared<Cache>();
};

// Runs the oracle plugins over every head frame and writes their outputs,
// the scene clouds and board corners.
void write_synthetic_recording(const std::shared_ptr<const SyntheticRun>& run, const PipelineConfig& cfg,
                               const std::filesystem::path& path);

// Plugins answering from recorded outputs. HeadFrame::image_handle is the
// head record index.
PluginSet replay_plugins(std::shared_ptr<const Recording> recording);

// Registers the "replay" factories; the context payload must be a Recording
// with source_kind "recording".
void register_replay_plugins(PluginRegistry& registry);

class RecordingHeadSource : public HeadFrameSource {
 public:
  explicit RecordingHeadSource(std::shared_ptr<const Recording> rec) : rec_(std::move(rec)) {}
  std::optional<HeadFrame> next() override;

 private:
  std::shared_ptr<const Recording> rec_;
  std::size_t next_ = 0;
};

class RecordingSceneSource : public SceneFrameSource {
 public:
  explicit RecordingSceneSource(std::shared_ptr<const Recording> rec) : rec_(std::move(rec)) {}
  std::optional<SceneFrame> next() override;

 private:
  std::shared_ptr<const Recording> rec_;
  std::size_t next_ = 0;
};

}  // namespace icugaze::io
