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

#include "icugaze/io/recording.hpp"

#include "icugaze/io/config.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

namespace icugaze::io {

namespace {

using nlohmann::json;

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return path.parent_path() / (path.stem().string() + ".clouds.bin");
}

std::uint32_t to_little(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big) {
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  }
  return v;
}

json intrinsics_json(const CameraIntrinsics& k) {
  return {{"fx", k.fx}, {"fy", k.fy}, {"cx", k.cx}, {"cy", k.cy}, {"width", k.width}, {"height", k.height}};
}

CameraIntrinsics intrinsics_from(const json& j) {
  CameraIntrinsics k;
  k.fx = j.at("fx").get<double>();
  k.fy = j.at("fy").get<double>();
  k.cx = j.at("cx").get<double>();
  k.cy = j.at("cy").get<double>();
  k.width = j.at("width").get<int>();
  k.height = j.at("height").get<int>();
  return k;
}

json vec_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ParseError("recording: expected a 3-vector");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json transform_json(const RigidTransform& t) {
  const auto& q = t.rotation().quat();
  return {{"parent", std::string(to_string(t.parent()))},
          {"child", std::string(to_string(t.child()))},
          {"rotation_wxyz", json::array({q.w(), q.x(), q.y(), q.z()})},
          {"translation", vec_json(t.translation())}};
}

RigidTransform transform_from(const json& j) {
  const auto parent = frame_from_string(j.at("parent").get<std::string>());
  const auto child = frame_from_string(j.at("child").get<std::string>());
  if (!parent || !child) throw ParseError("recording: unknown frame name");
  const json& q = j.at("rotation_wxyz");
  if (!q.is_array() || q.size() != 4) throw ParseError("recording: expected a quaternion");
  const Eigen::Quaterniond quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(), q[3].get<double>());
  if (std::abs(quat.norm() - 1.0) > 1e-6) throw ValidationError("recording: calibration quaternion is not unit");
  return RigidTransform(Rotation(quat), vec_from(j.at("translation")), *parent, *child);
}

json box_json(const BoundingBox& b) { return json::array({b.x, b.y, b.width, b.height}); }

BoundingBox box_from(const json& j) {
  if (!j.is_array() || j.size() != 4) throw ParseError("recording: expected a box");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>(), j[3].get<double>()};
}

json head_json(const HeadRecord& r) {
  json j = {{"type", "head"}, {"seq", r.sequence}, {"t", r.timestamp}};
  j["face"] = r.face ? json{{"box", box_json(r.face->box)}, {"confidence", r.face->confidence}} : json(nullptr);
  if (r.landmarks) {
    json pts = json::array();
    json oof = json::array();
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      pts.push_back(r.landmarks->points[i].u);
      pts.push_back(r.landmarks->points[i].v);
      if (r.landmarks->out_of_frame[i]) oof.push_back(i);
    }
    j["landmarks"] = {{"uv", std::move(pts)}, {"out_of_frame", std::move(oof)}};
  } else {
    j["landmarks"] = nullptr;
  }
  if (r.gaze) {
    j["gaze"] = {{"right", vec_json(r.gaze->eyes[kRightEye].vec())},
                 {"left", vec_json(r.gaze->eyes[kLeftEye].vec())},
                 {"valid", json::array({r.gaze->valid[kRightEye], r.gaze->valid[kLeftEye]})}};
  } else {
    j["gaze"] = nullptr;
  }
  j["blink"] = r.blink ? json::array({(*r.blink)[0], (*r.blink)[1]}) : json(nullptr);
  return j;
}

HeadRecord head_from(const json& j) {
  HeadRecord r;
  r.sequence = j.at("seq").get<std::uint64_t>();
  r.timestamp = j.at("t").get<Timestamp>();
  if (const json& f = j.at("face"); !f.is_null()) {
    r.face = FaceDetection{box_from(f.at("box")), f.at("confidence").get<double>()};
  }
  if (const json& l = j.at("landmarks"); !l.is_null()) {
    const json& uv = l.at("uv");
    if (!uv.is_array() || uv.size() != 2 * kLandmarkCount) throw ParseError("recording: landmark count");
    LandmarkSet set;
    set.timestamp = r.timestamp;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      set.points[i] = {uv[2 * i].get<double>(), uv[2 * i + 1].get<double>()};
    }
    for (const json& idx : l.at("out_of_frame")) {
      const auto i = idx.get<std::size_t>();
      if (i >= kLandmarkCount) throw ParseError("recording: landmark index out of range");
      set.out_of_frame[i] = true;
    }
    r.landmarks = set;
  }
  if (const json& g = j.at("gaze"); !g.is_null()) {
    GazeEstimate e;
    try {
      e.eyes[kRightEye] = UnitVec3(vec_from(g.at("right")));
      e.eyes[kLeftEye] = UnitVec3(vec_from(g.at("left")));
    } catch (const std::invalid_argument&) {
      throw ValidationError("recording: zero gaze vector");
    }
    const json& v = g.at("valid");
    if (!v.is_array() || v.size() != 2) throw ParseError("recording: expected two validity flags");
    e.valid = {v[0].get<bool>(), v[1].get<bool>()};
    r.gaze = e;
  }
  if (const json& b = j.at("blink"); !b.is_null()) {
    if (!b.is_array() || b.size() != 2) throw ParseError("recording: expected two blink probabilities");
    r.blink = std::array<double, 2>{b[0].get<double>(), b[1].get<double>()};
  }
  return r;
}

json scene_json(const SceneRecord& r) {
  json board = json::array();
  for (const auto& c : r.board) {
    board.push_back(json::array({c.object.x(), c.object.y(), c.object.z(), c.image.u, c.image.v}));
  }
  return {{"type", "scene"},        {"seq", r.sequence},           {"t", r.timestamp},
          {"cloud_offset", r.cloud_offset}, {"cloud_count", r.cloud_count}, {"board", std::move(board)}};
}

SceneRecord scene_from(const json& j) {
  SceneRecord r;
  r.sequence = j.at("seq").get<std::uint64_t>();
  r.timestamp = j.at("t").get<Timestamp>();
  r.cloud_offset = j.at("cloud_offset").get<std::uint64_t>();
  r.cloud_count = j.at("cloud_count").get<std::uint64_t>();
  for (const json& c : j.at("board")) {
    if (!c.is_array() || c.size() != 5) throw ParseError("recording: board corner needs x y z u v");
    r.board.push_back({Vec3(c[0].get<double>(), c[1].get<double>(), c[2].get<double>()),
                       PixelPoint{c[3].get<double>(), c[4].get<double>()}});
  }
  return r;
}

void check_increasing(std::optional<Timestamp>& last, Timestamp t, const char* stream) {
  if (last && t <= *last) {
    throw ValidationError(std::string("recording: ") + stream + " timestamps must strictly increase");
  }
  last = t;
}

}  // namespace

RecordingWriter::RecordingWriter(const std::filesystem::path& path, RecordingHeader header)
    : text_(path), clouds_(sidecar_path(path), true) {
  header.cloud_file = sidecar_path(path).filename().string();
  const json j = {{"type", "header"},
                  {"version", header.version},
                  {"head_intrinsics", intrinsics_json(header.head_k)},
                  {"scene_intrinsics", intrinsics_json(header.scene_k)},
                  {"board_to_head_camera", transform_json(header.board_to_head_camera)},
                  {"config", header.config},
                  {"cloud_file", header.cloud_file}};
  write_line(j.dump());
}

void RecordingWriter::write_line(const std::string& line) {
  if (finished_) throw ValidationError("recording: writer already finished");
  text_.stream() << line << '\n';
}

void RecordingWriter::write_head(const HeadRecord& record) {
  check_increasing(last_head_, record.timestamp, "head");
  write_line(head_json(record).dump());
  ++head_count_;
}

void RecordingWriter::write_scene(std::uint64_t sequence, Timestamp timestamp, const PointCloud& cloud,
                                  const std::vector<Correspondence>& board) {
  check_increasing(last_scene_, timestamp, "scene");
  std::vector<float> packed;
  packed.reserve(cloud.points.size() * 3);
  for (const auto& p : cloud.points) {
    packed.push_back(static_cast<float>(p.x()));
    packed.push_back(static_cast<float>(p.y()));
    packed.push_back(static_cast<float>(p.z()));
  }
  SceneRecord r{sequence, timestamp, points_written_, cloud.points.size(), board};
  if (scene_count_ > 0 && packed == last_cloud_) {
    r.cloud_offset = last_offset_;
  } else {
    std::vector<std::uint32_t> words(packed.size());
    for (std::size_t i = 0; i < packed.size(); ++i) words[i] = to_little(std::bit_cast<std::uint32_t>(packed[i]));
    clouds_.stream().write(reinterpret_cast<const char*>(words.data()),
                           static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
    last_offset_ = points_written_;
    points_written_ += cloud.points.size();
    last_cloud_ = std::move(packed);
  }
  write_line(scene_json(r).dump());
  ++scene_count_;
}

void RecordingWriter::finish() {
  write_line(json{{"type", "end"}, {"head_records", head_count_}, {"scene_records", scene_count_}}.dump());
  finished_ = true;
  clouds_.commit();
  text_.commit();
}

Recording Recording::load(const std::filesystem::path& path) {
  const std::string text = read_file(path);
  if (text.empty()) throw ValidationError("recording: empty file " + path.string());
  if (text.back() != '\n') throw ValidationError("recording: truncated (no final newline) " + path.string());

  Recording rec;
  bool have_header = false;
  bool have_end = false;
  std::optional<Timestamp> last_head, last_scene;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const std::size_t nl = text.find('\n', pos);
    const std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (trim(line).empty()) continue;
    if (have_end) throw ValidationError("recording: records after the end marker");
    try {
      const json j = json::parse(line);
      const std::string type = j.at("type").get<std::string>();
      if (!have_header) {
        if (type != "header") throw ValidationError("recording: first record must be the header");
        rec.header_.version = j.at("version").get<int>();
        if (rec.header_.version != kRecordingVersion) {
          throw ValidationError("recording: version " + std::to_string(rec.header_.version) + ", reader expects " +
                                std::to_string(kRecordingVersion));
        }
        rec.header_.head_k = intrinsics_from(j.at("head_intrinsics"));
        rec.header_.scene_k = intrinsics_from(j.at("scene_intrinsics"));
        rec.header_.board_to_head_camera = transform_from(j.at("board_to_head_camera"));
        rec.header_.config = j.at("config").get<std::string>();
        rec.header_.cloud_file = j.at("cloud_file").get<std::string>();
        have_header = true;
      } else if (type == "head") {
        rec.head_.push_back(head_from(j));
        check_increasing(last_head, rec.head_.back().timestamp, "head");
      } else if (type == "scene") {
        rec.scene_.push_back(scene_from(j));
        check_increasing(last_scene, rec.scene_.back().timestamp, "scene");
      } else if (type == "end") {
        if (j.at("head_records").get<std::size_t>() != rec.head_.size() ||
            j.at("scene_records").get<std::size_t>() != rec.scene_.size()) {
          throw ValidationError("recording: record counts disagree with the end marker");
        }
        have_end = true;
      } else {
        throw ParseError("recording: unknown record type '" + type + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError("recording line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!have_header) throw ValidationError("recording: missing header");
  if (!have_end) throw ValidationError("recording: truncated (no end marker) " + path.string());

  rec.cloud_path_ = path.parent_path() / rec.header_.cloud_file;
  std::error_code ec;
  const auto bytes = std::filesystem::file_size(rec.cloud_path_, ec);
  if (ec) throw IoError("cannot open cloud sidecar " + rec.cloud_path_.string());
  std::uint64_t needed = 0;
  for (const auto& s : rec.scene_) needed = std::max(needed, (s.cloud_offset + s.cloud_count) * 12);
  if (bytes < needed) throw ValidationError("recording: cloud sidecar is shorter than its index");
  return rec;
}

PipelineConfig Recording::config() const { return header_.config.empty() ? PipelineConfig{} : parse_config(header_.config); }

std::shared_ptr<const PointCloud> Recording::cloud(std::size_t i) const {
  const SceneRecord& r = scene_.at(i);
  std::lock_guard lock(cache_->mutex);
  if (cache_->cloud && cache_->offset == r.cloud_offset && cache_->count == r.cloud_count) {
    if (cache_->cloud->timestamp == r.timestamp) return cache_->cloud;
    auto copy = std::make_shared<PointCloud>(*cache_->cloud);
    copy->timestamp = r.timestamp;
    cache_->cloud = copy;
    return copy;
  }
  std::ifstream in(cloud_path_, std::ios::binary);
  if (!in) throw IoError("cannot open " + cloud_path_.string());
  in.seekg(static_cast<std::streamoff>(r.cloud_offset * 12));
  std::vector<std::uint32_t> words(r.cloud_count * 3);
  in.read(reinterpret_cast<char*>(words.data()), static_cast<std::streamsize>(words.size() * sizeof(std::uint32_t)));
  if (!in) throw IoError("short read from " + cloud_path_.string());
  auto cloud = std::make_shared<PointCloud>();
  cloud->timestamp = r.timestamp;
  cloud->points.resize(r.cloud_count);
  for (std::size_t k = 0; k < r.cloud_count; ++k) {
    for (int a = 0; a < 3; ++a) {
      cloud->points[k][a] = std::bit_cast<float>(to_little(words[3 * k + a]));
    }
  }
  cache_->offset = r.cloud_offset;
  cache_->count = r.cloud_count;
  cache_->cloud = cloud;
  return cloud;
}

void write_synthetic_recording(const std::shared_ptr<const SyntheticRun>& run, const PipelineConfig& cfg,
                               const std::filesystem::path& path) {
  const Scenario& s = run->scenario();
  RecordingHeader header;
  header.head_k = s.head_k;
  header.scene_k = s.scene_k;
  header.board_to_head_camera = run->board_to_head_camera();
  header.config = format_config(cfg);
  RecordingWriter writer(path, header);

  const PluginSet oracle = oracle_plugins(run);
  const auto& heads = run->head_frames();
  const auto& scenes = run->scene_frames();
  std::size_t h = 0, c = 0;
  while (h < heads.size() || c < scenes.size()) {
    if (c < scenes.size() && (h >= heads.size() || scenes[c].timestamp <= heads[h].timestamp)) {
      writer.write_scene(scenes[c].sequence, scenes[c].timestamp, run->cloud(c), scenes[c].board);
      ++c;
      continue;
    }
    const HeadFrame& frame = heads[h++];
    HeadRecord r{frame.sequence, frame.timestamp, oracle.face_detector->detect(frame), {}, {}, {}};
    if (r.face) {
      r.landmarks = oracle.landmark_estimator->estimate(frame, *r.face);
      const EyePatches patches = eye_patches(*r.landmarks);
      r.gaze = oracle.gaze_regressor->regress(frame, patches,
                                              RigidTransform::identity(FrameId::head_camera, FrameId::head));
      r.blink = oracle.blink_estimator->estimate(frame, patches);
    }
    writer.write_head(r);
  }
  writer.finish();
}

namespace {

class ReplayBase {
 public:
  explicit ReplayBase(std::shared_ptr<const Recording> rec) : rec_(std::move(rec)) {}

 protected:
  const HeadRecord& record(const HeadFrame& frame) const {
    if (frame.image_handle >= rec_->head().size()) throw PluginError("replay: image handle out of range");
    const HeadRecord& r = rec_->head()[frame.image_handle];
    if (r.sequence != frame.sequence) throw PluginError("replay: frame sequence does not match the record");
    return r;
  }

  std::shared_ptr<const Recording> rec_;
};

class ReplayFaceDetector : public FaceDetector, ReplayBase {
 public:
  using ReplayBase::ReplayBase;
  std::optional<FaceDetection> detect(const HeadFrame& frame) override { return record(frame).face; }
};

class ReplayLandmarkEstimator : public LandmarkEstimator, ReplayBase {
 public:
  using ReplayBase::ReplayBase;
  LandmarkSet estimate(const HeadFrame& frame, const FaceDetection&) override {
    const auto& r = record(frame);
    if (!r.landmarks) throw PluginError("replay: no landmarks recorded for frame " + std::to_string(frame.sequence));
    return *r.landmarks;
  }
};

class ReplayGazeRegressor : public GazeRegressor, ReplayBase {
 public:
  using ReplayBase::ReplayBase;
  GazeEstimate regress(const HeadFrame& frame, const EyePatches&, const RigidTransform&) override {
    const auto& r = record(frame);
    if (!r.gaze) throw PluginError("replay: no gaze recorded for frame " + std::to_string(frame.sequence));
    return *r.gaze;
  }
};

class ReplayBlinkEstimator : public BlinkEstimator, ReplayBase {
 public:
  using ReplayBase::ReplayBase;
  std::array<double, 2> estimate(const HeadFrame& frame, const EyePatches&) override {
    const auto& r = record(frame);
    if (!r.blink) throw PluginError("replay: no blink recorded for frame " + std::to_string(frame.sequence));
    return *r.blink;
  }
};

std::shared_ptr<const Recording> recording_from(const PluginContext& context) {
  if (context.source_kind != "recording" || !context.source) {
    throw PluginError("replay plugins need a recording, got '" + context.source_kind + "'");
  }
  return std::static_pointer_cast<const Recording>(context.source);
}

}  // namespace

PluginSet replay_plugins(std::shared_ptr<const Recording> recording) {
  if (!recording) throw PluginError("replay: null recording");
  PluginSet set;
  set.face_detector = std::make_shared<ReplayFaceDetector>(recording);
  set.landmark_estimator = std::make_shared<ReplayLandmarkEstimator>(recording);
  set.gaze_regressor = std::make_shared<ReplayGazeRegressor>(recording);
  set.blink_estimator = std::make_shared<ReplayBlinkEstimator>(recording);
  return set;
}

void register_replay_plugins(PluginRegistry& registry) {
  registry.add_face_detector("replay", [](const PluginContext& c) -> std::shared_ptr<FaceDetector> {
    return std::make_shared<ReplayFaceDetector>(recording_from(c));
  });
  registry.add_landmark_estimator("replay", [](const PluginContext& c) -> std::shared_ptr<LandmarkEstimator> {
    return std::make_shared<ReplayLandmarkEstimator>(recording_from(c));
  });
  registry.add_gaze_regressor("replay", [](const PluginContext& c) -> std::shared_ptr<GazeRegressor> {
    return std::make_shared<ReplayGazeRegressor>(recording_from(c));
  });
  registry.add_blink_estimator("replay", [](const PluginContext& c) -> std::shared_ptr<BlinkEstimator> {
    return std::make_shared<ReplayBlinkEstimator>(recording_from(c));
  });
}

std::optional<HeadFrame> RecordingHeadSource::next() {
  if (next_ >= rec_->head().size()) return std::nullopt;
  const HeadRecord& r = rec_->head()[next_];
  return HeadFrame{r.sequence, r.timestamp, next_++};
}

std::optional<SceneFrame> RecordingSceneSource::next() {
  if (next_ >= rec_->scene().size()) return std::nullopt;
  const std::size_t i = next_++;
  const SceneRecord& r = rec_->scene()[i];
  return SceneFrame{r.sequence, r.timestamp, rec_->cloud(i), r.board};
}

}  // namespace icugaze::io
