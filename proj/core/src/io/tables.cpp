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

#include "icugaze/io/tables.hpp"

#include "icugaze/io/files.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace icugaze::io {

namespace {

using nlohmann::json;

template <typename E, std::size_t N>
E enum_from_string(std::string_view s, std::string_view what) {
  for (std::size_t i = 0; i < N; ++i) {
    if (to_string(static_cast<E>(i)) == s) return static_cast<E>(i);
  }
  throw ParseError(std::string(what) + ": unknown value '" + std::string(s) + "'");
}

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t p = line.find(sep, start);
    out.push_back(line.substr(start, p == std::string_view::npos ? std::string_view::npos : p - start));
    if (p == std::string_view::npos) break;
    start = p + 1;
  }
  return out;
}

std::vector<std::string_view> lines_of(std::string_view text) {
  std::vector<std::string_view> out;
  for (auto line : split(text, '\n')) {
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (!trim(line).empty()) out.push_back(line);
  }
  return out;
}

// Minimal CSV table: a fixed header and comma-separated rows.
class CsvReader {
 public:
  CsvReader(std::string_view text, const std::vector<std::string>& columns, std::string_view what)
      : what_(what), lines_(lines_of(text)) {
    if (lines_.empty()) throw ParseError(what_ + ": missing header");
    const auto header = split(lines_[0], ',');
    if (header.size() != columns.size() || !std::equal(header.begin(), header.end(), columns.begin(),
                                                       [](std::string_view a, const std::string& b) { return trim(a) == b; })) {
      throw ParseError(what_ + ": unexpected header '" + std::string(lines_[0]) + "'");
    }
    width_ = columns.size();
  }

  std::size_t rows() const { return lines_.size() - 1; }

  std::vector<std::string_view> row(std::size_t i) const {
    auto cells = split(lines_[i + 1], ',');
    if (cells.size() != width_) {
      throw ParseError(what_ + " line " + std::to_string(i + 2) + ": expected " + std::to_string(width_) + " fields");
    }
    for (auto& c : cells) c = trim(c);
    return cells;
  }

  const std::string& what() const { return what_; }

 private:
  std::string what_;
  std::vector<std::string_view> lines_;
  std::size_t width_ = 0;
};

std::string join(const std::vector<std::string>& cells, char sep = ',') {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += sep;
    out += cells[i];
  }
  return out;
}

std::string fmt(double v) { return format_double(v); }

template <typename T>
std::string opt_fmt(const std::optional<T>& v) {
  if (!v) return {};
  if constexpr (std::is_floating_point_v<T>) return format_double(*v);
  else return std::to_string(*v);
}

// ---------------------------------------------------------------- samples

enum Col : std::size_t {
  kKind, kSeq, kT, kReason, kFaceConf,
  kQw, kQx, kQy, kQz, kTx, kTy, kTz,
  kGx, kGy, kGz,
  kBlinkR, kBlinkL, kIsBlink,
  kInliers, kReproj, kResolution, kSceneT,
  kRox, kRoy, kRoz, kRdx, kRdy, kRdz,
  kHx, kHy, kHz, kHitIndex, kHitDist,
  kColCount
};

const std::vector<std::string>& sample_columns() {
  static const std::vector<std::string> cols = {
      "kind", "seq", "t_ns", "reason", "face_confidence",
      "pose_qw", "pose_qx", "pose_qy", "pose_qz", "pose_tx", "pose_ty", "pose_tz",
      "gaze_x", "gaze_y", "gaze_z",
      "blink_right", "blink_left", "is_blink",
      "pnp_inliers", "reprojection_px", "resolution", "scene_t_ns",
      "ray_ox", "ray_oy", "ray_oz", "ray_dx", "ray_dy", "ray_dz",
      "hit_x", "hit_y", "hit_z", "hit_index", "hit_distance"};
  return cols;
}

bool is_text_column(std::size_t c) { return c == kKind || c == kReason || c == kResolution; }

void put_blink(std::vector<std::string>& row, const BlinkEstimate& b) {
  row[kBlinkR] = fmt(b.probability[kRightEye]);
  row[kBlinkL] = fmt(b.probability[kLeftEye]);
  row[kIsBlink] = b.is_blink ? "1" : "0";
}

std::vector<std::string> sample_row(const FrameResult& r) {
  std::vector<std::string> row(kColCount);
  if (const auto* rej = std::get_if<Rejection>(&r)) {
    row[kKind] = "rejection";
    row[kSeq] = std::to_string(rej->sequence);
    row[kT] = std::to_string(rej->timestamp);
    row[kReason] = std::string(to_string(rej->reason));
    row[kFaceConf] = fmt(rej->face_confidence);
    if (rej->blink) put_blink(row, *rej->blink);
    return row;
  }
  const auto& s = std::get<GazeSample>(r);
  row[kKind] = "sample";
  row[kSeq] = std::to_string(s.sequence);
  row[kT] = std::to_string(s.timestamp);
  row[kFaceConf] = fmt(s.face_confidence);
  const auto& q = s.head_pose.rotation().quat();
  row[kQw] = fmt(q.w());
  row[kQx] = fmt(q.x());
  row[kQy] = fmt(q.y());
  row[kQz] = fmt(q.z());
  row[kTx] = fmt(s.head_pose.translation().x());
  row[kTy] = fmt(s.head_pose.translation().y());
  row[kTz] = fmt(s.head_pose.translation().z());
  row[kGx] = fmt(s.gaze.x());
  row[kGy] = fmt(s.gaze.y());
  row[kGz] = fmt(s.gaze.z());
  put_blink(row, s.blink);
  row[kInliers] = std::to_string(s.pnp_inliers);
  row[kReproj] = fmt(s.reprojection_error_px);
  row[kResolution] = std::string(to_string(s.resolution));
  row[kSceneT] = opt_fmt(s.scene_timestamp);
  if (s.gaze_ray) {
    row[kRox] = fmt(s.gaze_ray->origin.x());
    row[kRoy] = fmt(s.gaze_ray->origin.y());
    row[kRoz] = fmt(s.gaze_ray->origin.z());
    row[kRdx] = fmt(s.gaze_ray->direction.x());
    row[kRdy] = fmt(s.gaze_ray->direction.y());
    row[kRdz] = fmt(s.gaze_ray->direction.z());
  }
  if (s.scene_hit) {
    row[kHx] = fmt(s.scene_hit->point.x());
    row[kHy] = fmt(s.scene_hit->point.y());
    row[kHz] = fmt(s.scene_hit->point.z());
    row[kHitIndex] = std::to_string(s.scene_hit->index);
    row[kHitDist] = fmt(s.scene_hit->distance_along_ray);
  }
  return row;
}

struct RowReader {
  const std::vector<std::string_view>& cells;
  std::string where;

  std::string_view text(std::size_t c) const { return cells[c]; }
  bool has(std::size_t c) const { return !cells[c].empty(); }
  double num(std::size_t c) const { return parse_double(cells[c], where + " " + sample_columns()[c]); }
  long long integer(std::size_t c) const { return parse_int(cells[c], where + " " + sample_columns()[c]); }
  unsigned long long uinteger(std::size_t c) const { return parse_uint(cells[c], where + " " + sample_columns()[c]); }
  Vec3 vec(std::size_t c) const { return {num(c), num(c + 1), num(c + 2)}; }
  UnitVec3 unit(std::size_t c) const {
    try {
      return UnitVec3(vec(c));
    } catch (const std::invalid_argument&) {
      throw ValidationError(where + ": zero direction");
    }
  }
  std::optional<BlinkEstimate> blink() const {
    if (!has(kBlinkR)) return std::nullopt;
    BlinkEstimate b;
    b.probability = {num(kBlinkR), num(kBlinkL)};
    b.is_blink = uinteger(kIsBlink) != 0;
    return b;
  }
};

FrameResult row_to_result(const RowReader& in) {
  const std::string_view kind = in.text(kKind);
  if (kind == "rejection") {
    Rejection r;
    r.sequence = in.uinteger(kSeq);
    r.timestamp = in.integer(kT);
    r.reason = enum_from_string<RejectionReason, kRejectionReasonCount>(in.text(kReason), in.where);
    r.face_confidence = in.num(kFaceConf);
    r.blink = in.blink();
    return r;
  }
  if (kind != "sample") throw ParseError(in.where + ": unknown row kind '" + std::string(kind) + "'");
  GazeSample s;
  s.sequence = in.uinteger(kSeq);
  s.timestamp = in.integer(kT);
  s.face_confidence = in.num(kFaceConf);
  const Eigen::Quaterniond q(in.num(kQw), in.num(kQx), in.num(kQy), in.num(kQz));
  if (std::abs(q.norm() - 1.0) > 1e-6) throw ValidationError(in.where + ": head pose quaternion is not unit");
  s.head_pose = RigidTransform(Rotation(q), in.vec(kTx), FrameId::head_camera, FrameId::head);
  s.gaze = in.unit(kGx);
  if (auto b = in.blink()) s.blink = *b;
  s.pnp_inliers = in.uinteger(kInliers);
  s.reprojection_error_px = in.num(kReproj);
  s.resolution = enum_from_string<Resolution, 5>(in.text(kResolution), in.where);
  if (in.has(kSceneT)) s.scene_timestamp = in.integer(kSceneT);
  if (in.has(kRox)) s.gaze_ray = Ray{in.vec(kRox), in.unit(kRdx), FrameId::scene_camera};
  if (in.has(kHx)) s.scene_hit = RayHit{in.vec(kHx), in.uinteger(kHitIndex), in.num(kHitDist)};
  return s;
}

std::string json_line(const std::vector<std::string>& row) {
  std::string out = "{";
  for (std::size_t c = 0; c < row.size(); ++c) {
    if (c) out += ',';
    out += '"' + sample_columns()[c] + "\":";
    if (row[c].empty()) out += "null";
    else if (is_text_column(c)) out += '"' + row[c] + '"';
    else out += row[c];
  }
  return out + "}";
}

std::string json_cell(const json& v) {
  if (v.is_null()) return {};
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_unsigned()) return std::to_string(v.get<std::uint64_t>());
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  if (v.is_number_float()) return format_double(v.get<double>());
  throw ParseError("sample log: unexpected JSON value " + v.dump());
}

// ---------------------------------------------------------------- shared JSON

json definition_json(const TrialDefinition& d) {
  return {{"marker", d.marker},
          {"visit", d.visit},
          {"centre", json::array({d.centre.x(), d.centre.y(), d.centre.z()})},
          {"screen_px", json::array({d.screen_px.u, d.screen_px.v})},
          {"size_m", d.size_m},
          {"size_px", d.size_px},
          {"start_ns", d.start},
          {"end_ns", d.end}};
}

TrialDefinition definition_from(const json& j) {
  TrialDefinition d;
  d.marker = j.at("marker").get<int>();
  d.visit = j.at("visit").get<int>();
  const json& c = j.at("centre");
  d.centre = {c.at(0).get<double>(), c.at(1).get<double>(), c.at(2).get<double>()};
  const json& px = j.at("screen_px");
  d.screen_px = {px.at(0).get<double>(), px.at(1).get<double>()};
  d.size_m = j.at("size_m").get<double>();
  d.size_px = j.at("size_px").get<double>();
  d.start = j.at("start_ns").get<Timestamp>();
  d.end = j.at("end_ns").get<Timestamp>();
  return d;
}

json metrics_json(const TrialMetrics& m) {
  return {{"marker", m.marker}, {"visit", m.visit}, {"accuracy_deg", m.accuracy},
          {"precision_deg", m.precision}, {"n_used", m.n_used}};
}

TrialMetrics metrics_from(const json& j) {
  return {j.at("marker").get<int>(), j.at("visit").get<int>(), j.at("accuracy_deg").get<double>(),
          j.at("precision_deg").get<double>(), j.at("n_used").get<std::size_t>()};
}

json evaluation_json(const Evaluation& e) {
  json trials = json::array();
  for (std::size_t i = 0; i < e.trials.size(); ++i) {
    json t = metrics_json(e.trials[i]);
    t["definition"] = definition_json(e.definitions.at(i));
    trials.push_back(std::move(t));
  }
  const PooledMetrics& p = e.pooled;
  return {{"pooled",
           {{"accuracy_deg", p.accuracy},
            {"precision_deg", p.precision},
            {"accuracy_by_marker_deg", p.accuracy_by_marker},
            {"precision_by_marker_deg", p.precision_by_marker},
            {"trials", p.trials},
            {"samples", p.samples}}},
          {"skipped_trials", e.skipped_trials},
          {"trials", std::move(trials)}};
}

Evaluation evaluation_from(const json& j) {
  Evaluation e;
  const json& p = j.at("pooled");
  e.pooled.accuracy = p.at("accuracy_deg").get<double>();
  e.pooled.precision = p.at("precision_deg").get<double>();
  e.pooled.accuracy_by_marker = p.at("accuracy_by_marker_deg").get<double>();
  e.pooled.precision_by_marker = p.at("precision_by_marker_deg").get<double>();
  e.pooled.trials = p.at("trials").get<std::size_t>();
  e.pooled.samples = p.at("samples").get<std::size_t>();
  e.skipped_trials = j.at("skipped_trials").get<std::size_t>();
  for (const json& t : j.at("trials")) {
    e.trials.push_back(metrics_from(t));
    e.definitions.push_back(definition_from(t.at("definition")));
  }
  return e;
}

template <typename F>
auto parse_json(std::string_view text, std::string_view what, F&& f) {
  try {
    return f(json::parse(text));
  } catch (const json::exception& e) {
    throw ParseError(std::string(what) + ": " + e.what());
  }
}

}  // namespace

std::string_view to_string(LogFormat f) { return f == LogFormat::csv ? "csv" : "json"; }

LogFormat log_format_from_string(std::string_view s) {
  if (s == "csv") return LogFormat::csv;
  if (s == "json" || s == "jsonl") return LogFormat::jsonl;
  throw ParseError("unknown log format '" + std::string(s) + "'");
}

std::string format_sample_log(std::span<const FrameResult> results, LogFormat format) {
  std::string out;
  if (format == LogFormat::csv) out = join(sample_columns()) + "\n";
  for (const auto& r : results) {
    const auto row = sample_row(r);
    out += format == LogFormat::csv ? join(row) : json_line(row);
    out += '\n';
  }
  return out;
}

std::vector<FrameResult> parse_sample_log(std::string_view text) {
  std::vector<FrameResult> out;
  const std::string_view body = trim(text);
  if (!body.empty() && body.front() == '{') {
    std::size_t line_no = 0;
    for (const auto line : lines_of(text)) {
      ++line_no;
      const std::string where = "sample log line " + std::to_string(line_no);
      std::vector<std::string> owned(kColCount);
      try {
        const json j = json::parse(line);
        for (std::size_t c = 0; c < kColCount; ++c) owned[c] = json_cell(j.at(sample_columns()[c]));
        if (j.size() != kColCount) throw ParseError(where + ": unexpected keys");
      } catch (const json::exception& e) {
        throw ParseError(where + ": " + e.what());
      }
      const std::vector<std::string_view> cells(owned.begin(), owned.end());
      out.push_back(row_to_result(RowReader{cells, where}));
    }
    return out;
  }
  const CsvReader csv(text, sample_columns(), "sample log");
  for (std::size_t i = 0; i < csv.rows(); ++i) {
    const auto cells = csv.row(i);
    out.push_back(row_to_result(RowReader{cells, "sample log line " + std::to_string(i + 2)}));
  }
  return out;
}

std::vector<GazeSample> samples_only(std::span<const FrameResult> results) {
  std::vector<GazeSample> out;
  for (const auto& r : results) {
    if (const auto* s = std::get_if<GazeSample>(&r)) out.push_back(*s);
  }
  return out;
}

namespace {

const std::vector<std::string> kTrialColumns = {"marker", "visit", "centre_x", "centre_y", "centre_z", "screen_u",
                                                "screen_v", "size_m", "size_px", "start_ns", "end_ns"};

const std::vector<std::string> kTruthColumns = {
    "seq", "t_ns", "pose_qw", "pose_qx", "pose_qy", "pose_qz", "pose_tx", "pose_ty", "pose_tz",
    "gaze_head_x", "gaze_head_y", "gaze_head_z", "gaze_scene_x", "gaze_scene_y", "gaze_scene_z",
    "target_x", "target_y", "target_z", "hit_x", "hit_y", "hit_z", "blink", "occluded", "trial"};

const std::vector<std::string> kMeasurementColumns = {"kind", "magnitude_m", "head_distance_m"};

const std::vector<std::string> kMetricColumns = {"marker", "visit", "accuracy_deg", "precision_deg", "n_used"};

struct Cells {
  const std::vector<std::string_view>& cells;
  const std::vector<std::string>& names;
  std::string where;

  double num(std::size_t c) const { return parse_double(cells[c], where + " " + names[c]); }
  long long integer(std::size_t c) const { return parse_int(cells[c], where + " " + names[c]); }
  Vec3 vec(std::size_t c) const { return {num(c), num(c + 1), num(c + 2)}; }
  UnitVec3 unit(std::size_t c) const {
    try {
      return UnitVec3(vec(c));
    } catch (const std::invalid_argument&) {
      throw ValidationError(where + ": zero direction");
    }
  }
};

}  // namespace

std::string format_trials(std::span<const TrialDefinition> trials) {
  std::string out = join(kTrialColumns) + "\n";
  for (const auto& d : trials) {
    out += join({std::to_string(d.marker), std::to_string(d.visit), fmt(d.centre.x()), fmt(d.centre.y()),
                 fmt(d.centre.z()), fmt(d.screen_px.u), fmt(d.screen_px.v), fmt(d.size_m), fmt(d.size_px),
                 std::to_string(d.start), std::to_string(d.end)}) +
           "\n";
  }
  return out;
}

std::vector<TrialDefinition> parse_trials(std::string_view text) {
  const CsvReader csv(text, kTrialColumns, "trials");
  std::vector<TrialDefinition> out;
  for (std::size_t i = 0; i < csv.rows(); ++i) {
    const auto cells = csv.row(i);
    const Cells c{cells, kTrialColumns, "trials line " + std::to_string(i + 2)};
    TrialDefinition d;
    d.marker = static_cast<int>(c.integer(0));
    d.visit = static_cast<int>(c.integer(1));
    d.centre = c.vec(2);
    d.screen_px = {c.num(5), c.num(6)};
    d.size_m = c.num(7);
    d.size_px = c.num(8);
    d.start = c.integer(9);
    d.end = c.integer(10);
    if (d.end <= d.start) throw ValidationError(c.where + ": empty trial window");
    out.push_back(d);
  }
  return out;
}

std::string format_truth(std::span<const TruthFrame> truth) {
  std::string out = join(kTruthColumns) + "\n";
  for (const auto& f : truth) {
    const auto& q = f.head_pose.rotation().quat();
    const auto& t = f.head_pose.translation();
    std::vector<std::string> row = {std::to_string(f.sequence), std::to_string(f.timestamp),
                                    fmt(q.w()), fmt(q.x()), fmt(q.y()), fmt(q.z()), fmt(t.x()), fmt(t.y()), fmt(t.z()),
                                    fmt(f.gaze_head.x()), fmt(f.gaze_head.y()), fmt(f.gaze_head.z()),
                                    fmt(f.gaze_scene.x()), fmt(f.gaze_scene.y()), fmt(f.gaze_scene.z()),
                                    fmt(f.target.x()), fmt(f.target.y()), fmt(f.target.z())};
    for (int a = 0; a < 3; ++a) row.push_back(f.intersection ? fmt((*f.intersection)[a]) : std::string{});
    row.push_back(f.blink ? "1" : "0");
    row.push_back(f.occluded ? "1" : "0");
    row.push_back(std::to_string(f.trial));
    out += join(row) + "\n";
  }
  return out;
}

std::vector<TruthFrame> parse_truth(std::string_view text) {
  const CsvReader csv(text, kTruthColumns, "truth");
  std::vector<TruthFrame> out;
  for (std::size_t i = 0; i < csv.rows(); ++i) {
    const auto cells = csv.row(i);
    const Cells c{cells, kTruthColumns, "truth line " + std::to_string(i + 2)};
    TruthFrame f;
    f.sequence = parse_uint(cells[0], c.where + " seq");
    f.timestamp = c.integer(1);
    const Eigen::Quaterniond q(c.num(2), c.num(3), c.num(4), c.num(5));
    f.head_pose = RigidTransform(Rotation(q), c.vec(6), FrameId::head_camera, FrameId::head);
    f.gaze_head = c.unit(9);
    f.gaze_scene = c.unit(12);
    f.target = c.vec(15);
    if (!cells[18].empty()) f.intersection = c.vec(18);
    f.blink = c.integer(21) != 0;
    f.occluded = c.integer(22) != 0;
    f.trial = static_cast<int>(c.integer(23));
    out.push_back(f);
  }
  return out;
}

std::string format_measurements(std::span<const SceneMeasurement> m) {
  std::string out = join(kMeasurementColumns) + "\n";
  for (const auto& x : m) out += join({std::string(to_string(x.kind)), fmt(x.magnitude), fmt(x.head_distance)}) + "\n";
  return out;
}

std::vector<SceneMeasurement> parse_measurements(std::string_view text) {
  const CsvReader csv(text, kMeasurementColumns, "measurements");
  std::vector<SceneMeasurement> out;
  for (std::size_t i = 0; i < csv.rows(); ++i) {
    const auto cells = csv.row(i);
    const Cells c{cells, kMeasurementColumns, "measurements line " + std::to_string(i + 2)};
    out.push_back({enum_from_string<MeasurementKind, 2>(cells[0], c.where), c.num(1), c.num(2)});
  }
  return out;
}

std::string format_metrics_csv(std::span<const TrialMetrics> metrics) {
  std::string out = join(kMetricColumns) + "\n";
  for (const auto& m : metrics) {
    out += join({std::to_string(m.marker), std::to_string(m.visit), fmt(m.accuracy), fmt(m.precision),
                 std::to_string(m.n_used)}) +
           "\n";
  }
  return out;
}

std::vector<TrialMetrics> parse_metrics_csv(std::string_view text) {
  const CsvReader csv(text, kMetricColumns, "metrics");
  std::vector<TrialMetrics> out;
  for (std::size_t i = 0; i < csv.rows(); ++i) {
    const auto cells = csv.row(i);
    const Cells c{cells, kMetricColumns, "metrics line " + std::to_string(i + 2)};
    out.push_back({static_cast<int>(c.integer(0)), static_cast<int>(c.integer(1)), c.num(2), c.num(3),
                   static_cast<std::size_t>(parse_uint(cells[4], c.where + " n_used"))});
  }
  return out;
}

std::string format_evaluation_json(const Evaluation& e) { return evaluation_json(e).dump(2) + "\n"; }

Evaluation parse_evaluation_json(std::string_view text) {
  return parse_json(text, "evaluation", [](const json& j) { return evaluation_from(j); });
}

std::string format_heatmap_pgm(const Heatmap& h) {
  if (h.width <= 0 || h.height <= 0 || h.grid.size() != static_cast<std::size_t>(h.width) * h.height) {
    throw ValidationError("heatmap: grid does not match its dimensions");
  }
  const double peak = *std::max_element(h.grid.begin(), h.grid.end());
  const double scale = peak > 0.0 ? peak / 65535.0 : 0.0;
  std::string out = "P5\n# icugaze statistic=" + std::string(to_string(h.statistic)) + " sigma=" + fmt(h.sigma) +
                    " scale=" + fmt(scale) + "\n" + std::to_string(h.width) + " " + std::to_string(h.height) +
                    "\n65535\n";
  out.reserve(out.size() + h.grid.size() * 2);
  for (double v : h.grid) {
    const long level = scale > 0.0 ? std::clamp(std::lround(std::max(v, 0.0) / scale), 0L, 65535L) : 0L;
    out += static_cast<char>((level >> 8) & 0xff);
    out += static_cast<char>(level & 0xff);
  }
  return out;
}

Heatmap parse_heatmap_pgm(std::string_view bytes) {
  auto next_line = [&](std::size_t& pos) {
    const std::size_t nl = bytes.find('\n', pos);
    if (nl == std::string_view::npos) throw ParseError("heatmap: truncated header");
    const auto line = bytes.substr(pos, nl - pos);
    pos = nl + 1;
    return line;
  };
  std::size_t pos = 0;
  if (next_line(pos) != "P5") throw ParseError("heatmap: not a binary PGM");
  const auto comment = next_line(pos);
  const std::string_view prefix = "# icugaze ";
  if (comment.substr(0, prefix.size()) != prefix) throw ParseError("heatmap: missing metadata comment");
  Heatmap h;
  double scale = 0.0;
  bool have_stat = false, have_sigma = false, have_scale = false;
  for (auto field : split(comment.substr(prefix.size()), ' ')) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) throw ParseError("heatmap: malformed metadata");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "statistic") {
      h.statistic = enum_from_string<Statistic, 2>(value, "heatmap statistic");
      have_stat = true;
    } else if (key == "sigma") {
      h.sigma = parse_double(value, "heatmap sigma");
      have_sigma = true;
    } else if (key == "scale") {
      scale = parse_double(value, "heatmap scale");
      have_scale = true;
    } else {
      throw ParseError("heatmap: unknown metadata key '" + std::string(key) + "'");
    }
  }
  if (!have_stat || !have_sigma || !have_scale) throw ParseError("heatmap: incomplete metadata");
  const auto dims = split(trim(next_line(pos)), ' ');
  if (dims.size() != 2) throw ParseError("heatmap: bad dimensions");
  h.width = static_cast<int>(parse_int(dims[0], "heatmap width"));
  h.height = static_cast<int>(parse_int(dims[1], "heatmap height"));
  if (h.width <= 0 || h.height <= 0) throw ValidationError("heatmap: non-positive dimensions");
  if (parse_int(next_line(pos), "heatmap maxval") != 65535) throw ParseError("heatmap: expected maxval 65535");
  const std::size_t n = static_cast<std::size_t>(h.width) * h.height;
  if (bytes.size() - pos != 2 * n) throw ValidationError("heatmap: pixel data size mismatch");
  h.grid.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto hi = static_cast<unsigned char>(bytes[pos + 2 * i]);
    const auto lo = static_cast<unsigned char>(bytes[pos + 2 * i + 1]);
    h.grid[i] = static_cast<double>((hi << 8) | lo) * scale;
  }
  return h;
}

std::string format_densities_json(std::span<const DensityHistogram> d) {
  json out = json::array();
  for (const auto& h : d) {
    out.push_back({{"variable", std::string(to_string(h.variable))}, {"count", h.count}, {"edges", h.edges},
                   {"density", h.density}});
  }
  return out.dump(2) + "\n";
}

std::vector<DensityHistogram> parse_densities_json(std::string_view text) {
  return parse_json(text, "densities", [](const json& j) {
    std::vector<DensityHistogram> out;
    for (const json& x : j) {
      DensityHistogram h;
      h.variable = enum_from_string<DensityVariable, kDensityVariableCount>(x.at("variable").get<std::string>(),
                                                                            "densities");
      h.count = x.at("count").get<std::size_t>();
      h.edges = x.at("edges").get<std::vector<double>>();
      h.density = x.at("density").get<std::vector<double>>();
      if (h.edges.size() != h.density.size() + 1) throw ValidationError("densities: edges must be bins + 1");
      out.push_back(std::move(h));
    }
    return out;
  });
}

std::string format_requirements_json(const RequirementSummary& r) {
  const json j = {{"required_accuracy_deg", r.required_accuracy},
                  {"required_precision_deg", r.required_precision},
                  {"precision_within_accuracy", r.precision_within_accuracy()},
                  {"pairwise_angles_deg", r.pairwise_angles},
                  {"size_angles_deg", r.size_angles}};
  return j.dump(2) + "\n";
}

RequirementSummary parse_requirements_json(std::string_view text) {
  return parse_json(text, "requirements", [](const json& j) {
    RequirementSummary r;
    r.required_accuracy = j.at("required_accuracy_deg").get<double>();
    r.required_precision = j.at("required_precision_deg").get<double>();
    r.pairwise_angles = j.at("pairwise_angles_deg").get<std::vector<double>>();
    r.size_angles = j.at("size_angles_deg").get<std::vector<double>>();
    return r;
  });
}

void RunReport::validate() const {
  if (stats.samples + stats.rejected() != stats.head_frames) {
    throw ValidationError("run report: samples + rejections (" + std::to_string(stats.samples + stats.rejected()) +
                          ") != head frames (" + std::to_string(stats.head_frames) + ")");
  }
}

std::string format_run_report(const RunReport& r) {
  const PipelineStats& s = r.stats;
  json rejections = json::object();
  for (std::size_t i = 0; i < kRejectionReasonCount; ++i) {
    rejections[std::string(to_string(static_cast<RejectionReason>(i)))] = s.rejections[i];
  }
  json resolutions = json::object();
  for (std::size_t i = 0; i < s.resolutions.size(); ++i) {
    resolutions[std::string(to_string(static_cast<Resolution>(i)))] = s.resolutions[i];
  }
  const json j = {{"head_frames", s.head_frames},
                  {"scene_frames", s.scene_frames},
                  {"samples", s.samples},
                  {"rejections", std::move(rejections)},
                  {"resolutions", std::move(resolutions)},
                  {"board_pose_failures", s.board_pose_failures},
                  {"wall_seconds", s.wall_seconds},
                  {"octree_build_seconds", s.octree_build_seconds},
                  {"samples_per_second", s.samples_per_second()},
                  {"evaluation", r.evaluation ? evaluation_json(*r.evaluation) : json(nullptr)},
                  {"heatmaps", r.heatmaps}};
  return j.dump(2) + "\n";
}

RunReport parse_run_report(std::string_view text) {
  return parse_json(text, "run report", [](const json& j) {
    RunReport r;
    r.stats.head_frames = j.at("head_frames").get<std::size_t>();
    r.stats.scene_frames = j.at("scene_frames").get<std::size_t>();
    r.stats.samples = j.at("samples").get<std::size_t>();
    for (std::size_t i = 0; i < kRejectionReasonCount; ++i) {
      r.stats.rejections[i] = j.at("rejections").at(std::string(to_string(static_cast<RejectionReason>(i)))).get<std::size_t>();
    }
    for (std::size_t i = 0; i < r.stats.resolutions.size(); ++i) {
      r.stats.resolutions[i] = j.at("resolutions").at(std::string(to_string(static_cast<Resolution>(i)))).get<std::size_t>();
    }
    r.stats.board_pose_failures = j.at("board_pose_failures").get<std::size_t>();
    r.stats.wall_seconds = j.at("wall_seconds").get<double>();
    r.stats.octree_build_seconds = j.at("octree_build_seconds").get<double>();
    if (!j.at("evaluation").is_null()) r.evaluation = evaluation_from(j.at("evaluation"));
    r.heatmaps = j.at("heatmaps").get<std::vector<std::string>>();
    r.validate();
    return r;
  });
}

}  // namespace icugaze::io
