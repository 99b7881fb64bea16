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

#include "icugaze/io/config.hpp"

#include "icugaze/io/files.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

namespace icugaze::io {

namespace {

namespace pt = boost::property_tree;

template <typename Obj>
struct Binding {
  std::string section;
  std::string key;
  std::function<void(Obj&, std::string_view)> set;
  std::function<std::string(const Obj&)> get;
};

std::string where(const std::string& section, const std::string& key) { return "[" + section + "] " + key; }

std::string format_vec(const Vec3& v) {
  return format_double(v.x()) + " " + format_double(v.y()) + " " + format_double(v.z());
}

Vec3 parse_vec(std::string_view text, const std::string& what) {
  std::istringstream in{std::string(text)};
  std::string a, b, c, extra;
  if (!(in >> a >> b >> c) || (in >> extra)) throw ParseError(what + ": expected three numbers");
  return {parse_double(a, what), parse_double(b, what), parse_double(c, what)};
}

std::string format_windows(const std::vector<TimeWindow>& ws) {
  std::string out;
  for (const auto& w : ws) {
    if (!out.empty()) out += ", ";
    out += format_double(w.start_s) + "-" + format_double(w.end_s);
  }
  return out;
}

std::vector<TimeWindow> parse_windows(std::string_view text, const std::string& what) {
  std::vector<TimeWindow> out;
  text = trim(text);
  while (!text.empty()) {
    const auto comma = text.find(',');
    const std::string_view item = trim(text.substr(0, comma));
    const auto dash = item.find('-');
    if (dash == std::string_view::npos) throw ParseError(what + ": expected start-end");
    out.push_back({parse_double(item.substr(0, dash), what), parse_double(item.substr(dash + 1), what)});
    text = comma == std::string_view::npos ? std::string_view{} : trim(text.substr(comma + 1));
  }
  return out;
}

// Binding for a numeric or string member reached through `access`.
template <typename Obj, typename Access>
Binding<Obj> field(std::string section, std::string key, Access access) {
  const std::string what = where(section, key);
  Binding<Obj> b{std::move(section), std::move(key), {}, {}};
  b.set = [access, what](Obj& o, std::string_view v) {
    auto& ref = access(o);
    using T = std::decay_t<decltype(ref)>;
    if constexpr (std::is_same_v<T, double>) {
      ref = parse_double(v, what);
    } else if constexpr (std::is_same_v<T, std::string>) {
      ref = std::string(trim(v));
    } else if constexpr (std::is_same_v<T, Vec3>) {
      ref = parse_vec(v, what);
    } else if constexpr (std::is_same_v<T, std::vector<TimeWindow>>) {
      ref = parse_windows(v, what);
    } else if constexpr (std::is_unsigned_v<T>) {
      const auto x = parse_uint(v, what);
      if (x > std::numeric_limits<T>::max()) throw ParseError(what + ": out of range");
      ref = static_cast<T>(x);
    } else {
      const auto x = parse_int(v, what);
      if (x < std::numeric_limits<T>::min() || x > std::numeric_limits<T>::max()) throw ParseError(what + ": out of range");
      ref = static_cast<T>(x);
    }
  };
  b.get = [access](const Obj& o) -> std::string {
    const auto& ref = access(const_cast<Obj&>(o));
    using T = std::decay_t<decltype(ref)>;
    if constexpr (std::is_same_v<T, double>) {
      return format_double(ref);
    } else if constexpr (std::is_same_v<T, std::string>) {
      return ref;
    } else if constexpr (std::is_same_v<T, Vec3>) {
      return format_vec(ref);
    } else if constexpr (std::is_same_v<T, std::vector<TimeWindow>>) {
      return format_windows(ref);
    } else {
      return std::to_string(ref);
    }
  };
  return b;
}

// sync tolerance is written in milliseconds.
Binding<PipelineConfig> sync_tolerance_binding() {
  Binding<PipelineConfig> b{"pipeline", "sync_tolerance_ms", {}, {}};
  b.set = [](PipelineConfig& c, std::string_view v) {
    c.sync_tolerance = static_cast<Timestamp>(std::llround(parse_double(v, "[pipeline] sync_tolerance_ms") * kNanosPerMilli));
  };
  b.get = [](const PipelineConfig& c) { return format_double(static_cast<double>(c.sync_tolerance) / kNanosPerMilli); };
  return b;
}

const std::vector<Binding<PipelineConfig>>& config_bindings() {
  using C = PipelineConfig;
  static const std::vector<Binding<C>> table = {
      field<C>("pipeline", "face_gate_threshold", [](C& c) -> auto& { return c.face_gate_threshold; }),
      field<C>("pipeline", "blink_threshold", [](C& c) -> auto& { return c.blink_threshold; }),
      sync_tolerance_binding(),
      field<C>("pipeline", "ipd", [](C& c) -> auto& { return c.ipd; }),
      field<C>("pipeline", "hit_radius", [](C& c) -> auto& { return c.hit_radius; }),
      field<C>("pipeline", "queue_depth", [](C& c) -> auto& { return c.queue_depth; }),
      field<C>("pipeline", "tree_buffer", [](C& c) -> auto& { return c.tree_buffer; }),
      field<C>("pipeline", "seed", [](C& c) -> auto& { return c.seed; }),
      field<C>("ransac", "iterations", [](C& c) -> auto& { return c.ransac.iterations; }),
      field<C>("ransac", "sample_size", [](C& c) -> auto& { return c.ransac.sample_size; }),
      field<C>("ransac", "reproj_threshold_px", [](C& c) -> auto& { return c.ransac.reproj_threshold_px; }),
      field<C>("ransac", "min_inliers", [](C& c) -> auto& { return c.ransac.min_inliers; }),
      field<C>("ransac", "confidence", [](C& c) -> auto& { return c.ransac.confidence; }),
      field<C>("octree", "max_depth", [](C& c) -> auto& { return c.octree.max_depth; }),
      field<C>("octree", "leaf_capacity", [](C& c) -> auto& { return c.octree.leaf_capacity; }),
      field<C>("plugins", "face_detector", [](C& c) -> auto& { return c.plugins.face_detector; }),
      field<C>("plugins", "landmark_estimator", [](C& c) -> auto& { return c.plugins.landmark_estimator; }),
      field<C>("plugins", "gaze_regressor", [](C& c) -> auto& { return c.plugins.gaze_regressor; }),
      field<C>("plugins", "blink_estimator", [](C& c) -> auto& { return c.plugins.blink_estimator; }),
  };
  return table;
}

template <typename Access>
void add_intrinsics(std::vector<Binding<Scenario>>& t, const std::string& section, Access k) {
  using S = Scenario;
  t.push_back(field<S>(section, "fx", [k](S& s) -> auto& { return k(s).fx; }));
  t.push_back(field<S>(section, "fy", [k](S& s) -> auto& { return k(s).fy; }));
  t.push_back(field<S>(section, "cx", [k](S& s) -> auto& { return k(s).cx; }));
  t.push_back(field<S>(section, "cy", [k](S& s) -> auto& { return k(s).cy; }));
  t.push_back(field<S>(section, "width", [k](S& s) -> auto& { return k(s).width; }));
  t.push_back(field<S>(section, "height", [k](S& s) -> auto& { return k(s).height; }));
}

const std::vector<Binding<Scenario>>& scenario_bindings() {
  using S = Scenario;
  static const std::vector<Binding<S>> table = [] {
    std::vector<Binding<S>> t = {
        field<S>("scenario", "name", [](S& s) -> auto& { return s.name; }),
        field<S>("scenario", "seed", [](S& s) -> auto& { return s.seed; }),
        field<S>("scenario", "head_rate_hz", [](S& s) -> auto& { return s.head_rate_hz; }),
        field<S>("scenario", "scene_rate_hz", [](S& s) -> auto& { return s.scene_rate_hz; }),
        field<S>("scenario", "duration_s", [](S& s) -> auto& { return s.duration_s; }),
        field<S>("scenario", "target_cloud_points", [](S& s) -> auto& { return s.target_cloud_points; }),
        field<S>("screen", "centre", [](S& s) -> auto& { return s.screen_centre; }),
        field<S>("screen", "width_m", [](S& s) -> auto& { return s.screen_width_m; }),
        field<S>("screen", "height_m", [](S& s) -> auto& { return s.screen_height_m; }),
        field<S>("screen", "width_px", [](S& s) -> auto& { return s.screen_width_px; }),
        field<S>("screen", "height_px", [](S& s) -> auto& { return s.screen_height_px; }),
        field<S>("screen", "spacing_m", [](S& s) -> auto& { return s.screen_spacing_m; }),
        field<S>("head", "position", [](S& s) -> auto& { return s.head_position; }),
        field<S>("head", "bed_incline_deg", [](S& s) -> auto& { return s.bed_incline_deg; }),
        field<S>("head", "sway_deg", [](S& s) -> auto& { return s.sway_deg; }),
        field<S>("head", "sway_m", [](S& s) -> auto& { return s.sway_m; }),
        field<S>("head", "ipd", [](S& s) -> auto& { return s.ipd; }),
        field<S>("rig", "head_camera_offset", [](S& s) -> auto& { return s.head_camera_offset; }),
        field<S>("rig", "board_size_m", [](S& s) -> auto& { return s.board_size_m; }),
        field<S>("rig", "board_corners_per_side", [](S& s) -> auto& { return s.board_corners_per_side; }),
        field<S>("markers", "rows", [](S& s) -> auto& { return s.markers.rows; }),
        field<S>("markers", "cols", [](S& s) -> auto& { return s.markers.cols; }),
        field<S>("markers", "size_m", [](S& s) -> auto& { return s.markers.marker_size_m; }),
        field<S>("markers", "samples_per_marker", [](S& s) -> auto& { return s.markers.samples_per_marker; }),
        field<S>("markers", "lead_in_frames", [](S& s) -> auto& { return s.markers.lead_in_frames; }),
        field<S>("markers", "lead_out_frames", [](S& s) -> auto& { return s.markers.lead_out_frames; }),
        field<S>("noise", "landmark_px", [](S& s) -> auto& { return s.noise.landmark_px; }),
        field<S>("noise", "gaze_deg", [](S& s) -> auto& { return s.noise.gaze_deg; }),
        field<S>("noise", "gaze_correlation", [](S& s) -> auto& { return s.noise.gaze_correlation; }),
        field<S>("noise", "confidence_floor", [](S& s) -> auto& { return s.noise.confidence_floor; }),
        field<S>("noise", "depth_m", [](S& s) -> auto& { return s.noise.depth_m; }),
        field<S>("noise", "board_corner_px", [](S& s) -> auto& { return s.noise.board_corner_px; }),
        field<S>("events", "blinks", [](S& s) -> auto& { return s.blinks; }),
        field<S>("events", "occlusions", [](S& s) -> auto& { return s.occlusions; }),
    };
    add_intrinsics(t, "head_camera", [](S& s) -> CameraIntrinsics& { return s.head_k; });
    add_intrinsics(t, "scene_camera", [](S& s) -> CameraIntrinsics& { return s.scene_k; });
    return t;
  }();
  return table;
}

const std::vector<Binding<ScenePlane>>& plane_bindings() {
  using P = ScenePlane;
  static const std::vector<Binding<P>> table = {
      field<P>("plane", "origin", [](P& p) -> auto& { return p.origin; }),
      field<P>("plane", "u_axis", [](P& p) -> auto& { return p.u_axis; }),
      field<P>("plane", "v_axis", [](P& p) -> auto& { return p.v_axis; }),
      field<P>("plane", "u_extent", [](P& p) -> auto& { return p.u_extent; }),
      field<P>("plane", "v_extent", [](P& p) -> auto& { return p.v_extent; }),
      field<P>("plane", "spacing", [](P& p) -> auto& { return p.spacing; }),
  };
  return table;
}

pt::ptree read_tree(std::string_view text) {
  std::istringstream in{std::string(text)};
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(std::string("config: ") + e.message() + " (line " + std::to_string(e.line()) + ")");
  }
  for (const auto& [name, section] : tree) {
    if (section.empty() && !section.data().empty()) throw ParseError("config: key '" + name + "' outside a section");
  }
  return tree;
}

template <typename Obj>
void apply_section(Obj& obj, const std::string& name, const pt::ptree& section, const std::vector<Binding<Obj>>& table,
                   const std::string& table_section) {
  for (const auto& [key, value] : section) {
    const auto it = std::find_if(table.begin(), table.end(),
                                 [&](const Binding<Obj>& b) { return b.section == table_section && b.key == key; });
    if (it == table.end()) throw ParseError("config: unknown key " + where(name, key));
    it->set(obj, value.data());
  }
}

template <typename Obj>
void write_sections(std::ostringstream& out, const Obj& obj, const std::vector<Binding<Obj>>& table,
                    const std::string& rename = {}) {
  std::string current;
  for (const auto& b : table) {
    if (b.section != current) {
      if (out.tellp() > 0) out << '\n';
      out << '[' << (rename.empty() ? b.section : rename) << "]\n";
      current = b.section;
    }
    out << b.key << " = " << b.get(obj) << '\n';
  }
}

bool is_plane_section(const std::string& name) {
  return name.size() > 5 && name.compare(0, 5, "plane") == 0 &&
         std::all_of(name.begin() + 5, name.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

PipelineConfig parse_config(std::string_view text) {
  PipelineConfig cfg;
  const auto& table = config_bindings();
  for (const auto& [name, section] : read_tree(text)) {
    const bool known = std::any_of(table.begin(), table.end(), [&](const auto& b) { return b.section == name; });
    if (!known) throw ParseError("config: unknown section [" + name + "]");
    apply_section(cfg, name, section, table, name);
  }
  cfg.validate();
  return cfg;
}

std::string format_config(const PipelineConfig& cfg) {
  std::ostringstream out;
  write_sections(out, cfg, config_bindings());
  return out.str();
}

PipelineConfig load_config(const std::filesystem::path& path) { return parse_config(read_file(path)); }

Scenario parse_scenario(std::string_view text) {
  Scenario s = Scenario::replicated_lab();
  const auto& table = scenario_bindings();
  std::map<unsigned long long, ScenePlane> planes;
  for (const auto& [name, section] : read_tree(text)) {
    if (is_plane_section(name)) {
      apply_section(planes[parse_uint(std::string_view(name).substr(5), "plane index")], name, section, plane_bindings(),
                    "plane");
      continue;
    }
    const bool known = std::any_of(table.begin(), table.end(), [&](const auto& b) { return b.section == name; });
    if (!known) throw ParseError("scenario: unknown section [" + name + "]");
    apply_section(s, name, section, table, name);
  }
  for (auto& [index, plane] : planes) s.extra_planes.push_back(plane);
  s.validate();
  return s;
}

std::string format_scenario(const Scenario& s) {
  std::ostringstream out;
  write_sections(out, s, scenario_bindings());
  for (std::size_t i = 0; i < s.extra_planes.size(); ++i) {
    write_sections(out, s.extra_planes[i], plane_bindings(), "plane" + std::to_string(i));
  }
  return out.str();
}

Scenario load_scenario(const std::filesystem::path& path) { return parse_scenario(read_file(path)); }

}  // namespace icugaze::io
