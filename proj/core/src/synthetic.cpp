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

#include "icugaze/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace icugaze {

namespace {

// Independent random streams, mixed with the scenario seed and a frame index.
constexpr std::uint64_t kStreamOrder = 0x6f72646572ULL;
constexpr std::uint64_t kStreamPhase = 0x7068617365ULL;
constexpr std::uint64_t kStreamGaze = 0x67617a65ULL;
constexpr std::uint64_t kStreamFace = 0x66616365ULL;
constexpr std::uint64_t kStreamLandmark = 0x6c616e64ULL;
constexpr std::uint64_t kStreamBlink = 0x626c696eULL;
constexpr std::uint64_t kStreamBoard = 0x626f6172ULL;
constexpr std::uint64_t kStreamCloud = 0x636c6f75ULL;

std::mt19937_64 stream(std::uint64_t seed, std::uint64_t id, std::uint64_t index) {
  return std::mt19937_64(mix_seed(seed ^ mix_seed(id, 0), index));
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

double gaussian(std::mt19937_64& rng, double sigma) {
  if (sigma == 0.0) return 0.0;
  return std::normal_distribution<double>(0.0, sigma)(rng);
}

bool finite(const Vec3& v) { return v.allFinite(); }

// Rotation whose +z looks from `eye` toward `at`, with +y as close to
// scene-down as possible.
Rotation look_at(const Vec3& eye, const Vec3& at) {
  const Vec3 z = (at - eye).normalized();
  Vec3 x = Vec3::UnitY().cross(z);
  if (x.norm() < 1e-9) throw InvalidScenario("scenario: camera looks straight along the vertical");
  x.normalize();
  const Vec3 y = z.cross(x);
  Eigen::Matrix3d m;
  m.col(0) = x;
  m.col(1) = y;
  m.col(2) = z;
  return Rotation(m);
}

// Yaw/pitch of a direction in the frame's own axes (+z forward, +y down).
Eigen::Vector2d yaw_pitch(const Vec3& d) { return {std::atan2(d.x(), d.z()), std::atan2(-d.y(), std::hypot(d.x(), d.z()))}; }

Vec3 from_yaw_pitch(double yaw, double pitch) {
  return {std::sin(yaw) * std::cos(pitch), -std::sin(pitch), std::cos(yaw) * std::cos(pitch)};
}

void sample_plane(const ScenePlane& p, std::vector<Vec3>& out) {
  const Vec3 u = p.u_axis.normalized(), v = p.v_axis.normalized();
  const auto nu = static_cast<std::size_t>(std::floor(p.u_extent / p.spacing + 1e-9)) + 1;
  const auto nv = static_cast<std::size_t>(std::floor(p.v_extent / p.spacing + 1e-9)) + 1;
  out.reserve(out.size() + nu * nv);
  for (std::size_t j = 0; j < nv; ++j) {
    for (std::size_t i = 0; i < nu; ++i) {
      out.push_back(p.origin + (static_cast<double>(i) * p.spacing) * u + (static_cast<double>(j) * p.spacing) * v);
    }
  }
}

std::size_t head_frame_count(const Scenario& s) {
  if (s.duration_s > 0.0) return static_cast<std::size_t>(std::llround(s.duration_s * s.head_rate_hz));
  return static_cast<std::size_t>(s.markers.rows * s.markers.cols * s.markers.samples_per_marker);
}

double total_duration(const Scenario& s) { return static_cast<double>(head_frame_count(s)) / s.head_rate_hz; }

Timestamp stamp(std::size_t i, double rate) {
  return static_cast<Timestamp>(std::llround(static_cast<double>(i) * static_cast<double>(kNanosPerSecond) / rate));
}

struct Sway {
  std::array<double, 6> phase{};
};

RigidTransform head_in_scene_at(const Scenario& s, const Sway& sway, double t) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const Vec3 pos = s.head_position + s.sway_m * Vec3(std::sin(two_pi * t / 7.3 + sway.phase[0]),
                                                     0.5 * std::sin(two_pi * t / 5.1 + sway.phase[1]),
                                                     std::sin(two_pi * t / 9.7 + sway.phase[2]));
  const Eigen::Vector2d base = yaw_pitch(s.screen_centre - s.head_position);
  const double a = deg_to_rad(s.sway_deg);
  const double yaw = base.x() + a * std::sin(two_pi * t / 6.1 + sway.phase[3]);
  // A reclined patient's face points above the screen; a third of the
  // incline is carried by the neck.
  const double pitch = base.y() + deg_to_rad(s.bed_incline_deg) / 3.0 + 0.7 * a * std::sin(two_pi * t / 8.3 + sway.phase[4]);
  const double roll = 0.5 * a * std::sin(two_pi * t / 11.3 + sway.phase[5]);
  return RigidTransform(Rotation::from_ypr(yaw, pitch, roll), pos, FrameId::scene_camera, FrameId::head);
}

std::vector<int> marker_order(const Scenario& s, std::size_t pass) {
  const int n = s.markers.rows * s.markers.cols;
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::mt19937_64 rng = stream(s.seed, kStreamOrder, pass);
  for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  return order;
}

}  // namespace

void NoiseModel::validate() const {
  if (!(landmark_px >= 0.0) || !(gaze_deg >= 0.0) || !(depth_m >= 0.0) || !(board_corner_px >= 0.0)) {
    throw InvalidScenario("noise: standard deviations must be non-negative");
  }
  if (!(gaze_correlation >= 0.0 && gaze_correlation < 1.0)) throw InvalidScenario("noise: gaze_correlation outside [0, 1)");
  if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0)) throw InvalidScenario("noise: confidence_floor outside [0, 1]");
}

Scenario Scenario::replicated_lab() { return Scenario{}; }

void Scenario::validate() const {
  if (!(head_rate_hz > 0.0) || !(scene_rate_hz > 0.0)) throw InvalidScenario("scenario: frame rates must be positive");
  if (!(duration_s >= 0.0)) throw InvalidScenario("scenario: negative duration");
  try {
    head_k.validate();
    scene_k.validate();
  } catch (const ValidationError& e) {
    throw InvalidScenario(std::string("scenario: ") + e.what());
  }
  if (!(screen_width_m > 0.0 && screen_height_m > 0.0) || screen_width_px <= 0 || screen_height_px <= 0) {
    throw InvalidScenario("scenario: screen dimensions must be positive");
  }
  if (!(screen_spacing_m > 0.0)) throw InvalidScenario("scenario: screen spacing must be positive");
  if (!finite(screen_centre) || !finite(head_position) || !finite(head_camera_offset)) {
    throw InvalidScenario("scenario: non-finite position");
  }
  if (!(screen_centre.z() > head_position.z())) throw InvalidScenario("scenario: screen must lie ahead of the head");
  if (!(bed_incline_deg >= 0.0 && bed_incline_deg < 90.0)) throw InvalidScenario("scenario: bed incline outside [0, 90)");
  if (!(sway_deg >= 0.0 && sway_m >= 0.0)) throw InvalidScenario("scenario: negative sway");
  if (!(ipd >= kMinIpd && ipd <= kMaxIpd)) throw InvalidScenario("scenario: ipd outside [0.04, 0.08]");
  if (!(board_size_m > 0.0) || board_corners_per_side < 2) throw InvalidScenario("scenario: bad board geometry");
  const auto& m = markers;
  if (m.rows < 1 || m.cols < 1 || m.samples_per_marker < 1 || !(m.marker_size_m > 0.0)) {
    throw InvalidScenario("scenario: bad marker grid");
  }
  if (m.lead_in_frames < 0 || m.lead_out_frames < 0 || m.lead_in_frames + m.lead_out_frames >= m.samples_per_marker) {
    throw InvalidScenario("scenario: transitions leave no fixation frames");
  }
  for (const auto& p : extra_planes) {
    if (!(p.spacing > 0.0 && p.u_extent >= 0.0 && p.v_extent >= 0.0)) throw InvalidScenario("scenario: bad plane");
    if (p.u_axis.norm() < 1e-12 || p.v_axis.norm() < 1e-12 ||
        std::abs(p.u_axis.normalized().dot(p.v_axis.normalized())) > 1e-9) {
      throw InvalidScenario("scenario: plane axes must be non-zero and orthogonal");
    }
  }
  noise.validate();
  const double total = total_duration(*this);
  if (head_frame_count(*this) == 0) throw InvalidScenario("scenario: no frames");
  for (const auto* events : {&blinks, &occlusions}) {
    for (const auto& w : *events) {
      if (!(w.start_s >= 0.0 && w.end_s > w.start_s && w.end_s <= total + 1e-9)) {
        throw InvalidScenario("scenario: event window outside the scenario duration");
      }
    }
  }
}

Vec3 screen_point(const Scenario& s, const PixelPoint& px) {
  return s.screen_centre + (px.u / s.screen_width_px - 0.5) * s.screen_width_m * Vec3::UnitX() +
         (px.v / s.screen_height_px - 0.5) * s.screen_height_m * Vec3::UnitY();
}

std::optional<Vec3> cast_planes(const std::vector<ScenePlane>& planes, const Vec3& origin, const Vec3& dir) {
  std::optional<Vec3> best;
  double best_t = 0.0;
  for (const auto& p : planes) {
    const Vec3 u = p.u_axis.normalized(), v = p.v_axis.normalized();
    const Vec3 n = u.cross(v);
    const double denom = n.dot(dir);
    if (std::abs(denom) < 1e-12) continue;
    const double t = n.dot(p.origin - origin) / denom;
    if (t <= 0.0) continue;
    const Vec3 hit = origin + t * dir;
    const double a = (hit - p.origin).dot(u), b = (hit - p.origin).dot(v);
    constexpr double eps = 1e-12;
    if (a < -eps || b < -eps || a > p.u_extent + eps || b > p.v_extent + eps) continue;
    if (!best || t < best_t) {
      best = hit;
      best_t = t;
    }
  }
  return best;
}

PointCloud SyntheticRun::cloud(std::size_t i) const {
  PointCloud c{base_cloud_, scene_frames_.at(i).timestamp};
  const double sigma = scenario_.noise.depth_m;
  if (sigma > 0.0) {
    std::mt19937_64 rng = stream(scenario_.seed, kStreamCloud, i);
    for (Vec3& p : c.points) {
      const double r = p.norm();
      if (r > 0.0) p *= 1.0 + gaussian(rng, sigma) / r;
    }
  }
  return c;
}

SyntheticRun generate(const Scenario& s) {
  s.validate();
  SyntheticRun run;
  run.scenario_ = s;
  run.model_ = build_head_model(s.ipd);

  // Static rig: head camera at the screen's bottom-left corner (patient's
  // view), looking at the head; board beside it, coplanar with the sensor.
  const Vec3 corner = s.screen_centre + Vec3(-0.5 * s.screen_width_m, 0.5 * s.screen_height_m, 0.0);
  const Vec3 camera_pos = corner + s.head_camera_offset;
  run.head_camera_in_scene_ =
      RigidTransform(look_at(camera_pos, s.head_position), camera_pos, FrameId::scene_camera, FrameId::head_camera);
  const Vec3 board_offset(0.05, -0.1, 0.0);  // head-camera frame
  run.board_to_head_camera_ = RigidTransform(Rotation::identity(), -board_offset, FrameId::board, FrameId::head_camera);
  const RigidTransform board_in_scene = compose(run.head_camera_in_scene_, invert(run.board_to_head_camera_));
  const RigidTransform scene_to_head_camera = invert(run.head_camera_in_scene_);

  // Scene geometry.
  ScenePlane screen;
  screen.origin = s.screen_centre - 0.5 * s.screen_width_m * Vec3::UnitX() - 0.5 * s.screen_height_m * Vec3::UnitY();
  screen.u_axis = Vec3::UnitX();
  screen.v_axis = Vec3::UnitY();
  screen.u_extent = s.screen_width_m;
  screen.v_extent = s.screen_height_m;
  screen.spacing = s.screen_spacing_m;
  run.planes_.push_back(screen);
  for (const auto& p : s.extra_planes) run.planes_.push_back(p);
  for (const auto& p : run.planes_) sample_plane(p, run.base_cloud_);
  if (s.target_cloud_points > run.base_cloud_.size()) {
    ScenePlane wall;
    wall.u_extent = 4.0;
    wall.v_extent = 3.0;
    wall.origin = Vec3(s.screen_centre.x() - 2.0, s.screen_centre.y() - 1.5, s.screen_centre.z() + 0.3);
    const double needed = static_cast<double>(s.target_cloud_points - run.base_cloud_.size());
    // (u/h + 1)(v/h + 1) = needed, solved for h.
    const double a = needed - 1.0, b = -(wall.u_extent + wall.v_extent), c = -wall.u_extent * wall.v_extent;
    wall.spacing = a > 0.0 ? (-b + std::sqrt(b * b - 4.0 * a * c)) / (2.0 * a) : wall.u_extent;
    const auto count = [&wall](double h) {
      return (std::floor(wall.u_extent / h + 1e-9) + 1.0) * (std::floor(wall.v_extent / h + 1e-9) + 1.0);
    };
    while (count(wall.spacing) < needed) wall.spacing *= 0.999;
    run.planes_.push_back(wall);
    sample_plane(wall, run.base_cloud_);
  }

  // Board corners and their projections in the scene camera.
  std::vector<Vec3> board_points;
  const int nb = s.board_corners_per_side;
  const double pitch = s.board_size_m / (nb - 1);
  for (int j = 0; j < nb; ++j) {
    for (int i = 0; i < nb; ++i) board_points.emplace_back(i * pitch, j * pitch, 0.0);
  }
  const std::size_t n_scene = static_cast<std::size_t>(std::floor(total_duration(s) * s.scene_rate_hz + 1e-9));
  run.scene_frames_.reserve(n_scene);
  for (std::size_t i = 0; i < n_scene; ++i) {
    SceneFrameSpec f;
    f.sequence = i;
    f.timestamp = stamp(i, s.scene_rate_hz);
    std::mt19937_64 rng = stream(s.seed, kStreamBoard, i);
    for (const Vec3& p : board_points) {
      const Vec3 pc = board_in_scene.apply(p);
      if (pc.z() <= 0.0) throw InvalidScenario("scenario: board behind the scene camera");
      PixelPoint px = project(s.scene_k, pc);
      px.u += gaussian(rng, s.noise.board_corner_px);
      px.v += gaussian(rng, s.noise.board_corner_px);
      if (!s.scene_k.contains(px.u, px.v)) throw InvalidScenario("scenario: board outside the scene image");
      f.board.push_back({p, px});
    }
    run.scene_frames_.push_back(std::move(f));
  }

  // Head motion phases.
  Sway sway;
  {
    std::mt19937_64 rng = stream(s.seed, kStreamPhase, 0);
    for (double& p : sway.phase) p = uniform(rng, 0.0, 2.0 * std::numbers::pi);
  }

  // Marker windows.
  const std::size_t n_head = head_frame_count(s);
  const auto per = static_cast<std::size_t>(s.markers.samples_per_marker);
  const std::size_t visits = (n_head + per - 1) / per;
  std::vector<int> presented;
  for (std::size_t pass = 0; presented.size() < visits; ++pass) {
    for (int m : marker_order(s, pass)) presented.push_back(m);
  }
  presented.resize(visits);
  const double size_px = s.markers.marker_size_m / s.screen_width_m * s.screen_width_px;
  for (std::size_t k = 0; k < visits; ++k) {
    TrialDefinition t;
    t.marker = presented[k];
    t.visit = static_cast<int>(k);
    const int row = t.marker / s.markers.cols, col = t.marker % s.markers.cols;
    t.screen_px = {(col + 0.5) * s.screen_width_px / s.markers.cols, (row + 0.5) * s.screen_height_px / s.markers.rows};
    t.centre = screen_point(s, t.screen_px);
    t.size_m = s.markers.marker_size_m;
    t.size_px = size_px;
    t.start = stamp(k * per, s.head_rate_hz);
    t.end = stamp(std::min((k + 1) * per, n_head), s.head_rate_hz);
    run.trials_.push_back(t);
  }

  // AR(1) gaze error, stationary with per-axis standard deviation gaze_deg.
  run.gaze_error_.resize(n_head);
  {
    std::mt19937_64 rng = stream(s.seed, kStreamGaze, 0);
    const double sigma = deg_to_rad(s.noise.gaze_deg), rho = s.noise.gaze_correlation;
    const double innovation = sigma * std::sqrt(1.0 - rho * rho);
    Eigen::Vector2d e(gaussian(rng, sigma), gaussian(rng, sigma));
    for (std::size_t i = 0; i < n_head; ++i) {
      if (i > 0) e = rho * e + Eigen::Vector2d(gaussian(rng, innovation), gaussian(rng, innovation));
      run.gaze_error_[i] = e;
    }
  }

  // Head frames and truth.
  const auto inside = [](const std::vector<TimeWindow>& ws, double t) {
    return std::any_of(ws.begin(), ws.end(), [t](const TimeWindow& w) { return w.contains(t); });
  };
  const Vec3 screen_centre = s.screen_centre;
  run.head_frames_.reserve(n_head);
  run.truth_.reserve(n_head);
  for (std::size_t i = 0; i < n_head; ++i) {
    const Timestamp ts = stamp(i, s.head_rate_hz);
    const double t = to_seconds(ts);
    TruthFrame f;
    f.sequence = i;
    f.timestamp = ts;
    f.head_in_scene = head_in_scene_at(s, sway, t);
    f.head_pose = compose(scene_to_head_camera, f.head_in_scene);
    const Vec3 head_cam_pos = f.head_pose.translation();
    if (head_cam_pos.z() <= 0.0) throw InvalidScenario("scenario: head behind the head camera");

    const std::size_t k = i / per, j = i % per;
    const Vec3 current = run.trials_[k].centre;
    Vec3 target = current;
    const auto lead_in = static_cast<std::size_t>(s.markers.lead_in_frames);
    const auto lead_out = static_cast<std::size_t>(s.markers.lead_out_frames);
    if (j < lead_in) {
      const Vec3 previous = k > 0 ? run.trials_[k - 1].centre : screen_centre;
      const double a = static_cast<double>(j + 1) / static_cast<double>(lead_in + 1);
      target = previous + a * (current - previous);
    } else if (j >= per - lead_out && k + 1 < visits) {
      const Vec3 next = run.trials_[k + 1].centre;
      const double a = 0.5 * static_cast<double>(j - (per - lead_out) + 1) / static_cast<double>(lead_out + 1);
      target = current + a * (next - current);
    }
    f.target = target;
    f.trial = static_cast<int>(k);
    const Vec3 origin = f.head_in_scene.translation();
    f.gaze_scene = UnitVec3(target - origin);
    f.gaze_head = UnitVec3(f.head_in_scene.rotation().inverse() * f.gaze_scene.vec());
    f.intersection = cast_planes(run.planes_, origin, f.gaze_scene.vec());
    f.blink = inside(s.blinks, t);
    f.occluded = inside(s.occlusions, t);
    run.truth_.push_back(f);
    run.head_frames_.push_back(HeadFrame{i, ts, i});
  }
  return run;
}

namespace {

class OracleBase {
 public:
  explicit OracleBase(std::shared_ptr<const SyntheticRun> run) : run_(std::move(run)) {}

 protected:
  const TruthFrame& truth(const HeadFrame& frame) const {
    if (frame.image_handle >= run_->truth().size()) throw PluginError("oracle: image handle out of range");
    return run_->truth()[frame.image_handle];
  }

  std::array<PixelPoint, kLandmarkCount> true_landmarks(const TruthFrame& f) const {
    std::array<PixelPoint, kLandmarkCount> px;
    for (std::size_t i = 0; i < kLandmarkCount; ++i) {
      px[i] = project(run_->scenario().head_k, f.head_pose.apply(run_->head_model().points[i]));
    }
    return px;
  }

  bool noiseless() const {
    const NoiseModel& n = run_->scenario().noise;
    return n.landmark_px == 0.0 && n.gaze_deg == 0.0 && n.confidence_floor == 1.0;
  }

  std::shared_ptr<const SyntheticRun> run_;
};

class OracleFaceDetector : public FaceDetector, OracleBase {
 public:
  using OracleBase::OracleBase;

  std::optional<FaceDetection> detect(const HeadFrame& frame) override {
    const TruthFrame& f = truth(frame);
    const CameraIntrinsics& k = run_->scenario().head_k;
    const auto px = true_landmarks(f);
    double u0 = px[0].u, u1 = u0, v0 = px[0].v, v1 = v0;
    bool any = false;
    for (const auto& p : px) {
      u0 = std::min(u0, p.u);
      u1 = std::max(u1, p.u);
      v0 = std::min(v0, p.v);
      v1 = std::max(v1, p.v);
      any = any || k.contains(p.u, p.v);
    }
    if (!any) return std::nullopt;
    std::mt19937_64 rng = stream(run_->scenario().seed, kStreamFace, frame.sequence);
    FaceDetection d;
    d.box = {u0, v0, u1 - u0, v1 - v0};
    const double floor = run_->scenario().noise.confidence_floor;
    if (f.occluded) {
      d.confidence = uniform(rng, 0.0, 0.5);
    } else {
      d.confidence = floor >= 1.0 ? 1.0 : uniform(rng, floor, 1.0);
    }
    return d;
  }
};

class OracleLandmarkEstimator : public LandmarkEstimator, OracleBase {
 public:
  using OracleBase::OracleBase;

  LandmarkSet estimate(const HeadFrame& frame, const FaceDetection&) override {
    const TruthFrame& f = truth(frame);
    std::mt19937_64 rng = stream(run_->scenario().seed, kStreamLandmark, frame.sequence);
    const double sigma = run_->scenario().noise.landmark_px;
    LandmarkSet set;
    set.timestamp = frame.timestamp;
    set.points = true_landmarks(f);
    for (auto& p : set.points) {
      p.u += gaussian(rng, sigma);
      p.v += gaussian(rng, sigma);
    }
    return set;
  }
};

class OracleGazeRegressor : public GazeRegressor, OracleBase {
 public:
  using OracleBase::OracleBase;

  GazeEstimate regress(const HeadFrame& frame, const EyePatches&, const RigidTransform&) override {
    const TruthFrame& f = truth(frame);
    const Eigen::Vector2d yp = yaw_pitch(f.gaze_head.vec()) + run_->gaze_error(frame.image_handle);
    const UnitVec3 g(from_yaw_pitch(yp.x(), yp.y()));
    GazeEstimate e;
    e.eyes = {g, g};
    e.valid = {true, true};
    return e;
  }
};

class OracleBlinkEstimator : public BlinkEstimator, OracleBase {
 public:
  using OracleBase::OracleBase;

  std::array<double, 2> estimate(const HeadFrame& frame, const EyePatches&) override {
    const TruthFrame& f = truth(frame);
    std::mt19937_64 rng = stream(run_->scenario().seed, kStreamBlink, frame.sequence);
    if (f.blink) return {uniform(rng, 0.9, 1.0), uniform(rng, 0.9, 1.0)};
    if (noiseless()) return {0.0, 0.0};
    return {uniform(rng, 0.0, 0.2), uniform(rng, 0.0, 0.2)};
  }
};

std::shared_ptr<const SyntheticRun> run_from(const PluginContext& context) {
  if (context.source_kind != "synthetic" || !context.source) {
    throw PluginError("oracle plugins need a synthetic run, got '" + context.source_kind + "'");
  }
  return std::static_pointer_cast<const SyntheticRun>(context.source);
}

}  // namespace

PluginSet oracle_plugins(std::shared_ptr<const SyntheticRun> run) {
  if (!run) throw PluginError("oracle: null run");
  PluginSet set;
  set.face_detector = std::make_shared<OracleFaceDetector>(run);
  set.landmark_estimator = std::make_shared<OracleLandmarkEstimator>(run);
  set.gaze_regressor = std::make_shared<OracleGazeRegressor>(run);
  set.blink_estimator = std::make_shared<OracleBlinkEstimator>(run);
  return set;
}

void register_oracle_plugins(PluginRegistry& registry) {
  registry.add_face_detector("oracle", [](const PluginContext& c) -> std::shared_ptr<FaceDetector> {
    return std::make_shared<OracleFaceDetector>(run_from(c));
  });
  registry.add_landmark_estimator("oracle", [](const PluginContext& c) -> std::shared_ptr<LandmarkEstimator> {
    return std::make_shared<OracleLandmarkEstimator>(run_from(c));
  });
  registry.add_gaze_regressor("oracle", [](const PluginContext& c) -> std::shared_ptr<GazeRegressor> {
    return std::make_shared<OracleGazeRegressor>(run_from(c));
  });
  registry.add_blink_estimator("oracle", [](const PluginContext& c) -> std::shared_ptr<BlinkEstimator> {
    return std::make_shared<OracleBlinkEstimator>(run_from(c));
  });
}

std::optional<HeadFrame> SyntheticHeadSource::next() {
  if (next_ >= run_->head_frames().size()) return std::nullopt;
  return run_->head_frames()[next_++];
}

std::optional<SceneFrame> SyntheticSceneSource::next() {
  if (next_ >= run_->scene_frames().size()) return std::nullopt;
  const std::size_t i = next_++;
  const SceneFrameSpec& spec = run_->scene_frames()[i];
  return SceneFrame{spec.sequence, spec.timestamp, std::make_shared<const PointCloud>(run_->cloud(i)), spec.board};
}

}  // namespace icugaze
