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

#include "icugaze/pnp.hpp"

#include "icugaze/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace icugaze {

namespace {

using Mat3 = Eigen::Matrix3d;
using Vec2 = Eigen::Vector2d;

constexpr double kCollinearRatio = 1e-6;
constexpr double kPlanarRatio = 1e-3;

struct RawPose {
  Mat3 r = Mat3::Identity();
  Vec3 t = Vec3::Zero();
};

// Least-squares rigid alignment b ~ R a + t.
RawPose align(std::span<const Vec3> a, std::span<const Vec3> b) {
  const auto n = static_cast<double>(a.size());
  Vec3 ca = Vec3::Zero(), cb = Vec3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) {
    ca += a[i];
    cb += b[i];
  }
  ca /= n;
  cb /= n;
  Mat3 h = Mat3::Zero();
  for (std::size_t i = 0; i < a.size(); ++i) h += (a[i] - ca) * (b[i] - cb).transpose();
  Eigen::JacobiSVD<Mat3> svd(h, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 d = Mat3::Identity();
  d(2, 2) = (svd.matrixV() * svd.matrixU().transpose()).determinant() > 0 ? 1.0 : -1.0;
  RawPose p;
  p.r = svd.matrixV() * d * svd.matrixU().transpose();
  p.t = cb - p.r * ca;
  return p;
}

double normalized_error(const RawPose& p, std::span<const Vec3> obj, std::span<const Vec2> img) {
  double sum = 0.0;
  for (std::size_t i = 0; i < obj.size(); ++i) {
    const Vec3 c = p.r * obj[i] + p.t;
    if (!(c.z() > 0.0)) return std::numeric_limits<double>::infinity();
    sum += (c.head<2>() / c.z() - img[i]).norm();
  }
  return sum / static_cast<double>(obj.size());
}

// --- control-point closed form (general, non-planar point sets) -----------

using Vec10 = Eigen::Matrix<double, 10, 1>;

Vec10 beta_products(const Eigen::Vector4d& b) {
  Vec10 v;
  v << b[0] * b[0], b[0] * b[1], b[1] * b[1], b[0] * b[2], b[1] * b[2], b[2] * b[2], b[0] * b[3],
      b[1] * b[3], b[2] * b[3], b[3] * b[3];
  return v;
}

void refine_betas(const Eigen::Matrix<double, 6, 10>& l, const Eigen::Matrix<double, 6, 1>& rho,
                  Eigen::Vector4d& b) {
  for (int iter = 0; iter < 5; ++iter) {
    Eigen::Matrix<double, 6, 4> j;
    Eigen::Matrix<double, 6, 1> r;
    for (int k = 0; k < 6; ++k) {
      const auto row = l.row(k);
      j(k, 0) = 2 * b[0] * row[0] + b[1] * row[1] + b[2] * row[3] + b[3] * row[6];
      j(k, 1) = b[0] * row[1] + 2 * b[1] * row[2] + b[2] * row[4] + b[3] * row[7];
      j(k, 2) = b[0] * row[3] + b[1] * row[4] + 2 * b[2] * row[5] + b[3] * row[8];
      j(k, 3) = b[0] * row[6] + b[1] * row[7] + b[2] * row[8] + 2 * b[3] * row[9];
      r[k] = row.dot(beta_products(b)) - rho[k];
    }
    const Eigen::Vector4d delta = j.colPivHouseholderQr().solve(-r);
    if (!delta.allFinite()) break;
    b += delta;
  }
}

RawPose closed_form_general(std::span<const Vec3> obj, std::span<const Vec2> img, const Vec3& centroid,
                            const Eigen::SelfAdjointEigenSolver<Mat3>& pca) {
  const std::size_t n = obj.size();
  std::array<Vec3, 4> ctrl;
  ctrl[0] = centroid;
  for (int i = 0; i < 3; ++i) {
    const double lambda = std::max(pca.eigenvalues()[2 - i], 0.0);
    ctrl[i + 1] = centroid + std::sqrt(lambda / static_cast<double>(n)) * pca.eigenvectors().col(2 - i);
  }
  Mat3 basis;
  for (int i = 0; i < 3; ++i) basis.col(i) = ctrl[i + 1] - ctrl[0];
  const Mat3 basis_inv = basis.inverse();

  std::vector<Eigen::Vector4d> alphas(n);
  Eigen::MatrixXd m(2 * n, 12);
  m.setZero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 a = basis_inv * (obj[i] - ctrl[0]);
    alphas[i] << 1.0 - a.sum(), a.x(), a.y(), a.z();
    for (int j = 0; j < 4; ++j) {
      const double aj = alphas[i][j];
      m(2 * i, 3 * j) = aj;
      m(2 * i, 3 * j + 2) = -aj * img[i].x();
      m(2 * i + 1, 3 * j + 1) = aj;
      m(2 * i + 1, 3 * j + 2) = -aj * img[i].y();
    }
  }
  const Eigen::Matrix<double, 12, 12> mtm = m.transpose() * m;
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix<double, 12, 12>> eig(mtm);
  // Null-space candidates, smallest eigenvalue first.
  std::array<Eigen::Matrix<double, 12, 1>, 4> v;
  for (int k = 0; k < 4; ++k) v[k] = eig.eigenvectors().col(k);

  constexpr std::array<std::pair<int, int>, 6> kPairs = {{{0, 1}, {0, 2}, {0, 3}, {1, 2}, {1, 3}, {2, 3}}};
  Eigen::Matrix<double, 6, 10> l;
  Eigen::Matrix<double, 6, 1> rho;
  for (int p = 0; p < 6; ++p) {
    const auto [a, b] = kPairs[p];
    std::array<Vec3, 4> dv;
    for (int k = 0; k < 4; ++k) dv[k] = v[k].segment<3>(3 * a) - v[k].segment<3>(3 * b);
    l.row(p) << dv[0].dot(dv[0]), 2 * dv[0].dot(dv[1]), dv[1].dot(dv[1]), 2 * dv[0].dot(dv[2]),
        2 * dv[1].dot(dv[2]), dv[2].dot(dv[2]), 2 * dv[0].dot(dv[3]), 2 * dv[1].dot(dv[3]),
        2 * dv[2].dot(dv[3]), dv[3].dot(dv[3]);
    rho[p] = (ctrl[a] - ctrl[b]).squaredNorm();
  }

  std::array<Eigen::Vector4d, 3> candidates;
  {
    Eigen::Matrix<double, 6, 4> l4;
    l4 << l.col(0), l.col(1), l.col(3), l.col(6);
    const Eigen::Vector4d s = l4.colPivHouseholderQr().solve(rho);
    Eigen::Vector4d b;
    if (s[0] < 0) {
      b[0] = std::sqrt(-s[0]);
      b.tail<3>() = -s.tail<3>() / b[0];
    } else {
      b[0] = std::sqrt(s[0]);
      b.tail<3>() = s.tail<3>() / (b[0] > 0 ? b[0] : 1.0);
    }
    candidates[0] = b;
  }
  {
    Eigen::Matrix<double, 6, 3> l3 = l.leftCols<3>();
    const Eigen::Vector3d s = l3.colPivHouseholderQr().solve(rho);
    Eigen::Vector4d b = Eigen::Vector4d::Zero();
    if (s[0] < 0) {
      b[0] = std::sqrt(-s[0]);
      b[1] = s[2] < 0 ? std::sqrt(-s[2]) : 0.0;
    } else {
      b[0] = std::sqrt(s[0]);
      b[1] = s[2] > 0 ? std::sqrt(s[2]) : 0.0;
    }
    if (s[1] < 0) b[0] = -b[0];
    candidates[1] = b;
  }
  {
    Eigen::Matrix<double, 6, 5> l5 = l.leftCols<5>();
    const Eigen::Matrix<double, 5, 1> s = l5.colPivHouseholderQr().solve(rho);
    Eigen::Vector4d b = Eigen::Vector4d::Zero();
    if (s[0] < 0) {
      b[0] = std::sqrt(-s[0]);
      b[1] = s[2] < 0 ? std::sqrt(-s[2]) : 0.0;
    } else {
      b[0] = std::sqrt(s[0]);
      b[1] = s[2] > 0 ? std::sqrt(s[2]) : 0.0;
    }
    if (s[1] < 0) b[0] = -b[0];
    b[2] = b[0] != 0.0 ? s[3] / b[0] : 0.0;
    candidates[2] = b;
  }

  RawPose best;
  double best_err = std::numeric_limits<double>::infinity();
  std::vector<Vec3> cam(n);
  for (auto& b : candidates) {
    if (!b.allFinite()) continue;
    refine_betas(l, rho, b);
    if (!b.allFinite()) continue;
    std::array<Vec3, 4> ctrl_cam;
    for (int j = 0; j < 4; ++j) {
      ctrl_cam[j] = Vec3::Zero();
      for (int k = 0; k < 4; ++k) ctrl_cam[j] += b[k] * v[k].segment<3>(3 * j);
    }
    double mean_z = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cam[i] = Vec3::Zero();
      for (int j = 0; j < 4; ++j) cam[i] += alphas[i][j] * ctrl_cam[j];
      mean_z += cam[i].z();
    }
    if (mean_z < 0) {
      for (auto& c : cam) c = -c;
    }
    const RawPose p = align(obj, cam);
    const double err = normalized_error(p, obj, img);
    if (err < best_err) {
      best_err = err;
      best = p;
    }
  }
  if (!std::isfinite(best_err)) throw NoConvergence("pnp: closed form produced no valid pose");
  return best;
}

// --- homography closed form (planar point sets) ---------------------------

RawPose closed_form_planar(std::span<const Vec3> obj, std::span<const Vec2> img, const Vec3& centroid,
                           const Eigen::SelfAdjointEigenSolver<Mat3>& pca) {
  const std::size_t n = obj.size();
  Mat3 e;
  e.col(0) = pca.eigenvectors().col(2);
  e.col(1) = pca.eigenvectors().col(1);
  e.col(2) = e.col(0).cross(e.col(1));

  // Hartley normalization of both point sets.
  std::vector<Vec2> plane(n);
  Vec2 pm = Vec2::Zero(), im = Vec2::Zero();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3 q = e.transpose() * (obj[i] - centroid);
    plane[i] = q.head<2>();
    pm += plane[i];
    im += img[i];
  }
  pm /= static_cast<double>(n);
  im /= static_cast<double>(n);
  double ps = 0.0, is = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    ps += (plane[i] - pm).norm();
    is += (img[i] - im).norm();
  }
  ps = std::sqrt(2.0) * static_cast<double>(n) / ps;
  is = std::sqrt(2.0) * static_cast<double>(n) / is;
  if (!std::isfinite(ps) || !std::isfinite(is)) throw Degenerate("pnp: coincident points");
  Mat3 tp, ti;
  tp << ps, 0, -ps * pm.x(), 0, ps, -ps * pm.y(), 0, 0, 1;
  ti << is, 0, -is * im.x(), 0, is, -is * im.y(), 0, 0, 1;

  Eigen::MatrixXd a(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Vec2 x = ps * (plane[i] - pm);
    const Vec2 y = is * (img[i] - im);
    a.row(2 * i) << x.x(), x.y(), 1, 0, 0, 0, -y.x() * x.x(), -y.x() * x.y(), -y.x();
    a.row(2 * i + 1) << 0, 0, 0, x.x(), x.y(), 1, -y.y() * x.x(), -y.y() * x.y(), -y.y();
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (sv.size() >= 8 && sv[7] < 1e-12 * sv[0]) throw Degenerate("pnp: ill-conditioned planar configuration");
  const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
  Mat3 hn;
  hn << h[0], h[1], h[2], h[3], h[4], h[5], h[6], h[7], h[8];
  Mat3 hm = ti.inverse() * hn * tp;

  double scale = 2.0 / (hm.col(0).norm() + hm.col(1).norm());
  if (hm(2, 2) * scale < 0) scale = -scale;
  hm *= scale;

  Mat3 approx;
  approx.col(0) = hm.col(0);
  approx.col(1) = hm.col(1);
  approx.col(2) = hm.col(0).cross(hm.col(1));
  Eigen::JacobiSVD<Mat3> polar(approx, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Mat3 rp = polar.matrixU() * polar.matrixV().transpose();
  if (rp.determinant() < 0) {
    Mat3 d = Mat3::Identity();
    d(2, 2) = -1;
    rp = polar.matrixU() * d * polar.matrixV().transpose();
  }
  RawPose p;
  p.r = rp * e.transpose();
  p.t = hm.col(2) - p.r * centroid;
  return p;
}

RawPose closed_form(std::span<const Vec3> obj, std::span<const Vec2> img) {
  const std::size_t n = obj.size();
  if (n < 4) throw Degenerate("pnp: need at least 4 correspondences, got " + std::to_string(n));
  Vec3 centroid = Vec3::Zero();
  for (const auto& p : obj) centroid += p;
  centroid /= static_cast<double>(n);
  Mat3 cov = Mat3::Zero();
  for (const auto& p : obj) cov += (p - centroid) * (p - centroid).transpose();
  const Eigen::SelfAdjointEigenSolver<Mat3> pca(cov);
  const Vec3 ev = pca.eigenvalues().cwiseMax(0.0).cwiseSqrt();  // ascending singular values
  if (!(ev[2] > 0.0) || ev[1] < kCollinearRatio * ev[2]) throw Degenerate("pnp: collinear object points");

  Vec2 im = Vec2::Zero();
  for (const auto& q : img) im += q;
  im /= static_cast<double>(n);
  double spread = 0.0;
  for (const auto& q : img) spread = std::max(spread, (q - im).norm());
  if (!(spread > 1e-12)) throw Degenerate("pnp: coincident image points");

  if (ev[0] < kPlanarRatio * ev[2]) return closed_form_planar(obj, img, centroid, pca);
  return closed_form_general(obj, img, centroid, pca);
}

// --- Levenberg-Marquardt refinement of pixel reprojection error -----------

double cost(const RawPose& p, std::span<const Vec3> obj, std::span<const PixelPoint> px,
            const CameraIntrinsics& k) {
  double sum = 0.0;
  for (std::size_t i = 0; i < obj.size(); ++i) {
    const Vec3 c = p.r * obj[i] + p.t;
    if (!(c.z() > 0.0)) return std::numeric_limits<double>::infinity();
    const double du = k.fx * c.x() / c.z() + k.cx - px[i].u;
    const double dv = k.fy * c.y() / c.z() + k.cy - px[i].v;
    sum += du * du + dv * dv;
  }
  return sum;
}

RawPose refine(RawPose p, std::span<const Vec3> obj, std::span<const PixelPoint> px, const CameraIntrinsics& k,
               const RefineOptions& opt) {
  double current = cost(p, obj, px, k);
  if (!std::isfinite(current)) return p;
  double lambda = 1e-3;
  for (int iter = 0; iter < opt.max_iterations; ++iter) {
    Eigen::Matrix<double, 6, 6> jtj = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> jtr = Eigen::Matrix<double, 6, 1>::Zero();
    for (std::size_t i = 0; i < obj.size(); ++i) {
      const Vec3 q = p.r * obj[i];
      const Vec3 c = q + p.t;
      const double iz = 1.0 / c.z();
      const double r0 = k.fx * c.x() * iz + k.cx - px[i].u;
      const double r1 = k.fy * c.y() * iz + k.cy - px[i].v;
      Eigen::Matrix<double, 2, 3> dproj;
      dproj << k.fx * iz, 0, -k.fx * c.x() * iz * iz, 0, k.fy * iz, -k.fy * c.y() * iz * iz;
      Mat3 skew;
      skew << 0, -q.z(), q.y(), q.z(), 0, -q.x(), -q.y(), q.x(), 0;
      Eigen::Matrix<double, 2, 6> j;
      j.leftCols<3>() = -dproj * skew;  // left-multiplied rotation increment
      j.rightCols<3>() = dproj;
      jtj += j.transpose() * j;
      jtr += j.transpose() * Eigen::Vector2d(r0, r1);
    }
    bool accepted = false;
    Eigen::Matrix<double, 6, 1> delta;
    for (int attempt = 0; attempt < 10 && !accepted; ++attempt) {
      Eigen::Matrix<double, 6, 6> a = jtj;
      a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
      delta = a.ldlt().solve(-jtr);
      if (!delta.allFinite()) break;
      RawPose next;
      next.r = Eigen::AngleAxisd(delta.head<3>().norm(),
                                 delta.head<3>().norm() > 0 ? Vec3(delta.head<3>().normalized()) : Vec3::UnitX())
                   .toRotationMatrix() *
               p.r;
      next.t = p.t + delta.tail<3>();
      const double c = cost(next, obj, px, k);
      if (c <= current) {
        p = next;
        current = c;
        lambda = std::max(lambda * 0.1, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted || delta.norm() < opt.step_tolerance) break;
  }
  return p;
}

RigidTransform to_transform(const RawPose& p, FrameId parent, FrameId child) {
  return {Rotation(Mat3(p.r)), p.t, parent, child};
}

std::vector<Vec2> normalized(std::span<const PixelPoint> px, const CameraIntrinsics& k) {
  std::vector<Vec2> out(px.size());
  for (std::size_t i = 0; i < px.size(); ++i) out[i] = normalize(k, px[i]);
  return out;
}

double mean_error(const RigidTransform& pose, std::span<const Vec3> obj, std::span<const PixelPoint> px,
                  const CameraIntrinsics& k) {
  double sum = 0.0;
  for (std::size_t i = 0; i < obj.size(); ++i) sum += reprojection_error(pose, obj[i], px[i], k);
  return obj.empty() ? 0.0 : sum / static_cast<double>(obj.size());
}

struct Gathered {
  std::vector<Vec3> obj;
  std::vector<PixelPoint> px;
};

Gathered gather(const std::array<Vec3, kLandmarkCount>& model, const LandmarkSet& obs,
                std::span<const std::size_t> subset) {
  Gathered g;
  g.obj.reserve(subset.size());
  g.px.reserve(subset.size());
  for (std::size_t i : subset) {
    if (i >= kLandmarkCount) throw std::out_of_range("pnp: landmark index out of range");
    g.obj.push_back(model[i]);
    g.px.push_back(obs.points[i]);
  }
  return g;
}

}  // namespace

double reprojection_error(const RigidTransform& pose, const Vec3& object, const PixelPoint& image,
                          const CameraIntrinsics& k) {
  const Vec3 c = pose.apply(object);
  if (!(c.z() > 0.0)) return std::numeric_limits<double>::infinity();
  const double du = k.fx * c.x() / c.z() + k.cx - image.u;
  const double dv = k.fy * c.y() / c.z() + k.cy - image.v;
  return std::hypot(du, dv);
}

PoseEstimate solve_pnp(std::span<const Vec3> object, std::span<const PixelPoint> image,
                       const CameraIntrinsics& k, FrameId camera_frame, FrameId model_frame,
                       const RefineOptions& refine_options) {
  if (object.size() != image.size()) throw std::invalid_argument("pnp: size mismatch");
  const std::vector<Vec2> img = normalized(image, k);
  RawPose p = closed_form(object, img);
  p = refine(p, object, image, k, refine_options);
  if (!p.r.allFinite() || !p.t.allFinite()) throw NoConvergence("pnp: non-finite pose");
  const double c = cost(p, object, image, k);
  if (!std::isfinite(c)) throw NoConvergence("pnp: points behind the camera");

  PoseEstimate est{to_transform(p, camera_frame, model_frame), {}, 0.0};
  est.inliers.resize(object.size());
  std::iota(est.inliers.begin(), est.inliers.end(), std::size_t{0});
  est.mean_reprojection_error = mean_error(est.pose, object, image, k);
  return est;
}

PoseEstimate solve_pnp_dls(const std::array<Vec3, kLandmarkCount>& model, const LandmarkSet& obs,
                           const CameraIntrinsics& k, std::span<const std::size_t> subset) {
  if (subset.size() < 4) throw Degenerate("pnp: subset of " + std::to_string(subset.size()) + " < 4 points");
  const Gathered g = gather(model, obs, subset);
  PoseEstimate est = solve_pnp(g.obj, g.px, k, FrameId::head_camera, FrameId::head);
  est.inliers.assign(subset.begin(), subset.end());
  return est;
}

PoseEstimate solve_pnp_ransac(const std::array<Vec3, kLandmarkCount>& model, const LandmarkSet& obs,
                              const CameraIntrinsics& k, const RansacParams& params) {
  if (params.sample_size < 4) throw std::invalid_argument("ransac: sample_size < 4");
  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < kLandmarkCount; ++i) {
    if (!obs.out_of_frame[i]) eligible.push_back(i);
  }
  if (eligible.size() < params.sample_size || eligible.size() < params.min_inliers) {
    throw ConsensusFailure("ransac: only " + std::to_string(eligible.size()) + " in-frame landmarks");
  }

  const auto inliers_of = [&](const RigidTransform& pose) {
    std::vector<std::size_t> in;
    for (std::size_t i : eligible) {
      if (reprojection_error(pose, model[i], obs.points[i], k) <= params.reproj_threshold_px) in.push_back(i);
    }
    return in;
  };

  std::mt19937_64 rng(params.seed);
  std::vector<std::size_t> pool = eligible;
  std::vector<std::size_t> best_inliers;
  const RefineOptions local{10, 1e-8};
  int max_iter = params.iterations;

  for (int iter = 0; iter < max_iter; ++iter) {
    // Partial Fisher-Yates draw without replacement.
    for (std::size_t j = 0; j < params.sample_size; ++j) {
      std::uniform_int_distribution<std::size_t> pick(j, pool.size() - 1);
      std::swap(pool[j], pool[pick(rng)]);
    }
    const std::span<const std::size_t> sample(pool.data(), params.sample_size);
    std::vector<std::size_t> in;
    try {
      const Gathered g = gather(model, obs, sample);
      const std::vector<Vec2> img = normalized(g.px, k);
      const RawPose p = closed_form(g.obj, img);
      in = inliers_of(to_transform(p, FrameId::head_camera, FrameId::head));
    } catch (const Degenerate&) {
      continue;
    } catch (const NoConvergence&) {
      continue;
    }
    if (in.size() <= best_inliers.size() || in.size() < 4) continue;

    // Local optimization of the new best hypothesis.
    for (int lo = 0; lo < 2; ++lo) {
      try {
        const Gathered g = gather(model, obs, in);
        const PoseEstimate est = solve_pnp(g.obj, g.px, k, FrameId::head_camera, FrameId::head, local);
        auto refined = inliers_of(est.pose);
        if (refined.size() <= in.size()) break;
        in = std::move(refined);
      } catch (const Error&) {
        break;
      }
    }
    best_inliers = std::move(in);

    const double ratio = static_cast<double>(best_inliers.size()) / static_cast<double>(eligible.size());
    const double p_good = std::pow(ratio, static_cast<double>(params.sample_size));
    if (p_good >= 1.0) {
      max_iter = std::min(max_iter, iter + 1);
    } else if (p_good > 0.0) {
      const double needed = std::log(1.0 - params.confidence) / std::log(1.0 - p_good);
      if (std::isfinite(needed)) max_iter = std::min(max_iter, static_cast<int>(std::ceil(needed)));
    }
  }

  if (best_inliers.size() < params.min_inliers) {
    throw ConsensusFailure("ransac: best consensus " + std::to_string(best_inliers.size()) + " < " +
                           std::to_string(params.min_inliers));
  }

  // Final direct least squares over the consensus set, then re-score.
  PoseEstimate est = solve_pnp_dls(model, obs, k, best_inliers);
  for (int round = 0; round < 3; ++round) {
    std::vector<std::size_t> in = inliers_of(est.pose);
    if (in == est.inliers) break;
    if (in.size() < params.min_inliers) {
      throw ConsensusFailure("ransac: refined consensus " + std::to_string(in.size()) + " < " +
                             std::to_string(params.min_inliers));
    }
    est = solve_pnp_dls(model, obs, k, in);
  }
  // Report over the set that is actually within threshold of the final pose.
  std::vector<std::size_t> final_in = inliers_of(est.pose);
  if (final_in.size() < params.min_inliers) {
    throw ConsensusFailure("ransac: final consensus " + std::to_string(final_in.size()) + " < " +
                           std::to_string(params.min_inliers));
  }
  double sum = 0.0;
  for (std::size_t i : final_in) sum += reprojection_error(est.pose, model[i], obs.points[i], k);
  est.mean_reprojection_error = sum / static_cast<double>(final_in.size());
  est.inliers = std::move(final_in);
  return est;
}

PoseEstimate estimate_board_pose(std::span<const Correspondence> corr, const CameraIntrinsics& k) {
  if (corr.size() < 4) throw Degenerate("board pose: need at least 4 correspondences");
  std::vector<Vec3> obj(corr.size());
  std::vector<PixelPoint> px(corr.size());
  for (std::size_t i = 0; i < corr.size(); ++i) {
    obj[i] = corr[i].object;
    px[i] = corr[i].image;
  }
  return solve_pnp(obj, px, k, FrameId::scene_camera, FrameId::board);
}

}  // namespace icugaze
