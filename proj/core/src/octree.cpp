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

#include "icugaze/octree.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace icugaze {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Slack on box inflation so rounding in the slab test never prunes a point
// that passes the exact per-point criterion.
constexpr double kBoxSlack = 1e-9;

struct Span {
  double enter;
  double exit;
};

// Parameter interval where the ray is inside `box` grown by `pad`,
// intersected with t >= 0. enter > exit means no overlap.
Span slab(const Aabb& box, double pad, const Vec3& o, const Vec3& d, const Vec3& inv) {
  double t0 = 0.0, t1 = kInf;
  for (int a = 0; a < 3; ++a) {
    const double lo = box.min[a] - pad;
    const double hi = box.max[a] + pad;
    if (d[a] == 0.0) {
      if (o[a] < lo || o[a] > hi) return {1.0, 0.0};
      continue;
    }
    double ta = (lo - o[a]) * inv[a];
    double tb = (hi - o[a]) * inv[a];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return {1.0, 0.0};
  }
  return {t0, t1};
}

void fnv(std::uint64_t& h, const void* data, std::size_t n) {
  const auto* b = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= b[i];
    h *= 0x100000001b3ULL;
  }
}

}  // namespace

Octree Octree::build(const PointCloud& cloud, const OctreeOptions& options) {
  if (options.max_depth < 0 || options.max_depth > 255) throw std::invalid_argument("octree: bad max_depth");
  if (options.leaf_capacity == 0) throw std::invalid_argument("octree: zero leaf capacity");
  if (cloud.points.size() > std::numeric_limits<std::uint32_t>::max()) {
    throw std::invalid_argument("octree: cloud too large");
  }
  Octree tree;
  tree.options_ = options;
  tree.timestamp_ = cloud.timestamp;
  const std::size_t n = cloud.points.size();
  tree.order_.resize(n);
  tree.points_ = cloud.points;
  for (std::size_t i = 0; i < n; ++i) tree.order_[i] = static_cast<std::uint32_t>(i);

  Node root;
  if (n > 0) {
    Vec3 lo = cloud.points.front(), hi = cloud.points.front();
    for (const auto& p : cloud.points) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    // Cubic root cell keeps children cubic.
    const Vec3 centre = 0.5 * (lo + hi);
    const double half = std::max(0.5 * (hi - lo).maxCoeff(), 1e-6);
    root.box = {centre - Vec3::Constant(half), centre + Vec3::Constant(half)};
  }
  root.end = static_cast<std::uint32_t>(n);
  tree.nodes_.reserve(1 + 8 * (n / options.leaf_capacity + 1));
  tree.nodes_.push_back(root);

  // Breadth-first so that the node array order is deterministic and children
  // of one parent are contiguous.
  for (std::size_t i = 0; i < tree.nodes_.size(); ++i) {
    const Node& node = tree.nodes_[i];
    if (node.size() > options.leaf_capacity && node.depth < options.max_depth) tree.split(i);
  }
  return tree;
}

void Octree::split(std::size_t node_index) {
  const Node parent = nodes_[node_index];
  const Vec3 c = 0.5 * (parent.box.min + parent.box.max);

  const auto octant = [&c](const Vec3& p) {
    return (p.x() >= c.x() ? 1 : 0) | (p.y() >= c.y() ? 2 : 0) | (p.z() >= c.z() ? 4 : 0);
  };

  // Stable counting sort of the node's range into the eight octants.
  std::array<std::uint32_t, 9> offset{};
  for (std::uint32_t i = parent.begin; i < parent.end; ++i) ++offset[octant(points_[i]) + 1];
  for (int k = 0; k < 8; ++k) offset[k + 1] += offset[k];

  const std::size_t count = parent.size();
  std::vector<std::uint32_t> order(count);
  std::vector<Vec3> pts(count);
  std::array<std::uint32_t, 8> cursor;
  std::copy_n(offset.begin(), 8, cursor.begin());
  for (std::uint32_t i = parent.begin; i < parent.end; ++i) {
    const std::uint32_t slot = cursor[octant(points_[i])]++;
    order[slot] = order_[i];
    pts[slot] = points_[i];
  }
  std::copy(order.begin(), order.end(), order_.begin() + parent.begin);
  std::copy(pts.begin(), pts.end(), points_.begin() + parent.begin);

  const auto first = static_cast<std::int32_t>(nodes_.size());
  for (int k = 0; k < 8; ++k) {
    Node child;
    for (int a = 0; a < 3; ++a) {
      const bool upper = (k >> a) & 1;
      child.box.min[a] = upper ? c[a] : parent.box.min[a];
      child.box.max[a] = upper ? parent.box.max[a] : c[a];
    }
    child.begin = parent.begin + offset[k];
    child.end = parent.begin + offset[k + 1];
    child.depth = static_cast<std::uint8_t>(parent.depth + 1);
    nodes_.push_back(child);
  }
  nodes_[node_index].first_child = first;
}

std::optional<RayHit> Octree::intersect(const Ray& ray, double hit_radius, QueryStats* stats) const {
  if (!(hit_radius > 0.0)) throw std::invalid_argument("intersect_ray: hit_radius must be positive");
  if (points_.empty()) return std::nullopt;

  const Vec3& o = ray.origin;
  const Vec3& d = ray.direction.vec();
  const Vec3 inv(1.0 / d.x(), 1.0 / d.y(), 1.0 / d.z());
  const double r2 = hit_radius * hit_radius;
  const double pad = hit_radius + kBoxSlack;

  double best_t = kInf;
  std::uint32_t best_index = std::numeric_limits<std::uint32_t>::max();
  std::uint32_t best_slot = 0;

  struct Entry {
    std::int32_t node;
    double enter;
  };
  std::vector<Entry> stack;
  stack.reserve(64);
  {
    const Span s = slab(nodes_[0].box, pad, o, d, inv);
    if (s.enter > s.exit) return std::nullopt;
    stack.push_back({0, s.enter});
  }

  while (!stack.empty()) {
    const Entry e = stack.back();
    stack.pop_back();
    if (e.enter > best_t) continue;
    const Node& node = nodes_[e.node];
    if (stats) ++stats->nodes_visited;

    if (node.is_leaf()) {
      for (std::uint32_t i = node.begin; i < node.end; ++i) {
        const Vec3 v = points_[i] - o;
        const double t = v.dot(d);
        if (stats) ++stats->points_tested;
        if (t < 0.0 || t > best_t) continue;
        if (v.cross(d).squaredNorm() > r2) continue;
        if (t < best_t || order_[i] < best_index) {
          best_t = t;
          best_index = order_[i];
          best_slot = i;
        }
      }
      continue;
    }

    std::array<Entry, 8> children;
    int n = 0;
    for (int k = 0; k < 8; ++k) {
      const std::int32_t ci = node.first_child + k;
      const Node& child = nodes_[ci];
      if (child.size() == 0) continue;
      const Span s = slab(child.box, pad, o, d, inv);
      if (s.enter > s.exit || s.enter > best_t) continue;
      children[n++] = {ci, s.enter};
    }
    // Farthest first onto the stack so the nearest is expanded next.
    std::sort(children.begin(), children.begin() + n,
              [](const Entry& a, const Entry& b) { return a.enter > b.enter; });
    for (int k = 0; k < n; ++k) stack.push_back(children[k]);
  }

  if (best_index == std::numeric_limits<std::uint32_t>::max()) return std::nullopt;
  return RayHit{points_[best_slot], best_index, best_t};
}

std::size_t Octree::count_nodes_touching(const Ray& ray, double hit_radius) const {
  const Vec3& d = ray.direction.vec();
  const Vec3 inv(1.0 / d.x(), 1.0 / d.y(), 1.0 / d.z());
  std::size_t count = 0;
  for (const Node& node : nodes_) {
    const Span s = slab(node.box, hit_radius + kBoxSlack, ray.origin, d, inv);
    if (s.enter <= s.exit) ++count;
  }
  return count;
}

std::uint64_t Octree::structural_hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const Node& node : nodes_) {
    fnv(h, node.box.min.data(), sizeof(double) * 3);
    fnv(h, node.box.max.data(), sizeof(double) * 3);
    fnv(h, &node.first_child, sizeof node.first_child);
    fnv(h, &node.begin, sizeof node.begin);
    fnv(h, &node.end, sizeof node.end);
    fnv(h, &node.depth, sizeof node.depth);
  }
  fnv(h, order_.data(), order_.size() * sizeof(std::uint32_t));
  for (const Vec3& p : points_) fnv(h, p.data(), sizeof(double) * 3);
  return h;
}

std::optional<RayHit> brute_force_intersect(const PointCloud& cloud, const Ray& ray, double hit_radius) {
  if (!(hit_radius > 0.0)) throw std::invalid_argument("brute_force_intersect: hit_radius must be positive");
  const Vec3& o = ray.origin;
  const Vec3& d = ray.direction.vec();
  std::optional<RayHit> best;
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const Vec3 v = cloud.points[i] - o;
    const double t = v.dot(d);
    if (t < 0.0) continue;
    if (v.cross(d).squaredNorm() > hit_radius * hit_radius) continue;
    // Ascending scan: strict < keeps the lowest index on ties.
    if (!best || t < best->distance_along_ray) best = RayHit{cloud.points[i], i, t};
  }
  return best;
}

}  // namespace icugaze
