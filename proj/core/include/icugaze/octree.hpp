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

#include "icugaze/camera.hpp"
#include "icugaze/geometry.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace icugaze {

struct PointCloud {
  std::vector<Vec3> points;  // metres, scene-camera frame
  Timestamp timestamp = 0;
};

struct Aabb {
  Vec3 min = Vec3::Zero();
  Vec3 max = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= min.array()).all() && (p.array() <= max.array()).all();
  }
};

struct RayHit {
  Vec3 point;
  std::size_t index = 0;
  double distance_along_ray = 0.0;
};

struct OctreeOptions {
  int max_depth = 10;
  std::size_t leaf_capacity = 32;
};

struct QueryStats {
  std::size_t nodes_visited = 0;
  std::size_t points_tested = 0;
};

constexpr double kDefaultHitRadius = 0.02;

// Hit criterion shared by every query path: among points with along-ray
// parameter t = (p - o).d >= 0 and perpendicular distance |(p - o) x d| <=
// hit_radius, the smallest t wins; equal t resolves to the lower index.
//
// The tree is immutable after build and safe to query concurrently.
class Octree {
 public:
  struct Node {
    Aabb box;
    std::int32_t first_child = -1;  // eight consecutive nodes, or -1 for a leaf
    std::uint32_t begin = 0;        // range into the point-order array
    std::uint32_t end = 0;
    std::uint8_t depth = 0;

    bool is_leaf() const { return first_child < 0; }
    std::size_t size() const { return end - begin; }
  };

  static Octree build(const PointCloud& cloud, const OctreeOptions& options = {});

  std::optional<RayHit> intersect(const Ray& ray, double hit_radius, QueryStats* stats = nullptr) const;

  const std::vector<Node>& nodes() const { return nodes_; }
  // Original cloud indices in leaf order; node [begin, end) ranges index it.
  const std::vector<std::uint32_t>& point_order() const { return order_; }
  std::size_t point_count() const { return points_.size(); }
  const OctreeOptions& options() const { return options_; }
  Timestamp timestamp() const { return timestamp_; }

  // Nodes whose box, inflated by hit_radius, meets the ray's t >= 0 half-line.
  std::size_t count_nodes_touching(const Ray& ray, double hit_radius) const;

  std::uint64_t structural_hash() const;

 private:
  void split(std::size_t node_index);

  OctreeOptions options_;
  Timestamp timestamp_ = 0;
  std::vector<Node> nodes_;
  std::vector<std::uint32_t> order_;
  std::vector<Vec3> points_;  // leaf order, parallel to order_
};

inline Octree build_octree(const PointCloud& cloud, const OctreeOptions& options = {}) {
  return Octree::build(cloud, options);
}

inline std::optional<RayHit> intersect_ray(const Octree& tree, const Ray& ray, double hit_radius,
                                           QueryStats* stats = nullptr) {
  return tree.intersect(ray, hit_radius, stats);
}

// Linear scan with the same contract as intersect_ray; the testing oracle.
std::optional<RayHit> brute_force_intersect(const PointCloud& cloud, const Ray& ray, double hit_radius);

}  // namespace icugaze
