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

#include "icugaze/geometry.hpp"

#include <array>
#include <deque>
#include <optional>
#include <shared_mutex>
#include <vector>

namespace icugaze {

struct StampedTransform {
  Timestamp stamp;
  RigidTransform transform;
};

struct TransformTreeOptions {
  std::size_t buffer_capacity = 512;
  Timestamp extrapolation_tolerance = 50 * kNanosPerMilli;
};

// Frame graph where each frame has at most one parent edge. Static edges hold
// a single transform valid at all times; dynamic edges hold a bounded,
// strictly time-ordered buffer and are interpolated on lookup (slerp for
// rotation, lerp for translation).
//
// Safe for one writer concurrently with many readers: every public method
// takes the internal lock, so a lookup sees a consistent snapshot.
class TransformTree {
 public:
  explicit TransformTree(TransformTreeOptions options = {});

  TransformTree(const TransformTree&) = delete;
  TransformTree& operator=(const TransformTree&) = delete;

  // Throws std::invalid_argument if the edge would create a cycle, reparent a
  // frame, or change an edge's static/dynamic kind.
  void set_static(const RigidTransform& t);
  // Stamps must be strictly increasing per edge; the oldest stamp is evicted
  // once the buffer is full.
  void insert(Timestamp stamp, const RigidTransform& t);

  // Transform with parent = from and child = to, i.e. maps `to` coordinates
  // into `from` coordinates. Throws NoPath or Extrapolation.
  RigidTransform lookup(FrameId from, FrameId to, Timestamp t) const;

  bool has_edge(FrameId parent, FrameId child) const;
  std::size_t buffer_size(FrameId child) const;
  const TransformTreeOptions& options() const { return options_; }

 private:
  struct Edge {
    FrameId parent;
    bool dynamic = false;
    std::deque<StampedTransform> buffer;  // one entry for static edges
  };

  static constexpr std::size_t kFrameCount = 6;

  void check_new_edge(FrameId parent, FrameId child) const;
  RigidTransform edge_at(FrameId child, Timestamp t) const;
  // Transform from `frame` up to `ancestor` (parent = ancestor, child = frame).
  RigidTransform chain_to(FrameId frame, FrameId ancestor, Timestamp t) const;
  std::vector<FrameId> ancestors(FrameId f) const;

  TransformTreeOptions options_;
  mutable std::shared_mutex mutex_;
  std::array<std::optional<Edge>, kFrameCount> edges_;  // indexed by child
};

// Slerp rotation and lerp translation between two stamped transforms of the
// same edge; s in [0, 1].
RigidTransform interpolate(const RigidTransform& a, const RigidTransform& b, double s);

}  // namespace icugaze
