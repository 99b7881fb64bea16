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

#include "icugaze/transform_tree.hpp"

#include "icugaze/errors.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <string>

namespace icugaze {

namespace {

std::size_t idx(FrameId f) { return static_cast<std::size_t>(f); }

std::string edge_name(FrameId parent, FrameId child) {
  return std::string(to_string(parent)) + "->" + std::string(to_string(child));
}

}  // namespace

RigidTransform interpolate(const RigidTransform& a, const RigidTransform& b, double s) {
  return {Rotation::slerp(a.rotation(), b.rotation(), s),
          a.translation() + s * (b.translation() - a.translation()), a.parent(), a.child()};
}

TransformTree::TransformTree(TransformTreeOptions options) : options_(options) {
  if (options_.buffer_capacity == 0) throw std::invalid_argument("TransformTree: zero buffer capacity");
}

void TransformTree::check_new_edge(FrameId parent, FrameId child) const {
  if (parent == child) throw std::invalid_argument("TransformTree: self edge " + edge_name(parent, child));
  for (FrameId f : ancestors(parent)) {
    if (f == child) throw std::invalid_argument("TransformTree: cycle via " + edge_name(parent, child));
  }
}

void TransformTree::set_static(const RigidTransform& t) {
  std::unique_lock lock(mutex_);
  auto& slot = edges_[idx(t.child())];
  if (slot) {
    if (slot->dynamic || slot->parent != t.parent()) {
      throw std::invalid_argument("TransformTree: conflicting edge " + edge_name(t.parent(), t.child()));
    }
    slot->buffer.front() = {0, t};
    return;
  }
  check_new_edge(t.parent(), t.child());
  slot = Edge{t.parent(), false, {{0, t}}};
}

void TransformTree::insert(Timestamp stamp, const RigidTransform& t) {
  std::unique_lock lock(mutex_);
  auto& slot = edges_[idx(t.child())];
  if (!slot) {
    check_new_edge(t.parent(), t.child());
    slot = Edge{t.parent(), true, {}};
  } else if (!slot->dynamic || slot->parent != t.parent()) {
    throw std::invalid_argument("TransformTree: conflicting edge " + edge_name(t.parent(), t.child()));
  }
  if (!slot->buffer.empty() && stamp <= slot->buffer.back().stamp) {
    throw std::invalid_argument("TransformTree: non-increasing stamp on " + edge_name(t.parent(), t.child()));
  }
  slot->buffer.push_back({stamp, t});
  while (slot->buffer.size() > options_.buffer_capacity) slot->buffer.pop_front();
}

bool TransformTree::has_edge(FrameId parent, FrameId child) const {
  std::shared_lock lock(mutex_);
  const auto& slot = edges_[idx(child)];
  return slot && slot->parent == parent;
}

std::size_t TransformTree::buffer_size(FrameId child) const {
  std::shared_lock lock(mutex_);
  const auto& slot = edges_[idx(child)];
  return slot ? slot->buffer.size() : 0;
}

std::vector<FrameId> TransformTree::ancestors(FrameId f) const {
  std::vector<FrameId> out;
  for (auto cur = f;;) {
    const auto& slot = edges_[idx(cur)];
    if (!slot) break;
    cur = slot->parent;
    out.push_back(cur);
    if (out.size() > kFrameCount) break;
  }
  return out;
}

RigidTransform TransformTree::edge_at(FrameId child, Timestamp t) const {
  const Edge& e = *edges_[idx(child)];
  if (!e.dynamic) return e.buffer.front().transform;

  const auto& buf = e.buffer;
  const Timestamp tol = options_.extrapolation_tolerance;
  if (t < buf.front().stamp - tol || t > buf.back().stamp + tol) {
    throw Extrapolation("lookup: t=" + std::to_string(t) + " outside [" + std::to_string(buf.front().stamp) +
                        ", " + std::to_string(buf.back().stamp) + "] +/- tolerance on " +
                        edge_name(e.parent, child));
  }
  // Within tolerance outside the span the nearest endpoint is held.
  if (t <= buf.front().stamp) return buf.front().transform;
  if (t >= buf.back().stamp) return buf.back().transform;

  const auto hi = std::lower_bound(buf.begin(), buf.end(), t,
                                   [](const StampedTransform& s, Timestamp v) { return s.stamp < v; });
  if (hi->stamp == t) return hi->transform;
  const auto lo = std::prev(hi);
  const double s = static_cast<double>(t - lo->stamp) / static_cast<double>(hi->stamp - lo->stamp);
  return interpolate(lo->transform, hi->transform, s);
}

RigidTransform TransformTree::chain_to(FrameId frame, FrameId ancestor, Timestamp t) const {
  RigidTransform acc = RigidTransform::identity(frame, frame);
  for (FrameId cur = frame; cur != ancestor;) {
    const RigidTransform e = edge_at(cur, t);
    acc = compose(e, acc);
    cur = e.parent();
  }
  return acc;
}

RigidTransform TransformTree::lookup(FrameId from, FrameId to, Timestamp t) const {
  std::shared_lock lock(mutex_);
  if (from == to) return RigidTransform::identity(from, to);

  std::vector<FrameId> up_from = ancestors(from);
  up_from.insert(up_from.begin(), from);
  std::vector<FrameId> up_to = ancestors(to);
  up_to.insert(up_to.begin(), to);

  const auto common = std::find_first_of(up_to.begin(), up_to.end(), up_from.begin(), up_from.end());
  if (common == up_to.end()) {
    throw NoPath("lookup: no path " + std::string(to_string(from)) + " -> " + std::string(to_string(to)));
  }
  const FrameId root = *common;
  // root <- from and root <- to; result maps `to` into `from`.
  const RigidTransform root_from = chain_to(from, root, t);
  const RigidTransform root_to = chain_to(to, root, t);
  return compose(invert(root_from), root_to);
}

}  // namespace icugaze
