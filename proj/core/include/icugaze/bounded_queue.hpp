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

#include <condition_variable>
#include <deque>
#include <mutex>
#include <optional>

namespace icugaze {

enum class QueuePolicy {
  block,        // producers wait for space (offline replay)
  drop_oldest,  // the oldest queued item is evicted and returned (live input)
};

// Multi-producer multi-consumer FIFO with a fixed capacity. close() wakes
// every waiter; pop() then drains what is left and returns nullopt.
template <typename T>
class BoundedQueue {
 public:
  BoundedQueue(std::size_t capacity, QueuePolicy policy) : capacity_(capacity ? capacity : 1), policy_(policy) {}

  // Returns the evicted item under drop_oldest, nullopt otherwise. Pushing to
  // a closed queue is a no-op.
  std::optional<T> push(T item) {
    std::unique_lock lock(mutex_);
    std::optional<T> evicted;
    if (policy_ == QueuePolicy::block) {
      not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
    } else if (items_.size() >= capacity_) {
      evicted = std::move(items_.front());
      items_.pop_front();
    }
    if (closed_) return evicted;
    items_.push_back(std::move(item));
    not_empty_.notify_one();
    return evicted;
  }

  std::optional<T> pop() {
    std::unique_lock lock(mutex_);
    not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
    if (items_.empty()) return std::nullopt;
    T item = std::move(items_.front());
    items_.pop_front();
    not_full_.notify_one();
    return item;
  }

  void close() {
    std::lock_guard lock(mutex_);
    closed_ = true;
    not_empty_.notify_all();
    not_full_.notify_all();
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return items_.size();
  }

  std::size_t capacity() const { return capacity_; }

 private:
  const std::size_t capacity_;
  const QueuePolicy policy_;
  mutable std::mutex mutex_;
  std::condition_variable not_empty_;
  std::condition_variable not_full_;
  std::deque<T> items_;
  bool closed_ = false;
};

}  // namespace icugaze
