/*
 * Copyright 2026 The multigrasp Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#include "multigrasp/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "multigrasp/error.hpp"

namespace mg {

namespace {
constexpr int kLeafSize = 8;
}  // namespace

SpatialIndex SpatialIndex::build(const PointCloud& cloud) {
  return build(cloud.points());
}

SpatialIndex SpatialIndex::build(std::vector<Vec3> points) {
  if (points.empty()) {
    fail(ErrorCode::EmptyCloud, "cannot index an empty point set");
  }
  SpatialIndex index;
  index.points_ = std::move(points);
  index.order_.resize(index.points_.size());
  for (size_t i = 0; i < index.order_.size(); ++i) {
    index.order_[i] = static_cast<int>(i);
  }
  index.axis_.assign(index.points_.size(), int8_t{-1});
  index.build_range(0, static_cast<int>(index.points_.size()));
  return index;
}

void SpatialIndex::build_range(int lo, int hi) {
  if (hi - lo <= kLeafSize) {
    return;  // leaf: linear scan at query time, axis stays -1
  }
  // Split along the widest extent of the range so elongated clouds stay
  // balanced in every direction.
  Vec3 mn = points_[order_[lo]];
  Vec3 mx = mn;
  for (int i = lo + 1; i < hi; ++i) {
    const Vec3& p = points_[order_[i]];
    for (int a = 0; a < 3; ++a) {
      mn[a] = std::min(mn[a], p[a]);
      mx[a] = std::max(mx[a], p[a]);
    }
  }
  int axis = 0;
  double widest = mx[0] - mn[0];
  for (int a = 1; a < 3; ++a) {
    const double extent = mx[a] - mn[a];
    if (extent > widest) {
      widest = extent;
      axis = a;
    }
  }
  const int mid = lo + (hi - lo) / 2;
  std::nth_element(order_.begin() + lo, order_.begin() + mid,
                   order_.begin() + hi, [&](int ia, int ib) {
                     const double ca = points_[ia][axis];
                     const double cb = points_[ib][axis];
                     if (ca != cb) return ca < cb;
                     return ia < ib;  // total order keeps builds reproducible
                   });
  axis_[mid] = static_cast<int8_t>(axis);
  build_range(lo, mid);
  build_range(mid + 1, hi);
}

std::vector<int> SpatialIndex::knn(const Vec3& query, int k) const {
  if (k <= 0) {
    fail(ErrorCode::InvalidArgument, "knn requires k >= 1");
  }
  k = std::min<int>(k, static_cast<int>(points_.size()));
  std::vector<std::pair<double, int>> heap;
  heap.reserve(static_cast<size_t>(k) + 1);
  knn_range(0, static_cast<int>(points_.size()), query, k, heap);
  std::sort_heap(heap.begin(), heap.end());
  std::vector<int> out;
  out.reserve(heap.size());
  for (const auto& entry : heap) out.push_back(entry.second);
  return out;
}

void SpatialIndex::knn_range(int lo, int hi, const Vec3& q, int k,
                             std::vector<std::pair<double, int>>& heap) const {
  auto consider = [&](int idx) {
    const std::pair<double, int> entry{dist2(q, points_[idx]), idx};
    if (static_cast<int>(heap.size()) < k) {
      heap.push_back(entry);
      std::push_heap(heap.begin(), heap.end());
    } else if (entry < heap.front()) {
      std::pop_heap(heap.begin(), heap.end());
      heap.back() = entry;
      std::push_heap(heap.begin(), heap.end());
    }
  };
  if (hi - lo <= kLeafSize) {
    for (int i = lo; i < hi; ++i) consider(order_[i]);
    return;
  }
  const int mid = lo + (hi - lo) / 2;
  const int axis = axis_[mid];
  consider(order_[mid]);
  const double delta = q[axis] - points_[order_[mid]][axis];
  const int near_lo = delta < 0.0 ? lo : mid + 1;
  const int near_hi = delta < 0.0 ? mid : hi;
  const int far_lo = delta < 0.0 ? mid + 1 : lo;
  const int far_hi = delta < 0.0 ? hi : mid;
  knn_range(near_lo, near_hi, q, k, heap);
  // The far side may still hold a point whose (dist^2, index) pair beats the
  // current worst when distances tie exactly, so prune only on a strict
  // plane-distance excess.
  if (static_cast<int>(heap.size()) < k || delta * delta <= heap.front().first) {
    knn_range(far_lo, far_hi, q, k, heap);
  }
}

std::vector<int> SpatialIndex::radius(const Vec3& query, double r) const {
  if (!(r >= 0.0) || !std::isfinite(r)) {
    fail(ErrorCode::InvalidArgument, "radius query needs a finite r >= 0");
  }
  std::vector<int> out;
  radius_range(0, static_cast<int>(points_.size()), query, r * r, out);
  std::sort(out.begin(), out.end());
  return out;
}

void SpatialIndex::radius_range(int lo, int hi, const Vec3& q, double r2,
                                std::vector<int>& out) const {
  if (hi - lo <= kLeafSize) {
    for (int i = lo; i < hi; ++i) {
      if (dist2(q, points_[order_[i]]) <= r2) out.push_back(order_[i]);
    }
    return;
  }
  const int mid = lo + (hi - lo) / 2;
  const int axis = axis_[mid];
  if (dist2(q, points_[order_[mid]]) <= r2) out.push_back(order_[mid]);
  const double delta = q[axis] - points_[order_[mid]][axis];
  if (delta < 0.0) {
    radius_range(lo, mid, q, r2, out);
    if (delta * delta <= r2) radius_range(mid + 1, hi, q, r2, out);
  } else {
    radius_range(mid + 1, hi, q, r2, out);
    if (delta * delta <= r2) radius_range(lo, mid, q, r2, out);
  }
}

}  // namespace mg
