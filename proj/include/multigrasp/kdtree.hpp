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
#ifndef MULTIGRASP_KDTREE_HPP
#define MULTIGRASP_KDTREE_HPP

#include <vector>

#include "multigrasp/cloud.hpp"
#include "multigrasp/geom.hpp"

namespace mg {

/// Immutable, balanced k-d tree over a snapshot of the input points.
///
/// Query semantics are exact: `knn` returns the k points with the smallest
/// (squared distance, index) pairs in that order, and `radius` returns every
/// index with squared distance <= r^2, sorted by index. Ties therefore
/// resolve identically to a brute-force scan using the same arithmetic.
class SpatialIndex {
 public:
  SpatialIndex() = default;

  /// Throws EmptyCloud for an empty input.
  static SpatialIndex build(const PointCloud& cloud);
  static SpatialIndex build(std::vector<Vec3> points);

  std::vector<int> knn(const Vec3& query, int k) const;
  std::vector<int> radius(const Vec3& query, double r) const;

  const std::vector<Vec3>& points() const { return points_; }
  size_t size() const { return points_.size(); }

 private:
  void build_range(int lo, int hi);
  void knn_range(int lo, int hi, const Vec3& q, int k,
                 std::vector<std::pair<double, int>>& heap) const;
  void radius_range(int lo, int hi, const Vec3& q, double r2,
                    std::vector<int>& out) const;

  std::vector<Vec3> points_;
  std::vector<int> order_;   // indices arranged as an implicit median tree
  std::vector<int8_t> axis_; // split axis per tree slot (parallel to order_)
};

}  // namespace mg

#endif  // MULTIGRASP_KDTREE_HPP
