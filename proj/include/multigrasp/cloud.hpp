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
#ifndef MULTIGRASP_CLOUD_HPP
#define MULTIGRASP_CLOUD_HPP

#include <cstdint>
#include <vector>

#include "multigrasp/geom.hpp"

namespace mg {

/// Point cloud in meters. `normals` is empty or per-point unit vectors;
/// `view_tags` is empty or a per-point index into the capturing camera list.
/// Construct through `make` so the invariants (finite coordinates, unit
/// normals, matching lengths) are enforced in one place.
class PointCloud {
 public:
  PointCloud() = default;

  static PointCloud make(std::vector<Vec3> points,
                         std::vector<Vec3> normals = {},
                         std::vector<uint8_t> view_tags = {});

  const std::vector<Vec3>& points() const { return points_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<uint8_t>& view_tags() const { return view_tags_; }
  const Vec3& point(size_t i) const { return points_[i]; }
  const Vec3& normal(size_t i) const { return normals_[i]; }
  uint8_t view_tag(size_t i) const { return view_tags_[i]; }

  size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  bool has_normals() const { return !normals_.empty(); }
  bool has_view_tags() const { return !view_tags_.empty(); }

  PointCloud transformed(const RigidTransform& t) const;
  /// Concatenation; normals survive only if both sides carry them, and the
  /// same for view tags.
  PointCloud merged(const PointCloud& other) const;
  /// Keep points with z > plane_z + threshold (table removal).
  PointCloud above_plane(double plane_z, double threshold) const;

 private:
  std::vector<Vec3> points_;
  std::vector<Vec3> normals_;
  std::vector<uint8_t> view_tags_;
};

}  // namespace mg

#endif  // MULTIGRASP_CLOUD_HPP
