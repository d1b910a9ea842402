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
#include "multigrasp/cloud.hpp"

#include <cmath>
#include <string>

#include "multigrasp/error.hpp"

namespace mg {

PointCloud PointCloud::make(std::vector<Vec3> points,
                            std::vector<Vec3> normals,
                            std::vector<uint8_t> view_tags) {
  if (!normals.empty() && normals.size() != points.size())
    fail(ErrorCode::InvalidArgument,
         "normals length " + std::to_string(normals.size()) +
             " does not match point count " + std::to_string(points.size()));
  if (!view_tags.empty() && view_tags.size() != points.size())
    fail(ErrorCode::InvalidArgument,
         "view_tags length " + std::to_string(view_tags.size()) +
             " does not match point count " + std::to_string(points.size()));
  for (size_t i = 0; i < points.size(); ++i) {
    if (!points[i].finite())
      fail(ErrorCode::InvalidArgument,
           "non-finite coordinate at point " + std::to_string(i));
  }
  for (size_t i = 0; i < normals.size(); ++i) {
    if (!normals[i].finite())
      fail(ErrorCode::InvalidArgument,
           "non-finite normal at point " + std::to_string(i));
    if (std::fabs(normals[i].norm() - 1.0) > 1e-6)
      fail(ErrorCode::InvalidArgument,
           "normal at point " + std::to_string(i) + " is not unit length");
  }
  PointCloud c;
  c.points_ = std::move(points);
  c.normals_ = std::move(normals);
  c.view_tags_ = std::move(view_tags);
  return c;
}

PointCloud PointCloud::transformed(const RigidTransform& t) const {
  std::vector<Vec3> pts(points_.size());
  for (size_t i = 0; i < points_.size(); ++i) pts[i] = t.apply(points_[i]);
  std::vector<Vec3> nrm(normals_.size());
  for (size_t i = 0; i < normals_.size(); ++i)
    nrm[i] = t.rotation.rotate(normals_[i]);
  PointCloud c;
  c.points_ = std::move(pts);
  c.normals_ = std::move(nrm);
  c.view_tags_ = view_tags_;
  return c;
}

PointCloud PointCloud::merged(const PointCloud& other) const {
  PointCloud c;
  c.points_ = points_;
  c.points_.insert(c.points_.end(), other.points_.begin(),
                   other.points_.end());
  if (has_normals() && other.has_normals()) {
    c.normals_ = normals_;
    c.normals_.insert(c.normals_.end(), other.normals_.begin(),
                      other.normals_.end());
  }
  if (has_view_tags() && other.has_view_tags()) {
    c.view_tags_ = view_tags_;
    c.view_tags_.insert(c.view_tags_.end(), other.view_tags_.begin(),
                        other.view_tags_.end());
  }
  return c;
}

PointCloud PointCloud::above_plane(double plane_z, double threshold) const {
  PointCloud c;
  for (size_t i = 0; i < points_.size(); ++i) {
    if (points_[i].z <= plane_z + threshold) continue;
    c.points_.push_back(points_[i]);
    if (has_normals()) c.normals_.push_back(normals_[i]);
    if (has_view_tags()) c.view_tags_.push_back(view_tags_[i]);
  }
  return c;
}

}  // namespace mg
