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
#include "multigrasp/encoding.hpp"

#include <algorithm>
#include <cmath>

#include "multigrasp/error.hpp"
#include "multigrasp/rng.hpp"

namespace mg {

GraspEncoding encode(const PointCloud& cloud, const GraspCandidate& candidate,
                     const RegionBox& region, int max_points, uint64_t seed) {
  if (max_points < 1) {
    fail(ErrorCode::InvalidArgument, "encoding size must be >= 1");
  }
  if (!(region.half_x > 0.0) || !(region.half_y > 0.0) ||
      !(region.z_max > region.z_min)) {
    fail(ErrorCode::InvalidArgument, "region box is empty");
  }
  if (cloud.points().empty()) {
    fail(ErrorCode::EmptyCloud, "cannot encode from an empty cloud");
  }

  const Quatern world_to_frame = candidate.orientation.conjugate();
  std::vector<Vec3> inside;
  for (const Vec3& p : cloud.points()) {
    const Vec3 local = world_to_frame.rotate(p - candidate.centroid);
    if (std::fabs(local.x) <= region.half_x &&
        std::fabs(local.y) <= region.half_y && local.z >= region.z_min &&
        local.z <= region.z_max) {
      inside.push_back(local);
    }
  }
  if (inside.empty()) {
    fail(ErrorCode::EmptyRegion, "no cloud point falls inside the crop box");
  }

  GraspEncoding enc;
  enc.region = region;
  enc.points.assign(static_cast<size_t>(max_points), Vec3{0, 0, 0});
  const int found = static_cast<int>(inside.size());
  if (found <= max_points) {
    std::copy(inside.begin(), inside.end(), enc.points.begin());
    enc.valid_count = found;
  } else {
    Rng rng(seed);
    std::vector<int> keep = rng.sample_without_replacement(found, max_points);
    std::sort(keep.begin(), keep.end());
    for (int i = 0; i < max_points; ++i) {
      enc.points[static_cast<size_t>(i)] =
          inside[static_cast<size_t>(keep[static_cast<size_t>(i)])];
    }
    enc.valid_count = max_points;
  }
  return enc;
}

}  // namespace mg
