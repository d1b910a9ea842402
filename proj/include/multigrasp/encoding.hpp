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
#ifndef MULTIGRASP_ENCODING_HPP
#define MULTIGRASP_ENCODING_HPP

#include <cstdint>
#include <vector>

#include "multigrasp/candidates.hpp"
#include "multigrasp/cloud.hpp"
#include "multigrasp/geom.hpp"

namespace mg {

/// Axis-aligned crop bounds in the candidate frame. X spans the closing
/// direction, Z the approach direction; Z is asymmetric so the crop reaches
/// from just behind the contact surface (palm side) to finger depth beyond
/// it.
struct RegionBox {
  double half_x = 0.06;
  double half_y = 0.04;
  double z_min = -0.019;
  double z_max = 0.081;
};

/// Fixed-size network input for one candidate: the cropped neighborhood
/// expressed in the candidate frame. Exactly `points.size()` slots;
/// the first `valid_count` are cloud points, the rest are zero padding.
struct GraspEncoding {
  std::vector<Vec3> points;
  int valid_count = 0;
  RegionBox region;
};

/// Crops `cloud` to the candidate-frame region box (inclusive bounds) and
/// emits exactly `max_points` slots. When the crop holds more than
/// `max_points`, a seeded uniform subsample is taken and kept in the
/// original point order; when it holds fewer, the tail is zero-padded.
///
/// Throws InvalidArgument (max_points < 1), EmptyCloud (empty input), and
/// EmptyRegion (no point falls inside the crop).
GraspEncoding encode(const PointCloud& cloud, const GraspCandidate& candidate,
                     const RegionBox& region, int max_points, uint64_t seed);

}  // namespace mg

#endif  // MULTIGRASP_ENCODING_HPP
