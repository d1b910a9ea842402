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
#ifndef MULTIGRASP_SURFACE_HPP
#define MULTIGRASP_SURFACE_HPP

#include "multigrasp/cloud.hpp"
#include "multigrasp/geom.hpp"
#include "multigrasp/kdtree.hpp"

namespace mg {

/// Local Darboux-style frame estimated from the neighborhood of one point.
///
/// `normal` points out of the surface toward the camera that saw the point,
/// `curvature_axis` is the direction the surface bends along least (the
/// middle principal component of the neighborhood), and
/// `binormal = normal x curvature_axis` completes a right-handed triad.
struct SurfaceFrame {
  Vec3 point;
  Vec3 normal;
  Vec3 curvature_axis;
  Vec3 binormal;
  /// Neighborhood covariance eigenvalues, ascending. eigenvalues[0] near
  /// zero means the patch is locally flat.
  double eigenvalues[3] = {0.0, 0.0, 0.0};
};

/// Fits a frame to the points within `radius` of cloud point `center`.
///
/// Sign conventions are fully deterministic: the normal is flipped toward
/// `viewpoint`, and the curvature axis takes the direction of non-negative
/// third moment (falling back to a fixed lexicographic rule when the
/// neighborhood is exactly symmetric). Throws DegenerateNeighborhood when
/// fewer than four neighbors are found or the neighborhood is collinear.
SurfaceFrame estimate_surface_frame(const PointCloud& cloud,
                                    const SpatialIndex& index, int center,
                                    double radius, const Vec3& viewpoint);

}  // namespace mg

#endif  // MULTIGRASP_SURFACE_HPP
