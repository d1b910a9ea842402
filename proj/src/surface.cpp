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
#include "multigrasp/surface.hpp"

#include <cmath>

#include "multigrasp/error.hpp"

namespace mg {

namespace {

// Canonical sign for an axis whose neighborhood carries no directional
// information: make the first nonzero component positive.
Vec3 lex_canonical(const Vec3& v) {
  for (int a = 0; a < 3; ++a) {
    if (v[a] > 0.0) return v;
    if (v[a] < 0.0) return Vec3{-v.x, -v.y, -v.z};
  }
  return v;
}

}  // namespace

SurfaceFrame estimate_surface_frame(const PointCloud& cloud,
                                    const SpatialIndex& index, int center,
                                    double radius, const Vec3& viewpoint) {
  if (center < 0 || center >= static_cast<int>(cloud.size())) {
    fail(ErrorCode::InvalidArgument, "surface frame center index out of range");
  }
  const Vec3 anchor = cloud.point(static_cast<size_t>(center));
  const std::vector<int> nbrs = index.radius(anchor, radius);
  if (nbrs.size() < 4) {
    fail(ErrorCode::DegenerateNeighborhood,
         "fewer than 4 points within the frame-estimation radius");
  }

  Vec3 mean{0.0, 0.0, 0.0};
  for (int i : nbrs) mean = mean + cloud.point(static_cast<size_t>(i));
  mean = mean * (1.0 / static_cast<double>(nbrs.size()));

  Mat3 cov;
  cov.m.fill(0.0);
  for (int i : nbrs) {
    const Vec3 d = cloud.point(static_cast<size_t>(i)) - mean;
    cov.m[0] += d.x * d.x;
    cov.m[1] += d.x * d.y;
    cov.m[2] += d.x * d.z;
    cov.m[4] += d.y * d.y;
    cov.m[5] += d.y * d.z;
    cov.m[8] += d.z * d.z;
  }
  cov.m[3] = cov.m[1];
  cov.m[6] = cov.m[2];
  cov.m[7] = cov.m[5];
  const double inv_n = 1.0 / static_cast<double>(nbrs.size());
  for (double& v : cov.m) v *= inv_n;

  const SymEigen3 eig = sym_eigen3(cov);
  // Collinear (or fully coincident) neighborhoods leave both the normal and
  // the curvature axis undetermined.
  if (eig.values[1] <= eig.values[2] * 1e-9) {
    fail(ErrorCode::DegenerateNeighborhood,
         "neighborhood is collinear; surface frame is undetermined");
  }

  Vec3 normal = eig.vectors[0].normalized();
  if (dot(normal, viewpoint - anchor) < 0.0) {
    normal = Vec3{-normal.x, -normal.y, -normal.z};
  }

  Vec3 curv = eig.vectors[1].normalized();
  double third_moment = 0.0;
  for (int i : nbrs) {
    const double t = dot(cloud.point(static_cast<size_t>(i)) - mean, curv);
    third_moment += t * t * t;
  }
  if (third_moment < 0.0) {
    curv = Vec3{-curv.x, -curv.y, -curv.z};
  } else if (third_moment == 0.0) {
    curv = lex_canonical(curv);
  }

  SurfaceFrame frame;
  frame.point = anchor;
  frame.normal = normal;
  frame.curvature_axis = curv;
  frame.binormal = cross(normal, curv).normalized();
  // Re-orthogonalize the curvature axis against the (possibly rounded)
  // normal so the triad is orthonormal to machine precision.
  frame.curvature_axis = cross(frame.binormal, normal).normalized();
  for (int a = 0; a < 3; ++a) frame.eigenvalues[a] = eig.values[a];
  return frame;
}

}  // namespace mg
