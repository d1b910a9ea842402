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
#ifndef MULTIGRASP_TESTS_HELPERS_HPP
#define MULTIGRASP_TESTS_HELPERS_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "multigrasp/error.hpp"
#include "multigrasp/geom.hpp"
#include "multigrasp/rng.hpp"

namespace mgtest {

inline mg::Vec3 random_vec(mg::Rng& rng, double scale) {
  return {rng.uniform(-scale, scale), rng.uniform(-scale, scale),
          rng.uniform(-scale, scale)};
}

inline mg::Quatern random_rotation(mg::Rng& rng) {
  mg::Quatern q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  return q.normalized().canonical();
}

inline mg::RigidTransform random_transform(mg::Rng& rng, double span) {
  return {random_rotation(rng), random_vec(rng, span)};
}

template <typename Fn>
mg::ErrorCode error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const mg::Error& e) {
    return e.code();
  }
  return static_cast<mg::ErrorCode>(-1);
}

/// Independent point-in-box check using the matrix-transpose path rather
/// than the quaternion conjugate the library uses.
inline bool brute_box_contains(const mg::OrientedBox& box, const mg::Vec3& p,
                               double margin) {
  const mg::Mat3 r = box.rot.to_matrix();
  const mg::Vec3 d = p - box.center;
  const double lx = r.m[0] * d.x + r.m[3] * d.y + r.m[6] * d.z;
  const double ly = r.m[1] * d.x + r.m[4] * d.y + r.m[7] * d.z;
  const double lz = r.m[2] * d.x + r.m[5] * d.y + r.m[8] * d.z;
  return std::fabs(lx) <= box.half.x + margin &&
         std::fabs(ly) <= box.half.y + margin &&
         std::fabs(lz) <= box.half.z + margin;
}

/// Lowest world z over the eight corners.
inline double brute_box_min_z(const mg::OrientedBox& box) {
  double lowest = std::numeric_limits<double>::infinity();
  for (int sx = -1; sx <= 1; sx += 2) {
    for (int sy = -1; sy <= 1; sy += 2) {
      for (int sz = -1; sz <= 1; sz += 2) {
        const mg::Vec3 corner = box.to_world(
            {sx * box.half.x, sy * box.half.y, sz * box.half.z});
        lowest = std::min(lowest, corner.z);
      }
    }
  }
  return lowest;
}

struct SurfaceSamples {
  std::vector<mg::Vec3> points;
  std::vector<mg::Vec3> normals;
  std::vector<int> shape_ids;
};

/// Samples all six faces of an axis-aligned box (borders included) at the
/// given pitch, with outward face normals.
inline void append_box_surface(SurfaceSamples& out, const mg::Vec3& center,
                               const mg::Vec3& half, double pitch,
                               int shape_id) {
  const auto axis_count = [&](double h) {
    return std::max(2, static_cast<int>(std::ceil(2.0 * h / pitch)) + 1);
  };
  const auto coord = [](double h, int i, int n) {
    return -h + 2.0 * h * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  for (int axis = 0; axis < 3; ++axis) {
    const int a1 = (axis + 1) % 3;
    const int a2 = (axis + 2) % 3;
    mg::Vec3 h_vec{half.x, half.y, half.z};
    const int n1 = axis_count(h_vec[a1]);
    const int n2 = axis_count(h_vec[a2]);
    for (int side = -1; side <= 1; side += 2) {
      mg::Vec3 normal{0, 0, 0};
      normal[axis] = side;
      for (int i = 0; i < n1; ++i) {
        for (int j = 0; j < n2; ++j) {
          mg::Vec3 local{0, 0, 0};
          local[axis] = side * h_vec[axis];
          local[a1] = coord(h_vec[a1], i, n1);
          local[a2] = coord(h_vec[a2], j, n2);
          out.points.push_back(center + local);
          out.normals.push_back(normal);
          out.shape_ids.push_back(shape_id);
        }
      }
    }
  }
}

/// Latitude/longitude sphere sampling with exact outward normals.
inline void append_sphere_surface(SurfaceSamples& out, const mg::Vec3& center,
                                  double radius, double pitch, int shape_id) {
  const int n_lat =
      std::max(2, static_cast<int>(std::round(mg::kPi * radius / pitch)));
  for (int i = 0; i <= n_lat; ++i) {
    const double polar = mg::kPi * static_cast<double>(i) / n_lat;
    const double ring = radius * std::sin(polar);
    const int n_lon = std::max(
        1, static_cast<int>(std::round(2.0 * mg::kPi * ring / pitch)));
    for (int j = 0; j < n_lon; ++j) {
      const double azim = 2.0 * mg::kPi * static_cast<double>(j) / n_lon;
      const mg::Vec3 n{std::sin(polar) * std::cos(azim),
                       std::sin(polar) * std::sin(azim), std::cos(polar)};
      out.points.push_back(center + radius * n);
      out.normals.push_back(n.normalized());
      out.shape_ids.push_back(shape_id);
    }
  }
}

}  // namespace mgtest

#endif  // MULTIGRASP_TESTS_HELPERS_HPP
