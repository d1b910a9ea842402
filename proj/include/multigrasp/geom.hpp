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
#ifndef MULTIGRASP_GEOM_HPP
#define MULTIGRASP_GEOM_HPP

#include <array>
#include <cmath>

namespace mg {

inline constexpr double kPi = 3.14159265358979323846;

inline double deg_to_rad(double d) { return d * (kPi / 180.0); }
inline double rad_to_deg(double r) { return r * (180.0 / kPi); }

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3& operator+=(const Vec3& o) {
    x += o.x;
    y += o.y;
    z += o.z;
    return *this;
  }
  Vec3& operator-=(const Vec3& o) {
    x -= o.x;
    y -= o.y;
    z -= o.z;
    return *this;
  }
  double operator[](int i) const { return i == 0 ? x : (i == 1 ? y : z); }
  double& operator[](int i) { return i == 0 ? x : (i == 1 ? y : z); }

  double norm2() const { return x * x + y * y + z * z; }
  double norm() const { return std::sqrt(norm2()); }
  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
  /// Caller must guarantee a non-zero vector.
  Vec3 normalized() const {
    const double n = norm();
    return {x / n, y / n, z / n};
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }
inline double dot(const Vec3& a, const Vec3& b) {
  return a.x * b.x + a.y * b.y + a.z * b.z;
}
inline Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double dist2(const Vec3& a, const Vec3& b) {
  const double dx = a.x - b.x, dy = a.y - b.y, dz = a.z - b.z;
  return dx * dx + dy * dy + dz * dz;
}

/// Strict lexicographic (x, y, z) order; used for deterministic tie-breaking.
inline bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x != b.x) return a.x < b.x;
  if (a.y != b.y) return a.y < b.y;
  return a.z < b.z;
}

/// Row-major 3x3 matrix.
struct Mat3 {
  std::array<double, 9> m = {1, 0, 0, 0, 1, 0, 0, 0, 1};

  static Mat3 identity() { return {}; }
  static Mat3 from_cols(const Vec3& cx, const Vec3& cy, const Vec3& cz) {
    Mat3 r;
    r.m = {cx.x, cy.x, cz.x, cx.y, cy.y, cz.y, cx.z, cy.z, cz.z};
    return r;
  }
  Vec3 col(int i) const { return {m[0 + i], m[3 + i], m[6 + i]}; }
  Vec3 row(int i) const { return {m[3 * i], m[3 * i + 1], m[3 * i + 2]}; }
  Mat3 transposed() const {
    Mat3 r;
    r.m = {m[0], m[3], m[6], m[1], m[4], m[7], m[2], m[5], m[8]};
    return r;
  }
  Vec3 operator*(const Vec3& v) const {
    return {m[0] * v.x + m[1] * v.y + m[2] * v.z,
            m[3] * v.x + m[4] * v.y + m[5] * v.z,
            m[6] * v.x + m[7] * v.y + m[8] * v.z};
  }
  Mat3 operator*(const Mat3& o) const;
  double det() const;
};

/// Unit quaternion in (w, x, y, z) component order.
struct Quatern {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  static Quatern identity() { return {}; }
  static Quatern from_axis_angle(const Vec3& axis, double angle);
  static Quatern from_matrix(const Mat3& r);

  double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
  /// Throws InvalidArgument on a near-zero quaternion.
  Quatern normalized() const;
  /// Sign-canonical representative of the same rotation (w >= 0).
  Quatern canonical() const;
  Quatern conjugate() const { return {w, -x, -y, -z}; }
  Quatern operator*(const Quatern& o) const {
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
  }
  Vec3 rotate(const Vec3& v) const {
    const Vec3 qv{x, y, z};
    const Vec3 t = 2.0 * cross(qv, v);
    return v + w * t + cross(qv, t);
  }
  Mat3 to_matrix() const;
  bool finite() const {
    return std::isfinite(w) && std::isfinite(x) && std::isfinite(y) &&
           std::isfinite(z);
  }
};

struct RigidTransform {
  Quatern rotation;
  Vec3 translation;

  static RigidTransform identity() { return {}; }
  Vec3 apply(const Vec3& p) const { return rotation.rotate(p) + translation; }
  /// this ∘ other (apply `other` first).
  RigidTransform compose(const RigidTransform& other) const {
    return {(rotation * other.rotation).normalized(),
            rotation.rotate(other.translation) + translation};
  }
  RigidTransform inverse() const {
    const Quatern inv = rotation.conjugate();
    return {inv, -inv.rotate(translation)};
  }
};

/// Eigen-decomposition of a symmetric 3x3 matrix, eigenvalues ascending,
/// eigenvectors orthonormal (columns paired with values by index).
struct SymEigen3 {
  std::array<double, 3> values;
  std::array<Vec3, 3> vectors;
};
SymEigen3 sym_eigen3(const Mat3& a);

/// Box with arbitrary orientation; `half` holds the half-extents along the
/// box's local axes.
struct OrientedBox {
  Vec3 center;
  Vec3 half;
  Quatern rot;

  Vec3 to_local(const Vec3& p) const {
    return rot.conjugate().rotate(p - center);
  }
  Vec3 to_world(const Vec3& local) const { return rot.rotate(local) + center; }
  bool contains(const Vec3& p, double margin) const {
    const Vec3 l = to_local(p);
    return std::fabs(l.x) <= half.x + margin &&
           std::fabs(l.y) <= half.y + margin &&
           std::fabs(l.z) <= half.z + margin;
  }
  /// Distance from an interior point to the nearest face (negative outside).
  double interior_depth(const Vec3& p) const {
    const Vec3 l = to_local(p);
    const double dx = half.x - std::fabs(l.x);
    const double dy = half.y - std::fabs(l.y);
    const double dz = half.z - std::fabs(l.z);
    return std::min(dx, std::min(dy, dz));
  }
  double bounding_radius(double margin) const {
    return Vec3{half.x + margin, half.y + margin, half.z + margin}.norm();
  }
  /// Lowest world-space z over the box volume.
  double min_z() const {
    const Mat3 r = rot.to_matrix();
    return center.z - half.x * std::fabs(r.m[6]) - half.y * std::fabs(r.m[7]) -
           half.z * std::fabs(r.m[8]);
  }
};

}  // namespace mg

#endif  // MULTIGRASP_GEOM_HPP
