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
#include "multigrasp/geom.hpp"

#include <algorithm>

#include "multigrasp/error.hpp"

namespace mg {

Mat3 Mat3::operator*(const Mat3& o) const {
  Mat3 r;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double s = 0.0;
      for (int k = 0; k < 3; ++k) s += m[3 * i + k] * o.m[3 * k + j];
      r.m[3 * i + j] = s;
    }
  }
  return r;
}

double Mat3::det() const {
  return m[0] * (m[4] * m[8] - m[5] * m[7]) -
         m[1] * (m[3] * m[8] - m[5] * m[6]) +
         m[2] * (m[3] * m[7] - m[4] * m[6]);
}

Quatern Quatern::from_axis_angle(const Vec3& axis, double angle) {
  const double n = axis.norm();
  if (n < 1e-300) fail(ErrorCode::InvalidArgument, "zero rotation axis");
  const double h = 0.5 * angle;
  const double s = std::sin(h) / n;
  return Quatern{std::cos(h), axis.x * s, axis.y * s, axis.z * s}.normalized();
}

Quatern Quatern::normalized() const {
  const double n = norm();
  if (!(n > 1e-300) || !std::isfinite(n))
    fail(ErrorCode::InvalidArgument, "cannot normalize degenerate quaternion");
  return {w / n, x / n, y / n, z / n};
}

Quatern Quatern::canonical() const {
  const Quatern q = *this;
  bool flip;
  if (q.w != 0.0)
    flip = q.w < 0.0;
  else if (q.x != 0.0)
    flip = q.x < 0.0;
  else if (q.y != 0.0)
    flip = q.y < 0.0;
  else
    flip = q.z < 0.0;
  return flip ? Quatern{-q.w, -q.x, -q.y, -q.z} : q;
}

Mat3 Quatern::to_matrix() const {
  const double xx = x * x, yy = y * y, zz = z * z;
  const double xy = x * y, xz = x * z, yz = y * z;
  const double wx = w * x, wy = w * y, wz = w * z;
  Mat3 r;
  r.m = {1 - 2 * (yy + zz), 2 * (xy - wz),     2 * (xz + wy),
         2 * (xy + wz),     1 - 2 * (xx + zz), 2 * (yz - wx),
         2 * (xz - wy),     2 * (yz + wx),     1 - 2 * (xx + yy)};
  return r;
}

Quatern Quatern::from_matrix(const Mat3& r) {
  // Shepperd's method: pick the largest diagonal combination for stability.
  const auto& m = r.m;
  const double tr = m[0] + m[4] + m[8];
  Quatern q;
  if (tr > 0.0) {
    const double s = std::sqrt(tr + 1.0) * 2.0;
    q.w = 0.25 * s;
    q.x = (m[7] - m[5]) / s;
    q.y = (m[2] - m[6]) / s;
    q.z = (m[3] - m[1]) / s;
  } else if (m[0] > m[4] && m[0] > m[8]) {
    const double s = std::sqrt(1.0 + m[0] - m[4] - m[8]) * 2.0;
    q.w = (m[7] - m[5]) / s;
    q.x = 0.25 * s;
    q.y = (m[1] + m[3]) / s;
    q.z = (m[2] + m[6]) / s;
  } else if (m[4] > m[8]) {
    const double s = std::sqrt(1.0 + m[4] - m[0] - m[8]) * 2.0;
    q.w = (m[2] - m[6]) / s;
    q.x = (m[1] + m[3]) / s;
    q.y = 0.25 * s;
    q.z = (m[5] + m[7]) / s;
  } else {
    const double s = std::sqrt(1.0 + m[8] - m[0] - m[4]) * 2.0;
    q.w = (m[3] - m[1]) / s;
    q.x = (m[2] + m[6]) / s;
    q.y = (m[5] + m[7]) / s;
    q.z = 0.25 * s;
  }
  return q.normalized().canonical();
}

SymEigen3 sym_eigen3(const Mat3& a) {
  // Cyclic Jacobi sweeps; converges to machine precision within a few
  // iterations for 3x3 symmetric input and is fully deterministic.
  double A[3][3] = {{a.m[0], a.m[1], a.m[2]},
                    {a.m[3], a.m[4], a.m[5]},
                    {a.m[6], a.m[7], a.m[8]}};
  double V[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};

  for (int sweep = 0; sweep < 64; ++sweep) {
    double off = std::fabs(A[0][1]) + std::fabs(A[0][2]) + std::fabs(A[1][2]);
    if (off == 0.0) break;
    for (int p = 0; p < 2; ++p) {
      for (int q = p + 1; q < 3; ++q) {
        if (A[p][q] == 0.0) continue;
        const double apq = A[p][q];
        const double tau = (A[q][q] - A[p][p]) / (2.0 * apq);
        const double t = (tau >= 0.0)
                             ? 1.0 / (tau + std::sqrt(1.0 + tau * tau))
                             : -1.0 / (-tau + std::sqrt(1.0 + tau * tau));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = t * c;
        for (int k = 0; k < 3; ++k) {
          const double akp = A[k][p], akq = A[k][q];
          A[k][p] = c * akp - s * akq;
          A[k][q] = s * akp + c * akq;
        }
        for (int k = 0; k < 3; ++k) {
          const double apk = A[p][k], aqk = A[q][k];
          A[p][k] = c * apk - s * aqk;
          A[q][k] = s * apk + c * aqk;
        }
        for (int k = 0; k < 3; ++k) {
          const double vkp = V[k][p], vkq = V[k][q];
          V[k][p] = c * vkp - s * vkq;
          V[k][q] = s * vkp + c * vkq;
        }
      }
    }
  }

  std::array<int, 3> order = {0, 1, 2};
  std::sort(order.begin(), order.end(), [&](int i, int j) {
    if (A[i][i] != A[j][j]) return A[i][i] < A[j][j];
    return i < j;
  });
  SymEigen3 out;
  for (int i = 0; i < 3; ++i) {
    const int s = order[i];
    out.values[i] = A[s][s];
    out.vectors[i] = Vec3{V[0][s], V[1][s], V[2][s]};
  }
  return out;
}

}  // namespace mg
