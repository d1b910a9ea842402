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
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "multigrasp/cloud.hpp"
#include "multigrasp/error.hpp"
#include "multigrasp/geom.hpp"
#include "multigrasp/kdtree.hpp"
#include "multigrasp/ply.hpp"
#include "multigrasp/rng.hpp"
#include "multigrasp/scene.hpp"
#include "multigrasp/surface.hpp"
#include "multigrasp/util.hpp"

using namespace mg;

namespace {

template <typename Fn>
ErrorCode error_code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected a structured error but none was thrown");
  return ErrorCode::InvalidArgument;
}

Quatern random_rotation(Rng& rng) {
  Quatern q{rng.normal(), rng.normal(), rng.normal(), rng.normal()};
  return q.normalized();
}

Vec3 random_vec(Rng& rng, double scale) {
  return {rng.uniform(-scale, scale), rng.uniform(-scale, scale),
          rng.uniform(-scale, scale)};
}

bool approx_vec(const Vec3& a, const Vec3& b, double tol) {
  return std::fabs(a.x - b.x) <= tol && std::fabs(a.y - b.y) <= tol &&
         std::fabs(a.z - b.z) <= tol;
}

// Reference nearest-neighbor search the spatial index must agree with
// exactly, including the (squared distance, index) tie ordering.
std::vector<int> brute_knn(const std::vector<Vec3>& pts, const Vec3& q,
                           int k) {
  std::vector<std::pair<double, int>> all;
  all.reserve(pts.size());
  for (size_t i = 0; i < pts.size(); ++i) {
    all.emplace_back(dist2(q, pts[i]), static_cast<int>(i));
  }
  std::sort(all.begin(), all.end());
  const int take = std::min<int>(k, static_cast<int>(all.size()));
  std::vector<int> out;
  out.reserve(static_cast<size_t>(take));
  for (int i = 0; i < take; ++i) out.push_back(all[static_cast<size_t>(i)].second);
  return out;
}

std::vector<int> brute_radius(const std::vector<Vec3>& pts, const Vec3& q,
                              double r) {
  std::vector<int> out;
  for (size_t i = 0; i < pts.size(); ++i) {
    if (dist2(q, pts[i]) <= r * r) out.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace

TEST_CASE("symmetric eigendecomposition reconstructs random matrices") {
  Rng rng(11, 0);
  for (int trial = 0; trial < 200; ++trial) {
    // Random symmetric matrix with entries in [-5, 5].
    const double a = rng.uniform(-5, 5), b = rng.uniform(-5, 5),
                 c = rng.uniform(-5, 5), d = rng.uniform(-5, 5),
                 e = rng.uniform(-5, 5), f = rng.uniform(-5, 5);
    Mat3 m;
    m.m = {a, b, c, b, d, e, c, e, f};
    const SymEigen3 eig = sym_eigen3(m);

    CHECK(eig.values[0] <= eig.values[1]);
    CHECK(eig.values[1] <= eig.values[2]);
    for (int i = 0; i < 3; ++i) {
      const Vec3 v = eig.vectors[i];
      CHECK(std::fabs(v.norm() - 1.0) < 1e-12);
      const Vec3 residual = m * v - eig.values[i] * v;
      CHECK(residual.norm() < 1e-10);
      for (int j = i + 1; j < 3; ++j) {
        CHECK(std::fabs(dot(v, eig.vectors[j])) < 1e-12);
      }
    }
  }

  // Known diagonal case resolves exactly, sorted ascending.
  Mat3 diag;
  diag.m = {3, 0, 0, 0, 1, 0, 0, 0, 2};
  const SymEigen3 eig = sym_eigen3(diag);
  CHECK(eig.values[0] == 1.0);
  CHECK(eig.values[1] == 2.0);
  CHECK(eig.values[2] == 3.0);
  CHECK(std::fabs(std::fabs(eig.vectors[0].y) - 1.0) < 1e-15);
  CHECK(std::fabs(std::fabs(eig.vectors[1].z) - 1.0) < 1e-15);
  CHECK(std::fabs(std::fabs(eig.vectors[2].x) - 1.0) < 1e-15);
}

TEST_CASE("quaternion algebra round trips through matrices") {
  Rng rng(12, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const Quatern q = random_rotation(rng);
    const Mat3 r = q.to_matrix();
    CHECK(std::fabs(r.det() - 1.0) < 1e-12);

    // rotate() and the matrix form must agree.
    const Vec3 v = random_vec(rng, 2.0);
    CHECK(approx_vec(q.rotate(v), r * v, 1e-12));

    // Matrix -> quaternion recovers the canonical representative.
    const Quatern back = Quatern::from_matrix(r);
    const Quatern canon = q.canonical();
    CHECK(std::fabs(back.w - canon.w) < 1e-12);
    CHECK(std::fabs(back.x - canon.x) < 1e-12);
    CHECK(std::fabs(back.y - canon.y) < 1e-12);
    CHECK(std::fabs(back.z - canon.z) < 1e-12);

    // Conjugate inverts the rotation.
    CHECK(approx_vec(q.conjugate().rotate(q.rotate(v)), v, 1e-12));
  }

  const Quatern half_turn =
      Quatern::from_axis_angle(Vec3{0, 0, 2.0}, kPi / 2.0);
  CHECK(approx_vec(half_turn.rotate(Vec3{1, 0, 0}), Vec3{0, 1, 0}, 1e-15));
  CHECK(error_code_of([] {
          Quatern::from_axis_angle(Vec3{0, 0, 0}, 1.0);
        }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] { Quatern{0, 0, 0, 0}.normalized(); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("rigid transforms compose and invert") {
  Rng rng(13, 0);
  for (int trial = 0; trial < 100; ++trial) {
    const RigidTransform t{random_rotation(rng), random_vec(rng, 3.0)};
    const RigidTransform u{random_rotation(rng), random_vec(rng, 3.0)};
    const Vec3 p = random_vec(rng, 2.0);

    CHECK(approx_vec(t.inverse().apply(t.apply(p)), p, 1e-12));
    CHECK(approx_vec(t.compose(u).apply(p), t.apply(u.apply(p)), 1e-12));

    const RigidTransform id = t.compose(t.inverse());
    CHECK(approx_vec(id.apply(p), p, 1e-12));
  }
}

TEST_CASE("counter rng reproduces exactly and respects bounds") {
  Rng a(42, 7);
  Rng b(42, 7);
  for (int i = 0; i < 64; ++i) CHECK(a.next_u64() == b.next_u64());

  Rng c(42, 8);
  Rng d(43, 7);
  CHECK(Rng(42, 7).next_u64() != c.next_u64());
  CHECK(Rng(42, 7).next_u64() != d.next_u64());

  Rng e(1, 0);
  for (int i = 0; i < 1000; ++i) {
    const double u = e.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    CHECK(e.below(17) < 17u);
  }
  CHECK(error_code_of([&] { e.below(0); }) == ErrorCode::InvalidArgument);

  // fork() is deterministic in (parent seed, tag) and independent of how
  // much the parent has already consumed.
  Rng parent(99, 0);
  parent.next_u64();
  parent.next_u64();
  Rng f1 = parent.fork(5);
  Rng f2 = Rng(99, 0).fork(5);
  for (int i = 0; i < 16; ++i) CHECK(f1.next_u64() == f2.next_u64());
  Rng f3 = Rng(99, 0).fork(6);
  CHECK(Rng(99, 0).fork(5).next_u64() != f3.next_u64());

  Rng g(7, 0);
  const std::vector<int> sample = g.sample_without_replacement(50, 20);
  CHECK(sample.size() == 20);
  std::vector<int> sorted = sample;
  std::sort(sorted.begin(), sorted.end());
  CHECK(std::adjacent_find(sorted.begin(), sorted.end()) == sorted.end());
  CHECK(sorted.front() >= 0);
  CHECK(sorted.back() < 50);

  // k == n yields a full permutation.
  Rng h(8, 0);
  std::vector<int> perm = h.sample_without_replacement(30, 30);
  std::sort(perm.begin(), perm.end());
  for (int i = 0; i < 30; ++i) CHECK(perm[static_cast<size_t>(i)] == i);
}

TEST_CASE("base64 round trips and rejects malformed text") {
  Rng rng(21, 0);
  for (size_t len = 0; len <= 50; ++len) {
    std::vector<uint8_t> buf(len);
    for (auto& byte : buf) byte = static_cast<uint8_t>(rng.below(256));
    const std::string enc = base64_encode(buf.data(), buf.size());
    CHECK(base64_decode(enc) == buf);
  }

  CHECK(error_code_of([] { base64_decode("abc"); }) ==
        ErrorCode::BufferLengthMismatch);
  CHECK(error_code_of([] { base64_decode("ab!d"); }) ==
        ErrorCode::BufferLengthMismatch);
  CHECK(error_code_of([] { base64_decode("a=bc"); }) ==
        ErrorCode::BufferLengthMismatch);
  CHECK(error_code_of([] { base64_decode("ab==AAAA"); }) ==
        ErrorCode::BufferLengthMismatch);
  CHECK(base64_decode("").empty());

  // Float packing is bit-exact, including negative zero and denormals.
  std::vector<float> vals = {0.0f, -0.0f, 1.5f, -3.25e-30f, 1e-42f,
                             3.4028235e38f, -1.1754944e-38f};
  for (int i = 0; i < 100; ++i) {
    vals.push_back(static_cast<float>(rng.uniform(-1e6, 1e6)));
  }
  const std::vector<float> back = base64_to_floats(floats_to_base64(vals));
  REQUIRE(back.size() == vals.size());
  CHECK(std::memcmp(back.data(), vals.data(), vals.size() * 4) == 0);
}

TEST_CASE("shortest double formatting parses back to identical bits") {
  Rng rng(22, 0);
  std::vector<double> vals = {0.0,    -0.0,   1.0,     -1.0,
                              0.1,    1e-300, 1e300,   -2.5e-17,
                              kPi, 1.7976931348623157e308};
  for (int i = 0; i < 500; ++i) {
    vals.push_back(rng.uniform(-1e9, 1e9) * std::pow(10.0, rng.uniform(-30, 30)));
  }
  for (const double v : vals) {
    const std::string s = format_double(v);
    double parsed = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), parsed);
    REQUIRE(res.ec == std::errc{});
    CHECK(std::memcmp(&parsed, &v, 8) == 0);
  }
}

TEST_CASE("spatial index matches exhaustive search") {
  Rng rng(31, 0);
  for (int instance = 0; instance < 100; ++instance) {
    const int n = 1 + static_cast<int>(rng.below(300));
    const bool snap = instance % 2 == 0;  // grid snapping forces exact ties
    std::vector<Vec3> pts(static_cast<size_t>(n));
    for (auto& p : pts) {
      p = random_vec(rng, 0.5);
      if (snap) {
        p = {std::round(p.x * 10.0) / 10.0, std::round(p.y * 10.0) / 10.0,
             std::round(p.z * 10.0) / 10.0};
      }
    }
    const SpatialIndex index = SpatialIndex::build(pts);

    for (int qi = 0; qi < 6; ++qi) {
      const Vec3 q = qi < 3 ? pts[rng.below(static_cast<uint32_t>(n))]
                            : random_vec(rng, 0.6);
      for (const int k : {1, 3, 10, n}) {
        CHECK(index.knn(q, k) == brute_knn(pts, q, k));
      }
      for (const double r : {0.0, 0.05, 0.2, 10.0}) {
        CHECK(index.radius(q, r) == brute_radius(pts, q, r));
      }
    }
  }

  CHECK(error_code_of([] { SpatialIndex::build(std::vector<Vec3>{}); }) ==
        ErrorCode::EmptyCloud);
  const SpatialIndex tiny = SpatialIndex::build({Vec3{0, 0, 0}});
  CHECK(error_code_of([&] { tiny.knn(Vec3{0, 0, 0}, 0); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([&] { tiny.radius(Vec3{0, 0, 0}, -1.0); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("surface frame on a flat rectangular patch") {
  // Plate wider in x than y: the normal is +z (toward the viewpoint) and
  // the middle principal direction is +-y.
  std::vector<Vec3> pts;
  int center = -1;
  for (int i = -6; i <= 6; ++i) {
    for (int j = -3; j <= 3; ++j) {
      if (i == 0 && j == 0) center = static_cast<int>(pts.size());
      pts.push_back({i * 0.01, j * 0.01, 0.0});
    }
  }
  const PointCloud cloud = PointCloud::make(pts);
  const SpatialIndex index = SpatialIndex::build(cloud);
  const SurfaceFrame frame =
      estimate_surface_frame(cloud, index, center, 0.1, Vec3{0, 0, 1});

  CHECK(approx_vec(frame.normal, Vec3{0, 0, 1}, 1e-9));
  CHECK(std::fabs(std::fabs(frame.curvature_axis.y) - 1.0) < 1e-9);
  CHECK(std::fabs(frame.eigenvalues[0]) < 1e-15);
  // Right-handed orthonormal triad.
  CHECK(approx_vec(cross(frame.curvature_axis, frame.binormal), frame.normal,
                   1e-9));
  CHECK(std::fabs(dot(frame.normal, frame.curvature_axis)) < 1e-12);

  // Seen from below, the normal flips.
  const SurfaceFrame below =
      estimate_surface_frame(cloud, index, center, 0.1, Vec3{0, 0, -1});
  CHECK(approx_vec(below.normal, Vec3{0, 0, -1}, 1e-9));

  // Extra mass on the +y side pins the curvature-axis sign via the
  // third-moment rule.
  std::vector<Vec3> skewed = pts;
  for (int i = -2; i <= 2; ++i) skewed.push_back({i * 0.01, 0.05, 0.0});
  const PointCloud skew_cloud = PointCloud::make(skewed);
  const SpatialIndex skew_index = SpatialIndex::build(skew_cloud);
  const SurfaceFrame skew_frame =
      estimate_surface_frame(skew_cloud, skew_index, center, 0.2, Vec3{0, 0, 1});
  CHECK(skew_frame.curvature_axis.y > 0.99);
}

TEST_CASE("surface frame on a sphere cap points radially") {
  const double radius = 0.05;
  std::vector<Vec3> pts;
  pts.push_back({0, 0, radius});  // pole
  for (int it = 1; it <= 8; ++it) {
    const double theta = it * 0.05;
    for (int ip = 0; ip < 24; ++ip) {
      const double phi = ip * (2.0 * kPi / 24.0);
      pts.push_back({radius * std::sin(theta) * std::cos(phi),
                     radius * std::sin(theta) * std::sin(phi),
                     radius * std::cos(theta)});
    }
  }
  const PointCloud cloud = PointCloud::make(pts);
  const SpatialIndex index = SpatialIndex::build(cloud);
  const SurfaceFrame frame =
      estimate_surface_frame(cloud, index, 0, 0.03, Vec3{0, 0, 0.2});
  CHECK(frame.normal.z > 0.999);
  CHECK(frame.eigenvalues[0] > 0.0);  // curved patch, not a perfect plane
  CHECK(frame.eigenvalues[0] < frame.eigenvalues[1]);
}

TEST_CASE("surface frame rejects degenerate neighborhoods") {
  const PointCloud three = PointCloud::make(
      {Vec3{0, 0, 0}, Vec3{0.001, 0, 0}, Vec3{0, 0.001, 0}});
  const SpatialIndex three_idx = SpatialIndex::build(three);
  CHECK(error_code_of([&] {
          estimate_surface_frame(three, three_idx, 0, 0.01, Vec3{0, 0, 1});
        }) == ErrorCode::DegenerateNeighborhood);

  std::vector<Vec3> line;
  for (int i = 0; i < 20; ++i) line.push_back({i * 0.001, 0, 0});
  const PointCloud line_cloud = PointCloud::make(line);
  const SpatialIndex line_idx = SpatialIndex::build(line_cloud);
  CHECK(error_code_of([&] {
          estimate_surface_frame(line_cloud, line_idx, 0, 0.1, Vec3{0, 0, 1});
        }) == ErrorCode::DegenerateNeighborhood);

  CHECK(error_code_of([&] {
          estimate_surface_frame(line_cloud, line_idx, 99, 0.1, Vec3{0, 0, 1});
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("surface frame is equivariant under rigid motion") {
  Rng rng(41, 0);
  std::vector<Vec3> pts;
  for (int i = 0; i < 60; ++i) {
    // Generic anisotropic blob; no symmetry, so every sign rule is driven
    // by the data rather than the lexicographic fallback.
    pts.push_back({0.03 * rng.normal(), 0.015 * rng.normal(),
                   0.005 * rng.normal()});
  }
  const PointCloud cloud = PointCloud::make(pts);
  const SpatialIndex index = SpatialIndex::build(cloud);
  const Vec3 viewpoint{0.02, -0.05, 0.3};
  const SurfaceFrame base =
      estimate_surface_frame(cloud, index, 0, 1.0, viewpoint);

  for (int trial = 0; trial < 20; ++trial) {
    const RigidTransform t{random_rotation(rng), random_vec(rng, 0.5)};
    const PointCloud moved = cloud.transformed(t);
    const SpatialIndex moved_index = SpatialIndex::build(moved);
    const SurfaceFrame got =
        estimate_surface_frame(moved, moved_index, 0, 1.0, t.apply(viewpoint));
    CHECK(approx_vec(got.point, t.apply(base.point), 1e-9));
    CHECK(approx_vec(got.normal, t.rotation.rotate(base.normal), 1e-6));
    CHECK(approx_vec(got.curvature_axis,
                     t.rotation.rotate(base.curvature_axis), 1e-6));
    CHECK(approx_vec(got.binormal, t.rotation.rotate(base.binormal), 1e-6));
  }
}

TEST_CASE("ply round trips byte-for-byte") {
  Rng rng(51, 0);
  std::vector<Vec3> pts, nrm;
  std::vector<uint8_t> tags;
  for (int i = 0; i < 40; ++i) {
    pts.push_back(random_vec(rng, 0.7));
    Vec3 n{rng.normal(), rng.normal(), rng.normal()};
    nrm.push_back(n.normalized());
    tags.push_back(static_cast<uint8_t>(rng.below(2)));
  }
  pts.push_back({1e-300, -0.0, 1.7976931348623157e308});
  nrm.push_back({0, 0, 1});
  tags.push_back(1);

  const PointCloud cloud = PointCloud::make(pts, nrm, tags);
  const std::string text = format_ply(cloud);
  const PointCloud parsed = parse_ply(text);
  REQUIRE(parsed.size() == cloud.size());
  CHECK(parsed.has_normals());
  CHECK(parsed.has_view_tags());
  CHECK(std::memcmp(parsed.points().data(), cloud.points().data(),
                    cloud.size() * sizeof(Vec3)) == 0);
  CHECK(std::memcmp(parsed.normals().data(), cloud.normals().data(),
                    cloud.size() * sizeof(Vec3)) == 0);
  CHECK(parsed.view_tags() == cloud.view_tags());
  CHECK(format_ply(parsed) == text);

  // Plain xyz cloud and the empty cloud also survive.
  const PointCloud bare = PointCloud::make(pts);
  CHECK(format_ply(parse_ply(format_ply(bare))) == format_ply(bare));
  const PointCloud empty = parse_ply(format_ply(PointCloud()));
  CHECK(empty.empty());
}

TEST_CASE("ply parser accepts alternate normal names and extra columns") {
  const std::string text =
      "ply\n"
      "format ascii 1.0\n"
      "comment exported elsewhere\n"
      "element vertex 2\n"
      "property float x\n"
      "property float y\n"
      "property float z\n"
      "property float normal_x\n"
      "property float normal_y\n"
      "property float normal_z\n"
      "property float intensity\n"
      "element face 0\n"
      "property uchar ignored\n"
      "end_header\n"
      "0 0 0 0 0 1 0.5\n"
      "0.1 0.2 0.3 1 0 0 0.9\n";
  const PointCloud cloud = parse_ply(text);
  REQUIRE(cloud.size() == 2);
  REQUIRE(cloud.has_normals());
  CHECK(cloud.normal(0).z == 1.0);
  CHECK(cloud.normal(1).x == 1.0);
  CHECK(cloud.point(1).y == 0.2);
}

TEST_CASE("ply parser reports structured failures") {
  const auto code_for = [](const std::string& text) {
    return error_code_of([&] { parse_ply(text); });
  };
  const std::string good_header =
      "ply\nformat ascii 1.0\nelement vertex 2\nproperty double x\n"
      "property double y\nproperty double z\nend_header\n";

  CHECK(code_for("") == ErrorCode::MalformedHeader);
  CHECK(code_for("solid\n0 0 0\n") == ErrorCode::MalformedHeader);
  CHECK(code_for("ply\nformat binary_little_endian 1.0\nelement vertex 0\n"
                 "property float x\nproperty float y\nproperty float z\n"
                 "end_header\n") == ErrorCode::MalformedHeader);
  CHECK(code_for("ply\nformat ascii 1.0\nend_header\n") ==
        ErrorCode::MalformedHeader);
  CHECK(code_for("ply\nformat ascii 1.0\nproperty double x\nelement vertex 0\n"
                 "end_header\n") == ErrorCode::MalformedHeader);
  CHECK(code_for("ply\nformat ascii 1.0\nelement vertex 0\nproperty double x\n"
                 "property double y\nend_header\n") ==
        ErrorCode::MalformedHeader);
  CHECK(code_for("ply\nformat ascii 1.0\nelement vertex 0\nproperty double x\n"
                 "property double y\nproperty double z\nproperty double nx\n"
                 "end_header\n") == ErrorCode::MalformedHeader);
  CHECK(code_for("ply\nformat ascii 1.0\nelement vertex 1\n"
                 "property list uchar int vertex_indices\nend_header\n") ==
        ErrorCode::MalformedHeader);
  CHECK(code_for("ply\nformat ascii 1.0\nelement face 3\nend_header\n") ==
        ErrorCode::MalformedHeader);
  CHECK(code_for(good_header.substr(0, good_header.size() - 11)) ==
        ErrorCode::MalformedHeader);  // no end_header

  CHECK(code_for(good_header + "0 0 0\n") == ErrorCode::CountMismatch);
  CHECK(code_for(good_header + "0 0 0\n1 1 1\n2 2 2\n") ==
        ErrorCode::CountMismatch);
  CHECK(code_for(good_header + "0 0\n1 1 1\n") == ErrorCode::BadFloat);
  CHECK(code_for(good_header + "0 0 0 0\n1 1 1\n") == ErrorCode::BadFloat);
  CHECK(code_for(good_header + "0 zero 0\n1 1 1\n") == ErrorCode::BadFloat);
  CHECK(code_for(good_header + "0 nan 0\n1 1 1\n") == ErrorCode::BadFloat);

  const std::string normal_header =
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\n"
      "property double y\nproperty double z\nproperty double nx\n"
      "property double ny\nproperty double nz\nend_header\n";
  CHECK(code_for(normal_header + "0 0 0 0 0 0.5\n") == ErrorCode::BadFloat);

  const std::string view_header =
      "ply\nformat ascii 1.0\nelement vertex 1\nproperty double x\n"
      "property double y\nproperty double z\nproperty uchar view\n"
      "end_header\n";
  CHECK(code_for(view_header + "0 0 0 300\n") == ErrorCode::BadFloat);
  CHECK(code_for(view_header + "0 0 0 1.5\n") == ErrorCode::BadFloat);
  CHECK(parse_ply(view_header + "0 0 0 1\n").view_tag(0) == 1);
}

TEST_CASE("scene json round trips") {
  Scene scene;
  scene.table_height = 0.02;
  ObjectInstance obj;
  obj.shape_id = "bar_long";
  obj.pose.rotation = Quatern::from_axis_angle(Vec3{0, 0, 1}, 0.7);
  obj.pose.translation = {0.1, -0.2, 0.02};
  obj.scale = {1.0, 1.0, 1.25};
  scene.objects.push_back(obj);
  ObjectInstance obj2;
  obj2.shape_id = "mug";
  obj2.pose.rotation = Quatern::identity();
  obj2.pose.translation = {-0.05, 0.07, 0.02};
  scene.objects.push_back(obj2);
  scene.cameras.push_back({Vec3{0.5, 0, 0.6}, Vec3{0, 0, 0}});
  scene.cameras.push_back({Vec3{0.3, 0.4, 0.6}, Vec3{0, 0, 0}});

  const std::string text = format_scene_json(scene);
  const Scene parsed = parse_scene_json(text);
  REQUIRE(parsed.objects.size() == 2);
  REQUIRE(parsed.cameras.size() == 2);
  CHECK(parsed.table_height == scene.table_height);
  CHECK(parsed.objects[0].shape_id == "bar_long");
  CHECK(approx_vec(parsed.objects[0].pose.translation,
                   obj.pose.translation, 0.0));
  CHECK(std::fabs(parsed.objects[0].pose.rotation.w - obj.pose.rotation.w) <
        1e-15);
  CHECK(approx_vec(parsed.objects[0].scale, obj.scale, 0.0));
  CHECK(approx_vec(parsed.cameras[1].position, Vec3{0.3, 0.4, 0.6}, 0.0));
  // Serialization is a fixed point.
  CHECK(format_scene_json(parsed) == text);
}

TEST_CASE("scene json reports structured failures") {
  const auto code_for = [](const std::string& text) {
    return error_code_of([&] { parse_scene_json(text); });
  };
  const std::string ok_camera =
      "\"cameras\":[{\"position\":[1,0,0.5],\"look_at\":[0,0,0]}]";

  CHECK(code_for("not json at all") == ErrorCode::SchemaViolation);
  CHECK(code_for("[]") == ErrorCode::SchemaViolation);
  CHECK(code_for("{\"objects\":[]," + ok_camera + "}") ==
        ErrorCode::SchemaViolation);  // missing table_height
  CHECK(code_for("{\"table_height\":\"low\",\"objects\":[]," + ok_camera +
                 "}") == ErrorCode::SchemaViolation);
  CHECK(code_for("{\"table_height\":0,\"objects\":{}," + ok_camera + "}") ==
        ErrorCode::SchemaViolation);
  CHECK(code_for("{\"table_height\":0,\"objects\":[]}") ==
        ErrorCode::SchemaViolation);  // missing cameras
  CHECK(code_for("{\"table_height\":0,\"objects\":[],\"cameras\":[]}") ==
        ErrorCode::SchemaViolation);  // no cameras
  CHECK(code_for("{\"table_height\":0,\"objects\":[],\"cameras\":"
                 "[{\"position\":[0,0,1],\"look_at\":[0,0,1]}]}") ==
        ErrorCode::SchemaViolation);  // camera looks at itself

  const std::string obj_prefix = "{\"table_height\":0,\"objects\":[";
  const std::string obj_suffix = "]," + ok_camera + "}";
  CHECK(code_for(obj_prefix + "{\"pose\":{\"rotation_wxyz\":[1,0,0,0],"
                 "\"translation\":[0,0,0]}}" + obj_suffix) ==
        ErrorCode::SchemaViolation);  // missing shape_id
  CHECK(code_for(obj_prefix + "{\"shape_id\":\"\",\"pose\":{\"rotation_wxyz\":"
                 "[1,0,0,0],\"translation\":[0,0,0]}}" + obj_suffix) ==
        ErrorCode::SchemaViolation);
  CHECK(code_for(obj_prefix + "{\"shape_id\":\"b\",\"pose\":{\"rotation_wxyz\":"
                 "[0,0,0,0],\"translation\":[0,0,0]}}" + obj_suffix) ==
        ErrorCode::SchemaViolation);  // zero-norm rotation
  CHECK(code_for(obj_prefix + "{\"shape_id\":\"b\",\"pose\":{\"rotation_wxyz\":"
                 "[1,0,0],\"translation\":[0,0,0]}}" + obj_suffix) ==
        ErrorCode::SchemaViolation);  // wrong arity
  CHECK(code_for(obj_prefix + "{\"shape_id\":\"b\",\"pose\":{\"rotation_wxyz\":"
                 "[1,0,0,0],\"translation\":[0,0,1e999]}}" + obj_suffix) ==
        ErrorCode::SchemaViolation);  // non-finite number
  CHECK(code_for(obj_prefix + "{\"shape_id\":\"b\",\"pose\":{\"rotation_wxyz\":"
                 "[1,0,0,0],\"translation\":[0,0,0]},\"scale\":[1,-1,1]}" +
                 obj_suffix) == ErrorCode::NonPositiveScale);

  // The reported path pinpoints the offending field.
  try {
    parse_scene_json(obj_prefix +
                     "{\"shape_id\":\"b\",\"pose\":{\"rotation_wxyz\":"
                     "[1,0,0,0],\"translation\":[0,\"a\",0]}}" + obj_suffix);
    FAIL("expected SchemaViolation");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("$.objects[0].pose.translation[1]") !=
          std::string::npos);
  }
}

TEST_CASE("point cloud construction validates invariants") {
  CHECK(error_code_of([] {
          PointCloud::make({Vec3{0, 0, 0}}, {Vec3{0, 0, 1}, Vec3{0, 0, 1}});
        }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] {
          PointCloud::make({Vec3{0, 0, std::nan("")}});
        }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] {
          PointCloud::make({Vec3{0, 0, 0}}, {Vec3{0, 0, 0.5}});
        }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] {
          PointCloud::make({Vec3{0, 0, 0}}, {}, {0, 1});
        }) == ErrorCode::InvalidArgument);

  const PointCloud a = PointCloud::make({Vec3{0, 0, 0.1}, Vec3{0, 0, -0.1}},
                                        {Vec3{0, 0, 1}, Vec3{0, 0, -1}},
                                        {0, 0});
  const PointCloud b = PointCloud::make({Vec3{1, 0, 0.2}});

  // Filtering keeps parallel arrays aligned.
  const PointCloud above = a.above_plane(0.0, 0.01);
  REQUIRE(above.size() == 1);
  CHECK(above.point(0).z == 0.1);
  CHECK(above.normal(0).z == 1.0);
  CHECK(above.view_tag(0) == 0);

  // Merging drops normals/tags unless both sides carry them.
  const PointCloud merged = a.merged(b);
  CHECK(merged.size() == 3);
  CHECK(!merged.has_normals());
  CHECK(!merged.has_view_tags());

  const RigidTransform t{Quatern::from_axis_angle(Vec3{1, 0, 0}, kPi / 2),
                         Vec3{0, 0, 1}};
  const PointCloud moved = a.transformed(t);
  CHECK(approx_vec(moved.normal(0), Vec3{0, -1, 0}, 1e-12));
  CHECK(approx_vec(moved.point(0), Vec3{0, -0.1, 1}, 1e-12));

  CHECK(std::string(error_code_name(ErrorCode::BadFloat)) == "BadFloat");
  CHECK(std::string(error_code_name(ErrorCode::NoFeasibleGrasp)) ==
        "NoFeasibleGrasp");
}
