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
#include <array>
#include <cmath>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "helpers.hpp"
#include "multigrasp/candidates.hpp"
#include "multigrasp/cloud.hpp"
#include "multigrasp/encoding.hpp"
#include "multigrasp/error.hpp"
#include "multigrasp/geom.hpp"
#include "multigrasp/gripper.hpp"
#include "multigrasp/kdtree.hpp"
#include "multigrasp/rng.hpp"

using namespace mg;
using namespace mgtest;

namespace {

constexpr double kStep = kPi / 180.0;

bool near_vec(const Vec3& a, const Vec3& b, double tol) {
  return (a - b).norm() <= tol;
}

bool near_mat(const Mat3& a, const Mat3& b, double tol) {
  for (int i = 0; i < 9; ++i) {
    if (std::fabs(a.m[i] - b.m[i]) > tol) return false;
  }
  return true;
}

/// Test-side flexion directions, written out per mode and finger rather
/// than derived through the library's spread logic.
Vec3 expected_flex_dir(HandMode mode, int finger) {
  const double c = std::cos(deg_to_rad(16.0));
  const double s = std::sin(deg_to_rad(16.0));
  if (finger == 2) return {1, 0, 0};
  if (mode == HandMode::Basic) return {-1, 0, 0};
  if (mode == HandMode::Wide) {
    return finger == 0 ? Vec3{-c, s, 0} : Vec3{-c, -s, 0};
  }
  return finger == 0 ? Vec3{-c, -s, 0} : Vec3{-c, s, 0};
}

Vec3 expected_base(const GripperConfig& cfg, int finger) {
  return finger == 2 ? cfg.thumb_base : cfg.finger_base[finger];
}

struct OracleLink {
  Vec3 center;
  Vec3 xaxis, yaxis, zaxis;
  Vec3 near_end, far_end;
};

/// Planar finger kinematics recomputed from scratch: each link pivots in
/// the (flex_dir, z) plane by the running sum of joint angles.
std::array<OracleLink, 3> oracle_finger(const GripperConfig& cfg,
                                        const Vec3& base, const Vec3& dhat,
                                        const double angles[3]) {
  const Vec3 zhat{0, 0, 1};
  const Vec3 yaxis = cross(zhat, dhat);
  std::array<OracleLink, 3> links;
  Vec3 p = base;
  double a = 0.0;
  for (int i = 0; i < 3; ++i) {
    a += angles[i];
    const Vec3 u = std::cos(a) * zhat + std::sin(a) * dhat;
    links[i].near_end = p;
    links[i].far_end = p + u * cfg.link_lengths[i];
    links[i].center = p + u * (cfg.link_lengths[i] * 0.5);
    links[i].zaxis = u;
    links[i].xaxis = std::cos(a) * dhat - std::sin(a) * zhat;
    links[i].yaxis = yaxis;
    p = links[i].far_end;
  }
  return links;
}

ContactSurface surface_from(const SurfaceSamples& s,
                            double table_height = kNoTable) {
  return ContactSurface::make(s.points, s.normals, s.shape_ids, table_height);
}

PointCloud plane_grid_cloud(int per_side, double spacing) {
  std::vector<Vec3> pts;
  const double off = 0.5 * spacing * (per_side - 1);
  for (int i = 0; i < per_side; ++i) {
    for (int j = 0; j < per_side; ++j) {
      pts.push_back({i * spacing - off, j * spacing - off, 0.0});
    }
  }
  return PointCloud::make(std::move(pts));
}

PointCloud gaussian_blob_cloud(Rng& rng, int n, double scale) {
  std::vector<Vec3> pts;
  pts.reserve(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    pts.push_back({rng.normal() * scale, rng.normal() * 0.8 * scale,
                   rng.normal() * 0.5 * scale});
  }
  return PointCloud::make(std::move(pts));
}

int first_contact_steps(const FingerClosing& fc, int phase) {
  return static_cast<int>(std::llround(fc.joints[phase] / kStep));
}

/// Exhaustive re-implementation of the pruning rule used as an oracle.
bool brute_survives(const GraspCandidate& cand, const PointCloud& cloud,
                    const GripperConfig& cfg,
                    const std::vector<GraspType>& types, int min_region) {
  for (GraspType type : types) {
    const GripperPose pose = standoff_pose(cand, type, cfg);
    const BodySet bodies = body_set(pose, type, cfg, JointState::open());
    bool hit = false;
    for (const Vec3& p : cloud.points()) {
      for (const TaggedBox& tb : bodies.boxes) {
        if (tb.tag == BodyTag::Sweep) continue;
        if (brute_box_contains(tb.box, p, cfg.collision_margin)) {
          hit = true;
          break;
        }
      }
      if (hit) break;
    }
    if (hit) continue;
    int count = 0;
    for (const Vec3& p : cloud.points()) {
      for (const TaggedBox& tb : bodies.boxes) {
        if (tb.tag != BodyTag::Sweep) continue;
        if (brute_box_contains(tb.box, p, 0.0)) {
          ++count;
          break;
        }
      }
    }
    if (count >= min_region) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("grasp type traits") {
  CHECK(mode_of(GraspType::WidePower) == HandMode::Wide);
  CHECK(mode_of(GraspType::WidePrecision) == HandMode::Wide);
  CHECK(mode_of(GraspType::BasicPower) == HandMode::Basic);
  CHECK(mode_of(GraspType::BasicPrecision) == HandMode::Basic);
  CHECK(mode_of(GraspType::Pincher) == HandMode::Pincher);

  CHECK(grip_of(GraspType::WidePower) == GripStyle::Encompassing);
  CHECK(grip_of(GraspType::BasicPower) == GripStyle::Encompassing);
  CHECK(grip_of(GraspType::WidePrecision) == GripStyle::Fingertip);
  CHECK(grip_of(GraspType::BasicPrecision) == GripStyle::Fingertip);
  CHECK(grip_of(GraspType::Pincher) == GripStyle::Fingertip);

  const auto types = all_grasp_types();
  CHECK(types.size() == kNumGraspTypes);
  for (GraspType t : types) {
    CHECK(grasp_type_from_name(grasp_type_name(t)) == t);
  }
  CHECK(std::string(grasp_type_name(GraspType::Pincher)) == "pincher");
  CHECK(error_code_of([] { grasp_type_from_name("power"); }) ==
        ErrorCode::InvalidArgument);
}

TEST_CASE("gripper config validation and JSON round trip") {
  const GripperConfig def;
  CHECK_NOTHROW(def.validate());

  const std::string text = format_gripper_config_json(def);
  const GripperConfig back = parse_gripper_config_json(text);
  CHECK(back.d_encompassing == def.d_encompassing);
  CHECK(back.d_fingertip == def.d_fingertip);
  CHECK(near_vec(back.palm_half, def.palm_half, 0.0));
  CHECK(near_vec(back.finger_base[0], def.finger_base[0], 0.0));
  CHECK(near_vec(back.finger_base[1], def.finger_base[1], 0.0));
  CHECK(near_vec(back.thumb_base, def.thumb_base, 0.0));
  for (int i = 0; i < 3; ++i) CHECK(back.link_lengths[i] == def.link_lengths[i]);
  CHECK(back.spread_angle == def.spread_angle);
  CHECK(back.joint_limit == def.joint_limit);
  CHECK(back.close_step == def.close_step);
  CHECK(back.collision_margin == def.collision_margin);
  CHECK(back.sweep_half_width == def.sweep_half_width);
  // Serializing twice is byte-identical.
  CHECK(format_gripper_config_json(back) == text);

  CHECK(error_code_of([] { parse_gripper_config_json("not json"); }) ==
        ErrorCode::SchemaViolation);
  CHECK(error_code_of([] { parse_gripper_config_json("[1,2]"); }) ==
        ErrorCode::SchemaViolation);
  CHECK(error_code_of([] {
          parse_gripper_config_json(R"({"grip_force": 1.0})");
        }) == ErrorCode::SchemaViolation);
  CHECK(error_code_of([] {
          parse_gripper_config_json(R"({"palm_half": [1, 2]})");
        }) == ErrorCode::SchemaViolation);
  CHECK(error_code_of([] {
          parse_gripper_config_json(R"({"d_fingertip": "far"})");
        }) == ErrorCode::SchemaViolation);
  // Structurally valid but physically impossible values fail validation.
  CHECK(error_code_of([] {
          parse_gripper_config_json(R"({"d_fingertip": 0.001})");
        }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] {
          parse_gripper_config_json(R"({"link_lengths": [0.05, -0.01, 0.02]})");
        }) == ErrorCode::InvalidArgument);

  GripperConfig bad = def;
  bad.close_step = 0.0;
  CHECK(error_code_of([&] { bad.validate(); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("oriented box helpers match brute force") {
  Rng rng(31);
  for (int iter = 0; iter < 50; ++iter) {
    OrientedBox box;
    box.center = random_vec(rng, 0.5);
    box.half = {rng.uniform(0.01, 0.3), rng.uniform(0.01, 0.3),
                rng.uniform(0.01, 0.3)};
    box.rot = random_rotation(rng);
    CHECK(box.min_z() == doctest::Approx(brute_box_min_z(box)).epsilon(1e-12));
    for (int t = 0; t < 40; ++t) {
      const Vec3 p = box.center + random_vec(rng, 0.5);
      for (double margin : {0.0, 0.01}) {
        CHECK(box.contains(p, margin) == brute_box_contains(box, p, margin));
      }
      const bool inside = box.contains(p, 0.0);
      CHECK((box.interior_depth(p) > 0.0) == inside);
    }
  }
}

TEST_CASE("open hand body layout and forward kinematics") {
  const GripperConfig cfg;
  GripperPose pose;  // identity: palm face at the origin, approach = +z
  const BodySet bodies =
      body_set(pose, GraspType::BasicPower, cfg, JointState::open());
  REQUIRE(bodies.boxes.size() == 13);

  // Fixed layout: palm, then finger 0/1/thumb links base-to-tip, then the
  // three sweep slabs.
  CHECK(bodies.boxes[0].tag == BodyTag::Palm);
  CHECK(bodies.boxes[0].finger == -1);
  const BodyTag link_tags[3] = {BodyTag::Proximal, BodyTag::Medial,
                                BodyTag::Distal};
  for (int f = 0; f < 3; ++f) {
    for (int i = 0; i < 3; ++i) {
      const TaggedBox& tb = bodies.boxes[static_cast<size_t>(1 + 3 * f + i)];
      CHECK(tb.tag == link_tags[i]);
      CHECK(tb.finger == f);
    }
    const TaggedBox& sweep = bodies.boxes[static_cast<size_t>(10 + f)];
    CHECK(sweep.tag == BodyTag::Sweep);
    CHECK(sweep.finger == f);
  }

  // Palm solid sits entirely behind the palm face.
  const OrientedBox& palm = bodies.boxes[0].box;
  CHECK(near_vec(palm.center, {0, 0, -0.03}, 1e-15));
  CHECK(near_vec(palm.half, {0.06, 0.06, 0.03}, 0.0));
  CHECK(near_mat(palm.rot.to_matrix(), Mat3::identity(), 1e-15));

  // Straight fingers: each link is a box stacked along +z above its base.
  for (int f = 0; f < 3; ++f) {
    double z0 = 0.0;
    const Vec3 base = expected_base(cfg, f);
    for (int i = 0; i < 3; ++i) {
      const OrientedBox& link = bodies.boxes[static_cast<size_t>(1 + 3 * f + i)].box;
      const double half_len = cfg.link_lengths[i] * 0.5;
      CHECK(near_vec(link.center, base + Vec3{0, 0, z0 + half_len}, 1e-15));
      CHECK(near_vec(link.half, {0.005, 0.005, half_len}, 0.0));
      // The box +z axis points along the link regardless of mode.
      CHECK(near_vec(link.rot.rotate({0, 0, 1}), {0, 0, 1}, 1e-12));
      z0 += cfg.link_lengths[i];
    }
    CHECK(z0 == doctest::Approx(0.118).epsilon(1e-12));
  }

  // Thumb link frames coincide with the gripper frame when open.
  const OrientedBox& thumb_prox = bodies.boxes[7].box;
  CHECK(near_mat(thumb_prox.rot.to_matrix(), Mat3::identity(), 1e-12));

  // Thumb sweep slab: from 6 mm behind the base to full reach, starting
  // just above the palm face.
  const OrientedBox& thumb_sweep = bodies.boxes[12].box;
  CHECK(near_vec(thumb_sweep.center, {0.011, 0.0, 0.06}, 1e-12));
  CHECK(near_vec(thumb_sweep.half, {0.062, 0.012, 0.058}, 1e-12));
  CHECK(near_mat(thumb_sweep.rot.to_matrix(), Mat3::identity(), 1e-12));
}

TEST_CASE("bent fingers follow the planar chain oracle") {
  const GripperConfig cfg;
  Rng rng(47);
  for (HandMode mode : {HandMode::Wide, HandMode::Basic, HandMode::Pincher}) {
    const GraspType type = mode == HandMode::Wide    ? GraspType::WidePower
                           : mode == HandMode::Basic ? GraspType::BasicPower
                                                     : GraspType::Pincher;
    for (int iter = 0; iter < 20; ++iter) {
      JointState js;
      for (int f = 0; f < 3; ++f) {
        for (int j = 0; j < 3; ++j) {
          js.angles[f][j] = rng.uniform(0.0, kPi / 2.0);
        }
      }
      const BodySet bodies = body_set(GripperPose{}, type, cfg, js);
      for (int f = 0; f < 3; ++f) {
        const Vec3 base = expected_base(cfg, f);
        const Vec3 dhat = expected_flex_dir(mode, f);
        const auto oracle = oracle_finger(cfg, base, dhat, js.angles[f]);
        double run = 0.0;
        for (int i = 0; i < 3; ++i) {
          run += js.angles[f][i];
          const OrientedBox& link =
              bodies.boxes[static_cast<size_t>(1 + 3 * f + i)].box;
          CHECK(near_vec(link.center, oracle[i].center, 1e-12));
          CHECK(near_vec(link.rot.rotate({1, 0, 0}), oracle[i].xaxis, 1e-12));
          CHECK(near_vec(link.rot.rotate({0, 1, 0}), oracle[i].yaxis, 1e-12));
          CHECK(near_vec(link.rot.rotate({0, 0, 1}), oracle[i].zaxis, 1e-12));
          // Chain continuity: this link starts where the last one ended.
          const Vec3 near_end =
              link.center - link.rot.rotate({0, 0, link.half.z});
          CHECK(near_vec(near_end, oracle[i].near_end, 1e-12));
        }
        // Scalar check on the fingertip: height above the palm face is the
        // sum of link lengths times the cosines of the running bend.
        const OrientedBox& distal = bodies.boxes[static_cast<size_t>(3 + 3 * f)].box;
        const Vec3 tip = distal.center + distal.rot.rotate({0, 0, distal.half.z});
        double a = 0.0, tip_z = 0.0, tip_d = 0.0;
        for (int i = 0; i < 3; ++i) {
          a += js.angles[f][i];
          tip_z += cfg.link_lengths[i] * std::cos(a);
          tip_d += cfg.link_lengths[i] * std::sin(a);
        }
        CHECK(tip.z == doctest::Approx(tip_z).epsilon(1e-12));
        CHECK(near_vec(tip, base + Vec3{0, 0, tip_z} + tip_d * dhat, 1e-12));
      }
    }
  }
}

TEST_CASE("spread rotates a finger about its own base") {
  const GripperConfig cfg;
  Rng rng(53);
  JointState js;
  for (int f = 0; f < 3; ++f) {
    for (int j = 0; j < 3; ++j) js.angles[f][j] = rng.uniform(0.0, 1.3);
  }
  const BodySet basic = body_set(GripperPose{}, GraspType::BasicPower, cfg, js);
  const BodySet wide = body_set(GripperPose{}, GraspType::WidePower, cfg, js);
  const BodySet pinch = body_set(GripperPose{}, GraspType::Pincher, cfg, js);

  const auto check_rotated = [&](const BodySet& got, int finger, double sign) {
    const Quatern rz =
        Quatern::from_axis_angle({0, 0, 1}, sign * cfg.spread_angle);
    const Vec3 base = expected_base(cfg, finger);
    for (int i = 0; i < 3; ++i) {
      const size_t idx = static_cast<size_t>(1 + 3 * finger + i);
      const OrientedBox& b = basic.boxes[idx].box;
      const OrientedBox& g = got.boxes[idx].box;
      CHECK(near_vec(g.center, base + rz.rotate(b.center - base), 1e-12));
      CHECK(near_mat(g.rot.to_matrix(), (rz * b.rot).to_matrix(), 1e-12));
      CHECK(near_vec(g.half, b.half, 0.0));
    }
  };
  check_rotated(wide, 0, -1.0);
  check_rotated(wide, 1, 1.0);
  check_rotated(pinch, 0, 1.0);
  check_rotated(pinch, 1, -1.0);

  // The thumb never spreads: identical boxes in every mode.
  for (int i = 7; i <= 9; ++i) {
    CHECK(near_vec(basic.boxes[i].box.center, wide.boxes[i].box.center, 0.0));
    CHECK(near_vec(basic.boxes[i].box.center, pinch.boxes[i].box.center, 0.0));
  }
}

TEST_CASE("standoff distances and poses") {
  const GripperConfig cfg;
  CHECK(standoff_distance(GraspType::WidePower, cfg) == 0.019);
  CHECK(standoff_distance(GraspType::BasicPower, cfg) == 0.019);
  CHECK(standoff_distance(GraspType::WidePrecision, cfg) == 0.0822);
  CHECK(standoff_distance(GraspType::BasicPrecision, cfg) == 0.0822);
  CHECK(standoff_distance(GraspType::Pincher, cfg) == 0.0822);

  Rng rng(61);
  for (int iter = 0; iter < 20; ++iter) {
    GraspCandidate cand;
    cand.centroid = random_vec(rng, 0.5);
    cand.orientation = random_rotation(rng);
    for (GraspType t : all_grasp_types()) {
      const GripperPose pose = standoff_pose(cand, t, cfg);
      const double d = standoff_distance(t, cfg);
      CHECK(near_vec(pose.palm_center + d * pose.approach(), cand.centroid,
                     1e-12));
      CHECK(pose.orientation.w == cand.orientation.w);
      CHECK(pose.orientation.z == cand.orientation.z);
      // The palm stands back along the approach; re-approaching from the
      // palm recovers the grasp point.
      CHECK(near_vec(pose.approach(), cand.approach(), 0.0));
    }
  }
}

TEST_CASE("joint limits are enforced") {
  const GripperConfig cfg;
  JointState js;
  js.angles[1][2] = -0.01;
  CHECK(error_code_of([&] {
          body_set(GripperPose{}, GraspType::BasicPower, cfg, js);
        }) == ErrorCode::JointOutOfRange);
  js.angles[1][2] = cfg.joint_limit + 0.01;
  CHECK(error_code_of([&] {
          body_set(GripperPose{}, GraspType::BasicPower, cfg, js);
        }) == ErrorCode::JointOutOfRange);
  js.angles[1][2] = cfg.joint_limit;  // exact boundary is fine
  CHECK_NOTHROW(body_set(GripperPose{}, GraspType::BasicPower, cfg, js));
}

TEST_CASE("sweep slabs clear the palm solid") {
  const GripperConfig cfg;
  for (GraspType type :
       {GraspType::WidePower, GraspType::BasicPower, GraspType::Pincher}) {
    const BodySet bodies =
        body_set(GripperPose{}, type, cfg, JointState::open());
    const OrientedBox& palm = bodies.boxes[0].box;
    for (double x = -cfg.palm_half.x; x <= cfg.palm_half.x; x += 0.01) {
      for (double y = -cfg.palm_half.y; y <= cfg.palm_half.y; y += 0.01) {
        for (double z = -2 * cfg.palm_half.z; z <= 0.0; z += 0.005) {
          const Vec3 p{x, y, z};
          REQUIRE(palm.contains(p, 1e-12));
          for (int f = 0; f < 3; ++f) {
            REQUIRE_FALSE(
                bodies.boxes[static_cast<size_t>(10 + f)].box.contains(p, 0.0));
          }
        }
      }
    }
  }
}

TEST_CASE("collision and sweep counts match exhaustive checks") {
  const GripperConfig cfg;
  Rng rng(71);
  for (int iter = 0; iter < 60; ++iter) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 200; ++i) pts.push_back(random_vec(rng, 0.12));
    const PointCloud cloud = PointCloud::make(pts);
    const SpatialIndex index = SpatialIndex::build(cloud);

    GripperPose pose;
    pose.palm_center = random_vec(rng, 0.05);
    pose.orientation = random_rotation(rng);
    JointState js;
    for (int f = 0; f < 3; ++f) {
      for (int j = 0; j < 3; ++j) js.angles[f][j] = rng.uniform(0.0, kPi / 2);
    }
    const GraspType type =
        all_grasp_types()[static_cast<size_t>(rng.below(kNumGraspTypes))];
    const BodySet bodies = body_set(pose, type, cfg, js);

    for (double margin : {0.0, 0.005, 0.02}) {
      bool brute_hit = false;
      for (const Vec3& p : pts) {
        for (const TaggedBox& tb : bodies.boxes) {
          if (tb.tag == BodyTag::Sweep) continue;
          if (brute_box_contains(tb.box, p, margin)) {
            brute_hit = true;
            break;
          }
        }
        if (brute_hit) break;
      }
      CHECK(collides(bodies, index, margin) == brute_hit);
    }

    int brute_region = 0;
    for (const Vec3& p : pts) {
      for (const TaggedBox& tb : bodies.boxes) {
        if (tb.tag != BodyTag::Sweep) continue;
        if (brute_box_contains(tb.box, p, 0.0)) {
          ++brute_region;
          break;
        }
      }
    }
    CHECK(count_region_points(bodies, index) == brute_region);
  }
}

TEST_CASE("closing on nothing reaches the joint limits") {
  const GripperConfig cfg;
  const ContactSurface empty = ContactSurface::make({}, {}, {});
  const ClosingReport report =
      close_fingers(GripperPose{}, GraspType::BasicPower, cfg, empty);
  for (const FingerClosing& fc : report.fingers) {
    CHECK_FALSE(fc.blocked);
    CHECK(fc.contacts.empty());
    for (double a : fc.joints) {
      CHECK(a == doctest::Approx(kPi / 2).epsilon(1e-12));
    }
  }
  // A tabletop far below the hand changes nothing.
  SurfaceSamples none;
  const ClosingReport with_floor = close_fingers(
      GripperPose{}, GraspType::BasicPower, cfg, surface_from(none, -10.0));
  CHECK(with_floor.fingers[0].contacts.empty());
  CHECK(with_floor.fingers[2].joints[2] ==
        doctest::Approx(kPi / 2).epsilon(1e-12));
}

TEST_CASE("shallow slab yields proximal-first contacts that wrap") {
  const GripperConfig cfg;
  // A wide, shallow slab spanning the space between the open fingers at the
  // encompassing standoff: the straight fingers brush its sides first, so
  // every first contact lands on a proximal link and the more distal links
  // keep wrapping over the top.
  SurfaceSamples slab;
  append_box_surface(slab, {0, 0, 0.034}, {0.03, 0.12, 0.015}, 0.002, 5);
  const ContactSurface surface = surface_from(slab);

  const ClosingReport report =
      close_fingers(GripperPose{}, GraspType::WidePower, cfg, surface);

  int proximal_first = 0;
  for (int f = 0; f < 3; ++f) {
    const FingerClosing& fc = report.fingers[f];
    REQUIRE(fc.contacts.size() == 2);
    CHECK(fc.contacts[0].link == 0);
    CHECK(fc.contacts[0].shape_id == 5);
    CHECK(fc.contacts[1].link == 2);
    CHECK(fc.contacts[1].shape_id == 5);
    CHECK(fc.blocked);
    if (fc.contacts[0].link == 0) ++proximal_first;
  }
  CHECK(proximal_first == 3);

  // Thumb contact steps derived by hand: its flexion plane is the world
  // x-z plane, where the 2D chain geometry can be solved exactly.
  CHECK(first_contact_steps(report.fingers[2], 0) == 12);
  CHECK(first_contact_steps(report.fingers[2], 1) == 80);
  // The spread fingers brush the slab a little earlier than the thumb
  // (their tilted cross-section widens the effective reach) and mirror one
  // another exactly.
  const int f0_first = first_contact_steps(report.fingers[0], 0);
  CHECK(f0_first == first_contact_steps(report.fingers[1], 0));
  CHECK(f0_first >= 9);
  CHECK(f0_first <= 13);
  const int f0_second = first_contact_steps(report.fingers[0], 1);
  CHECK(f0_second == first_contact_steps(report.fingers[1], 1));
  CHECK(f0_second >= 75);
  CHECK(f0_second <= 85);
  // The distal phase never ran.
  for (int f = 0; f < 3; ++f) CHECK(report.fingers[f].joints[2] == 0.0);
}

TEST_CASE("small sphere at fingertip depth is caught by the distal links") {
  const GripperConfig cfg;
  const Vec3 center{0, 0, cfg.d_fingertip + 0.02};
  SurfaceSamples ball;
  append_sphere_surface(ball, center, 0.02, 0.002, 3);
  const ContactSurface surface = surface_from(ball);

  const ClosingReport report =
      close_fingers(GripperPose{}, GraspType::Pincher, cfg, surface);
  for (int f = 0; f < 3; ++f) {
    const FingerClosing& fc = report.fingers[f];
    REQUIRE(fc.contacts.size() == 1);
    CHECK(fc.contacts[0].link == 2);
    CHECK(fc.contacts[0].shape_id == 3);
    CHECK(fc.blocked);
    // Reported normals face outward from the sphere.
    CHECK(dot(fc.contacts[0].normal, fc.contacts[0].point - center) > 0.0);
    CHECK((fc.contacts[0].point - center).norm() ==
          doctest::Approx(0.02).epsilon(1e-9));
  }
  // Converging fingers reach the ball later than the thumb, whose flexion
  // plane passes straight through the sphere center.
  const int thumb_steps = first_contact_steps(report.fingers[2], 0);
  CHECK(thumb_steps >= 10);
  CHECK(thumb_steps <= 13);
  for (int f = 0; f < 2; ++f) {
    const int steps = first_contact_steps(report.fingers[f], 0);
    CHECK(steps >= 18);
    CHECK(steps <= 23);
  }
}

TEST_CASE("closing stops on the tabletop") {
  const GripperConfig cfg;
  // Hand pointing straight down over a 3 cm object: at the encompassing
  // standoff the open fingers already pierce the table plane.
  SurfaceSamples nub;
  append_box_surface(nub, {0, 0, 0.015}, {0.015, 0.015, 0.015}, 0.002, 9);
  const ContactSurface surface = surface_from(nub, 0.0);

  GripperPose pose;
  pose.orientation = Quatern::from_axis_angle({1, 0, 0}, kPi);
  pose.palm_center = {0, 0, 0.049};

  const ClosingReport report =
      close_fingers(pose, GraspType::WidePower, cfg, surface);
  for (int f = 0; f < 3; ++f) {
    const FingerClosing& fc = report.fingers[f];
    CHECK(fc.blocked);
    REQUIRE(fc.contacts.size() == 1);
    CHECK(fc.contacts[0].link == 0);
    CHECK(fc.contacts[0].shape_id == kTableShapeId);
    CHECK(near_vec(fc.contacts[0].normal, {0, 0, 1}, 0.0));
    CHECK(fc.contacts[0].depth == doctest::Approx(0.008).epsilon(1e-9));
    CHECK(fc.contacts[0].point.z == doctest::Approx(-0.008).epsilon(1e-9));
    for (double a : fc.joints) CHECK(a == 0.0);
  }
}

TEST_CASE("closing is equivariant under rigid motion") {
  const GripperConfig cfg;
  const Vec3 center{0, 0, cfg.d_fingertip + 0.02};
  SurfaceSamples ball;
  append_sphere_surface(ball, center, 0.02, 0.002, 3);

  const ClosingReport base = close_fingers(GripperPose{}, GraspType::Pincher,
                                           cfg, surface_from(ball));

  Rng rng(83);
  for (int iter = 0; iter < 10; ++iter) {
    const RigidTransform t = random_transform(rng, 0.4);
    SurfaceSamples moved;
    for (size_t i = 0; i < ball.points.size(); ++i) {
      moved.points.push_back(t.apply(ball.points[i]));
      moved.normals.push_back(t.rotation.rotate(ball.normals[i]).normalized());
      moved.shape_ids.push_back(ball.shape_ids[i]);
    }
    GripperPose pose;
    pose.palm_center = t.apply(Vec3{0, 0, 0});
    pose.orientation = (t.rotation * Quatern::identity()).normalized();

    const ClosingReport got =
        close_fingers(pose, GraspType::Pincher, cfg, surface_from(moved));
    for (int f = 0; f < 3; ++f) {
      CHECK(got.fingers[f].blocked == base.fingers[f].blocked);
      for (int j = 0; j < 3; ++j) {
        CHECK(got.fingers[f].joints[j] == base.fingers[f].joints[j]);
      }
      REQUIRE(got.fingers[f].contacts.size() == base.fingers[f].contacts.size());
      for (size_t c = 0; c < base.fingers[f].contacts.size(); ++c) {
        const Contact& want = base.fingers[f].contacts[c];
        const Contact& have = got.fingers[f].contacts[c];
        CHECK(have.link == want.link);
        CHECK(have.shape_id == want.shape_id);
        CHECK(near_vec(have.point, t.apply(want.point), 1e-12));
        CHECK(near_vec(have.normal, t.rotation.rotate(want.normal), 1e-9));
      }
    }
  }
}

TEST_CASE("fingertip height peaks at the open pose and falls as the proximal joint drives") {
  const GripperConfig cfg;
  const double reach =
      cfg.link_lengths[0] + cfg.link_lengths[1] + cfg.link_lengths[2];
  const auto tip_z = [&](const double angles[3]) {
    const BodySet bodies =
        body_set(GripperPose{}, GraspType::BasicPower, cfg,
                 JointState{{{angles[0], angles[1], angles[2]},
                             {0, 0, 0},
                             {0, 0, 0}}});
    const OrientedBox& distal = bodies.boxes[3].box;
    return (distal.center + distal.rot.rotate({0, 0, distal.half.z})).z;
  };
  const double open_cfg[3] = {0, 0, 0};
  CHECK(tip_z(open_cfg) == doctest::Approx(reach).epsilon(1e-12));

  double prev = reach + 1e-9;
  for (int k = 0; k <= 90; ++k) {
    const double a[3] = {k * kStep, 0, 0};
    const double z = tip_z(a);
    CHECK(z < prev);
    prev = z;
  }

  Rng rng(97);
  for (int iter = 0; iter < 50; ++iter) {
    const double a[3] = {rng.uniform(0.0, kPi / 2), rng.uniform(0.0, kPi / 2),
                         rng.uniform(0.0, kPi / 2)};
    CHECK(tip_z(a) <= reach + 1e-12);
  }
}

TEST_CASE("candidate generation on a plane") {
  const PointCloud cloud = plane_grid_cloud(21, 0.005);
  const std::vector<Vec3> above{{0, 0, 1}};

  const CandidateSet one = generate(cloud, 1, 42, above);
  REQUIRE(one.candidates.size() == 2);
  CHECK(one.requested_k == 1);
  const GraspCandidate& a = one.candidates[0];
  const GraspCandidate& b = one.candidates[1];
  CHECK(a.source_point_index == b.source_point_index);
  CHECK(a.rotated_variant == 0);
  CHECK(b.rotated_variant == 1);
  CHECK(near_vec(a.centroid,
                 cloud.points()[static_cast<size_t>(a.source_point_index)],
                 0.0));
  // Approach opposes the upward surface normal seen from above.
  CHECK(near_vec(a.approach(), {0, 0, -1}, 1e-9));
  CHECK(near_vec(b.approach(), {0, 0, -1}, 1e-9));
  CHECK(std::fabs(dot(a.approach(), a.closing())) < 1e-12);
  // The second variant is the first rotated a quarter turn about approach.
  CHECK(near_vec(b.closing(), a.orientation.rotate({0, 1, 0}), 1e-12));
  CHECK(dot(a.approach(), Vec3{0, 0, 1}) <= -1.0 + 1e-9);

  // Determinism: identical runs serialize identically.
  CHECK(candidates_to_json(generate(cloud, 5, 7, above)) ==
        candidates_to_json(generate(cloud, 5, 7, above)));

  const CandidateSet five = generate(cloud, 5, 7, above);
  CHECK(five.candidates.size() == 10);
  for (size_t i = 1; i < five.candidates.size(); ++i) {
    const GraspCandidate& prev = five.candidates[i - 1];
    const GraspCandidate& cur = five.candidates[i];
    const bool ordered =
        prev.source_point_index < cur.source_point_index ||
        (prev.source_point_index == cur.source_point_index &&
         prev.rotated_variant < cur.rotated_variant);
    CHECK(ordered);
  }

  // Seen from below, the approach flips.
  const CandidateSet below = generate(cloud, 1, 42, {{0, 0, -1}});
  CHECK(near_vec(below.candidates[0].approach(), {0, 0, 1}, 1e-9));
}

TEST_CASE("candidate generation rejects unusable input") {
  const PointCloud cloud = plane_grid_cloud(5, 0.005);
  const std::vector<Vec3> vp{{0, 0, 1}};
  CHECK(error_code_of([&] { generate(cloud, 0, 1, vp); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([&] { generate(cloud, 1, 1, {}); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([&] { generate(cloud, 1, 1, vp, 0.0); }) ==
        ErrorCode::InvalidArgument);

  const PointCloud tiny = PointCloud::make(
      {Vec3{0, 0, 0}, Vec3{0.01, 0, 0}, Vec3{0, 0.01, 0}});
  CHECK(error_code_of([&] { generate(tiny, 1, 1, vp); }) ==
        ErrorCode::InsufficientSurface);

  // More frames requested than the cloud can ever supply.
  CHECK(error_code_of([&] { generate(cloud, 26, 1, vp); }) ==
        ErrorCode::InsufficientSurface);

  // A straight wire has no well-defined surface frame anywhere.
  std::vector<Vec3> wire;
  for (int i = 0; i < 50; ++i) wire.push_back({0.001 * i, 0, 0});
  CHECK(error_code_of([&] {
          generate(PointCloud::make(wire), 1, 1, vp);
        }) == ErrorCode::InsufficientSurface);
}

TEST_CASE("candidate generation is equivariant") {
  Rng rng(113);
  const PointCloud cloud = gaussian_blob_cloud(rng, 400, 0.02);
  const Vec3 vp{0.1, -0.2, 0.9};
  const CandidateSet base = generate(cloud, 8, 99, {vp}, 0.015);
  REQUIRE(base.candidates.size() == 16);

  for (int iter = 0; iter < 12; ++iter) {
    const RigidTransform t = random_transform(rng, 0.5);
    const PointCloud moved = cloud.transformed(t);
    const CandidateSet got = generate(moved, 8, 99, {t.apply(vp)}, 0.015);
    REQUIRE(got.candidates.size() == base.candidates.size());
    for (size_t i = 0; i < base.candidates.size(); ++i) {
      const GraspCandidate& want = base.candidates[i];
      const GraspCandidate& have = got.candidates[i];
      CHECK(have.source_point_index == want.source_point_index);
      CHECK(have.rotated_variant == want.rotated_variant);
      CHECK(near_vec(have.centroid, t.apply(want.centroid), 1e-9));
      CHECK(near_vec(have.approach(), t.rotation.rotate(want.approach()),
                     1e-6));
      CHECK(near_vec(have.closing(), t.rotation.rotate(want.closing()),
                     1e-6));
    }
  }
}

TEST_CASE("candidate pruning matches an exhaustive check") {
  const GripperConfig cfg;
  Rng rng(131);
  const auto type_list = all_grasp_types();
  const std::vector<GraspType> all_types(type_list.begin(), type_list.end());
  for (int iter = 0; iter < 8; ++iter) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 250; ++i) pts.push_back(random_vec(rng, 0.08));
    const PointCloud cloud = PointCloud::make(pts);
    const SpatialIndex index = SpatialIndex::build(cloud);

    CandidateSet set;
    set.requested_k = 30;
    for (int i = 0; i < 30; ++i) {
      GraspCandidate cand;
      cand.source_point_index = static_cast<int>(rng.below(pts.size()));
      cand.centroid = pts[static_cast<size_t>(cand.source_point_index)];
      cand.orientation = random_rotation(rng);
      cand.rotated_variant = static_cast<int>(rng.below(2));
      set.candidates.push_back(cand);
    }

    for (int min_region : {0, 5, 60}) {
      for (const auto& types :
           {all_types, std::vector<GraspType>{GraspType::Pincher},
            std::vector<GraspType>{}}) {
        CandidateSet pruned = set;
        prune(pruned, index, cfg, types, min_region);
        std::vector<GraspCandidate> expect;
        for (const GraspCandidate& cand : set.candidates) {
          if (brute_survives(cand, cloud, cfg, types, min_region)) {
            expect.push_back(cand);
          }
        }
        REQUIRE(pruned.candidates.size() == expect.size());
        for (size_t i = 0; i < expect.size(); ++i) {
          CHECK(pruned.candidates[i].source_point_index ==
                expect[i].source_point_index);
          CHECK(near_vec(pruned.candidates[i].centroid, expect[i].centroid,
                         0.0));
        }
        // Pruning is idempotent.
        CandidateSet again = pruned;
        prune(again, index, cfg, types, min_region);
        CHECK(again.candidates.size() == pruned.candidates.size());
      }
    }
  }
  CandidateSet dummy;
  CHECK(error_code_of([&] {
          const SpatialIndex idx =
              SpatialIndex::build(PointCloud::make({Vec3{0, 0, 0}}));
          prune(dummy, idx, cfg, all_types, -1);
        }) == ErrorCode::InvalidArgument);
}

TEST_CASE("candidate JSON is stable and complete") {
  CandidateSet set;
  set.requested_k = 2;
  GraspCandidate c;
  c.centroid = {0.25, -0.125, 0.5};
  c.orientation = Quatern::identity();
  c.source_point_index = 7;
  c.rotated_variant = 1;
  set.candidates.push_back(c);

  const std::string text = candidates_to_json(set);
  CHECK(candidates_to_json(set) == text);
  const auto parsed = nlohmann::json::parse(text);
  CHECK(parsed["requested_k"] == 2);
  REQUIRE(parsed["candidates"].size() == 1);
  CHECK(parsed["candidates"][0]["source_point_index"] == 7);
  CHECK(parsed["candidates"][0]["rotated_variant"] == 1);
  CHECK(parsed["candidates"][0]["centroid"][0] == 0.25);
  CHECK(parsed["candidates"][0]["orientation_wxyz"][0] == 1.0);
}

TEST_CASE("grasp region crop matches a brute-force crop") {
  Rng rng(139);
  for (int iter = 0; iter < 20; ++iter) {
    std::vector<Vec3> pts;
    for (int i = 0; i < 400; ++i) pts.push_back(random_vec(rng, 0.07));
    const PointCloud cloud = PointCloud::make(pts);

    GraspCandidate cand;
    cand.centroid = random_vec(rng, 0.02);
    cand.orientation = random_rotation(rng);
    const RegionBox region;

    // Brute crop in candidate coordinates, original order.
    const Mat3 r = cand.orientation.to_matrix();
    std::vector<Vec3> expect;
    for (const Vec3& p : pts) {
      const Vec3 d = p - cand.centroid;
      const Vec3 local{r.m[0] * d.x + r.m[3] * d.y + r.m[6] * d.z,
                       r.m[1] * d.x + r.m[4] * d.y + r.m[7] * d.z,
                       r.m[2] * d.x + r.m[5] * d.y + r.m[8] * d.z};
      if (std::fabs(local.x) <= region.half_x &&
          std::fabs(local.y) <= region.half_y && local.z >= region.z_min &&
          local.z <= region.z_max) {
        expect.push_back(local);
      }
    }
    if (expect.empty()) {
      CHECK(error_code_of([&] { encode(cloud, cand, region, 64, 1); }) ==
            ErrorCode::EmptyRegion);
      continue;
    }

    // Roomy budget: every cropped point appears, in order, then zeros.
    const int m = static_cast<int>(expect.size()) + 16;
    const GraspEncoding enc = encode(cloud, cand, region, m, 1);
    REQUIRE(enc.valid_count == static_cast<int>(expect.size()));
    for (size_t i = 0; i < expect.size(); ++i) {
      CHECK(near_vec(enc.points[i], expect[i], 1e-12));
    }
    for (size_t i = expect.size(); i < enc.points.size(); ++i) {
      CHECK(near_vec(enc.points[i], {0, 0, 0}, 0.0));
    }

    // Tight budget: a seeded subsample that preserves the original order.
    if (expect.size() >= 24) {
      const GraspEncoding sub = encode(cloud, cand, region, 16, 5);
      CHECK(sub.valid_count == 16);
      size_t cursor = 0;
      for (int i = 0; i < 16; ++i) {
        bool matched = false;
        while (cursor < expect.size()) {
          if (near_vec(sub.points[static_cast<size_t>(i)], expect[cursor],
                       1e-12)) {
            matched = true;
            ++cursor;
            break;
          }
          ++cursor;
        }
        CHECK(matched);
      }
      // Same seed, same pick; a different seed reshuffles the pick.
      const GraspEncoding same = encode(cloud, cand, region, 16, 5);
      bool identical = true;
      for (size_t i = 0; i < sub.points.size(); ++i) {
        if (!(sub.points[i].x == same.points[i].x &&
              sub.points[i].y == same.points[i].y &&
              sub.points[i].z == same.points[i].z)) {
          identical = false;
        }
      }
      CHECK(identical);
    }
  }
}

TEST_CASE("crop bounds are inclusive and asymmetric along approach") {
  const RegionBox region;
  GraspCandidate cand;  // identity frame at the origin
  cand.orientation = Quatern::identity();
  const std::vector<Vec3> pts{
      {0.06, 0, 0.01},   {0.0601, 0, 0.01},  {-0.06, 0, 0.01},
      {0, 0.04, 0.01},   {0, 0.0401, 0.01},  {0, 0, -0.019},
      {0, 0, -0.0191},   {0, 0, 0.081},      {0, 0, 0.0811},
      {0, 0, 0},
  };
  const GraspEncoding enc =
      encode(PointCloud::make(pts), cand, region, 8, 3);
  CHECK(enc.valid_count == 6);
  CHECK(near_vec(enc.points[0], {0.06, 0, 0.01}, 0.0));
  CHECK(near_vec(enc.points[1], {-0.06, 0, 0.01}, 0.0));
  CHECK(near_vec(enc.points[2], {0, 0.04, 0.01}, 0.0));
  CHECK(near_vec(enc.points[3], {0, 0, -0.019}, 0.0));
  CHECK(near_vec(enc.points[4], {0, 0, 0.081}, 0.0));
  CHECK(near_vec(enc.points[5], {0, 0, 0}, 0.0));
  CHECK(enc.points.size() == 8);
  CHECK(near_vec(enc.points[6], {0, 0, 0}, 0.0));
}

TEST_CASE("encoding is frame invariant") {
  Rng rng(149);
  const RegionBox region;

  GraspCandidate cand;
  cand.centroid = {0.01, -0.005, 0.02};
  cand.orientation = random_rotation(rng);

  // Build a cloud with no point near the crop boundary, so membership can
  // never flip under the transform's rounding.
  std::vector<Vec3> pts;
  const Quatern inv = cand.orientation.conjugate();
  while (pts.size() < 300) {
    const Vec3 p = cand.centroid + random_vec(rng, 0.09);
    const Vec3 l = inv.rotate(p - cand.centroid);
    const double gx = region.half_x - std::fabs(l.x);
    const double gy = region.half_y - std::fabs(l.y);
    const double gz = std::min(l.z - region.z_min, region.z_max - l.z);
    if (std::fabs(gx) < 1e-6 || std::fabs(gy) < 1e-6 || std::fabs(gz) < 1e-6) {
      continue;
    }
    pts.push_back(p);
  }
  const PointCloud cloud = PointCloud::make(pts);
  const GraspEncoding base = encode(cloud, cand, region, 64, 17);
  REQUIRE(base.valid_count > 0);

  for (int iter = 0; iter < 20; ++iter) {
    const RigidTransform t = random_transform(rng, 0.7);
    GraspCandidate moved = cand;
    moved.centroid = t.apply(cand.centroid);
    moved.orientation = (t.rotation * cand.orientation).normalized();
    const GraspEncoding got =
        encode(cloud.transformed(t), moved, region, 64, 17);
    REQUIRE(got.valid_count == base.valid_count);
    for (size_t i = 0; i < got.points.size(); ++i) {
      CHECK(near_vec(got.points[i], base.points[i], 1e-9));
    }
  }
}

TEST_CASE("encoding failure modes") {
  const RegionBox region;
  GraspCandidate cand;
  cand.orientation = Quatern::identity();

  const PointCloud cloud = PointCloud::make({Vec3{0, 0, 0.01}});
  CHECK(error_code_of([&] { encode(cloud, cand, region, 0, 1); }) ==
        ErrorCode::InvalidArgument);
  CHECK(error_code_of([&] {
          encode(PointCloud::make(std::vector<Vec3>{}), cand, region, 8, 1);
        }) == ErrorCode::EmptyCloud);

  GraspCandidate far = cand;
  far.centroid = {10, 10, 10};
  CHECK(error_code_of([&] { encode(cloud, far, region, 8, 1); }) ==
        ErrorCode::EmptyRegion);

  RegionBox degenerate;
  degenerate.z_min = 0.1;
  degenerate.z_max = 0.1;
  CHECK(error_code_of([&] { encode(cloud, cand, degenerate, 8, 1); }) ==
        ErrorCode::InvalidArgument);

  // A single in-region point encodes to itself plus padding.
  const GraspEncoding one = encode(cloud, cand, region, 4, 1);
  CHECK(one.valid_count == 1);
  CHECK(near_vec(one.points[0], {0, 0, 0.01}, 1e-15));
  CHECK(near_vec(one.points[3], {0, 0, 0}, 0.0));
}

TEST_CASE("contact surface validation") {
  CHECK(error_code_of([] {
          ContactSurface::make({Vec3{0, 0, 0}}, {}, {0});
        }) == ErrorCode::InvalidArgument);
  CHECK(error_code_of([] {
          ContactSurface::make({Vec3{0, 0, 0}}, {Vec3{0, 0, 2}}, {0});
        }) == ErrorCode::InvalidArgument);
  const ContactSurface ok =
      ContactSurface::make({Vec3{0, 0, 0}}, {Vec3{0, 0, 1}}, {4}, 0.5);
  CHECK_FALSE(ok.empty());
  CHECK(ok.table_height() == 0.5);
  CHECK(ok.shape_ids()[0] == 4);
  const ContactSurface empty = ContactSurface::make({}, {}, {});
  CHECK(empty.empty());
  CHECK(empty.table_height() == kNoTable);
}
