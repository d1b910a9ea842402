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
#ifndef MULTIGRASP_GRIPPER_HPP
#define MULTIGRASP_GRIPPER_HPP

#include <array>
#include <string>
#include <vector>

#include "multigrasp/geom.hpp"
#include "multigrasp/kdtree.hpp"

namespace mg {

/// The five grasp types the hand can execute. Each combines a hand mode
/// (finger spread preset) with a grip style (where on the finger the object
/// is held).
enum class GraspType : int {
  WidePower = 0,
  WidePrecision = 1,
  BasicPower = 2,
  BasicPrecision = 3,
  Pincher = 4,
};
inline constexpr int kNumGraspTypes = 5;

enum class HandMode { Wide, Basic, Pincher };
enum class GripStyle { Encompassing, Fingertip };

HandMode mode_of(GraspType type);
GripStyle grip_of(GraspType type);
const char* grasp_type_name(GraspType type);
/// Parses the exact names produced by grasp_type_name; throws
/// InvalidArgument otherwise.
GraspType grasp_type_from_name(const std::string& name);
inline std::array<GraspType, kNumGraspTypes> all_grasp_types() {
  return {GraspType::WidePower, GraspType::WidePrecision,
          GraspType::BasicPower, GraspType::BasicPrecision,
          GraspType::Pincher};
}

/// Geometry of the simplified three-finger hand. The gripper frame has its
/// origin at the center of the palm face, +Z pointing along the approach
/// direction (out of the palm, toward the object) and +X along the closing
/// axis. Two fingers root on the +X side of the palm face, the thumb
/// opposes them from the -X side; each finger is a proximal/medial/distal
/// box-link chain that flexes from +Z toward the palm centerline.
struct GripperConfig {
  double d_encompassing = 0.019;  // palm standoff for encompassing grips
  double d_fingertip = 0.0822;    // palm standoff for fingertip grips

  Vec3 palm_half{0.06, 0.06, 0.03};  // palm box behind the face plane

  // Finger roots on the palm face (gripper frame, z = 0).
  Vec3 finger_base[2] = {Vec3{0.045, 0.036, 0.0}, Vec3{0.045, -0.036, 0.0}};
  Vec3 thumb_base{-0.045, 0.0, 0.0};

  double link_lengths[3] = {0.057, 0.038, 0.023};  // proximal, medial, distal
  double link_half_thickness = 0.005;  // within the flexion plane
  double link_half_width = 0.005;      // across the flexion plane

  double spread_angle = deg_to_rad(16.0);  // Wide/Pincher finger splay
  double joint_limit = kPi / 2.0;          // per joint, radians
  double close_step = deg_to_rad(1.0);     // closing discretization

  double collision_margin = 0.005;  // pruning inflation

  // Graspable-region slabs swept by each finger while closing.
  double sweep_half_width = 0.012;   // across the flexion plane
  double sweep_back = 0.006;         // extension behind the open finger line
  double sweep_face_gap = 0.002;     // clearance off the palm face plane

  /// Throws InvalidArgument unless all dimensions are strictly positive and
  /// d_fingertip > d_encompassing.
  void validate() const;
};

/// JSON (de)serialization of GripperConfig. All lengths are meters, angles
/// radians; missing keys keep their defaults. Unknown keys are rejected
/// (SchemaViolation) so typos cannot silently revert to defaults.
GripperConfig parse_gripper_config_json(const std::string& text);
std::string format_gripper_config_json(const GripperConfig& cfg);

/// World-frame placement of the hand.
struct GripperPose {
  Vec3 palm_center;
  Quatern orientation;

  Vec3 approach() const { return orientation.rotate(Vec3{0, 0, 1}); }
  Vec3 closing() const { return orientation.rotate(Vec3{1, 0, 0}); }
};

enum class BodyTag { Palm, Proximal, Medial, Distal, Sweep };

struct TaggedBox {
  OrientedBox box;
  BodyTag tag;
  int finger;  // 0, 1 = fingers, 2 = thumb; -1 for the palm
};

///// World-frame collision and sweep geometry of one hand configuration:
/// 1 palm box, 9 link boxes, 3 sweep slabs.
struct BodySet {
  std::vector<TaggedBox> boxes;
};

/// Per-finger joint angles, radians; [finger][proximal, medial, distal].
struct JointState {
  double angles[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
  static JointState open() { return {}; }
};

/// Places the palm `d` behind the grasp centroid along the approach axis,
/// where `d` depends on the grasp type's grip style.
double standoff_distance(GraspType type, const GripperConfig& cfg);

struct GraspCandidate;  // defined in candidates.hpp
GripperPose standoff_pose(const GraspCandidate& candidate, GraspType type,
                          const GripperConfig& cfg);

/// Builds the world-frame body boxes for a pose, mode, and joint state.
/// Throws JointOutOfRange when an angle leaves [0, joint_limit].
BodySet body_set(const GripperPose& pose, GraspType type,
                 const GripperConfig& cfg, const JointState& joints);

/// True iff any indexed cloud point lies inside a non-sweep box inflated by
/// `margin`.
bool collides(const BodySet& bodies, const SpatialIndex& cloud,
              double margin);

/// Number of distinct cloud points inside the union of the sweep slabs.
int count_region_points(const BodySet& bodies, const SpatialIndex& cloud);

/// Obstacle description used by the finger-closing simulation: a sampled
/// surface with analytic normals plus (optionally) a horizontal table plane
/// handled exactly. shape_ids tie each sample to its source object.
inline constexpr int kTableShapeId = -1;
inline constexpr double kNoTable = -1e30;

class ContactSurface {
 public:
  static ContactSurface make(std::vector<Vec3> points,
                             std::vector<Vec3> normals,
                             std::vector<int> shape_ids,
                             double table_height = kNoTable);

  const std::vector<Vec3>& points() const { return points_; }
  const std::vector<Vec3>& normals() const { return normals_; }
  const std::vector<int>& shape_ids() const { return shape_ids_; }
  double table_height() const { return table_height_; }
  bool empty() const { return points_.empty(); }
  /// Only valid when !empty().
  const SpatialIndex& index() const { return index_; }

 private:
  std::vector<Vec3> points_;
  std::vector<Vec3> normals_;
  std::vector<int> shape_ids_;
  double table_height_ = kNoTable;
  SpatialIndex index_;
};

struct Contact {
  int finger = -1;
  int link = -1;  // 0 proximal, 1 medial, 2 distal
  Vec3 point;
  Vec3 normal;             // outward surface normal at the contact
  int shape_id = kTableShapeId;
  double depth = 0.0;      // penetration depth at the recording step
};

struct FingerClosing {
  double joints[3] = {0, 0, 0};
  std::vector<Contact> contacts;  // at most one per joint phase
  /// True when closing stopped because a link other than the actively
  /// driven one hit the obstacle (no wrap possible from there).
  bool blocked = false;
};

struct ClosingReport {
  FingerClosing fingers[3];

  /// All contacts in (finger, phase) order.
  std::vector<Contact> contacts() const;
};

/// Deterministic quasi-static closing. Each finger is driven independently:
/// the proximal joint advances in close_step increments until some moving
/// link penetrates the obstacle (or the limit is reached), then the medial
/// joint, then the distal. A contact on the actively driven link freezes
/// that joint and lets the next one continue (the underactuated wrap); a
/// contact on a more distal link stops the whole finger. The first
/// penetrating step records the contact: the deepest obstacle point inside
/// the link box, with the obstacle's surface normal there.
ClosingReport close_fingers(const GripperPose& pose, GraspType type,
                            const GripperConfig& cfg,
                            const ContactSurface& obstacle);

}  // namespace mg

#endif  // MULTIGRASP_GRIPPER_HPP
