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
#include "multigrasp/gripper.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include <json.hpp>

#include "multigrasp/candidates.hpp"
#include "multigrasp/error.hpp"

namespace mg {

HandMode mode_of(GraspType type) {
  switch (type) {
    case GraspType::WidePower:
    case GraspType::WidePrecision:
      return HandMode::Wide;
    case GraspType::BasicPower:
    case GraspType::BasicPrecision:
      return HandMode::Basic;
    case GraspType::Pincher:
      return HandMode::Pincher;
  }
  fail(ErrorCode::InvalidArgument, "unknown grasp type");
}

GripStyle grip_of(GraspType type) {
  switch (type) {
    case GraspType::WidePower:
    case GraspType::BasicPower:
      return GripStyle::Encompassing;
    case GraspType::WidePrecision:
    case GraspType::BasicPrecision:
    case GraspType::Pincher:
      return GripStyle::Fingertip;
  }
  fail(ErrorCode::InvalidArgument, "unknown grasp type");
}

const char* grasp_type_name(GraspType type) {
  switch (type) {
    case GraspType::WidePower: return "wide_power";
    case GraspType::WidePrecision: return "wide_precision";
    case GraspType::BasicPower: return "basic_power";
    case GraspType::BasicPrecision: return "basic_precision";
    case GraspType::Pincher: return "pincher";
  }
  return "unknown";
}

GraspType grasp_type_from_name(const std::string& name) {
  for (GraspType t : all_grasp_types()) {
    if (name == grasp_type_name(t)) return t;
  }
  fail(ErrorCode::InvalidArgument, "unknown grasp type name '" + name + "'");
}

void GripperConfig::validate() const {
  const auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      fail(ErrorCode::InvalidArgument,
           std::string("gripper config: ") + what + " must be > 0");
    }
  };
  positive(d_encompassing, "d_encompassing");
  positive(d_fingertip, "d_fingertip");
  if (d_fingertip <= d_encompassing) {
    fail(ErrorCode::InvalidArgument,
         "gripper config: d_fingertip must exceed d_encompassing");
  }
  positive(palm_half.x, "palm_half.x");
  positive(palm_half.y, "palm_half.y");
  positive(palm_half.z, "palm_half.z");
  for (double l : link_lengths) positive(l, "link length");
  positive(link_half_thickness, "link_half_thickness");
  positive(link_half_width, "link_half_width");
  positive(joint_limit, "joint_limit");
  positive(close_step, "close_step");
  if (!(spread_angle >= 0.0) || !std::isfinite(spread_angle)) {
    fail(ErrorCode::InvalidArgument,
         "gripper config: spread_angle must be >= 0");
  }
  if (!(collision_margin >= 0.0) || !std::isfinite(collision_margin)) {
    fail(ErrorCode::InvalidArgument,
         "gripper config: collision_margin must be >= 0");
  }
  positive(sweep_half_width, "sweep_half_width");
  positive(sweep_back, "sweep_back");
  positive(sweep_face_gap, "sweep_face_gap");
}

namespace {

using json = nlohmann::ordered_json;

struct FingerFrame {
  Vec3 base;
  Vec3 flex_dir;  // unit vector in the palm-face plane the finger bends toward
};

// Spread sign convention: positive spread for finger 0 (the +Y finger)
// rotates its flexion direction toward -Y. Wide mode splays the two fingers
// away from the center plane, Pincher converges them; the thumb never
// spreads.
FingerFrame finger_frame(const GripperConfig& cfg, HandMode mode, int finger) {
  FingerFrame frame;
  double spread = 0.0;
  Vec3 d0;
  if (finger == 2) {
    frame.base = cfg.thumb_base;
    d0 = Vec3{1, 0, 0};
  } else {
    frame.base = cfg.finger_base[finger];
    d0 = Vec3{-1, 0, 0};
    if (mode == HandMode::Wide) {
      spread = finger == 0 ? -cfg.spread_angle : cfg.spread_angle;
    } else if (mode == HandMode::Pincher) {
      spread = finger == 0 ? cfg.spread_angle : -cfg.spread_angle;
    }
  }
  const double c = std::cos(spread);
  const double s = std::sin(spread);
  frame.flex_dir = Vec3{c * d0.x - s * d0.y, s * d0.x + c * d0.y, 0.0};
  return frame;
}

std::array<OrientedBox, 3> finger_link_boxes(const GripperConfig& cfg,
                                             const FingerFrame& frame,
                                             const double angles[3]) {
  const Vec3 zhat{0, 0, 1};
  const Vec3 plane_normal = cross(zhat, frame.flex_dir);
  std::array<OrientedBox, 3> boxes;
  Vec3 joint = frame.base;
  double bend = 0.0;
  for (int i = 0; i < 3; ++i) {
    bend += angles[i];
    const double c = std::cos(bend);
    const double s = std::sin(bend);
    const Vec3 along = c * zhat + s * frame.flex_dir;
    const Vec3 inward = c * frame.flex_dir - s * zhat;
    const double half_len = cfg.link_lengths[i] * 0.5;
    boxes[i].center = joint + along * half_len;
    boxes[i].half =
        Vec3{cfg.link_half_thickness, cfg.link_half_width, half_len};
    boxes[i].rot =
        Quatern::from_matrix(Mat3::from_cols(inward, plane_normal, along));
    joint = joint + along * cfg.link_lengths[i];
  }
  return boxes;
}

OrientedBox sweep_box(const GripperConfig& cfg, const FingerFrame& frame) {
  const Vec3 zhat{0, 0, 1};
  const double reach =
      cfg.link_lengths[0] + cfg.link_lengths[1] + cfg.link_lengths[2];
  OrientedBox box;
  const double half_d = (reach + cfg.sweep_back) * 0.5;
  const double half_z = (reach - cfg.sweep_face_gap) * 0.5;
  box.center = frame.base + frame.flex_dir * (half_d - cfg.sweep_back) +
               zhat * (half_z + cfg.sweep_face_gap);
  box.half = Vec3{half_d, cfg.sweep_half_width, half_z};
  box.rot = Quatern::from_matrix(
      Mat3::from_cols(frame.flex_dir, cross(zhat, frame.flex_dir), zhat));
  return box;
}

OrientedBox to_world(const GripperPose& pose, const OrientedBox& local) {
  OrientedBox world;
  world.center = pose.palm_center + pose.orientation.rotate(local.center);
  world.half = local.half;
  world.rot = (pose.orientation * local.rot).normalized();
  return world;
}

}  // namespace

double standoff_distance(GraspType type, const GripperConfig& cfg) {
  return grip_of(type) == GripStyle::Encompassing ? cfg.d_encompassing
                                                  : cfg.d_fingertip;
}

GripperPose standoff_pose(const GraspCandidate& candidate, GraspType type,
                          const GripperConfig& cfg) {
  GripperPose pose;
  pose.orientation = candidate.orientation;
  pose.palm_center =
      candidate.centroid - pose.approach() * standoff_distance(type, cfg);
  return pose;
}

BodySet body_set(const GripperPose& pose, GraspType type,
                 const GripperConfig& cfg, const JointState& joints) {
  for (int f = 0; f < 3; ++f) {
    for (int j = 0; j < 3; ++j) {
      const double a = joints.angles[f][j];
      if (!(a >= -1e-12) || !(a <= cfg.joint_limit + 1e-12)) {
        fail(ErrorCode::JointOutOfRange,
             "joint angle " + std::to_string(a) + " outside [0, " +
                 std::to_string(cfg.joint_limit) + "]");
      }
    }
  }
  const HandMode mode = mode_of(type);
  BodySet bodies;
  bodies.boxes.reserve(13);

  OrientedBox palm;
  palm.center = Vec3{0, 0, -cfg.palm_half.z};
  palm.half = cfg.palm_half;
  palm.rot = Quatern::identity();
  bodies.boxes.push_back({to_world(pose, palm), BodyTag::Palm, -1});

  static constexpr BodyTag kLinkTags[3] = {BodyTag::Proximal, BodyTag::Medial,
                                           BodyTag::Distal};
  for (int f = 0; f < 3; ++f) {
    const FingerFrame frame = finger_frame(cfg, mode, f);
    const auto links = finger_link_boxes(cfg, frame, joints.angles[f]);
    for (int i = 0; i < 3; ++i) {
      bodies.boxes.push_back({to_world(pose, links[i]), kLinkTags[i], f});
    }
  }
  for (int f = 0; f < 3; ++f) {
    const FingerFrame frame = finger_frame(cfg, mode, f);
    bodies.boxes.push_back({to_world(pose, sweep_box(cfg, frame)),
                            BodyTag::Sweep, f});
  }
  return bodies;
}

bool collides(const BodySet& bodies, const SpatialIndex& cloud,
              double margin) {
  for (const TaggedBox& tagged : bodies.boxes) {
    if (tagged.tag == BodyTag::Sweep) continue;
    const OrientedBox& box = tagged.box;
    for (int idx : cloud.radius(box.center, box.bounding_radius(margin))) {
      if (box.contains(cloud.points()[static_cast<size_t>(idx)], margin)) {
        return true;
      }
    }
  }
  return false;
}

int count_region_points(const BodySet& bodies, const SpatialIndex& cloud) {
  std::vector<int> hits;
  for (const TaggedBox& tagged : bodies.boxes) {
    if (tagged.tag != BodyTag::Sweep) continue;
    const OrientedBox& box = tagged.box;
    for (int idx : cloud.radius(box.center, box.bounding_radius(0.0))) {
      if (box.contains(cloud.points()[static_cast<size_t>(idx)], 0.0)) {
        hits.push_back(idx);
      }
    }
  }
  std::sort(hits.begin(), hits.end());
  hits.erase(std::unique(hits.begin(), hits.end()), hits.end());
  return static_cast<int>(hits.size());
}

ContactSurface ContactSurface::make(std::vector<Vec3> points,
                                    std::vector<Vec3> normals,
                                    std::vector<int> shape_ids,
                                    double table_height) {
  if (points.size() != normals.size() || points.size() != shape_ids.size()) {
    fail(ErrorCode::InvalidArgument,
         "contact surface arrays must have equal length");
  }
  for (size_t i = 0; i < normals.size(); ++i) {
    if (std::fabs(normals[i].norm() - 1.0) > 1e-6) {
      fail(ErrorCode::InvalidArgument,
           "contact surface normal " + std::to_string(i) + " is not unit");
    }
  }
  ContactSurface surface;
  surface.points_ = std::move(points);
  surface.normals_ = std::move(normals);
  surface.shape_ids_ = std::move(shape_ids);
  surface.table_height_ = table_height;
  if (!surface.points_.empty()) {
    surface.index_ = SpatialIndex::build(surface.points_);
  }
  return surface;
}

std::vector<Contact> ClosingReport::contacts() const {
  std::vector<Contact> out;
  for (const FingerClosing& fc : fingers) {
    out.insert(out.end(), fc.contacts.begin(), fc.contacts.end());
  }
  return out;
}

ClosingReport close_fingers(const GripperPose& pose, GraspType type,
                            const GripperConfig& cfg,
                            const ContactSurface& obstacle) {
  const HandMode mode = mode_of(type);
  const int steps_limit =
      static_cast<int>(std::floor(cfg.joint_limit / cfg.close_step + 1e-9));
  const bool has_table = obstacle.table_height() > kNoTable * 0.5;

  ClosingReport report;
  for (int f = 0; f < 3; ++f) {
    const FingerFrame frame = finger_frame(cfg, mode, f);
    FingerClosing& fc = report.fingers[f];
    int steps[3] = {0, 0, 0};
    const auto angle = [&](int j) {
      return std::min(cfg.close_step * steps[j], cfg.joint_limit);
    };

    // Tests links from..2 at the current joint steps; links closer to the
    // base than the driven joint are stationary and already known clear.
    const auto probe = [&](int from) -> std::optional<Contact> {
      const double a[3] = {angle(0), angle(1), angle(2)};
      const auto links = finger_link_boxes(cfg, frame, a);
      for (int i = from; i < 3; ++i) {
        const OrientedBox box = to_world(pose, links[i]);
        Contact best;
        bool found = false;
        if (!obstacle.empty()) {
          for (int idx :
               obstacle.index().radius(box.center, box.bounding_radius(0.0))) {
            const Vec3& p = obstacle.points()[static_cast<size_t>(idx)];
            const double depth = box.interior_depth(p);
            if (depth <= 0.0) continue;
            const Vec3& n = obstacle.normals()[static_cast<size_t>(idx)];
            bool take = !found || depth > best.depth;
            if (!take && depth == best.depth) {
              // Coincident samples tie on depth (a shared edge is emitted
              // once per adjacent face); keep the normal that most directly
              // opposes the link, i.e. the face actually resisting it.
              take = dot(n, (box.center - p).normalized()) >
                     dot(best.normal, (box.center - best.point).normalized());
            }
            if (take) {
              found = true;
              best.point = p;
              best.normal = n;
              best.shape_id = obstacle.shape_ids()[static_cast<size_t>(idx)];
              best.depth = depth;
            }
          }
        }
        if (has_table) {
          const double table_depth = obstacle.table_height() - box.min_z();
          if (table_depth > 0.0 && (!found || table_depth > best.depth)) {
            // Lowest corner of the box is the deepest point in the table.
            const Mat3 r = box.rot.to_matrix();
            Vec3 corner_local;
            for (int axis = 0; axis < 3; ++axis) {
              corner_local[axis] =
                  r.m[6 + axis] >= 0.0 ? -box.half[axis] : box.half[axis];
            }
            found = true;
            best.point = box.to_world(corner_local);
            best.normal = Vec3{0, 0, 1};
            best.shape_id = kTableShapeId;
            best.depth = table_depth;
          }
        }
        if (found) {
          best.finger = f;
          best.link = i;
          return best;
        }
      }
      return std::nullopt;
    };

    // A hand already in contact at the open configuration cannot close.
    if (auto hit = probe(0)) {
      fc.contacts.push_back(*hit);
      fc.blocked = true;
    } else {
      for (int phase = 0; phase < 3 && !fc.blocked; ++phase) {
        while (steps[phase] < steps_limit) {
          ++steps[phase];
          if (auto hit = probe(phase)) {
            fc.contacts.push_back(*hit);
            if (hit->link != phase) fc.blocked = true;
            break;
          }
        }
      }
    }
    for (int j = 0; j < 3; ++j) fc.joints[j] = angle(j);
  }
  return report;
}

namespace {

Vec3 vec3_from_json(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number()) {
    fail(ErrorCode::SchemaViolation,
         "gripper config: '" + key + "' must be an array of 3 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

double number_from_json(const json& v, const std::string& key) {
  if (!v.is_number()) {
    fail(ErrorCode::SchemaViolation,
         "gripper config: '" + key + "' must be a number");
  }
  return v.get<double>();
}

}  // namespace

GripperConfig parse_gripper_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    fail(ErrorCode::SchemaViolation, "gripper config must be a JSON object");
  }
  GripperConfig cfg;
  for (const auto& [key, value] : root.items()) {
    if (key == "d_encompassing") cfg.d_encompassing = number_from_json(value, key);
    else if (key == "d_fingertip") cfg.d_fingertip = number_from_json(value, key);
    else if (key == "palm_half") cfg.palm_half = vec3_from_json(value, key);
    else if (key == "finger_bases") {
      if (!value.is_array() || value.size() != 2) {
        fail(ErrorCode::SchemaViolation,
             "gripper config: 'finger_bases' must be an array of 2 points");
      }
      cfg.finger_base[0] = vec3_from_json(value[0], key);
      cfg.finger_base[1] = vec3_from_json(value[1], key);
    } else if (key == "thumb_base") cfg.thumb_base = vec3_from_json(value, key);
    else if (key == "link_lengths") {
      if (!value.is_array() || value.size() != 3) {
        fail(ErrorCode::SchemaViolation,
             "gripper config: 'link_lengths' must be an array of 3 numbers");
      }
      for (int i = 0; i < 3; ++i) {
        cfg.link_lengths[i] = number_from_json(value[i], key);
      }
    } else if (key == "link_half_thickness") cfg.link_half_thickness = number_from_json(value, key);
    else if (key == "link_half_width") cfg.link_half_width = number_from_json(value, key);
    else if (key == "spread_angle") cfg.spread_angle = number_from_json(value, key);
    else if (key == "joint_limit") cfg.joint_limit = number_from_json(value, key);
    else if (key == "close_step") cfg.close_step = number_from_json(value, key);
    else if (key == "collision_margin") cfg.collision_margin = number_from_json(value, key);
    else if (key == "sweep_half_width") cfg.sweep_half_width = number_from_json(value, key);
    else if (key == "sweep_back") cfg.sweep_back = number_from_json(value, key);
    else if (key == "sweep_face_gap") cfg.sweep_face_gap = number_from_json(value, key);
    else {
      fail(ErrorCode::SchemaViolation,
           "gripper config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::string format_gripper_config_json(const GripperConfig& cfg) {
  json root;
  root["d_encompassing"] = cfg.d_encompassing;
  root["d_fingertip"] = cfg.d_fingertip;
  root["palm_half"] = {cfg.palm_half.x, cfg.palm_half.y, cfg.palm_half.z};
  root["finger_bases"] = {
      {cfg.finger_base[0].x, cfg.finger_base[0].y, cfg.finger_base[0].z},
      {cfg.finger_base[1].x, cfg.finger_base[1].y, cfg.finger_base[1].z}};
  root["thumb_base"] = {cfg.thumb_base.x, cfg.thumb_base.y, cfg.thumb_base.z};
  root["link_lengths"] = {cfg.link_lengths[0], cfg.link_lengths[1],
                          cfg.link_lengths[2]};
  root["link_half_thickness"] = cfg.link_half_thickness;
  root["link_half_width"] = cfg.link_half_width;
  root["spread_angle"] = cfg.spread_angle;
  root["joint_limit"] = cfg.joint_limit;
  root["close_step"] = cfg.close_step;
  root["collision_margin"] = cfg.collision_margin;
  root["sweep_half_width"] = cfg.sweep_half_width;
  root["sweep_back"] = cfg.sweep_back;
  root["sweep_face_gap"] = cfg.sweep_face_gap;
  return root.dump(2) + "\n";
}

}  // namespace mg
