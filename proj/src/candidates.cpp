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
#include "multigrasp/candidates.hpp"

#include <algorithm>

#include <json.hpp>

#include "multigrasp/error.hpp"
#include "multigrasp/rng.hpp"
#include "multigrasp/surface.hpp"

namespace mg {

namespace {

Vec3 viewpoint_for(const PointCloud& cloud, int point,
                   const std::vector<Vec3>& viewpoints) {
  if (!cloud.view_tags().empty()) {
    const int tag = cloud.view_tags()[static_cast<size_t>(point)];
    if (tag >= 0 && static_cast<size_t>(tag) < viewpoints.size()) {
      return viewpoints[static_cast<size_t>(tag)];
    }
  }
  return viewpoints.front();
}

Quatern frame_orientation(const SurfaceFrame& frame) {
  // Approach opposes the outward normal; closing follows the axis of least
  // bending. The middle column completes the right-handed basis.
  const Mat3 r = Mat3::from_cols(frame.curvature_axis, -frame.binormal,
                                 -frame.normal);
  return Quatern::from_matrix(r);
}

nlohmann::ordered_json candidate_json(const GraspCandidate& c) {
  nlohmann::ordered_json item;
  item["centroid"] = {c.centroid.x, c.centroid.y, c.centroid.z};
  item["orientation_wxyz"] = {c.orientation.w, c.orientation.x,
                              c.orientation.y, c.orientation.z};
  item["source_point_index"] = c.source_point_index;
  item["rotated_variant"] = c.rotated_variant;
  return item;
}

}  // namespace

CandidateSet generate(const PointCloud& cloud, int k, uint64_t seed,
                      const std::vector<Vec3>& viewpoints,
                      double frame_radius) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "candidate count must be >= 1");
  if (viewpoints.empty()) {
    fail(ErrorCode::InvalidArgument, "at least one viewpoint is required");
  }
  if (!(frame_radius > 0.0)) {
    fail(ErrorCode::InvalidArgument, "frame radius must be > 0");
  }
  const int n = static_cast<int>(cloud.points().size());
  if (n < 4) {
    fail(ErrorCode::InsufficientSurface,
         "cloud has " + std::to_string(n) +
             " points; at least 4 are needed to fit a surface frame");
  }

  const SpatialIndex index = SpatialIndex::build(cloud);
  Rng rng(seed);
  const int attempts = static_cast<int>(
      std::min<long long>(n, 3LL * static_cast<long long>(k)));
  const std::vector<int> order = rng.sample_without_replacement(n, attempts);

  const Quatern quarter_turn =
      Quatern::from_axis_angle(Vec3{0, 0, 1}, kPi / 2.0);

  CandidateSet set;
  set.requested_k = k;
  set.candidates.reserve(static_cast<size_t>(2 * k));
  int accepted = 0;
  for (int point : order) {
    if (accepted == k) break;
    SurfaceFrame frame;
    try {
      frame = estimate_surface_frame(cloud, index, point, frame_radius,
                                     viewpoint_for(cloud, point, viewpoints));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::DegenerateNeighborhood) continue;
      throw;
    }
    GraspCandidate base;
    base.centroid = frame.point;
    base.orientation = frame_orientation(frame);
    base.source_point_index = point;
    base.rotated_variant = 0;

    GraspCandidate turned = base;
    turned.orientation = (base.orientation * quarter_turn).canonical();
    turned.rotated_variant = 1;

    set.candidates.push_back(base);
    set.candidates.push_back(turned);
    ++accepted;
  }
  if (accepted < k) {
    fail(ErrorCode::InsufficientSurface,
         "only " + std::to_string(accepted) + " of " + std::to_string(k) +
             " surface frames could be fit");
  }
  std::sort(set.candidates.begin(), set.candidates.end(),
            [](const GraspCandidate& a, const GraspCandidate& b) {
              if (a.source_point_index != b.source_point_index) {
                return a.source_point_index < b.source_point_index;
              }
              return a.rotated_variant < b.rotated_variant;
            });
  return set;
}

void prune(CandidateSet& set, const SpatialIndex& index,
           const GripperConfig& cfg, const std::vector<GraspType>& types,
           int min_region_points) {
  if (min_region_points < 0) {
    fail(ErrorCode::InvalidArgument, "min_region_points must be >= 0");
  }
  const JointState open = JointState::open();
  auto survives = [&](const GraspCandidate& cand) {
    for (GraspType type : types) {
      const GripperPose pose = standoff_pose(cand, type, cfg);
      const BodySet bodies = body_set(pose, type, cfg, open);
      if (collides(bodies, index, cfg.collision_margin)) continue;
      if (count_region_points(bodies, index) >= min_region_points) {
        return true;
      }
    }
    return false;
  };
  auto& cands = set.candidates;
  cands.erase(std::remove_if(cands.begin(), cands.end(),
                             [&](const GraspCandidate& c) {
                               return !survives(c);
                             }),
              cands.end());
}

std::string candidates_to_json(const CandidateSet& set) {
  nlohmann::ordered_json root;
  root["requested_k"] = set.requested_k;
  auto& arr = root["candidates"] = nlohmann::ordered_json::array();
  for (const GraspCandidate& c : set.candidates) {
    arr.push_back(candidate_json(c));
  }
  return root.dump(2) + "\n";
}

std::string candidate_to_json(const GraspCandidate& candidate) {
  return candidate_json(candidate).dump();
}

GraspCandidate candidate_from_json(const std::string& text) {
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::ordered_json::exception& e) {
    fail(ErrorCode::SchemaViolation,
         std::string("candidate: invalid JSON: ") + e.what());
  }
  if (!j.is_object()) {
    fail(ErrorCode::SchemaViolation, "candidate: expected a JSON object");
  }
  for (const auto& item : j.items()) {
    if (item.key() != "centroid" && item.key() != "orientation_wxyz" &&
        item.key() != "source_point_index" && item.key() != "rotated_variant") {
      fail(ErrorCode::SchemaViolation,
           "candidate: unknown key '" + item.key() + "'");
    }
  }
  const auto vec_field = [&](const char* key, size_t arity) {
    if (!j.contains(key) || !j[key].is_array() || j[key].size() != arity) {
      fail(ErrorCode::SchemaViolation, std::string("candidate: ") + key +
                                           " must be an array of " +
                                           std::to_string(arity) + " numbers");
    }
    std::vector<double> out;
    for (const auto& v : j[key]) {
      if (!v.is_number()) {
        fail(ErrorCode::SchemaViolation,
             std::string("candidate: ") + key + " entries must be numbers");
      }
      out.push_back(v.get<double>());
    }
    return out;
  };
  const auto int_field = [&](const char* key) {
    if (!j.contains(key) || !j[key].is_number_integer()) {
      fail(ErrorCode::SchemaViolation,
           std::string("candidate: ") + key + " must be an integer");
    }
    return j[key].get<int>();
  };
  GraspCandidate c;
  const std::vector<double> p = vec_field("centroid", 3);
  c.centroid = Vec3{p[0], p[1], p[2]};
  const std::vector<double> q = vec_field("orientation_wxyz", 4);
  c.orientation = Quatern{q[0], q[1], q[2], q[3]};
  if (std::fabs(c.orientation.norm() - 1.0) > 1e-9) {
    fail(ErrorCode::SchemaViolation,
         "candidate: orientation_wxyz must be a unit quaternion");
  }
  c.source_point_index = int_field("source_point_index");
  c.rotated_variant = int_field("rotated_variant");
  return c;
}

}  // namespace mg
