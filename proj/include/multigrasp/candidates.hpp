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
#ifndef MULTIGRASP_CANDIDATES_HPP
#define MULTIGRASP_CANDIDATES_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "multigrasp/cloud.hpp"
#include "multigrasp/geom.hpp"
#include "multigrasp/gripper.hpp"
#include "multigrasp/kdtree.hpp"

namespace mg {

/// A grasp hypothesis anchored at a surface point. The orientation maps the
/// gripper frame into the world: +Z is the approach direction (pointing from
/// the palm into the surface, i.e. opposite the estimated surface normal)
/// and +X is the finger closing direction (along the axis of least surface
/// bending). The actual palm placement for a given grasp type comes from
/// standoff_pose().
struct GraspCandidate {
  Vec3 centroid;
  Quatern orientation;
  /// Index of the cloud point this candidate was grown from.
  int source_point_index = -1;
  /// 0 for the frame as estimated, 1 for its quarter-turn about approach.
  int rotated_variant = 0;

  Vec3 approach() const { return orientation.rotate(Vec3{0, 0, 1}); }
  Vec3 closing() const { return orientation.rotate(Vec3{1, 0, 0}); }
};

struct CandidateSet {
  std::vector<GraspCandidate> candidates;
  /// Number of source points that were requested, before duplication into
  /// the two in-plane variants and before any pruning.
  int requested_k = 0;
};

/// Samples `k` distinct source points from `cloud` (uniformly, seeded) and
/// fits a local surface frame to each within `frame_radius`. Points whose
/// neighborhoods are too sparse or degenerate are skipped and re-drawn, up
/// to 3k attempts. Every accepted frame yields two candidates (the frame and
/// its quarter-turn about the approach axis), ordered by
/// (source_point_index, rotated_variant).
///
/// `viewpoints` disambiguates the sign of surface normals; when the cloud
/// carries per-point view tags, each point uses the viewpoint it was seen
/// from, otherwise the first viewpoint applies to all points.
///
/// Throws InvalidArgument (k < 1 or no viewpoints) and InsufficientSurface
/// (fewer than 4 points, or fewer than k frames could be fit).
CandidateSet generate(const PointCloud& cloud, int k, uint64_t seed,
                      const std::vector<Vec3>& viewpoints,
                      double frame_radius = 0.01);

/// Removes candidates that no grasp type can serve: a candidate survives if
/// at least one `type` has a collision-free open-hand standoff placement
/// (margin cfg.collision_margin) whose closing-sweep region contains at
/// least `min_region_points` cloud points. Order is preserved.
void prune(CandidateSet& set, const SpatialIndex& index,
           const GripperConfig& cfg, const std::vector<GraspType>& types,
           int min_region_points);

/// Serializes a candidate set to a stable JSON document.
std::string candidates_to_json(const CandidateSet& set);

/// Compact JSON for a single candidate pose, with the same fields each
/// entry of candidates_to_json carries. Parsing is strict: unknown keys,
/// missing fields, and wrong arities are SchemaViolation errors.
std::string candidate_to_json(const GraspCandidate& candidate);
GraspCandidate candidate_from_json(const std::string& text);

}  // namespace mg

#endif  // MULTIGRASP_CANDIDATES_HPP
