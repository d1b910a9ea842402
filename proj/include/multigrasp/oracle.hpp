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
#ifndef MULTIGRASP_ORACLE_HPP
#define MULTIGRASP_ORACLE_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "multigrasp/cloud.hpp"
#include "multigrasp/dataset.hpp"
#include "multigrasp/geom.hpp"
#include "multigrasp/gripper.hpp"
#include "multigrasp/scene.hpp"

namespace mg {

/// Analytic solid primitives. A shape is the union of one or more placed
/// primitives; its local origin sits at the bottom center so an upright
/// object rests on the table when its pose translation has z equal to the
/// table height.
enum class PrimitiveKind { Box, Cylinder, Sphere };

struct Primitive {
  PrimitiveKind kind = PrimitiveKind::Box;
  Vec3 center{0, 0, 0};                 // primitive center in the shape frame
  Quatern rotation = Quatern::identity();
  /// Box: half extents. Cylinder: {radius, radius, half height}, axis z.
  /// Sphere: {r, r, r}.
  Vec3 dims{1, 1, 1};
};

enum class SizeClass { Small, Medium, Large };

const char* size_class_name(SizeClass size_class);

struct Shape {
  std::string id;
  std::vector<Primitive> parts;
  double mass_kg = 0.0;  // lumped mass proxy used by the capacity test
  SizeClass size_class = SizeClass::Medium;

  void validate() const;
};

struct ShapeSet {
  std::vector<Shape> shapes;

  const Shape* find(const std::string& id) const;
  void validate() const;
};

/// The built-in parametric object catalog: 24 shapes across the three size
/// classes (6 small, 12 medium, 6 large, two of the large ones heavy).
ShapeSet builtin_catalog();

/// A scene with shape references resolved, scales folded into primitive
/// dimensions, and world poses applied.
struct PlacedPrimitive {
  PrimitiveKind kind;
  Vec3 dims;
  RigidTransform world_from_prim;
};

struct PlacedShape {
  std::string shape_id;
  int instance_index = -1;  // position in Scene::objects
  std::vector<PlacedPrimitive> parts;
  double mass_kg = 0.0;
  SizeClass size_class = SizeClass::Medium;
  Vec3 center_of_mass{0, 0, 0};  // volume-weighted, world frame
};

struct InstancedScene {
  double table_height = 0.0;
  std::vector<PlacedShape> shapes;
};

/// Resolves every object instance against the catalog. Anisotropic scaling
/// is folded into the primitive dimensions, which restricts it to shapes it
/// cannot distort: cylinders need scale.x == scale.y, spheres a uniform
/// scale, and rotated primitives a uniform scale as well.
InstancedScene instantiate_scene(const Scene& scene, const ShapeSet& catalog);

/// Virtual depth capture: a stratified, seeded ray grid from every camera
/// (54 degree horizontal field of view, 4:3 aspect), intersected against
/// the shape primitives and the table plane. Points carry analytic surface
/// normals and the capturing camera's index as view tag. Throws
/// NoVisibleSurface when no ray hits anything.
PointCloud capture_views(const Scene& scene, const ShapeSet& catalog,
                         int samples_per_view, uint64_t seed);

/// Deterministic surface sampling of every placed shape at the given grid
/// pitch, with analytic outward normals and per-point shape indices
/// (positions in InstancedScene::shapes). Sample points buried inside
/// another primitive of the same shape are dropped, so composite unions
/// expose only their true boundary. The table plane is carried analytically.
ContactSurface sample_contact_surface(const InstancedScene& scene,
                                      double pitch);

/// Index of the placed shape nearest to a world point (by sampled surface),
/// or -1 when the surface holds no shape samples.
int nearest_shape(const ContactSurface& surface, const Vec3& point);

/// Thresholds of the geometric success oracle. Capacities encode that
/// power grips hold the most and the pincher the least.
struct LabelConfig {
  double antipodal_min_deg = 150.0;
  /// Max distance from the projected center of mass to the contact hull.
  double retention_margin = 0.02;
  double capacity_power_kg = 2.2;
  double capacity_precision_kg = 1.0;
  double capacity_pincher_kg = 0.6;
  double surface_pitch = 0.004;

  void validate() const;
  double capacity_for(GraspType type) const;
};

/// Why a grasp type was labeled unsuccessful; None marks success. Listed in
/// evaluation order: the first failed criterion is recorded.
enum class FailureClass {
  None = 0,
  Collision,
  MultiObject,
  Contact,
  Antipodal,
  GripMismatch,
  Retention,
  Capacity,
};

const char* failure_class_name(FailureClass failure);

struct TypeDiagnostic {
  int contact_count = 0;        // contacts on the target shape
  double antipodal_deg = 0.0;   // best opposing normal pair, distinct fingers
  bool retention_ok = false;
  FailureClass failure = FailureClass::None;
};

struct GraspLabel {
  std::vector<int> success;             // one 0/1 per grasp type
  std::vector<TypeDiagnostic> diagnostics;
};

/// Labels one candidate against the scene: per grasp type, the gripper is
/// placed at the type's standoff, checked for collision against the sampled
/// surfaces and the table, closed, and the resulting contacts are tested
/// for count, antipodality, grip consistency, retention, and capacity.
GraspLabel label_candidate(const GraspCandidate& candidate,
                           const InstancedScene& scene,
                           const ContactSurface& surface,
                           const GripperConfig& gripper,
                           const LabelConfig& cfg);

/// Dataset generation: single-object scenes, a ring of camera pairs per
/// object, candidate generation and pruning on the captured cloud, then
/// encoding and labeling of every surviving candidate.
struct DatasetBuildConfig {
  int views_per_object = 20;
  int candidates_per_view = 15;
  int samples_per_view = 12288;
  uint64_t seed = 0;
  int input_points = 512;          // encoding slots, must match the net
  RegionBox region;
  GripperConfig gripper;
  LabelConfig label;
  int min_region_points = 20;
  double frame_radius = 0.01;
  double table_removal_threshold = 0.005;

  void validate() const;
};

/// Builds exemplars for the named catalog objects (at least two). The
/// exemplar object_id is the object's position in `object_ids`.
Dataset build_dataset(const ShapeSet& catalog,
                      const std::vector<std::string>& object_ids,
                      const DatasetBuildConfig& cfg);

/// Fraction of positive labels per grasp type.
std::vector<double> positive_rates(const Dataset& dataset);

/// On-disk dataset layout: an `index.jsonl` with one record per exemplar
/// (encoding path, labels, object id, split tag, candidate pose) next to an
/// `encodings/` directory of PLY files holding the valid points. Both
/// directions round-trip bit-exactly.
void save_dataset_dir(const Dataset& dataset, const std::string& dir);
Dataset load_dataset_dir(const std::string& dir);

}  // namespace mg

#endif  // MULTIGRASP_ORACLE_HPP
