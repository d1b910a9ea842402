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
#ifndef MULTIGRASP_SCENE_HPP
#define MULTIGRASP_SCENE_HPP

#include <string>
#include <vector>

#include "multigrasp/geom.hpp"

namespace mg {

struct CameraPose {
  Vec3 position;
  Vec3 look_at;
};

struct ObjectInstance {
  std::string shape_id;
  RigidTransform pose;          // object local frame -> world
  Vec3 scale{1.0, 1.0, 1.0};    // per-axis scaling applied before the pose
};

/// Tabletop scene description. The table is the horizontal plane
/// z = table_height; object local frames have their origin at the shape's
/// bottom center, so an upright object sits on the table when its pose
/// translation has z == table_height.
struct Scene {
  double table_height = 0.0;
  std::vector<ObjectInstance> objects;
  std::vector<CameraPose> cameras;  // at least one
};

/// JSON (de)serialization.
///
/// Parsing validates shape incrementally and reports SchemaViolation with a
/// dotted field path ("objects[2].pose.rotation_wxyz"), NonPositiveScale for
/// a scale component <= 0. Invalid JSON text is itself a SchemaViolation.
Scene parse_scene_json(const std::string& text);
Scene load_scene(const std::string& path);
std::string format_scene_json(const Scene& scene);
void save_scene(const Scene& scene, const std::string& path);

}  // namespace mg

#endif  // MULTIGRASP_SCENE_HPP
