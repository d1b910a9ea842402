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
#include "multigrasp/scene.hpp"

#include <cmath>

#include <json.hpp>

#include "multigrasp/error.hpp"
#include "multigrasp/util.hpp"

namespace mg {

namespace {

using json = nlohmann::ordered_json;

[[noreturn]] void schema_fail(const std::string& path, const std::string& msg) {
  fail(ErrorCode::SchemaViolation, path + ": " + msg);
}

const json& require(const json& obj, const std::string& path,
                    const std::string& key) {
  if (!obj.is_object()) schema_fail(path, "expected an object");
  const auto it = obj.find(key);
  if (it == obj.end()) schema_fail(path, "missing required key '" + key + "'");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) schema_fail(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) schema_fail(path, "expected a finite number");
  return d;
}

Vec3 as_vec3(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 3) {
    schema_fail(path, "expected an array of 3 numbers");
  }
  return {as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"),
          as_number(v[2], path + "[2]")};
}

Quatern as_quat(const json& v, const std::string& path) {
  if (!v.is_array() || v.size() != 4) {
    schema_fail(path, "expected an array of 4 numbers [w, x, y, z]");
  }
  Quatern q{as_number(v[0], path + "[0]"), as_number(v[1], path + "[1]"),
            as_number(v[2], path + "[2]"), as_number(v[3], path + "[3]")};
  const double n = q.norm();
  if (n < 1e-9) schema_fail(path, "rotation has (near-)zero norm");
  // Already-unit rotations pass through untouched so a save/load cycle is
  // byte-stable; anything else is normalized.
  if (std::fabs(n - 1.0) > 1e-9) return q.normalized();
  return q;
}

json vec3_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

}  // namespace

Scene parse_scene_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) schema_fail("$", "top level must be an object");

  Scene scene;
  scene.table_height = as_number(require(root, "$", "table_height"),
                                 "$.table_height");

  const json& objects = require(root, "$", "objects");
  if (!objects.is_array()) schema_fail("$.objects", "expected an array");
  for (size_t i = 0; i < objects.size(); ++i) {
    const std::string path = "$.objects[" + std::to_string(i) + "]";
    const json& obj = objects[i];
    if (!obj.is_object()) schema_fail(path, "expected an object");
    ObjectInstance inst;
    const json& shape_id = require(obj, path, "shape_id");
    if (!shape_id.is_string() || shape_id.get<std::string>().empty()) {
      schema_fail(path + ".shape_id", "expected a non-empty string");
    }
    inst.shape_id = shape_id.get<std::string>();
    const json& pose = require(obj, path, "pose");
    inst.pose.rotation =
        as_quat(require(pose, path + ".pose", "rotation_wxyz"),
                path + ".pose.rotation_wxyz");
    inst.pose.translation =
        as_vec3(require(pose, path + ".pose", "translation"),
                path + ".pose.translation");
    if (obj.contains("scale")) {
      inst.scale = as_vec3(obj["scale"], path + ".scale");
      if (inst.scale.x <= 0.0 || inst.scale.y <= 0.0 || inst.scale.z <= 0.0) {
        fail(ErrorCode::NonPositiveScale,
             path + ".scale: components must be > 0");
      }
    }
    scene.objects.push_back(std::move(inst));
  }

  const json& cameras = require(root, "$", "cameras");
  if (!cameras.is_array()) schema_fail("$.cameras", "expected an array");
  if (cameras.empty()) {
    schema_fail("$.cameras", "at least one camera is required");
  }
  for (size_t i = 0; i < cameras.size(); ++i) {
    const std::string path = "$.cameras[" + std::to_string(i) + "]";
    const json& cam = cameras[i];
    CameraPose pose;
    pose.position = as_vec3(require(cam, path, "position"), path + ".position");
    pose.look_at = as_vec3(require(cam, path, "look_at"), path + ".look_at");
    if (dist2(pose.position, pose.look_at) < 1e-12) {
      schema_fail(path, "camera position coincides with its look_at point");
    }
    scene.cameras.push_back(pose);
  }
  return scene;
}

Scene load_scene(const std::string& path) {
  return parse_scene_json(read_text_file(path));
}

std::string format_scene_json(const Scene& scene) {
  json root;
  root["table_height"] = scene.table_height;
  root["objects"] = json::array();
  for (const ObjectInstance& inst : scene.objects) {
    json obj;
    obj["shape_id"] = inst.shape_id;
    obj["pose"] = {
        {"rotation_wxyz",
         json::array({inst.pose.rotation.w, inst.pose.rotation.x,
                      inst.pose.rotation.y, inst.pose.rotation.z})},
        {"translation", vec3_to_json(inst.pose.translation)}};
    obj["scale"] = vec3_to_json(inst.scale);
    root["objects"].push_back(std::move(obj));
  }
  root["cameras"] = json::array();
  for (const CameraPose& cam : scene.cameras) {
    json c;
    c["position"] = vec3_to_json(cam.position);
    c["look_at"] = vec3_to_json(cam.look_at);
    root["cameras"].push_back(std::move(c));
  }
  return root.dump(2) + "\n";
}

void save_scene(const Scene& scene, const std::string& path) {
  write_text_file(path, format_scene_json(scene));
}

}  // namespace mg
