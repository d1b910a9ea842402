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
#include "multigrasp/config.hpp"

#include <string>
#include <vector>

#include <json.hpp>

#include "multigrasp/error.hpp"
#include "multigrasp/util.hpp"

namespace mg {

using json = nlohmann::ordered_json;

namespace {

double number_field(const json& v, const std::string& key) {
  if (!v.is_number()) {
    fail(ErrorCode::SchemaViolation, "'" + key + "' must be a number");
  }
  return v.get<double>();
}

int int_field(const json& v, const std::string& key) {
  if (!v.is_number_integer()) {
    fail(ErrorCode::SchemaViolation, "'" + key + "' must be an integer");
  }
  return v.get<int>();
}

bool bool_field(const json& v, const std::string& key) {
  if (!v.is_boolean()) {
    fail(ErrorCode::SchemaViolation, "'" + key + "' must be a boolean");
  }
  return v.get<bool>();
}

Vec3 vec3_field(const json& v, const std::string& key) {
  if (!v.is_array() || v.size() != 3 || !v[0].is_number() ||
      !v[1].is_number() || !v[2].is_number()) {
    fail(ErrorCode::SchemaViolation,
         "'" + key + "' must be an array of 3 numbers");
  }
  return {v[0].get<double>(), v[1].get<double>(), v[2].get<double>()};
}

std::vector<std::string> string_array_field(const json& v,
                                            const std::string& key) {
  if (!v.is_array()) {
    fail(ErrorCode::SchemaViolation, "'" + key + "' must be an array");
  }
  std::vector<std::string> out;
  for (const json& item : v) {
    if (!item.is_string()) {
      fail(ErrorCode::SchemaViolation,
           "'" + key + "' must contain only strings");
    }
    out.push_back(item.get<std::string>());
  }
  return out;
}

const json& object_section(const json& v, const std::string& key) {
  if (!v.is_object()) {
    fail(ErrorCode::SchemaViolation, "'" + key + "' must be a JSON object");
  }
  return v;
}

LabelConfig label_from_json(const json& section) {
  LabelConfig cfg;
  for (const auto& [key, value] : section.items()) {
    if (key == "antipodal_min_deg") {
      cfg.antipodal_min_deg = number_field(value, key);
    } else if (key == "retention_margin") {
      cfg.retention_margin = number_field(value, key);
    } else if (key == "capacity_power_kg") {
      cfg.capacity_power_kg = number_field(value, key);
    } else if (key == "capacity_precision_kg") {
      cfg.capacity_precision_kg = number_field(value, key);
    } else if (key == "capacity_pincher_kg") {
      cfg.capacity_pincher_kg = number_field(value, key);
    } else if (key == "surface_pitch") {
      cfg.surface_pitch = number_field(value, key);
    } else {
      fail(ErrorCode::SchemaViolation, "label: unknown key '" + key + "'");
    }
  }
  return cfg;
}

RegionBox region_from_json(const json& section) {
  RegionBox region;
  for (const auto& [key, value] : section.items()) {
    if (key == "half_x") region.half_x = number_field(value, key);
    else if (key == "half_y") region.half_y = number_field(value, key);
    else if (key == "z_min") region.z_min = number_field(value, key);
    else if (key == "z_max") region.z_max = number_field(value, key);
    else fail(ErrorCode::SchemaViolation, "region: unknown key '" + key + "'");
  }
  return region;
}

WorkspaceConfig workspace_from_json(const json& section) {
  WorkspaceConfig cfg;
  for (const auto& [key, value] : section.items()) {
    if (key == "min") cfg.min = vec3_field(value, key);
    else if (key == "max") cfg.max = vec3_field(value, key);
    else if (key == "min_elevation_deg") {
      cfg.min_elevation_deg = number_field(value, key);
    } else {
      fail(ErrorCode::SchemaViolation,
           "workspace: unknown key '" + key + "'");
    }
  }
  return cfg;
}

ClutterConfig clutter_from_json(const json& section) {
  ClutterConfig cfg;
  for (const auto& [key, value] : section.items()) {
    if (key == "cluster_count") cfg.cluster_count = int_field(value, key);
    else if (key == "ring_count") cfg.ring_count = int_field(value, key);
    else if (key == "cluster_radius") {
      cfg.cluster_radius = number_field(value, key);
    } else if (key == "ring_radius") {
      cfg.ring_radius = number_field(value, key);
    } else if (key == "clearance") cfg.clearance = number_field(value, key);
    else if (key == "cluster_ids") cfg.cluster_ids = string_array_field(value, key);
    else if (key == "ring_ids") cfg.ring_ids = string_array_field(value, key);
    else if (key == "cameras") cfg.cameras = int_field(value, key);
    else if (key == "camera_radius") {
      cfg.camera_radius = number_field(value, key);
    } else if (key == "camera_elevation_deg") {
      cfg.camera_elevation_deg = number_field(value, key);
    } else {
      fail(ErrorCode::SchemaViolation, "clutter: unknown key '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace

void AppConfig::validate() const {
  dataset_build(0).validate();
  detect_config().validate();
  eval_config().validate();
  trial_config().validate();
  bench_config().validate();
}

DatasetBuildConfig AppConfig::dataset_build(uint64_t seed) const {
  DatasetBuildConfig cfg;
  cfg.views_per_object = views_per_object;
  cfg.candidates_per_view = candidates_per_view;
  cfg.samples_per_view = samples_per_view;
  cfg.seed = seed;
  cfg.input_points = net.input_points;
  cfg.region = region;
  cfg.gripper = gripper;
  cfg.label = label;
  cfg.min_region_points = min_region_points;
  cfg.frame_radius = frame_radius;
  cfg.table_removal_threshold = table_removal_threshold;
  return cfg;
}

DetectConfig AppConfig::detect_config() const {
  DetectConfig cfg;
  cfg.k = detect_k;
  cfg.frame_radius = frame_radius;
  cfg.region = region;
  cfg.gripper = gripper;
  cfg.min_region_points = min_region_points;
  cfg.input_points = net.input_points;
  return cfg;
}

EvalConfig AppConfig::eval_config() const {
  EvalConfig cfg;
  cfg.net = net;
  cfg.train = train;
  cfg.test_fraction = test_fraction;
  cfg.n_seeds = eval_seeds;
  return cfg;
}

TrialConfig AppConfig::trial_config() const {
  TrialConfig cfg;
  cfg.detect = detect_config();
  cfg.label = label;
  cfg.workspace = workspace;
  cfg.top_reachable = top_reachable;
  cfg.regenerations = regenerations;
  cfg.samples_per_view = samples_per_view;
  cfg.table_removal_threshold = table_removal_threshold;
  cfg.multi_object_removes = multi_object_removes;
  return cfg;
}

BenchConfig AppConfig::bench_config() const {
  BenchConfig cfg;
  cfg.clutter = clutter;
  cfg.trial = trial_config();
  cfg.trials = bench_trials;
  return cfg;
}

AppConfig parse_app_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation, std::string("invalid JSON: ") + e.what());
  }
  if (!root.is_object()) {
    fail(ErrorCode::SchemaViolation, "config must be a JSON object");
  }

  AppConfig cfg;
  for (const auto& [key, value] : root.items()) {
    if (key == "gripper") {
      cfg.gripper = parse_gripper_config_json(object_section(value, key).dump());
    } else if (key == "net") {
      cfg.net = parse_net_config_json(object_section(value, key).dump());
    } else if (key == "train") {
      cfg.train = parse_train_config_json(object_section(value, key).dump());
    } else if (key == "label") {
      cfg.label = label_from_json(object_section(value, key));
    } else if (key == "region") {
      cfg.region = region_from_json(object_section(value, key));
    } else if (key == "workspace") {
      cfg.workspace = workspace_from_json(object_section(value, key));
    } else if (key == "clutter") {
      cfg.clutter = clutter_from_json(object_section(value, key));
    } else if (key == "dataset") {
      for (const auto& [k, v] : object_section(value, key).items()) {
        if (k == "objects") cfg.objects = string_array_field(v, k);
        else if (k == "views_per_object") cfg.views_per_object = int_field(v, k);
        else if (k == "candidates_per_view") {
          cfg.candidates_per_view = int_field(v, k);
        } else if (k == "samples_per_view") {
          cfg.samples_per_view = int_field(v, k);
        } else if (k == "min_region_points") {
          cfg.min_region_points = int_field(v, k);
        } else if (k == "frame_radius") cfg.frame_radius = number_field(v, k);
        else if (k == "table_removal_threshold") {
          cfg.table_removal_threshold = number_field(v, k);
        } else {
          fail(ErrorCode::SchemaViolation, "dataset: unknown key '" + k + "'");
        }
      }
    } else if (key == "detect") {
      for (const auto& [k, v] : object_section(value, key).items()) {
        if (k == "k") cfg.detect_k = int_field(v, k);
        else if (k == "viewpoints") {
          if (!v.is_array() || v.empty()) {
            fail(ErrorCode::SchemaViolation,
                 "detect: 'viewpoints' must be a non-empty array");
          }
          cfg.detect_viewpoints.clear();
          for (const json& p : v) {
            cfg.detect_viewpoints.push_back(vec3_field(p, k));
          }
        } else {
          fail(ErrorCode::SchemaViolation, "detect: unknown key '" + k + "'");
        }
      }
    } else if (key == "eval") {
      for (const auto& [k, v] : object_section(value, key).items()) {
        if (k == "test_fraction") cfg.test_fraction = number_field(v, k);
        else if (k == "seeds") cfg.eval_seeds = int_field(v, k);
        else fail(ErrorCode::SchemaViolation, "eval: unknown key '" + k + "'");
      }
    } else if (key == "bench") {
      for (const auto& [k, v] : object_section(value, key).items()) {
        if (k == "trials") cfg.bench_trials = int_field(v, k);
        else if (k == "top_reachable") cfg.top_reachable = int_field(v, k);
        else if (k == "regenerations") cfg.regenerations = int_field(v, k);
        else if (k == "multi_object_removes") {
          cfg.multi_object_removes = bool_field(v, k);
        } else {
          fail(ErrorCode::SchemaViolation, "bench: unknown key '" + k + "'");
        }
      }
    } else {
      fail(ErrorCode::SchemaViolation, "config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

std::string format_app_config_json(const AppConfig& cfg) {
  json root;
  root["gripper"] = json::parse(format_gripper_config_json(cfg.gripper));
  root["label"] = json{{"antipodal_min_deg", cfg.label.antipodal_min_deg},
                       {"retention_margin", cfg.label.retention_margin},
                       {"capacity_power_kg", cfg.label.capacity_power_kg},
                       {"capacity_precision_kg", cfg.label.capacity_precision_kg},
                       {"capacity_pincher_kg", cfg.label.capacity_pincher_kg},
                       {"surface_pitch", cfg.label.surface_pitch}};
  root["region"] = json{{"half_x", cfg.region.half_x},
                        {"half_y", cfg.region.half_y},
                        {"z_min", cfg.region.z_min},
                        {"z_max", cfg.region.z_max}};
  root["net"] = json::parse(format_net_config_json(cfg.net));
  root["train"] = json::parse(format_train_config_json(cfg.train));
  root["dataset"] =
      json{{"objects", cfg.objects},
           {"views_per_object", cfg.views_per_object},
           {"candidates_per_view", cfg.candidates_per_view},
           {"samples_per_view", cfg.samples_per_view},
           {"min_region_points", cfg.min_region_points},
           {"frame_radius", cfg.frame_radius},
           {"table_removal_threshold", cfg.table_removal_threshold}};
  json viewpoints = json::array();
  for (const Vec3& p : cfg.detect_viewpoints) {
    viewpoints.push_back(json::array({p.x, p.y, p.z}));
  }
  root["detect"] = json{{"k", cfg.detect_k},
                        {"viewpoints", std::move(viewpoints)}};
  root["eval"] = json{{"test_fraction", cfg.test_fraction},
                      {"seeds", cfg.eval_seeds}};
  root["workspace"] =
      json{{"min", json::array({cfg.workspace.min.x, cfg.workspace.min.y,
                                cfg.workspace.min.z})},
           {"max", json::array({cfg.workspace.max.x, cfg.workspace.max.y,
                                cfg.workspace.max.z})},
           {"min_elevation_deg", cfg.workspace.min_elevation_deg}};
  root["clutter"] =
      json{{"cluster_count", cfg.clutter.cluster_count},
           {"ring_count", cfg.clutter.ring_count},
           {"cluster_radius", cfg.clutter.cluster_radius},
           {"ring_radius", cfg.clutter.ring_radius},
           {"clearance", cfg.clutter.clearance},
           {"cluster_ids", cfg.clutter.cluster_ids},
           {"ring_ids", cfg.clutter.ring_ids},
           {"cameras", cfg.clutter.cameras},
           {"camera_radius", cfg.clutter.camera_radius},
           {"camera_elevation_deg", cfg.clutter.camera_elevation_deg}};
  root["bench"] = json{{"trials", cfg.bench_trials},
                       {"top_reachable", cfg.top_reachable},
                       {"regenerations", cfg.regenerations},
                       {"multi_object_removes", cfg.multi_object_removes}};
  return root.dump(2) + "\n";
}

AppConfig load_app_config(const std::string& path) {
  return parse_app_config_json(read_text_file(path));
}

}  // namespace mg
