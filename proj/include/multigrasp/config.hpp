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
#ifndef MULTIGRASP_CONFIG_HPP
#define MULTIGRASP_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "multigrasp/pipeline.hpp"

namespace mg {

/// Everything the tools need in one document. Each section mirrors one of
/// the library config structs; a JSON config may set any subset of keys and
/// inherits the library defaults for the rest. Unknown keys are rejected so
/// typos fail loudly instead of silently running with defaults.
struct AppConfig {
  GripperConfig gripper;
  LabelConfig label;
  RegionBox region;
  NetConfig net;
  TrainConfig train;

  // Dataset generation.
  std::vector<std::string> objects;  // empty = every catalog shape
  int views_per_object = 20;
  int candidates_per_view = 15;
  int samples_per_view = 12288;
  int min_region_points = 20;
  double frame_radius = 0.01;
  double table_removal_threshold = 0.005;

  // Detection on a standalone cloud (scene files carry their own cameras).
  int detect_k = 400;
  std::vector<Vec3> detect_viewpoints = {{0.0, 0.0, 0.8}};

  // Split evaluation.
  double test_fraction = 0.15;
  int eval_seeds = 3;

  WorkspaceConfig workspace;
  ClutterConfig clutter;

  // Clutter benchmark.
  int bench_trials = 10;
  int top_reachable = 25;
  int regenerations = 2;
  bool multi_object_removes = false;

  void validate() const;

  /// Materialize the section a given stage consumes.
  DatasetBuildConfig dataset_build(uint64_t seed) const;
  DetectConfig detect_config() const;
  EvalConfig eval_config() const;
  TrialConfig trial_config() const;
  BenchConfig bench_config() const;
};

AppConfig parse_app_config_json(const std::string& text);
std::string format_app_config_json(const AppConfig& cfg);
AppConfig load_app_config(const std::string& path);

}  // namespace mg

#endif  // MULTIGRASP_CONFIG_HPP
