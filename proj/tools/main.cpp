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

// Command-line front end for the multigrasp shared library. Every operation
// goes through the C API; this file only handles argument parsing and file
// placement. Exit codes: 0 success, 1 usage error, 2 runtime failure.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include <CLI11.hpp>

#include "multigrasp/capi.h"

namespace {

struct ConfigDeleter {
  void operator()(mg_config* p) const { mg_config_free(p); }
};
struct DatasetDeleter {
  void operator()(mg_dataset* p) const { mg_dataset_free(p); }
};
struct ModelDeleter {
  void operator()(mg_model* p) const { mg_model_free(p); }
};
struct StringDeleter {
  void operator()(char* p) const { mg_string_free(p); }
};

using ConfigPtr = std::unique_ptr<mg_config, ConfigDeleter>;
using DatasetPtr = std::unique_ptr<mg_dataset, DatasetDeleter>;
using ModelPtr = std::unique_ptr<mg_model, ModelDeleter>;
using StringPtr = std::unique_ptr<char, StringDeleter>;

/// Prints the library's last error and signals exit code 2.
int runtime_failure(const std::string& stage) {
  std::cerr << "error: " << stage << ": " << mg_last_error_message()
            << " (code " << mg_last_error_code() << ")\n";
  return 2;
}

ConfigPtr open_config(const std::string& path) {
  return ConfigPtr(path.empty() ? mg_config_default()
                                : mg_config_load(path.c_str()));
}

DatasetPtr open_dataset(const std::string& path) {
  return DatasetPtr(mg_dataset_load(path.c_str()));
}

ModelPtr open_model(const std::string& path) {
  return ModelPtr(path.empty() ? nullptr : mg_model_load(path.c_str()));
}

/// Writes `text` to `out`, or to stdout when `out` is empty. A directory
/// path gets `fallback_name` appended. Returns the failure exit code, or 0.
int emit(const std::string& text, const std::string& out,
         const std::string& fallback_name) {
  if (out.empty()) {
    std::cout << text;
    return 0;
  }
  std::filesystem::path path(out);
  if (std::filesystem::is_directory(path) || out.back() == '/') {
    path /= fallback_name;
  }
  std::ofstream stream(path);
  stream << text;
  stream.flush();
  if (!stream) {
    std::cerr << "error: could not write " << path.string() << "\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"multigrasp: multi-fingered grasp detection toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  uint64_t seed = 0;
  std::string out;
  std::string dataset_path;
  std::string model_path;
  std::string scene_path;
  std::string cloud_path;
  std::string decisions_path;
  std::string split = "random";
  std::string mode = "combined";
  std::string types;
  int k = 0;
  int trials = 0;

  const auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON config file");
    cmd->add_option("--seed", seed, "Random seed")->default_val(0);
    cmd->add_option("--out", out, "Output path (default: stdout)");
  };

  CLI::App* gen = app.add_subcommand(
      "gen-dataset", "Generate a labeled grasp dataset from the catalog");
  add_common(gen);
  gen->get_option("--out")->required();

  CLI::App* train =
      app.add_subcommand("train", "Train an evaluator network on a dataset");
  add_common(train);
  train->add_option("--dataset", dataset_path, "Dataset path")->required();
  train->get_option("--out")->description("Checkpoint output path");
  train->get_option("--out")->required();

  CLI::App* eval = app.add_subcommand(
      "eval-split", "Train and score on a seeded dataset split");
  add_common(eval);
  eval->add_option("--dataset", dataset_path, "Dataset path")->required();
  eval->add_option("--split", split, "Split kind: random|object")
      ->check(CLI::IsMember({"random", "object"}));
  eval->add_option("--mode", mode, "Head layout: combined|separate")
      ->check(CLI::IsMember({"combined", "separate"}));

  CLI::App* detect =
      app.add_subcommand("detect", "Rank grasps on a scene or point cloud");
  add_common(detect);
  detect->add_option("--scene", scene_path, "Scene JSON (captured via its cameras)");
  detect->add_option("--cloud", cloud_path, "Point cloud PLY file");
  detect->add_option("--model", model_path,
                     "Checkpoint (default: randomly initialized network)");
  detect->add_option("--k", k, "Candidate count (default from config)");
  detect->add_option("--types", types,
                     "Comma-separated grasp type names (default: all)");

  CLI::App* bench = app.add_subcommand(
      "clutter-bench", "Clutter-clearing benchmark across type ablations");
  add_common(bench);
  bench->add_option("--model", model_path,
                    "Checkpoint (default: randomly initialized network)");
  bench->add_option("--trials", trials, "Scenes per ablation (default from config)");

  CLI::App* viz = app.add_subcommand(
      "viz", "Render ranked decisions over their cloud as a colored PLY");
  add_common(viz);
  viz->add_option("--cloud", cloud_path, "Point cloud PLY file")->required();
  viz->add_option("--decisions", decisions_path, "Decisions JSON from detect")
      ->required();
  viz->get_option("--out")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const ConfigPtr config = open_config(config_path);
  if (!config) return runtime_failure("loading config");

  if (gen->parsed()) {
    const DatasetPtr dataset(mg_dataset_build(config.get(), seed));
    if (!dataset) return runtime_failure("building dataset");
    if (mg_dataset_save(dataset.get(), out.c_str()) != 0) {
      return runtime_failure("saving dataset");
    }
    const StringPtr stats(mg_dataset_stats_json(dataset.get()));
    if (!stats) return runtime_failure("summarizing dataset");
    std::cout << stats.get();
    return 0;
  }

  if (train->parsed()) {
    const DatasetPtr dataset = open_dataset(dataset_path);
    if (!dataset) return runtime_failure("loading dataset");
    const ModelPtr model(mg_model_create(config.get(), seed));
    if (!model) return runtime_failure("creating model");
    const StringPtr log(
        mg_train(model.get(), dataset.get(), config.get(), seed));
    if (!log) return runtime_failure("training");
    if (mg_model_save(model.get(), out.c_str()) != 0) {
      return runtime_failure("saving checkpoint");
    }
    std::cout << log.get();
    return 0;
  }

  if (eval->parsed()) {
    const DatasetPtr dataset = open_dataset(dataset_path);
    if (!dataset) return runtime_failure("loading dataset");
    const StringPtr report(mg_eval_split(dataset.get(), split.c_str(),
                                         mode.c_str(), config.get(), seed));
    if (!report) return runtime_failure("evaluating split");
    return emit(report.get(), out, "eval.json");
  }

  if (detect->parsed()) {
    if (scene_path.empty() == cloud_path.empty()) {
      std::cerr << "error: pass exactly one of --scene or --cloud\n";
      return 1;
    }
    ModelPtr model = open_model(model_path);
    if (!model_path.empty() && !model) return runtime_failure("loading model");
    const char* types_csv = types.empty() ? nullptr : types.c_str();
    StringPtr decisions;
    if (!scene_path.empty()) {
      decisions.reset(mg_detect_scene(config.get(), scene_path.c_str(),
                                      model.get(), k, types_csv, seed));
    } else {
      decisions.reset(mg_detect_cloud(config.get(), cloud_path.c_str(),
                                      model.get(), k, types_csv, seed));
    }
    if (!decisions) return runtime_failure("detecting grasps");
    return emit(decisions.get(), out, "decisions.json");
  }

  if (bench->parsed()) {
    ModelPtr model = open_model(model_path);
    if (!model_path.empty() && !model) return runtime_failure("loading model");
    const StringPtr report(
        mg_clutter_bench(config.get(), model.get(), trials, seed));
    if (!report) return runtime_failure("running benchmark");
    return emit(report.get(), out, "bench.json");
  }

  if (viz->parsed()) {
    if (mg_viz(config.get(), cloud_path.c_str(), decisions_path.c_str(),
               out.c_str()) != 0) {
      return runtime_failure("rendering");
    }
    return 0;
  }

  std::cerr << "error: no subcommand\n";
  return 1;
}
