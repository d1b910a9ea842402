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
#include "multigrasp/capi.h"

#include <cstring>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "multigrasp/config.hpp"
#include "multigrasp/error.hpp"
#include "multigrasp/ply.hpp"
#include "multigrasp/rng.hpp"
#include "multigrasp/util.hpp"

using json = nlohmann::ordered_json;

struct mg_config {
  mg::AppConfig cfg;
};

struct mg_dataset {
  mg::Dataset data;
};

struct mg_model {
  mg::Model<float> model;
};

namespace {

constexpr int kInternalErrorCode = 99;

thread_local int g_error_code = 0;
thread_local std::string g_error_message;

void clear_error() {
  g_error_code = 0;
  g_error_message.clear();
}

/// Runs `body` with the thread's error state cleared; on an exception,
/// records it and returns `fallback` instead.
template <typename T, typename Body>
T guarded(T fallback, Body&& body) {
  clear_error();
  try {
    return body();
  } catch (const mg::Error& e) {
    g_error_code = static_cast<int>(e.code());
    g_error_message = e.what();
  } catch (const std::exception& e) {
    g_error_code = kInternalErrorCode;
    g_error_message = e.what();
  }
  return fallback;
}

char* copy_string(const std::string& text) {
  char* out = new char[text.size() + 1];
  std::memcpy(out, text.data(), text.size() + 1);
  return out;
}

void require(bool ok, const char* what) {
  if (!ok) mg::fail(mg::ErrorCode::InvalidArgument, what);
}

std::vector<mg::GraspType> types_from_csv(const char* types_csv) {
  std::vector<mg::GraspType> types;
  if (types_csv == nullptr || *types_csv == '\0') {
    for (mg::GraspType type : mg::all_grasp_types()) types.push_back(type);
    return types;
  }
  std::string text(types_csv);
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find(',', start);
    if (end == std::string::npos) end = text.size();
    std::string token = text.substr(start, end - start);
    const size_t first = token.find_first_not_of(" \t");
    const size_t last = token.find_last_not_of(" \t");
    if (first == std::string::npos) {
      mg::fail(mg::ErrorCode::InvalidArgument,
               "empty entry in grasp type list");
    }
    types.push_back(
        mg::grasp_type_from_name(token.substr(first, last - first + 1)));
    start = end + 1;
  }
  return types;
}

bool ends_with(const std::string& text, const std::string& suffix) {
  return text.size() >= suffix.size() &&
         text.compare(text.size() - suffix.size(), suffix.size(), suffix) == 0;
}

/// Detection shared by the scene and cloud entry points. When no model is
/// supplied, a randomly initialized one stands in and the report says so.
char* detect_common(const mg_config* config, const mg_model* model,
                    const mg::PointCloud& cloud,
                    const std::vector<mg::Vec3>& viewpoints, int k,
                    const char* types_csv, uint64_t seed) {
  const mg::AppConfig& cfg = config->cfg;
  const std::vector<mg::GraspType> types = types_from_csv(types_csv);

  mg::Model<float> fallback;
  const mg::Model<float>* net = nullptr;
  if (model != nullptr) {
    net = &model->model;
  } else {
    fallback = mg::make_model<float>(cfg.net);
    mg::init_weights(fallback, mg::mix64(seed, 0x696e6974ULL));
    net = &fallback;
  }

  mg::DetectConfig dc = cfg.detect_config();
  dc.input_points = net->cfg.input_points;
  const std::vector<mg::GraspDecision> decisions =
      mg::detect(cloud, *net, k > 0 ? k : cfg.detect_k, dc, types, viewpoints,
                 seed);

  json root = json::parse(mg::format_decisions_json(decisions));
  root["model"] = model != nullptr ? "checkpoint" : "random-init";
  return copy_string(root.dump(2) + "\n");
}

}  // namespace

extern "C" {

int mg_last_error_code(void) { return g_error_code; }

const char* mg_last_error_message(void) { return g_error_message.c_str(); }

void mg_string_free(char* text) { delete[] text; }

/* ------------------------------------------------------------------ */
/* Configuration                                                       */
/* ------------------------------------------------------------------ */

mg_config* mg_config_default(void) {
  return guarded<mg_config*>(nullptr, [] { return new mg_config{}; });
}

mg_config* mg_config_load(const char* path) {
  return guarded<mg_config*>(nullptr, [&]() -> mg_config* {
    require(path != nullptr, "path must not be NULL");
    return new mg_config{mg::load_app_config(path)};
  });
}

char* mg_config_format(const mg_config* config) {
  return guarded<char*>(nullptr, [&]() -> char* {
    require(config != nullptr, "config must not be NULL");
    return copy_string(mg::format_app_config_json(config->cfg));
  });
}

void mg_config_free(mg_config* config) { delete config; }

/* ------------------------------------------------------------------ */
/* Datasets                                                            */
/* ------------------------------------------------------------------ */

mg_dataset* mg_dataset_build(const mg_config* config, uint64_t seed) {
  return guarded<mg_dataset*>(nullptr, [&]() -> mg_dataset* {
    require(config != nullptr, "config must not be NULL");
    const mg::ShapeSet catalog = mg::builtin_catalog();
    std::vector<std::string> objects = config->cfg.objects;
    if (objects.empty()) {
      for (const mg::Shape& shape : catalog.shapes) {
        objects.push_back(shape.id);
      }
    }
    return new mg_dataset{
        mg::build_dataset(catalog, objects, config->cfg.dataset_build(seed))};
  });
}

mg_dataset* mg_dataset_load(const char* path) {
  return guarded<mg_dataset*>(nullptr, [&]() -> mg_dataset* {
    require(path != nullptr, "path must not be NULL");
    const std::string p(path);
    return new mg_dataset{ends_with(p, ".jsonl") ? mg::load_dataset(p)
                                                 : mg::load_dataset_dir(p)};
  });
}

int mg_dataset_save(const mg_dataset* dataset, const char* path) {
  return guarded<int>(-1, [&] {
    require(dataset != nullptr, "dataset must not be NULL");
    require(path != nullptr, "path must not be NULL");
    const std::string p(path);
    if (ends_with(p, ".jsonl")) {
      mg::save_dataset(dataset->data, p);
    } else {
      mg::save_dataset_dir(dataset->data, p);
    }
    return 0;
  });
}

int64_t mg_dataset_size(const mg_dataset* dataset) {
  return guarded<int64_t>(-1, [&]() -> int64_t {
    require(dataset != nullptr, "dataset must not be NULL");
    return static_cast<int64_t>(dataset->data.exemplars.size());
  });
}

char* mg_dataset_stats_json(const mg_dataset* dataset) {
  return guarded<char*>(nullptr, [&]() -> char* {
    require(dataset != nullptr, "dataset must not be NULL");
    const mg::Dataset& data = dataset->data;
    std::set<int> objects;
    for (const mg::LabeledExemplar& ex : data.exemplars) {
      objects.insert(ex.object_id);
    }
    json root;
    root["exemplars"] = data.exemplars.size();
    root["n_types"] = data.n_types;
    root["objects"] = objects.size();
    json rates = json::object();
    const std::vector<double> positive = mg::positive_rates(data);
    for (int t = 0; t < data.n_types; ++t) {
      rates[mg::grasp_type_name(static_cast<mg::GraspType>(t))] =
          positive[static_cast<size_t>(t)];
    }
    root["positive_rates"] = std::move(rates);
    return copy_string(root.dump(2) + "\n");
  });
}

void mg_dataset_free(mg_dataset* dataset) { delete dataset; }

/* ------------------------------------------------------------------ */
/* Models                                                              */
/* ------------------------------------------------------------------ */

mg_model* mg_model_create(const mg_config* config, uint64_t seed) {
  return guarded<mg_model*>(nullptr, [&]() -> mg_model* {
    require(config != nullptr, "config must not be NULL");
    auto handle = new mg_model{mg::make_model<float>(config->cfg.net)};
    mg::init_weights(handle->model, seed);
    return handle;
  });
}

mg_model* mg_model_load(const char* path) {
  return guarded<mg_model*>(nullptr, [&]() -> mg_model* {
    require(path != nullptr, "path must not be NULL");
    return new mg_model{mg::load_model(path)};
  });
}

int mg_model_save(const mg_model* model, const char* path) {
  return guarded<int>(-1, [&] {
    require(model != nullptr, "model must not be NULL");
    require(path != nullptr, "path must not be NULL");
    mg::save_model(model->model, path);
    return 0;
  });
}

int64_t mg_model_param_count(const mg_model* model) {
  return guarded<int64_t>(-1, [&]() -> int64_t {
    require(model != nullptr, "model must not be NULL");
    return mg::param_count(model->model);
  });
}

void mg_model_free(mg_model* model) { delete model; }

/* ------------------------------------------------------------------ */
/* Training and evaluation                                             */
/* ------------------------------------------------------------------ */

char* mg_train(mg_model* model, const mg_dataset* dataset,
               const mg_config* config, uint64_t seed) {
  return guarded<char*>(nullptr, [&]() -> char* {
    require(model != nullptr, "model must not be NULL");
    require(dataset != nullptr, "dataset must not be NULL");
    require(config != nullptr, "config must not be NULL");
    const mg::AppConfig& cfg = config->cfg;
    const mg::Split split =
        mg::make_split(dataset->data, mg::SplitKind::Random, cfg.test_fraction,
                       mg::mix64(seed, 1));
    const mg::PreparedDataset prepared =
        mg::prepare_dataset(model->model.cfg, dataset->data);
    mg::TrainConfig tc = cfg.train;
    tc.seed = mg::mix64(seed, 2);
    const mg::TrainLog log =
        mg::train_combined(model->model, dataset->data, prepared, split, tc);
    return copy_string(mg::format_train_log_csv(log));
  });
}

char* mg_eval_split(const mg_dataset* dataset, const char* split,
                    const char* mode, const mg_config* config, uint64_t seed) {
  return guarded<char*>(nullptr, [&]() -> char* {
    require(dataset != nullptr, "dataset must not be NULL");
    require(split != nullptr, "split must not be NULL");
    require(mode != nullptr, "mode must not be NULL");
    require(config != nullptr, "config must not be NULL");
    const mg::EvalReport report = mg::evaluate_split(
        dataset->data, mg::split_kind_from_name(split),
        mg::eval_mode_from_name(mode), config->cfg.eval_config(), seed);
    return copy_string(mg::format_eval_report_json(report));
  });
}

/* ------------------------------------------------------------------ */
/* Detection, benchmark, visualization                                 */
/* ------------------------------------------------------------------ */

char* mg_detect_scene(const mg_config* config, const char* scene_path,
                      const mg_model* model, int k, const char* types_csv,
                      uint64_t seed) {
  return guarded<char*>(nullptr, [&]() -> char* {
    require(config != nullptr, "config must not be NULL");
    require(scene_path != nullptr, "scene_path must not be NULL");
    const mg::AppConfig& cfg = config->cfg;
    const mg::Scene scene =
        mg::parse_scene_json(mg::read_text_file(scene_path));
    const mg::ShapeSet catalog = mg::builtin_catalog();
    const mg::PointCloud cloud =
        mg::capture_views(scene, catalog, cfg.samples_per_view,
                          mg::mix64(seed, 0x63617074ULL))
            .above_plane(scene.table_height, cfg.table_removal_threshold);
    std::vector<mg::Vec3> viewpoints;
    for (const mg::CameraPose& camera : scene.cameras) {
      viewpoints.push_back(camera.position);
    }
    return detect_common(config, model, cloud, viewpoints, k, types_csv, seed);
  });
}

char* mg_detect_cloud(const mg_config* config, const char* cloud_path,
                      const mg_model* model, int k, const char* types_csv,
                      uint64_t seed) {
  return guarded<char*>(nullptr, [&]() -> char* {
    require(config != nullptr, "config must not be NULL");
    require(cloud_path != nullptr, "cloud_path must not be NULL");
    const mg::PointCloud cloud = mg::load_ply(cloud_path);
    return detect_common(config, model, cloud, config->cfg.detect_viewpoints,
                         k, types_csv, seed);
  });
}

char* mg_clutter_bench(const mg_config* config, const mg_model* model,
                       int trials, uint64_t seed) {
  return guarded<char*>(nullptr, [&]() -> char* {
    require(config != nullptr, "config must not be NULL");
    const mg::AppConfig& cfg = config->cfg;

    mg::Model<float> fallback;
    const mg::Model<float>* net = nullptr;
    if (model != nullptr) {
      net = &model->model;
    } else {
      fallback = mg::make_model<float>(cfg.net);
      mg::init_weights(fallback, mg::mix64(seed, 0x696e6974ULL));
      net = &fallback;
    }

    mg::BenchConfig bc = cfg.bench_config();
    if (trials > 0) bc.trials = trials;
    bc.trial.detect.input_points = net->cfg.input_points;
    const mg::BenchReport report = mg::run_bench(
        mg::builtin_catalog(), *net, mg::standard_ablations(), bc, seed);
    json root = json::parse(mg::format_bench_report_json(report));
    root["model"] = model != nullptr ? "checkpoint" : "random-init";
    return copy_string(root.dump(2) + "\n");
  });
}

int mg_viz(const mg_config* config, const char* cloud_path,
           const char* decisions_path, const char* out_ply_path) {
  return guarded<int>(-1, [&] {
    require(config != nullptr, "config must not be NULL");
    require(cloud_path != nullptr, "cloud_path must not be NULL");
    require(decisions_path != nullptr, "decisions_path must not be NULL");
    require(out_ply_path != nullptr, "out_ply_path must not be NULL");
    const mg::PointCloud cloud = mg::load_ply(cloud_path);
    const std::vector<mg::GraspDecision> decisions =
        mg::parse_decisions_json(mg::read_text_file(decisions_path));
    mg::write_text_file(
        out_ply_path,
        mg::render_decisions_ply(cloud, decisions, config->cfg.region));
    return 0;
  });
}

}  // extern "C"
