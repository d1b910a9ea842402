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
#include "multigrasp/net.hpp"

#include <cmath>

#include <json.hpp>

#include "multigrasp/kdtree.hpp"
#include "multigrasp/util.hpp"

namespace mg {

void NetConfig::validate() const {
  if (input_points < 1) {
    fail(ErrorCode::InvalidArgument, "net config: input_points must be >= 1");
  }
  if (n_types < 1) {
    fail(ErrorCode::InvalidArgument, "net config: n_types must be >= 1");
  }
  if (sa.empty()) {
    fail(ErrorCode::InvalidArgument,
         "net config: at least one set-abstraction stage is required");
  }
  for (const SaSpec& spec : sa) {
    if (spec.sample_count < 1) {
      fail(ErrorCode::InvalidArgument,
           "net config: sample_count must be >= 1");
    }
    if (!(spec.radius > 0.0) || !std::isfinite(spec.radius)) {
      fail(ErrorCode::InvalidArgument,
           "net config: grouping radius must be positive");
    }
    if (spec.mlp.empty()) {
      fail(ErrorCode::InvalidArgument,
           "net config: every stage needs at least one MLP layer");
    }
    for (int w : spec.mlp) {
      if (w < 1) {
        fail(ErrorCode::InvalidArgument,
             "net config: MLP widths must be >= 1");
      }
    }
  }
  if (fc_hidden.size() != 4) {
    fail(ErrorCode::InvalidArgument,
         "net config: exactly four hidden FC widths are required");
  }
  for (int w : fc_hidden) {
    if (w < 1) {
      fail(ErrorCode::InvalidArgument, "net config: FC widths must be >= 1");
    }
  }
}

int NetConfig::feature_width_into(int layer) const {
  return layer == 0 ? 0 : sa[static_cast<size_t>(layer - 1)].mlp.back();
}

int NetConfig::global_width() const { return sa.back().mlp.back(); }

long long param_count(const NetConfig& cfg) {
  cfg.validate();
  long long total = 0;
  for (size_t l = 0; l < cfg.sa.size(); ++l) {
    long long in = 3 + cfg.feature_width_into(static_cast<int>(l));
    for (int w : cfg.sa[l].mlp) {
      total += static_cast<long long>(w) * in + w;
      in = w;
    }
  }
  long long in = cfg.global_width();
  for (int w : cfg.fc_hidden) {
    total += static_cast<long long>(w) * in + w;
    in = w;
  }
  const long long head = 2LL * cfg.n_types;
  total += head * in + head;
  return total;
}

namespace {

using json = nlohmann::ordered_json;

/// Deterministic farthest-point sampling. The walk starts at the point
/// farthest from the centroid; every step takes the point with the largest
/// distance to the selected set. Ties fall back to lexicographically
/// smaller coordinates, then to the smaller index, so the result depends
/// only on the point multiset.
std::vector<int> farthest_point_sample(const std::vector<Vec3>& pts,
                                       int n_select) {
  const int n = static_cast<int>(pts.size());
  Vec3 centroid{0, 0, 0};
  for (const Vec3& p : pts) centroid = centroid + p;
  centroid = centroid * (1.0 / n);

  const auto beats = [&](double cand_d, int cand_i, double best_d,
                         int best_i) {
    if (cand_d != best_d) return cand_d > best_d;
    if (lex_less(pts[static_cast<size_t>(cand_i)],
                 pts[static_cast<size_t>(best_i)])) {
      return true;
    }
    if (lex_less(pts[static_cast<size_t>(best_i)],
                 pts[static_cast<size_t>(cand_i)])) {
      return false;
    }
    return cand_i < best_i;
  };

  std::vector<int> selected;
  selected.reserve(static_cast<size_t>(n_select));
  std::vector<bool> taken(static_cast<size_t>(n), false);
  std::vector<double> min_d2(static_cast<size_t>(n));

  int first = 0;
  double best_d = dist2(pts[0], centroid);
  for (int i = 1; i < n; ++i) {
    const double d = dist2(pts[static_cast<size_t>(i)], centroid);
    if (beats(d, i, best_d, first)) {
      first = i;
      best_d = d;
    }
  }
  selected.push_back(first);
  taken[static_cast<size_t>(first)] = true;
  for (int i = 0; i < n; ++i) {
    min_d2[static_cast<size_t>(i)] =
        dist2(pts[static_cast<size_t>(i)], pts[static_cast<size_t>(first)]);
  }

  while (static_cast<int>(selected.size()) < n_select) {
    int next = -1;
    double next_d = -1.0;
    for (int i = 0; i < n; ++i) {
      if (taken[static_cast<size_t>(i)]) continue;
      if (next < 0 || beats(min_d2[static_cast<size_t>(i)], i, next_d, next)) {
        next = i;
        next_d = min_d2[static_cast<size_t>(i)];
      }
    }
    selected.push_back(next);
    taken[static_cast<size_t>(next)] = true;
    for (int i = 0; i < n; ++i) {
      const double d =
          dist2(pts[static_cast<size_t>(i)], pts[static_cast<size_t>(next)]);
      if (d < min_d2[static_cast<size_t>(i)]) min_d2[static_cast<size_t>(i)] = d;
    }
  }
  return selected;
}

double number_from_json(const json& value, const std::string& key) {
  if (!value.is_number()) {
    fail(ErrorCode::SchemaViolation,
         "net config: '" + key + "' must be a number");
  }
  return value.get<double>();
}

int int_from_json(const json& value, const std::string& key) {
  if (!value.is_number_integer()) {
    fail(ErrorCode::SchemaViolation,
         "net config: '" + key + "' must be an integer");
  }
  return value.get<int>();
}

std::vector<int> int_list_from_json(const json& value,
                                    const std::string& key) {
  if (!value.is_array()) {
    fail(ErrorCode::SchemaViolation,
         "net config: '" + key + "' must be an array of integers");
  }
  std::vector<int> out;
  for (const json& item : value) out.push_back(int_from_json(item, key));
  return out;
}

json net_config_to_json(const NetConfig& cfg) {
  json root;
  root["input_points"] = cfg.input_points;
  root["n_types"] = cfg.n_types;
  json stages = json::array();
  for (const SaSpec& spec : cfg.sa) {
    json stage;
    stage["sample_count"] = spec.sample_count;
    stage["radius"] = spec.radius;
    stage["mlp"] = spec.mlp;
    stages.push_back(stage);
  }
  root["set_abstraction"] = stages;
  root["fc_hidden"] = cfg.fc_hidden;
  return root;
}

NetConfig net_config_from_json(const json& root) {
  if (!root.is_object()) {
    fail(ErrorCode::SchemaViolation, "net config must be a JSON object");
  }
  NetConfig cfg;
  for (const auto& [key, value] : root.items()) {
    if (key == "input_points") {
      cfg.input_points = int_from_json(value, key);
    } else if (key == "n_types") {
      cfg.n_types = int_from_json(value, key);
    } else if (key == "set_abstraction") {
      if (!value.is_array() || value.empty()) {
        fail(ErrorCode::SchemaViolation,
             "net config: 'set_abstraction' must be a non-empty array");
      }
      cfg.sa.clear();
      for (const json& stage : value) {
        if (!stage.is_object()) {
          fail(ErrorCode::SchemaViolation,
               "net config: stages must be JSON objects");
        }
        SaSpec spec;
        bool have_count = false, have_radius = false, have_mlp = false;
        for (const auto& [skey, svalue] : stage.items()) {
          if (skey == "sample_count") {
            spec.sample_count = int_from_json(svalue, skey);
            have_count = true;
          } else if (skey == "radius") {
            spec.radius = number_from_json(svalue, skey);
            have_radius = true;
          } else if (skey == "mlp") {
            spec.mlp = int_list_from_json(svalue, skey);
            have_mlp = true;
          } else {
            fail(ErrorCode::SchemaViolation,
                 "net config: unknown stage key '" + skey + "'");
          }
        }
        if (!have_count || !have_radius || !have_mlp) {
          fail(ErrorCode::SchemaViolation,
               "net config: stages need sample_count, radius, and mlp");
        }
        cfg.sa.push_back(std::move(spec));
      }
    } else if (key == "fc_hidden") {
      cfg.fc_hidden = int_list_from_json(value, key);
    } else {
      fail(ErrorCode::SchemaViolation, "net config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

constexpr const char* kCheckpointFormat = "multigrasp-checkpoint-v1";

}  // namespace

NetConfig parse_net_config_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation, std::string("invalid JSON: ") + e.what());
  }
  return net_config_from_json(root);
}

std::string format_net_config_json(const NetConfig& cfg) {
  cfg.validate();
  return net_config_to_json(cfg).dump(2) + "\n";
}

Grouping compute_grouping(const NetConfig& cfg, const GraspEncoding& encoding) {
  cfg.validate();
  if (static_cast<int>(encoding.points.size()) != cfg.input_points) {
    fail(ErrorCode::ShapeMismatch,
         "encoding holds " + std::to_string(encoding.points.size()) +
             " slots, config expects " + std::to_string(cfg.input_points));
  }
  if (encoding.valid_count < 1 ||
      encoding.valid_count > static_cast<int>(encoding.points.size())) {
    fail(ErrorCode::InvalidArgument,
         "encoding valid_count out of range: " +
             std::to_string(encoding.valid_count));
  }

  Grouping grouping;
  grouping.valid_count = encoding.valid_count;
  std::vector<Vec3> pts(encoding.points.begin(),
                        encoding.points.begin() + encoding.valid_count);
  for (const SaSpec& spec : cfg.sa) {
    GroupingLayer layer;
    layer.points = pts;
    const int n_select =
        std::min(spec.sample_count, static_cast<int>(pts.size()));
    layer.centers = farthest_point_sample(pts, n_select);

    const SpatialIndex index = SpatialIndex::build(pts);
    layer.groups.reserve(layer.centers.size());
    for (int c : layer.centers) {
      // The center itself sits at distance zero, so groups are never empty.
      layer.groups.push_back(
          index.radius(pts[static_cast<size_t>(c)], spec.radius));
    }

    std::vector<Vec3> next;
    next.reserve(layer.centers.size());
    for (int c : layer.centers) next.push_back(pts[static_cast<size_t>(c)]);
    grouping.layers.push_back(std::move(layer));
    pts = std::move(next);
  }
  return grouping;
}

std::string format_checkpoint(const Model<float>& model) {
  json root;
  root["format"] = kCheckpointFormat;
  root["net"] = net_config_to_json(model.cfg);
  json tensors = json::array();
  for_each_linear(model, [&](const std::string& name,
                             const Linear<float>& layer) {
    json wt;
    wt["name"] = name + ".weight";
    wt["shape"] = json::array({layer.out, layer.in});
    wt["data"] = floats_to_base64(layer.w);
    tensors.push_back(std::move(wt));
    json bt;
    bt["name"] = name + ".bias";
    bt["shape"] = json::array({layer.out});
    bt["data"] = floats_to_base64(layer.b);
    tensors.push_back(std::move(bt));
  });
  root["tensors"] = std::move(tensors);
  return root.dump(2) + "\n";
}

Model<float> parse_checkpoint(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorCode::ManifestMismatch,
         std::string("checkpoint: invalid JSON: ") + e.what());
  }
  if (!root.is_object() || !root.contains("format") ||
      !root["format"].is_string() ||
      root["format"].get<std::string>() != kCheckpointFormat) {
    fail(ErrorCode::ManifestMismatch,
         "checkpoint: missing or unsupported format marker");
  }
  if (!root.contains("net")) {
    fail(ErrorCode::ManifestMismatch, "checkpoint: missing net config");
  }
  NetConfig cfg;
  try {
    cfg = net_config_from_json(root["net"]);
  } catch (const Error& e) {
    fail(ErrorCode::ManifestMismatch,
         std::string("checkpoint: bad net config: ") + e.what());
  }
  Model<float> model = make_model<float>(cfg);

  if (!root.contains("tensors") || !root["tensors"].is_array()) {
    fail(ErrorCode::ManifestMismatch, "checkpoint: missing tensor list");
  }
  const json& tensors = root["tensors"];
  size_t cursor = 0;
  const auto take = [&](const std::string& name, std::vector<float>& dst,
                        const std::vector<int>& shape) {
    if (cursor >= tensors.size()) {
      fail(ErrorCode::ManifestMismatch,
           "checkpoint: tensor list ended before '" + name + "'");
    }
    const json& entry = tensors[cursor++];
    if (!entry.is_object() || !entry.contains("name") ||
        !entry["name"].is_string() ||
        entry["name"].get<std::string>() != name) {
      fail(ErrorCode::ManifestMismatch,
           "checkpoint: expected tensor '" + name + "'");
    }
    if (!entry.contains("shape") || !entry["shape"].is_array() ||
        entry["shape"].size() != shape.size()) {
      fail(ErrorCode::ManifestMismatch,
           "checkpoint: bad shape for '" + name + "'");
    }
    for (size_t i = 0; i < shape.size(); ++i) {
      if (!entry["shape"][i].is_number_integer() ||
          entry["shape"][i].get<int>() != shape[i]) {
        fail(ErrorCode::ManifestMismatch,
             "checkpoint: shape mismatch for '" + name + "'");
      }
    }
    if (!entry.contains("data") || !entry["data"].is_string()) {
      fail(ErrorCode::ManifestMismatch,
           "checkpoint: missing data for '" + name + "'");
    }
    const std::vector<float> values =
        base64_to_floats(entry["data"].get<std::string>());
    if (values.size() != dst.size()) {
      fail(ErrorCode::BufferLengthMismatch,
           "checkpoint: '" + name + "' holds " +
               std::to_string(values.size()) + " floats, expected " +
               std::to_string(dst.size()));
    }
    dst = values;
  };

  for_each_linear(model, [&](const std::string& name, Linear<float>& layer) {
    take(name + ".weight", layer.w, {layer.out, layer.in});
    take(name + ".bias", layer.b, {layer.out});
  });
  if (cursor != tensors.size()) {
    fail(ErrorCode::ManifestMismatch,
         "checkpoint: " + std::to_string(tensors.size() - cursor) +
             " unexpected trailing tensors");
  }
  return model;
}

void save_model(const Model<float>& model, const std::string& path) {
  write_text_file(path, format_checkpoint(model));
}

Model<float> load_model(const std::string& path) {
  return parse_checkpoint(read_text_file(path));
}

}  // namespace mg
