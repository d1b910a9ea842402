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
#include "multigrasp/dataset.hpp"

#include <sstream>

#include <json.hpp>

#include "multigrasp/error.hpp"
#include "multigrasp/util.hpp"

namespace mg {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kDatasetFormat = "multigrasp-dataset-v1";

double number_or_throw(const json& value, const std::string& what) {
  if (!value.is_number()) {
    fail(ErrorCode::SchemaViolation, "dataset: " + what + " must be a number");
  }
  return value.get<double>();
}

int int_or_throw(const json& value, const std::string& what) {
  if (!value.is_number_integer()) {
    fail(ErrorCode::SchemaViolation,
         "dataset: " + what + " must be an integer");
  }
  return value.get<int>();
}

}  // namespace

std::string format_dataset_jsonl(const Dataset& dataset) {
  int input_points = 0;
  RegionBox region;
  if (!dataset.exemplars.empty()) {
    input_points =
        static_cast<int>(dataset.exemplars.front().encoding.points.size());
    region = dataset.exemplars.front().encoding.region;
  }
  json header;
  header["format"] = kDatasetFormat;
  header["n_types"] = dataset.n_types;
  header["input_points"] = input_points;
  header["region"] = {{"half_x", region.half_x},
                      {"half_y", region.half_y},
                      {"z_min", region.z_min},
                      {"z_max", region.z_max}};
  header["count"] = dataset.exemplars.size();

  std::string out = header.dump() + "\n";
  for (const LabeledExemplar& ex : dataset.exemplars) {
    if (static_cast<int>(ex.encoding.points.size()) != input_points) {
      fail(ErrorCode::ShapeMismatch,
           "dataset: exemplars disagree on encoding size");
    }
    if (static_cast<int>(ex.labels.size()) != dataset.n_types) {
      fail(ErrorCode::ShapeMismatch,
           "dataset: exemplar label count does not match n_types");
    }
    json line;
    line["object_id"] = ex.object_id;
    line["split_tag"] = ex.split_tag;
    line["labels"] = ex.labels;
    line["candidate"] = json::parse(candidate_to_json(ex.candidate));
    json points = json::array();
    for (int i = 0; i < ex.encoding.valid_count; ++i) {
      const Vec3& p = ex.encoding.points[static_cast<size_t>(i)];
      points.push_back(json::array({p.x, p.y, p.z}));
    }
    line["points"] = std::move(points);
    out += line.dump() + "\n";
  }
  return out;
}

Dataset parse_dataset_jsonl(const std::string& text) {
  std::istringstream stream(text);
  std::string line;
  if (!std::getline(stream, line)) {
    fail(ErrorCode::SchemaViolation, "dataset: missing header line");
  }
  json header;
  try {
    header = json::parse(line);
  } catch (const json::exception& e) {
    fail(ErrorCode::SchemaViolation,
         std::string("dataset: invalid header: ") + e.what());
  }
  if (!header.is_object() || !header.contains("format") ||
      !header["format"].is_string() ||
      header["format"].get<std::string>() != kDatasetFormat) {
    fail(ErrorCode::SchemaViolation,
         "dataset: missing or unsupported format marker");
  }
  Dataset dataset;
  dataset.n_types = int_or_throw(header.value("n_types", json()), "n_types");
  const int input_points =
      int_or_throw(header.value("input_points", json()), "input_points");
  if (dataset.n_types < 1 || input_points < 0) {
    fail(ErrorCode::SchemaViolation, "dataset: invalid header sizes");
  }
  RegionBox region;
  if (header.contains("region") && header["region"].is_object()) {
    const json& r = header["region"];
    region.half_x = number_or_throw(r.value("half_x", json()), "half_x");
    region.half_y = number_or_throw(r.value("half_y", json()), "half_y");
    region.z_min = number_or_throw(r.value("z_min", json()), "z_min");
    region.z_max = number_or_throw(r.value("z_max", json()), "z_max");
  } else {
    fail(ErrorCode::SchemaViolation, "dataset: missing region");
  }

  size_t line_no = 1;
  while (std::getline(stream, line)) {
    ++line_no;
    if (line.empty()) continue;
    json entry;
    try {
      entry = json::parse(line);
    } catch (const json::exception& e) {
      fail(ErrorCode::SchemaViolation, "dataset: line " +
                                           std::to_string(line_no) +
                                           " is not valid JSON: " + e.what());
    }
    if (!entry.is_object()) {
      fail(ErrorCode::SchemaViolation,
           "dataset: line " + std::to_string(line_no) + " must be an object");
    }
    LabeledExemplar ex;
    ex.object_id = int_or_throw(entry.value("object_id", json()), "object_id");
    if (!entry.contains("split_tag") || !entry["split_tag"].is_string()) {
      fail(ErrorCode::SchemaViolation, "dataset: split_tag must be a string");
    }
    ex.split_tag = entry["split_tag"].get<std::string>();
    if (!entry.contains("labels") || !entry["labels"].is_array() ||
        static_cast<int>(entry["labels"].size()) != dataset.n_types) {
      fail(ErrorCode::SchemaViolation,
           "dataset: labels must hold one entry per grasp type");
    }
    for (const json& v : entry["labels"]) {
      const int label = int_or_throw(v, "label");
      if (label != 0 && label != 1) {
        fail(ErrorCode::SchemaViolation, "dataset: labels must be 0 or 1");
      }
      ex.labels.push_back(label);
    }
    // Older files may predate the candidate-pose field; it defaults then.
    if (entry.contains("candidate")) {
      ex.candidate = candidate_from_json(entry["candidate"].dump());
    }
    if (!entry.contains("points") || !entry["points"].is_array()) {
      fail(ErrorCode::SchemaViolation, "dataset: missing points array");
    }
    const json& points = entry["points"];
    if (static_cast<int>(points.size()) > input_points) {
      fail(ErrorCode::SchemaViolation,
           "dataset: more points than input_points");
    }
    ex.encoding.points.assign(static_cast<size_t>(input_points),
                              Vec3{0, 0, 0});
    ex.encoding.valid_count = static_cast<int>(points.size());
    ex.encoding.region = region;
    for (size_t i = 0; i < points.size(); ++i) {
      const json& p = points[i];
      if (!p.is_array() || p.size() != 3) {
        fail(ErrorCode::SchemaViolation,
             "dataset: points must be [x, y, z] triples");
      }
      ex.encoding.points[i] = Vec3{number_or_throw(p[0], "point coordinate"),
                                   number_or_throw(p[1], "point coordinate"),
                                   number_or_throw(p[2], "point coordinate")};
    }
    dataset.exemplars.push_back(std::move(ex));
  }
  return dataset;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  write_text_file(path, format_dataset_jsonl(dataset));
}

Dataset load_dataset(const std::string& path) {
  return parse_dataset_jsonl(read_text_file(path));
}

}  // namespace mg
