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
#include "multigrasp/ply.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <string_view>
#include <vector>

#include "multigrasp/error.hpp"
#include "multigrasp/util.hpp"

namespace mg {

namespace {

std::vector<std::string_view> split_lines(const std::string& text) {
  std::vector<std::string_view> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t end = text.find('\n', start);
    if (end == std::string::npos) end = text.size();
    std::string_view line(text.data() + start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (end == text.size()) break;
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> tokenize(std::string_view line) {
  std::vector<std::string_view> tokens;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

bool is_blank(std::string_view line) { return tokenize(line).empty(); }

double parse_value(std::string_view token, size_t row) {
  double value = 0.0;
  const char* first = token.data();
  const char* last = token.data() + token.size();
  const auto result = std::from_chars(first, last, value);
  if (result.ec != std::errc{} || result.ptr != last ||
      !std::isfinite(value)) {
    fail(ErrorCode::BadFloat, "vertex row " + std::to_string(row) +
                                  ": cannot parse value '" +
                                  std::string(token) + "'");
  }
  return value;
}

bool is_float_type(std::string_view t) {
  return t == "float" || t == "float32" || t == "double" || t == "float64";
}

bool is_int_type(std::string_view t) {
  return t == "char" || t == "uchar" || t == "short" || t == "ushort" ||
         t == "int" || t == "uint" || t == "int8" || t == "uint8" ||
         t == "int16" || t == "uint16" || t == "int32" || t == "uint32";
}

}  // namespace

PointCloud parse_ply(const std::string& text) {
  const std::vector<std::string_view> lines = split_lines(text);
  if (lines.empty() || tokenize(lines[0]) != std::vector<std::string_view>{"ply"}) {
    fail(ErrorCode::MalformedHeader, "file does not start with 'ply'");
  }

  struct Property {
    std::string type;
    std::string name;
  };
  bool saw_format = false;
  bool in_vertex_element = false;
  bool saw_vertex_element = false;
  size_t vertex_count = 0;
  std::vector<Property> props;
  size_t line_idx = 1;
  bool header_done = false;

  for (; line_idx < lines.size(); ++line_idx) {
    const auto tokens = tokenize(lines[line_idx]);
    if (tokens.empty()) {
      fail(ErrorCode::MalformedHeader,
           "blank line inside header at line " + std::to_string(line_idx + 1));
    }
    const std::string_view kw = tokens[0];
    if (kw == "comment" || kw == "obj_info") continue;
    if (kw == "end_header") {
      header_done = true;
      ++line_idx;
      break;
    }
    if (kw == "format") {
      if (tokens.size() != 3 || tokens[1] != "ascii" || tokens[2] != "1.0") {
        fail(ErrorCode::MalformedHeader,
             "only 'format ascii 1.0' is supported");
      }
      saw_format = true;
      continue;
    }
    if (kw == "element") {
      if (tokens.size() != 3) {
        fail(ErrorCode::MalformedHeader, "malformed element declaration");
      }
      size_t count = 0;
      const auto res = std::from_chars(tokens[2].data(),
                                       tokens[2].data() + tokens[2].size(),
                                       count);
      if (res.ec != std::errc{} || res.ptr != tokens[2].data() + tokens[2].size()) {
        fail(ErrorCode::MalformedHeader,
             "element count is not a non-negative integer");
      }
      if (tokens[1] == "vertex") {
        if (saw_vertex_element) {
          fail(ErrorCode::MalformedHeader, "duplicate vertex element");
        }
        saw_vertex_element = true;
        in_vertex_element = true;
        vertex_count = count;
      } else {
        // Mesh elements (faces, edges) are outside this reader's scope; a
        // zero-count declaration is harmless, anything else we cannot parse.
        if (count != 0) {
          fail(ErrorCode::MalformedHeader,
               "unsupported element '" + std::string(tokens[1]) +
                   "' with nonzero count");
        }
        in_vertex_element = false;
      }
      continue;
    }
    if (kw == "property") {
      if (tokens.size() >= 2 && tokens[1] == "list") {
        fail(ErrorCode::MalformedHeader, "list properties are not supported");
      }
      if (tokens.size() != 3) {
        fail(ErrorCode::MalformedHeader, "malformed property declaration");
      }
      if (!saw_vertex_element) {
        fail(ErrorCode::MalformedHeader, "property declared before any element");
      }
      if (!in_vertex_element) continue;  // property of a zero-count element
      if (!is_float_type(tokens[1]) && !is_int_type(tokens[1])) {
        fail(ErrorCode::MalformedHeader,
             "unsupported property type '" + std::string(tokens[1]) + "'");
      }
      props.push_back({std::string(tokens[1]), std::string(tokens[2])});
      continue;
    }
    fail(ErrorCode::MalformedHeader,
         "unrecognized header keyword '" + std::string(kw) + "'");
  }

  if (!header_done) fail(ErrorCode::MalformedHeader, "missing end_header");
  if (!saw_format) fail(ErrorCode::MalformedHeader, "missing format line");
  if (!saw_vertex_element) {
    fail(ErrorCode::MalformedHeader, "missing vertex element");
  }

  int col_x = -1, col_y = -1, col_z = -1;
  int col_nx = -1, col_ny = -1, col_nz = -1;
  int col_view = -1;
  for (size_t c = 0; c < props.size(); ++c) {
    const std::string& name = props[c].name;
    const int ci = static_cast<int>(c);
    if (name == "x") col_x = ci;
    else if (name == "y") col_y = ci;
    else if (name == "z") col_z = ci;
    else if (name == "nx" || name == "normal_x") col_nx = ci;
    else if (name == "ny" || name == "normal_y") col_ny = ci;
    else if (name == "nz" || name == "normal_z") col_nz = ci;
    else if (name == "view") col_view = ci;
  }
  if (col_x < 0 || col_y < 0 || col_z < 0) {
    fail(ErrorCode::MalformedHeader, "vertex element lacks x/y/z properties");
  }
  const int normal_cols = (col_nx >= 0) + (col_ny >= 0) + (col_nz >= 0);
  if (normal_cols != 0 && normal_cols != 3) {
    fail(ErrorCode::MalformedHeader, "incomplete normal properties");
  }
  const bool has_normals = normal_cols == 3;

  std::vector<Vec3> points;
  std::vector<Vec3> normals;
  std::vector<uint8_t> tags;
  points.reserve(vertex_count);
  if (has_normals) normals.reserve(vertex_count);
  if (col_view >= 0) tags.reserve(vertex_count);

  size_t rows_read = 0;
  for (; line_idx < lines.size() && rows_read < vertex_count; ++line_idx) {
    if (is_blank(lines[line_idx])) continue;
    const auto tokens = tokenize(lines[line_idx]);
    if (tokens.size() != props.size()) {
      fail(ErrorCode::BadFloat,
           "vertex row " + std::to_string(rows_read) + ": expected " +
               std::to_string(props.size()) + " values, got " +
               std::to_string(tokens.size()));
    }
    std::vector<double> values(tokens.size());
    for (size_t c = 0; c < tokens.size(); ++c) {
      values[c] = parse_value(tokens[c], rows_read);
    }
    points.push_back({values[col_x], values[col_y], values[col_z]});
    if (has_normals) {
      const Vec3 n{values[col_nx], values[col_ny], values[col_nz]};
      if (std::fabs(n.norm() - 1.0) > 1e-6) {
        fail(ErrorCode::BadFloat, "vertex row " + std::to_string(rows_read) +
                                      ": normal is not unit length");
      }
      normals.push_back(n);
    }
    if (col_view >= 0) {
      const double v = values[static_cast<size_t>(col_view)];
      if (v != std::floor(v) || v < 0.0 || v > 255.0) {
        fail(ErrorCode::BadFloat, "vertex row " + std::to_string(rows_read) +
                                      ": view tag must be an integer in [0, 255]");
      }
      tags.push_back(static_cast<uint8_t>(v));
    }
    ++rows_read;
  }
  if (rows_read < vertex_count) {
    fail(ErrorCode::CountMismatch,
         "header declares " + std::to_string(vertex_count) +
             " vertices but only " + std::to_string(rows_read) +
             " rows are present");
  }
  for (; line_idx < lines.size(); ++line_idx) {
    if (!is_blank(lines[line_idx])) {
      fail(ErrorCode::CountMismatch,
           "data continues past the declared vertex count");
    }
  }

  return PointCloud::make(std::move(points), std::move(normals),
                          std::move(tags));
}

PointCloud load_ply(const std::string& path) {
  return parse_ply(read_text_file(path));
}

std::string format_ply(const PointCloud& cloud) {
  std::string out;
  out.reserve(64 + cloud.size() * 48);
  out += "ply\n";
  out += "format ascii 1.0\n";
  out += "element vertex " + std::to_string(cloud.size()) + "\n";
  out += "property double x\n";
  out += "property double y\n";
  out += "property double z\n";
  if (cloud.has_normals()) {
    out += "property double nx\n";
    out += "property double ny\n";
    out += "property double nz\n";
  }
  if (cloud.has_view_tags()) {
    out += "property uchar view\n";
  }
  out += "end_header\n";
  for (size_t i = 0; i < cloud.size(); ++i) {
    const Vec3& p = cloud.point(i);
    out += format_double(p.x);
    out += ' ';
    out += format_double(p.y);
    out += ' ';
    out += format_double(p.z);
    if (cloud.has_normals()) {
      const Vec3& n = cloud.normal(i);
      out += ' ';
      out += format_double(n.x);
      out += ' ';
      out += format_double(n.y);
      out += ' ';
      out += format_double(n.z);
    }
    if (cloud.has_view_tags()) {
      out += ' ';
      out += std::to_string(static_cast<int>(cloud.view_tag(i)));
    }
    out += '\n';
  }
  return out;
}

void save_ply(const PointCloud& cloud, const std::string& path) {
  write_text_file(path, format_ply(cloud));
}

}  // namespace mg
