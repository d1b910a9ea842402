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
#ifndef MULTIGRASP_PLY_HPP
#define MULTIGRASP_PLY_HPP

#include <string>

#include "multigrasp/cloud.hpp"

namespace mg {

/// ASCII PLY reader covering the subset this project emits: a single vertex
/// element with scalar properties. Coordinates come from x/y/z; normals from
/// nx/ny/nz (or normal_x/normal_y/normal_z); an integer `view` property
/// carries the per-point camera tag. Unknown scalar properties are parsed
/// and discarded.
///
/// Errors are structured: MalformedHeader for header problems, BadFloat for
/// rows whose values fail to parse (or normals that are not unit length),
/// CountMismatch when the number of data rows disagrees with the header.
PointCloud parse_ply(const std::string& text);
PointCloud load_ply(const std::string& path);

/// Writes the matching ASCII form. Floating-point values use the shortest
/// representation that parses back to the identical bits, so a
/// save -> load -> save cycle is byte-stable.
std::string format_ply(const PointCloud& cloud);
void save_ply(const PointCloud& cloud, const std::string& path);

}  // namespace mg

#endif  // MULTIGRASP_PLY_HPP
