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
#ifndef MULTIGRASP_UTIL_HPP
#define MULTIGRASP_UTIL_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace mg {

std::string base64_encode(const uint8_t* data, size_t len);
/// Throws BufferLengthMismatch on malformed input.
std::vector<uint8_t> base64_decode(const std::string& text);

/// Little-endian float32 buffer <-> base64. Round-trips bit-exactly.
std::string floats_to_base64(const std::vector<float>& values);
std::vector<float> base64_to_floats(const std::string& text);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// Shortest round-trip decimal form of a double (std::to_chars).
std::string format_double(double v);

}  // namespace mg

#endif  // MULTIGRASP_UTIL_HPP
