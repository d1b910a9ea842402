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
#include "multigrasp/util.hpp"

#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>

#include "multigrasp/error.hpp"

namespace mg {

namespace {
constexpr char kB64Alphabet[] =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}
}  // namespace

std::string base64_encode(const uint8_t* data, size_t len) {
  std::string out;
  out.reserve(((len + 2) / 3) * 4);
  size_t i = 0;
  for (; i + 2 < len; i += 3) {
    const uint32_t v = (static_cast<uint32_t>(data[i]) << 16) |
                       (static_cast<uint32_t>(data[i + 1]) << 8) |
                       static_cast<uint32_t>(data[i + 2]);
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back(kB64Alphabet[(v >> 6) & 63]);
    out.push_back(kB64Alphabet[v & 63]);
  }
  if (i + 1 == len) {
    const uint32_t v = static_cast<uint32_t>(data[i]) << 16;
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (i + 2 == len) {
    const uint32_t v = (static_cast<uint32_t>(data[i]) << 16) |
                       (static_cast<uint32_t>(data[i + 1]) << 8);
    out.push_back(kB64Alphabet[(v >> 18) & 63]);
    out.push_back(kB64Alphabet[(v >> 12) & 63]);
    out.push_back(kB64Alphabet[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

std::vector<uint8_t> base64_decode(const std::string& text) {
  if (text.size() % 4 != 0)
    fail(ErrorCode::BufferLengthMismatch,
         "base64 length not a multiple of 4: " + std::to_string(text.size()));
  std::vector<uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (size_t i = 0; i < text.size(); i += 4) {
    int vals[4];
    int pad = 0;
    for (int k = 0; k < 4; ++k) {
      const char c = text[i + k];
      if (c == '=') {
        // Padding only in the last two positions of the final quad.
        if (i + 4 != text.size() || k < 2)
          fail(ErrorCode::BufferLengthMismatch, "stray base64 padding");
        vals[k] = 0;
        ++pad;
      } else {
        if (pad > 0)
          fail(ErrorCode::BufferLengthMismatch, "data after base64 padding");
        vals[k] = b64_value(c);
        if (vals[k] < 0)
          fail(ErrorCode::BufferLengthMismatch,
               std::string("invalid base64 character '") + c + "'");
      }
    }
    const uint32_t v = (static_cast<uint32_t>(vals[0]) << 18) |
                       (static_cast<uint32_t>(vals[1]) << 12) |
                       (static_cast<uint32_t>(vals[2]) << 6) |
                       static_cast<uint32_t>(vals[3]);
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
    if (pad < 2) out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
    if (pad < 1) out.push_back(static_cast<uint8_t>(v & 0xFF));
  }
  return out;
}

std::string floats_to_base64(const std::vector<float>& values) {
  static_assert(sizeof(float) == 4, "float must be 32-bit");
  std::vector<uint8_t> bytes(values.size() * 4);
  for (size_t i = 0; i < values.size(); ++i) {
    uint32_t bits;
    std::memcpy(&bits, &values[i], 4);
    bytes[4 * i + 0] = static_cast<uint8_t>(bits & 0xFF);
    bytes[4 * i + 1] = static_cast<uint8_t>((bits >> 8) & 0xFF);
    bytes[4 * i + 2] = static_cast<uint8_t>((bits >> 16) & 0xFF);
    bytes[4 * i + 3] = static_cast<uint8_t>((bits >> 24) & 0xFF);
  }
  return base64_encode(bytes.data(), bytes.size());
}

std::vector<float> base64_to_floats(const std::string& text) {
  const std::vector<uint8_t> bytes = base64_decode(text);
  if (bytes.size() % 4 != 0)
    fail(ErrorCode::BufferLengthMismatch,
         "float buffer byte length not a multiple of 4");
  std::vector<float> out(bytes.size() / 4);
  for (size_t i = 0; i < out.size(); ++i) {
    const uint32_t bits = static_cast<uint32_t>(bytes[4 * i + 0]) |
                          (static_cast<uint32_t>(bytes[4 * i + 1]) << 8) |
                          (static_cast<uint32_t>(bytes[4 * i + 2]) << 16) |
                          (static_cast<uint32_t>(bytes[4 * i + 3]) << 24);
    std::memcpy(&out[i], &bits, 4);
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open for reading: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) fail(ErrorCode::Io, "read failure: " + path);
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) fail(ErrorCode::Io, "cannot open for writing: " + path);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) fail(ErrorCode::Io, "write failure: " + path);
}

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::DegenerateNeighborhood: return "DegenerateNeighborhood";
    case ErrorCode::MalformedHeader: return "MalformedHeader";
    case ErrorCode::CountMismatch: return "CountMismatch";
    case ErrorCode::BadFloat: return "BadFloat";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::NonPositiveScale: return "NonPositiveScale";
    case ErrorCode::JointOutOfRange: return "JointOutOfRange";
    case ErrorCode::InsufficientSurface: return "InsufficientSurface";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::ManifestMismatch: return "ManifestMismatch";
    case ErrorCode::BufferLengthMismatch: return "BufferLengthMismatch";
    case ErrorCode::EmptySplit: return "EmptySplit";
    case ErrorCode::NoFeasibleGrasp: return "NoFeasibleGrasp";
    case ErrorCode::NoVisibleSurface: return "NoVisibleSurface";
  }
  return "Unknown";
}

}  // namespace mg
