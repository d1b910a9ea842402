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
#ifndef MULTIGRASP_ERROR_HPP
#define MULTIGRASP_ERROR_HPP

#include <stdexcept>
#include <string>

namespace mg {

/// Structured failure categories surfaced by every library entry point.
/// Anything else escaping the library is a bug.
enum class ErrorCode : int {
  InvalidArgument = 1,
  Io,
  EmptyCloud,
  DegenerateNeighborhood,
  MalformedHeader,
  CountMismatch,
  BadFloat,
  SchemaViolation,
  NonPositiveScale,
  JointOutOfRange,
  InsufficientSurface,
  EmptyRegion,
  ShapeMismatch,
  ManifestMismatch,
  BufferLengthMismatch,
  EmptySplit,
  NoFeasibleGrasp,
  NoVisibleSurface,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace mg

#endif  // MULTIGRASP_ERROR_HPP
