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
#ifndef MULTIGRASP_DATASET_HPP
#define MULTIGRASP_DATASET_HPP

#include <string>
#include <vector>

#include "multigrasp/encoding.hpp"

namespace mg {

/// One training exemplar: an encoded grasp region plus a success label per
/// grasp type. `split_tag` is "train", "test", or empty before a split has
/// been assigned. `candidate` records the world-frame grasp pose the
/// encoding was cropped around, so exemplars can be re-labeled or placed
/// back into their scene.
struct LabeledExemplar {
  GraspEncoding encoding;
  std::vector<int> labels;
  int object_id = -1;
  std::string split_tag;
  GraspCandidate candidate;
};

struct Dataset {
  int n_types = 5;
  std::vector<LabeledExemplar> exemplars;
};

/// JSON-lines serialization: a header line with the shared geometry, then
/// one line per exemplar carrying only the valid points (padding slots are
/// zero by construction and are rebuilt on load). Round-trips bit-exactly.
std::string format_dataset_jsonl(const Dataset& dataset);
Dataset parse_dataset_jsonl(const std::string& text);
void save_dataset(const Dataset& dataset, const std::string& path);
Dataset load_dataset(const std::string& path);

}  // namespace mg

#endif  // MULTIGRASP_DATASET_HPP
