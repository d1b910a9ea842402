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
#ifndef MULTIGRASP_RNG_HPP
#define MULTIGRASP_RNG_HPP

#include <cstdint>
#include <vector>

namespace mg {

/// Counter-based generator (splitmix64 core). We deliberately avoid the
/// standard-library engines and distributions: their sequences are not
/// pinned across implementations, and every artifact of this project
/// (datasets, weights, trial logs) must be reproducible from a seed alone.
class Rng {
 public:
  explicit Rng(uint64_t seed, uint64_t stream = 0);

  uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n); n must be > 0.
  uint32_t below(uint32_t n);
  /// Standard normal (Box-Muller, deterministic pairing).
  double normal();

  /// Derive an independent child stream; deterministic in (this seed, tag).
  Rng fork(uint64_t tag) const;

  /// First k entries of a seeded uniform shuffle of {0, .., n-1}
  /// (sample without replacement).
  std::vector<int> sample_without_replacement(int n, int k);

 private:
  uint64_t state_;
  uint64_t seed_key_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

/// Stateless 64-bit mix of two values; used to derive stream keys.
uint64_t mix64(uint64_t a, uint64_t b);

}  // namespace mg

#endif  // MULTIGRASP_RNG_HPP
