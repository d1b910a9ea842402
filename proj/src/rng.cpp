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
#include "multigrasp/rng.hpp"

#include <cmath>

#include "multigrasp/error.hpp"
#include "multigrasp/geom.hpp"

namespace mg {

namespace {

inline uint64_t splitmix_step(uint64_t& state) {
  uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

uint64_t mix64(uint64_t a, uint64_t b) {
  uint64_t s = a ^ (b * 0x9E3779B97F4A7C15ULL + 0xD1B54A32D192ED03ULL);
  splitmix_step(s);
  return splitmix_step(s);
}

Rng::Rng(uint64_t seed, uint64_t stream) {
  seed_key_ = mix64(seed, stream);
  state_ = seed_key_;
}

uint64_t Rng::next_u64() { return splitmix_step(state_); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform();
}

uint32_t Rng::below(uint32_t n) {
  if (n == 0) fail(ErrorCode::InvalidArgument, "Rng::below(0)");
  // Multiply-shift; slight modulo bias is irrelevant here (n << 2^32) and
  // the mapping is identical on every platform.
  return static_cast<uint32_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u1 = uniform();
  if (u1 < 1e-300) u1 = 1e-300;
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * kPi * u2;
  spare_ = r * std::sin(a);
  have_spare_ = true;
  return r * std::cos(a);
}

Rng Rng::fork(uint64_t tag) const { return Rng(seed_key_, mix64(tag, 0x5F)); }

std::vector<int> Rng::sample_without_replacement(int n, int k) {
  if (n < 0 || k < 0 || k > n)
    fail(ErrorCode::InvalidArgument, "bad sample_without_replacement bounds");
  std::vector<int> idx(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) idx[static_cast<size_t>(i)] = i;
  // Partial Fisher-Yates: the first k slots are an exact uniform sample.
  for (int i = 0; i < k; ++i) {
    const uint32_t j =
        static_cast<uint32_t>(i) + below(static_cast<uint32_t>(n - i));
    std::swap(idx[static_cast<size_t>(i)], idx[j]);
  }
  idx.resize(static_cast<size_t>(k));
  return idx;
}

}  // namespace mg
