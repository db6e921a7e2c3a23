// Copyright 2026 The QUSUM Lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "qusum/rng.hpp"

#include <cmath>
#include <numbers>

namespace qusum {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}  // namespace

// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

RngHandle::RngHandle(std::uint64_t seed, std::uint64_t trial, std::uint64_t step) {
  std::uint64_t k = mix64(seed + kGolden);
  k = mix64(k ^ (trial * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL));
  k = mix64(k ^ (step * 0xAEF17502108EF2D9ULL + 0x6A09E667F3BCC909ULL));
  key0_ = k;
  key1_ = mix64(k ^ 0xA0761D6478BD642FULL);
}

RngHandle::result_type RngHandle::operator()() {
  ++counter_;
  return mix64((key0_ + counter_ * kGolden) ^ key1_);
}

double RngHandle::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

double RngHandle::normal() {
  // 1 - u lies in (0, 1], so the log is finite.
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace qusum
