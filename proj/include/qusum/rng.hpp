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

#pragma once

#include <cstdint>
#include <limits>

namespace qusum {

/// Counter-based random stream keyed by (experiment_seed, trial_index, step_index).
///
/// Each draw is a pure function of the key and an internal counter, so any
/// stream can be recreated from its triple regardless of which worker runs it.
/// Satisfies UniformRandomBitGenerator.
class RngHandle {
 public:
  using result_type = std::uint64_t;

  explicit RngHandle(std::uint64_t seed, std::uint64_t trial = 0, std::uint64_t step = 0);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Standard normal (Box-Muller, no cached second value).
  double normal();

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key0_;
  std::uint64_t key1_;
  std::uint64_t counter_ = 0;
};

std::uint64_t mix64(std::uint64_t z);

}  // namespace qusum
