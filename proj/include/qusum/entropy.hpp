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

#include <limits>

#include "qusum/measurement.hpp"
#include "qusum/states.hpp"

namespace qusum {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();
inline constexpr double kSupportLeakTol = 1e-9;
inline constexpr double kProbFloor = 1e-300;

struct RelEntResult {
  double value = 0.0;  // nats; +inf iff !support_ok
  bool support_ok = true;
  double support_leak = 0.0;        // sigma mass outside supp(rho)
  double truncation_budget = 0.0;   // combined trace deficit of the inputs

  bool finite() const { return support_ok; }
};

/// Umegaki relative entropy Tr sigma (log sigma - log rho), +inf when sigma
/// leaks more than `support_leak_tol` trace mass outside supp(rho).
RelEntResult quantum_relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho,
                                      double support_leak_tol = kSupportLeakTol);

/// Classical KL divergence D(q||p) in nats, +inf on support violation.
double kl_divergence(const OutcomeDistribution& q, const OutcomeDistribution& p);

/// D^M(sigma||rho): KL divergence of the distributions M induces.
double measured_relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho,
                                 const Povm& m);

inline double to_bits(double nats) { return nats / 0.69314718055994530942; }

}  // namespace qusum
