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

#include <cmath>
#include <initializer_list>

#include "qusum/states.hpp"

namespace qusum::testing {

inline ComplexMatrix diag(std::initializer_list<double> values) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(values.size()),
                                        static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) {
    m(i, i) = v;
    ++i;
  }
  return m;
}

inline DensityMatrix diag_state(std::initializer_list<double> values) {
  return DensityMatrix(diag(values));
}

/// Qubit with Bloch vector of length r at angle theta from z in the x-z plane.
inline DensityMatrix bloch_qubit(double r, double theta) {
  ComplexMatrix m(2, 2);
  m << 0.5 * (1 + r * std::cos(theta)), 0.5 * r * std::sin(theta), 0.5 * r * std::sin(theta),
      0.5 * (1 - r * std::cos(theta));
  return DensityMatrix(m);
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace qusum::testing
