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

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "qusum/operator_core.hpp"

namespace qusum {

inline constexpr double kDefaultTailTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;

/// Density matrix plus the probability mass dropped by Fock truncation
/// (recorded before renormalization, 0 for exact states).
///
/// Construction does not validate; use validate() or make_density_matrix().
class DensityMatrix {
 public:
  DensityMatrix() = default;
  explicit DensityMatrix(ComplexMatrix matrix, double trace_deficit = 0.0)
      : matrix_(std::move(matrix)), trace_deficit_(trace_deficit) {}

  Eigen::Index dim() const { return matrix_.rows(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  double trace_deficit() const { return trace_deficit_; }

 private:
  ComplexMatrix matrix_;
  double trace_deficit_ = 0.0;
};

struct ValidationReport {
  double hermiticity_error = 0.0;
  double min_eigenvalue = 0.0;
  double trace_error = 0.0;
  double trace_deficit = 0.0;
  bool passed = false;
  std::vector<std::string> failures;
};

ValidationReport validate(const DensityMatrix& rho);

/// Validating factory; throws kBadSpec with the report's failures.
DensityMatrix make_density_matrix(ComplexMatrix m, double trace_deficit = 0.0);

enum class StateKind { kThermal, kCoherent, kSqueezedVacuum, kFock, kMatrixFile, kMixture };

struct StateSpec {
  StateKind kind = StateKind::kThermal;
  double nbar = 0.0;           // thermal
  Complex alpha{0.0, 0.0};     // coherent
  double squeeze_r = 0.0;      // squeezed vacuum, position quadrature
  int fock_n = 0;              // fock
  std::string path;            // matrix file
  std::vector<std::pair<double, StateSpec>> components;  // mixture
  std::optional<std::size_t> fock_cutoff;                // nullopt = auto
  double tail_tol = kDefaultTailTol;
};

/// Parses the descriptor grammar:
///   thermal:nbar=<f> | coherent:re=<f>,im=<f> | squeezed:r=<f> | fock:n=<int>
///   | matrix:<path> | mix:w1*<spec>|w2*<spec>...
/// with optional suffix @cutoff=<N|auto>,tail=<f>. Throws kParse.
StateSpec parse_state_spec(std::string_view text);

/// Probability mass of the Fock tail {n >= cutoff} for Gaussian/Fock kinds
/// (mixtures: weighted sum). Matrix files have no tail.
double tail_mass(const StateSpec& spec, std::size_t cutoff);

/// Smallest cutoff N <= max_dim with tail_mass <= tail_tol; explicit cutoffs and
/// matrix files return their fixed dimension. Throws kCutoffTooSmall.
std::size_t resolve_cutoff(const StateSpec& spec, std::size_t max_dim = kDefaultMaxDim);

DensityMatrix build_state(const StateSpec& spec, std::size_t max_dim = kDefaultMaxDim);

/// Builds at an explicit dimension, overriding the spec's cutoff.
DensityMatrix build_state_at(const StateSpec& spec, std::size_t cutoff);

/// Builds two states on a common Fock cutoff (the larger auto cutoff, or the
/// fixed dimension of whichever spec pins one).
std::pair<DensityMatrix, DensityMatrix> build_state_pair(const StateSpec& first,
                                                         const StateSpec& second,
                                                         std::size_t max_dim = kDefaultMaxDim);

/// Unnormalized truncated Fock data, exposed for closed-form checks.
RealVector thermal_populations(double nbar, std::size_t cutoff);
ComplexVector coherent_amplitudes(Complex alpha, std::size_t cutoff);
RealVector squeezed_vacuum_amplitudes(double r, std::size_t cutoff);

DensityMatrix tensor_power(const DensityMatrix& rho, int l, std::size_t max_dim = kDefaultMaxDim);

double purity(const DensityMatrix& rho);
double mean_photon_number(const DensityMatrix& rho);
double trace_distance(const DensityMatrix& a, const DensityMatrix& b);

}  // namespace qusum
