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
#include <vector>

#include "qusum/operator_core.hpp"
#include "qusum/rng.hpp"
#include "qusum/states.hpp"

namespace qusum {

inline constexpr double kCompletenessTol = 1e-9;
inline constexpr double kDistributionTol = 1e-6;

/// Outcome probabilities of a measurement; nonnegative and summing to one.
struct OutcomeDistribution {
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
  double operator[](std::size_t i) const { return probs[i]; }
};

/// Clamps tiny negatives, checks the sum, renormalizes. Throws kNotPositive or
/// kNormalizationBroken.
OutcomeDistribution make_distribution(std::vector<double> probs);

/// Finite-outcome POVM. Elements are PSD and sum to the identity to
/// kCompletenessTol; deviations up to that tolerance are repaired on
/// construction by S^{-1/2} M_i S^{-1/2}.
class Povm {
 public:
  Povm() = default;

  static Povm from_elements(std::vector<ComplexMatrix> elements);

  static Povm computational_basis(Eigen::Index dim);
  /// Rank-one projectors onto the columns of a unitary.
  static Povm projective(const ComplexMatrix& unitary);
  /// (1 - eps)|i><i| + eps I/dim: a deliberately blurred basis measurement.
  static Povm noisy_basis(Eigen::Index dim, double eps);
  /// m copies of I/m.
  static Povm trivial(Eigen::Index dim, std::size_t outcomes);

  Eigen::Index dim() const { return dim_; }
  std::size_t size() const { return elements_.size(); }
  const std::vector<ComplexMatrix>& elements() const { return elements_; }
  const ComplexMatrix& operator[](std::size_t i) const { return elements_[i]; }

  /// Max-norm deviation of the element sum from the identity.
  double completeness_error() const;

 private:
  Povm(Eigen::Index dim, std::vector<ComplexMatrix> elements)
      : dim_(dim), elements_(std::move(elements)) {}

  Eigen::Index dim_ = 0;
  std::vector<ComplexMatrix> elements_;
};

/// Product POVM with outcome index i * b.size() + j.
Povm tensor(const Povm& a, const Povm& b, std::size_t max_dim = kDefaultMaxDim);

/// CPTP map in Kraus form, K_k of shape out_dim x in_dim.
class KrausChannel {
 public:
  static KrausChannel from_kraus(std::vector<ComplexMatrix> kraus_ops);

  static KrausChannel identity(Eigen::Index dim);
  static KrausChannel unitary(const ComplexMatrix& u);
  /// Qubit depolarizing channel rho -> (1 - p) rho + p I/2.
  static KrausChannel depolarizing(double p);

  Eigen::Index in_dim() const { return in_dim_; }
  Eigen::Index out_dim() const { return out_dim_; }
  const std::vector<ComplexMatrix>& kraus_ops() const { return kraus_; }

  /// Max-norm deviation of sum K^dagger K from the identity.
  double trace_preservation_error() const;

 private:
  KrausChannel(Eigen::Index in_dim, Eigen::Index out_dim, std::vector<ComplexMatrix> kraus)
      : in_dim_(in_dim), out_dim_(out_dim), kraus_(std::move(kraus)) {}

  Eigen::Index in_dim_ = 0;
  Eigen::Index out_dim_ = 0;
  std::vector<ComplexMatrix> kraus_;
};

OutcomeDistribution induced_distribution(const Povm& m, const DensityMatrix& rho);

/// Inverse-CDF sampling with a single uniform draw.
std::size_t sample_outcome(const OutcomeDistribution& dist, RngHandle& rng);

/// Precomputed cumulative sums for repeated sampling from one distribution.
class CdfSampler {
 public:
  explicit CdfSampler(const OutcomeDistribution& dist);
  std::size_t operator()(RngHandle& rng) const { return draw(rng.uniform()); }
  std::size_t draw(double u) const;

 private:
  std::vector<double> cumulative_;
  std::size_t last_positive_ = 0;
};

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho);

/// Dual (Heisenberg-picture) image of a POVM: M_i -> sum_k K_k^dagger M_i K_k.
Povm pushforward_povm(const KrausChannel& ch, const Povm& m);

/// Channel from dimension d to n + 1 keeping the first n basis states and
/// dumping the rest incoherently into a sink state |n>. For n = d - 1 the
/// single discarded state is relabeled as the sink, so the map is the identity.
KrausChannel compression_channel(Eigen::Index n, Eigen::Index d);

// Random instances for property checks and verification suites.
ComplexMatrix random_ginibre(Eigen::Index rows, Eigen::Index cols, RngHandle& rng);
ComplexMatrix random_unitary(Eigen::Index dim, RngHandle& rng);
/// Full-rank (rank = dim) or rank-deficient random density matrix.
DensityMatrix random_density_matrix(Eigen::Index dim, RngHandle& rng, Eigen::Index rank = -1);
Povm random_povm(Eigen::Index dim, std::size_t outcomes, RngHandle& rng);
KrausChannel random_channel(Eigen::Index in_dim, Eigen::Index out_dim, std::size_t n_kraus,
                            RngHandle& rng);

}  // namespace qusum
