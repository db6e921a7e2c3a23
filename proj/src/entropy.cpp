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

#include "qusum/entropy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace qusum {

RelEntResult quantum_relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho,
                                      double support_leak_tol) {
  if (sigma.dim() != rho.dim()) {
    throw Error(ErrorKind::kDimMismatch, "relative entropy of dims " +
                                             std::to_string(sigma.dim()) + " and " +
                                             std::to_string(rho.dim()));
  }
  RelEntResult result;
  result.truncation_budget = sigma.trace_deficit() + rho.trace_deficit();

  auto rho_spec = eig_hermitian(rho.matrix());
  clamp_nonnegative(rho_spec);
  const double rho_cutoff = default_support_cutoff(rho_spec);

  // <v_k|sigma|v_k> in the eigenbasis of rho.
  const ComplexMatrix& v = rho_spec.eigenvectors;
  const RealVector weights = (v.adjoint() * sigma.matrix() * v).diagonal().real();

  double cross = 0.0;  // Tr sigma log rho on supp(rho)
  double leak = 0.0;
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    const double lambda = rho_spec.eigenvalues(k);
    if (lambda > rho_cutoff) {
      cross += weights(k) * std::log(lambda);
    } else {
      leak += std::max(0.0, weights(k));
    }
  }
  result.support_leak = leak;
  if (leak > support_leak_tol) {
    result.support_ok = false;
    result.value = kInfinity;
    return result;
  }

  auto sigma_spec = eig_hermitian(sigma.matrix());
  clamp_nonnegative(sigma_spec);
  const double sigma_cutoff = default_support_cutoff(sigma_spec);
  double self = 0.0;  // Tr sigma log sigma
  for (Eigen::Index k = 0; k < sigma_spec.eigenvalues.size(); ++k) {
    const double lambda = sigma_spec.eigenvalues(k);
    if (lambda > sigma_cutoff) self += lambda * std::log(lambda);
  }
  result.value = std::max(0.0, self - cross);
  return result;
}

double kl_divergence(const OutcomeDistribution& q, const OutcomeDistribution& p) {
  if (q.size() != p.size()) {
    throw Error(ErrorKind::kLengthMismatch, "KL of lengths " + std::to_string(q.size()) +
                                                " and " + std::to_string(p.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    if (q[i] <= 0.0) continue;
    if (p[i] < kProbFloor) return kInfinity;
    total += q[i] * std::log(q[i] / p[i]);
  }
  return std::max(0.0, total);
}

double measured_relative_entropy(const DensityMatrix& sigma, const DensityMatrix& rho,
                                 const Povm& m) {
  return kl_divergence(induced_distribution(m, sigma), induced_distribution(m, rho));
}

}  // namespace qusum
