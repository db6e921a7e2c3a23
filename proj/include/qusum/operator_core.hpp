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

#include <Eigen/Dense>
#include <complex>
#include <cstddef>
#include <functional>

#include "qusum/error.hpp"

namespace qusum {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr std::size_t kDefaultMaxDim = 4096;
inline constexpr double kHermiticityTol = 1e-12;
inline constexpr double kRelativeSupportCutoff = 1e-12;
inline constexpr double kNegativeClampTol = 1e-10;

struct SpectralDecomposition {
  RealVector eigenvalues;      // descending
  ComplexMatrix eigenvectors;  // columns, unitary
  // True when the input was exactly diagonal and the decomposition is exact.
  bool exact = false;
};

bool all_finite(const ComplexMatrix& a);

/// Relative hermiticity defect ||A - A^dagger||_max / max(1, ||A||_max).
double hermiticity_error(const ComplexMatrix& a);

/// Throws kNotHermitian if `a` is not square or not Hermitian within
/// kHermiticityTol relative, kBadSpec if it holds NaN/Inf.
void require_hermitian(const ComplexMatrix& a);

SpectralDecomposition eig_hermitian(const ComplexMatrix& a);

/// Cutoff separating kernel from numerical noise for a decomposition:
/// 0 for exact (diagonal) decompositions, kRelativeSupportCutoff * lambda_max otherwise.
double default_support_cutoff(const SpectralDecomposition& spec);

/// Clamps eigenvalues in [-kNegativeClampTol * max(1, |lambda_max|), 0) to zero.
/// More negative eigenvalues raise kNotPositive.
void clamp_nonnegative(SpectralDecomposition& spec);

/// U f(Lambda) U^dagger.
ComplexMatrix apply_spectral_function(const SpectralDecomposition& spec,
                                      const std::function<double(double)>& f);

struct SupportLog {
  ComplexMatrix log;
  Eigen::Index rank = 0;  // eigenvalues counted as support
  double cutoff = 0.0;
};

/// Natural logarithm on the support; the kernel maps to zero.
/// A negative `support_cutoff` selects default_support_cutoff().
SupportLog log_on_support(const ComplexMatrix& a, double support_cutoff = -1.0);
SupportLog log_on_support(SpectralDecomposition spec, double support_cutoff = -1.0);

ComplexMatrix support_projector(const ComplexMatrix& a, double support_cutoff = -1.0);
ComplexMatrix support_projector(const SpectralDecomposition& spec, double support_cutoff = -1.0);

ComplexMatrix exp_hermitian(const ComplexMatrix& a);
ComplexMatrix sqrt_psd(const ComplexMatrix& a);

/// S^{-1/2} for positive definite S. Throws kSingularNormalizer when
/// lambda_min <= rel_floor * lambda_max.
ComplexMatrix inverse_sqrt_pd(const ComplexMatrix& s, double rel_floor = 1e-12);

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b,
                   std::size_t max_dim = kDefaultMaxDim);

double frobenius_norm(const ComplexMatrix& a);
double trace_norm(const ComplexMatrix& a);

inline Complex trace_product(const ComplexMatrix& a, const ComplexMatrix& b) {
  // Tr(AB) without forming AB.
  return (a.transpose().cwiseProduct(b)).sum();
}

}  // namespace qusum
