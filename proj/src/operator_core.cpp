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

#include "qusum/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace qusum {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kNotHermitian: return "NotHermitian";
    case ErrorKind::kNotPositive: return "NotPositive";
    case ErrorKind::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorKind::kDimensionOverflow: return "DimensionOverflow";
    case ErrorKind::kDimMismatch: return "DimMismatch";
    case ErrorKind::kBadDims: return "BadDims";
    case ErrorKind::kCutoffTooSmall: return "CutoffTooSmall";
    case ErrorKind::kBadSpec: return "BadSpec";
    case ErrorKind::kLengthMismatch: return "LengthMismatch";
    case ErrorKind::kNormalizationBroken: return "NormalizationBroken";
    case ErrorKind::kSingularNormalizer: return "SingularNormalizer";
    case ErrorKind::kBudgetExhausted: return "BudgetExhausted";
    case ErrorKind::kAlreadyStopped: return "AlreadyStopped";
    case ErrorKind::kMisalignedChangePoint: return "MisalignedChangePoint";
    case ErrorKind::kHorizonNonpositive: return "HorizonNonpositive";
    case ErrorKind::kInsufficientSpread: return "InsufficientSpread";
    case ErrorKind::kZeroDivergence: return "ZeroDivergence";
    case ErrorKind::kInfiniteDivergence: return "InfiniteDivergence";
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kIo: return "IoError";
  }
  return "Unknown";
}

bool all_finite(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (!std::isfinite(a(i, j).real()) || !std::isfinite(a(i, j).imag())) return false;
    }
  }
  return true;
}

double hermiticity_error(const ComplexMatrix& a) {
  if (a.rows() != a.cols()) return std::numeric_limits<double>::infinity();
  if (a.size() == 0) return 0.0;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.adjoint()).cwiseAbs().maxCoeff() / scale;
}

void require_hermitian(const ComplexMatrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(ErrorKind::kNotHermitian, "matrix is " + std::to_string(a.rows()) + "x" +
                                              std::to_string(a.cols()) + ", expected square");
  }
  if (!all_finite(a)) throw Error(ErrorKind::kBadSpec, "matrix has non-finite entries");
  const double err = hermiticity_error(a);
  if (err > kHermiticityTol) {
    throw Error(ErrorKind::kNotHermitian, "hermiticity defect " + std::to_string(err));
  }
}

namespace {

bool is_exactly_diagonal(const ComplexMatrix& a) {
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      if (i != j && a(i, j) != Complex(0.0, 0.0)) return false;
    }
  }
  return true;
}

SpectralDecomposition diagonal_decomposition(const ComplexMatrix& a) {
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  // Stable so that degenerate entries keep basis order.
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index x, Eigen::Index y) {
    return a(x, x).real() > a(y, y).real();
  });
  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const auto idx = order[static_cast<std::size_t>(k)];
    out.eigenvalues(k) = a(idx, idx).real();
    out.eigenvectors(idx, k) = 1.0;
  }
  out.exact = true;
  return out;
}

}  // namespace

SpectralDecomposition eig_hermitian(const ComplexMatrix& a) {
  require_hermitian(a);
  if (is_exactly_diagonal(a)) return diagonal_decomposition(a);

  // Symmetrize so the solver sees an exactly Hermitian input.
  const ComplexMatrix h = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(h);
  if (solver.info() != Eigen::Success) {
    throw Error(ErrorKind::kConvergenceFailure,
                "Hermitian eigensolver did not converge (dim " + std::to_string(a.rows()) + ")");
  }
  // Eigen returns ascending order.
  SpectralDecomposition out;
  out.eigenvalues = solver.eigenvalues().reverse();
  out.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return out;
}

double default_support_cutoff(const SpectralDecomposition& spec) {
  if (spec.exact || spec.eigenvalues.size() == 0) return 0.0;
  return kRelativeSupportCutoff * std::max(0.0, spec.eigenvalues(0));
}

void clamp_nonnegative(SpectralDecomposition& spec) {
  if (spec.eigenvalues.size() == 0) return;
  const double scale = std::max(1.0, std::abs(spec.eigenvalues(0)));
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
    double& lambda = spec.eigenvalues(k);
    if (lambda >= 0.0) continue;
    if (lambda < -kNegativeClampTol * scale) {
      throw Error(ErrorKind::kNotPositive, "eigenvalue " + std::to_string(lambda) +
                                               " below clamp tolerance");
    }
    lambda = 0.0;
  }
}

ComplexMatrix apply_spectral_function(const SpectralDecomposition& spec,
                                      const std::function<double(double)>& f) {
  RealVector fx(spec.eigenvalues.size());
  for (Eigen::Index k = 0; k < fx.size(); ++k) fx(k) = f(spec.eigenvalues(k));
  return spec.eigenvectors * fx.asDiagonal() * spec.eigenvectors.adjoint();
}

SupportLog log_on_support(SpectralDecomposition spec, double support_cutoff) {
  clamp_nonnegative(spec);
  const double cutoff = support_cutoff < 0.0 ? default_support_cutoff(spec) : support_cutoff;
  SupportLog out;
  out.cutoff = cutoff;
  for (Eigen::Index k = 0; k < spec.eigenvalues.size(); ++k) {
    if (spec.eigenvalues(k) > cutoff) ++out.rank;
  }
  out.log = apply_spectral_function(
      spec, [cutoff](double lambda) { return lambda > cutoff ? std::log(lambda) : 0.0; });
  return out;
}

SupportLog log_on_support(const ComplexMatrix& a, double support_cutoff) {
  return log_on_support(eig_hermitian(a), support_cutoff);
}

ComplexMatrix support_projector(const SpectralDecomposition& spec, double support_cutoff) {
  const double cutoff = support_cutoff < 0.0 ? default_support_cutoff(spec) : support_cutoff;
  const Eigen::Index n = spec.eigenvalues.size();
  ComplexMatrix p = ComplexMatrix::Zero(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    if (spec.eigenvalues(k) > cutoff) {
      p.noalias() += spec.eigenvectors.col(k) * spec.eigenvectors.col(k).adjoint();
    }
  }
  return p;
}

ComplexMatrix support_projector(const ComplexMatrix& a, double support_cutoff) {
  auto spec = eig_hermitian(a);
  clamp_nonnegative(spec);
  return support_projector(spec, support_cutoff);
}

ComplexMatrix exp_hermitian(const ComplexMatrix& a) {
  return apply_spectral_function(eig_hermitian(a), [](double x) { return std::exp(x); });
}

ComplexMatrix sqrt_psd(const ComplexMatrix& a) {
  auto spec = eig_hermitian(a);
  clamp_nonnegative(spec);
  return apply_spectral_function(spec, [](double x) { return std::sqrt(x); });
}

ComplexMatrix inverse_sqrt_pd(const ComplexMatrix& s, double rel_floor) {
  const auto spec = eig_hermitian(s);
  const double top = spec.eigenvalues(0);
  const double bottom = spec.eigenvalues(spec.eigenvalues.size() - 1);
  if (!(top > 0.0) || bottom <= rel_floor * top) {
    throw Error(ErrorKind::kSingularNormalizer,
                "normalizer eigenvalue ratio " + std::to_string(bottom / top) + " below floor");
  }
  return apply_spectral_function(spec, [](double x) { return 1.0 / std::sqrt(x); });
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b, std::size_t max_dim) {
  const auto rows = static_cast<std::size_t>(a.rows()) * static_cast<std::size_t>(b.rows());
  const auto cols = static_cast<std::size_t>(a.cols()) * static_cast<std::size_t>(b.cols());
  if (rows > max_dim || cols > max_dim) {
    throw Error(ErrorKind::kDimensionOverflow, "kron result " + std::to_string(rows) + "x" +
                                                   std::to_string(cols) + " exceeds max_dim " +
                                                   std::to_string(max_dim));
  }
  ComplexMatrix out(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

double frobenius_norm(const ComplexMatrix& a) { return a.norm(); }

double trace_norm(const ComplexMatrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::JacobiSVD<ComplexMatrix> svd(a);
  return svd.singularValues().sum();
}

}  // namespace qusum
