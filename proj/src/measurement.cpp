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

#include "qusum/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace qusum {

OutcomeDistribution make_distribution(std::vector<double> probs) {
  if (probs.empty()) throw Error(ErrorKind::kNormalizationBroken, "empty distribution");
  double total = 0.0;
  for (double& p : probs) {
    if (!std::isfinite(p)) throw Error(ErrorKind::kNormalizationBroken, "non-finite probability");
    if (p < 0.0) {
      if (p < -kNegativeClampTol) {
        throw Error(ErrorKind::kNotPositive, "probability " + std::to_string(p));
      }
      p = 0.0;
    }
    total += p;
  }
  if (std::abs(total - 1.0) > kDistributionTol) {
    throw Error(ErrorKind::kNormalizationBroken,
                "probabilities sum to " + std::to_string(total));
  }
  for (double& p : probs) p /= total;
  return OutcomeDistribution{std::move(probs)};
}

// ---------------------------------------------------------------------------
// Povm

namespace {

double max_deviation_from_identity(const ComplexMatrix& s) {
  return (s - ComplexMatrix::Identity(s.rows(), s.cols())).cwiseAbs().maxCoeff();
}

// Below this the element sum is treated as exact and left untouched, so that
// exactly representable POVMs keep their exact zeros.
constexpr double kRepairFloor = 1e-13;

}  // namespace

Povm Povm::from_elements(std::vector<ComplexMatrix> elements) {
  if (elements.empty()) throw Error(ErrorKind::kBadSpec, "POVM needs at least one element");
  const Eigen::Index dim = elements.front().rows();
  ComplexMatrix sum = ComplexMatrix::Zero(dim, dim);
  for (auto& e : elements) {
    if (e.rows() != dim || e.cols() != dim) {
      throw Error(ErrorKind::kDimMismatch, "POVM elements have inconsistent shapes");
    }
    require_hermitian(e);
    e = 0.5 * (e + e.adjoint());
    const double lowest = eig_hermitian(e).eigenvalues.minCoeff();
    if (lowest < -kNegativeClampTol) {
      throw Error(ErrorKind::kNotPositive, "POVM element eigenvalue " + std::to_string(lowest));
    }
    sum += e;
  }
  const double dev = max_deviation_from_identity(sum);
  if (dev > kCompletenessTol) {
    throw Error(ErrorKind::kNormalizationBroken,
                "POVM elements sum to identity only within " + std::to_string(dev));
  }
  if (dev > kRepairFloor) {
    const ComplexMatrix s_inv_half = inverse_sqrt_pd(sum);
    for (auto& e : elements) {
      e = s_inv_half * e * s_inv_half;
      e = 0.5 * (e + e.adjoint());
    }
  }
  return Povm(dim, std::move(elements));
}

Povm Povm::computational_basis(Eigen::Index dim) {
  std::vector<ComplexMatrix> elems;
  for (Eigen::Index i = 0; i < dim; ++i) {
    ComplexMatrix e = ComplexMatrix::Zero(dim, dim);
    e(i, i) = 1.0;
    elems.push_back(std::move(e));
  }
  return from_elements(std::move(elems));
}

Povm Povm::projective(const ComplexMatrix& unitary) {
  std::vector<ComplexMatrix> elems;
  for (Eigen::Index i = 0; i < unitary.cols(); ++i) {
    elems.emplace_back(unitary.col(i) * unitary.col(i).adjoint());
  }
  return from_elements(std::move(elems));
}

Povm Povm::noisy_basis(Eigen::Index dim, double eps) {
  if (!(eps >= 0.0 && eps <= 1.0)) throw Error(ErrorKind::kBadSpec, "noise must lie in [0,1]");
  std::vector<ComplexMatrix> elems;
  for (Eigen::Index i = 0; i < dim; ++i) {
    ComplexMatrix e = (eps / static_cast<double>(dim)) * ComplexMatrix::Identity(dim, dim);
    e(i, i) += 1.0 - eps;
    elems.push_back(std::move(e));
  }
  return from_elements(std::move(elems));
}

Povm Povm::trivial(Eigen::Index dim, std::size_t outcomes) {
  if (outcomes == 0) throw Error(ErrorKind::kBadSpec, "POVM needs at least one outcome");
  std::vector<ComplexMatrix> elems(
      outcomes, ComplexMatrix::Identity(dim, dim) / static_cast<double>(outcomes));
  return from_elements(std::move(elems));
}

double Povm::completeness_error() const {
  ComplexMatrix sum = ComplexMatrix::Zero(dim_, dim_);
  for (const auto& e : elements_) sum += e;
  return max_deviation_from_identity(sum);
}

Povm tensor(const Povm& a, const Povm& b, std::size_t max_dim) {
  std::vector<ComplexMatrix> elems;
  elems.reserve(a.size() * b.size());
  for (const auto& ea : a.elements()) {
    for (const auto& eb : b.elements()) elems.push_back(kron(ea, eb, max_dim));
  }
  return Povm::from_elements(std::move(elems));
}

// ---------------------------------------------------------------------------
// KrausChannel

KrausChannel KrausChannel::from_kraus(std::vector<ComplexMatrix> kraus_ops) {
  if (kraus_ops.empty()) throw Error(ErrorKind::kBadSpec, "channel needs at least one Kraus op");
  const Eigen::Index out_dim = kraus_ops.front().rows();
  const Eigen::Index in_dim = kraus_ops.front().cols();
  ComplexMatrix sum = ComplexMatrix::Zero(in_dim, in_dim);
  for (const auto& k : kraus_ops) {
    if (k.rows() != out_dim || k.cols() != in_dim) {
      throw Error(ErrorKind::kDimMismatch, "Kraus operators have inconsistent shapes");
    }
    if (!all_finite(k)) throw Error(ErrorKind::kBadSpec, "Kraus operator has non-finite entries");
    sum.noalias() += k.adjoint() * k;
  }
  const double dev = max_deviation_from_identity(sum);
  if (dev > kCompletenessTol) {
    throw Error(ErrorKind::kNormalizationBroken,
                "Kraus operators are not trace preserving (deviation " + std::to_string(dev) + ")");
  }
  return KrausChannel(in_dim, out_dim, std::move(kraus_ops));
}

KrausChannel KrausChannel::identity(Eigen::Index dim) {
  return from_kraus({ComplexMatrix::Identity(dim, dim)});
}

KrausChannel KrausChannel::unitary(const ComplexMatrix& u) { return from_kraus({u}); }

KrausChannel KrausChannel::depolarizing(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorKind::kBadSpec, "depolarizing p outside [0,1]");
  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  ComplexMatrix y(2, 2);
  y << 0, Complex(0, -1), Complex(0, 1), 0;
  ComplexMatrix z(2, 2);
  z << 1, 0, 0, -1;
  const double a = std::sqrt(1.0 - 0.75 * p);
  const double b = std::sqrt(0.25 * p);
  return from_kraus({a * ComplexMatrix::Identity(2, 2), b * x, b * y, b * z});
}

double KrausChannel::trace_preservation_error() const {
  ComplexMatrix sum = ComplexMatrix::Zero(in_dim_, in_dim_);
  for (const auto& k : kraus_) sum.noalias() += k.adjoint() * k;
  return max_deviation_from_identity(sum);
}

// ---------------------------------------------------------------------------
// Measurement statistics

OutcomeDistribution induced_distribution(const Povm& m, const DensityMatrix& rho) {
  if (m.dim() != rho.dim()) {
    throw Error(ErrorKind::kDimMismatch, "POVM dim " + std::to_string(m.dim()) +
                                             " vs state dim " + std::to_string(rho.dim()));
  }
  std::vector<double> probs;
  probs.reserve(m.size());
  for (const auto& e : m.elements()) probs.push_back(trace_product(e, rho.matrix()).real());
  return make_distribution(std::move(probs));
}

CdfSampler::CdfSampler(const OutcomeDistribution& dist) {
  cumulative_.resize(dist.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    acc += dist[i];
    cumulative_[i] = acc;
    if (dist[i] > 0.0) last_positive_ = i;
  }
}

std::size_t CdfSampler::draw(double u) const {
  // First index with u < F_i; zero-probability outcomes have F_i == F_{i-1}
  // and can never be selected.
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  if (it == cumulative_.end()) return last_positive_;
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), last_positive_);
}

std::size_t sample_outcome(const OutcomeDistribution& dist, RngHandle& rng) {
  return CdfSampler(dist)(rng);
}

DensityMatrix apply_channel(const KrausChannel& ch, const DensityMatrix& rho) {
  if (ch.in_dim() != rho.dim()) {
    throw Error(ErrorKind::kDimMismatch, "channel input dim " + std::to_string(ch.in_dim()) +
                                             " vs state dim " + std::to_string(rho.dim()));
  }
  ComplexMatrix out = ComplexMatrix::Zero(ch.out_dim(), ch.out_dim());
  for (const auto& k : ch.kraus_ops()) out.noalias() += k * rho.matrix() * k.adjoint();
  out = 0.5 * (out + out.adjoint());
  return DensityMatrix(std::move(out), rho.trace_deficit());
}

Povm pushforward_povm(const KrausChannel& ch, const Povm& m) {
  if (ch.out_dim() != m.dim()) {
    throw Error(ErrorKind::kDimMismatch, "channel output dim " + std::to_string(ch.out_dim()) +
                                             " vs POVM dim " + std::to_string(m.dim()));
  }
  std::vector<ComplexMatrix> elems;
  elems.reserve(m.size());
  for (const auto& e : m.elements()) {
    ComplexMatrix dual = ComplexMatrix::Zero(ch.in_dim(), ch.in_dim());
    for (const auto& k : ch.kraus_ops()) dual.noalias() += k.adjoint() * e * k;
    elems.push_back(0.5 * (dual + dual.adjoint()));
  }
  return Povm::from_elements(std::move(elems));
}

KrausChannel compression_channel(Eigen::Index n, Eigen::Index d) {
  if (n < 1 || n >= d) {
    throw Error(ErrorKind::kBadDims, "compression needs 1 <= n < d, got n=" + std::to_string(n) +
                                         ", d=" + std::to_string(d));
  }
  const Eigen::Index out = n + 1;
  ComplexMatrix keep = ComplexMatrix::Zero(out, d);
  for (Eigen::Index i = 0; i < n; ++i) keep(i, i) = 1.0;
  std::vector<ComplexMatrix> kraus;
  if (n == d - 1) {
    keep(n, n) = 1.0;
    kraus.push_back(std::move(keep));
  } else {
    kraus.push_back(std::move(keep));
    for (Eigen::Index j = n; j < d; ++j) {
      ComplexMatrix dump = ComplexMatrix::Zero(out, d);
      dump(n, j) = 1.0;
      kraus.push_back(std::move(dump));
    }
  }
  return KrausChannel::from_kraus(std::move(kraus));
}

// ---------------------------------------------------------------------------
// Random instances

ComplexMatrix random_ginibre(Eigen::Index rows, Eigen::Index cols, RngHandle& rng) {
  ComplexMatrix g(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) g(i, j) = Complex(rng.normal(), rng.normal());
  }
  return g;
}

ComplexMatrix random_unitary(Eigen::Index dim, RngHandle& rng) {
  // QR of a Ginibre matrix with the phases of R's diagonal divided out (Haar).
  const ComplexMatrix g = random_ginibre(dim, dim, rng);
  Eigen::HouseholderQR<ComplexMatrix> qr(g);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index i = 0; i < dim; ++i) {
    const Complex d = r(i, i);
    const double mag = std::abs(d);
    if (mag > 0.0) q.col(i) *= d / mag;
  }
  return q;
}

DensityMatrix random_density_matrix(Eigen::Index dim, RngHandle& rng, Eigen::Index rank) {
  if (rank < 0) rank = dim;
  const ComplexMatrix g = random_ginibre(dim, rank, rng);
  ComplexMatrix m = g * g.adjoint();
  m /= m.trace().real();
  m = 0.5 * (m + m.adjoint());
  return DensityMatrix(std::move(m));
}

Povm random_povm(Eigen::Index dim, std::size_t outcomes, RngHandle& rng) {
  std::vector<ComplexMatrix> effects;
  ComplexMatrix s = ComplexMatrix::Zero(dim, dim);
  for (std::size_t i = 0; i < outcomes; ++i) {
    const ComplexMatrix a = random_ginibre(dim, dim, rng);
    effects.push_back(a.adjoint() * a);
    s += effects.back();
  }
  const ComplexMatrix s_inv_half = inverse_sqrt_pd(s);
  for (auto& e : effects) e = s_inv_half * e * s_inv_half;
  return Povm::from_elements(std::move(effects));
}

KrausChannel random_channel(Eigen::Index in_dim, Eigen::Index out_dim, std::size_t n_kraus,
                            RngHandle& rng) {
  if (static_cast<Eigen::Index>(n_kraus) * out_dim < in_dim) {
    throw Error(ErrorKind::kBadDims, "random_channel needs n_kraus * out_dim >= in_dim");
  }
  std::vector<ComplexMatrix> kraus;
  ComplexMatrix s = ComplexMatrix::Zero(in_dim, in_dim);
  for (std::size_t i = 0; i < n_kraus; ++i) {
    kraus.push_back(random_ginibre(out_dim, in_dim, rng));
    s += kraus.back().adjoint() * kraus.back();
  }
  const ComplexMatrix s_inv_half = inverse_sqrt_pd(s);
  for (auto& k : kraus) k = k * s_inv_half;
  return KrausChannel::from_kraus(std::move(kraus));
}

}  // namespace qusum
