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

#include <doctest.h>

#include <cmath>

#include "helpers.hpp"
#include "qusum/measurement.hpp"
#include "qusum/operator_core.hpp"
#include "qusum/rng.hpp"

using namespace qusum;
using qusum::testing::diag;
using qusum::testing::max_abs;

namespace {

ComplexMatrix random_hermitian(Eigen::Index d, RngHandle& rng) {
  const ComplexMatrix g = random_ginibre(d, d, rng);
  return 0.5 * (g + g.adjoint());
}

double reconstruction_error(const ComplexMatrix& a, const SpectralDecomposition& s) {
  const ComplexMatrix back = s.eigenvectors * s.eigenvalues.asDiagonal() * s.eigenvectors.adjoint();
  return (back - a).norm();
}

}  // namespace

TEST_CASE("eig_hermitian on identity, diagonal and Pauli-X") {
  const auto id = eig_hermitian(ComplexMatrix::Identity(2, 2));
  CHECK(id.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(id.eigenvalues(1) == doctest::Approx(1.0));

  const auto d = eig_hermitian(diag({1.0, 3.0}));
  CHECK(d.eigenvalues(0) == 3.0);
  CHECK(d.eigenvalues(1) == 1.0);
  CHECK(std::abs(d.eigenvectors(1, 0)) == 1.0);
  CHECK(std::abs(d.eigenvectors(0, 1)) == 1.0);

  ComplexMatrix x(2, 2);
  x << 0, 1, 1, 0;
  const auto sx = eig_hermitian(x);
  CHECK(sx.eigenvalues(0) == doctest::Approx(1.0));
  CHECK(sx.eigenvalues(1) == doctest::Approx(-1.0));
  // (1, 1)/sqrt2 for +1 up to phase
  CHECK(std::abs(sx.eigenvectors(0, 0)) == doctest::Approx(1.0 / std::sqrt(2.0)));
  CHECK(std::abs(sx.eigenvectors(0, 0) - sx.eigenvectors(1, 0)) < 1e-12);
  CHECK(std::abs(sx.eigenvectors(0, 1) + sx.eigenvectors(1, 1)) < 1e-12);
  CHECK(reconstruction_error(x, sx) < 1e-12);
}

TEST_CASE("eig_hermitian rejects non-Hermitian and non-finite input") {
  ComplexMatrix a(2, 2);
  a << 1, 2, 0, 1;
  try {
    (void)eig_hermitian(a);
    FAIL("expected NotHermitian");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotHermitian);
  }
  ComplexMatrix nan = ComplexMatrix::Identity(2, 2);
  nan(0, 0) = std::nan("");
  CHECK_THROWS_AS(eig_hermitian(nan), Error);
  CHECK_THROWS_AS(eig_hermitian(ComplexMatrix::Zero(2, 3)), Error);
}

TEST_CASE("random Hermitian reconstruction and unitarity") {
  for (int t = 0; t < 40; ++t) {
    RngHandle rng(11, static_cast<std::uint64_t>(t));
    const Eigen::Index d = 1 + t % 16;
    const ComplexMatrix a = random_hermitian(d, rng);
    const auto s = eig_hermitian(a);
    CHECK(reconstruction_error(a, s) <= 1e-10 * a.norm());
    CHECK(max_abs(s.eigenvectors.adjoint() * s.eigenvectors - ComplexMatrix::Identity(d, d)) < 1e-10);
    for (Eigen::Index i = 1; i < d; ++i) CHECK(s.eigenvalues(i - 1) >= s.eigenvalues(i));
  }
}

TEST_CASE("eig_hermitian is deterministic") {
  RngHandle rng(5);
  const ComplexMatrix a = random_hermitian(7, rng);
  const auto s1 = eig_hermitian(a);
  const auto s2 = eig_hermitian(a);
  CHECK(s1.eigenvalues == s2.eigenvalues);
  CHECK(s1.eigenvectors == s2.eigenvectors);
}

TEST_CASE("log_on_support examples") {
  CHECK(max_abs(log_on_support(ComplexMatrix::Identity(2, 2)).log) < 1e-15);

  const double e = std::exp(1.0);
  const auto l = log_on_support(diag({e, e * e}));
  CHECK(max_abs(l.log - diag({1.0, 2.0})) < 1e-14);

  const auto k = log_on_support(diag({0.5, 0.5, 0.0}));
  CHECK(k.rank == 2);
  CHECK(max_abs(k.log - diag({std::log(0.5), std::log(0.5), 0.0})) < 1e-14);
}

TEST_CASE("exp(log A) round trip for full-rank PSD") {
  for (int t = 0; t < 20; ++t) {
    RngHandle rng(21, static_cast<std::uint64_t>(t));
    const auto rho = random_density_matrix(2 + t % 7, rng);
    const ComplexMatrix& a = rho.matrix();
    const ComplexMatrix back = exp_hermitian(log_on_support(a).log);
    CHECK((back - a).norm() <= 1e-9 * a.norm());
  }
}

TEST_CASE("clamp_nonnegative tolerates roundoff, rejects real negativity") {
  auto ok = eig_hermitian(diag({1.0, -1e-12}));
  clamp_nonnegative(ok);
  CHECK(ok.eigenvalues(1) == 0.0);
  auto bad = eig_hermitian(diag({1.0, -1e-3}));
  try {
    clamp_nonnegative(bad);
    FAIL("expected NotPositive");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kNotPositive);
  }
}

TEST_CASE("kron examples and overflow") {
  CHECK(max_abs(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)) -
                ComplexMatrix::Identity(4, 4)) == 0.0);
  CHECK(max_abs(kron(diag({1, 2}), diag({3, 4})) - diag({3, 4, 6, 8})) == 0.0);
  CHECK(max_abs(kron(diag({0.9, 0.1}), diag({0.9, 0.1})) - diag({0.81, 0.09, 0.09, 0.01})) <
        1e-15);
  try {
    (void)kron(ComplexMatrix::Identity(64, 64), ComplexMatrix::Identity(65, 65));
    FAIL("expected DimensionOverflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimensionOverflow);
  }
  CHECK_NOTHROW(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(4, 4), 8));
  CHECK_THROWS_AS(kron(ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(4, 4), 7), Error);
}

TEST_CASE("kron mixed product and trace multiplicativity") {
  RngHandle rng(31);
  for (int t = 0; t < 10; ++t) {
    const ComplexMatrix a = random_ginibre(3, 3, rng);
    const ComplexMatrix b = random_ginibre(2, 2, rng);
    const ComplexMatrix c = random_ginibre(3, 3, rng);
    const ComplexMatrix d = random_ginibre(2, 2, rng);
    CHECK(max_abs(kron(a, b) * kron(c, d) - kron(a * c, b * d)) < 1e-12);
    const Complex lhs = kron(a, b).trace();
    const Complex rhs = a.trace() * b.trace();
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("support_projector examples and properties") {
  RngHandle rng(41);
  const auto full = random_density_matrix(4, rng);
  CHECK(max_abs(support_projector(full.matrix()) - ComplexMatrix::Identity(4, 4)) < 1e-10);
  CHECK(max_abs(support_projector(diag({1, 0, 0})) - diag({1, 0, 0})) == 0.0);
  CHECK(max_abs(support_projector(diag({0.6, 0.4, 0})) - diag({1, 1, 0})) == 0.0);

  for (int t = 0; t < 10; ++t) {
    const auto rho = random_density_matrix(5, rng, 1 + t % 5);
    const ComplexMatrix p = support_projector(rho.matrix());
    CHECK(max_abs(p * p - p) < 1e-10);
    CHECK(max_abs(p - p.adjoint()) < 1e-10);
    CHECK(max_abs(p * rho.matrix() - rho.matrix() * p) < 1e-10);
    CHECK(std::abs(p.trace().real() - static_cast<double>(1 + t % 5)) < 1e-9);
  }
}

TEST_CASE("inverse_sqrt_pd and trace_norm") {
  const ComplexMatrix w = inverse_sqrt_pd(diag({4.0, 0.25}));
  CHECK(max_abs(w - diag({0.5, 2.0})) < 1e-14);
  try {
    (void)inverse_sqrt_pd(diag({1.0, 0.0}));
    FAIL("expected SingularNormalizer");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSingularNormalizer);
  }
  CHECK(trace_norm(diag({0.5, -0.25})) == doctest::Approx(0.75));
  CHECK(frobenius_norm(diag({3.0, 4.0})) == doctest::Approx(5.0));
}
