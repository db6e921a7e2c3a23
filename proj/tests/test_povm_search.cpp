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
#include <numbers>

#include "helpers.hpp"
#include "qusum/entropy.hpp"
#include "qusum/povm_search.hpp"

using namespace qusum;
using qusum::testing::bloch_qubit;
using qusum::testing::diag;
using qusum::testing::diag_state;
using qusum::testing::max_abs;

namespace {

SearchConfig quick(std::uint64_t seed = 1) {
  SearchConfig cfg;
  cfg.seed = seed;
  cfg.restarts = 4;
  return cfg;
}

// Best KL over rank-one projective qubit measurements on a 100 x 100 Bloch grid.
double brute_force_qubit(const DensityMatrix& sigma, const DensityMatrix& rho) {
  double best = 0.0;
  const int n = 100;
  for (int a = 0; a < n; ++a) {
    const double theta = std::numbers::pi * (a + 0.5) / n;
    for (int b = 0; b < n; ++b) {
      const double phi = 2.0 * std::numbers::pi * b / n;
      ComplexVector up(2);
      up << std::cos(theta / 2), std::polar(std::sin(theta / 2), phi);
      ComplexVector down(2);
      down << -std::polar(std::sin(theta / 2), -phi), std::cos(theta / 2);
      ComplexMatrix u(2, 2);
      u.col(0) = up;
      u.col(1) = down;
      best = std::max(best, measured_relative_entropy(sigma, rho, Povm::projective(u)));
    }
  }
  return best;
}

}  // namespace

TEST_CASE("realize_povm examples") {
  PovmParam same{2, {ComplexMatrix::Identity(2, 2), ComplexMatrix::Identity(2, 2)}};
  const auto halves = realize_povm(same);
  CHECK(max_abs(halves[0] - 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-15);
  CHECK(max_abs(halves[1] - 0.5 * ComplexMatrix::Identity(2, 2)) < 1e-15);

  PovmParam rank_one{3, {}};
  for (Eigen::Index k = 0; k < 3; ++k) {
    ComplexMatrix a = ComplexMatrix::Zero(3, 3);
    a(0, k) = 1.0;
    rank_one.factors.push_back(a);
  }
  const auto basis = realize_povm(rank_one);
  for (Eigen::Index k = 0; k < 3; ++k) {
    ComplexMatrix e = ComplexMatrix::Zero(3, 3);
    e(k, k) = 1.0;
    CHECK(max_abs(basis[static_cast<std::size_t>(k)] - e) < 1e-15);
  }

  RngHandle rng(3);
  PovmParam random{4, {}};
  for (int i = 0; i < 5; ++i) random.factors.push_back(random_ginibre(4, 4, rng));
  CHECK(realize_povm(random).completeness_error() < 1e-10);

  PovmParam singular{2, {diag({1, 0}), diag({2, 0})}};
  try {
    (void)realize_povm(singular);
    FAIL("expected SingularNormalizer");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kSingularNormalizer);
  }
}

TEST_CASE("parametrization round trip") {
  for (int t = 0; t < 20; ++t) {
    RngHandle rng(4, static_cast<std::uint64_t>(t));
    const auto m = random_povm(2 + t % 4, 2 + static_cast<std::size_t>(t % 5), rng);
    const auto back = realize_povm(param_from_povm(m));
    for (std::size_t i = 0; i < m.size(); ++i) CHECK(max_abs(back[i] - m[i]) < 1e-9);
  }
}

TEST_CASE("analytic gradient agrees with central differences") {
  for (int t = 0; t < 6; ++t) {
    RngHandle rng(5, static_cast<std::uint64_t>(t));
    const Eigen::Index d = 2 + t % 3;
    const auto sigma = random_density_matrix(d, rng);
    const auto rho = random_density_matrix(d, rng);
    PovmParam p{d, {}};
    for (int i = 0; i < 3; ++i) p.factors.push_back(random_ginibre(d, d, rng));
    std::vector<ComplexMatrix> grad;
    REQUIRE(parametrized_objective(sigma, rho, p, &grad).has_value());
    const double h = 1e-6;
    double worst = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < p.factors.size(); ++i) {
      for (Eigen::Index k = 0; k < d * d; ++k) {
        for (const Complex dir : {Complex(1, 0), Complex(0, 1)}) {
          PovmParam plus = p;
          PovmParam minus = p;
          plus.factors[i].data()[k] += h * dir;
          minus.factors[i].data()[k] -= h * dir;
          const double fd = (*parametrized_objective(sigma, rho, plus) -
                             *parametrized_objective(sigma, rho, minus)) /
                            (2 * h);
          const Complex g = grad[i].data()[k];
          const double analytic = dir.real() != 0.0 ? g.real() : g.imag();
          worst = std::max(worst, std::abs(fd - analytic));
          scale = std::max(scale, std::abs(analytic));
        }
      }
    }
    CHECK(worst < 1e-6 * std::max(1.0, scale));
  }
}

TEST_CASE("commuting pair reaches the classical KL") {
  const auto sigma = diag_state({0.9, 0.1});
  const auto rho = diag_state({0.5, 0.5});
  const auto r = optimize_measurement(sigma, rho, quick());
  const double oracle = 0.9 * std::log(1.8) + 0.1 * std::log(0.2);
  CHECK(std::abs(r.best_value - oracle) < 1e-6);
  CHECK(r.gap() < 1e-6);
  CHECK(r.best_povm.size() == 4u);
  CHECK(std::abs(measured_relative_entropy(sigma, rho, r.best_povm) - r.best_value) < 1e-9);
}

TEST_CASE("equal states give zero") {
  RngHandle rng(6);
  const auto rho = random_density_matrix(3, rng);
  const auto r = optimize_measurement(rho, rho, quick());
  CHECK(std::abs(r.best_value) < 1e-9);
}

TEST_CASE("qubit optimum is at least the projective brute-force grid") {
  const auto rho = diag_state({0.5, 0.5});
  const auto sigma = bloch_qubit(0.6, std::numbers::pi / 2 - 0.3);
  const auto r = optimize_measurement(sigma, rho, quick());
  const double grid = brute_force_qubit(sigma, rho);
  const double d = quantum_relative_entropy(sigma, rho).value;
  MESSAGE("grid=" << grid << " search=" << r.best_value << " D=" << d);
  CHECK(r.best_value >= grid - 1e-9);
  CHECK(r.best_value <= d + 1e-8);
  CHECK(r.best_value <= grid + 1e-3);  // grid spacing bound
}

TEST_CASE("ceiling holds on random pairs") {
  for (int t = 0; t < 8; ++t) {
    RngHandle rng(7, static_cast<std::uint64_t>(t));
    const Eigen::Index d = 2 + t % 3;
    const auto sigma = random_density_matrix(d, rng);
    const auto rho = random_density_matrix(d, rng);
    const auto r = optimize_measurement(sigma, rho, quick(static_cast<std::uint64_t>(t)));
    CHECK(r.best_value <= r.ceiling + 1e-8);
    CHECK(r.best_value > 0.0);
    CHECK(std::abs(measured_relative_entropy(sigma, rho, r.best_povm) - r.best_value) < 1e-9);
    for (double v : r.per_restart_values) CHECK(v <= r.best_value + 1e-9);
  }
}

TEST_CASE("infinite ceiling: support-breaking POVM is found") {
  const auto sigma = diag_state({0.5, 0.5});
  const auto rho = diag_state({1.0, 0.0});
  const auto r = optimize_measurement(sigma, rho, quick());
  CHECK(std::isinf(r.ceiling));
  CHECK(std::isinf(r.best_value));
}

TEST_CASE("search is deterministic for a fixed seed") {
  RngHandle rng(8);
  const auto sigma = random_density_matrix(3, rng);
  const auto rho = random_density_matrix(3, rng);
  const auto a = optimize_measurement(sigma, rho, quick(42));
  const auto b = optimize_measurement(sigma, rho, quick(42));
  CHECK(a.best_value == b.best_value);
  CHECK(a.per_restart_values == b.per_restart_values);
  auto parallel_cfg = quick(42);
  parallel_cfg.jobs = 3;
  CHECK(optimize_measurement(sigma, rho, parallel_cfg).best_value == a.best_value);
}

TEST_CASE("block sweep: commuting pair is additively tight") {
  const auto sweep =
      block_measurement_sweep(diag_state({0.9, 0.1}), diag_state({0.5, 0.5}), 2, quick());
  REQUIRE(sweep.size() == 2u);
  const double d = 0.9 * std::log(1.8) + 0.1 * std::log(0.2);
  for (const auto& e : sweep) CHECK(std::abs(e.per_copy_value - d) < 1e-6);
}

TEST_CASE("block sweep: warm start never regresses") {
  const auto sigma = bloch_qubit(0.95, 0.0);
  const auto rho = bloch_qubit(0.9, 0.8);
  auto cfg = quick();
  cfg.max_iterations = 1000;
  const auto sweep = block_measurement_sweep(sigma, rho, 2, cfg);
  CHECK(sweep[1].per_copy_value >= sweep[0].per_copy_value - 1e-6);
  CHECK(sweep[1].per_copy_value <= quantum_relative_entropy(sigma, rho).value + 1e-8);
}

TEST_CASE("block sweep: equal states give zeros; dims are guarded") {
  const auto rho = diag_state({0.7, 0.3});
  for (const auto& e : block_measurement_sweep(rho, rho, 2, quick())) {
    CHECK(std::abs(e.per_copy_value) < 1e-9);
  }
  auto cfg = quick();
  cfg.max_dim = 4;
  try {
    (void)block_measurement_sweep(rho, rho, 3, cfg);
    FAIL("expected DimensionOverflow");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kDimensionOverflow);
  }
}
