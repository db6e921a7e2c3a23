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
#include <filesystem>

#include "helpers.hpp"
#include "qusum/io.hpp"
#include "qusum/measurement.hpp"
#include "qusum/states.hpp"

using namespace qusum;
using qusum::testing::diag;
using qusum::testing::max_abs;

namespace {

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::kParse;
}

}  // namespace

TEST_CASE("parse_state_spec grammar") {
  const auto t = parse_state_spec("thermal:nbar=1.5");
  CHECK(t.kind == StateKind::kThermal);
  CHECK(t.nbar == 1.5);
  CHECK_FALSE(t.fock_cutoff.has_value());

  const auto c = parse_state_spec("coherent:re=1,im=-0.5@cutoff=20,tail=1e-8");
  CHECK(c.kind == StateKind::kCoherent);
  CHECK(c.alpha == Complex(1.0, -0.5));
  CHECK(*c.fock_cutoff == 20u);
  CHECK(c.tail_tol == 1e-8);

  CHECK(parse_state_spec("squeezed:r=0.3").squeeze_r == 0.3);
  CHECK(parse_state_spec("fock:n=3").fock_n == 3);
  CHECK(parse_state_spec("matrix:some/file.json").path == "some/file.json");
  CHECK_FALSE(parse_state_spec("thermal:nbar=1@cutoff=auto").fock_cutoff.has_value());

  const auto m = parse_state_spec("mix:0.25*thermal:nbar=1|0.75*fock:n=0@cutoff=12");
  REQUIRE(m.kind == StateKind::kMixture);
  REQUIRE(m.components.size() == 2);
  CHECK(m.components[0].first == 0.25);
  CHECK(*m.components[1].second.fock_cutoff == 12u);
  CHECK(*m.components[0].second.fock_cutoff == 12u);
}

TEST_CASE("parse_state_spec errors") {
  CHECK(kind_of([] { parse_state_spec("thermal"); }) == ErrorKind::kParse);
  CHECK(kind_of([] { parse_state_spec("thermal:nbar=abc"); }) == ErrorKind::kParse);
  CHECK(kind_of([] { parse_state_spec("laser:p=1"); }) == ErrorKind::kParse);
  CHECK(kind_of([] { parse_state_spec("thermal:nbar=1@foo=2"); }) == ErrorKind::kParse);
  CHECK(kind_of([] { parse_state_spec("thermal:nbar=-1"); }) == ErrorKind::kBadSpec);
  CHECK(kind_of([] { parse_state_spec("mix:0.5*thermal:nbar=1|0.2*fock:n=0"); }) ==
        ErrorKind::kBadSpec);
  CHECK(kind_of([] { parse_state_spec("thermal:nbar=1@cutoff=0"); }) == ErrorKind::kBadSpec);
}

TEST_CASE("build_state zero-temperature and vacuum limits") {
  const auto t0 = build_state(parse_state_spec("thermal:nbar=0"));
  CHECK(t0.dim() >= 1);
  CHECK(std::abs(t0.matrix()(0, 0) - 1.0) < 1e-15);
  CHECK(std::abs(t0.matrix().trace().real() - 1.0) < 1e-15);

  const auto v = build_state(parse_state_spec("coherent:re=0,im=0@cutoff=5"));
  CHECK(max_abs(v.matrix() - diag({1, 0, 0, 0, 0})) < 1e-15);
}

TEST_CASE("thermal nbar=1 auto cutoff is 34 with geometric populations") {
  const auto spec = parse_state_spec("thermal:nbar=1");
  CHECK(resolve_cutoff(spec) == 34u);
  CHECK(std::pow(0.5, 34) <= 1e-10);
  CHECK(std::pow(0.5, 33) > 1e-10);
  const auto rho = build_state(spec);
  REQUIRE(rho.dim() == 34);
  const double norm = 1.0 - std::pow(0.5, 34);
  for (Eigen::Index n = 0; n < 34; ++n) {
    const double expected = 0.5 * std::pow(0.5, static_cast<double>(n)) / norm;
    CHECK(std::abs(rho.matrix()(n, n).real() - expected) <= 1e-15 * std::max(1.0, expected * 1e3));
  }
  CHECK(rho.trace_deficit() == doctest::Approx(std::pow(0.5, 34)).epsilon(1e-9));
}

TEST_CASE("thermal population sums match the closed-form tail") {
  for (double nbar : {0.1, 0.5, 1.0, 3.0}) {
    for (std::size_t n_cut : {1u, 5u, 20u, 60u}) {
      const double sum = thermal_populations(nbar, n_cut).sum();
      const double expected = 1.0 - std::pow(nbar / (1.0 + nbar), static_cast<double>(n_cut));
      CHECK(std::abs(sum - expected) <= 1e-12);
    }
  }
}

TEST_CASE("thermal mean photon number is the truncated geometric mean") {
  for (double nbar : {0.2, 1.0, 2.5}) {
    const auto spec = parse_state_spec("thermal:nbar=" + std::to_string(nbar));
    const auto rho = build_state(spec);
    const double r = nbar / (1.0 + nbar);
    const double n_cut = static_cast<double>(rho.dim());
    const double rn = std::pow(r, n_cut);
    const double exact = nbar - n_cut * rn / (1.0 - rn);
    CHECK(std::abs(mean_photon_number(rho) - exact) <= 1e-12 * std::max(1.0, nbar));
    // The truncation bias is N r^N / (1 - r^N): at most N * tail_tol.
    CHECK(std::abs(mean_photon_number(rho) - nbar) <= n_cut * 1.0001e-10 + 1e-12);
  }
}

TEST_CASE("coherent and squeezed purity and normalization") {
  for (const char* text : {"coherent:re=1,im=0", "coherent:re=0.3,im=2", "squeezed:r=0.5",
                           "squeezed:r=1.0"}) {
    CAPTURE(text);
    const auto spec = parse_state_spec(text);
    const auto rho = build_state(spec);
    const auto report = validate(rho);
    CHECK(report.passed);
    CHECK(purity(rho) >= 1.0 - 2.0 * spec.tail_tol);
    CHECK(rho.trace_deficit() <= spec.tail_tol);
    CHECK(tail_mass(spec, static_cast<std::size_t>(rho.dim())) <= spec.tail_tol);
    CHECK(tail_mass(spec, static_cast<std::size_t>(rho.dim()) - 1) > spec.tail_tol);
  }
}

TEST_CASE("coherent amplitudes follow the Poisson law") {
  const Complex alpha(1.2, -0.4);
  const auto amp = coherent_amplitudes(alpha, 30);
  const double mean = std::norm(alpha);
  double fact = 1.0;
  for (Eigen::Index n = 0; n < 30; ++n) {
    if (n > 0) fact *= static_cast<double>(n);
    const double poisson = std::exp(-mean) * std::pow(mean, static_cast<double>(n)) / fact;
    CHECK(std::abs(std::norm(amp(n)) - poisson) < 1e-14);
  }
}

TEST_CASE("squeezed vacuum has only even photon numbers and mean sinh^2 r") {
  const double r = 0.7;
  const auto amp = squeezed_vacuum_amplitudes(r, 80);
  double mean = 0.0;
  for (Eigen::Index n = 0; n < 80; ++n) {
    if (n % 2 == 1) CHECK(amp(n) == 0.0);
    mean += static_cast<double>(n) * amp(n) * amp(n);
  }
  CHECK(mean == doctest::Approx(std::sinh(r) * std::sinh(r)).epsilon(1e-9));
  CHECK(amp(0) == doctest::Approx(1.0 / std::sqrt(std::cosh(r))));
}

TEST_CASE("fock and mixture states") {
  const auto f = build_state(parse_state_spec("fock:n=2"));
  CHECK(f.dim() == 3);
  CHECK(max_abs(f.matrix() - diag({0, 0, 1})) == 0.0);

  const auto m = build_state(parse_state_spec("mix:0.5*fock:n=0|0.5*fock:n=1"));
  CHECK(max_abs(m.matrix() - diag({0.5, 0.5})) < 1e-15);
  CHECK(validate(m).passed);
}

TEST_CASE("validate flags trace and negativity failures") {
  const auto good = build_state(parse_state_spec("thermal:nbar=0.7"));
  CHECK(validate(good).passed);

  const auto half = validate(DensityMatrix(diag({0.25, 0.25})));
  CHECK_FALSE(half.passed);
  CHECK(half.trace_error == doctest::Approx(0.5));

  const auto neg = validate(DensityMatrix(diag({1.001, -1e-3})));
  CHECK_FALSE(neg.passed);
  CHECK(neg.min_eigenvalue == doctest::Approx(-1e-3));

  CHECK_THROWS_AS(make_density_matrix(diag({0.25, 0.25})), Error);
}

TEST_CASE("tensor_power examples") {
  const DensityMatrix q(diag({0.9, 0.1}));
  CHECK(max_abs(tensor_power(q, 1).matrix() - q.matrix()) == 0.0);
  CHECK(max_abs(tensor_power(q, 2).matrix() - diag({0.81, 0.09, 0.09, 0.01})) < 1e-15);
  const auto pure = tensor_power(DensityMatrix(diag({1, 0})), 3);
  CHECK(pure.dim() == 8);
  CHECK(pure.matrix()(0, 0) == 1.0);
  CHECK(std::abs(pure.matrix().trace().real() - 1.0) == 0.0);
  CHECK_THROWS_AS(tensor_power(q, 13), Error);
}

TEST_CASE("tensor_power purity is multiplicative") {
  RngHandle rng(3);
  for (int t = 0; t < 10; ++t) {
    const auto rho = random_density_matrix(2 + t % 3, rng);
    const double p = purity(rho);
    for (int l = 1; l <= 3; ++l) {
      const auto rl = tensor_power(rho, l);
      CHECK(std::abs(rl.matrix().trace().real() - 1.0) < 1e-9);
      CHECK(std::abs(purity(rl) - std::pow(p, l)) <= 1e-9 * std::pow(p, l));
    }
  }
}

TEST_CASE("pairs share a cutoff and matrix files pin it") {
  const auto [a, b] = build_state_pair(parse_state_spec("thermal:nbar=1"),
                                       parse_state_spec("thermal:nbar=0.5"));
  CHECK(a.dim() == 34);
  CHECK(b.dim() == 34);

  const auto path = (std::filesystem::temp_directory_path() / "qusum_states_pin.json").string();
  save_matrix_json(path, diag({0.5, 0.3, 0.2}));
  const auto [m, t] =
      build_state_pair(parse_state_spec("matrix:" + path), parse_state_spec("thermal:nbar=0.1"));
  CHECK(m.dim() == 3);
  CHECK(t.dim() == 3);
  CHECK(t.trace_deficit() > 0.0);
  CHECK(kind_of([&] {
          build_state_pair(parse_state_spec("matrix:" + path),
                           parse_state_spec("thermal:nbar=0.1@cutoff=5"));
        }) == ErrorKind::kDimMismatch);
  std::filesystem::remove(path);
}

TEST_CASE("cutoff too small at max_dim") {
  CHECK(kind_of([] { build_state(parse_state_spec("thermal:nbar=50"), 64); }) ==
        ErrorKind::kCutoffTooSmall);
}

TEST_CASE("trace distance") {
  CHECK(trace_distance(DensityMatrix(diag({1, 0})), DensityMatrix(diag({0, 1}))) ==
        doctest::Approx(1.0));
  CHECK(trace_distance(DensityMatrix(diag({0.9, 0.1})), DensityMatrix(diag({0.5, 0.5}))) ==
        doctest::Approx(0.4));
}
