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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <thread>
#include <vector>

#include "qusum/entropy.hpp"
#include "qusum/experiments.hpp"

using namespace qusum;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%s %d %s: %s (%.2fs)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
  if (!o.pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

DensityMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return DensityMatrix(m);
}

DensityMatrix bloch(double r, double theta) {
  ComplexMatrix m(2, 2);
  m << 0.5 * (1 + r * std::cos(theta)), 0.5 * r * std::sin(theta), 0.5 * r * std::sin(theta),
      0.5 * (1 - r * std::cos(theta));
  return DensityMatrix(m);
}

unsigned workers() { return std::max(1u, std::thread::hardware_concurrency()); }

// Every trade-off fit produced below, for the optimality-direction check.
struct Experiment {
  std::string label;
  SlopeFit fit;
};
std::vector<Experiment> experiments;

}  // namespace

int main() {
  criterion(1, "thermal entropy oracle", [] {
    const auto t0 = std::chrono::steady_clock::now();
    const auto [sigma, rho] = build_state_pair(parse_state_spec("thermal:nbar=1"),
                                               parse_state_spec("thermal:nbar=0.5"));
    const double d = quantum_relative_entropy(sigma, rho).value;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // Geometric photon-number distributions: n1 ln(n1/n2) + (1+n1) ln((1+n2)/(1+n1)).
    const double closed = 1.0 * std::log(1.0 / 0.5) + 2.0 * std::log(1.5 / 2.0);
    const double err = std::abs(d - closed);
    return Outcome{err < 1e-6 && secs < 1.0,
                   fmt("D=%.9f closed=%.9f err=%.1e", d, closed, err)};
  });

  criterion(2, "measurement pullback equality", [] {
    const auto r = verify_lemma3(100, 0x1e3a3);
    return Outcome{r.passed && r.instances >= 100,
                   fmt("instances=%d max_discrepancy=%.2e infinite=%d", r.instances,
                       r.max_discrepancy, r.infinite_instances)};
  });

  criterion(3, "data processing", [] {
    const auto r = verify_dpi(200, 0xd1d1);
    return Outcome{r.passed && r.instances >= 200,
                   fmt("instances=%d channel_excess=%.2e measured_excess=%.2e", r.instances,
                       r.max_channel_excess, r.max_measured_excess)};
  });

  criterion(4, "compression convergence", [] {
    int passed = 0;
    double worst_drop = 0.0;
    double worst_terminal = 0.0;
    for (int t = 0; t < 20; ++t) {
      RngHandle rng(0xc0c0, static_cast<std::uint64_t>(t));
      const auto sigma = random_density_matrix(5, rng);
      const auto rho = random_density_matrix(5, rng);
      const auto r = verify_compression_convergence(sigma, rho);
      passed += r.passed ? 1 : 0;
      worst_drop = std::max(worst_drop, r.max_decrease);
      worst_terminal = std::max(worst_terminal, r.terminal_error);
    }
    return Outcome{passed == 20, fmt("pairs=%d/20 max_decrease=%.2e terminal_error=%.2e", passed,
                                     worst_drop, worst_terminal)};
  });

  const auto sigma_c = diag2(0.9, 0.1);
  const auto rho_c = diag2(0.5, 0.5);
  TradeoffConfig c5;
  c5.seed = 20260417;
  c5.n_trials_delay = 10'000;
  c5.n_trials_fa = 2'000;
  c5.jobs = 1;
  std::string csv_jobs1;

  criterion(5, "commuting trade-off slope", [&] {
    const auto r = tradeoff_experiment(sigma_c, rho_c, Povm::computational_basis(2), 1, c5);
    experiments.push_back({"commuting basis", r.fit});
    csv_jobs1 = curve_to_csv(r.curve, r.fit);
    const double ratio = r.fit.slope / r.fit.theory_slope;
    const double lo = std::log10(r.curve.rows.front().tfa.mean);
    const double hi = std::log10(r.curve.rows.back().tfa.mean);
    return Outcome{std::abs(ratio - 1.0) <= 0.1,
                   fmt("slope=%.4f theory=%.4f ratio=%.4f T_FA=1e%.2f..1e%.2f r2=%.4f",
                       r.fit.slope, r.fit.theory_slope, ratio, lo, hi, r.fit.r_squared)};
  });

  criterion(8, "determinism across worker counts", [&] {
    auto cfg = c5;
    cfg.jobs = 2;
    const auto r = tradeoff_experiment(sigma_c, rho_c, Povm::computational_basis(2), 1, cfg);
    const bool same = !csv_jobs1.empty() && curve_to_csv(r.curve, r.fit) == csv_jobs1;
    return Outcome{same, fmt("jobs=1 vs jobs=2 CSV %s (%zu bytes)", same ? "identical" : "differ",
                             csv_jobs1.size())};
  });

  criterion(7, "block improvement", [] {
    const auto sigma = bloch(0.95, 0.0);
    const auto rho = bloch(0.9, 0.8);
    SearchConfig search;
    search.restarts = 4;
    search.max_iterations = 2000;
    search.seed = 7;
    search.jobs = workers();
    const auto sweep = block_measurement_sweep(sigma, rho, 2, search);
    TradeoffConfig cfg;
    cfg.seed = 7;
    cfg.jobs = workers();
    const auto one = tradeoff_experiment(sigma, rho, sweep[0].search.best_povm, 1, cfg);
    const auto two = tradeoff_experiment(sigma, rho, sweep[1].search.best_povm, 2, cfg);
    experiments.push_back({"block l=1", one.fit});
    experiments.push_back({"block l=2", two.fit});
    const double log_t = std::log(1e4);
    const auto d1 = delay_at_log_tfa(one.curve, log_t);
    const auto d2 = delay_at_log_tfa(two.curve, log_t);
    const bool value_ok = sweep[1].per_copy_value >= sweep[0].per_copy_value - 1e-6;
    const bool delay_ok = d2.delay <= d1.delay + 2.0 * d1.std_error;
    return Outcome{value_ok && delay_ok,
                   fmt("per-copy l1=%.6f l2=%.6f; delay at T_FA=1e4: l1=%.2f+-%.2f l2=%.2f+-%.2f",
                       sweep[0].per_copy_value, sweep[1].per_copy_value, d1.delay, d1.std_error,
                       d2.delay, d2.std_error)};
  });

  criterion(6, "no experiment beats the quantum bound", [&] {
    TradeoffConfig cfg;
    cfg.seed = 606;
    cfg.jobs = workers();
    const auto noisy = tradeoff_experiment(sigma_c, rho_c, Povm::noisy_basis(2, 0.3), 1, cfg);
    experiments.push_back({"noisy basis", noisy.fit});

    ComplexMatrix s3 = ComplexMatrix::Zero(3, 3);
    ComplexMatrix r3 = ComplexMatrix::Zero(3, 3);
    s3.diagonal() << 0.7, 0.2, 0.1;
    r3.diagonal() << 0.2, 0.3, 0.5;
    SearchConfig search;
    search.restarts = 4;
    search.seed = 6;
    search.jobs = workers();
    const auto chain = verify_optimality_chain(DensityMatrix(s3), DensityMatrix(r3),
                                               compression_channel(1, 3), search, cfg);
    experiments.push_back({"qutrit direct", chain.direct.fit});
    experiments.push_back({"qutrit channel-reduced", chain.reduced.fit});

    bool ok = chain.passed;
    std::string detail;
    for (const auto& e : experiments) {
      const double ratio = e.fit.slope / e.fit.quantum_slope;
      ok = ok && ratio >= 0.9;
      detail += fmt("%s%s=%.3f", detail.empty() ? "" : " ", e.label.c_str(), ratio);
    }
    return Outcome{ok, "slope*D: " + detail};
  });

  std::printf("%s: %d failing criteria\n", failures == 0 ? "ACCEPTED" : "REJECTED", failures);
  return failures == 0 ? 0 : 1;
}
