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

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qusum/detection.hpp"
#include "qusum/povm_search.hpp"

namespace qusum {

inline constexpr std::int64_t kDefaultHorizon = 10'000'000;

struct StoppingEstimate {
  double mean = 0.0;      // censored trials enter at the horizon (mean is then a lower bound)
  double std_error = 0.0;
  std::int64_t n_trials = 0;
  std::int64_t censored = 0;

  bool all_censored() const { return n_trials > 0 && censored == n_trials; }
  /// Censoring above 0.1% makes the mean a biased lower bound.
  bool censoring_flag() const { return censored * 1000 > n_trials; }
};

struct MonteCarloConfig {
  std::int64_t n_trials = 10'000;
  std::int64_t horizon = kDefaultHorizon;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

/// Mean time to false alarm: nu = infinity. Trial t uses stream (seed, t, 0).
StoppingEstimate estimate_tfa(const TrialSimulator& sim, double h, const MonteCarloConfig& cfg);

/// Delay under nu = 0 (the statistic sits at its reset value at the change,
/// which realizes the worst case for CUSUM).
StoppingEstimate estimate_delay(const TrialSimulator& sim, double h, const MonteCarloConfig& cfg);

struct TradeoffRow {
  double h = 0.0;
  StoppingEstimate tfa;
  StoppingEstimate delay;
};

struct TradeoffCurve {
  std::vector<TradeoffRow> rows;  // sorted by h
};

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double theory_slope = 0.0;   // l / D(q_l||p_l) for the POVM in use
  double quantum_slope = 0.0;  // 1 / D(sigma||rho)
  std::size_t rows_used = 0;
};

struct TradeoffConfig {
  std::vector<double> thresholds;   // empty: auto grid
  int grid_points = 8;
  double tfa_min = 1e2;             // auto grid targets T_FA in [tfa_min, tfa_max]
  double tfa_max = 1e5;
  std::int64_t pilot_trials = 400;  // per pilot point of the auto grid
  std::int64_t n_trials_delay = 10'000;
  std::int64_t n_trials_fa = 2'000;
  std::int64_t horizon = kDefaultHorizon;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
};

/// Explicit thresholds (sorted), or h_k = ln T_k for targets T_k log-spaced in
/// [tfa_min, tfa_max].
std::vector<double> threshold_grid(const TradeoffConfig& cfg);

/// threshold_grid, with auto grids corrected by two pilot T_FA estimates at
/// ln(tfa_min) and the log-midpoint, so that T_FA lands near the targets.
std::vector<double> calibrated_threshold_grid(const TrialSimulator& sim, const TradeoffConfig& cfg);

/// Threshold sweep. Row k uses experiment seeds derived from (cfg.seed, k), so
/// two curves run with the same config are paired trial by trial.
TradeoffCurve run_tradeoff_curve(const TrialSimulator& sim, const TradeoffConfig& cfg);

/// Least squares of delay_mean on ln(tfa_mean) over rows without censoring.
/// Throws kInsufficientSpread when those rows span less than two decades of
/// T_FA (or fewer than two remain).
SlopeFit fit_slope(const TradeoffCurve& curve, double theory_slope, double quantum_slope);

struct TradeoffResult {
  TradeoffCurve curve;
  SlopeFit fit;
  double kl_qp_per_copy = 0.0;
  double quantum_d = 0.0;
};

/// Full experiment: sweep plus fit. Throws kZeroDivergence when D(q||p) = 0.
TradeoffResult tradeoff_experiment(const DensityMatrix& sigma, const DensityMatrix& rho,
                                   const Povm& povm, int block_l, const TradeoffConfig& cfg);

/// Delay interpolated at a given ln(T_FA) from the curve (linear in ln T_FA
/// between neighbouring uncensored rows); stderr interpolated the same way.
struct DelayAt {
  double delay = 0.0;
  double std_error = 0.0;
};
DelayAt delay_at_log_tfa(const TradeoffCurve& curve, double log_tfa);

std::string curve_to_csv(const TradeoffCurve& curve, const std::optional<SlopeFit>& fit);
std::string curve_to_svg(const TradeoffCurve& curve, const std::optional<SlopeFit>& fit);

// ---------------------------------------------------------------------------
// Verification suites

struct Lemma3Report {
  int instances = 0;
  double max_discrepancy = 0.0;  // over finite/finite instances
  int infinite_instances = 0;    // both sides +inf
  int mismatched_infinities = 0;
  bool passed = false;
};

/// D^{alpha(M)}(sigma||rho) vs D^M(ch(sigma)||ch(rho)) on random channels,
/// POVMs, and states in dims 2-5, plus exact support-violating instances.
/// `extra_povm`, when given, is additionally checked against random channels
/// into its dimension. Passes iff the max discrepancy < 1e-9 and all
/// infinities agree.
Lemma3Report verify_lemma3(int n_random, std::uint64_t seed,
                           const std::optional<Povm>& extra_povm = std::nullopt);

struct DpiReport {
  int instances = 0;
  double max_channel_excess = 0.0;   // max D(ch s||ch r) - D(s||r)
  double max_measured_excess = 0.0;  // max D^M - D
  bool passed = false;
};

/// Data-processing checks on random instances in dims 2-6.
DpiReport verify_dpi(int n_random, std::uint64_t seed);

struct CompressionReport {
  std::vector<double> values;  // D(ch_n sigma || ch_n rho), n = 1..d-1
  double full_value = 0.0;
  double max_decrease = 0.0;
  double terminal_error = 0.0;
  bool monotone = false;
  bool passed = false;
};

/// Compression-channel convergence table; requires full-rank rho and finite D.
CompressionReport verify_compression_convergence(const DensityMatrix& sigma,
                                                 const DensityMatrix& rho);

struct OptimalityChainReport {
  TradeoffResult direct;     // best POVM found on (sigma, rho)
  TradeoffResult reduced;    // best POVM on (ch sigma, ch rho) pulled back
  double d_direct = 0.0;     // D(sigma||rho)
  double d_reduced = 0.0;    // D(ch sigma || ch rho)
  double fit_tolerance = 0.1;
  bool reduced_not_better = false;
  bool bound_respected = false;
  bool passed = false;
};

/// Paired trade-off experiments comparing the best direct measurement with the
/// best measurement on channel outputs, pulled back through the channel dual.
OptimalityChainReport verify_optimality_chain(const DensityMatrix& sigma, const DensityMatrix& rho,
                                              const KrausChannel& channel,
                                              const SearchConfig& search,
                                              const TradeoffConfig& tradeoff);

}  // namespace qusum
