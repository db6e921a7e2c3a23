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
#include <functional>
#include <optional>
#include <vector>

#include "qusum/entropy.hpp"
#include "qusum/measurement.hpp"
#include "qusum/states.hpp"

namespace qusum {

/// Per-outcome log-likelihood ratios ln(q_i / p_i) in nats.
///
/// +inf where q_i > 0 = p_i, -inf where q_i = 0 < p_i; outcomes with
/// q_i = p_i = 0 are excluded (never observed) and carry llr 0.
struct LlrTable {
  std::vector<double> llr;
  std::vector<bool> included;
  OutcomeDistribution p;  // pre-change
  OutcomeDistribution q;  // post-change
  double kl_qp = 0.0;     // D(q||p), post-change drift
  double kl_pq = 0.0;     // D(p||q), pre-change drift is -kl_pq
};

LlrTable make_llr_table(const OutcomeDistribution& q, const OutcomeDistribution& p);

/// p from rho^{(x)l}, q from sigma^{(x)l}; povm acts on dim^l.
LlrTable build_llr_table(const DensityMatrix& sigma, const DensityMatrix& rho, const Povm& povm,
                         int block_l = 1);

/// CUSUM statistic S <- max(0, S + llr) with stopping once S >= h.
class CusumDetector {
 public:
  explicit CusumDetector(double threshold);

  /// Throws kAlreadyStopped after the alarm.
  void step(double llr);

  double statistic() const { return statistic_; }
  double threshold() const { return threshold_; }
  std::int64_t steps() const { return steps_; }
  bool stopped() const { return stopped_; }

 private:
  double statistic_ = 0.0;
  double threshold_;
  std::int64_t steps_ = 0;
  bool stopped_ = false;
};

/// Value-semantics form of CusumDetector::step.
CusumDetector cusum_step(CusumDetector det, double llr);

struct ChangePointModel {
  DensityMatrix rho;    // pre-change
  DensityMatrix sigma;  // post-change
  std::optional<std::int64_t> nu;  // last pre-change index; nullopt: no change
};

enum class AlarmKind { kFalseAlarm, kDetection, kCensored };

struct TrialResult {
  std::optional<std::int64_t> stop_time;  // single-state units; nullopt if censored
  std::optional<std::int64_t> nu;
  AlarmKind alarm_kind = AlarmKind::kCensored;
  std::int64_t blocks = 0;                // block steps taken
};

struct TraceStep {
  std::int64_t block = 0;
  std::int64_t time = 0;   // single-state index of the block's last state
  bool post_change = false;
  std::size_t outcome = 0;
  double llr = 0.0;
  double statistic = 0.0;
};

/// Precomputed QUSUM trial runner for one (model, POVM, block length).
/// Immutable after construction; safe to share across concurrent trials.
class TrialSimulator {
 public:
  TrialSimulator(const ChangePointModel& model, const Povm& povm, int block_l);
  /// Same as above from precomputed block-level statistics.
  TrialSimulator(LlrTable table, std::optional<std::int64_t> nu, int block_l);

  TrialResult run(double h, std::int64_t horizon, RngHandle& rng,
                  const std::function<void(const TraceStep&)>& trace = {}) const;

  /// Same simulator with a different change point (validated for alignment).
  TrialSimulator with_change_point(std::optional<std::int64_t> nu) const;

  const LlrTable& table() const { return table_; }
  int block_l() const { return block_l_; }
  std::optional<std::int64_t> nu() const { return nu_; }

 private:
  LlrTable table_;
  CdfSampler pre_;
  CdfSampler post_;
  std::optional<std::int64_t> nu_;
  int block_l_;
};

/// Single CUSUM trial on block outcomes; stop time reported in
/// single-state units (block index * l), censored at `horizon`.
TrialResult run_trial(const ChangePointModel& model, const Povm& povm, int block_l, double h,
                      std::int64_t horizon, RngHandle& rng);

}  // namespace qusum
