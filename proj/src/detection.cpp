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

#include "qusum/detection.hpp"

#include <cmath>
#include <string>

namespace qusum {

LlrTable make_llr_table(const OutcomeDistribution& q, const OutcomeDistribution& p) {
  if (q.size() != p.size()) {
    throw Error(ErrorKind::kLengthMismatch, "LLR table needs equal-length distributions");
  }
  LlrTable t;
  t.p = p;
  t.q = q;
  t.llr.assign(q.size(), 0.0);
  t.included.assign(q.size(), true);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const bool q_pos = q[i] > 0.0;
    const bool p_pos = p[i] >= kProbFloor;
    if (q_pos && p_pos) {
      t.llr[i] = std::log(q[i] / p[i]);
    } else if (q_pos) {
      t.llr[i] = kInfinity;
    } else if (p_pos) {
      t.llr[i] = -kInfinity;
    } else {
      t.included[i] = false;
    }
  }
  t.kl_qp = kl_divergence(q, p);
  t.kl_pq = kl_divergence(p, q);
  return t;
}

LlrTable build_llr_table(const DensityMatrix& sigma, const DensityMatrix& rho, const Povm& povm,
                         int block_l) {
  if (sigma.dim() != rho.dim()) throw Error(ErrorKind::kDimMismatch, "state dims differ");
  const DensityMatrix sigma_l = block_l == 1 ? sigma : tensor_power(sigma, block_l);
  const DensityMatrix rho_l = block_l == 1 ? rho : tensor_power(rho, block_l);
  if (povm.dim() != rho_l.dim()) {
    throw Error(ErrorKind::kDimMismatch, "POVM dim " + std::to_string(povm.dim()) +
                                             " does not match block dim " +
                                             std::to_string(rho_l.dim()));
  }
  return make_llr_table(induced_distribution(povm, sigma_l), induced_distribution(povm, rho_l));
}

CusumDetector::CusumDetector(double threshold) : threshold_(threshold) {
  if (!(threshold > 0.0)) throw Error(ErrorKind::kBadSpec, "CUSUM threshold must be > 0");
}

void CusumDetector::step(double llr) {
  if (stopped_) throw Error(ErrorKind::kAlreadyStopped, "CUSUM already raised its alarm");
  ++steps_;
  if (llr == kInfinity) {
    statistic_ = kInfinity;
  } else if (llr == -kInfinity) {
    statistic_ = 0.0;
  } else {
    statistic_ = std::max(0.0, statistic_ + llr);
  }
  stopped_ = statistic_ >= threshold_;
}

CusumDetector cusum_step(CusumDetector det, double llr) {
  det.step(llr);
  return det;
}

namespace {

void check_alignment(std::optional<std::int64_t> nu, int block_l) {
  if (block_l < 1) throw Error(ErrorKind::kBadSpec, "block length must be >= 1");
  if (nu && *nu < 0) throw Error(ErrorKind::kBadSpec, "change point must be >= 0");
  if (nu && *nu % block_l != 0) {
    throw Error(ErrorKind::kMisalignedChangePoint,
                "change point " + std::to_string(*nu) + " is not a multiple of l=" +
                    std::to_string(block_l));
  }
}

}  // namespace

TrialSimulator::TrialSimulator(LlrTable table, std::optional<std::int64_t> nu, int block_l)
    : table_(std::move(table)), pre_(table_.p), post_(table_.q), nu_(nu), block_l_(block_l) {
  check_alignment(nu_, block_l_);
}

TrialSimulator::TrialSimulator(const ChangePointModel& model, const Povm& povm, int block_l)
    : TrialSimulator(build_llr_table(model.sigma, model.rho, povm, block_l), model.nu, block_l) {}

TrialSimulator TrialSimulator::with_change_point(std::optional<std::int64_t> nu) const {
  TrialSimulator copy = *this;
  check_alignment(nu, block_l_);
  copy.nu_ = nu;
  return copy;
}

TrialResult TrialSimulator::run(double h, std::int64_t horizon, RngHandle& rng,
                                const std::function<void(const TraceStep&)>& trace) const {
  if (horizon <= 0) throw Error(ErrorKind::kHorizonNonpositive, "horizon must be positive");
  CusumDetector det(h);
  TrialResult result;
  result.nu = nu_;
  const std::int64_t l = block_l_;
  for (std::int64_t block = 1; block * l <= horizon; ++block) {
    const std::int64_t time = block * l;
    // Alignment makes every block entirely pre- or post-change.
    const bool post = nu_.has_value() && time > *nu_;
    const std::size_t outcome = post ? post_(rng) : pre_(rng);
    const double llr = table_.llr[outcome];
    det.step(llr);
    if (trace) trace(TraceStep{block, time, post, outcome, llr, det.statistic()});
    if (det.stopped()) {
      result.stop_time = time;
      result.blocks = block;
      result.alarm_kind =
          (nu_.has_value() && time > *nu_) ? AlarmKind::kDetection : AlarmKind::kFalseAlarm;
      return result;
    }
    result.blocks = block;
  }
  result.alarm_kind = AlarmKind::kCensored;
  return result;
}

TrialResult run_trial(const ChangePointModel& model, const Povm& povm, int block_l, double h,
                      std::int64_t horizon, RngHandle& rng) {
  return TrialSimulator(model, povm, block_l).run(h, horizon, rng);
}

}  // namespace qusum
