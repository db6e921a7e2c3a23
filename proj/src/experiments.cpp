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

#include "qusum/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <string>

#include "qusum/parallel.hpp"

namespace qusum {

namespace {

// Trials are grouped into a fixed number of chunks independent of the worker
// count; integer sums make the reduction exact and order-free.
constexpr std::int64_t kChunks = 64;

struct ChunkSums {
  std::int64_t count = 0;
  std::int64_t censored = 0;
  std::uint64_t sum = 0;
  unsigned __int128 sum_sq = 0;
};

StoppingEstimate monte_carlo(const TrialSimulator& sim, double h, const MonteCarloConfig& cfg) {
  if (cfg.n_trials < 100) throw Error(ErrorKind::kBadSpec, "n_trials must be >= 100");
  if (cfg.horizon <= 0) throw Error(ErrorKind::kHorizonNonpositive, "horizon must be positive");
  const std::int64_t chunks = std::min(kChunks, cfg.n_trials);
  std::vector<ChunkSums> sums(static_cast<std::size_t>(chunks));
  const std::int64_t offset = sim.nu().value_or(0);

  parallel_for(static_cast<std::size_t>(chunks), cfg.jobs, [&](std::size_t c) {
    const auto ci = static_cast<std::int64_t>(c);
    const std::int64_t begin = cfg.n_trials * ci / chunks;
    const std::int64_t end = cfg.n_trials * (ci + 1) / chunks;
    ChunkSums& acc = sums[c];
    for (std::int64_t t = begin; t < end; ++t) {
      RngHandle rng(cfg.seed, static_cast<std::uint64_t>(t), 0);
      const TrialResult r = sim.run(h, cfg.horizon, rng);
      std::int64_t value = cfg.horizon - offset;
      if (r.stop_time) {
        value = *r.stop_time - offset;
      } else {
        ++acc.censored;
      }
      ++acc.count;
      acc.sum += static_cast<std::uint64_t>(value);
      acc.sum_sq += static_cast<unsigned __int128>(value) * static_cast<unsigned __int128>(value);
    }
  });

  ChunkSums total;
  for (const auto& s : sums) {
    total.count += s.count;
    total.censored += s.censored;
    total.sum += s.sum;
    total.sum_sq += s.sum_sq;
  }
  StoppingEstimate est;
  est.n_trials = total.count;
  est.censored = total.censored;
  const auto n = static_cast<long double>(total.count);
  est.mean = static_cast<double>(static_cast<long double>(total.sum) / n);
  if (total.count > 1) {
    const unsigned __int128 sum = total.sum;
    const unsigned __int128 numer =
        static_cast<unsigned __int128>(total.count) * total.sum_sq - sum * sum;
    const long double var =
        static_cast<long double>(numer) / (n * static_cast<long double>(total.count - 1));
    est.std_error = static_cast<double>(std::sqrt(var / n));
  }
  return est;
}

}  // namespace

StoppingEstimate estimate_tfa(const TrialSimulator& sim, double h, const MonteCarloConfig& cfg) {
  return monte_carlo(sim.with_change_point(std::nullopt), h, cfg);
}

StoppingEstimate estimate_delay(const TrialSimulator& sim, double h, const MonteCarloConfig& cfg) {
  return monte_carlo(sim.with_change_point(0), h, cfg);
}

std::vector<double> threshold_grid(const TradeoffConfig& cfg) {
  if (!cfg.thresholds.empty()) {
    std::vector<double> hs = cfg.thresholds;
    for (double h : hs) {
      if (!(h > 0.0)) throw Error(ErrorKind::kBadSpec, "thresholds must be positive");
    }
    std::sort(hs.begin(), hs.end());
    return hs;
  }
  if (cfg.grid_points < 2) throw Error(ErrorKind::kBadSpec, "auto grid needs >= 2 points");
  if (!(cfg.tfa_min > 1.0 && cfg.tfa_max > cfg.tfa_min)) {
    throw Error(ErrorKind::kBadSpec, "auto grid needs 1 < tfa_min < tfa_max");
  }
  const double lo = std::log(cfg.tfa_min);
  const double hi = std::log(cfg.tfa_max);
  std::vector<double> hs;
  for (int k = 0; k < cfg.grid_points; ++k) {
    hs.push_back(lo + (hi - lo) * k / (cfg.grid_points - 1));
  }
  return hs;
}

std::vector<double> calibrated_threshold_grid(const TrialSimulator& sim, const TradeoffConfig& cfg) {
  auto hs = threshold_grid(cfg);
  if (!cfg.thresholds.empty()) return hs;
  // Two pilot estimates fix ln T_FA ~ a*h + c; the grid then inverts the targets.
  const double h0 = std::log(cfg.tfa_min);
  const double h1 = 0.5 * (std::log(cfg.tfa_min) + std::log(cfg.tfa_max));
  MonteCarloConfig pilot{cfg.pilot_trials, cfg.horizon, mix64(cfg.seed ^ 0x9e3779b97f4a7c15ULL),
                         cfg.jobs};
  const StoppingEstimate e0 = estimate_tfa(sim, h0, pilot);
  pilot.seed = mix64(pilot.seed);
  const StoppingEstimate e1 = estimate_tfa(sim, h1, pilot);
  if (e0.censored != 0 || e1.censored != 0 || !(e0.mean > 0.0) || !(e1.mean > 0.0)) return hs;
  double a = (std::log(e1.mean) - std::log(e0.mean)) / (h1 - h0);
  a = std::clamp(a, 0.5, 2.0);
  const double c = std::log(e0.mean) - a * h0;
  for (double& h : hs) h = std::max((h - c) / a, 1e-3);
  return hs;
}

TradeoffCurve run_tradeoff_curve(const TrialSimulator& sim, const TradeoffConfig& cfg) {
  TradeoffCurve curve;
  const auto hs = calibrated_threshold_grid(sim, cfg);
  for (std::size_t k = 0; k < hs.size(); ++k) {
    TradeoffRow row;
    row.h = hs[k];
    MonteCarloConfig fa{cfg.n_trials_fa, cfg.horizon, mix64(cfg.seed ^ (2 * k + 1)), cfg.jobs};
    MonteCarloConfig delay{cfg.n_trials_delay, cfg.horizon, mix64(cfg.seed ^ (2 * k + 2)),
                           cfg.jobs};
    row.tfa = estimate_tfa(sim, row.h, fa);
    row.delay = estimate_delay(sim, row.h, delay);
    curve.rows.push_back(row);
  }
  return curve;
}

SlopeFit fit_slope(const TradeoffCurve& curve, double theory_slope, double quantum_slope) {
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& row : curve.rows) {
    if (row.tfa.censored != 0 || row.delay.censored != 0) continue;
    xs.push_back(std::log(row.tfa.mean));
    ys.push_back(row.delay.mean);
  }
  if (xs.size() < 2) {
    throw Error(ErrorKind::kInsufficientSpread, "fewer than two uncensored rows");
  }
  const auto [lo, hi] = std::minmax_element(xs.begin(), xs.end());
  if (*hi - *lo < 2.0 * std::numbers::ln10) {
    throw Error(ErrorKind::kInsufficientSpread,
                "uncensored T_FA spans only " + std::to_string((*hi - *lo) / std::numbers::ln10) +
                    " decades");
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  fit.theory_slope = theory_slope;
  fit.quantum_slope = quantum_slope;
  fit.rows_used = xs.size();
  return fit;
}

TradeoffResult tradeoff_experiment(const DensityMatrix& sigma, const DensityMatrix& rho,
                                   const Povm& povm, int block_l, const TradeoffConfig& cfg) {
  const TrialSimulator sim(ChangePointModel{rho, sigma, std::nullopt}, povm, block_l);
  TradeoffResult out;
  out.kl_qp_per_copy = sim.table().kl_qp / static_cast<double>(block_l);
  if (!(out.kl_qp_per_copy > 0.0)) {
    throw Error(ErrorKind::kZeroDivergence, "D(q||p)=0: the measurement cannot see the change");
  }
  out.quantum_d = quantum_relative_entropy(sigma, rho).value;
  out.curve = run_tradeoff_curve(sim, cfg);
  const double theory = std::isfinite(out.kl_qp_per_copy) ? 1.0 / out.kl_qp_per_copy : 0.0;
  const double quantum = std::isfinite(out.quantum_d) ? 1.0 / out.quantum_d : 0.0;
  out.fit = fit_slope(out.curve, theory, quantum);
  return out;
}

DelayAt delay_at_log_tfa(const TradeoffCurve& curve, double log_tfa) {
  std::vector<const TradeoffRow*> rows;
  for (const auto& r : curve.rows) {
    if (r.tfa.censored == 0 && r.delay.censored == 0) rows.push_back(&r);
  }
  if (rows.size() < 2) throw Error(ErrorKind::kInsufficientSpread, "need two uncensored rows");
  std::sort(rows.begin(), rows.end(), [](const TradeoffRow* a, const TradeoffRow* b) {
    return a->tfa.mean < b->tfa.mean;
  });
  // Pick the bracketing pair, or the nearest end pair for extrapolation.
  std::size_t k = 0;
  while (k + 2 < rows.size() && std::log(rows[k + 1]->tfa.mean) < log_tfa) ++k;
  const double x0 = std::log(rows[k]->tfa.mean);
  const double x1 = std::log(rows[k + 1]->tfa.mean);
  const double w = (log_tfa - x0) / (x1 - x0);
  DelayAt out;
  out.delay = (1.0 - w) * rows[k]->delay.mean + w * rows[k + 1]->delay.mean;
  out.std_error = std::hypot((1.0 - w) * rows[k]->delay.std_error, w * rows[k + 1]->delay.std_error);
  return out;
}

namespace {

std::string fmt_g(double v, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

}  // namespace

std::string curve_to_csv(const TradeoffCurve& curve, const std::optional<SlopeFit>& fit) {
  std::ostringstream out;
  out << "h,tfa_mean,tfa_stderr,delay_mean,delay_stderr,n_trials,censored\n";
  for (const auto& row : curve.rows) {
    out << fmt_g(row.h) << ',' << fmt_g(row.tfa.mean) << ',' << fmt_g(row.tfa.std_error) << ','
        << fmt_g(row.delay.mean) << ',' << fmt_g(row.delay.std_error) << ','
        << row.tfa.n_trials + row.delay.n_trials << ',' << row.tfa.censored + row.delay.censored
        << '\n';
  }
  if (!curve.rows.empty()) {
    out << "# fa_trials=" << curve.rows.front().tfa.n_trials
        << " delay_trials=" << curve.rows.front().delay.n_trials << '\n';
  }
  for (const auto& row : curve.rows) {
    if (row.tfa.censoring_flag()) {
      out << "# warning: h=" << fmt_g(row.h) << " T_FA censored in " << row.tfa.censored << " of "
          << row.tfa.n_trials << " trials; tfa_mean is a lower bound\n";
    }
  }
  if (fit) {
    out << "# slope=" << fmt_g(fit->slope) << '\n';
    out << "# intercept=" << fmt_g(fit->intercept) << '\n';
    out << "# r_squared=" << fmt_g(fit->r_squared) << '\n';
    out << "# theory_slope=" << fmt_g(fit->theory_slope) << '\n';
    out << "# quantum_slope=" << fmt_g(fit->quantum_slope) << '\n';
    out << "# rows_used=" << fit->rows_used << '\n';
  }
  return out.str();
}

std::string curve_to_svg(const TradeoffCurve& curve, const std::optional<SlopeFit>& fit) {
  constexpr double kW = 640.0;
  constexpr double kH = 420.0;
  constexpr double kMargin = 60.0;
  std::vector<std::pair<double, double>> pts;
  for (const auto& row : curve.rows) {
    if (row.tfa.mean > 0.0) pts.emplace_back(std::log(row.tfa.mean), row.delay.mean);
  }
  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << ' ' << kH << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (pts.empty()) {
    svg << "</svg>\n";
    return svg.str();
  }
  double x0 = pts.front().first;
  double x1 = x0;
  double y0 = 0.0;
  double y1 = pts.front().second;
  for (const auto& [x, y] : pts) {
    x0 = std::min(x0, x);
    x1 = std::max(x1, x);
    y1 = std::max(y1, y);
  }
  if (x1 - x0 < 1e-9) x1 = x0 + 1.0;
  y1 *= 1.1;
  if (y1 <= 0.0) y1 = 1.0;
  auto sx = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * (kW - 2 * kMargin); };
  auto sy = [&](double y) { return kH - kMargin - (y - y0) / (y1 - y0) * (kH - 2 * kMargin); };

  svg << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin
      << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << kMargin << "\" y1=\"" << kMargin << "\" x2=\"" << kMargin
      << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n";
  svg << "<text x=\"" << kW / 2 << "\" y=\"" << kH - 15
      << "\" text-anchor=\"middle\" font-size=\"14\">ln T_FA</text>\n";
  svg << "<text x=\"18\" y=\"" << kH / 2 << "\" transform=\"rotate(-90 18 " << kH / 2
      << ")\" text-anchor=\"middle\" font-size=\"14\">mean delay</text>\n";

  auto line = [&](double slope, double intercept, const char* color, const char* label, int row) {
    svg << "<line x1=\"" << fmt_g(sx(x0), 6) << "\" y1=\"" << fmt_g(sy(slope * x0 + intercept), 6)
        << "\" x2=\"" << fmt_g(sx(x1), 6) << "\" y2=\"" << fmt_g(sy(slope * x1 + intercept), 6)
        << "\" stroke=\"" << color << "\" stroke-dasharray=\"6,4\"/>\n";
    svg << "<text x=\"" << kMargin + 10 << "\" y=\"" << kMargin + 16 * row << "\" fill=\"" << color
        << "\" font-size=\"12\">" << label << "</text>\n";
  };
  if (fit) {
    double cx = 0.0;
    double cy = 0.0;
    for (const auto& [x, y] : pts) {
      cx += x;
      cy += y;
    }
    cx /= static_cast<double>(pts.size());
    cy /= static_cast<double>(pts.size());
    line(fit->slope, fit->intercept, "black", ("fit slope " + fmt_g(fit->slope, 4)).c_str(), 0);
    if (fit->theory_slope > 0.0) {
      line(fit->theory_slope, cy - fit->theory_slope * cx, "blue",
           ("1/D(q||p) = " + fmt_g(fit->theory_slope, 4)).c_str(), 1);
    }
    if (fit->quantum_slope > 0.0) {
      line(fit->quantum_slope, cy - fit->quantum_slope * cx, "red",
           ("1/D(sigma||rho) = " + fmt_g(fit->quantum_slope, 4)).c_str(), 2);
    }
  }
  svg << "<polyline fill=\"none\" stroke=\"#444\" points=\"";
  for (const auto& [x, y] : pts) svg << fmt_g(sx(x), 6) << ',' << fmt_g(sy(y), 6) << ' ';
  svg << "\"/>\n";
  for (const auto& [x, y] : pts) {
    svg << "<circle cx=\"" << fmt_g(sx(x), 6) << "\" cy=\"" << fmt_g(sy(y), 6)
        << "\" r=\"3\" fill=\"#444\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

// ---------------------------------------------------------------------------
// Verification suites

namespace {

Eigen::Index pick(RngHandle& rng, Eigen::Index lo, Eigen::Index hi) {
  return lo + static_cast<Eigen::Index>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}

void compare_sides(double lhs, double rhs, Lemma3Report& report) {
  ++report.instances;
  const bool inf_l = std::isinf(lhs);
  const bool inf_r = std::isinf(rhs);
  if (inf_l && inf_r) {
    ++report.infinite_instances;
  } else if (inf_l || inf_r) {
    ++report.mismatched_infinities;
  } else {
    report.max_discrepancy = std::max(report.max_discrepancy, std::abs(lhs - rhs));
  }
}

void lemma3_instance(const KrausChannel& ch, const Povm& m, const DensityMatrix& sigma,
                     const DensityMatrix& rho, Lemma3Report& report) {
  const double lhs = measured_relative_entropy(sigma, rho, pushforward_povm(ch, m));
  const double rhs = measured_relative_entropy(apply_channel(ch, sigma), apply_channel(ch, rho), m);
  compare_sides(lhs, rhs, report);
}

ComplexMatrix cyclic_shift(Eigen::Index d) {
  ComplexMatrix p = ComplexMatrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) p((i + 1) % d, i) = 1.0;
  return p;
}

std::size_t kraus_count(Eigen::Index in, Eigen::Index out, std::size_t wanted) {
  while (static_cast<Eigen::Index>(wanted) * out < in) ++wanted;
  return wanted;
}

}  // namespace

Lemma3Report verify_lemma3(int n_random, std::uint64_t seed, const std::optional<Povm>& extra_povm) {
  Lemma3Report report;
  for (int i = 0; i < n_random; ++i) {
    RngHandle rng(seed, static_cast<std::uint64_t>(i), 0);
    if (i % 10 == 9) {
      // Exact support violation: rho has no weight on the last level, sigma does.
      const Eigen::Index d = 2 + i % 4;
      ComplexMatrix s = ComplexMatrix::Zero(d, d);
      ComplexMatrix r = ComplexMatrix::Zero(d, d);
      for (Eigen::Index k = 0; k < d; ++k) s(k, k) = 1.0 / static_cast<double>(d);
      for (Eigen::Index k = 0; k + 1 < d; ++k) r(k, k) = 1.0 / static_cast<double>(d - 1);
      lemma3_instance(KrausChannel::unitary(cyclic_shift(d)), Povm::computational_basis(d),
                      DensityMatrix(s), DensityMatrix(r), report);
      continue;
    }
    const Eigen::Index in = pick(rng, 2, 5);
    const bool identity = i % 10 == 4;
    const Eigen::Index out = identity ? in : pick(rng, 2, 5);
    const auto outcomes = static_cast<std::size_t>(pick(rng, 2, 6));
    const KrausChannel ch =
        identity ? KrausChannel::identity(in)
                 : random_channel(in, out, kraus_count(in, out, static_cast<std::size_t>(pick(rng, 1, 3))), rng);
    const Povm m = random_povm(out, outcomes, rng);
    const auto sigma = random_density_matrix(in, rng);
    const auto rho = random_density_matrix(in, rng);
    lemma3_instance(ch, m, sigma, rho, report);
  }
  if (extra_povm) {
    for (int i = 0; i < 10; ++i) {
      RngHandle rng(seed ^ 0x5eedULL, static_cast<std::uint64_t>(i), 1);
      const Eigen::Index in = pick(rng, 2, 5);
      const Eigen::Index out = extra_povm->dim();
      const KrausChannel ch = random_channel(in, out, kraus_count(in, out, 2), rng);
      lemma3_instance(ch, *extra_povm, random_density_matrix(in, rng),
                      random_density_matrix(in, rng), report);
    }
  }
  report.passed = report.max_discrepancy < 1e-9 && report.mismatched_infinities == 0;
  return report;
}

DpiReport verify_dpi(int n_random, std::uint64_t seed) {
  DpiReport report;
  report.max_channel_excess = -kInfinity;
  report.max_measured_excess = -kInfinity;
  for (int i = 0; i < n_random; ++i) {
    RngHandle rng(seed, static_cast<std::uint64_t>(i), 0);
    const Eigen::Index in = pick(rng, 2, 6);
    const Eigen::Index out = pick(rng, 2, 6);
    const auto ch = random_channel(in, out, kraus_count(in, out, static_cast<std::size_t>(pick(rng, 1, 3))), rng);
    const auto sigma = random_density_matrix(in, rng);
    const auto rho = random_density_matrix(in, rng);
    const auto m = random_povm(in, static_cast<std::size_t>(pick(rng, 2, 8)), rng);
    const double d = quantum_relative_entropy(sigma, rho).value;
    const double d_ch =
        quantum_relative_entropy(apply_channel(ch, sigma), apply_channel(ch, rho)).value;
    const double d_m = measured_relative_entropy(sigma, rho, m);
    report.max_channel_excess = std::max(report.max_channel_excess, d_ch - d);
    report.max_measured_excess = std::max(report.max_measured_excess, d_m - d);
    ++report.instances;
  }
  report.passed = report.max_channel_excess <= 1e-9 && report.max_measured_excess <= 1e-9;
  return report;
}

CompressionReport verify_compression_convergence(const DensityMatrix& sigma,
                                                 const DensityMatrix& rho) {
  if (sigma.dim() != rho.dim()) throw Error(ErrorKind::kDimMismatch, "state dims differ");
  const Eigen::Index d = rho.dim();
  if (d < 2) throw Error(ErrorKind::kBadDims, "compression needs dim >= 2");
  const auto rho_eig = eig_hermitian(rho.matrix());
  if (!(rho_eig.eigenvalues(d - 1) > default_support_cutoff(rho_eig))) {
    throw Error(ErrorKind::kBadSpec, "compression check needs full-rank rho");
  }
  CompressionReport report;
  const auto full = quantum_relative_entropy(sigma, rho);
  if (!full.finite()) throw Error(ErrorKind::kInfiniteDivergence, "D(sigma||rho) is infinite");
  report.full_value = full.value;
  for (Eigen::Index n = 1; n < d; ++n) {
    const auto ch = compression_channel(n, d);
    report.values.push_back(
        quantum_relative_entropy(apply_channel(ch, sigma), apply_channel(ch, rho)).value);
  }
  for (std::size_t k = 1; k < report.values.size(); ++k) {
    report.max_decrease = std::max(report.max_decrease, report.values[k - 1] - report.values[k]);
  }
  report.monotone = report.max_decrease <= 1e-9;
  report.terminal_error = std::abs(report.values.back() - report.full_value);
  report.passed = report.monotone && report.terminal_error <= 1e-8;
  return report;
}

OptimalityChainReport verify_optimality_chain(const DensityMatrix& sigma, const DensityMatrix& rho,
                                              const KrausChannel& channel,
                                              const SearchConfig& search,
                                              const TradeoffConfig& tradeoff) {
  OptimalityChainReport report;
  const auto direct_d = quantum_relative_entropy(sigma, rho);
  if (!direct_d.finite()) throw Error(ErrorKind::kInfiniteDivergence, "D(sigma||rho) is infinite");
  const auto sigma_out = apply_channel(channel, sigma);
  const auto rho_out = apply_channel(channel, rho);
  const auto reduced_d = quantum_relative_entropy(sigma_out, rho_out);
  if (!reduced_d.finite()) {
    throw Error(ErrorKind::kInfiniteDivergence, "channel outputs have infinite D");
  }
  if (!(reduced_d.value > 1e-12)) {
    throw Error(ErrorKind::kZeroDivergence, "D=0 after the channel: outputs coincide");
  }
  report.d_direct = direct_d.value;
  report.d_reduced = reduced_d.value;

  const auto direct_best = optimize_measurement(sigma, rho, search);
  const auto reduced_best = optimize_measurement(sigma_out, rho_out, search);
  const Povm pulled = pushforward_povm(channel, reduced_best.best_povm);

  report.direct = tradeoff_experiment(sigma, rho, direct_best.best_povm, 1, tradeoff);
  report.reduced = tradeoff_experiment(sigma, rho, pulled, 1, tradeoff);

  const double tol = report.fit_tolerance;
  const double quantum_slope = 1.0 / report.d_direct;
  report.reduced_not_better = report.reduced.fit.slope >= report.direct.fit.slope * (1.0 - tol);
  report.bound_respected = report.direct.fit.slope >= quantum_slope * (1.0 - tol) &&
                           report.reduced.fit.slope >= quantum_slope * (1.0 - tol);
  report.passed = report.reduced_not_better && report.bound_respected;
  return report;
}

}  // namespace qusum
