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

#include "qusum/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>

#include "qusum/experiments.hpp"
#include "qusum/io.hpp"

namespace qusum {

namespace {

using nlohmann::json;

struct GlobalOptions {
  std::optional<std::uint64_t> seed;
  unsigned jobs = 0;
  std::string svg;
  std::string json_path;
  bool require_finite = false;
  bool strict = false;
  bool bits = false;
};

std::string num(double v, int digits = 10) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
  return buf;
}

std::string entropy_text(double nats, bool bits) {
  if (std::isinf(nats)) return "infinite (support violation)";
  return bits ? num(to_bits(nats)) + " bits" : num(nats) + " nats";
}

json entropy_json(double nats) {
  if (std::isinf(nats)) return nullptr;
  return nats;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::kIo, "cannot open " + path + " for writing");
  f << text;
  if (!f) throw Error(ErrorKind::kIo, "failed writing " + path);
}

// Emits the JSON mirror when --json was given; "-" means standard output.
void emit_json(const GlobalOptions& g, const json& report, std::ostream& out) {
  if (g.json_path.empty()) return;
  if (g.json_path == "-") {
    out << report.dump(2) << '\n';
  } else {
    write_text_file(g.json_path, report.dump(2) + "\n");
  }
}

// Relative matrix-file paths inside a config resolve against the config's directory.
void rebase_paths(StateSpec& spec, const std::filesystem::path& base) {
  if (spec.kind == StateKind::kMatrixFile) {
    std::filesystem::path p(spec.path);
    if (p.is_relative()) spec.path = (base / p).string();
  }
  for (auto& [w, c] : spec.components) rebase_paths(c, base);
}

std::pair<DensityMatrix, DensityMatrix> load_pair(const std::string& sigma_text,
                                                  const std::string& rho_text,
                                                  const std::filesystem::path& base = {}) {
  StateSpec sigma = parse_state_spec(sigma_text);
  StateSpec rho = parse_state_spec(rho_text);
  if (!base.empty()) {
    rebase_paths(sigma, base);
    rebase_paths(rho, base);
  }
  return build_state_pair(sigma, rho);
}

Povm eigenbasis_povm(const DensityMatrix& state) {
  return Povm::projective(eig_hermitian(state.matrix()).eigenvectors);
}

struct PovmChoice {
  Povm povm;
  std::optional<SearchResult> search;
};

PovmChoice select_povm(const std::string& preset, const DensityMatrix& sigma,
                       const DensityMatrix& rho, int block_l, const SearchConfig& search,
                       const std::filesystem::path& base = {}) {
  const DensityMatrix sigma_l = block_l == 1 ? sigma : tensor_power(sigma, block_l);
  const DensityMatrix rho_l = block_l == 1 ? rho : tensor_power(rho, block_l);
  const Eigen::Index d = rho_l.dim();
  if (preset == "auto") {
    SearchResult r = optimize_measurement(sigma_l, rho_l, search);
    Povm best = r.best_povm;
    return {best, std::move(r)};
  }
  if (preset == "basis") return {Povm::computational_basis(d), std::nullopt};
  if (preset == "sigma_eigenbasis") return {eigenbasis_povm(sigma_l), std::nullopt};
  if (preset == "rho_eigenbasis") return {eigenbasis_povm(rho_l), std::nullopt};
  if (preset.rfind("noisy_basis:", 0) == 0) {
    double eps = 0.0;
    try {
      std::size_t used = 0;
      const std::string arg = preset.substr(12);
      eps = std::stod(arg, &used);
      if (used != arg.size()) throw std::invalid_argument(arg);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "bad noisy_basis parameter in '" + preset + "'");
    }
    return {Povm::noisy_basis(d, eps), std::nullopt};
  }
  if (preset.rfind("file:", 0) == 0) {
    std::filesystem::path p(preset.substr(5));
    if (p.is_relative() && !base.empty()) p = base / p;
    Povm m = load_povm_json(p.string());
    if (m.dim() != d) {
      throw Error(ErrorKind::kDimMismatch, "POVM file has dim " + std::to_string(m.dim()) +
                                               ", expected " + std::to_string(d));
    }
    return {m, std::nullopt};
  }
  throw Error(ErrorKind::kParse, "unknown POVM preset '" + preset + "'");
}

SearchConfig make_search_config(const GlobalOptions& g, int restarts, std::size_t outcomes,
                                int max_iterations) {
  SearchConfig cfg;
  cfg.restarts = restarts;
  cfg.n_outcomes = outcomes;
  cfg.seed = g.seed.value_or(0);
  cfg.max_iterations = max_iterations;
  cfg.jobs = g.jobs;
  return cfg;
}

// ---------------------------------------------------------------------------

struct EntropyArgs {
  std::string sigma;
  std::string rho;
};

int cmd_entropy(const GlobalOptions& g, const EntropyArgs& a, std::ostream& out) {
  const auto [sigma, rho] = load_pair(a.sigma, a.rho);
  const auto forward = quantum_relative_entropy(sigma, rho);
  const auto backward = quantum_relative_entropy(rho, sigma);
  json report = {
      {"dim", sigma.dim()},
      {"d_sigma_rho", entropy_json(forward.value)},
      {"d_rho_sigma", entropy_json(backward.value)},
      {"support_ok", forward.support_ok},
      {"support_leak", forward.support_leak},
      {"truncation_budget", forward.truncation_budget},
      {"sigma_trace_deficit", sigma.trace_deficit()},
      {"rho_trace_deficit", rho.trace_deficit()},
  };
  if (g.json_path != "-") {
    out << "dim = " << sigma.dim() << '\n';
    out << "D(sigma||rho) = " << entropy_text(forward.value, g.bits) << '\n';
    out << "D(rho||sigma) = " << entropy_text(backward.value, g.bits) << '\n';
    out << "support: "
        << (forward.support_ok ? "ok"
                               : "supp(sigma) not contained in supp(rho), leak=" +
                                     num(forward.support_leak, 4))
        << '\n';
    out << "truncation budget = " << num(forward.truncation_budget, 4) << '\n';
  }
  emit_json(g, report, out);
  if (g.require_finite && !forward.finite()) return kExitSupportInfinite;
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct PovmOptArgs {
  std::string sigma;
  std::string rho;
  std::string out_path;
  int restarts = 8;
  std::size_t outcomes = 0;
  int max_iterations = 5000;
  int block_l = 1;
};

int cmd_povm_opt(const GlobalOptions& g, const PovmOptArgs& a, std::ostream& out,
                 std::ostream& err) {
  const auto [sigma, rho] = load_pair(a.sigma, a.rho);
  if (a.block_l < 1) throw Error(ErrorKind::kBadSpec, "--block-l must be >= 1");
  const DensityMatrix sigma_l = a.block_l == 1 ? sigma : tensor_power(sigma, a.block_l);
  const DensityMatrix rho_l = a.block_l == 1 ? rho : tensor_power(rho, a.block_l);
  if (g.require_finite && !quantum_relative_entropy(sigma_l, rho_l).finite()) {
    err << "error: D(sigma||rho) is infinite (support violation)\n";
    return kExitSupportInfinite;
  }
  const SearchResult r = optimize_measurement(
      sigma_l, rho_l, make_search_config(g, a.restarts, a.outcomes, a.max_iterations));
  if (!a.out_path.empty()) save_povm_json(a.out_path, r.best_povm);

  json report = {
      {"best_value", entropy_json(r.best_value)},
      {"ceiling", entropy_json(r.ceiling)},
      {"gap", entropy_json(r.gap())},
      {"per_restart_values", r.per_restart_values},
      {"iterations", r.iterations},
      {"converged", r.converged},
      {"n_outcomes", r.best_povm.size()},
      {"block_l", a.block_l},
  };
  if (g.json_path != "-") {
    out << "best_value = " << entropy_text(r.best_value, g.bits) << '\n';
    out << "ceiling D(sigma||rho) = " << entropy_text(r.ceiling, g.bits) << '\n';
    if (std::isfinite(r.ceiling) && std::isfinite(r.best_value)) {
      out << "gap = " << entropy_text(r.gap(), g.bits) << '\n';
    }
    if (a.block_l > 1) {
      out << "per copy = " << entropy_text(r.best_value / a.block_l, g.bits) << '\n';
    }
    for (std::size_t k = 0; k < r.per_restart_values.size(); ++k) {
      out << "restart " << k << ": " << entropy_text(r.per_restart_values[k], g.bits) << " ("
          << r.iterations[k] << " iterations)\n";
    }
    out << "converged = " << (r.converged ? "yes" : "no") << '\n';
    if (!a.out_path.empty()) out << "wrote " << a.out_path << '\n';
  }
  emit_json(g, report, out);
  if (!r.converged) {
    err << "warning: iteration budget exhausted before convergence\n";
    if (g.strict) return kExitBudget;
  }
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct ExperimentConfig {
  std::string sigma;
  std::string rho;
  std::string povm = "auto";
  int block_l = 1;
  int restarts = 8;
  TradeoffConfig tradeoff;
  std::optional<std::uint64_t> seed;
  std::string csv;
  std::string svg;
};

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::kIo, "cannot open config " + path);
  json j;
  try {
    j = json::parse(f);
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, "config " + path + ": " + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kParse, "config " + path + " is not a JSON object");
  ExperimentConfig c;
  try {
    for (const auto& [key, v] : j.items()) {
      if (key == "sigma") {
        c.sigma = v.get<std::string>();
      } else if (key == "rho") {
        c.rho = v.get<std::string>();
      } else if (key == "povm") {
        c.povm = v.get<std::string>();
      } else if (key == "block_l") {
        c.block_l = v.get<int>();
      } else if (key == "restarts") {
        c.restarts = v.get<int>();
      } else if (key == "thresholds") {
        if (v.is_string()) {
          if (v.get<std::string>() != "auto") {
            throw Error(ErrorKind::kParse, "thresholds must be a list or \"auto\"");
          }
        } else {
          c.tradeoff.thresholds = v.get<std::vector<double>>();
        }
      } else if (key == "grid_points") {
        c.tradeoff.grid_points = v.get<int>();
      } else if (key == "tfa_min") {
        c.tradeoff.tfa_min = v.get<double>();
      } else if (key == "tfa_max") {
        c.tradeoff.tfa_max = v.get<double>();
      } else if (key == "pilot_trials") {
        c.tradeoff.pilot_trials = v.get<std::int64_t>();
      } else if (key == "n_trials") {
        c.tradeoff.n_trials_delay = v.get<std::int64_t>();
      } else if (key == "n_trials_fa") {
        c.tradeoff.n_trials_fa = v.get<std::int64_t>();
      } else if (key == "horizon") {
        c.tradeoff.horizon = v.get<std::int64_t>();
      } else if (key == "seed") {
        c.seed = v.get<std::uint64_t>();
      } else if (key == "csv") {
        c.csv = v.get<std::string>();
      } else if (key == "svg") {
        c.svg = v.get<std::string>();
      } else {
        throw Error(ErrorKind::kParse, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kParse, "config " + path + ": " + e.what());
  }
  if (c.sigma.empty() || c.rho.empty()) {
    throw Error(ErrorKind::kParse, "config needs both \"sigma\" and \"rho\"");
  }
  return c;
}

json curve_json(const TradeoffResult& r) {
  json rows = json::array();
  for (const auto& row : r.curve.rows) {
    rows.push_back({{"h", row.h},
                    {"tfa_mean", row.tfa.mean},
                    {"tfa_stderr", row.tfa.std_error},
                    {"tfa_trials", row.tfa.n_trials},
                    {"tfa_censored", row.tfa.censored},
                    {"delay_mean", row.delay.mean},
                    {"delay_stderr", row.delay.std_error},
                    {"delay_trials", row.delay.n_trials},
                    {"delay_censored", row.delay.censored}});
  }
  return {{"rows", rows},
          {"slope", r.fit.slope},
          {"intercept", r.fit.intercept},
          {"r_squared", r.fit.r_squared},
          {"theory_slope", r.fit.theory_slope},
          {"quantum_slope", r.fit.quantum_slope},
          {"rows_used", r.fit.rows_used},
          {"kl_qp_per_copy", entropy_json(r.kl_qp_per_copy)},
          {"quantum_d", entropy_json(r.quantum_d)}};
}

int cmd_tradeoff(const GlobalOptions& g, const std::string& config_path, std::ostream& out,
                 std::ostream& err) {
  ExperimentConfig c = load_experiment_config(config_path);
  if (g.seed) c.seed = g.seed;
  if (!c.seed) throw Error(ErrorKind::kParse, "config must set \"seed\" (or pass --seed)");
  const std::filesystem::path base = std::filesystem::path(config_path).parent_path();
  const auto [sigma, rho] = load_pair(c.sigma, c.rho, base);
  if (c.block_l < 1) throw Error(ErrorKind::kBadSpec, "block_l must be >= 1");

  const auto d = quantum_relative_entropy(sigma, rho);
  if (!d.finite() && g.require_finite) {
    err << "error: D(sigma||rho) is infinite (support violation)\n";
    return kExitSupportInfinite;
  }
  if (d.finite() && d.value <= 1e-12) {
    throw Error(ErrorKind::kZeroDivergence, "D=0: sigma and rho coincide, nothing to detect");
  }

  GlobalOptions search_opts = g;
  search_opts.seed = c.seed;
  const PovmChoice choice = select_povm(c.povm, sigma, rho, c.block_l,
                                        make_search_config(search_opts, c.restarts, 0, 5000), base);
  if (choice.search && !choice.search->converged) {
    err << "warning: POVM search hit its iteration budget\n";
    if (g.strict) return kExitBudget;
  }

  c.tradeoff.seed = *c.seed;
  c.tradeoff.jobs = g.jobs;
  const TradeoffResult r = tradeoff_experiment(sigma, rho, choice.povm, c.block_l, c.tradeoff);

  const std::string csv = curve_to_csv(r.curve, r.fit);
  if (!c.csv.empty()) {
    std::filesystem::path p(c.csv);
    if (p.is_relative()) p = base / p;
    write_text_file(p.string(), csv);
  } else if (g.json_path != "-") {
    out << csv;
  }
  std::string svg_path = g.svg.empty() ? c.svg : g.svg;
  if (!svg_path.empty()) write_text_file(svg_path, curve_to_svg(r.curve, r.fit));
  for (const auto& row : r.curve.rows) {
    if (row.tfa.censoring_flag() || row.delay.censoring_flag()) {
      err << "warning: censoring above 0.1% at h=" << num(row.h, 6)
          << "; row excluded from the fit\n";
    }
  }
  if (g.json_path != "-") {
    out << "slope=" << num(r.fit.slope, 6) << ", theory=" << num(r.fit.theory_slope, 6)
        << ", quantum=" << num(r.fit.quantum_slope, 6) << '\n';
  }
  emit_json(g, curve_json(r), out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct SimulateArgs {
  std::string sigma;
  std::string rho;
  std::string povm = "basis";
  double h = 0.0;
  std::string nu = "0";
  int block_l = 1;
  std::int64_t horizon = 100'000;
};

int cmd_simulate(const GlobalOptions& g, const SimulateArgs& a, std::ostream& out,
                 std::ostream& err) {
  const auto [sigma, rho] = load_pair(a.sigma, a.rho);
  if (a.block_l < 1) throw Error(ErrorKind::kBadSpec, "--block-l must be >= 1");
  if (g.require_finite && !quantum_relative_entropy(sigma, rho).finite()) {
    err << "error: D(sigma||rho) is infinite (support violation)\n";
    return kExitSupportInfinite;
  }
  std::optional<std::int64_t> nu;
  if (a.nu != "none") {
    try {
      std::size_t used = 0;
      nu = std::stoll(a.nu, &used);
      if (used != a.nu.size()) throw std::invalid_argument(a.nu);
    } catch (const std::exception&) {
      throw Error(ErrorKind::kParse, "--nu must be an integer or 'none'");
    }
  }
  const PovmChoice choice =
      select_povm(a.povm, sigma, rho, a.block_l, make_search_config(g, 8, 0, 5000));
  const TrialSimulator sim(ChangePointModel{rho, sigma, nu}, choice.povm, a.block_l);
  RngHandle rng(g.seed.value_or(0), 0, 0);

  json steps = json::array();
  const bool text = g.json_path != "-";
  if (text) out << "block,time,phase,outcome,llr,statistic\n";
  const TrialResult r = sim.run(a.h, a.horizon, rng, [&](const TraceStep& s) {
    if (text) {
      out << s.block << ',' << s.time << ',' << (s.post_change ? "post" : "pre") << ','
          << s.outcome << ',' << num(s.llr, 8) << ',' << num(s.statistic, 8) << '\n';
    }
    if (!g.json_path.empty()) {
      steps.push_back({{"block", s.block},
                       {"time", s.time},
                       {"post_change", s.post_change},
                       {"outcome", s.outcome},
                       {"llr", entropy_json(s.llr)},
                       {"statistic", entropy_json(s.statistic)}});
    }
  });
  const char* kind = r.alarm_kind == AlarmKind::kDetection    ? "detection"
                     : r.alarm_kind == AlarmKind::kFalseAlarm ? "false_alarm"
                                                              : "censored";
  if (text) {
    if (r.stop_time) {
      out << "stop at t=" << *r.stop_time << " (" << kind << ")";
      if (nu && *r.stop_time > *nu) out << ", delay=" << *r.stop_time - *nu;
      out << '\n';
    } else {
      out << "no alarm before horizon " << a.horizon << " (censored)\n";
    }
  }
  json report = {{"alarm_kind", kind},
                 {"stop_time", r.stop_time ? json(*r.stop_time) : json(nullptr)},
                 {"nu", nu ? json(*nu) : json(nullptr)},
                 {"blocks", r.blocks},
                 {"trace", steps}};
  emit_json(g, report, out);
  return kExitOk;
}

// ---------------------------------------------------------------------------

constexpr std::uint64_t kLemma3Seed = 0x1e3a3;
constexpr std::uint64_t kDpiSeed = 0xd1d1;
constexpr std::uint64_t kCompressionSeed = 0xc0c0;

struct VerifyArgs {
  std::string suite = "all";
  std::string povm_path;
};

int cmd_verify(const GlobalOptions& g, const VerifyArgs& a, std::ostream& out) {
  const bool all = a.suite == "all";
  if (!all && a.suite != "lemma3" && a.suite != "compression" && a.suite != "dpi") {
    throw Error(ErrorKind::kParse, "unknown suite '" + a.suite + "'");
  }
  std::optional<Povm> extra;
  if (!a.povm_path.empty()) extra = load_povm_json(a.povm_path);

  const bool text = g.json_path != "-";
  json report = json::object();
  bool ok = true;
  if (all || a.suite == "lemma3") {
    const auto r = verify_lemma3(100, g.seed.value_or(kLemma3Seed), extra);
    ok = ok && r.passed;
    if (text) {
      out << "lemma3: " << (r.passed ? "PASS" : "FAIL") << " instances=" << r.instances
          << " max discrepancy=" << num(r.max_discrepancy, 4)
          << " infinite=" << r.infinite_instances
          << " mismatched infinities=" << r.mismatched_infinities << '\n';
    }
    report["lemma3"] = {{"passed", r.passed},
                        {"instances", r.instances},
                        {"max_discrepancy", r.max_discrepancy},
                        {"infinite_instances", r.infinite_instances},
                        {"mismatched_infinities", r.mismatched_infinities}};
  }
  if (all || a.suite == "dpi") {
    const auto r = verify_dpi(200, g.seed.value_or(kDpiSeed));
    ok = ok && r.passed;
    if (text) {
      out << "dpi: " << (r.passed ? "PASS" : "FAIL") << " instances=" << r.instances
          << " max channel excess=" << num(r.max_channel_excess, 4)
          << " max measured excess=" << num(r.max_measured_excess, 4) << '\n';
    }
    report["dpi"] = {{"passed", r.passed},
                     {"instances", r.instances},
                     {"max_channel_excess", r.max_channel_excess},
                     {"max_measured_excess", r.max_measured_excess}};
  }
  if (all || a.suite == "compression") {
    bool passed = true;
    double worst_decrease = 0.0;
    double worst_terminal = 0.0;
    const int pairs = 20;
    for (int i = 0; i < pairs; ++i) {
      RngHandle rng(g.seed.value_or(kCompressionSeed), static_cast<std::uint64_t>(i), 0);
      const auto sigma = random_density_matrix(5, rng);
      const auto rho = random_density_matrix(5, rng);
      const auto r = verify_compression_convergence(sigma, rho);
      passed = passed && r.passed;
      worst_decrease = std::max(worst_decrease, r.max_decrease);
      worst_terminal = std::max(worst_terminal, r.terminal_error);
    }
    ok = ok && passed;
    if (text) {
      out << "compression: " << (passed ? "PASS" : "FAIL") << " pairs=" << pairs
          << " max decrease=" << num(worst_decrease, 4)
          << " max terminal error=" << num(worst_terminal, 4) << '\n';
    }
    report["compression"] = {{"passed", passed},
                             {"pairs", pairs},
                             {"max_decrease", worst_decrease},
                             {"max_terminal_error", worst_terminal}};
  }
  report["passed"] = ok;
  if (text && all) out << "all: " << (ok ? "PASS" : "FAIL") << '\n';
  emit_json(g, report, out);
  return ok ? kExitOk : kExitVerifyFailed;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kBudgetExhausted:
    case ErrorKind::kConvergenceFailure:
      return kExitBudget;
    case ErrorKind::kInsufficientSpread:
      return kExitInsufficientSpread;
    case ErrorKind::kInfiniteDivergence:
      return kExitSupportInfinite;
    default:
      return kExitParseOrIo;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"qusum: quantum CUSUM lab (relative entropy, POVM search, detection trade-offs)"};
  app.name("qusum");
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  auto* seed_opt = app.add_option("--seed", seed, "Experiment seed");
  app.add_option("--jobs", g.jobs, "Worker threads (0 = available parallelism)");
  app.add_option("--svg", g.svg, "Write an SVG trade-off chart");
  app.add_option("--json", g.json_path, "Write a JSON report ('-' for stdout)");
  app.add_flag("--require-finite", g.require_finite, "Exit 3 when D(sigma||rho) is infinite");
  app.add_flag("--strict", g.strict, "Exit 4 when the optimizer budget runs out");
  app.add_flag("--bits", g.bits, "Display entropies in bits");

  EntropyArgs ea;
  auto* entropy = app.add_subcommand("entropy", "Relative entropies of two states");
  entropy->add_option("--sigma", ea.sigma, "Post-change state descriptor")->required();
  entropy->add_option("--rho", ea.rho, "Pre-change state descriptor")->required();

  PovmOptArgs pa;
  auto* povm_opt = app.add_subcommand("povm-opt", "Maximize the measured relative entropy");
  povm_opt->add_option("--sigma", pa.sigma, "Post-change state descriptor")->required();
  povm_opt->add_option("--rho", pa.rho, "Pre-change state descriptor")->required();
  povm_opt->add_option("--out", pa.out_path, "Write the best POVM as JSON");
  povm_opt->add_option("--restarts", pa.restarts, "Number of starts")->check(CLI::PositiveNumber);
  povm_opt->add_option("--outcomes", pa.outcomes, "POVM outcomes (0 = dim^2)");
  povm_opt->add_option("--max-iterations", pa.max_iterations, "Iterations per start")
      ->check(CLI::PositiveNumber);
  povm_opt->add_option("--block-l", pa.block_l, "Optimize on l-fold tensor powers");

  std::string config_path;
  auto* tradeoff = app.add_subcommand("tradeoff", "Delay vs false-alarm trade-off experiment");
  tradeoff->add_option("config", config_path, "JSON experiment config")->required();

  SimulateArgs sa;
  auto* simulate = app.add_subcommand("simulate", "One CUSUM trial with a step trace");
  simulate->add_option("--sigma", sa.sigma, "Post-change state descriptor")->required();
  simulate->add_option("--rho", sa.rho, "Pre-change state descriptor")->required();
  simulate->add_option("--povm", sa.povm,
                       "auto | basis | noisy_basis:<eps> | sigma_eigenbasis | rho_eigenbasis | "
                       "file:<path>");
  simulate->add_option("--threshold", sa.h, "CUSUM threshold h")->required();
  simulate->add_option("--nu", sa.nu, "Change point (integer or 'none')");
  simulate->add_option("--block-l", sa.block_l, "Block length");
  simulate->add_option("--horizon", sa.horizon, "Censoring horizon");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Run the verification suites");
  verify->add_option("--suite", va.suite, "lemma3 | compression | dpi | all")
      ->check(CLI::IsMember({"lemma3", "compression", "dpi", "all"}));
  verify->add_option("--povm", va.povm_path, "Also check this POVM file in the lemma3 suite");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitParseOrIo;
  }
  if (seed_opt->count() > 0) g.seed = seed;

  try {
    if (*entropy) return cmd_entropy(g, ea, out);
    if (*povm_opt) return cmd_povm_opt(g, pa, out, err);
    if (*tradeoff) return cmd_tradeoff(g, config_path, out, err);
    if (*simulate) return cmd_simulate(g, sa, out, err);
    if (*verify) return cmd_verify(g, va, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitParseOrIo;
  }
  return kExitParseOrIo;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run_cli(args, out, err);
}

}  // namespace qusum
