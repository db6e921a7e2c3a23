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

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "qusum/cli.hpp"
#include "qusum/entropy.hpp"
#include "qusum/experiments.hpp"
#include "qusum/io.hpp"

namespace py = pybind11;
using namespace qusum;

namespace {

DensityMatrix to_state(const ComplexMatrix& m) { return make_density_matrix(m); }

Povm to_povm(const std::vector<ComplexMatrix>& elements) {
  return Povm::from_elements(elements);
}

py::dict search_to_dict(const SearchResult& r) {
  py::dict d;
  d["best_value"] = r.best_value;
  d["ceiling"] = r.ceiling;
  d["gap"] = r.gap();
  d["converged"] = r.converged;
  d["per_restart_values"] = r.per_restart_values;
  d["iterations"] = r.iterations;
  d["povm"] = r.best_povm.elements();
  return d;
}

py::dict estimate_to_dict(const StoppingEstimate& e) {
  py::dict d;
  d["mean"] = e.mean;
  d["std_error"] = e.std_error;
  d["n_trials"] = e.n_trials;
  d["censored"] = e.censored;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "QUSUM lab: relative entropies, POVM search, CUSUM trade-off experiments";

  static py::exception<Error> qusum_error(m, "QusumError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = qusum_error;
      py::object exc = err(e.what());
      exc.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(qusum_error.ptr(), exc.ptr());
    }
  });

  m.def(
      "state",
      [](const std::string& spec) { return build_state(parse_state_spec(spec)).matrix(); },
      py::arg("spec"), "Density matrix for a state descriptor, e.g. 'thermal:nbar=1'.");
  m.def(
      "state_pair",
      [](const std::string& sigma, const std::string& rho) {
        const auto [s, r] = build_state_pair(parse_state_spec(sigma), parse_state_spec(rho));
        return std::make_pair(s.matrix(), r.matrix());
      },
      py::arg("sigma"), py::arg("rho"), "Both states at a shared cutoff.");

  m.def(
      "relative_entropy",
      [](const ComplexMatrix& sigma, const ComplexMatrix& rho) {
        const auto r = quantum_relative_entropy(to_state(sigma), to_state(rho));
        py::dict d;
        d["value"] = r.value;
        d["support_ok"] = r.support_ok;
        d["support_leak"] = r.support_leak;
        d["truncation_budget"] = r.truncation_budget;
        return d;
      },
      py::arg("sigma"), py::arg("rho"), "D(sigma||rho) in nats with support diagnostics.");
  m.def(
      "kl_divergence",
      [](const std::vector<double>& q, const std::vector<double>& p) {
        return kl_divergence(make_distribution(q), make_distribution(p));
      },
      py::arg("q"), py::arg("p"));
  m.def(
      "measured_relative_entropy",
      [](const ComplexMatrix& sigma, const ComplexMatrix& rho,
         const std::vector<ComplexMatrix>& povm) {
        return measured_relative_entropy(to_state(sigma), to_state(rho), to_povm(povm));
      },
      py::arg("sigma"), py::arg("rho"), py::arg("povm"));
  m.def(
      "induced_distribution",
      [](const std::vector<ComplexMatrix>& povm, const ComplexMatrix& rho) {
        return induced_distribution(to_povm(povm), to_state(rho)).probs;
      },
      py::arg("povm"), py::arg("rho"));

  m.def(
      "optimize_measurement",
      [](const ComplexMatrix& sigma, const ComplexMatrix& rho, int restarts,
         std::size_t n_outcomes, std::uint64_t seed, int max_iterations, unsigned jobs) {
        SearchConfig cfg;
        cfg.restarts = restarts;
        cfg.n_outcomes = n_outcomes;
        cfg.seed = seed;
        cfg.max_iterations = max_iterations;
        cfg.jobs = jobs;
        const auto s = to_state(sigma);
        const auto r = to_state(rho);
        SearchResult res;
        {
          py::gil_scoped_release release;
          res = optimize_measurement(s, r, cfg);
        }
        return search_to_dict(res);
      },
      py::arg("sigma"), py::arg("rho"), py::arg("restarts") = 8, py::arg("n_outcomes") = 0,
      py::arg("seed") = 0, py::arg("max_iterations") = 5000, py::arg("jobs") = 1);
  m.def(
      "block_sweep",
      [](const ComplexMatrix& sigma, const ComplexMatrix& rho, int l_max, int restarts,
         std::uint64_t seed) {
        SearchConfig cfg;
        cfg.restarts = restarts;
        cfg.seed = seed;
        const auto sweep = block_measurement_sweep(to_state(sigma), to_state(rho), l_max, cfg);
        std::vector<double> per_copy;
        for (const auto& e : sweep) per_copy.push_back(e.per_copy_value);
        return per_copy;
      },
      py::arg("sigma"), py::arg("rho"), py::arg("l_max"), py::arg("restarts") = 8,
      py::arg("seed") = 0, "Per-copy optimized values for l = 1..l_max.");

  m.def(
      "cusum_path",
      [](const std::vector<double>& llrs, double h) {
        CusumDetector det(h);
        std::vector<double> path;
        for (double v : llrs) {
          det.step(v);
          path.push_back(det.statistic());
          if (det.stopped()) break;
        }
        return py::make_tuple(path, det.stopped() ? py::object(py::int_(det.steps())) : py::none());
      },
      py::arg("llrs"), py::arg("h"), "Statistic path and stop step (None if no alarm).");

  m.def(
      "estimate_tfa",
      [](const ComplexMatrix& sigma, const ComplexMatrix& rho,
         const std::vector<ComplexMatrix>& povm, double h, std::int64_t n_trials,
         std::int64_t horizon, std::uint64_t seed, int block_l) {
        const TrialSimulator sim({to_state(rho), to_state(sigma), std::nullopt}, to_povm(povm),
                                 block_l);
        return estimate_to_dict(estimate_tfa(sim, h, {n_trials, horizon, seed, 1}));
      },
      py::arg("sigma"), py::arg("rho"), py::arg("povm"), py::arg("h"),
      py::arg("n_trials") = 2000, py::arg("horizon") = kDefaultHorizon, py::arg("seed") = 0,
      py::arg("block_l") = 1);
  m.def(
      "estimate_delay",
      [](const ComplexMatrix& sigma, const ComplexMatrix& rho,
         const std::vector<ComplexMatrix>& povm, double h, std::int64_t n_trials,
         std::int64_t horizon, std::uint64_t seed, int block_l) {
        const TrialSimulator sim({to_state(rho), to_state(sigma), 0}, to_povm(povm), block_l);
        return estimate_to_dict(estimate_delay(sim, h, {n_trials, horizon, seed, 1}));
      },
      py::arg("sigma"), py::arg("rho"), py::arg("povm"), py::arg("h"),
      py::arg("n_trials") = 10000, py::arg("horizon") = kDefaultHorizon, py::arg("seed") = 0,
      py::arg("block_l") = 1);

  m.def(
      "tradeoff",
      [](const ComplexMatrix& sigma, const ComplexMatrix& rho,
         const std::vector<ComplexMatrix>& povm, std::uint64_t seed, int block_l,
         std::vector<double> thresholds, std::int64_t n_trials_delay, std::int64_t n_trials_fa,
         double tfa_min, double tfa_max, unsigned jobs) {
        TradeoffConfig cfg;
        cfg.seed = seed;
        cfg.thresholds = std::move(thresholds);
        cfg.n_trials_delay = n_trials_delay;
        cfg.n_trials_fa = n_trials_fa;
        cfg.tfa_min = tfa_min;
        cfg.tfa_max = tfa_max;
        cfg.jobs = jobs;
        const auto s = to_state(sigma);
        const auto r = to_state(rho);
        const auto m = to_povm(povm);
        TradeoffResult res;
        {
          py::gil_scoped_release release;
          res = tradeoff_experiment(s, r, m, block_l, cfg);
        }
        py::list rows;
        for (const auto& row : res.curve.rows) {
          py::dict d;
          d["h"] = row.h;
          d["tfa"] = estimate_to_dict(row.tfa);
          d["delay"] = estimate_to_dict(row.delay);
          rows.append(d);
        }
        py::dict out;
        out["rows"] = rows;
        out["slope"] = res.fit.slope;
        out["intercept"] = res.fit.intercept;
        out["r_squared"] = res.fit.r_squared;
        out["theory_slope"] = res.fit.theory_slope;
        out["quantum_slope"] = res.fit.quantum_slope;
        out["csv"] = curve_to_csv(res.curve, res.fit);
        return out;
      },
      py::arg("sigma"), py::arg("rho"), py::arg("povm"), py::kw_only(), py::arg("seed"),
      py::arg("block_l") = 1, py::arg("thresholds") = std::vector<double>{},
      py::arg("n_trials_delay") = 10000, py::arg("n_trials_fa") = 2000, py::arg("tfa_min") = 1e2,
      py::arg("tfa_max") = 1e5, py::arg("jobs") = 1);

  m.def(
      "verify_lemma3",
      [](int n, std::uint64_t seed) {
        const auto r = verify_lemma3(n, seed);
        return py::make_tuple(r.passed, r.max_discrepancy);
      },
      py::arg("n") = 100, py::arg("seed") = 0x1e3a3, "(passed, max discrepancy)");
  m.def(
      "verify_dpi",
      [](int n, std::uint64_t seed) { return verify_dpi(n, seed).passed; }, py::arg("n") = 200,
      py::arg("seed") = 0xd1d1);
  m.def(
      "compression_table",
      [](const ComplexMatrix& sigma, const ComplexMatrix& rho) {
        const auto r = verify_compression_convergence(to_state(sigma), to_state(rho));
        return py::make_tuple(r.values, r.full_value, r.passed);
      },
      py::arg("sigma"), py::arg("rho"), "(values for n = 1..d-1, D, passed)");

  m.def(
      "povm_from_json",
      [](const std::string& text) { return povm_from_json_string(text).elements(); },
      py::arg("text"));
  m.def(
      "povm_to_json",
      [](const std::vector<ComplexMatrix>& povm) { return povm_to_json_string(to_povm(povm)); },
      py::arg("povm"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out;
        std::ostringstream err;
        const int code = run_cli(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the qusum command line in-process: (exit code, stdout, stderr).");
}
