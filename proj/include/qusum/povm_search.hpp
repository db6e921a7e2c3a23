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
#include <vector>

#include "qusum/entropy.hpp"
#include "qusum/measurement.hpp"

namespace qusum {

/// Unconstrained POVM parametrization: m complex dim x dim factors A_i,
/// realized as M_i = S^{-1/2} A_i^dagger A_i S^{-1/2} with S = sum_j A_j^dagger A_j.
struct PovmParam {
  Eigen::Index dim = 0;
  std::vector<ComplexMatrix> factors;

  std::size_t n_outcomes() const { return factors.size(); }
};

/// Throws kSingularNormalizer if S is (numerically) singular.
Povm realize_povm(const PovmParam& p);

/// A_i = M_i^{1/2}; realize_povm(from_povm(M)) == M when sum M_i = I.
PovmParam param_from_povm(const Povm& m);

/// D^M(sigma||rho) of realize_povm(p). When `grad` is non-null it receives,
/// per factor, dD/dRe(A) + i dD/dIm(A). Returns nullopt where the search would
/// reject the point (singular normalizer, or q > 0 = p while D is finite).
std::optional<double> parametrized_objective(const DensityMatrix& sigma, const DensityMatrix& rho,
                                             const PovmParam& p,
                                             std::vector<ComplexMatrix>* grad = nullptr);

struct SearchConfig {
  int restarts = 8;                 // total starts; the three seeded starts always run
  std::size_t n_outcomes = 0;       // 0: dim^2
  std::uint64_t seed = 0;
  int max_iterations = 5000;
  int stall_window = 20;
  double rel_tol = 1e-8;
  int lbfgs_memory = 10;
  unsigned jobs = 1;                // restarts run concurrently; 0 = hardware
  std::size_t max_dim = kDefaultMaxDim;
};

struct SearchResult {
  Povm best_povm;
  double best_value = 0.0;            // nats, recomputed through measured_relative_entropy
  std::vector<double> per_restart_values;
  std::vector<int> iterations;
  bool converged = false;
  double ceiling = 0.0;               // D(sigma||rho)

  double gap() const { return ceiling - best_value; }
};

/// Maximizes D^M(sigma||rho) over POVMs with cfg.n_outcomes outcomes.
///
/// Starts, in order: any `warm_starts`, the eigenbasis of rho, of sigma, and of
/// log sigma - log rho on supp(rho), then random Ginibre factors until
/// cfg.restarts starts have run. Each start is improved by quasi-Newton ascent
/// (L-BFGS on the exact gradient, Armijo backtracking)
/// until the relative gain over cfg.stall_window iterations drops below
/// cfg.rel_tol or cfg.max_iterations is hit; converged=false in the latter case
/// for the winning start.
SearchResult optimize_measurement(const DensityMatrix& sigma, const DensityMatrix& rho,
                                  const SearchConfig& cfg,
                                  const std::vector<Povm>& warm_starts = {});

struct BlockSweepEntry {
  int l = 1;
  double per_copy_value = 0.0;
  SearchResult search;
};

/// Optimizes on sigma^{(x)l} vs rho^{(x)l} for l = 1..l_max; level l is
/// warm-started from (level l-1 optimum) (x) (level 1 optimum).
std::vector<BlockSweepEntry> block_measurement_sweep(const DensityMatrix& sigma,
                                                     const DensityMatrix& rho, int l_max,
                                                     const SearchConfig& cfg);

}  // namespace qusum
