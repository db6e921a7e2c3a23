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

#include "qusum/povm_search.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <string>

#include "qusum/parallel.hpp"

namespace qusum {

Povm realize_povm(const PovmParam& p) {
  if (p.factors.empty()) throw Error(ErrorKind::kBadSpec, "PovmParam has no factors");
  const Eigen::Index d = p.dim;
  std::vector<ComplexMatrix> effects;
  effects.reserve(p.factors.size());
  ComplexMatrix s = ComplexMatrix::Zero(d, d);
  for (const auto& a : p.factors) {
    if (a.rows() != d || a.cols() != d) {
      throw Error(ErrorKind::kDimMismatch, "PovmParam factor has wrong shape");
    }
    if (!all_finite(a)) throw Error(ErrorKind::kBadSpec, "PovmParam factor is not finite");
    effects.push_back(a.adjoint() * a);
    s += effects.back();
  }
  s = 0.5 * (s + s.adjoint());
  const ComplexMatrix w = inverse_sqrt_pd(s);
  for (auto& e : effects) {
    e = w * e * w;
    e = 0.5 * (e + e.adjoint());
  }
  return Povm::from_elements(std::move(effects));
}

PovmParam param_from_povm(const Povm& m) {
  PovmParam p;
  p.dim = m.dim();
  for (const auto& e : m.elements()) p.factors.push_back(sqrt_psd(e));
  return p;
}

namespace {

// Parameter vector layout: for each factor, its entries in column-major order
// as interleaved (re, im) pairs.
RealVector pack(const PovmParam& p) {
  const Eigen::Index per = p.dim * p.dim;
  RealVector theta(static_cast<Eigen::Index>(p.factors.size()) * per * 2);
  Eigen::Index k = 0;
  for (const auto& a : p.factors) {
    for (Eigen::Index idx = 0; idx < per; ++idx) {
      theta(k++) = a.data()[idx].real();
      theta(k++) = a.data()[idx].imag();
    }
  }
  return theta;
}

PovmParam unpack(const RealVector& theta, Eigen::Index dim, std::size_t outcomes) {
  PovmParam p;
  p.dim = dim;
  const Eigen::Index per = dim * dim;
  Eigen::Index k = 0;
  for (std::size_t i = 0; i < outcomes; ++i) {
    ComplexMatrix a(dim, dim);
    for (Eigen::Index idx = 0; idx < per; ++idx) {
      a.data()[idx] = Complex(theta(k), theta(k + 1));
      k += 2;
    }
    p.factors.push_back(std::move(a));
  }
  return p;
}

/// D(q||p) of the POVM realized from a parameter vector, with its gradient.
/// Returns nullopt for rejected iterates: singular normalizer, or a finite-D
/// instance where some outcome has q > 0 = p.
class KlObjective {
 public:
  KlObjective(const DensityMatrix& sigma, const DensityMatrix& rho, std::size_t outcomes,
              bool allow_infinite)
      : sigma_(sigma.matrix()),
        rho_(rho.matrix()),
        dim_(sigma.dim()),
        outcomes_(outcomes),
        allow_infinite_(allow_infinite) {}

  std::optional<double> operator()(const RealVector& theta, RealVector* grad = nullptr) const {
    const Eigen::Index d = dim_;
    const Eigen::Index per = d * d;
    std::vector<Eigen::Map<const ComplexMatrix>> factors;
    factors.reserve(outcomes_);
    // theta stores interleaved (re, im), which is the memory layout of std::complex.
    const auto* base = reinterpret_cast<const Complex*>(theta.data());
    ComplexMatrix s = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < outcomes_; ++i) {
      factors.emplace_back(base + static_cast<Eigen::Index>(i) * per, d, d);
      s.noalias() += factors.back().adjoint() * factors.back();
    }
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(0.5 * (s + s.adjoint()));
    if (solver.info() != Eigen::Success) return std::nullopt;
    const RealVector& ev = solver.eigenvalues();
    if (!(ev(d - 1) > 0.0) || ev(0) <= 1e-12 * ev(d - 1)) return std::nullopt;
    const ComplexMatrix& u = solver.eigenvectors();
    const ComplexMatrix w = u * ev.cwiseSqrt().cwiseInverse().asDiagonal() * u.adjoint();
    const ComplexMatrix sigma_w = w * sigma_ * w;
    const ComplexMatrix rho_w = w * rho_ * w;

    std::vector<double> q(outcomes_);
    std::vector<double> p(outcomes_);
    for (std::size_t i = 0; i < outcomes_; ++i) {
      const auto& a = factors[i];
      // Tr(A X A^dagger) = sum_ij (A X)_ij conj(A_ij)
      q[i] = std::max(0.0, ((a * sigma_w).cwiseProduct(a.conjugate())).sum().real());
      p[i] = std::max(0.0, ((a * rho_w).cwiseProduct(a.conjugate())).sum().real());
    }
    double value = 0.0;
    for (std::size_t i = 0; i < outcomes_; ++i) {
      if (q[i] <= 0.0) continue;
      if (p[i] < kProbFloor) {
        if (allow_infinite_) return kInfinity;
        return std::nullopt;
      }
      value += q[i] * std::log(q[i] / p[i]);
    }
    if (grad == nullptr) return value;

    // dD = sum_i Tr(dM_i G_i), G_i = ln(q_i/p_i) sigma - (q_i/p_i) rho. With
    // M_i = W B_i W, B_i = A_i^dagger A_i, W = S^{-1/2}, this becomes
    // sum_i Tr(dB_i H_i), H_i = W G_i W + Y, where Y pulls
    // X = sum_i (B_i W G_i + G_i W B_i) back through the derivative of S^{-1/2}.
    std::vector<ComplexMatrix> g(outcomes_);
    ComplexMatrix x = ComplexMatrix::Zero(d, d);
    for (std::size_t i = 0; i < outcomes_; ++i) {
      if (q[i] <= 0.0) {
        g[i] = ComplexMatrix::Zero(d, d);
      } else {
        g[i] = std::log(q[i] / p[i]) * sigma_ - (q[i] / p[i]) * rho_;
      }
      const ComplexMatrix bwg = factors[i].adjoint() * (factors[i] * (w * g[i]));
      x += bwg + bwg.adjoint();
    }
    ComplexMatrix xe = u.adjoint() * x * u;
    const RealVector root = ev.cwiseSqrt();
    for (Eigen::Index a = 0; a < d; ++a) {
      for (Eigen::Index b = 0; b < d; ++b) {
        xe(a, b) *= -1.0 / (root(a) * root(b) * (root(a) + root(b)));
      }
    }
    const ComplexMatrix y = u * xe * u.adjoint();
    grad->resize(theta.size());
    auto* out = reinterpret_cast<Complex*>(grad->data());
    for (std::size_t i = 0; i < outcomes_; ++i) {
      const ComplexMatrix h = w * g[i] * w + y;
      Eigen::Map<ComplexMatrix>(out + static_cast<Eigen::Index>(i) * per, d, d) =
          2.0 * factors[i] * h;
    }
    return value;
  }

  Eigen::Index dim() const { return dim_; }
  std::size_t outcomes() const { return outcomes_; }

 private:
  ComplexMatrix sigma_;
  ComplexMatrix rho_;
  Eigen::Index dim_;
  std::size_t outcomes_;
  bool allow_infinite_;
};

constexpr double kRejected = -kInfinity;

double eval(const KlObjective& f, const RealVector& theta, RealVector* grad = nullptr) {
  const auto v = f(theta, grad);
  return v ? *v : kRejected;
}

struct AscentOutcome {
  RealVector theta;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

AscentOutcome ascend(const KlObjective& f, RealVector theta, const SearchConfig& cfg) {
  AscentOutcome out;
  RealVector grad;
  double value = eval(f, theta, &grad);
  if (!std::isfinite(value)) {
    // Infinite start: nothing to improve. Rejected start: report as such.
    out.theta = std::move(theta);
    out.value = value;
    out.converged = value > 0.0;
    return out;
  }

  // L-BFGS on the minimization of -f.
  grad = -grad;
  std::deque<std::pair<RealVector, RealVector>> memory;  // (s, y)
  std::vector<double> history{value};
  int iter = 0;
  bool converged = false;
  bool first_step = true;

  for (; iter < cfg.max_iterations; ++iter) {
    if (grad.norm() < 1e-14) {
      converged = true;
      break;
    }
    // Two-loop recursion.
    RealVector dir = -grad;
    std::vector<double> alphas(memory.size());
    for (std::size_t k = memory.size(); k-- > 0;) {
      const auto& [s, y] = memory[k];
      const double rho_k = 1.0 / y.dot(s);
      alphas[k] = rho_k * s.dot(dir);
      dir -= alphas[k] * y;
    }
    if (!memory.empty()) {
      const auto& [s, y] = memory.back();
      dir *= s.dot(y) / y.dot(y);
    }
    for (std::size_t k = 0; k < memory.size(); ++k) {
      const auto& [s, y] = memory[k];
      const double rho_k = 1.0 / y.dot(s);
      const double beta = rho_k * y.dot(dir);
      dir += s * (alphas[k] - beta);
    }
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      memory.clear();
      dir = -grad;
      slope = -grad.squaredNorm();
    }

    double step = first_step ? std::min(1.0, 1.0 / grad.norm()) : 1.0;
    RealVector candidate;
    RealVector new_grad;
    double candidate_value = kRejected;
    bool accepted = false;
    for (int bt = 0; bt < 60; ++bt) {
      candidate = theta + step * dir;
      candidate_value = eval(f, candidate, &new_grad);
      // Armijo on -f: -f(new) <= -f(old) + c * step * slope
      if (candidate_value == kInfinity ||
          (std::isfinite(candidate_value) && -candidate_value <= -value + 1e-4 * step * slope)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      converged = true;
      break;
    }
    first_step = false;
    if (candidate_value == kInfinity) {
      theta = std::move(candidate);
      value = kInfinity;
      converged = true;
      ++iter;
      break;
    }

    new_grad = -new_grad;
    RealVector s = candidate - theta;
    RealVector y = new_grad - grad;
    if (y.dot(s) > 1e-12 * s.norm() * y.norm()) {
      memory.emplace_back(std::move(s), std::move(y));
      if (static_cast<int>(memory.size()) > cfg.lbfgs_memory) memory.pop_front();
    }
    theta = std::move(candidate);
    value = candidate_value;
    grad = std::move(new_grad);
    history.push_back(value);

    const auto n = history.size();
    if (static_cast<int>(n) > cfg.stall_window) {
      const double gain = history[n - 1] - history[n - 1 - static_cast<std::size_t>(cfg.stall_window)];
      if (gain <= cfg.rel_tol * std::max(std::abs(value), 1e-12)) {
        converged = true;
        ++iter;
        break;
      }
    }
  }

  out.theta = std::move(theta);
  out.value = value;
  out.iterations = iter;
  out.converged = converged;
  return out;
}

// Factors reproducing the rank-one projective measurement onto the columns of
// `basis`, spread over `outcomes` outcomes (copies share a projector equally,
// with a small random split so that ascent can separate them).
PovmParam basis_start(const ComplexMatrix& basis, std::size_t outcomes, RngHandle& rng,
                      bool jitter = true) {
  const Eigen::Index d = basis.rows();
  const auto du = static_cast<std::size_t>(d);
  PovmParam p;
  p.dim = d;
  p.factors.assign(outcomes, ComplexMatrix::Zero(d, d));
  if (outcomes >= du) {
    std::vector<int> copies(du, 0);
    for (std::size_t i = 0; i < outcomes; ++i) ++copies[i % du];
    for (std::size_t i = 0; i < outcomes; ++i) {
      const auto k = static_cast<Eigen::Index>(i % du);
      p.factors[i].row(0) = basis.col(k).adjoint() / std::sqrt(static_cast<double>(copies[i % du]));
    }
  } else {
    for (std::size_t k = 0; k < du; ++k) {
      const auto row = static_cast<Eigen::Index>(k / outcomes);
      p.factors[k % outcomes].row(row) = basis.col(static_cast<Eigen::Index>(k)).adjoint();
    }
  }
  if (jitter && outcomes > du) {
    for (auto& a : p.factors) a += 1e-4 * random_ginibre(d, d, rng);
  }
  return p;
}

}  // namespace

std::optional<double> parametrized_objective(const DensityMatrix& sigma, const DensityMatrix& rho,
                                             const PovmParam& p,
                                             std::vector<ComplexMatrix>* grad) {
  if (sigma.dim() != rho.dim() || p.dim != sigma.dim()) {
    throw Error(ErrorKind::kDimMismatch, "parametrized_objective needs matching dims");
  }
  const bool finite = quantum_relative_entropy(sigma, rho).finite();
  const KlObjective f(sigma, rho, p.n_outcomes(), !finite);
  RealVector g;
  const auto v = f(pack(p), grad ? &g : nullptr);
  if (v && grad) *grad = unpack(g, p.dim, p.n_outcomes()).factors;
  return v;
}

SearchResult optimize_measurement(const DensityMatrix& sigma, const DensityMatrix& rho,
                                  const SearchConfig& cfg, const std::vector<Povm>& warm_starts) {
  if (sigma.dim() != rho.dim()) {
    throw Error(ErrorKind::kDimMismatch, "optimize_measurement needs equal dims");
  }
  const Eigen::Index d = sigma.dim();
  if (static_cast<std::size_t>(d) > cfg.max_dim) {
    throw Error(ErrorKind::kDimensionOverflow, "state dim exceeds max_dim");
  }
  std::size_t outcomes = cfg.n_outcomes > 0 ? cfg.n_outcomes : static_cast<std::size_t>(d * d);
  if (!warm_starts.empty()) outcomes = warm_starts.front().size();
  if (outcomes < 2) throw Error(ErrorKind::kBadSpec, "POVM search needs at least 2 outcomes");

  const RelEntResult ceiling = quantum_relative_entropy(sigma, rho);
  const KlObjective objective(sigma, rho, outcomes, !ceiling.finite());

  // Assemble start points.
  std::vector<PovmParam> starts;
  for (const auto& w : warm_starts) {
    if (w.dim() != d || w.size() != outcomes) {
      throw Error(ErrorKind::kDimMismatch, "warm start POVM has wrong shape");
    }
    starts.push_back(param_from_povm(w));
  }
  {
    RngHandle rng(cfg.seed, 0, 1);
    const auto rho_eig = eig_hermitian(rho.matrix());
    const auto sigma_eig = eig_hermitian(sigma.matrix());
    // Infinite ceiling: the exact rho eigenbasis separates supp(rho) and attains it.
    if (!ceiling.finite()) starts.push_back(basis_start(rho_eig.eigenvectors, outcomes, rng, false));
    starts.push_back(basis_start(rho_eig.eigenvectors, outcomes, rng));
    starts.push_back(basis_start(sigma_eig.eigenvectors, outcomes, rng));
    const ComplexMatrix proj = support_projector(rho_eig);
    const ComplexMatrix diff = proj *
                               (log_on_support(sigma_eig).log - log_on_support(rho_eig).log) *
                               proj;
    starts.push_back(basis_start(eig_hermitian(0.5 * (diff + diff.adjoint())).eigenvectors,
                                 outcomes, rng));
  }
  const auto total = std::max<std::size_t>(starts.size(),
                                           static_cast<std::size_t>(std::max(cfg.restarts, 0)));
  for (std::size_t k = starts.size(); k < total; ++k) {
    RngHandle rng(cfg.seed, k, 0);
    PovmParam p;
    p.dim = d;
    for (std::size_t i = 0; i < outcomes; ++i) p.factors.push_back(random_ginibre(d, d, rng));
    starts.push_back(std::move(p));
  }

  std::vector<AscentOutcome> results(starts.size());
  parallel_for(starts.size(), cfg.jobs, [&](std::size_t k) {
    results[k] = ascend(objective, pack(starts[k]), cfg);
  });

  SearchResult out;
  out.ceiling = ceiling.value;
  std::size_t best = results.size();
  for (std::size_t k = 0; k < results.size(); ++k) {
    out.per_restart_values.push_back(results[k].value);
    out.iterations.push_back(results[k].iterations);
    if (results[k].value == kRejected) continue;
    if (best == results.size() || results[k].value > results[best].value) best = k;
  }
  if (best == results.size()) {
    throw Error(ErrorKind::kBudgetExhausted, "every start was rejected by the objective");
  }
  out.best_povm = realize_povm(unpack(results[best].theta, d, outcomes));
  out.best_value = measured_relative_entropy(sigma, rho, out.best_povm);
  out.converged = results[best].converged;
  return out;
}

std::vector<BlockSweepEntry> block_measurement_sweep(const DensityMatrix& sigma,
                                                     const DensityMatrix& rho, int l_max,
                                                     const SearchConfig& cfg) {
  if (l_max < 1) throw Error(ErrorKind::kBadSpec, "l_max must be >= 1");
  // Validates dim^l_max <= max_dim up front.
  (void)tensor_power(rho, l_max, cfg.max_dim);

  std::vector<BlockSweepEntry> out;
  for (int l = 1; l <= l_max; ++l) {
    BlockSweepEntry entry;
    entry.l = l;
    if (l == 1) {
      entry.search = optimize_measurement(sigma, rho, cfg);
    } else {
      const auto sigma_l = tensor_power(sigma, l, cfg.max_dim);
      const auto rho_l = tensor_power(rho, l, cfg.max_dim);
      const Povm warm = tensor(out.back().search.best_povm, out.front().search.best_povm,
                               cfg.max_dim);
      SearchConfig level_cfg = cfg;
      level_cfg.n_outcomes = warm.size();
      entry.search = optimize_measurement(sigma_l, rho_l, level_cfg, {warm});
    }
    entry.per_copy_value = entry.search.best_value / static_cast<double>(l);
    out.push_back(std::move(entry));
  }
  return out;
}

}  // namespace qusum
