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

#include "qusum/states.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <string>

#include "qusum/io.hpp"

namespace qusum {

ValidationReport validate(const DensityMatrix& rho) {
  ValidationReport report;
  report.trace_deficit = rho.trace_deficit();
  const ComplexMatrix& m = rho.matrix();
  if (m.rows() == 0 || m.rows() != m.cols()) {
    report.failures.push_back("matrix is not square and non-empty");
    return report;
  }
  if (!all_finite(m)) {
    report.failures.push_back("non-finite entries");
    return report;
  }
  report.hermiticity_error = hermiticity_error(m);
  const ComplexMatrix h = 0.5 * (m + m.adjoint());
  report.min_eigenvalue = eig_hermitian(h).eigenvalues.minCoeff();
  report.trace_error = std::abs(m.trace() - Complex(1.0, 0.0));

  if (report.hermiticity_error > kHermiticityTol) {
    report.failures.push_back("hermiticity error " + std::to_string(report.hermiticity_error));
  }
  if (report.min_eigenvalue < -kNegativeClampTol) {
    report.failures.push_back("negativity: min eigenvalue " +
                              std::to_string(report.min_eigenvalue));
  }
  if (report.trace_error > kTraceTol) {
    report.failures.push_back("trace error " + std::to_string(report.trace_error));
  }
  if (report.trace_deficit < 0.0 || report.trace_deficit > 1.0) {
    report.failures.push_back("trace deficit out of [0,1]");
  }
  report.passed = report.failures.empty();
  return report;
}

DensityMatrix make_density_matrix(ComplexMatrix m, double trace_deficit) {
  DensityMatrix rho(std::move(m), trace_deficit);
  const auto report = validate(rho);
  if (!report.passed) {
    std::string msg = "invalid density matrix:";
    for (const auto& f : report.failures) msg += " " + f + ";";
    throw Error(ErrorKind::kBadSpec, msg);
  }
  return rho;
}

// ---------------------------------------------------------------------------
// Descriptor parsing

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_double(std::string_view s, std::string_view what) {
  s = trim(s);
  double v = 0.0;
  // std::from_chars for double is available in libstdc++ 11.
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) {
    throw Error(ErrorKind::kParse, "bad number for " + std::string(what) + ": '" +
                                       std::string(s) + "'");
  }
  return v;
}

long parse_int(std::string_view s, std::string_view what) {
  s = trim(s);
  long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw Error(ErrorKind::kParse, "bad integer for " + std::string(what) + ": '" +
                                       std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == sep) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  return out;
}

// key=value list; every key must be consumed by the caller.
std::vector<std::pair<std::string_view, std::string_view>> parse_kv(std::string_view body) {
  std::vector<std::pair<std::string_view, std::string_view>> out;
  if (trim(body).empty()) return out;
  for (auto item : split(body, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) {
      throw Error(ErrorKind::kParse, "expected key=value, got '" + std::string(item) + "'");
    }
    out.emplace_back(trim(item.substr(0, eq)), trim(item.substr(eq + 1)));
  }
  return out;
}

StateSpec parse_core(std::string_view text) {
  text = trim(text);
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw Error(ErrorKind::kParse, "state descriptor needs '<kind>:', got '" + std::string(text) + "'");
  }
  const auto kind = trim(text.substr(0, colon));
  const auto body = text.substr(colon + 1);
  StateSpec spec;

  auto single_key = [&](std::string_view key) {
    const auto kv = parse_kv(body);
    if (kv.size() != 1 || kv[0].first != key) {
      throw Error(ErrorKind::kParse, std::string(kind) + " expects exactly '" + std::string(key) +
                                         "=<value>'");
    }
    return kv[0].second;
  };

  if (kind == "thermal") {
    spec.kind = StateKind::kThermal;
    spec.nbar = parse_double(single_key("nbar"), "nbar");
  } else if (kind == "coherent") {
    spec.kind = StateKind::kCoherent;
    double re = 0.0;
    double im = 0.0;
    for (const auto& [k, v] : parse_kv(body)) {
      if (k == "re") {
        re = parse_double(v, "re");
      } else if (k == "im") {
        im = parse_double(v, "im");
      } else {
        throw Error(ErrorKind::kParse, "coherent: unknown key '" + std::string(k) + "'");
      }
    }
    spec.alpha = {re, im};
  } else if (kind == "squeezed") {
    spec.kind = StateKind::kSqueezedVacuum;
    spec.squeeze_r = parse_double(single_key("r"), "r");
  } else if (kind == "fock") {
    spec.kind = StateKind::kFock;
    spec.fock_n = static_cast<int>(parse_int(single_key("n"), "n"));
    if (spec.fock_n < 0) throw Error(ErrorKind::kBadSpec, "fock n must be >= 0");
  } else if (kind == "matrix") {
    spec.kind = StateKind::kMatrixFile;
    spec.path = std::string(trim(body));
    if (spec.path.empty()) throw Error(ErrorKind::kParse, "matrix: missing path");
  } else if (kind == "mix") {
    spec.kind = StateKind::kMixture;
    for (auto part : split(body, '|')) {
      const auto star = part.find('*');
      if (star == std::string_view::npos) {
        throw Error(ErrorKind::kParse, "mixture component needs '<w>*<spec>'");
      }
      const double w = parse_double(part.substr(0, star), "mixture weight");
      auto inner = parse_core(part.substr(star + 1));
      if (inner.kind == StateKind::kMixture) {
        throw Error(ErrorKind::kParse, "nested mixtures are not supported");
      }
      spec.components.emplace_back(w, std::move(inner));
    }
  } else {
    throw Error(ErrorKind::kParse, "unknown state kind '" + std::string(kind) + "'");
  }
  return spec;
}

void check_spec(const StateSpec& spec) {
  if (!(spec.tail_tol > 0.0 && spec.tail_tol < 1.0)) {
    throw Error(ErrorKind::kBadSpec, "tail_tol must lie in (0,1)");
  }
  if (spec.fock_cutoff && *spec.fock_cutoff < 1) {
    throw Error(ErrorKind::kBadSpec, "fock_cutoff must be >= 1");
  }
  switch (spec.kind) {
    case StateKind::kThermal:
      if (!(spec.nbar >= 0.0)) throw Error(ErrorKind::kBadSpec, "thermal nbar must be >= 0");
      break;
    case StateKind::kFock:
      if (spec.fock_n < 0) throw Error(ErrorKind::kBadSpec, "fock n must be >= 0");
      break;
    case StateKind::kMixture: {
      if (spec.components.empty()) throw Error(ErrorKind::kBadSpec, "empty mixture");
      double total = 0.0;
      for (const auto& [w, c] : spec.components) {
        if (!(w >= 0.0)) throw Error(ErrorKind::kBadSpec, "mixture weights must be >= 0");
        if (c.kind == StateKind::kMixture) throw Error(ErrorKind::kBadSpec, "nested mixture");
        total += w;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw Error(ErrorKind::kBadSpec, "mixture weights sum to " + std::to_string(total));
      }
      break;
    }
    default:
      break;
  }
}

}  // namespace

StateSpec parse_state_spec(std::string_view text) {
  text = trim(text);
  std::string_view suffix;
  // Matrix paths may contain '@' only when no suffix follows; take the last one.
  const auto at = text.rfind('@');
  if (at != std::string_view::npos && text.substr(at + 1).find('=') != std::string_view::npos) {
    suffix = text.substr(at + 1);
    text = text.substr(0, at);
  }
  StateSpec spec = parse_core(text);
  for (const auto& [k, v] : parse_kv(suffix)) {
    if (k == "cutoff") {
      if (v == "auto") {
        spec.fock_cutoff.reset();
      } else {
        const long n = parse_int(v, "cutoff");
        if (n < 1) throw Error(ErrorKind::kBadSpec, "cutoff must be >= 1");
        spec.fock_cutoff = static_cast<std::size_t>(n);
      }
    } else if (k == "tail") {
      spec.tail_tol = parse_double(v, "tail");
    } else {
      throw Error(ErrorKind::kParse, "unknown suffix key '" + std::string(k) + "'");
    }
  }
  for (auto& [w, c] : spec.components) {
    c.tail_tol = spec.tail_tol;
    c.fock_cutoff = spec.fock_cutoff;
  }
  check_spec(spec);
  return spec;
}

// ---------------------------------------------------------------------------
// Fock-basis data

RealVector thermal_populations(double nbar, std::size_t cutoff) {
  RealVector p(static_cast<Eigen::Index>(cutoff));
  const double ratio = nbar / (1.0 + nbar);
  double term = 1.0 / (1.0 + nbar);
  for (Eigen::Index n = 0; n < p.size(); ++n) {
    p(n) = term;
    term *= ratio;
  }
  return p;
}

ComplexVector coherent_amplitudes(Complex alpha, std::size_t cutoff) {
  ComplexVector a = ComplexVector::Zero(static_cast<Eigen::Index>(cutoff));
  const double mod = std::abs(alpha);
  if (mod == 0.0) {
    a(0) = 1.0;
    return a;
  }
  const double phase = std::arg(alpha);
  for (Eigen::Index n = 0; n < a.size(); ++n) {
    const double dn = static_cast<double>(n);
    const double log_mag = -0.5 * mod * mod + dn * std::log(mod) - 0.5 * std::lgamma(dn + 1.0);
    a(n) = std::polar(std::exp(log_mag), dn * phase);
  }
  return a;
}

RealVector squeezed_vacuum_amplitudes(double r, std::size_t cutoff) {
  // <2m|S(r)|0> = (-tanh r)^m sqrt((2m)!) / (2^m m!) / sqrt(cosh r)
  RealVector c = RealVector::Zero(static_cast<Eigen::Index>(cutoff));
  const double t = std::tanh(r);
  double amp = 1.0 / std::sqrt(std::cosh(r));
  for (Eigen::Index n = 0; n < c.size(); n += 2) {
    c(n) = amp;
    const double m = static_cast<double>(n / 2);
    amp *= -t * std::sqrt((2.0 * m + 1.0) * (2.0 * m + 2.0)) / (2.0 * (m + 1.0));
  }
  return c;
}

namespace {

// Log-probability of Fock level n, -inf for zero.
double log_prob(const StateSpec& spec, std::size_t level) {
  const double n = static_cast<double>(level);
  const double kNegInf = -std::numeric_limits<double>::infinity();
  switch (spec.kind) {
    case StateKind::kThermal: {
      if (spec.nbar == 0.0) return level == 0 ? 0.0 : kNegInf;
      return n * std::log(spec.nbar / (1.0 + spec.nbar)) - std::log1p(spec.nbar);
    }
    case StateKind::kCoherent: {
      const double lambda = std::norm(spec.alpha);
      if (lambda == 0.0) return level == 0 ? 0.0 : kNegInf;
      return -lambda + n * std::log(lambda) - std::lgamma(n + 1.0);
    }
    case StateKind::kSqueezedVacuum: {
      if (level % 2 == 1) return kNegInf;
      const double t = std::tanh(std::abs(spec.squeeze_r));
      if (t == 0.0) return level == 0 ? 0.0 : kNegInf;
      const double m = n / 2.0;
      return std::lgamma(n + 1.0) - 2.0 * std::lgamma(m + 1.0) - m * std::log(4.0) +
             n * std::log(t) - std::log(std::cosh(spec.squeeze_r));
    }
    case StateKind::kFock:
      return static_cast<int>(level) == spec.fock_n ? 0.0 : kNegInf;
    default:
      return kNegInf;
  }
}

// Tail {n >= cutoff} summed term by term. Past the mode the ratio of
// successive nonzero terms is bounded by r < 1, so the remainder after a term
// is at most term * r / (1 - r).
double summed_tail(const StateSpec& spec, std::size_t cutoff) {
  const bool squeezed = spec.kind == StateKind::kSqueezedVacuum;
  const std::size_t step = squeezed ? 2 : 1;
  std::size_t n = cutoff;
  if (squeezed && n % 2 == 1) ++n;
  const double lambda = std::norm(spec.alpha);
  const double t = std::tanh(std::abs(spec.squeeze_r));
  double sum = 0.0;
  constexpr std::size_t kMaxTerms = 50'000'000;
  for (std::size_t count = 0; count < kMaxTerms; ++count, n += step) {
    const double term = std::exp(log_prob(spec, n));
    sum += term;
    const double ratio = squeezed ? t * t : lambda / static_cast<double>(n + 1);
    if (ratio < 1.0) {
      const double remainder = term * ratio / (1.0 - ratio);
      if (remainder <= 1e-17 * sum || remainder == 0.0) return sum + remainder;
    }
  }
  return sum;
}

}  // namespace

double tail_mass(const StateSpec& spec, std::size_t cutoff) {
  switch (spec.kind) {
    case StateKind::kThermal:
      if (spec.nbar == 0.0) return cutoff >= 1 ? 0.0 : 1.0;
      return std::pow(spec.nbar / (1.0 + spec.nbar), static_cast<double>(cutoff));
    case StateKind::kFock:
      return static_cast<std::size_t>(spec.fock_n) < cutoff ? 0.0 : 1.0;
    case StateKind::kCoherent:
    case StateKind::kSqueezedVacuum:
      return summed_tail(spec, cutoff);
    case StateKind::kMixture: {
      double total = 0.0;
      for (const auto& [w, c] : spec.components) total += w * tail_mass(c, cutoff);
      return total;
    }
    case StateKind::kMatrixFile:
      return 0.0;
  }
  return 0.0;
}

namespace {

std::optional<std::size_t> fixed_dimension(const StateSpec& spec) {
  if (spec.kind == StateKind::kMatrixFile) {
    return static_cast<std::size_t>(load_matrix_json(spec.path).rows());
  }
  if (spec.kind == StateKind::kMixture) {
    std::optional<std::size_t> dim;
    for (const auto& [w, c] : spec.components) {
      if (auto d = fixed_dimension(c)) {
        if (dim && *dim != *d) throw Error(ErrorKind::kDimMismatch, "mixture matrix dims differ");
        dim = d;
      }
    }
    if (dim) return dim;
  }
  return spec.fock_cutoff;
}

}  // namespace

std::size_t resolve_cutoff(const StateSpec& spec, std::size_t max_dim) {
  check_spec(spec);
  if (auto d = fixed_dimension(spec)) return *d;
  if (spec.kind == StateKind::kThermal && spec.nbar > 0.0) {
    const double ratio = spec.nbar / (1.0 + spec.nbar);
    std::size_t n = 1;
    double tail = ratio;
    while (tail > spec.tail_tol && n <= max_dim) {
      ++n;
      tail *= ratio;
    }
    if (n > max_dim) {
      throw Error(ErrorKind::kCutoffTooSmall, "thermal tail exceeds tail_tol at max_dim");
    }
    return n;
  }
  if (spec.kind == StateKind::kFock) {
    const auto n = static_cast<std::size_t>(spec.fock_n) + 1;
    if (n > max_dim) throw Error(ErrorKind::kCutoffTooSmall, "fock level exceeds max_dim");
    return n;
  }
  if (spec.kind == StateKind::kMixture) {
    std::size_t n = 1;
    for (const auto& [w, c] : spec.components) n = std::max(n, resolve_cutoff(c, max_dim));
    return n;
  }
  // Numeric tail: doubling search for an upper bracket, then bisection
  // (the tail is nonincreasing in the cutoff).
  std::size_t hi = 1;
  while (tail_mass(spec, hi) > spec.tail_tol) {
    if (hi >= max_dim) {
      throw Error(ErrorKind::kCutoffTooSmall, "tail exceeds tail_tol at max_dim " +
                                                  std::to_string(max_dim));
    }
    hi = std::min(max_dim, hi * 2);
  }
  std::size_t lo = 0;  // tail(lo) > tol or lo == 0
  while (hi - lo > 1) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (tail_mass(spec, mid) > spec.tail_tol) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

DensityMatrix build_state_at(const StateSpec& spec, std::size_t cutoff) {
  check_spec(spec);
  if (cutoff < 1) throw Error(ErrorKind::kBadSpec, "cutoff must be >= 1");
  const auto n = static_cast<Eigen::Index>(cutoff);
  ComplexMatrix m;
  double deficit = 0.0;

  switch (spec.kind) {
    case StateKind::kThermal: {
      m = ComplexMatrix::Zero(n, n);
      m.diagonal() = thermal_populations(spec.nbar, cutoff).cast<Complex>();
      deficit = tail_mass(spec, cutoff);
      break;
    }
    case StateKind::kCoherent: {
      const ComplexVector a = coherent_amplitudes(spec.alpha, cutoff);
      m = a * a.adjoint();
      deficit = tail_mass(spec, cutoff);
      break;
    }
    case StateKind::kSqueezedVacuum: {
      const ComplexVector c = squeezed_vacuum_amplitudes(spec.squeeze_r, cutoff).cast<Complex>();
      m = c * c.adjoint();
      deficit = tail_mass(spec, cutoff);
      break;
    }
    case StateKind::kFock: {
      m = ComplexMatrix::Zero(n, n);
      if (static_cast<std::size_t>(spec.fock_n) < cutoff) m(spec.fock_n, spec.fock_n) = 1.0;
      deficit = tail_mass(spec, cutoff);
      break;
    }
    case StateKind::kMatrixFile: {
      m = load_matrix_json(spec.path);
      if (m.rows() != n) {
        throw Error(ErrorKind::kDimMismatch, "matrix file has dim " + std::to_string(m.rows()) +
                                                 ", requested " + std::to_string(n));
      }
      // File states are taken as exact; validation happens below.
      return make_density_matrix(std::move(m), 0.0);
    }
    case StateKind::kMixture: {
      m = ComplexMatrix::Zero(n, n);
      for (const auto& [w, c] : spec.components) {
        const auto part = build_state_at(c, cutoff);
        // Undo the component renormalization so weights act on true probabilities.
        m += w * (1.0 - part.trace_deficit()) * part.matrix();
        deficit += w * part.trace_deficit();
      }
      break;
    }
  }

  const double kept = m.trace().real();
  if (!(kept > 1e-300)) {
    throw Error(ErrorKind::kCutoffTooSmall, "no probability mass below cutoff " +
                                                std::to_string(cutoff));
  }
  m /= kept;
  m = 0.5 * (m + m.adjoint());
  return make_density_matrix(std::move(m), std::clamp(deficit, 0.0, 1.0));
}

DensityMatrix build_state(const StateSpec& spec, std::size_t max_dim) {
  return build_state_at(spec, resolve_cutoff(spec, max_dim));
}

std::pair<DensityMatrix, DensityMatrix> build_state_pair(const StateSpec& first,
                                                         const StateSpec& second,
                                                         std::size_t max_dim) {
  const auto fixed_a = fixed_dimension(first);
  const auto fixed_b = fixed_dimension(second);
  std::size_t dim = 0;
  if (fixed_a && fixed_b) {
    if (*fixed_a != *fixed_b) {
      throw Error(ErrorKind::kDimMismatch, "states pin different dimensions " +
                                               std::to_string(*fixed_a) + " and " +
                                               std::to_string(*fixed_b));
    }
    dim = *fixed_a;
  } else if (fixed_a) {
    dim = *fixed_a;
  } else if (fixed_b) {
    dim = *fixed_b;
  } else {
    dim = std::max(resolve_cutoff(first, max_dim), resolve_cutoff(second, max_dim));
  }
  return {build_state_at(first, dim), build_state_at(second, dim)};
}

DensityMatrix tensor_power(const DensityMatrix& rho, int l, std::size_t max_dim) {
  if (l < 1) throw Error(ErrorKind::kBadSpec, "tensor power needs l >= 1");
  double total = 1.0;
  for (int k = 0; k < l; ++k) {
    total *= static_cast<double>(rho.dim());
    if (total > static_cast<double>(max_dim)) {
      throw Error(ErrorKind::kDimensionOverflow,
                  "dim^l exceeds max_dim " + std::to_string(max_dim));
    }
  }
  ComplexMatrix out = rho.matrix();
  for (int k = 1; k < l; ++k) out = kron(out, rho.matrix(), max_dim);
  const double kept = std::pow(1.0 - rho.trace_deficit(), l);
  return DensityMatrix(std::move(out), 1.0 - kept);
}

double purity(const DensityMatrix& rho) {
  return trace_product(rho.matrix(), rho.matrix()).real();
}

double mean_photon_number(const DensityMatrix& rho) {
  double total = 0.0;
  for (Eigen::Index n = 0; n < rho.dim(); ++n) {
    total += static_cast<double>(n) * rho.matrix()(n, n).real();
  }
  return total;
}

double trace_distance(const DensityMatrix& a, const DensityMatrix& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::kDimMismatch, "trace distance dims differ");
  const ComplexMatrix diff = a.matrix() - b.matrix();
  const auto spec = eig_hermitian(0.5 * (diff + diff.adjoint()));
  return 0.5 * spec.eigenvalues.cwiseAbs().sum();
}

}  // namespace qusum
