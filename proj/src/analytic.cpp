#include "critchain/analytic.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "critchain/errors.hpp"
#include "critchain/lattice.hpp"

namespace critchain {

int chi(Configuration c) {
  int parity = 0;
  for (; c; c &= c - 1) parity ^= __builtin_ctzll(c) & 1;
  return parity ? -1 : 1;
}

JastrowState::JastrowState(int n, int q) : n_(n), q_(q) {
  sector_dimension(n, q);
  const LatticeGeometry lattice(n);
  const auto sz = static_cast<std::size_t>(n);
  pair_log_.assign(sz * sz, 0.0);
  site_sum_.assign(sz, 0.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      // |z_i - z_j| = 2 |sin(pi (i - j) / N)|
      const double mag = 2.0 * std::abs(std::sin(std::numbers::pi * (j - i) / n));
      const cplx diff = lattice.z(i + 1) - lattice.z(j + 1);
      const cplx lg(std::log(mag), std::arg(diff));
      pair_log_[static_cast<std::size_t>(i) * sz + static_cast<std::size_t>(j)] = lg;
      site_sum_[static_cast<std::size_t>(i)] += lg;
      site_sum_[static_cast<std::size_t>(j)] += lg;
    }
  }
}

std::optional<LogAmplitude> JastrowState::amplitude(Configuration c) const {
  if ((n_ < 64 && (c >> n_) != 0) || popcount(c) * q_ != n_) return std::nullopt;
  const auto sz = static_cast<std::size_t>(n_);
  // Exponent q n_i n_j - n_i - n_j: q for the doubly occupied pairs, minus the
  // per-site sums that count every pair touching an occupied site once.
  cplx acc = 0.0;
  for (Configuration a = c; a; a &= a - 1) {
    const int i = __builtin_ctzll(a);
    acc -= site_sum_[static_cast<std::size_t>(i)];
    for (Configuration b = a & (a - 1); b; b &= b - 1) {
      const int j = __builtin_ctzll(b);
      acc += static_cast<double>(q_) * pair_log_[static_cast<std::size_t>(i) * sz + static_cast<std::size_t>(j)];
    }
  }
  double phase = acc.imag() + (chi(c) < 0 ? std::numbers::pi : 0.0);
  phase = std::remainder(phase, 2.0 * std::numbers::pi);
  if (phase <= -std::numbers::pi) phase += 2.0 * std::numbers::pi;
  return LogAmplitude{acc.real(), phase};
}

std::optional<LogAmplitude> amplitude(Configuration c, int n, int q) {
  return JastrowState(n, q).amplitude(c);
}

namespace {

void require_model_basis(int n, int q, const SectorBasis& basis) {
  sector_dimension(n, q);
  if (basis.sites() != n || basis.particles() != n / q) {
    throw DimensionMismatch("basis does not match the N/q-particle sector");
  }
}

void fix_gauge(StateVector& psi) {
  for (const cplx& v : psi) {
    if (std::abs(v) > 0.0) {
      const cplx rot = std::conj(v) / std::abs(v);
      vec::scale(rot, psi);
      break;
    }
  }
}

}  // namespace

StateVector build_state(int n, int q, const SectorBasis& basis) {
  require_model_basis(n, q, basis);
  const JastrowState jastrow(n, q);
  const std::int64_t dim = static_cast<std::int64_t>(basis.dimension());
  std::vector<LogAmplitude> logs(static_cast<std::size_t>(dim));
  double max_log = -std::numeric_limits<double>::infinity();
#pragma omp parallel for schedule(static) reduction(max : max_log)
  for (std::int64_t k = 0; k < dim; ++k) {
    const LogAmplitude a = *jastrow.amplitude(basis.state(static_cast<std::uint64_t>(k)));
    logs[static_cast<std::size_t>(k)] = a;
    max_log = std::max(max_log, a.logmag);
  }
  StateVector psi(static_cast<std::size_t>(dim));
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < dim; ++k) {
    const LogAmplitude& a = logs[static_cast<std::size_t>(k)];
    psi[static_cast<std::size_t>(k)] = std::polar(std::exp(a.logmag - max_log), a.phase);
  }
  vec::normalize(psi);
  fix_gauge(psi);
  return psi;
}

StateVector build_state_serial(int n, int q, const SectorBasis& basis) {
  require_model_basis(n, q, basis);
  const JastrowState jastrow(n, q);
  std::vector<LogAmplitude> logs;
  logs.reserve(basis.dimension());
  double max_log = -std::numeric_limits<double>::infinity();
  for (const Configuration c : basis.states()) {
    logs.push_back(*jastrow.amplitude(c));
    max_log = std::max(max_log, logs.back().logmag);
  }
  StateVector psi;
  psi.reserve(logs.size());
  for (const LogAmplitude& a : logs) psi.push_back(std::polar(std::exp(a.logmag - max_log), a.phase));
  vec::normalize(psi);
  fix_gauge(psi);
  return psi;
}

}  // namespace critchain
