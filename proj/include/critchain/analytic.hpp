#pragma once

#include <optional>
#include <vector>

#include "critchain/basis.hpp"
#include "critchain/vector_ops.hpp"

namespace critchain {

/// (-1)^(sum_j (j-1) n_j) with 1-based sites, i.e. the parity of the sum of
/// 0-based occupied positions.
int chi(Configuration c);

/// log|psi| and arg(psi) of an unnormalized amplitude.
struct LogAmplitude {
  double logmag = 0.0;
  double phase = 0.0;  // (-pi, pi]
};

/// Evaluates the Jastrow amplitude
///   chi(n) prod_{i<j} (z_i - z_j)^(q n_i n_j - n_i - n_j)
/// in log space from per-pair tables.
class JastrowState {
 public:
  JastrowState(int n, int q);

  int sites() const { return n_; }
  int q() const { return q_; }
  /// Empty when c is outside the N/q-particle sector.
  std::optional<LogAmplitude> amplitude(Configuration c) const;

 private:
  int n_;
  int q_;
  std::vector<cplx> pair_log_;  // log(z_i - z_j) for i < j, row-major N x N
  std::vector<cplx> site_sum_;  // sum_{j != i} log(z_min - z_max)
};

/// One-shot convenience wrapper around JastrowState.
std::optional<LogAmplitude> amplitude(Configuration c, int n, int q);

/// Normalized state over the sector: exponentiated after subtracting the
/// largest log-magnitude, 2-norm normalized, and rotated so the first
/// component is real positive. Filled in parallel.
StateVector build_state(int n, int q, const SectorBasis& basis);
/// Serial reference fill.
StateVector build_state_serial(int n, int q, const SectorBasis& basis);

}  // namespace critchain
