#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "critchain/basis.hpp"
#include "critchain/hamiltonian.hpp"
#include "critchain/vector_ops.hpp"

namespace critchain {

struct OptimizeOptions {
  double lo = 0.1;
  double hi = 8.0;
  double step = 0.1;  // coarse grid spacing
  double tol = 1e-3;  // final bracket width
  double lanczos_tol = 1e-10;
  int basis_size = 30;
  /// Adjacent coarse samples differing by more than this flag a level crossing.
  double crossing_jump = 0.1;
  double budget_bytes = 4e9;
};

struct ScanSample {
  double u = 0.0;
  double delta = 0.0;
};

struct ScanResult {
  double best_u = 0.0;
  double best_delta = 0.0;
  std::vector<ScanSample> samples;  // coarse grid first, then refinement
  std::pair<double, double> bracket;
  /// Coarse maximum sat on the scan boundary; the interval should be widened.
  bool boundary = false;
  /// Midpoints of coarse intervals where the overlap jumps.
  std::vector<double> crossings;
};

/// Ground-state fidelity with the Jastrow state as a function of U.
class OverlapObjective {
 public:
  OverlapObjective(int q, int n, ModelKind kind, const OptimizeOptions& opts = {});

  double operator()(double u) const;
  int evaluations() const { return evaluations_; }

 private:
  int q_;
  int n_;
  ModelKind kind_;
  OptimizeOptions opts_;
  SectorBasis basis_;
  StateVector exact_;
  mutable int evaluations_ = 0;
};

/// Coarse scan of U over [lo, hi] followed by golden-section refinement of the
/// best coarse cell down to width tol. Throws InvalidModel unless kind is
/// nn-opt or nnn-opt and 0 < lo < hi.
ScanResult optimize_u(int q, int n, ModelKind kind, const OptimizeOptions& opts = {});

/// Published optimal U for q in {2, 3, 4}; throws InvalidModel otherwise.
double tabulated_optimal_u(int q, ModelKind kind);

}  // namespace critchain
