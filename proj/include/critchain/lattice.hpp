#pragma once

#include <complex>
#include <vector>

namespace critchain {

using cplx = std::complex<double>;

/// N sites on the unit circle, z_j = exp(2 pi i j / N), j = 1..N.
class LatticeGeometry {
 public:
  explicit LatticeGeometry(int n);

  int size() const { return n_; }
  /// Site position; j is 1-based and taken cyclically.
  cplx z(int j) const;

 private:
  int n_;
  std::vector<cplx> z_;
};

/// Canonical separation d = (i - j) mod N in [0, N).
int cyclic_offset(int i, int j, int n);

/// Distance along the ring, min(d, N - d).
int ring_distance(int i, int j, int n);

/// w_ij = (z_i + z_j)/(z_i - z_j) = -i / tan(pi (i - j) / N).
///
/// Evaluated through the tangent so that the antipodal pair (2d = N) is exactly
/// zero. Throws DomainError for i == j mod N.
cplx pair_weight(int i, int j, int n);

/// Hopping (c1) and density-density (c2) coefficients of one ordered pair.
struct CouplingPair {
  cplx c1;
  double c2 = 0.0;
};

/// c1 = (q-2) w - w^2, c2 = -(q^2 - q) w^2 / 2.
CouplingPair couplings(int q, int i, int j, int n);

/// Couplings for every offset d = 1..N-1 of a (q, N) model.
class CouplingTable {
 public:
  CouplingTable(int q, int n);

  int q() const { return q_; }
  int size() const { return n_; }
  const CouplingPair& at_offset(int d) const { return table_[static_cast<std::size_t>(d)]; }
  const CouplingPair& at(int i, int j) const { return at_offset(cyclic_offset(i, j, n_)); }

 private:
  int q_;
  int n_;
  std::vector<CouplingPair> table_;  // index 0 unused
};

}  // namespace critchain
