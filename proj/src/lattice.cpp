#include "critchain/lattice.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "critchain/errors.hpp"

namespace critchain {

LatticeGeometry::LatticeGeometry(int n) : n_(n) {
  if (n < 1) throw InvalidModel("lattice needs at least one site, got " + std::to_string(n));
  z_.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    const double angle = 2.0 * std::numbers::pi * j / n;
    z_.emplace_back(std::cos(angle), std::sin(angle));
  }
}

cplx LatticeGeometry::z(int j) const {
  const int idx = ((j - 1) % n_ + n_) % n_;
  return z_[static_cast<std::size_t>(idx)];
}

int cyclic_offset(int i, int j, int n) { return ((i - j) % n + n) % n; }

int ring_distance(int i, int j, int n) {
  const int d = cyclic_offset(i, j, n);
  return std::min(d, n - d);
}

cplx pair_weight(int i, int j, int n) {
  const int d = cyclic_offset(i, j, n);
  if (d == 0) {
    throw DomainError("pair weight undefined for coincident sites " + std::to_string(i) + ", " +
                      std::to_string(j) + " (N=" + std::to_string(n) + ")");
  }
  if (2 * d == n) return {0.0, 0.0};
  if (2 * d > n) return {0.0, 1.0 / std::tan(std::numbers::pi * (n - d) / n)};
  return {0.0, -1.0 / std::tan(std::numbers::pi * d / n)};
}

CouplingPair couplings(int q, int i, int j, int n) {
  const cplx w = pair_weight(i, j, n);
  const cplx w2 = w * w;
  CouplingPair c;
  c.c1 = static_cast<double>(q - 2) * w - w2;
  // w is purely imaginary, so w^2 is real.
  c.c2 = -0.5 * static_cast<double>(q * q - q) * w2.real();
  return c;
}

CouplingTable::CouplingTable(int q, int n) : q_(q), n_(n), table_(static_cast<std::size_t>(n)) {
  for (int d = 1; d < n; ++d) table_[static_cast<std::size_t>(d)] = couplings(q, d, 0, n);
}

}  // namespace critchain
