#include "critchain/basis.hpp"

#include <array>
#include <string>

#include "critchain/errors.hpp"

namespace critchain {

namespace {

using BinomialTable = std::array<std::array<std::uint64_t, kMaxSites + 1>, kMaxSites + 1>;

const BinomialTable& binomial_table() {
  static const BinomialTable table = [] {
    BinomialTable t{};
    for (int n = 0; n <= kMaxSites; ++n) {
      t[n][0] = 1;
      for (int k = 1; k <= n; ++k) t[n][k] = t[n - 1][k - 1] + (k < n ? t[n - 1][k] : 0);
    }
    return t;
  }();
  return table;
}

// Enumerating more states than this would not fit in memory anyway.
constexpr std::uint64_t kMaxEnumerated = std::uint64_t{1} << 31;

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (n < 0 || n > kMaxSites || k < 0 || k > n) return 0;
  return binomial_table()[n][k];
}

std::uint64_t sector_dimension(int n, int q) {
  if (n < 1 || n > kMaxSites) {
    throw InvalidModel("number of sites must be in 1..64, got " + std::to_string(n));
  }
  if (q < 1 || n % q != 0) {
    throw InvalidModel("q=" + std::to_string(q) + " does not divide N=" + std::to_string(n));
  }
  return binomial(n, n / q);
}

std::uint64_t colex_rank(Configuration c) {
  std::uint64_t r = 0;
  int ordinal = 1;
  while (c) {
    const int pos = __builtin_ctzll(c);
    r += binomial(pos, ordinal++);
    c &= c - 1;
  }
  return r;
}

Configuration next_combination(Configuration c) {
  const Configuration lowest = c & (~c + 1);
  const Configuration ripple = c + lowest;
  return ripple | (((c ^ ripple) >> 2) / lowest);
}

SectorBasis::SectorBasis(int n, int m) : n_(n), m_(m) {
  if (n < 1 || n > kMaxSites) {
    throw InvalidModel("number of sites must be in 1..64, got " + std::to_string(n));
  }
  if (m < 0 || m > n) {
    throw InvalidModel("particle number " + std::to_string(m) + " outside 0.." + std::to_string(n));
  }
  dim_ = binomial(n, m);
  if (dim_ > kMaxEnumerated) {
    throw ResourceError("sector dimension " + std::to_string(dim_) + " too large to enumerate",
                        static_cast<double>(dim_) * sizeof(Configuration));
  }
  states_.resize(dim_);
  Configuration c = lowest_combination(m);
  for (std::uint64_t k = 0; k < dim_; ++k) {
    states_[k] = c;
    if (m > 0 && k + 1 < dim_) c = next_combination(c);
  }
}

SectorBasis SectorBasis::for_model(int n, int q) {
  sector_dimension(n, q);
  return SectorBasis(n, n / q);
}

std::uint64_t SectorBasis::rank(Configuration c) const {
  const bool outside = n_ < 64 && (c >> n_) != 0;
  if (outside || popcount(c) != m_) {
    throw OutOfSector("configuration has " + std::to_string(popcount(c)) +
                      " particles, sector holds " + std::to_string(m_));
  }
  return colex_rank(c);
}

Configuration SectorBasis::unrank(std::uint64_t k) const {
  if (k >= dim_) {
    throw RangeError("index " + std::to_string(k) + " outside sector of dimension " +
                     std::to_string(dim_));
  }
  return states_[k];
}

}  // namespace critchain
