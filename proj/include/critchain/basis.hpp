#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace critchain {

/// Occupation word: bit j-1 is set iff site j is occupied.
using Configuration = std::uint64_t;

constexpr int kMaxSites = 64;

/// binomial(n, k) for 0 <= n <= 64 (zero when k < 0 or k > n).
std::uint64_t binomial(int n, int k);

/// Dimension of the N/q-particle sector, binomial(N, N/q). Throws InvalidModel
/// unless q >= 1 divides N and N <= 64.
std::uint64_t sector_dimension(int n, int q);

/// Colexicographic rank of a configuration among all words with the same
/// popcount. This order coincides with the integer order of the words.
std::uint64_t colex_rank(Configuration c);

/// Next word with the same popcount (Gosper's hack).
Configuration next_combination(Configuration c);

/// Lowest word with m bits set.
inline Configuration lowest_combination(int m) {
  return m >= 64 ? ~Configuration{0} : (Configuration{1} << m) - 1;
}

inline int popcount(Configuration c) { return __builtin_popcountll(c); }

/// Fixed-particle-number sector of an N-site hardcore system.
///
/// Ranks follow the combinatorial number system; the enumerated state list
/// makes unrank a lookup.
class SectorBasis {
 public:
  SectorBasis(int n, int m);
  /// The N/q-particle sector of an (N, q) model.
  static SectorBasis for_model(int n, int q);

  int sites() const { return n_; }
  int particles() const { return m_; }
  std::uint64_t dimension() const { return dim_; }

  /// Throws OutOfSector for wrong popcount or bits beyond site N.
  std::uint64_t rank(Configuration c) const;
  /// Throws RangeError for k >= dimension().
  Configuration unrank(std::uint64_t k) const;
  Configuration state(std::uint64_t k) const { return states_[k]; }
  std::span<const Configuration> states() const { return states_; }

 private:
  int n_;
  int m_;
  std::uint64_t dim_;
  std::vector<Configuration> states_;
};

}  // namespace critchain
