#include <doctest.h>

#include <vector>

#include "critchain/basis.hpp"
#include "critchain/errors.hpp"

using namespace critchain;

namespace {

std::vector<Configuration> brute_force(int n, int m) {
  std::vector<Configuration> out;
  for (Configuration c = 0; c < (Configuration{1} << n); ++c) {
    if (popcount(c) == m) out.push_back(c);
  }
  return out;
}

}  // namespace

TEST_CASE("sector dimensions") {
  CHECK(sector_dimension(15, 3) == 3003);
  CHECK(sector_dimension(16, 2) == 12870);
  CHECK(sector_dimension(32, 4) == 10518300);
  CHECK(sector_dimension(24, 2) == 2704156);
  CHECK_THROWS_AS(sector_dimension(16, 3), InvalidModel);
  CHECK_THROWS_AS(sector_dimension(0, 2), InvalidModel);
  CHECK_THROWS_AS(sector_dimension(66, 2), InvalidModel);
}

TEST_CASE("binomial table") {
  CHECK(binomial(0, 0) == 1);
  CHECK(binomial(5, -1) == 0);
  CHECK(binomial(5, 6) == 0);
  CHECK(binomial(64, 32) == 1832624140942590534ULL);
  for (int n = 1; n <= 64; ++n) {
    for (int k = 1; k < n; ++k) REQUIRE(binomial(n, k) == binomial(n - 1, k - 1) + binomial(n - 1, k));
  }
}

TEST_CASE("extreme configurations rank to the ends") {
  const SectorBasis basis(12, 4);
  CHECK(basis.rank(0b1111) == 0);
  CHECK(basis.rank(Configuration{0b1111} << 8) == basis.dimension() - 1);
  CHECK(basis.unrank(0) == 0b1111);
  CHECK(basis.unrank(basis.dimension() - 1) == Configuration{0b1111} << 8);
}

TEST_CASE("rank and unrank are inverse at N = 12, M = 4") {
  const SectorBasis basis(12, 4);
  REQUIRE(basis.dimension() == 495);
  for (std::uint64_t k = 0; k < basis.dimension(); ++k) CHECK(basis.rank(basis.unrank(k)) == k);
}

TEST_CASE("bijective and ordered against brute-force enumeration, N <= 20") {
  for (int q : {2, 3, 4}) {
    for (int n = q; n <= 20; n += q) {
      const SectorBasis basis = SectorBasis::for_model(n, q);
      const std::vector<Configuration> expected = brute_force(n, n / q);
      REQUIRE(basis.dimension() == expected.size());
      REQUIRE(sector_dimension(n, q) == expected.size());
      for (std::uint64_t k = 0; k < expected.size(); ++k) {
        REQUIRE(basis.unrank(k) == expected[k]);
        REQUIRE(basis.rank(expected[k]) == k);
      }
    }
  }
}

TEST_CASE("colex rank matches integer order and Gosper steps") {
  Configuration c = lowest_combination(5);
  for (std::uint64_t k = 0; k < binomial(14, 5); ++k) {
    REQUIRE(colex_rank(c) == k);
    c = next_combination(c);
  }
}

TEST_CASE("error paths") {
  const SectorBasis basis(8, 2);
  CHECK_THROWS_AS(basis.rank(0b111), OutOfSector);
  CHECK_THROWS_AS(basis.rank(0), OutOfSector);
  CHECK_THROWS_AS(basis.rank(Configuration{1} << 8 | 1), OutOfSector);
  CHECK_THROWS_AS(basis.unrank(basis.dimension()), RangeError);
  CHECK_THROWS_AS(SectorBasis::for_model(9, 2), InvalidModel);
}
