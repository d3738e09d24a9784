#include <doctest.h>

#include <cmath>
#include <complex>

#include "critchain/analytic.hpp"
#include "critchain/errors.hpp"
#include "critchain/hamiltonian.hpp"
#include "critchain/lattice.hpp"

using namespace critchain;

namespace {

Configuration sites(std::initializer_list<int> occupied) {
  Configuration c = 0;
  for (int j : occupied) c |= Configuration{1} << (j - 1);
  return c;
}

// Straight product over all pairs i < j, including the (z_i - z_j)^(-1)
// factors of singly occupied pairs.
cplx direct_amplitude(Configuration c, int n, int q) {
  const LatticeGeometry lat(n);
  int exponent_sum = 0;
  cplx product = 1.0;
  for (int i = 1; i <= n; ++i) {
    const int ni = static_cast<int>(c >> (i - 1) & 1);
    if (ni) exponent_sum += i - 1;
    for (int j = i + 1; j <= n; ++j) {
      const int nj = static_cast<int>(c >> (j - 1) & 1);
      const int e = q * ni * nj - ni - nj;
      product *= std::pow(lat.z(i) - lat.z(j), e);
    }
  }
  return (exponent_sum % 2 == 0 ? 1.0 : -1.0) * product;
}

cplx to_complex(const LogAmplitude& a) { return std::polar(std::exp(a.logmag), a.phase); }

}  // namespace

TEST_CASE("chi parity") {
  CHECK(chi(sites({1, 3})) == 1);
  CHECK(chi(sites({1, 2})) == -1);
  CHECK(chi(0) == 1);
  CHECK(chi(sites({2, 3, 4})) == 1);
  CHECK(chi(sites({2, 3, 5})) == -1);
}

TEST_CASE("hand-evaluated amplitudes at N = 4, q = 2") {
  const cplx a12 = direct_amplitude(sites({1, 2}), 4, 2);
  CHECK(std::abs(a12 - cplx(0.125, 0.0)) < 1e-14);

  const LogAmplitude l12 = *amplitude(sites({1, 2}), 4, 2);
  CHECK(std::abs(to_complex(l12) - a12) < 1e-14);

  const LogAmplitude l13 = *amplitude(sites({1, 3}), 4, 2);
  CHECK(std::abs(to_complex(l13) - direct_amplitude(sites({1, 3}), 4, 2)) < 1e-14);
  CHECK(std::exp(l13.logmag - l12.logmag) == doctest::Approx(2.0).epsilon(1e-13));
}

TEST_CASE("out-of-sector configurations have no amplitude") {
  const JastrowState psi(12, 3);
  CHECK_FALSE(psi.amplitude(sites({1, 2, 3})).has_value());
  CHECK_FALSE(psi.amplitude(0).has_value());
  CHECK(psi.amplitude(sites({1, 2, 3, 4})).has_value());
  CHECK_THROWS_AS(JastrowState(10, 3), InvalidModel);
}

TEST_CASE("log-space evaluation matches the direct product, N <= 20") {
  for (int q : {2, 3, 4}) {
    for (int n = q; n <= 20; n += q) {
      const SectorBasis basis = SectorBasis::for_model(n, q);
      const JastrowState psi(n, q);
      const std::uint64_t stride = std::max<std::uint64_t>(1, basis.dimension() / 300);
      for (std::uint64_t k = 0; k < basis.dimension(); k += stride) {
        const Configuration c = basis.state(k);
        const LogAmplitude a = *psi.amplitude(c);
        REQUIRE(a.phase > -M_PI);
        REQUIRE(a.phase <= M_PI);
        const cplx direct = direct_amplitude(c, n, q);
        REQUIRE(std::abs(a.logmag - std::log(std::abs(direct))) < 1e-10);
        REQUIRE(std::abs(std::polar(1.0, a.phase) - direct / std::abs(direct)) < 1e-10);
      }
    }
  }
}

TEST_CASE("magnitude invariant under cyclic shifts, N <= 12") {
  for (int q : {2, 3, 4}) {
    for (int n = q; n <= 12; n += q) {
      const SectorBasis basis = SectorBasis::for_model(n, q);
      const JastrowState psi(n, q);
      const Configuration mask = (Configuration{1} << n) - 1;
      for (const Configuration c : basis.states()) {
        const double ref = psi.amplitude(c)->logmag;
        for (int s = 1; s < n; ++s) {
          const Configuration shifted = ((c << s) | (c >> (n - s))) & mask;
          REQUIRE(std::abs(psi.amplitude(shifted)->logmag - ref) < 1e-10);
        }
      }
    }
  }
}

TEST_CASE("normalized state") {
  for (int q : {2, 3, 4}) {
    for (int n : {8, 12, 16}) {
      if (n % q != 0) continue;
      const SectorBasis basis = SectorBasis::for_model(n, q);
      const StateVector psi = build_state(n, q, basis);
      CHECK(std::abs(vec::norm(psi) - 1.0) < 1e-14);
      CHECK(psi.front().real() > 0.0);
      CHECK(std::abs(psi.front().imag()) < 1e-15);

      std::vector<double> density(static_cast<std::size_t>(n), 0.0);
      for (std::uint64_t k = 0; k < basis.dimension(); ++k) {
        const double p = std::norm(psi[k]);
        for (int j = 0; j < n; ++j) {
          if (basis.state(k) >> j & 1) density[static_cast<std::size_t>(j)] += p;
        }
      }
      for (double d : density) CHECK(std::abs(d - 1.0 / q) < 1e-12);

      if (q == 2) {
        double worst = 0.0;
        for (const cplx& x : psi) worst = std::max(worst, std::abs(x.imag()));
        CHECK(worst < 1e-10);
      }
    }
  }
}

TEST_CASE("eigenstate of the long-range Hamiltonian") {
  for (auto [q, n] : {std::pair{2, 12}, {3, 12}, {4, 12}, {2, 16}, {3, 15}, {4, 16}}) {
    CAPTURE(q);
    CAPTURE(n);
    const SectorBasis basis = SectorBasis::for_model(n, q);
    const SparseOperator h = build(make_model(q, n, ModelKind::Exact), basis);
    const StateVector psi = build_state(n, q, basis);
    StateVector r = matvec(h, psi);
    vec::axpy(-exact_ground_energy(q, n), psi, r);
    CHECK(vec::norm(r) < 1e-8);
  }
}

TEST_CASE("parallel and serial fills agree bitwise") {
  const SectorBasis basis = SectorBasis::for_model(15, 3);
  const StateVector a = build_state(15, 3, basis);
  const StateVector b = build_state_serial(15, 3, basis);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) REQUIRE(a[i] == b[i]);
}
