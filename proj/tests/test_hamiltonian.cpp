#include <doctest.h>

#include <cmath>
#include <random>

#include "critchain/analytic.hpp"
#include "critchain/dense_oracle.hpp"
#include "critchain/eigensolve.hpp"
#include "critchain/errors.hpp"
#include "critchain/hamiltonian.hpp"

using namespace critchain;

namespace {

constexpr ModelKind kAllKinds[] = {ModelKind::Exact, ModelKind::NN, ModelKind::NNN, ModelKind::NNOpt,
                                   ModelKind::NNNOpt};

ModelSpec spec_for(int q, int n, ModelKind kind) {
  return make_model(q, n, kind, is_optimized(kind) ? std::optional<double>(1.37) : std::nullopt);
}

Configuration sites(std::initializer_list<int> occupied) {
  Configuration c = 0;
  for (int j : occupied) c |= Configuration{1} << (j - 1);
  return c;
}

StateVector random_state(std::uint64_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  StateVector v(dim);
  for (cplx& x : v) x = {g(rng), g(rng)};
  return v;
}

double max_abs_diff(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("kind names round trip") {
  for (ModelKind kind : kAllKinds) CHECK(parse_kind(kind_name(kind)) == kind);
  CHECK_THROWS_AS(parse_kind("nnnn"), InvalidModel);
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(make_model(3, 16, ModelKind::Exact), InvalidModel);
  CHECK_THROWS_AS(make_model(1, 16, ModelKind::Exact), InvalidModel);
  CHECK_THROWS_AS(make_model(2, 16, ModelKind::NNOpt), InvalidModel);
  CHECK_THROWS_AS(make_model(2, 16, ModelKind::NN, 2.0), InvalidModel);
  CHECK_THROWS_AS(make_model(2, 16, ModelKind::NNOpt, -1.0), InvalidModel);
  CHECK(make_model(2, 16, ModelKind::NN, 1.0).u == 1.0);
  CHECK(make_model(3, 15, ModelKind::NNNOpt, 0.7).canonical() == "q=3 n=15 kind=nnn-opt u=0.7");
}

TEST_CASE("hop signs") {
  SUBCASE("even q never picks up a sign") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 200; ++trial) {
      const Configuration c = rng() & 0xffff;
      for (int i = 1; i <= 16; ++i) {
        for (int j = 1; j <= 16; ++j) {
          const bool legal = i != j && (c >> (j - 1) & 1) && !(c >> (i - 1) & 1);
          if (legal) {
            REQUIRE(hop_sign(c, i, j, 2) == 1);
            REQUIRE(hop_sign(c, i, j, 4) == 1);
          }
        }
      }
    }
  }
  SUBCASE("odd q counts particles strictly between") {
    CHECK(hop_sign(sites({2, 3, 5}), 1, 5, 3) == 1);
    CHECK(hop_sign(sites({2, 5}), 1, 5, 3) == -1);
    CHECK(hop_sign(sites({2, 5}), 6, 5, 3) == 1);
    CHECK(hop_sign(sites({1, 3, 6}), 5, 1, 3) == -1);
  }
  SUBCASE("illegal moves") {
    CHECK_THROWS_AS(hop_sign(sites({2, 5}), 2, 5, 3), IllegalMove);
    CHECK_THROWS_AS(hop_sign(sites({2, 5}), 1, 4, 3), IllegalMove);
    CHECK_THROWS_AS(hop_sign(sites({2, 5}), 5, 5, 3), IllegalMove);
  }
}

TEST_CASE("odd-q hop signs agree with the Kronecker operators, N <= 8") {
  for (int n : {5, 6, 7, 8}) {
    const int q = 3;
    std::vector<dense_oracle::SparseMatrix> d;
    for (int j = 1; j <= n; ++j) d.push_back(dense_oracle::annihilator(j, n, q));
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        if (i == j) continue;
        const dense_oracle::SparseMatrix hop = d[static_cast<std::size_t>(i - 1)].adjoint() * d[static_cast<std::size_t>(j - 1)];
        int checked = 0;
        for (int row = 0; row < hop.outerSize(); ++row) {
          for (dense_oracle::SparseMatrix::InnerIterator it(hop, row); it; ++it) {
            if (std::abs(it.value()) < 0.5) continue;
            const Configuration from = dense_oracle::configuration_of(static_cast<std::uint64_t>(it.col()), n);
            const Configuration to = dense_oracle::configuration_of(static_cast<std::uint64_t>(row), n);
            REQUIRE(to == (from ^ (Configuration{1} << (j - 1)) ^ (Configuration{1} << (i - 1))));
            REQUIRE(it.value().real() == hop_sign(from, i, j, q));
            ++checked;
          }
        }
        CHECK(checked == 1 << (n - 2));
      }
    }
  }
}

TEST_CASE("number operator from the Kronecker annihilators") {
  for (int q : {2, 3}) {
    const int n = 6;
    for (int j = 1; j <= n; ++j) {
      const Eigen::MatrixXcd nj(dense_oracle::number_operator(j, n, q));
      for (std::uint64_t t = 0; t < (1u << n); ++t) {
        const Configuration c = dense_oracle::configuration_of(t, n);
        REQUIRE(dense_oracle::tensor_index_of(c, n) == t);
        for (std::uint64_t s = 0; s < (1u << n); ++s) {
          const double expected = s == t ? static_cast<double>(c >> (j - 1) & 1) : 0.0;
          REQUIRE(std::abs(nj(static_cast<Eigen::Index>(s), static_cast<Eigen::Index>(t)) - expected) < 1e-15);
        }
      }
    }
  }
}

TEST_CASE("sector assembly equals the Kronecker construction, N in {6, 8}") {
  for (int q : {2, 3, 4}) {
    for (int n : {6, 8}) {
      if (n % q != 0) continue;
      for (ModelKind kind : kAllKinds) {
        CAPTURE(q);
        CAPTURE(n);
        CAPTURE(kind_name(kind));
        const ModelSpec spec = spec_for(q, n, kind);
        const SectorBasis basis = SectorBasis::for_model(n, q);
        const Eigen::MatrixXcd oracle = dense_oracle::build_dense(spec);
        REQUIRE(oracle.rows() == static_cast<Eigen::Index>(basis.dimension()));
        CHECK(max_abs_diff(to_dense(build(spec, basis)), oracle) < 1e-12);
      }
    }
  }
  CHECK_THROWS_AS(dense_oracle::full_space_hamiltonian(make_model(3, 15, ModelKind::NN)), ResourceError);
}

TEST_CASE("assembled operator structure") {
  for (int q : {2, 3, 4}) {
    const int n = 12;
    const SectorBasis basis = SectorBasis::for_model(n, q);
    for (ModelKind kind : kAllKinds) {
      const SparseOperator h = build(spec_for(q, n, kind), basis);
      CHECK(h.hermiticity_defect() < 1e-12);
      if (q == 2) CHECK(h.max_imag() == 0.0);
      for (std::uint64_t r = 0; r < basis.dimension(); ++r) {
        const auto cols = h.row_cols(r);
        for (std::size_t e = 0; e < cols.size(); ++e) {
          if (e > 0) REQUIRE(cols[e - 1] < cols[e]);
          REQUIRE(popcount(basis.state(cols[e])) == n / q);
        }
        REQUIRE(h.entry(r, r).imag() == 0.0);
      }
    }
  }
}

TEST_CASE("parallel, serial and matrix-free application agree") {
  for (int q : {2, 3}) {
    const int n = 12;
    const SectorBasis basis = SectorBasis::for_model(n, q);
    for (ModelKind kind : {ModelKind::Exact, ModelKind::NNNOpt}) {
      const ModelSpec spec = spec_for(q, n, kind);
      const SparseOperator a = build(spec, basis);
      const SparseOperator b = build_serial(spec, basis);
      REQUIRE(a.nnz() == b.nnz());
      for (std::uint64_t r = 0; r < basis.dimension(); ++r) {
        const auto ca = a.row_cols(r), cb = b.row_cols(r);
        const auto va = a.row_vals(r), vb = b.row_vals(r);
        REQUIRE(std::equal(ca.begin(), ca.end(), cb.begin(), cb.end()));
        REQUIRE(std::equal(va.begin(), va.end(), vb.begin(), vb.end()));
      }

      const MatrixFreeOperator mf(spec, basis);
      const StateVector x = random_state(basis.dimension(), 7);
      StateVector y1(x.size()), y2(x.size()), y3(x.size()), y4(x.size());
      a.apply(x, y1);
      a.apply_serial(x, y2);
      mf.apply(x, y3);
      mf.apply_serial(x, y4);
      for (std::size_t i = 0; i < x.size(); ++i) {
        REQUIRE(y1[i] == y2[i]);
        REQUIRE(std::abs(y1[i] - y3[i]) < 1e-12);
        REQUIRE(y3[i] == y4[i]);
      }
    }
  }
}

TEST_CASE("matvec basics") {
  const SectorBasis basis = SectorBasis::for_model(12, 3);
  const SparseOperator h = build(make_model(3, 12, ModelKind::Exact), basis);
  const StateVector zero(basis.dimension(), 0.0);
  for (const cplx& y : matvec(h, zero)) CHECK(y == cplx(0.0, 0.0));

  const StateVector v = random_state(basis.dimension(), 11);
  const cplx form = vec::dot(v, matvec(h, v));
  CHECK(std::abs(form.imag()) < 1e-10 * std::abs(form.real()));

  StateVector bad(3), out(3);
  CHECK_THROWS_AS(h.apply(bad, out), DimensionMismatch);
}

TEST_CASE("translation by one site is a symmetry") {
  // T c_j T^-1 = c_{j+1}; moving the particle on site N to site 1 passes the
  // other M - 1 particles, which costs a sign for odd q.
  for (int q : {2, 3, 4}) {
    const int n = 12;
    const int m = n / q;
    const SectorBasis basis = SectorBasis::for_model(n, q);
    const std::uint64_t dim = basis.dimension();
    std::vector<std::uint64_t> target(dim);
    std::vector<double> sign(dim);
    for (std::uint64_t k = 0; k < dim; ++k) {
      const Configuration c = basis.state(k);
      const Configuration top = c >> (n - 1) & 1;
      const Configuration shifted = ((c << 1) | top) & ((Configuration{1} << n) - 1);
      target[k] = basis.rank(shifted);
      sign[k] = (q % 2 == 1 && top && (m - 1) % 2 == 1) ? -1.0 : 1.0;
    }
    for (ModelKind kind : kAllKinds) {
      CAPTURE(q);
      CAPTURE(kind_name(kind));
      const Eigen::MatrixXcd h = to_dense(build(spec_for(q, n, kind), basis));
      Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim));
      for (std::uint64_t k = 0; k < dim; ++k) t(static_cast<Eigen::Index>(target[k]), static_cast<Eigen::Index>(k)) = sign[k];
      CHECK(max_abs_diff(t * h * t.adjoint(), h) < 1e-11);
    }
  }
}

TEST_CASE("exact-kind ground energy, all q | N with 4 <= N <= 18") {
  CHECK(exact_ground_energy(2, 16) == doctest::Approx(-56.0));
  CHECK(exact_ground_energy(3, 15) == doctest::Approx(-200.0 / 3.0));
  for (int q : {2, 3, 4}) {
    for (int n = 4; n <= 18; ++n) {
      if (n % q != 0) continue;
      CAPTURE(q);
      CAPTURE(n);
      const SectorBasis basis = SectorBasis::for_model(n, q);
      const SparseOperator h = build(make_model(q, n, ModelKind::Exact), basis);
      const double e0 = exact_ground_energy(q, n);
      double lowest = 0.0;
      if (basis.dimension() <= 400) {
        lowest = dense_all(to_dense(h))(0);
      } else {
        LanczosOptions opts;
        opts.k = 1;
        lowest = lowest_k(h, opts).energies.front();
      }
      CHECK(std::abs(lowest - e0) < 1e-8 * std::abs(e0));
    }
  }
}

TEST_CASE("memory estimate and operator selection") {
  const ModelSpec big = make_model(4, 32, ModelKind::Exact);
  const MemoryEstimate est = estimate_memory(big);
  CHECK(est.dimension == 10518300);
  CHECK(est.matrix_free);
  CHECK(est.vector_bytes == doctest::Approx(10518300.0 * 16.0));

  const SectorBasis basis = SectorBasis::for_model(12, 3);
  const ModelSpec small = make_model(3, 12, ModelKind::NN);
  CHECK(dynamic_cast<SparseOperator*>(make_operator(small, basis, 1e9).get()) != nullptr);
  try {
    make_operator(small, basis, 1000.0);
    FAIL("expected ResourceError");
  } catch (const ResourceError& e) {
    CHECK(e.required_bytes() > 1000.0);
  }
}
