#include "critchain/dense_oracle.hpp"

#include <unsupported/Eigen/KroneckerProduct>

#include "critchain/errors.hpp"

namespace critchain {

namespace dense_oracle {

namespace {

SparseMatrix two_by_two(cplx a00, cplx a01, cplx a10, cplx a11) {
  SparseMatrix m(2, 2);
  std::vector<Eigen::Triplet<cplx>> t;
  if (a00 != cplx{}) t.emplace_back(0, 0, a00);
  if (a01 != cplx{}) t.emplace_back(0, 1, a01);
  if (a10 != cplx{}) t.emplace_back(1, 0, a10);
  if (a11 != cplx{}) t.emplace_back(1, 1, a11);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

void require_oracle_size(int n) {
  if (n < 1 || n > kMaxOracleSites) {
    throw ResourceError("dense oracle supports N <= 14, got N=" + std::to_string(n),
                        std::ldexp(16.0, 2 * n));
  }
}

}  // namespace

SparseMatrix annihilator(int j, int n, int q) {
  require_oracle_size(n);
  if (j < 1 || j > n) throw RangeError("site " + std::to_string(j) + " outside 1..N");
  const SparseMatrix identity = two_by_two(1.0, 0.0, 0.0, 1.0);
  const SparseMatrix lower = two_by_two(0.0, 0.0, 1.0, 0.0);
  const SparseMatrix string = two_by_two(q % 2 == 0 ? 1.0 : -1.0, 0.0, 0.0, 1.0);

  SparseMatrix result = (j == 1) ? lower : identity;
  for (int site = 2; site <= n; ++site) {
    const SparseMatrix& factor = site < j ? identity : (site == j ? lower : string);
    SparseMatrix next = Eigen::kroneckerProduct(result, factor).eval();
    result = std::move(next);
  }
  return result;
}

SparseMatrix number_operator(int j, int n, int q) {
  const SparseMatrix d = annihilator(j, n, q);
  return SparseMatrix(d.adjoint()) * d;
}

SparseMatrix full_space_hamiltonian(const ModelSpec& spec) {
  spec.validate();
  const int n = spec.n;
  require_oracle_size(n);
  std::vector<SparseMatrix> d;
  std::vector<SparseMatrix> d_dag;
  d.reserve(static_cast<std::size_t>(n));
  for (int j = 1; j <= n; ++j) {
    d.push_back(annihilator(j, n, spec.q));
    d_dag.emplace_back(d.back().adjoint());
  }
  std::vector<SparseMatrix> number;
  for (int j = 0; j < n; ++j) number.push_back(d_dag[static_cast<std::size_t>(j)] * d[static_cast<std::size_t>(j)]);

  const Eigen::Index dim = Eigen::Index{1} << n;
  SparseMatrix h(dim, dim);
  for (int i = 1; i <= n; ++i) {
    for (int j = 1; j <= n; ++j) {
      if (i == j || !spec.couples(i, j)) continue;
      const CouplingPair c = couplings(spec.q, i, j, n);
      const auto si = static_cast<std::size_t>(i - 1), sj = static_cast<std::size_t>(j - 1);
      SparseMatrix hop = d_dag[si] * d[sj];
      SparseMatrix dd = number[si] * number[sj];
      h += c.c1 * hop;
      h += cplx(spec.u * c.c2) * dd;
    }
  }
  h.prune(cplx(0.0));
  return h;
}

Configuration configuration_of(std::uint64_t tensor_index, int n) {
  Configuration c = 0;
  for (int j = 1; j <= n; ++j) {
    // Site j is Kronecker factor j; local index 0 means occupied.
    const bool occupied = ((tensor_index >> (n - j)) & 1u) == 0;
    if (occupied) c |= Configuration{1} << (j - 1);
  }
  return c;
}

std::uint64_t tensor_index_of(Configuration c, int n) {
  std::uint64_t t = 0;
  for (int j = 1; j <= n; ++j) {
    const bool occupied = (c >> (j - 1)) & 1u;
    if (!occupied) t |= std::uint64_t{1} << (n - j);
  }
  return t;
}

Eigen::MatrixXcd project(const SparseMatrix& full, const SectorBasis& basis) {
  const int n = basis.sites();
  if (full.rows() != (Eigen::Index{1} << n)) throw DimensionMismatch("full-space size mismatch");
  const auto dim = static_cast<Eigen::Index>(basis.dimension());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    const auto row = static_cast<Eigen::Index>(tensor_index_of(basis.state(static_cast<std::uint64_t>(a)), n));
    for (SparseMatrix::InnerIterator it(full, row); it; ++it) {
      const Configuration cb = configuration_of(static_cast<std::uint64_t>(it.col()), n);
      if (popcount(cb) != basis.particles()) continue;
      out(a, static_cast<Eigen::Index>(basis.rank(cb))) = it.value();
    }
  }
  return out;
}

Eigen::MatrixXcd build_dense(const ModelSpec& spec) {
  const SectorBasis basis = SectorBasis::for_model(spec.n, spec.q);
  return project(full_space_hamiltonian(spec), basis);
}

}  // namespace dense_oracle

Eigen::MatrixXcd to_dense(const SparseOperator& op) {
  constexpr std::uint64_t kMaxDense = 4000;
  if (op.dimension() > kMaxDense) {
    throw ResourceError("dense copy limited to D <= 4000", static_cast<double>(op.dimension()) *
                                                               static_cast<double>(op.dimension()) * 16.0);
  }
  const auto dim = static_cast<Eigen::Index>(op.dimension());
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) {
    const auto cols = op.row_cols(static_cast<std::uint64_t>(r));
    const auto vals = op.row_vals(static_cast<std::uint64_t>(r));
    for (std::size_t e = 0; e < cols.size(); ++e) out(r, cols[e]) = vals[e];
  }
  return out;
}

}  // namespace critchain
