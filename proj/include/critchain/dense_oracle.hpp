#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "critchain/basis.hpp"
#include "critchain/hamiltonian.hpp"

namespace critchain {

/// Literal tensor-product construction of the Hamiltonians on the full 2^N
/// space, used as the sign-convention oracle for the sector assembly.
///
/// Local basis per site is (occupied, empty); site 1 is the leftmost
/// Kronecker factor.
namespace dense_oracle {

using SparseMatrix = Eigen::SparseMatrix<cplx, Eigen::RowMajor>;

constexpr int kMaxOracleSites = 14;

/// d_j = 1 x ... x 1 x [[0,0],[1,0]] x Z x ... x Z with Z = diag((-1)^q, 1).
SparseMatrix annihilator(int j, int n, int q);
/// n_j as a full-space operator, d_j^dag d_j.
SparseMatrix number_operator(int j, int n, int q);
/// Full-space Hamiltonian. Throws ResourceError for N > 14.
SparseMatrix full_space_hamiltonian(const ModelSpec& spec);

/// Occupation word of a tensor-product basis index.
Configuration configuration_of(std::uint64_t tensor_index, int n);
std::uint64_t tensor_index_of(Configuration c, int n);

/// Restricts a full-space operator to a sector, in sector-basis order.
Eigen::MatrixXcd project(const SparseMatrix& full, const SectorBasis& basis);

/// Sector matrix of the spec built through the full-space products.
Eigen::MatrixXcd build_dense(const ModelSpec& spec);

}  // namespace dense_oracle

/// Sector matrix copied out of a sparse operator (D <= 4000).
Eigen::MatrixXcd to_dense(const SparseOperator& op);

}  // namespace critchain
