#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "critchain/hamiltonian.hpp"
#include "critchain/vector_ops.hpp"

namespace critchain {

struct LanczosOptions {
  int k = 8;
  /// Bound on ||H v - E v|| for every returned pair.
  double tol = 1e-10;
  std::uint64_t seed = 1;
  /// Krylov basis size per cycle (capped by the sector dimension).
  int basis_size = 30;
  /// Ritz vectors kept at a thick restart; 0 picks midway between the wanted count and the basis size.
  int keep = 0;
  int max_restarts = 2000;
};

struct EigenResult {
  std::vector<double> energies;  // ascending
  std::vector<StateVector> vectors;
  std::vector<double> residuals;
  int iterations = 0;  // operator applications
  /// Lowest Ritz value after every restart while the ground state converged.
  std::vector<double> ground_ritz_history;

  std::size_t size() const { return energies.size(); }
  /// E_1 - E_0, or 0 when fewer than two levels were computed.
  double gap() const { return energies.size() > 1 ? energies[1] - energies[0] : 0.0; }
};

/// Lowest k eigenpairs of a Hermitian operator.
///
/// Thick-restart Lanczos with full reorthogonalization, run once per level on
/// the complement of the already converged vectors; a final Rayleigh-Ritz over
/// all converged vectors sorts and polishes them. Degenerate levels come back
/// as an arbitrary orthonormal basis of their eigenspace. Deterministic for a
/// given seed. Throws ConvergenceError carrying the best residuals.
EigenResult lowest_k(const LinearOperator& op, const LanczosOptions& opts);

/// Seed derived from the model's canonical text.
std::uint64_t default_seed(const ModelSpec& spec);

constexpr Eigen::Index kMaxDenseDimension = 4000;

/// Full spectrum (ascending) of a dense Hermitian matrix, D <= 4000.
Eigen::VectorXd dense_all(const Eigen::MatrixXcd& h);

struct DenseEigen {
  Eigen::VectorXd values;
  Eigen::MatrixXcd vectors;  // columns
};
DenseEigen dense_decompose(const Eigen::MatrixXcd& h);

}  // namespace critchain
