#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "critchain/basis.hpp"
#include "critchain/lattice.hpp"
#include "critchain/vector_ops.hpp"

namespace critchain {

/// The long-range model and its four ring truncations.
enum class ModelKind { Exact, NN, NNN, NNOpt, NNNOpt };

std::string_view kind_name(ModelKind kind);
/// Accepts "exact", "nn", "nnn", "nn-opt", "nnn-opt". Throws InvalidModel.
ModelKind parse_kind(std::string_view name);
bool is_optimized(ModelKind kind);

/// Shortest decimal text that parses back to x.
std::string format_double(double x);

/// (q, N, kind, U): everything needed to assemble one Hamiltonian.
struct ModelSpec {
  int q = 2;
  int n = 2;
  ModelKind kind = ModelKind::Exact;
  /// Scales the density-density sum; must be 1 for non-optimized kinds.
  double u = 1.0;

  int particles() const { return n / q; }
  /// Largest ring distance carrying a coupling.
  int range() const;
  bool couples(int i, int j) const;
  /// Throws InvalidModel.
  void validate() const;
  /// e.g. "q=3 n=15 kind=nnn-opt u=0.7"
  std::string canonical() const;
};

bool operator==(const ModelSpec& a, const ModelSpec& b);

/// Builds and validates a spec. U defaults to 1; optimized kinds require it.
ModelSpec make_model(int q, int n, ModelKind kind, std::optional<double> u = std::nullopt);

/// Ground energy of the long-range model, -(q-1)/(6q) N [3N + q - 8].
double exact_ground_energy(int q, int n);

/// Sign of d_i^dag d_j acting on c (1-based sites): +1 for even q, otherwise
/// (-1)^(particles strictly between i and j in linear order). The string has no
/// periodic wrap. Throws IllegalMove unless j is occupied and i empty.
int hop_sign(Configuration c, int i, int j, int q);

/// y = A x over a sector basis.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;
  virtual std::uint64_t dimension() const = 0;
  /// x and y must not alias.
  virtual void apply(std::span<const cplx> x, std::span<cplx> y) const = 0;
};

StateVector matvec(const LinearOperator& op, std::span<const cplx> x);

struct MatrixEntry {
  std::uint64_t col;
  cplx value;
};

/// Generates the matrix elements of one sector row on demand.
///
/// Column ranks come from an incremental update of the row rank, so a hop
/// costs O(particles jumped over).
class RowGenerator {
 public:
  RowGenerator(const ModelSpec& spec, const SectorBasis& basis);

  const ModelSpec& spec() const { return spec_; }
  const SectorBasis& basis() const { return *basis_; }

  double diagonal(Configuration c) const;
  /// Appends all entries of row r (diagonal first, then hops) to out.
  void row(std::uint64_t r, std::vector<MatrixEntry>& out) const;
  /// Appends only the off-diagonal entries of row r.
  void hops(std::uint64_t r, std::vector<MatrixEntry>& out) const;
  /// Upper bound on off-diagonal entries in any row.
  std::size_t max_hops() const;
  /// Expected entries per row, diagonal included.
  double mean_row_entries() const;

 private:
  std::uint64_t binom(int n, int k) const { return binom_[static_cast<std::size_t>(n) * kBinomStride + static_cast<std::size_t>(k)]; }

  static constexpr std::size_t kBinomStride = kMaxSites + 2;

  ModelSpec spec_;
  const SectorBasis* basis_;
  std::vector<int> offsets_;         // allowed (x - y) mod N
  std::vector<cplx> hop_by_offset_;  // c1
  std::vector<std::pair<int, double>> dd_terms_;  // (offset, U * c2), nonzero only
  std::vector<std::uint64_t> binom_;  // binomial(n, k), k up to n + 1
};

/// Hermitian operator in compressed sparse row form, columns sorted.
class SparseOperator final : public LinearOperator {
 public:
  SparseOperator() = default;
  SparseOperator(std::uint64_t dim, std::vector<std::uint64_t> row_ptr,
                 std::vector<std::uint32_t> cols, std::vector<cplx> vals);

  std::uint64_t dimension() const override { return dim_; }
  std::size_t nnz() const { return vals_.size(); }
  /// OpenMP over rows; each row summed in column order.
  void apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void apply_serial(std::span<const cplx> x, std::span<cplx> y) const;

  cplx entry(std::uint64_t r, std::uint64_t c) const;
  std::span<const std::uint32_t> row_cols(std::uint64_t r) const;
  std::span<const cplx> row_vals(std::uint64_t r) const;
  /// max |A_ab - conj(A_ba)| over stored entries.
  double hermiticity_defect() const;
  /// max |Im A| over all stored entries.
  double max_imag() const;

 private:
  std::uint64_t dim_ = 0;
  std::vector<std::uint64_t> row_ptr_{0};
  std::vector<std::uint32_t> cols_;
  std::vector<cplx> vals_;
};

/// Regenerates rows on every application; memory is one basis table.
class MatrixFreeOperator final : public LinearOperator {
 public:
  /// Stores the diagonal (one double per basis state).
  MatrixFreeOperator(const ModelSpec& spec, const SectorBasis& basis);

  std::uint64_t dimension() const override { return gen_.basis().dimension(); }
  void apply(std::span<const cplx> x, std::span<cplx> y) const override;
  void apply_serial(std::span<const cplx> x, std::span<cplx> y) const;

 private:
  RowGenerator gen_;
  std::vector<double> diagonal_;
};

/// Assembles H restricted to the sector; rows filled in parallel.
SparseOperator build(const ModelSpec& spec, const SectorBasis& basis);
/// Single-threaded reference assembly.
SparseOperator build_serial(const ModelSpec& spec, const SectorBasis& basis);

struct MemoryEstimate {
  std::uint64_t dimension = 0;
  double entries = 0.0;       // expected stored entries
  double sparse_bytes = 0.0;  // CSR storage
  double vector_bytes = 0.0;  // one state vector
  double basis_bytes = 0.0;
  bool matrix_free = false;
};

/// Sectors above this dimension are applied matrix-free.
constexpr std::uint64_t kMatrixFreeDimension = 2'000'000;

/// Estimates storage; `vectors` is the number of work vectors the caller needs.
MemoryEstimate estimate_memory(const ModelSpec& spec);
double required_bytes(const MemoryEstimate& est, int vectors);

/// Picks CSR or matrix-free storage. Throws ResourceError with the estimate
/// when `vectors` work vectors plus the operator exceed budget_bytes.
std::unique_ptr<LinearOperator> make_operator(const ModelSpec& spec, const SectorBasis& basis,
                                              double budget_bytes, int vectors = 40);

}  // namespace critchain
