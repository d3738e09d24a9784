#include "critchain/hamiltonian.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "critchain/errors.hpp"

namespace critchain {

namespace {

constexpr std::array<std::pair<ModelKind, std::string_view>, 5> kKindNames{{
    {ModelKind::Exact, "exact"},
    {ModelKind::NN, "nn"},
    {ModelKind::NNN, "nnn"},
    {ModelKind::NNOpt, "nn-opt"},
    {ModelKind::NNNOpt, "nnn-opt"},
}};

Configuration site_bit(int site0) { return Configuration{1} << site0; }

// Bits strictly between two 0-based positions.
Configuration between_mask(int a, int b) {
  const int lo = std::min(a, b), hi = std::max(a, b);
  if (hi - lo < 2) return 0;
  const Configuration below_hi = site_bit(hi) - 1;
  const Configuration upto_lo = (lo >= 63) ? ~Configuration{0} : (site_bit(lo + 1) - 1);
  return below_hi & ~upto_lo;
}

}  // namespace

std::string_view kind_name(ModelKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "unknown";
}

ModelKind parse_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw InvalidModel("unknown model kind '" + std::string(name) +
                     "' (expected exact, nn, nnn, nn-opt or nnn-opt)");
}

bool is_optimized(ModelKind kind) { return kind == ModelKind::NNOpt || kind == ModelKind::NNNOpt; }

int ModelSpec::range() const {
  switch (kind) {
    case ModelKind::NN:
    case ModelKind::NNOpt:
      return 1;
    case ModelKind::NNN:
    case ModelKind::NNNOpt:
      return 2;
    case ModelKind::Exact:
      break;
  }
  return n / 2;
}

bool ModelSpec::couples(int i, int j) const {
  const int d = ring_distance(i, j, n);
  return d != 0 && d <= range();
}

void ModelSpec::validate() const {
  if (q < 2) throw InvalidModel("q must be at least 2, got " + std::to_string(q));
  if (n < 2 || n > kMaxSites) throw InvalidModel("N must be in 2..64, got " + std::to_string(n));
  if (n % q != 0) {
    throw InvalidModel("q=" + std::to_string(q) + " does not divide N=" + std::to_string(n));
  }
  if (!(u > 0.0) || !std::isfinite(u)) throw InvalidModel("U must be positive and finite");
  if (!is_optimized(kind) && u != 1.0) {
    throw InvalidModel("U is fixed to 1 for kind " + std::string(kind_name(kind)));
  }
}

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, ptr);
}

std::string ModelSpec::canonical() const {
  std::ostringstream os;
  os << "q=" << q << " n=" << n << " kind=" << kind_name(kind) << " u=" << format_double(u);
  return os.str();
}

bool operator==(const ModelSpec& a, const ModelSpec& b) {
  return a.q == b.q && a.n == b.n && a.kind == b.kind && a.u == b.u;
}

ModelSpec make_model(int q, int n, ModelKind kind, std::optional<double> u) {
  ModelSpec spec{q, n, kind, u.value_or(1.0)};
  if (is_optimized(kind) && !u) {
    throw InvalidModel("kind " + std::string(kind_name(kind)) + " needs an explicit U");
  }
  spec.validate();
  return spec;
}

double exact_ground_energy(int q, int n) {
  const double qd = q, nd = n;
  return -(qd - 1.0) / (6.0 * qd) * nd * (3.0 * nd + (qd - 8.0));
}

int hop_sign(Configuration c, int i, int j, int q) {
  const int i0 = i - 1, j0 = j - 1;
  if (i0 < 0 || j0 < 0 || i0 >= kMaxSites || j0 >= kMaxSites || i0 == j0) {
    throw IllegalMove("hop needs two distinct sites in 1..64");
  }
  if (!(c & site_bit(j0)) || (c & site_bit(i0))) {
    throw IllegalMove("hop " + std::to_string(j) + "->" + std::to_string(i) +
                      " needs an occupied source and an empty target");
  }
  if (q % 2 == 0) return 1;
  return (popcount(c & between_mask(i0, j0)) % 2 == 0) ? 1 : -1;
}

StateVector matvec(const LinearOperator& op, std::span<const cplx> x) {
  if (x.size() != op.dimension()) {
    throw DimensionMismatch("operator dimension " + std::to_string(op.dimension()) +
                            " vs vector " + std::to_string(x.size()));
  }
  StateVector y(x.size());
  op.apply(x, y);
  return y;
}

// --- row generation -------------------------------------------------------

RowGenerator::RowGenerator(const ModelSpec& spec, const SectorBasis& basis)
    : spec_(spec), basis_(&basis) {
  spec_.validate();
  if (basis.sites() != spec.n || basis.particles() != spec.particles()) {
    throw DimensionMismatch("basis does not match model " + spec.canonical());
  }
  const int n = spec.n;
  const CouplingTable table(spec.q, n);
  hop_by_offset_.assign(static_cast<std::size_t>(n), 0.0);
  for (int d = 1; d < n; ++d) {
    if (!spec.couples(d, 0)) continue;
    hop_by_offset_[static_cast<std::size_t>(d)] = table.at_offset(d).c1;
    if (table.at_offset(d).c1 != cplx{}) offsets_.push_back(d);
    const double dd = spec.u * table.at_offset(d).c2;
    if (dd != 0.0) dd_terms_.emplace_back(d, dd);
  }
  binom_.assign(static_cast<std::size_t>(kMaxSites + 1) * kBinomStride, 0);
  for (int a = 0; a <= kMaxSites; ++a) {
    for (int k = 0; k <= a; ++k) binom_[static_cast<std::size_t>(a) * kBinomStride + static_cast<std::size_t>(k)] = binomial(a, k);
  }
}

double RowGenerator::diagonal(Configuration c) const {
  // Ordered pairs at ring offset d are the overlaps of c with c rotated by d.
  const int n = spec_.n;
  const Configuration mask = n >= 64 ? ~Configuration{0} : (Configuration{1} << n) - 1;
  double sum = 0.0;
  for (const auto& [d, dd] : dd_terms_) {
    const Configuration rotated = ((c << d) | (c >> (n - d))) & mask;
    sum += dd * popcount(c & rotated);
  }
  return sum;
}

std::size_t RowGenerator::max_hops() const {
  return static_cast<std::size_t>(spec_.particles()) * offsets_.size();
}

double RowGenerator::mean_row_entries() const {
  const double n = spec_.n, m = spec_.particles();
  if (n < 2) return 1.0;
  // Each allowed ordered pair hosts a hop with probability m(n-m)/(n(n-1)).
  return 1.0 + n * static_cast<double>(offsets_.size()) * m * (n - m) / (n * (n - 1.0));
}

void RowGenerator::row(std::uint64_t r, std::vector<MatrixEntry>& out) const {
  out.push_back({r, diagonal(basis_->state(r))});
  hops(r, out);
}

void RowGenerator::hops(std::uint64_t r, std::vector<MatrixEntry>& out) const {
  const Configuration a = basis_->state(r);
  const int n = spec_.n;
  const bool fermionic = spec_.q % 2 != 0;

  std::array<int, kMaxSites> pos{};
  int m = 0;
  for (Configuration t = a; t; t &= t - 1) pos[static_cast<std::size_t>(m++)] = __builtin_ctzll(t);

  // Row a, column b = a with the particle at x moved to the empty site y:
  // <a| c1(x,y) d_x^dag d_y |b>.
  for (int t = 0; t < m; ++t) {
    const int x = pos[static_cast<std::size_t>(t)];
    const std::uint64_t base = r - binom(x, t + 1);
    for (const int d : offsets_) {
      const cplx c1 = hop_by_offset_[static_cast<std::size_t>(d)];
      const int y = x >= d ? x - d : x - d + n;
      if (a & site_bit(y)) continue;
      std::uint64_t col = base;
      int jumped = 0;
      if (y > x) {
        int u = t + 1;
        for (; u < m && pos[static_cast<std::size_t>(u)] < y; ++u) {
          const int p = pos[static_cast<std::size_t>(u)];
          col += binom(p, u) - binom(p, u + 1);
        }
        jumped = u - t - 1;
        col += binom(y, t + jumped + 1);
      } else {
        int u = t - 1;
        for (; u >= 0 && pos[static_cast<std::size_t>(u)] > y; --u) {
          const int p = pos[static_cast<std::size_t>(u)];
          col += binom(p, u + 2) - binom(p, u + 1);
        }
        jumped = t - 1 - u;
        col += binom(y, t - jumped + 1);
      }
      const bool negative = fermionic && (jumped % 2 != 0);
      out.push_back({col, negative ? -c1 : c1});
    }
  }
}

// --- sparse storage -------------------------------------------------------

SparseOperator::SparseOperator(std::uint64_t dim, std::vector<std::uint64_t> row_ptr,
                               std::vector<std::uint32_t> cols, std::vector<cplx> vals)
    : dim_(dim), row_ptr_(std::move(row_ptr)), cols_(std::move(cols)), vals_(std::move(vals)) {
  if (row_ptr_.size() != dim_ + 1 || cols_.size() != vals_.size() || row_ptr_.back() != vals_.size()) {
    throw DimensionMismatch("inconsistent CSR arrays");
  }
}

void SparseOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != dim_ || y.size() != dim_) throw DimensionMismatch("CSR apply: size mismatch");
  const std::int64_t n = static_cast<std::int64_t>(dim_);
#pragma omp parallel for schedule(dynamic, 1024)
  for (std::int64_t r = 0; r < n; ++r) {
    cplx acc = 0.0;
    for (std::uint64_t e = row_ptr_[static_cast<std::size_t>(r)]; e < row_ptr_[static_cast<std::size_t>(r) + 1]; ++e) {
      acc += vals_[e] * x[cols_[e]];
    }
    y[static_cast<std::size_t>(r)] = acc;
  }
}

void SparseOperator::apply_serial(std::span<const cplx> x, std::span<cplx> y) const {
  if (x.size() != dim_ || y.size() != dim_) throw DimensionMismatch("CSR apply: size mismatch");
  for (std::uint64_t r = 0; r < dim_; ++r) {
    cplx acc = 0.0;
    for (std::uint64_t e = row_ptr_[r]; e < row_ptr_[r + 1]; ++e) acc += vals_[e] * x[cols_[e]];
    y[r] = acc;
  }
}

std::span<const std::uint32_t> SparseOperator::row_cols(std::uint64_t r) const {
  return {cols_.data() + row_ptr_[r], cols_.data() + row_ptr_[r + 1]};
}

std::span<const cplx> SparseOperator::row_vals(std::uint64_t r) const {
  return {vals_.data() + row_ptr_[r], vals_.data() + row_ptr_[r + 1]};
}

cplx SparseOperator::entry(std::uint64_t r, std::uint64_t c) const {
  if (r >= dim_ || c >= dim_) throw RangeError("entry index outside operator");
  const auto cols = row_cols(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return row_vals(r)[static_cast<std::size_t>(it - cols.begin())];
}

double SparseOperator::hermiticity_defect() const {
  double worst = 0.0;
  for (std::uint64_t r = 0; r < dim_; ++r) {
    const auto cols = row_cols(r);
    const auto vals = row_vals(r);
    for (std::size_t e = 0; e < cols.size(); ++e) {
      worst = std::max(worst, std::abs(vals[e] - std::conj(entry(cols[e], r))));
    }
  }
  return worst;
}

double SparseOperator::max_imag() const {
  double worst = 0.0;
  for (const cplx& v : vals_) worst = std::max(worst, std::abs(v.imag()));
  return worst;
}

// --- assembly -------------------------------------------------------------

namespace {

void sort_and_merge(std::vector<MatrixEntry>& entries) {
  std::sort(entries.begin(), entries.end(),
            [](const MatrixEntry& l, const MatrixEntry& r) { return l.col < r.col; });
  std::size_t out = 0;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (out > 0 && entries[out - 1].col == entries[i].col) {
      entries[out - 1].value += entries[i].value;
    } else {
      entries[out++] = entries[i];
    }
  }
  entries.resize(out);
}

void require_index_width(std::uint64_t dim) {
  if (dim > std::numeric_limits<std::uint32_t>::max()) {
    throw ResourceError("sector too large for 32-bit column indices", static_cast<double>(dim));
  }
}

}  // namespace

SparseOperator build(const ModelSpec& spec, const SectorBasis& basis) {
  const RowGenerator gen(spec, basis);
  const std::uint64_t dim = basis.dimension();
  require_index_width(dim);
  const std::int64_t n = static_cast<std::int64_t>(dim);

  std::vector<std::uint64_t> row_ptr(dim + 1, 0);
#pragma omp parallel
  {
    std::vector<MatrixEntry> scratch;
    scratch.reserve(gen.max_hops() + 1);
#pragma omp for schedule(dynamic, 1024)
    for (std::int64_t r = 0; r < n; ++r) {
      scratch.clear();
      gen.row(static_cast<std::uint64_t>(r), scratch);
      sort_and_merge(scratch);
      row_ptr[static_cast<std::size_t>(r) + 1] = scratch.size();
    }
  }
  for (std::uint64_t r = 0; r < dim; ++r) row_ptr[r + 1] += row_ptr[r];

  std::vector<std::uint32_t> cols(row_ptr.back());
  std::vector<cplx> vals(row_ptr.back());
#pragma omp parallel
  {
    std::vector<MatrixEntry> scratch;
    scratch.reserve(gen.max_hops() + 1);
#pragma omp for schedule(dynamic, 1024)
    for (std::int64_t r = 0; r < n; ++r) {
      scratch.clear();
      gen.row(static_cast<std::uint64_t>(r), scratch);
      sort_and_merge(scratch);
      std::uint64_t e = row_ptr[static_cast<std::size_t>(r)];
      for (const MatrixEntry& me : scratch) {
        cols[e] = static_cast<std::uint32_t>(me.col);
        vals[e] = me.value;
        ++e;
      }
    }
  }
  return SparseOperator(dim, std::move(row_ptr), std::move(cols), std::move(vals));
}

SparseOperator build_serial(const ModelSpec& spec, const SectorBasis& basis) {
  const RowGenerator gen(spec, basis);
  const std::uint64_t dim = basis.dimension();
  require_index_width(dim);
  std::vector<std::uint64_t> row_ptr{0};
  std::vector<std::uint32_t> cols;
  std::vector<cplx> vals;
  std::vector<MatrixEntry> scratch;
  for (std::uint64_t r = 0; r < dim; ++r) {
    scratch.clear();
    gen.row(r, scratch);
    sort_and_merge(scratch);
    for (const MatrixEntry& me : scratch) {
      cols.push_back(static_cast<std::uint32_t>(me.col));
      vals.push_back(me.value);
    }
    row_ptr.push_back(vals.size());
  }
  return SparseOperator(dim, std::move(row_ptr), std::move(cols), std::move(vals));
}

// --- matrix-free ----------------------------------------------------------

MatrixFreeOperator::MatrixFreeOperator(const ModelSpec& spec, const SectorBasis& basis)
    : gen_(spec, basis), diagonal_(basis.dimension()) {
  const std::int64_t n = static_cast<std::int64_t>(basis.dimension());
#pragma omp parallel for schedule(static)
  for (std::int64_t r = 0; r < n; ++r) {
    diagonal_[static_cast<std::size_t>(r)] = gen_.diagonal(basis.state(static_cast<std::uint64_t>(r)));
  }
}

void MatrixFreeOperator::apply(std::span<const cplx> x, std::span<cplx> y) const {
  const std::uint64_t dim = dimension();
  if (x.size() != dim || y.size() != dim) throw DimensionMismatch("matrix-free apply: size mismatch");
  const std::int64_t n = static_cast<std::int64_t>(dim);
#pragma omp parallel
  {
    std::vector<MatrixEntry> scratch;
    scratch.reserve(gen_.max_hops());
#pragma omp for schedule(dynamic, 1024)
    for (std::int64_t r = 0; r < n; ++r) {
      const auto row = static_cast<std::size_t>(r);
      scratch.clear();
      gen_.hops(static_cast<std::uint64_t>(r), scratch);
      cplx acc = diagonal_[row] * x[row];
      for (const MatrixEntry& me : scratch) acc += me.value * x[me.col];
      y[row] = acc;
    }
  }
}

void MatrixFreeOperator::apply_serial(std::span<const cplx> x, std::span<cplx> y) const {
  const std::uint64_t dim = dimension();
  if (x.size() != dim || y.size() != dim) throw DimensionMismatch("matrix-free apply: size mismatch");
  std::vector<MatrixEntry> scratch;
  for (std::uint64_t r = 0; r < dim; ++r) {
    scratch.clear();
    gen_.hops(r, scratch);
    cplx acc = diagonal_[r] * x[r];
    for (const MatrixEntry& me : scratch) acc += me.value * x[me.col];
    y[r] = acc;
  }
}

// --- memory guard ---------------------------------------------------------

MemoryEstimate estimate_memory(const ModelSpec& spec) {
  spec.validate();
  MemoryEstimate est;
  est.dimension = sector_dimension(spec.n, spec.q);
  const double dim = static_cast<double>(est.dimension);
  int pairs = 0;
  for (int d = 1; d < spec.n; ++d) pairs += spec.couples(d, 0) ? 1 : 0;
  const double n = spec.n, m = spec.particles();
  est.entries = dim * (1.0 + n * pairs * m * (n - m) / (n * (n - 1.0)));
  est.sparse_bytes = est.entries * (sizeof(cplx) + sizeof(std::uint32_t)) + (dim + 1) * sizeof(std::uint64_t);
  est.vector_bytes = dim * sizeof(cplx);
  est.basis_bytes = dim * sizeof(Configuration);
  est.matrix_free = est.dimension > kMatrixFreeDimension;
  return est;
}

double required_bytes(const MemoryEstimate& est, int vectors) {
  const double op_bytes = est.matrix_free ? est.dimension * sizeof(double) : est.sparse_bytes;
  return est.basis_bytes + op_bytes + vectors * est.vector_bytes;
}

std::unique_ptr<LinearOperator> make_operator(const ModelSpec& spec, const SectorBasis& basis,
                                              double budget_bytes, int vectors) {
  MemoryEstimate est = estimate_memory(spec);
  if (!est.matrix_free && required_bytes(est, vectors) > budget_bytes) est.matrix_free = true;
  const double need = required_bytes(est, vectors);
  if (need > budget_bytes) {
    std::ostringstream os;
    os << "model " << spec.canonical() << " needs about " << need / 1e9 << " GB (budget "
       << budget_bytes / 1e9 << " GB)";
    throw ResourceError(os.str(), need);
  }
  if (est.matrix_free) return std::make_unique<MatrixFreeOperator>(spec, basis);
  return std::make_unique<SparseOperator>(build(spec, basis));
}

}  // namespace critchain
