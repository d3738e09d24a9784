#include "critchain/eigensolve.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "critchain/errors.hpp"
#include "critchain/fnv.hpp"

namespace critchain {

namespace {

using Basis = std::vector<StateVector>;

StateVector random_vector(std::uint64_t dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-1.0, 1.0);
  StateVector v(dim);
  for (cplx& x : v) x = {dist(rng), dist(rng)};
  return v;
}

// Classical Gram-Schmidt against `locked` and the first `count` vectors of
// `basis`, repeated once when the first pass cancels most of the norm.
// Returns the accumulated coefficients on `basis`.
std::vector<cplx> orthogonalize(StateVector& w, const Basis& locked, const Basis& basis, int count) {
  std::vector<const StateVector*> block;
  block.reserve(locked.size() + static_cast<std::size_t>(count));
  for (const StateVector& l : locked) block.push_back(&l);
  for (int i = 0; i < count; ++i) block.push_back(&basis[static_cast<std::size_t>(i)]);
  std::vector<cplx> coef(static_cast<std::size_t>(count), 0.0);
  if (block.empty()) return coef;
  double before = vec::norm(w);
  for (int pass = 0; pass < 2; ++pass) {
    const std::vector<cplx> h = vec::dots(block, w);
    vec::subtract(block, h, w);
    for (int i = 0; i < count; ++i) coef[static_cast<std::size_t>(i)] += h[locked.size() + static_cast<std::size_t>(i)];
    const double after = vec::norm(w);
    if (after > 0.7071 * before) break;
    before = after;
  }
  return coef;
}

// Random unit vector orthogonal to everything seen so far; empty if the
// complement is numerically trivial.
bool fresh_direction(StateVector& out, std::uint64_t dim, const Basis& locked, const Basis& basis,
                     int count, std::mt19937_64& rng) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    out = random_vector(dim, rng);
    const double before = vec::norm(out);
    orthogonalize(out, locked, basis, count);
    if (vec::norm(out) > 1e-8 * before) {
      vec::normalize(out);
      return true;
    }
  }
  return false;
}

// vectors[0..cols) <- vectors[0..rows) * coeffs(:, 0..cols), row by row in place.
void rotate_in_place(Basis& vectors, const Eigen::MatrixXcd& coeffs, int cols) {
  const int rows = static_cast<int>(coeffs.rows());
  const std::int64_t dim = static_cast<std::int64_t>(vectors.front().size());
#pragma omp parallel
  {
    std::vector<cplx> in(static_cast<std::size_t>(rows)), out(static_cast<std::size_t>(cols));
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < dim; ++i) {
      const auto ii = static_cast<std::size_t>(i);
      for (int j = 0; j < rows; ++j) in[static_cast<std::size_t>(j)] = vectors[static_cast<std::size_t>(j)][ii];
      for (int l = 0; l < cols; ++l) {
        cplx acc = 0.0;
        for (int j = 0; j < rows; ++j) acc += in[static_cast<std::size_t>(j)] * coeffs(j, l);
        out[static_cast<std::size_t>(l)] = acc;
      }
      for (int l = 0; l < cols; ++l) vectors[static_cast<std::size_t>(l)][ii] = out[static_cast<std::size_t>(l)];
    }
  }
}

struct LevelBatch {
  std::vector<double> values;
  Basis vectors;
  StateVector next_guess;  // lowest unlocked Ritz vector, seeds the following run
};

// Lowest eigenpairs of H restricted to the orthogonal complement of `locked`.
// Returns between 1 and `want` converged pairs, consecutive from the bottom of
// the Krylov spectrum.
LevelBatch lowest_in_complement(const LinearOperator& op, const Basis& locked, StateVector start, int want,
                                const LanczosOptions& opts, std::mt19937_64& rng, int& matvecs,
                                std::vector<double>* history) {
  const std::uint64_t dim = op.dimension();
  const std::uint64_t room = dim - locked.size();
  const int requested = std::max({opts.basis_size, 2, 2 * want + 10});
  const int m = static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(requested), room));
  want = std::min(want, m);
  const int keep_default = opts.keep > 0 ? opts.keep : std::max(want + 1, (m + want) / 2);
  const int keep = std::clamp(keep_default, 1, std::max(1, m - 1));
  const double target = 0.1 * opts.tol;

  Basis basis(static_cast<std::size_t>(m));
  orthogonalize(start, locked, basis, 0);
  if (vec::normalize(start) < 1e-12) {
    if (!fresh_direction(start, dim, locked, basis, 0, rng)) throw ConvergenceError("no room left in sector", {});
  }
  basis[0] = std::move(start);

  Eigen::MatrixXcd t = Eigen::MatrixXcd::Zero(m, m);
  StateVector w(dim);
  int first = 0;
  double best_estimate = std::numeric_limits<double>::infinity();

  for (int restart = 0; restart <= opts.max_restarts; ++restart) {
    double beta = 0.0;
    for (int j = first; j < m; ++j) {
      op.apply(basis[static_cast<std::size_t>(j)], w);
      ++matvecs;
      const std::vector<cplx> coef = orthogonalize(w, locked, basis, j + 1);
      for (int i = 0; i <= j; ++i) t(i, j) = coef[static_cast<std::size_t>(i)];
      beta = vec::norm(w);
      if (j + 1 == m) break;
      StateVector& next = basis[static_cast<std::size_t>(j) + 1];
      const double scale = std::max(1.0, std::abs(t(j, j)));
      if (beta > 1e-12 * scale) {
        next = w;
        vec::scale(1.0 / beta, next);
        t(j + 1, j) = beta;
      } else {
        // Invariant subspace: continue from a fresh orthogonal direction.
        if (!fresh_direction(next, dim, locked, basis, j + 1, rng)) {
          throw ConvergenceError("Krylov space exhausted before basis was filled", {});
        }
        t(j + 1, j) = 0.0;
      }
    }

    const Eigen::MatrixXcd sym = 0.5 * (t + t.adjoint());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ritz(sym);
    const Eigen::VectorXd& theta = ritz.eigenvalues();
    const Eigen::MatrixXcd& s = ritz.eigenvectors();
    const bool exhausted = m == static_cast<int>(room);
    auto estimate = [&](int l) { return exhausted ? 0.0 : beta * std::abs(s(m - 1, l)); };
    best_estimate = std::min(best_estimate, estimate(0));
    if (history) history->push_back(theta(0));

    const bool converged = estimate(0) < target;
    if (converged || restart == opts.max_restarts) {
      if (!converged) {
        std::ostringstream os;
        os << "Lanczos did not converge after " << opts.max_restarts << " restarts (residual estimate "
           << best_estimate << ")";
        throw ConvergenceError(os.str(), {best_estimate});
      }
      int done = 1;
      while (done < want && estimate(done) < target) ++done;
      const int rotated = std::min(m, done + 1);
      rotate_in_place(basis, s, rotated);
      LevelBatch out;
      for (int l = 0; l < done; ++l) {
        out.values.push_back(theta(l));
        out.vectors.push_back(std::move(basis[static_cast<std::size_t>(l)]));
      }
      if (rotated > done) out.next_guess = std::move(basis[static_cast<std::size_t>(done)]);
      return out;
    }

    // Thick restart: keep the lowest Ritz vectors and append the residual.
    rotate_in_place(basis, s, keep);
    basis[static_cast<std::size_t>(keep)] = w;
    vec::scale(1.0 / beta, basis[static_cast<std::size_t>(keep)]);
    t.setZero();
    for (int l = 0; l < keep; ++l) {
      t(l, l) = theta(l);
      t(keep, l) = beta * s(m - 1, l);
      t(l, keep) = std::conj(t(keep, l));
    }
    first = keep;
  }
  throw ConvergenceError("Lanczos restart loop exited", {best_estimate});
}

// Start vector for the next run: a random direction, tilted towards `hint`.
StateVector next_start(const StateVector& hint, std::uint64_t dim, std::mt19937_64& rng) {
  StateVector guess = random_vector(dim, rng);
  if (!hint.empty()) {
    vec::normalize(guess);
    vec::scale(0.1, guess);
    vec::axpy(1.0, hint, guess);
  }
  return guess;
}

// Rotates `locked` onto the Ritz basis of H in its span; returns the Ritz values.
std::vector<double> rayleigh_ritz(const LinearOperator& op, Basis& locked, int& matvecs) {
  const int k = static_cast<int>(locked.size());
  Eigen::MatrixXcd proj(k, k);
  StateVector hv(op.dimension());
  for (int j = 0; j < k; ++j) {
    op.apply(locked[static_cast<std::size_t>(j)], hv);
    ++matvecs;
    for (int i = 0; i < k; ++i) proj(i, j) = vec::dot(locked[static_cast<std::size_t>(i)], hv);
  }
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> rr(0.5 * (proj + proj.adjoint()));
  rotate_in_place(locked, rr.eigenvectors(), k);
  return {rr.eigenvalues().data(), rr.eigenvalues().data() + k};
}

}  // namespace

EigenResult lowest_k(const LinearOperator& op, const LanczosOptions& opts) {
  const std::uint64_t dim = op.dimension();
  if (opts.k < 1) throw RangeError("k must be at least 1");
  if (static_cast<std::uint64_t>(opts.k) > dim) {
    throw RangeError("k=" + std::to_string(opts.k) + " exceeds dimension " + std::to_string(dim));
  }
  if (!(opts.tol > 0.0)) throw RangeError("tolerance must be positive");

  std::mt19937_64 rng(opts.seed);
  EigenResult result;
  Basis locked;
  locked.reserve(static_cast<std::size_t>(opts.k) + 1);
  StateVector guess = random_vector(dim, rng);
  bool batched = false;
  while (static_cast<int>(locked.size()) < opts.k) {
    const int want = opts.k - static_cast<int>(locked.size());
    LevelBatch found = lowest_in_complement(op, locked, std::move(guess), want, opts, rng, result.iterations,
                                            locked.empty() ? &result.ground_ritz_history : nullptr);
    batched = batched || found.vectors.size() > 1;
    for (StateVector& v : found.vectors) locked.push_back(std::move(v));
    guess = next_start(found.next_guess, dim, rng);
  }

  // A run that locks several levels at once can skip an exactly degenerate
  // partner. Search the complement until nothing lies below the top level.
  std::vector<double> values = rayleigh_ritz(op, locked, result.iterations);
  while (batched && locked.size() < dim) {
    LevelBatch probe = lowest_in_complement(op, locked, std::move(guess), 1, opts, rng, result.iterations, nullptr);
    const double top = values.back();
    if (probe.values.front() >= top - 1e-9 * std::max(1.0, std::abs(top))) break;
    locked.push_back(std::move(probe.vectors.front()));
    values = rayleigh_ritz(op, locked, result.iterations);
    locked.pop_back();
    values.pop_back();
    guess = next_start(probe.next_guess, dim, rng);
  }

  const int k = opts.k;
  StateVector hv(dim);
  for (int j = 0; j < k; ++j) {
    StateVector& v = locked[static_cast<std::size_t>(j)];
    vec::normalize(v);
    op.apply(v, hv);
    ++result.iterations;
    const double e = vec::dot(v, hv).real();
    vec::axpy(-e, v, hv);
    result.energies.push_back(e);
    result.residuals.push_back(vec::norm(hv));
  }
  result.vectors = std::move(locked);

  const double worst = *std::max_element(result.residuals.begin(), result.residuals.end());
  if (worst >= opts.tol) {
    std::ostringstream os;
    os << "eigenpair residual " << worst << " above tolerance " << opts.tol;
    throw ConvergenceError(os.str(), result.residuals);
  }
  return result;
}

std::uint64_t default_seed(const ModelSpec& spec) { return fnv1a(spec.canonical()); }

namespace {

void require_dense_size(const Eigen::MatrixXcd& h) {
  if (h.rows() != h.cols()) throw DimensionMismatch("dense eigensolver needs a square matrix");
  if (h.rows() > kMaxDenseDimension) {
    throw ResourceError("dense diagonalization limited to D <= 4000",
                        static_cast<double>(h.rows()) * static_cast<double>(h.rows()) * 16.0);
  }
}

}  // namespace

Eigen::VectorXd dense_all(const Eigen::MatrixXcd& h) {
  require_dense_size(h);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

DenseEigen dense_decompose(const Eigen::MatrixXcd& h) {
  require_dense_size(h);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
  return {es.eigenvalues(), es.eigenvectors()};
}

}  // namespace critchain
