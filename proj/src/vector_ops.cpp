#include "critchain/vector_ops.hpp"

#include <cmath>

#include "critchain/errors.hpp"

namespace critchain {

namespace {

void require_same_size(std::size_t a, std::size_t b) {
  if (a != b) throw DimensionMismatch("vector sizes differ");
}

std::int64_t chunk_count(std::size_t n) {
  return static_cast<std::int64_t>((n + vec::kChunk - 1) / vec::kChunk);
}

// Four interleaved accumulators keep the summation order fixed while letting
// independent additions overlap.
cplx dot_range(const cplx* a, const cplx* b, std::size_t n) {
  double re[4] = {0.0, 0.0, 0.0, 0.0};
  double im[4] = {0.0, 0.0, 0.0, 0.0};
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    for (std::size_t l = 0; l < 4; ++l) {
      const double ar = a[i + l].real(), ai = a[i + l].imag();
      const double br = b[i + l].real(), bi = b[i + l].imag();
      re[l] += ar * br + ai * bi;
      im[l] += ar * bi - ai * br;
    }
  }
  for (std::size_t l = 0; i < n; ++i, ++l) {
    const double ar = a[i].real(), ai = a[i].imag();
    const double br = b[i].real(), bi = b[i].imag();
    re[l] += ar * br + ai * bi;
    im[l] += ar * bi - ai * br;
  }
  return {(re[0] + re[1]) + (re[2] + re[3]), (im[0] + im[1]) + (im[2] + im[3])};
}

void check_block(std::span<const StateVector* const> vs, std::size_t n) {
  for (const StateVector* v : vs) require_same_size(v->size(), n);
}

// Partial dots of every vector against w[begin, begin + len).
void dots_range(std::span<const StateVector* const> vs, const cplx* w, std::size_t begin, std::size_t len,
                cplx* out) {
  for (std::size_t i = 0; i < vs.size(); ++i) out[i] = dot_range(vs[i]->data() + begin, w + begin, len);
}

void subtract_range(std::span<const StateVector* const> vs, std::span<const cplx> coef, cplx* w,
                    std::size_t begin, std::size_t len) {
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const double cr = coef[i].real(), ci = coef[i].imag();
    const cplx* v = vs[i]->data() + begin;
    cplx* y = w + begin;
    for (std::size_t e = 0; e < len; ++e) {
      const double vr = v[e].real(), vi = v[e].imag();
      y[e] -= cplx(cr * vr - ci * vi, cr * vi + ci * vr);
    }
  }
}

}  // namespace

namespace vec {

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  require_same_size(a.size(), b.size());
  const std::int64_t nchunks = chunk_count(a.size());
  if (nchunks <= 1) return dot_range(a.data(), b.data(), a.size());
  std::vector<cplx> partial(static_cast<std::size_t>(nchunks));
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    const std::size_t len = std::min(kChunk, a.size() - begin);
    partial[static_cast<std::size_t>(c)] = dot_range(a.data() + begin, b.data() + begin, len);
  }
  cplx sum = 0.0;
  for (const cplx& p : partial) sum += p;
  return sum;
}

double norm(std::span<const cplx> a) { return std::sqrt(dot(a, a).real()); }

void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y) {
  require_same_size(x.size(), y.size());
  const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) y[static_cast<std::size_t>(i)] += alpha * x[static_cast<std::size_t>(i)];
}

void scale(cplx alpha, std::span<cplx> x) {
  const std::int64_t n = static_cast<std::int64_t>(x.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] *= alpha;
}

double normalize(std::span<cplx> x) {
  const double nrm = norm(x);
  if (nrm > 0.0) scale(1.0 / nrm, x);
  return nrm;
}

std::vector<cplx> dots(std::span<const StateVector* const> vs, std::span<const cplx> w) {
  check_block(vs, w.size());
  const std::size_t k = vs.size();
  const std::int64_t nchunks = chunk_count(w.size());
  std::vector<cplx> partial(static_cast<std::size_t>(nchunks) * k);
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    dots_range(vs, w.data(), begin, std::min(kChunk, w.size() - begin), partial.data() + static_cast<std::size_t>(c) * k);
  }
  std::vector<cplx> out(k, 0.0);
  for (std::int64_t c = 0; c < nchunks; ++c) {
    for (std::size_t i = 0; i < k; ++i) out[i] += partial[static_cast<std::size_t>(c) * k + i];
  }
  return out;
}

void subtract(std::span<const StateVector* const> vs, std::span<const cplx> coef, std::span<cplx> w) {
  check_block(vs, w.size());
  require_same_size(vs.size(), coef.size());
  const std::int64_t nchunks = chunk_count(w.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t c = 0; c < nchunks; ++c) {
    const std::size_t begin = static_cast<std::size_t>(c) * kChunk;
    subtract_range(vs, coef, w.data(), begin, std::min(kChunk, w.size() - begin));
  }
}

}  // namespace vec

namespace vec_serial {

cplx dot(std::span<const cplx> a, std::span<const cplx> b) {
  require_same_size(a.size(), b.size());
  cplx sum = 0.0;
  for (std::size_t begin = 0; begin < a.size(); begin += vec::kChunk) {
    const std::size_t len = std::min(vec::kChunk, a.size() - begin);
    sum += dot_range(a.data() + begin, b.data() + begin, len);
  }
  return sum;
}

double norm(std::span<const cplx> a) { return std::sqrt(dot(a, a).real()); }

std::vector<cplx> dots(std::span<const StateVector* const> vs, std::span<const cplx> w) {
  check_block(vs, w.size());
  std::vector<cplx> out;
  for (const StateVector* v : vs) out.push_back(dot(*v, w));
  return out;
}

void subtract(std::span<const StateVector* const> vs, std::span<const cplx> coef, std::span<cplx> w) {
  check_block(vs, w.size());
  require_same_size(vs.size(), coef.size());
  subtract_range(vs, coef, w.data(), 0, w.size());
}

}  // namespace vec_serial

}  // namespace critchain
