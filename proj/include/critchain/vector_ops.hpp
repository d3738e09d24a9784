#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace critchain {

using cplx = std::complex<double>;
using StateVector = std::vector<cplx>;

/// Level-1 kernels over state vectors.
///
/// Reductions sum fixed-size chunks independently and combine the partial sums
/// in chunk order, so results do not depend on the number of OpenMP threads.
namespace vec {

constexpr std::size_t kChunk = 4096;

/// <a|b> (conjugate-linear in a).
cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double norm(std::span<const cplx> a);
/// y += alpha x
void axpy(cplx alpha, std::span<const cplx> x, std::span<cplx> y);
void scale(cplx alpha, std::span<cplx> x);
/// Normalizes in place and returns the former norm.
double normalize(std::span<cplx> x);

/// <v_i|w> for every v_i in one sweep over w.
std::vector<cplx> dots(std::span<const StateVector* const> vs, std::span<const cplx> w);
/// w -= sum_i coef_i v_i in one sweep over w.
void subtract(std::span<const StateVector* const> vs, std::span<const cplx> coef, std::span<cplx> w);

}  // namespace vec

/// Straight-line single-threaded versions kept as reference for testing.
namespace vec_serial {

cplx dot(std::span<const cplx> a, std::span<const cplx> b);
double norm(std::span<const cplx> a);
std::vector<cplx> dots(std::span<const StateVector* const> vs, std::span<const cplx> w);
void subtract(std::span<const StateVector* const> vs, std::span<const cplx> coef, std::span<cplx> w);

}  // namespace vec_serial

}  // namespace critchain
