// Parallel kernels against their serial references.
// Argument: N at q = 2 (sector dimension C(N, N/2)).

#include <benchmark/benchmark.h>

#include <complex>
#include <random>
#include <vector>

#include "critchain/analytic.hpp"
#include "critchain/basis.hpp"
#include "critchain/hamiltonian.hpp"
#include "critchain/vector_ops.hpp"

using namespace critchain;

namespace {

StateVector random_vector(std::uint64_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  StateVector v(dim);
  for (cplx& x : v) x = {g(rng), g(rng)};
  return v;
}

ModelSpec spec_for(const benchmark::State& state) {
  return make_model(2, static_cast<int>(state.range(0)), ModelKind::Exact, std::nullopt);
}

void set_rows(benchmark::State& state, std::uint64_t dim) {
  state.counters["D"] = static_cast<double>(dim);
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * dim));
}

template <bool Parallel>
void BM_csr_apply(benchmark::State& state) {
  const ModelSpec spec = spec_for(state);
  const SectorBasis basis = SectorBasis::for_model(spec.n, spec.q);
  const SparseOperator h = build(spec, basis);
  const StateVector x = random_vector(basis.dimension(), 1);
  StateVector y(basis.dimension());
  for (auto _ : state) {
    if constexpr (Parallel) h.apply(x, y);
    else h.apply_serial(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  set_rows(state, basis.dimension());
}

template <bool Parallel>
void BM_matrix_free_apply(benchmark::State& state) {
  const ModelSpec spec = spec_for(state);
  const SectorBasis basis = SectorBasis::for_model(spec.n, spec.q);
  const MatrixFreeOperator h(spec, basis);
  const StateVector x = random_vector(basis.dimension(), 1);
  StateVector y(basis.dimension());
  for (auto _ : state) {
    if constexpr (Parallel) h.apply(x, y);
    else h.apply_serial(x, y);
    benchmark::DoNotOptimize(y.data());
  }
  set_rows(state, basis.dimension());
}

template <bool Parallel>
void BM_build(benchmark::State& state) {
  const ModelSpec spec = spec_for(state);
  const SectorBasis basis = SectorBasis::for_model(spec.n, spec.q);
  for (auto _ : state) {
    SparseOperator h = Parallel ? build(spec, basis) : build_serial(spec, basis);
    benchmark::DoNotOptimize(h);
  }
  set_rows(state, basis.dimension());
}

template <bool Parallel>
void BM_build_state(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const SectorBasis basis = SectorBasis::for_model(n, 2);
  for (auto _ : state) {
    StateVector psi = Parallel ? build_state(n, 2, basis) : build_state_serial(n, 2, basis);
    benchmark::DoNotOptimize(psi.data());
  }
  set_rows(state, basis.dimension());
}

template <bool Parallel>
void BM_dot(benchmark::State& state) {
  const auto dim = static_cast<std::uint64_t>(state.range(0));
  const StateVector a = random_vector(dim, 1);
  const StateVector b = random_vector(dim, 2);
  for (auto _ : state) {
    const cplx d = Parallel ? vec::dot(a, b) : vec_serial::dot(a, b);
    benchmark::DoNotOptimize(d);
  }
  set_rows(state, dim);
}

template <bool Parallel>
void BM_dots(benchmark::State& state) {
  const auto dim = static_cast<std::uint64_t>(state.range(0));
  std::vector<StateVector> basis;
  std::vector<const StateVector*> ptrs;
  for (std::uint64_t i = 0; i < 30; ++i) basis.push_back(random_vector(dim, 10 + i));
  for (const StateVector& v : basis) ptrs.push_back(&v);
  const StateVector w = random_vector(dim, 3);
  for (auto _ : state) {
    std::vector<cplx> d = Parallel ? vec::dots(ptrs, w) : vec_serial::dots(ptrs, w);
    benchmark::DoNotOptimize(d.data());
  }
  set_rows(state, dim * basis.size());
}

}  // namespace

BENCHMARK(BM_csr_apply<true>)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_csr_apply<false>)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matrix_free_apply<true>)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_matrix_free_apply<false>)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build<true>)->Arg(16)->Arg(18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build<false>)->Arg(16)->Arg(18)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_state<true>)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_build_state<false>)->Arg(16)->Arg(20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dot<true>)->Arg(1 << 16)->Arg(1 << 21)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dot<false>)->Arg(1 << 16)->Arg(1 << 21)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_dots<true>)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_dots<false>)->Arg(1 << 16)->Arg(1 << 20)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
