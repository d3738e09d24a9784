#include "critchain/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "critchain/analytic.hpp"
#include "critchain/eigensolve.hpp"
#include "critchain/errors.hpp"
#include "critchain/observables.hpp"

namespace critchain {

OverlapObjective::OverlapObjective(int q, int n, ModelKind kind, const OptimizeOptions& opts)
    : q_(q), n_(n), kind_(kind), opts_(opts), basis_(SectorBasis::for_model(n, q)) {
  if (!is_optimized(kind)) throw InvalidModel("U optimization applies to nn-opt and nnn-opt only");
  make_model(q, n, kind, 1.0);
  exact_ = build_state(n, q, basis_);
}

double OverlapObjective::operator()(double u) const {
  const ModelSpec spec = make_model(q_, n_, kind_, u);
  const auto op = make_operator(spec, basis_, opts_.budget_bytes, opts_.basis_size + 4);
  LanczosOptions lo;
  lo.k = 1;
  lo.tol = opts_.lanczos_tol;
  lo.basis_size = opts_.basis_size;
  lo.seed = default_seed(spec);
  const EigenResult gs = lowest_k(*op, lo);
  ++evaluations_;
  return overlap(gs.vectors.front(), exact_, n_).delta;
}

ScanResult optimize_u(int q, int n, ModelKind kind, const OptimizeOptions& opts) {
  if (!(opts.lo > 0.0) || !(opts.lo < opts.hi)) throw InvalidModel("U bracket needs 0 < lo < hi");
  if (!(opts.step > 0.0) || !(opts.tol > 0.0)) throw InvalidModel("step and tol must be positive");
  const OverlapObjective objective(q, n, kind, opts);

  ScanResult result;
  const int cells = std::max(1, static_cast<int>(std::ceil((opts.hi - opts.lo) / opts.step - 1e-9)));
  for (int i = 0; i <= cells; ++i) {
    const double u = std::min(opts.hi, opts.lo + i * opts.step);
    result.samples.push_back({u, objective(u)});
  }
  std::size_t best = 0;
  for (std::size_t i = 0; i < result.samples.size(); ++i) {
    if (result.samples[i].delta > result.samples[best].delta) best = i;
    if (i > 0 && std::abs(result.samples[i].delta - result.samples[i - 1].delta) > opts.crossing_jump) {
      result.crossings.push_back(0.5 * (result.samples[i].u + result.samples[i - 1].u));
    }
  }
  result.boundary = best == 0 || best + 1 == result.samples.size();

  double a = result.samples[best > 0 ? best - 1 : 0].u;
  double b = result.samples[std::min(best + 1, result.samples.size() - 1)].u;
  result.bracket = {a, b};

  // Golden-section search for the maximum on [a, b].
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = objective(c), fd = objective(d);
  result.samples.push_back({c, fc});
  result.samples.push_back({d, fd});
  while (b - a > opts.tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = objective(c);
      result.samples.push_back({c, fc});
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = objective(d);
      result.samples.push_back({d, fd});
    }
  }
  const double mid = 0.5 * (a + b);
  result.samples.push_back({mid, objective(mid)});

  const auto top = std::max_element(result.samples.begin(), result.samples.end(),
                                    [](const ScanSample& l, const ScanSample& r) { return l.delta < r.delta; });
  result.best_u = top->u;
  result.best_delta = top->delta;
  return result;
}

double tabulated_optimal_u(int q, ModelKind kind) {
  const bool nn = kind == ModelKind::NNOpt;
  if (!is_optimized(kind)) return 1.0;
  switch (q) {
    case 2:
      return 1.00;
    case 3:
      return nn ? 1.70 : 0.70;
    case 4:
      return nn ? 5.36 : 0.60;
    default:
      break;
  }
  throw InvalidModel("no tabulated optimal U for q=" + std::to_string(q) + "; pass --u");
}

}  // namespace critchain
