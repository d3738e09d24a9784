// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
// Set CRITCHAIN_EXTENDED=1 to additionally run the q = 4, N = 32 ground state
// (matrix-free, hours on a workstation).

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <string>
#include <vector>

#include "critchain/analytic.hpp"
#include "critchain/dense_oracle.hpp"
#include "critchain/eigensolve.hpp"
#include "critchain/hamiltonian.hpp"
#include "critchain/observables.hpp"
#include "critchain/optimize.hpp"

using namespace critchain;

namespace {

using Clock = std::chrono::steady_clock;

const Clock::time_point kStart = Clock::now();

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

double memory_budget() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  return pages > 0 && page > 0 ? 0.8 * static_cast<double>(pages) * static_cast<double>(page) : 4e9;
}

void detail(const char* fmt, auto... args) {
  std::printf("    ");
  std::printf(fmt, args...);
  std::printf("\n");
  std::fflush(stdout);
}

ModelSpec model(int q, int n, ModelKind kind) {
  return make_model(q, n, kind, is_optimized(kind) ? std::optional(tabulated_optimal_u(q, kind)) : std::nullopt);
}

// Every Lanczos run of the suite goes through here so results are shared
// between criteria and every ground-state gap is recorded.
class Solver {
 public:
  const EigenResult& lowest(const ModelSpec& spec, int k) {
    const std::string key = spec.canonical() + " k=" + std::to_string(k);
    if (auto it = results_.find(key); it != results_.end()) return it->second;
    const Clock::time_point t0 = Clock::now();
    const SectorBasis& b = basis(spec.n, spec.q);
    const auto op = make_operator(spec, b, memory_budget(), 40);
    LanczosOptions opts;
    opts.k = k;
    opts.seed = default_seed(spec);
    EigenResult r = lowest_k(*op, opts);
    detail("solved %s k=%d (D=%llu, %d matvecs, %.1f s)", spec.canonical().c_str(), k,
           static_cast<unsigned long long>(b.dimension()), r.iterations, seconds_since(t0));
    if (k > 1) gaps_[spec.canonical()] = r.gap();
    return results_.emplace(key, std::move(r)).first->second;
  }

  const SectorBasis& basis(int n, int q) {
    const auto key = std::pair{n, q};
    auto it = bases_.find(key);
    if (it == bases_.end()) it = bases_.emplace(key, std::make_unique<SectorBasis>(SectorBasis::for_model(n, q))).first;
    return *it->second;
  }

  const StateVector& exact_state(int n, int q) {
    const auto key = std::pair{n, q};
    auto it = states_.find(key);
    if (it == states_.end()) it = states_.emplace(key, build_state(n, q, basis(n, q))).first;
    return it->second;
  }

  const std::map<std::string, double>& gaps() const { return gaps_; }

 private:
  std::map<std::pair<int, int>, std::unique_ptr<SectorBasis>> bases_;
  std::map<std::pair<int, int>, StateVector> states_;
  std::map<std::string, EigenResult> results_;
  std::map<std::string, double> gaps_;
};

Solver solver;

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

const char* verdict(bool ok) { return ok ? "ok" : "FAIL"; }

// 1. The Jastrow state is an eigenstate with the closed-form energy.
bool analytic_residual() {
  bool ok = true;
  for (auto [q, n] : {std::pair{2, 12}, {2, 16}, {3, 12}, {3, 15}, {4, 12}, {4, 16}}) {
    const SectorBasis& b = solver.basis(n, q);
    const SparseOperator h = build(make_model(q, n, ModelKind::Exact), b);
    const StateVector& psi = solver.exact_state(n, q);
    StateVector r = matvec(h, psi);
    const double e0 = exact_ground_energy(q, n);
    vec::axpy(-e0, psi, r);
    const double res = vec::norm(r);
    const bool pass = res < 1e-8;
    ok = ok && pass;
    detail("q=%d N=%d E0=%.6f residual=%.3e %s", q, n, e0, res, verdict(pass));
  }
  return ok;
}

// 2. Sector assembly against the full-space Kronecker construction.
bool dense_oracle_equivalence() {
  bool ok = true;
  int compared = 0;
  double worst = 0.0;
  for (int q : {2, 3, 4}) {
    for (int n : {6, 8, 12}) {
      if (n % q != 0) continue;
      for (ModelKind kind : {ModelKind::Exact, ModelKind::NN, ModelKind::NNN, ModelKind::NNOpt, ModelKind::NNNOpt}) {
        const ModelSpec spec = model(q, n, kind);
        const double diff =
            (to_dense(build(spec, solver.basis(n, q))) - dense_oracle::build_dense(spec)).cwiseAbs().maxCoeff();
        worst = std::max(worst, diff);
        if (!(diff < 1e-12)) {
          ok = false;
          detail("%s differs by %.3e FAIL", spec.canonical().c_str(), diff);
        }
        ++compared;
      }
    }
  }
  detail("%d operators compared, largest entry difference %.3e", compared, worst);
  return ok;
}

struct OverlapRow {
  int q;
  int n;
  ModelKind kind;
  double published;
};

// 3. Ground-state fidelities of the truncated models.
bool ground_overlaps() {
  const std::vector<OverlapRow> rows{
      {3, 15, ModelKind::NN, 0.953},     {3, 18, ModelKind::NN, 0.939},     {3, 15, ModelKind::NNN, 0.981},
      {3, 18, ModelKind::NNN, 0.973},    {3, 15, ModelKind::NNOpt, 0.965},  {3, 18, ModelKind::NNOpt, 0.954},
      {3, 15, ModelKind::NNNOpt, 0.996}, {3, 18, ModelKind::NNNOpt, 0.995}, {2, 16, ModelKind::NN, 0.9930},
      {2, 20, ModelKind::NN, 0.9904},    {2, 16, ModelKind::NNN, 0.9960},   {2, 20, ModelKind::NNN, 0.9940},
      {4, 16, ModelKind::NN, 0.837},     {4, 20, ModelKind::NN, 0.785},     {4, 16, ModelKind::NNN, 0.988},
      {4, 20, ModelKind::NNN, 0.984},    {4, 16, ModelKind::NNOpt, 0.865},  {4, 20, ModelKind::NNOpt, 0.820},
      {4, 16, ModelKind::NNNOpt, 0.997}, {4, 20, ModelKind::NNNOpt, 0.996},
  };
  bool ok = true;
  for (const OverlapRow& row : rows) {
    const ModelSpec spec = model(row.q, row.n, row.kind);
    const EigenResult& r = solver.lowest(spec, 2);
    const double delta = overlap(r.vectors.front(), solver.exact_state(row.n, row.q), row.n).delta;
    const bool pass = within(delta, row.published, 0.002);
    ok = ok && pass;
    detail("q=%d N=%d %-7s delta=%.4f published=%.4f %s", row.q, row.n, kind_name(row.kind).data(), delta,
           row.published, verdict(pass));
  }
  return ok;
}

// 4. Optimal density-density scale.
bool optimizer() {
  struct Row {
    int q;
    int n;
    ModelKind kind;
    double published;
    double tol;
  };
  const std::vector<Row> rows{
      {2, 16, ModelKind::NNOpt, 1.00, 0.02}, {2, 16, ModelKind::NNNOpt, 1.00, 0.02},
      {3, 15, ModelKind::NNOpt, 1.70, 0.05}, {3, 15, ModelKind::NNNOpt, 0.70, 0.05},
      {4, 16, ModelKind::NNOpt, 5.36, 0.10}, {4, 16, ModelKind::NNNOpt, 0.60, 0.05},
  };
  bool ok = true;
  for (const Row& row : rows) {
    const Clock::time_point t0 = Clock::now();
    const ScanResult scan = optimize_u(row.q, row.n, row.kind);
    const bool pass = !scan.boundary && within(scan.best_u, row.published, row.tol);
    ok = ok && pass;
    detail("q=%d N=%d %-7s best_u=%.3f (delta=%.5f, %zu evaluations, %.1f s) published=%.2f +- %.2f %s", row.q,
           row.n, kind_name(row.kind).data(), scan.best_u, scan.best_delta, scan.samples.size(), seconds_since(t0),
           row.published, row.tol, verdict(pass));
  }
  return ok;
}

// 5. Excited-state fidelities between truncated and long-range models.
bool excited_overlaps() {
  struct Row {
    int q;
    int n;
    ModelKind kind;
    int k;
    std::vector<std::pair<int, double>> states;  // (1-based state, published delta)
    double tol;
  };
  const std::vector<Row> rows{
      {3, 21, ModelKind::NNNOpt, 7, {{2, 0.9933}, {3, 0.9933}, {4, 0.9894}, {5, 0.9894}, {6, 0.9893}, {7, 0.9893}}, 0.002},
      {2, 20, ModelKind::NN, 3, {{3, 0.9707}}, 0.002},
      {4, 20, ModelKind::NNNOpt, 7, {{6, 0.9632}}, 0.003},
  };
  bool ok = true;
  for (const Row& row : rows) {
    const EigenResult& local = solver.lowest(model(row.q, row.n, row.kind), row.k);
    const EigenResult& exact = solver.lowest(make_model(row.q, row.n, ModelKind::Exact), row.k + kExactWindowMargin);
    const ExcitedMatch match = match_excited(local, exact, row.n);
    for (const std::string& w : match.warnings) detail("warning: %s", w.c_str());
    for (const auto& [state, published] : row.states) {
      const double delta = match.overlaps[static_cast<std::size_t>(state - 1)].delta;
      const bool pass = within(delta, published, row.tol);
      ok = ok && pass;
      detail("q=%d N=%d %-7s state %d delta=%.4f published=%.4f %s", row.q, row.n, kind_name(row.kind).data(), state,
             delta, published, verdict(pass));
    }
    if (row.q == 3) {
      // Normalized spectra of the two models nearly coincide for the first
      // excited levels.
      const SpectrumReport a = normalized_spectrum(local.energies);
      const SpectrumReport b = normalized_spectrum(exact.energies);
      for (int state = 2; state <= 5; ++state) {
        const double diff = std::abs(a.normalized[static_cast<std::size_t>(state - 1)] -
                                     b.normalized[static_cast<std::size_t>(state - 1)]);
        const bool pass = diff < 0.15;
        ok = ok && pass;
        detail("q=3 N=21 normalized level %d: model %.4f exact %.4f %s", state,
               a.normalized[static_cast<std::size_t>(state - 1)], b.normalized[static_cast<std::size_t>(state - 1)],
               verdict(pass));
      }
    }
  }
  return ok;
}

// 6. Logarithmic entropy growth with unit central charge.
bool entropy_scaling() {
  const int q = 2, n = 24;
  const SectorBasis& b = solver.basis(n, q);
  const EntropyCurve exact = entropy_curve(solver.exact_state(n, q), b);
  const double slope = entropy_scaling_slope(exact, 4, 12);
  const bool slope_ok = slope >= 0.85 && slope <= 1.15;
  detail("q=2 N=24 exact state: slope of S vs ln[sin(pi L/N)]/3 over L=4..12 = %.4f %s", slope, verdict(slope_ok));

  const EigenResult& nn = solver.lowest(model(q, n, ModelKind::NN), 2);
  const EntropyCurve local = entropy_curve(nn.vectors.front(), b);
  double worst = 0.0;
  for (std::size_t i = 0; i < exact.points.size(); ++i) worst = std::max(worst, std::abs(local.points[i].s - exact.points[i].s));
  const bool close = worst < 0.05;
  detail("q=2 N=24 nn ground state: max |S_nn - S_exact| over L=1..12 = %.4f %s", worst, verdict(close));
  return slope_ok && close;
}

// 7. Density-correlation sum rule, on-site value, and local-vs-exact agreement.
bool correlations() {
  bool ok = true;
  for (auto [q, n] : {std::pair{2, 20}, {3, 21}, {4, 20}}) {
    const SectorBasis& b = solver.basis(n, q);
    const StateVector& psi = solver.exact_state(n, q);
    const Eigen::MatrixXd g = g2_matrix(psi, b);
    const double rule = g.rowwise().sum().cwiseAbs().maxCoeff();
    const double onsite = g2_curve(psi, b).points.front().g2;
    const double expected = 1.0 / q - 1.0 / (q * q);
    const bool pass = rule < 1e-10 && std::abs(onsite - expected) < 1e-10;
    ok = ok && pass;
    detail("q=%d N=%d exact state: max |sum_j G2(i,j)| = %.2e, g2(0) = %.12f (expected %.12f) %s", q, n, rule, onsite,
           expected, verdict(pass));
  }
  const SectorBasis& b = solver.basis(20, 2);
  const CorrelationCurve exact = g2_curve(solver.exact_state(20, 2), b);
  const StateVector& nn_state = solver.lowest(model(2, 20, ModelKind::NN), 2).vectors.front();
  const Eigen::MatrixXd gnn = g2_matrix(nn_state, b);
  const CorrelationCurve local = g2_curve(nn_state, b);
  double worst = 0.0;
  for (std::size_t i = 0; i < exact.points.size(); ++i) worst = std::max(worst, std::abs(local.points[i].g2 - exact.points[i].g2));
  const bool agree = worst < 0.01 && gnn.rowwise().sum().cwiseAbs().maxCoeff() < 1e-10;
  ok = ok && agree;
  detail("q=2 N=20 nn ground state: max |g2_nn - g2_exact| = %.4f %s", worst, verdict(agree));
  return ok;
}

// 8. Lanczos against dense diagonalization; ground-state gaps.
bool solver_correctness() {
  bool ok = true;
  for (auto [q, n] : {std::pair{2, 12}, {3, 12}, {3, 15}, {4, 12}, {4, 16}}) {
    const SectorBasis& b = solver.basis(n, q);
    for (ModelKind kind : {ModelKind::Exact, ModelKind::NN, ModelKind::NNN, ModelKind::NNOpt, ModelKind::NNNOpt}) {
      const ModelSpec spec = model(q, n, kind);
      const SparseOperator h = build(spec, b);
      const Eigen::VectorXd dense = dense_all(to_dense(h));
      LanczosOptions opts;
      opts.k = 8;
      opts.seed = default_seed(spec);
      const EigenResult r = lowest_k(h, opts);
      double worst = 0.0;
      for (int l = 0; l < 8; ++l) worst = std::max(worst, std::abs(r.energies[static_cast<std::size_t>(l)] - dense(l)));
      const bool pass = worst < 1e-9;
      ok = ok && pass;
      if (!pass || kind == ModelKind::Exact) {
        detail("%s D=%llu max |E_lanczos - E_dense| over 8 levels = %.2e %s", spec.canonical().c_str(),
               static_cast<unsigned long long>(b.dimension()), worst, verdict(pass));
      }
    }
  }
  double smallest = std::numeric_limits<double>::infinity();
  std::string where;
  for (const auto& [name, gap] : solver.gaps()) {
    if (gap < smallest) {
      smallest = gap;
      where = name;
    }
  }
  const bool gaps_ok = !solver.gaps().empty() && smallest > 1e-8;
  ok = ok && gaps_ok;
  detail("%zu configurations with a computed gap; smallest %.6f (%s) %s", solver.gaps().size(), smallest,
         where.c_str(), verdict(gaps_ok));
  return ok;
}

// 9. Largest published size is within reach of the matrix-free path, and this
// suite stays at N <= 24 within the half-hour budget.
bool desk_scale() {
  const ModelSpec big = model(4, 32, ModelKind::NNNOpt);
  const MemoryEstimate est = estimate_memory(big);
  const double lanczos_bytes = required_bytes(est, 20);
  const bool feasible = est.matrix_free && lanczos_bytes < 32e9;
  detail("q=4 N=32 nnn-opt: D=%llu, matrix-free=%s, ~%.1f GB with 20 work vectors %s",
         static_cast<unsigned long long>(est.dimension), est.matrix_free ? "yes" : "no", lanczos_bytes / 1e9,
         verdict(feasible));

  bool extended = true;
  if (const char* flag = std::getenv("CRITCHAIN_EXTENDED"); flag != nullptr && std::string(flag) == "1") {
    const EigenResult& r = solver.lowest(big, 1);
    const double delta = overlap(r.vectors.front(), solver.exact_state(32, 4), 32).delta;
    extended = within(delta, 0.973, 0.002);
    detail("extended: q=4 N=32 nnn-opt delta=%.4f published=0.973 %s", delta, verdict(extended));
  } else {
    detail("extended N=32 run skipped (set CRITCHAIN_EXTENDED=1)");
  }

  const double elapsed = seconds_since(kStart);
  const bool in_budget = elapsed < 1800.0;
  detail("suite wall time so far %.0f s (budget 1800 s) %s", elapsed, verdict(in_budget));
  return feasible && extended && in_budget;
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<bool()>>> criteria{
      {"analytic eigenstate residual", analytic_residual},
      {"dense Kronecker oracle equivalence", dense_oracle_equivalence},
      {"ground-state overlaps", ground_overlaps},
      {"optimal U", optimizer},
      {"excited-state overlaps", excited_overlaps},
      {"entropy scaling", entropy_scaling},
      {"correlation invariants", correlations},
      {"solver correctness", solver_correctness},
      {"desk-scale feasibility", desk_scale},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const Clock::time_point t0 = Clock::now();
    std::printf("criterion %zu: %s\n", i + 1, criteria[i].first);
    std::fflush(stdout);
    bool pass = false;
    try {
      pass = criteria[i].second();
    } catch (const std::exception& e) {
      detail("error: %s", e.what());
    }
    failures += pass ? 0 : 1;
    std::printf("%s %zu %s (%.1f s)\n", pass ? "PASS" : "FAIL", i + 1, criteria[i].first, seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
