#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "critchain/basis.hpp"
#include "critchain/eigensolve.hpp"
#include "critchain/vector_ops.hpp"

namespace critchain {

struct OverlapReport {
  double delta = 0.0;           // |<a|b>|^2
  double delta_per_site = 0.0;  // delta^(1/N)
};

/// Fidelity of two normalized states of an N-site system.
OverlapReport overlap(std::span<const cplx> a, std::span<const cplx> b, int n);

struct EntropyPoint {
  int l = 0;
  double s = 0.0;  // nats
};

struct EntropyCurve {
  int n = 0;
  std::vector<EntropyPoint> points;
};

/// Von Neumann entropy of the sites selected by `region` (bit j-1 for site j).
///
/// The state is split into blocks of fixed particle number inside the region;
/// each block is a binomial(|A|, n_A) x binomial(N-|A|, M-n_A) coefficient
/// matrix whose singular values give the Schmidt spectrum.
double region_entropy(std::span<const cplx> v, const SectorBasis& basis, Configuration region);

/// S(L) for the blocks 1..L, L = 1..N/2 (N even) or 1..(N+1)/2 (N odd).
EntropyCurve entropy_curve(std::span<const cplx> v, const SectorBasis& basis);

/// Least-squares slope of S against ln[sin(pi L / N)] / 3 over lo <= L <= hi;
/// equals the central charge for a conformal critical chain.
double entropy_scaling_slope(const EntropyCurve& curve, int lo, int hi);

/// <n_j>, j = 1..N (index j-1).
std::vector<double> densities(std::span<const cplx> v, const SectorBasis& basis);

/// G2(i, j) = <n_i n_j> - <n_i><n_j> over all site pairs (0-based indices).
Eigen::MatrixXd g2_matrix(std::span<const cplx> v, const SectorBasis& basis);

struct CorrelationPoint {
  int d = 0;
  double g2 = 0.0;
};

struct CorrelationCurve {
  int n = 0;
  std::vector<CorrelationPoint> points;  // d = 0..N/2
};

/// G2 at separation d averaged over all reference sites.
CorrelationCurve g2_curve(std::span<const cplx> v, const SectorBasis& basis);

constexpr double kDefaultDegeneracyTol = 1e-7;

/// Extra exact levels to solve for so partners of the top local levels fit in the window.
constexpr int kExactWindowMargin = 3;

struct SpectrumReport {
  std::vector<double> raw;
  std::vector<double> normalized;
};

/// (E - E0)/(E1 - E0), with E1 the first level above E0 by more than
/// deg_tol * (E_max - E0). Throws DegenerateSpectrum if all levels coincide.
SpectrumReport normalized_spectrum(std::span<const double> energies,
                                   double deg_tol = kDefaultDegeneracyTol);

/// Half-open index ranges of (numerically) degenerate levels.
std::vector<std::pair<int, int>> multiplets(std::span<const double> energies,
                                            double deg_tol = kDefaultDegeneracyTol);

struct ExcitedMatch {
  std::vector<OverlapReport> overlaps;  // one per level, ground state first
  std::vector<int> partner;             // first exact level of the matched multiplet
  bool structure_mismatch = false;
  std::vector<std::string> warnings;
};

/// Level-by-level fidelities between two spectra of the same sector.
///
/// Levels are grouped into degenerate multiplets. Each local multiplet is
/// paired with the exact multiplet carrying the largest share of its weight,
/// and the squared singular values of the cross-Gram matrix
/// <local_a|exact_b> are assigned to its levels in descending order.
/// Non-degenerate pairs reduce to |<local|exact>|^2. The exact window may
/// hold more levels than the local one. Pairs of unequal multiplet size and
/// out-of-order pairings are reported, not fatal.
ExcitedMatch match_excited(const EigenResult& local, const EigenResult& exact, int n,
                           double deg_tol = kDefaultDegeneracyTol);

}  // namespace critchain
