#include "critchain/observables.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "critchain/errors.hpp"

namespace critchain {

OverlapReport overlap(std::span<const cplx> a, std::span<const cplx> b, int n) {
  if (a.size() != b.size()) throw DimensionMismatch("overlap of vectors with different dimensions");
  if (n < 1) throw RangeError("overlap per site needs N >= 1");
  OverlapReport r;
  r.delta = std::norm(vec::dot(a, b));
  r.delta_per_site = std::pow(r.delta, 1.0 / n);
  return r;
}

namespace {

// Packs the bits of c selected by mask into the low bits (software pext).
Configuration extract_bits(Configuration c, Configuration mask) {
  Configuration out = 0;
  int k = 0;
  for (Configuration m = mask; m; m &= m - 1, ++k) {
    if (c & (m & (~m + 1))) out |= Configuration{1} << k;
  }
  return out;
}

Configuration all_sites(int n) { return n >= 64 ? ~Configuration{0} : (Configuration{1} << n) - 1; }

void require_basis(std::span<const cplx> v, const SectorBasis& basis) {
  if (v.size() != basis.dimension()) throw DimensionMismatch("state does not match basis dimension");
}

}  // namespace

double region_entropy(std::span<const cplx> v, const SectorBasis& basis, Configuration region) {
  require_basis(v, basis);
  const int n = basis.sites(), m = basis.particles();
  const Configuration mask_a = region & all_sites(n);
  const Configuration mask_b = all_sites(n) & ~mask_a;
  const int size_a = popcount(mask_a), size_b = n - size_a;

  std::vector<Eigen::MatrixXcd> blocks(static_cast<std::size_t>(m + 1));
  for (int na = 0; na <= m; ++na) {
    const auto rows = static_cast<Eigen::Index>(binomial(size_a, na));
    const auto cols = static_cast<Eigen::Index>(binomial(size_b, m - na));
    blocks[static_cast<std::size_t>(na)] = Eigen::MatrixXcd::Zero(rows, cols);
  }
  const bool prefix = (mask_a & (mask_a + 1)) == 0;
  for (std::uint64_t k = 0; k < basis.dimension(); ++k) {
    const Configuration c = basis.state(k);
    const Configuration a = prefix ? (c & mask_a) : extract_bits(c, mask_a);
    const Configuration b = prefix ? (c >> size_a) : extract_bits(c, mask_b);
    auto& block = blocks[static_cast<std::size_t>(popcount(a))];
    block(static_cast<Eigen::Index>(colex_rank(a)), static_cast<Eigen::Index>(colex_rank(b))) = v[k];
  }

  double s = 0.0;
  for (const Eigen::MatrixXcd& block : blocks) {
    if (block.size() == 0) continue;
    const Eigen::BDCSVD<Eigen::MatrixXcd> svd(block);
    for (Eigen::Index i = 0; i < svd.singularValues().size(); ++i) {
      const double p = svd.singularValues()(i) * svd.singularValues()(i);
      if (p > 0.0) s -= p * std::log(p);
    }
  }
  return s;
}

EntropyCurve entropy_curve(std::span<const cplx> v, const SectorBasis& basis) {
  EntropyCurve curve;
  curve.n = basis.sites();
  const int lmax = (curve.n + 1) / 2;
  for (int l = 1; l <= lmax; ++l) curve.points.push_back({l, region_entropy(v, basis, all_sites(l))});
  return curve;
}

double entropy_scaling_slope(const EntropyCurve& curve, int lo, int hi) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (const EntropyPoint& p : curve.points) {
    if (p.l < lo || p.l > hi) continue;
    const double x = std::log(std::sin(std::numbers::pi * p.l / curve.n)) / 3.0;
    sx += x;
    sy += p.s;
    sxx += x * x;
    sxy += x * p.s;
    ++count;
  }
  if (count < 2) throw RangeError("slope fit needs at least two points");
  const double denom = count * sxx - sx * sx;
  if (std::abs(denom) < 1e-300) throw RangeError("slope fit abscissae coincide");
  return (count * sxy - sx * sy) / denom;
}

namespace {

// Sum over configurations of |v|^2 n_i n_j, in fixed chunks so the result is
// independent of the thread count.
Eigen::MatrixXd pair_occupations(std::span<const cplx> v, const SectorBasis& basis) {
  const int n = basis.sites();
  const std::uint64_t dim = basis.dimension();
  constexpr std::uint64_t kChunk = 1u << 14;
  const std::int64_t nchunks = static_cast<std::int64_t>((dim + kChunk - 1) / kChunk);
  std::vector<Eigen::MatrixXd> partial(static_cast<std::size_t>(nchunks));
#pragma omp parallel for schedule(dynamic)
  for (std::int64_t ch = 0; ch < nchunks; ++ch) {
    Eigen::MatrixXd acc = Eigen::MatrixXd::Zero(n, n);
    const std::uint64_t begin = static_cast<std::uint64_t>(ch) * kChunk;
    const std::uint64_t end = std::min(dim, begin + kChunk);
    for (std::uint64_t k = begin; k < end; ++k) {
      const double p = std::norm(v[k]);
      const Configuration c = basis.state(k);
      for (Configuration a = c; a; a &= a - 1) {
        const int i = __builtin_ctzll(a);
        for (Configuration b = c; b; b &= b - 1) acc(i, __builtin_ctzll(b)) += p;
      }
    }
    partial[static_cast<std::size_t>(ch)] = std::move(acc);
  }
  Eigen::MatrixXd total = Eigen::MatrixXd::Zero(n, n);
  for (const auto& p : partial) total += p;
  return total;
}

}  // namespace

std::vector<double> densities(std::span<const cplx> v, const SectorBasis& basis) {
  require_basis(v, basis);
  const Eigen::MatrixXd occ = pair_occupations(v, basis);
  std::vector<double> out(static_cast<std::size_t>(basis.sites()));
  for (int i = 0; i < basis.sites(); ++i) out[static_cast<std::size_t>(i)] = occ(i, i);
  return out;
}

Eigen::MatrixXd g2_matrix(std::span<const cplx> v, const SectorBasis& basis) {
  require_basis(v, basis);
  const Eigen::MatrixXd occ = pair_occupations(v, basis);
  const Eigen::VectorXd dens = occ.diagonal();
  return occ - dens * dens.transpose();
}

CorrelationCurve g2_curve(std::span<const cplx> v, const SectorBasis& basis) {
  const Eigen::MatrixXd g = g2_matrix(v, basis);
  CorrelationCurve curve;
  curve.n = basis.sites();
  const int n = curve.n;
  for (int d = 0; d <= n / 2; ++d) {
    double sum = 0.0;
    for (int i = 0; i < n; ++i) sum += g(i, (i + d) % n);
    curve.points.push_back({d, sum / n});
  }
  return curve;
}

std::vector<std::pair<int, int>> multiplets(std::span<const double> energies, double deg_tol) {
  std::vector<std::pair<int, int>> out;
  if (energies.empty()) return out;
  const auto [lo, hi] = std::minmax_element(energies.begin(), energies.end());
  const double gap_tol = deg_tol * std::max(*hi - *lo, 1e-300);
  int begin = 0;
  for (int i = 1; i <= static_cast<int>(energies.size()); ++i) {
    if (i == static_cast<int>(energies.size()) ||
        energies[static_cast<std::size_t>(i)] - energies[static_cast<std::size_t>(i) - 1] > gap_tol) {
      out.emplace_back(begin, i);
      begin = i;
    }
  }
  return out;
}

SpectrumReport normalized_spectrum(std::span<const double> energies, double deg_tol) {
  if (energies.size() < 2) throw DegenerateSpectrum("normalization needs at least two levels");
  SpectrumReport r;
  r.raw.assign(energies.begin(), energies.end());
  const double e0 = *std::min_element(energies.begin(), energies.end());
  const double emax = *std::max_element(energies.begin(), energies.end());
  const double threshold = e0 + deg_tol * (emax - e0);
  double e1 = emax;
  for (const double e : energies) {
    if (e > threshold) e1 = std::min(e1, e);
  }
  if (!(e1 > e0)) throw DegenerateSpectrum("all energies coincide");
  for (const double e : energies) r.normalized.push_back((e - e0) / (e1 - e0));
  return r;
}

ExcitedMatch match_excited(const EigenResult& local, const EigenResult& exact, int n, double deg_tol) {
  if (exact.size() < local.size()) throw DimensionMismatch("exact window has fewer levels than the local one");
  if (local.size() == 0) return {};
  const auto lm = multiplets(local.energies, deg_tol);
  const auto em = multiplets(exact.energies, deg_tol);
  const auto k = static_cast<int>(local.size());
  const auto ke = static_cast<int>(exact.size());

  ExcitedMatch out;
  Eigen::MatrixXcd gram(k, ke);
  for (int i = 0; i < k; ++i) {
    for (int j = 0; j < ke; ++j) {
      gram(i, j) = vec::dot(local.vectors[static_cast<std::size_t>(i)], exact.vectors[static_cast<std::size_t>(j)]);
    }
  }

  out.overlaps.resize(local.size());
  out.partner.resize(local.size());
  bool reordered = false;
  bool cut = false;
  for (std::size_t a = 0; a < lm.size(); ++a) {
    const auto [lb, le] = lm[a];
    std::size_t best = 0;
    double best_weight = -1.0;
    for (std::size_t b = 0; b < em.size(); ++b) {
      const auto [eb, ee] = em[b];
      const double w = gram.block(lb, eb, le - lb, ee - eb).squaredNorm();
      if (w > best_weight) {
        best_weight = w;
        best = b;
      }
    }
    const auto [eb, ee] = em[best];
    reordered = reordered || eb != lb;
    out.structure_mismatch = out.structure_mismatch || ee - eb != le - lb;
    cut = cut || ee == ke;
    const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(gram.block(lb, eb, le - lb, ee - eb));
    const Eigen::Index rank = svd.singularValues().size();
    for (int i = lb; i < le; ++i) {
      const Eigen::Index r = i - lb;
      const double sigma = r < rank ? svd.singularValues()(r) : 0.0;
      OverlapReport& rep = out.overlaps[static_cast<std::size_t>(i)];
      rep.delta = sigma * sigma;
      rep.delta_per_site = std::pow(rep.delta, 1.0 / n);
      out.partner[static_cast<std::size_t>(i)] = eb;
    }
  }
  if (out.structure_mismatch) {
    out.warnings.push_back("degenerate multiplet structure differs between local and exact spectra");
  }
  if (reordered) out.warnings.push_back("some levels are matched to exact levels of a different index");
  if (cut) out.warnings.push_back("the top exact multiplet may be cut by the window");
  return out;
}

}  // namespace critchain
