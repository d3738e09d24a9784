#include "critchain/commands.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <omp.h>

#include <CLI11.hpp>
#include <json.hpp>

#include "critchain/analytic.hpp"
#include "critchain/cache_file.hpp"
#include "critchain/errors.hpp"
#include "critchain/lattice.hpp"
#include "critchain/observables.hpp"

namespace critchain::cli {

namespace {

constexpr int kCsvDigits = 12;

void write_header(const Options& opts, std::ostream& out) {
  out << "# critchain " << to_canonical(opts.cfg) << '\n';
  if (!opts.reproducible) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    out << "# generated " << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ") << '\n';
  }
  out << std::setprecision(kCsvDigits);
}

std::optional<ReferenceTable> reference_of(const Options& opts) {
  if (opts.reference.empty()) return std::nullopt;
  return ReferenceTable::load(opts.reference);
}

std::string cache_dir_of(const Options& opts) {
  if (!opts.cfg.cache_dir.empty()) return opts.cfg.cache_dir;
  if (const char* env = std::getenv("CRITCHAIN_CACHE_DIR")) return env;
  return {};
}

std::filesystem::path cache_path(const std::string& dir, const ModelSpec& spec, std::uint64_t seed,
                                 int k, int index) {
  std::ostringstream name;
  name << kind_name(spec.kind) << "_q" << spec.q << "_n" << spec.n << "_u" << format_double(spec.u)
       << "_seed" << seed << "_k" << k << "_" << index << ".cch";
  return std::filesystem::path(dir) / name.str();
}

std::unique_ptr<LinearOperator> operator_for(const ModelSpec& spec, const SectorBasis& basis, int k,
                                             const Options& opts) {
  return make_operator(spec, basis, opts.budget_bytes, opts.basis_size + 2 * k + 6);
}

// Rebuilds energies and residuals for cached vectors; empty on any mismatch.
std::optional<EigenResult> load_cached(const std::string& dir, const ModelSpec& spec, std::uint64_t seed,
                                       int k, double tol, const LinearOperator& op) {
  EigenResult r;
  StateVector hv(op.dimension());
  for (int i = 0; i < k; ++i) {
    const auto path = cache_path(dir, spec, seed, k, i);
    if (!std::filesystem::exists(path)) return std::nullopt;
    cache_file::CachedVector cv;
    try {
      cv = cache_file::load(path);
    } catch (const FormatError&) {
      return std::nullopt;
    }
    if (!(cv.spec == spec) || cv.vector.size() != op.dimension()) return std::nullopt;
    op.apply(cv.vector, hv);
    const double e = vec::dot(cv.vector, hv).real();
    vec::axpy(-e, cv.vector, hv);
    const double res = vec::norm(hv);
    if (!(res < tol)) return std::nullopt;
    r.energies.push_back(e);
    r.residuals.push_back(res);
    r.vectors.push_back(std::move(cv.vector));
  }
  return r;
}

StateVector exact_state(const ModelSpec& spec, const SectorBasis& basis) {
  return build_state(spec.n, spec.q, basis);
}

std::string csv_number(double x) {
  std::ostringstream os;
  os << std::setprecision(kCsvDigits) << x;
  return os.str();
}

}  // namespace

ReferenceTable ReferenceTable::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open reference file " + path);
  ReferenceTable table;
  std::string line;
  bool header = true;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 7) throw FormatError("reference row needs 7 fields: " + line);
    try {
      table.values_[{std::stoi(f[1]), std::stoi(f[2]), f[3], std::stoi(f[4]), f[5]}] = std::stod(f[6]);
    } catch (const std::logic_error&) {
      throw FormatError("malformed reference row: " + line);
    }
  }
  return table;
}

std::optional<double> ReferenceTable::find(int q, int n, std::string_view kind, int state,
                                           std::string_view quantity) const {
  const auto it = values_.find({q, n, std::string(kind), state, std::string(quantity)});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

EigenResult solve(const ModelSpec& spec, int k, const Options& opts) {
  const SectorBasis basis = SectorBasis::for_model(spec.n, spec.q);
  const auto op = operator_for(spec, basis, k, opts);
  const std::uint64_t seed = opts.cfg.seed ? *opts.cfg.seed : default_seed(spec);
  const std::string dir = cache_dir_of(opts);
  if (!dir.empty()) {
    if (auto cached = load_cached(dir, spec, seed, k, opts.cfg.tol, *op)) return *cached;
  }
  LanczosOptions lo;
  lo.k = k;
  lo.tol = opts.cfg.tol;
  lo.seed = seed;
  lo.basis_size = opts.basis_size;
  EigenResult r = lowest_k(*op, lo);
  if (!dir.empty()) {
    std::filesystem::create_directories(dir);
    for (int i = 0; i < k; ++i) {
      cache_file::save(cache_path(dir, spec, seed, k, i), spec, r.vectors[static_cast<std::size_t>(i)]);
    }
  }
  return r;
}

void cmd_coefficients(const Options& opts, std::ostream& out) {
  const int q = opts.cfg.q, n = opts.cfg.n;
  if (q < 2) throw InvalidModel("q must be at least 2");
  if (n < 2 || n > kMaxSites) throw InvalidModel("N must be in 2..64");
  write_header(opts, out);
  const CouplingTable table(q, n);
  out << "distance,re_c1,im_c1,c2\n";
  for (int d = 1; d < n; ++d) {
    const CouplingPair& c = table.at_offset(d);
    out << d << ',' << c.c1.real() << ',' << c.c1.imag() << ',' << c.c2 << '\n';
  }
}

void cmd_ground(const Options& opts, std::ostream& out) {
  const ModelSpec spec = opts.cfg.model();
  const auto ref = reference_of(opts);
  const SectorBasis basis = SectorBasis::for_model(spec.n, spec.q);
  const int k = basis.dimension() > 1 ? 2 : 1;
  const EigenResult r = solve(spec, k, opts);
  const StateVector psi = exact_state(spec, basis);
  const OverlapReport ov = overlap(r.vectors.front(), psi, spec.n);

  write_header(opts, out);
  out << "q,n,kind,u,energy,gap,residual,delta,delta_per_site";
  if (ref) out << ",reference_delta,abs_deviation";
  out << '\n';
  out << spec.q << ',' << spec.n << ',' << kind_name(spec.kind) << ',' << spec.u << ',' << r.energies.front()
      << ',' << r.gap() << ',' << r.residuals.front() << ',' << ov.delta << ',' << ov.delta_per_site;
  if (ref) {
    const auto value = ref->find(spec.q, spec.n, kind_name(spec.kind), 1, "delta");
    out << ',' << (value ? csv_number(*value) : "") << ','
        << (value ? csv_number(std::abs(ov.delta - *value)) : "");
  }
  out << '\n';
}

void cmd_entropy(const Options& opts, std::ostream& out) {
  const ModelSpec spec = opts.cfg.model();
  const SectorBasis basis = SectorBasis::for_model(spec.n, spec.q);
  const EigenResult r = solve(spec, 1, opts);
  const StateVector psi = exact_state(spec, basis);
  const EntropyCurve model = entropy_curve(r.vectors.front(), basis);
  const EntropyCurve exact = entropy_curve(psi, basis);
  write_header(opts, out);
  out << "l,s_model,s_exact\n";
  for (std::size_t i = 0; i < model.points.size(); ++i) {
    out << model.points[i].l << ',' << model.points[i].s << ',' << exact.points[i].s << '\n';
  }
}

void cmd_g2(const Options& opts, std::ostream& out) {
  const ModelSpec spec = opts.cfg.model();
  const SectorBasis basis = SectorBasis::for_model(spec.n, spec.q);
  const EigenResult r = solve(spec, 1, opts);
  const StateVector psi = exact_state(spec, basis);
  const CorrelationCurve model = g2_curve(r.vectors.front(), basis);
  const CorrelationCurve exact = g2_curve(psi, basis);
  write_header(opts, out);
  out << "d,g2_model,g2_exact\n";
  for (std::size_t i = 0; i < model.points.size(); ++i) {
    out << model.points[i].d << ',' << model.points[i].g2 << ',' << exact.points[i].g2 << '\n';
  }
}

void cmd_spectrum(const Options& opts, std::ostream& out) {
  const ModelSpec spec = opts.cfg.model();
  const ModelSpec exact_spec = make_model(spec.q, spec.n, ModelKind::Exact);
  const EigenResult model = solve(spec, opts.cfg.k, opts);
  const EigenResult exact = solve(exact_spec, opts.cfg.k, opts);
  const SpectrumReport nm = normalized_spectrum(model.energies);
  const SpectrumReport ne = normalized_spectrum(exact.energies);
  write_header(opts, out);
  out << "state,energy_model,normalized_model,energy_exact,normalized_exact\n";
  for (std::size_t i = 0; i < model.size(); ++i) {
    out << i + 1 << ',' << nm.raw[i] << ',' << nm.normalized[i] << ',' << ne.raw[i] << ',' << ne.normalized[i]
        << '\n';
  }
}

void cmd_excited(const Options& opts, std::ostream& out) {
  const ModelSpec spec = opts.cfg.model();
  const ModelSpec exact_spec = make_model(spec.q, spec.n, ModelKind::Exact);
  const auto ref = reference_of(opts);
  const EigenResult model = solve(spec, opts.cfg.k, opts);
  const EigenResult exact = solve(exact_spec, opts.cfg.k + kExactWindowMargin, opts);
  const ExcitedMatch match = match_excited(model, exact, spec.n);
  write_header(opts, out);
  for (const std::string& w : match.warnings) out << "# warning: " << w << '\n';
  out << "state,energy_model,exact_state,energy_exact,delta,delta_per_site";
  if (ref) out << ",reference_delta,abs_deviation";
  out << '\n';
  for (std::size_t i = 0; i < model.size(); ++i) {
    const OverlapReport& ov = match.overlaps[i];
    const auto partner = static_cast<std::size_t>(match.partner[i]);
    out << i + 1 << ',' << model.energies[i] << ',' << partner + 1 << ',' << exact.energies[partner] << ','
        << ov.delta << ',' << ov.delta_per_site;
    if (ref) {
      const auto value = ref->find(spec.q, spec.n, kind_name(spec.kind), static_cast<int>(i) + 1, "delta");
      out << ',' << (value ? csv_number(*value) : "") << ','
          << (value ? csv_number(std::abs(ov.delta - *value)) : "");
    }
    out << '\n';
  }
}

void cmd_optimize_u(const Options& opts, std::ostream& out) {
  const RunConfig& cfg = opts.cfg;
  if (!is_optimized(cfg.kind)) throw InvalidModel("optimize-u needs --kind nn-opt or nnn-opt");
  make_model(cfg.q, cfg.n, cfg.kind, 1.0);
  const auto ref = reference_of(opts);
  OptimizeOptions oo = opts.optimize;
  oo.lanczos_tol = cfg.tol;
  oo.basis_size = opts.basis_size;
  oo.budget_bytes = opts.budget_bytes;
  const ScanResult scan = optimize_u(cfg.q, cfg.n, cfg.kind, oo);

  nlohmann::ordered_json j;
  j["config"] = to_canonical(cfg);
  if (!opts.reproducible) {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::ostringstream ts;
    ts << std::put_time(std::gmtime(&now), "%Y-%m-%dT%H:%M:%SZ");
    j["generated"] = ts.str();
  }
  j["best_u"] = scan.best_u;
  j["best_delta"] = scan.best_delta;
  j["bracket"] = {scan.bracket.first, scan.bracket.second};
  j["boundary"] = scan.boundary;
  j["crossings"] = scan.crossings;
  auto samples = nlohmann::ordered_json::array();
  for (const ScanSample& s : scan.samples) samples.push_back({{"u", s.u}, {"delta", s.delta}});
  j["samples"] = samples;
  if (ref) {
    if (const auto value = ref->find(cfg.q, 0, kind_name(cfg.kind), 1, "best_u")) {
      j["reference"] = *value;
      j["abs_deviation"] = std::abs(scan.best_u - *value);
    }
  }
  out << j.dump(2) << '\n';
}

void cmd_analytic_state(const Options& opts, std::ostream& out) {
  const RunConfig& cfg = opts.cfg;
  if (cfg.out.empty()) throw FormatError("analytic-state needs --out FILE");
  const ModelSpec spec = make_model(cfg.q, cfg.n, ModelKind::Exact);
  const MemoryEstimate est = estimate_memory(spec);
  const double need = est.basis_bytes + 3 * est.vector_bytes;
  if (need > opts.budget_bytes) throw ResourceError("analytic state exceeds memory budget", need);
  const SectorBasis basis = SectorBasis::for_model(spec.n, spec.q);
  cache_file::save(cfg.out, spec, build_state(spec.n, spec.q, basis));
  out << "# critchain " << to_canonical(cfg) << "\nwrote " << basis.dimension() << " amplitudes to " << cfg.out
      << '\n';
}

namespace {

double default_budget() {
  const long pages = sysconf(_SC_PHYS_PAGES);
  const long page = sysconf(_SC_PAGE_SIZE);
  if (pages > 0 && page > 0) return 0.8 * static_cast<double>(pages) * static_cast<double>(page);
  return 4e9;
}

using Command = void (*)(const Options&, std::ostream&);

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Exact and local Hamiltonians of 1D critical lattice models"};
  app.require_subcommand(1);

  Options opts;
  opts.budget_bytes = default_budget();
  std::string kind = "exact";
  std::optional<double> u;
  std::optional<std::uint64_t> seed;
  int threads = 0;
  double budget_gb = 0.0;
  std::string bracket = "0.1,8.0";

  const std::vector<std::pair<std::string, std::pair<std::string, Command>>> commands{
      {"coefficients", {"Hopping and density-density couplings versus distance (CSV)", cmd_coefficients}},
      {"ground", {"Ground-state energy, gap and overlap with the Jastrow state (CSV)", cmd_ground}},
      {"entropy", {"Entanglement entropy of L consecutive sites (CSV)", cmd_entropy}},
      {"g2", {"Density-density correlation versus distance (CSV)", cmd_g2}},
      {"spectrum", {"Lowest k levels, raw and normalized, model and exact (CSV)", cmd_spectrum}},
      {"excited", {"Overlaps between low-lying states of the model and the exact model (CSV)", cmd_excited}},
      {"optimize-u", {"Scan U for maximal ground-state overlap (JSON)", cmd_optimize_u}},
      {"analytic-state", {"Write the normalized Jastrow state as a vector cache file", cmd_analytic_state}},
  };

  std::map<CLI::App*, Command> dispatch;
  for (const auto& [name, entry] : commands) {
    CLI::App* sub = app.add_subcommand(name, entry.first);
    dispatch[sub] = entry.second;
    sub->add_option("--q", opts.cfg.q, "Filling denominator q (2, 3 or 4)")->required();
    sub->add_option("--n", opts.cfg.n, "Number of sites N")->required();
    sub->add_option("--out", opts.cfg.out, "Output file (default stdout)");
    sub->add_flag("--reproducible", opts.reproducible, "Omit the timestamp");
    if (name == "coefficients") continue;
    sub->add_option("--kind", kind, "exact | nn | nnn | nn-opt | nnn-opt");
    sub->add_option("--u", u, "Density-density scale for optimized kinds");
    sub->add_option("--k", opts.cfg.k, "Number of eigenpairs");
    sub->add_option("--tol", opts.cfg.tol, "Residual tolerance");
    sub->add_option("--seed", seed, "Lanczos seed (default: hash of the model)");
    sub->add_option("--cache-dir", opts.cfg.cache_dir, "Eigenvector cache directory (env CRITCHAIN_CACHE_DIR)");
    sub->add_option("--threads", threads, "OpenMP threads (default: all)");
    sub->add_option("--mem-budget", budget_gb, "Memory budget in GB (default: 80% of RAM)");
    sub->add_option("--basis-size", opts.basis_size, "Lanczos basis size");
    sub->add_option("--reference", opts.reference, "Published-values CSV for a comparison column");
    if (name == "optimize-u") {
      sub->add_option("--bracket", bracket, "U interval LO,HI");
      sub->add_option("--step", opts.optimize.step, "Coarse grid spacing");
      sub->add_option("--u-tol", opts.optimize.tol, "Final bracket width");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kInvalidModel;
  }

  CLI::App* sub = app.get_subcommands().front();
  opts.cfg.command = sub->get_name();
  try {
    opts.cfg.kind = parse_kind(kind);
    opts.cfg.u = u;
    opts.cfg.seed = seed;
    if (threads > 0) omp_set_num_threads(threads);
    if (budget_gb > 0.0) opts.budget_bytes = budget_gb * 1e9;
    if (opts.cfg.command == "optimize-u") {
      const auto comma = bracket.find(',');
      if (comma == std::string::npos) throw InvalidModel("--bracket expects LO,HI");
      opts.optimize.lo = std::stod(bracket.substr(0, comma));
      opts.optimize.hi = std::stod(bracket.substr(comma + 1));
    }

    const Command cmd = dispatch.at(sub);
    if (opts.cfg.out.empty() || opts.cfg.command == "analytic-state") {
      cmd(opts, std::cout);
    } else {
      std::ostringstream buffer;
      cmd(opts, buffer);
      std::ofstream file(opts.cfg.out);
      if (!file) throw FormatError("cannot open " + opts.cfg.out);
      file << buffer.str();
    }
    return kOk;
  } catch (const InvalidModel& e) {
    std::cerr << "invalid model: " << e.what() << '\n';
    return kInvalidModel;
  } catch (const ResourceError& e) {
    std::cerr << "resource limit: " << e.what() << '\n';
    return kResource;
  } catch (const ConvergenceError& e) {
    std::cerr << "no convergence: " << e.what() << '\n';
    return kNoConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "invalid argument: " << e.what() << '\n';
    return kInvalidModel;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kFailure;
  }
}

}  // namespace critchain::cli
