#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <tuple>

#include "critchain/eigensolve.hpp"
#include "critchain/optimize.hpp"
#include "critchain/run_config.hpp"

namespace critchain::cli {

/// Exit codes of the command-line tool.
enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kInvalidModel = 2,
  kResource = 3,
  kNoConvergence = 4,
};

struct Options {
  RunConfig cfg;
  bool reproducible = false;
  std::string reference;  // published-values CSV
  double budget_bytes = 4e9;
  int basis_size = 30;
  OptimizeOptions optimize;
};

/// Published values keyed by (q, N, kind, state, quantity). N = 0 marks
/// size-independent rows (optimal U).
class ReferenceTable {
 public:
  static ReferenceTable load(const std::string& path);
  std::optional<double> find(int q, int n, std::string_view kind, int state, std::string_view quantity) const;
  std::size_t size() const { return values_.size(); }

 private:
  std::map<std::tuple<int, int, std::string, int, std::string>, double> values_;
};

/// Lowest k eigenpairs of a model, reusing vector cache files in
/// cfg.cache_dir when they exist and still satisfy the tolerance.
EigenResult solve(const ModelSpec& spec, int k, const Options& opts);

/// Each command writes its full output (header comment + CSV or JSON).
void cmd_coefficients(const Options& opts, std::ostream& out);
void cmd_ground(const Options& opts, std::ostream& out);
void cmd_entropy(const Options& opts, std::ostream& out);
void cmd_g2(const Options& opts, std::ostream& out);
void cmd_spectrum(const Options& opts, std::ostream& out);
void cmd_excited(const Options& opts, std::ostream& out);
void cmd_optimize_u(const Options& opts, std::ostream& out);
/// Writes the normalized Jastrow state to cfg.out in the cache format.
void cmd_analytic_state(const Options& opts, std::ostream& out);

/// Parses argv, dispatches, and maps errors to exit codes.
int run(int argc, char** argv);

}  // namespace critchain::cli
