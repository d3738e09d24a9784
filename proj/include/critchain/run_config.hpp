#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "critchain/hamiltonian.hpp"

namespace critchain {

/// Everything a CLI run depends on. The canonical text form is written as the
/// header of every output file and parses back to an identical config.
struct RunConfig {
  std::string command;
  int q = 2;
  int n = 12;
  ModelKind kind = ModelKind::Exact;
  std::optional<double> u;  // optimized kinds fall back to the tabulated value
  int k = 8;
  double tol = 1e-10;
  std::optional<std::uint64_t> seed;  // default derived from the model
  std::string out;                    // empty means stdout
  std::string cache_dir;

  /// The model this run diagonalizes. Throws InvalidModel.
  ModelSpec model() const;
  std::uint64_t effective_seed() const;
};

bool operator==(const RunConfig& a, const RunConfig& b);

std::string to_canonical(const RunConfig& cfg);
/// Throws FormatError on unknown keys or malformed values.
RunConfig parse_canonical(std::string_view text);

}  // namespace critchain
