#pragma once

#include <cstdint>
#include <filesystem>
#include <span>

#include "critchain/hamiltonian.hpp"
#include "critchain/vector_ops.hpp"

namespace critchain {

/// Binary state-vector file, all fields little-endian:
///
///   offset  size  field
///        0     4  magic "CCH1"
///        4     4  q        (uint32)
///        8     4  N        (uint32)
///       12     4  kind tag (uint32: exact 0, nn 1, nnn 2, nn-opt 3, nnn-opt 4)
///       16     4  reserved (zero)
///       20     8  U        (IEEE-754 double)
///       28     8  D        (uint64)
///       36     8  FNV-1a 64 checksum of the payload bytes
///       44  16*D  payload: (Re, Im) doubles per component
namespace cache_file {

constexpr std::size_t kHeaderBytes = 44;

std::uint32_t kind_tag(ModelKind kind);
ModelKind kind_from_tag(std::uint32_t tag);

struct CachedVector {
  ModelSpec spec;
  StateVector vector;
};

void save(const std::filesystem::path& path, const ModelSpec& spec, std::span<const cplx> v);
/// Throws FormatError on bad magic, truncation, checksum mismatch, or a
/// vector whose norm is not within 1e-10 of one.
CachedVector load(const std::filesystem::path& path);

}  // namespace cache_file

}  // namespace critchain
