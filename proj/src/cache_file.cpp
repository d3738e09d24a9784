#include "critchain/cache_file.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

#include "critchain/errors.hpp"
#include "critchain/fnv.hpp"

namespace critchain::cache_file {

namespace {

constexpr std::array<char, 4> kMagic{'C', 'C', 'H', '1'};

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

void put_f64(std::vector<unsigned char>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

}  // namespace

std::uint32_t kind_tag(ModelKind kind) { return static_cast<std::uint32_t>(kind); }

ModelKind kind_from_tag(std::uint32_t tag) {
  if (tag > static_cast<std::uint32_t>(ModelKind::NNNOpt)) {
    throw FormatError("unknown model kind tag " + std::to_string(tag));
  }
  return static_cast<ModelKind>(tag);
}

void save(const std::filesystem::path& path, const ModelSpec& spec, std::span<const cplx> v) {
  std::vector<unsigned char> payload;
  payload.reserve(v.size() * 16);
  for (const cplx& x : v) {
    put_f64(payload, x.real());
    put_f64(payload, x.imag());
  }
  Fnv1a hash;
  hash.update(payload);

  std::vector<unsigned char> header(kMagic.begin(), kMagic.end());
  put_u32(header, static_cast<std::uint32_t>(spec.q));
  put_u32(header, static_cast<std::uint32_t>(spec.n));
  put_u32(header, kind_tag(spec.kind));
  put_u32(header, 0);
  put_f64(header, spec.u);
  put_u64(header, v.size());
  put_u64(header, hash.digest());

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw FormatError("cannot open " + path.string() + " for writing");
  os.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  os.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  if (!os) throw FormatError("write failed for " + path.string());
}

CachedVector load(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open " + path.string());
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0) {
    throw FormatError(path.string() + " is not a vector cache file");
  }
  const unsigned char* h = bytes.data();
  CachedVector out;
  out.spec.q = static_cast<int>(get_u32(h + 4));
  out.spec.n = static_cast<int>(get_u32(h + 8));
  out.spec.kind = kind_from_tag(get_u32(h + 12));
  out.spec.u = std::bit_cast<double>(get_u64(h + 20));
  const std::uint64_t dim = get_u64(h + 28);
  const std::uint64_t checksum = get_u64(h + 36);
  if (bytes.size() - kHeaderBytes != dim * 16) throw FormatError(path.string() + " is truncated");

  const std::span<const unsigned char> payload(bytes.data() + kHeaderBytes, dim * 16);
  Fnv1a hash;
  hash.update(payload);
  if (hash.digest() != checksum) throw FormatError(path.string() + ": checksum mismatch");

  out.vector.resize(dim);
  for (std::uint64_t i = 0; i < dim; ++i) {
    const unsigned char* p = payload.data() + 16 * i;
    out.vector[i] = {std::bit_cast<double>(get_u64(p)), std::bit_cast<double>(get_u64(p + 8))};
  }
  const double nrm = vec::norm(out.vector);
  if (std::abs(nrm - 1.0) > 1e-10) throw FormatError(path.string() + ": stored vector is not normalized");
  return out;
}

}  // namespace critchain::cache_file
