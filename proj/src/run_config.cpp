#include "critchain/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>
#include <vector>

#include "critchain/eigensolve.hpp"
#include "critchain/errors.hpp"
#include "critchain/optimize.hpp"

namespace critchain {

ModelSpec RunConfig::model() const {
  if (is_optimized(kind)) return make_model(q, n, kind, u ? *u : tabulated_optimal_u(q, kind));
  if (u && *u != 1.0) throw InvalidModel("--u only applies to nn-opt and nnn-opt");
  return make_model(q, n, kind);
}

std::uint64_t RunConfig::effective_seed() const { return seed ? *seed : default_seed(model()); }

bool operator==(const RunConfig& a, const RunConfig& b) {
  return a.command == b.command && a.q == b.q && a.n == b.n && a.kind == b.kind && a.u == b.u &&
         a.k == b.k && a.tol == b.tol && a.seed == b.seed && a.out == b.out && a.cache_dir == b.cache_dir;
}

namespace {

std::string escape(std::string_view s) {
  std::string out;
  for (const char c : s) {
    if (c == '%') {
      out += "%25";
    } else if (c == ' ') {
      out += "%20";
    } else {
      out += c;
    }
  }
  return out;
}

std::string unescape(std::string_view s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s.substr(i, 3) == "%25") {
      out += '%';
      i += 2;
    } else if (s.substr(i, 3) == "%20") {
      out += ' ';
      i += 2;
    } else {
      out += s[i];
    }
  }
  return out;
}

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw FormatError("bad value '" + std::string(value) + "' for key " + std::string(key));
  }
  return out;
}

}  // namespace

std::string to_canonical(const RunConfig& cfg) {
  std::ostringstream os;
  os << "command=" << escape(cfg.command) << " q=" << cfg.q << " n=" << cfg.n
     << " kind=" << kind_name(cfg.kind) << " u=" << (cfg.u ? format_double(*cfg.u) : "auto")
     << " k=" << cfg.k << " tol=" << format_double(cfg.tol)
     << " seed=" << (cfg.seed ? std::to_string(*cfg.seed) : "auto") << " out=" << escape(cfg.out)
     << " cache=" << escape(cfg.cache_dir);
  return os.str();
}

RunConfig parse_canonical(std::string_view text) {
  static const std::vector<std::string> kKeys{"command", "q",   "n",    "kind", "u",
                                              "k",       "tol", "seed", "out",  "cache"};
  RunConfig cfg;
  std::vector<std::string> seen;
  std::istringstream is{std::string(text)};
  std::string token;
  while (is >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos) throw FormatError("expected key=value, got '" + token + "'");
    const std::string key = token.substr(0, eq);
    const std::string value = token.substr(eq + 1);
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) {
      throw FormatError("duplicate config key '" + key + "'");
    }
    seen.push_back(key);
    if (key == "command") {
      cfg.command = unescape(value);
    } else if (key == "q") {
      cfg.q = parse_number<int>(key, value);
    } else if (key == "n") {
      cfg.n = parse_number<int>(key, value);
    } else if (key == "kind") {
      try {
        cfg.kind = parse_kind(value);
      } catch (const InvalidModel& e) {
        throw FormatError(e.what());
      }
    } else if (key == "u") {
      cfg.u = value == "auto" ? std::nullopt : std::optional<double>(parse_number<double>(key, value));
    } else if (key == "k") {
      cfg.k = parse_number<int>(key, value);
    } else if (key == "tol") {
      cfg.tol = parse_number<double>(key, value);
    } else if (key == "seed") {
      cfg.seed = value == "auto" ? std::nullopt
                                 : std::optional<std::uint64_t>(parse_number<std::uint64_t>(key, value));
    } else if (key == "out") {
      cfg.out = unescape(value);
    } else if (key == "cache") {
      cfg.cache_dir = unescape(value);
    } else {
      throw FormatError("unknown config key '" + key + "'");
    }
  }
  for (const std::string& key : kKeys) {
    if (std::find(seen.begin(), seen.end(), key) == seen.end()) {
      throw FormatError("missing config key '" + key + "'");
    }
  }
  return cfg;
}

}  // namespace critchain
