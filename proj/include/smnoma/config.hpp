#ifndef SMNOMA_CONFIG_HPP
#define SMNOMA_CONFIG_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace smnoma {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class PairingMode { kPerTrial, kFixed };
enum class AllocMode { kRoundRobin, kGreedy, kExhaustive };
enum class RateDecomposition { kMarginal, kConditional };

/// Full experiment description. Immutable after load; share freely across
/// workers.
struct SystemConfig {
  int n_tx = 8;                     // total BS antennas
  int n_rx = 8;                     // antennas per user
  int n_pairs = 4;                  // K (users = 2K)
  int qam_order = 64;               // constellation size M
  double bandwidth_hz = 4.32e6;
  double noise_density_dbm_hz = -169.0;
  std::vector<double> distances_km;  // 2K entries, per user
  std::vector<double> snr_grid_db;
  int n_trials = 100000;
  std::uint64_t seed = 1;
  double noma_power_split = 0.8;    // fraction of cluster power to weak user

  // tunables with defaults (all serialized for reproducibility)
  int mi_noise_samples = 200;
  PairingMode pairing_mode = PairingMode::kPerTrial;
  AllocMode alloc_mode = AllocMode::kRoundRobin;
  RateDecomposition rate_decomposition = RateDecomposition::kMarginal;
  // default is the literal max-|correlation| rule; the compensated variant
  // |h^H y|/||h|| removes the strong-column bias (and makes noiseless index
  // detection exact)
  bool mrc_norm_compensated = false;

  int n_users() const { return 2 * n_pairs; }
  int group_size() const { return n_tx / n_pairs; }
  int index_bits_per_use() const;
  int symbol_bits_per_use() const;
};

namespace detail {

inline bool is_power_of_two(int v) { return v > 0 && (v & (v - 1)) == 0; }

inline int log2_int(int v) {
  int b = 0;
  while ((1 << b) < v) ++b;
  return b;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline std::string join_list(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ",";
    out += format_double(xs[i]);
  }
  return out;
}

}  // namespace detail

inline int SystemConfig::index_bits_per_use() const {
  return detail::log2_int(group_size());
}
inline int SystemConfig::symbol_bits_per_use() const {
  return detail::log2_int(qam_order);
}

inline const char* to_string(PairingMode m) {
  return m == PairingMode::kPerTrial ? "per_trial" : "fixed";
}
inline const char* to_string(AllocMode m) {
  switch (m) {
    case AllocMode::kRoundRobin: return "roundrobin";
    case AllocMode::kGreedy: return "greedy";
    default: return "exhaustive";
  }
}
inline const char* to_string(RateDecomposition m) {
  return m == RateDecomposition::kMarginal ? "marginal" : "conditional";
}

inline void validate_config(const SystemConfig& c) {
  auto fail = [](const std::string& what) {
    throw ConfigError("invalid config: " + what);
  };
  if (c.n_tx <= 0) fail("n_tx must be positive");
  if (c.n_rx <= 0) fail("n_rx must be positive");
  if (c.n_pairs <= 0) fail("n_pairs must be positive");
  if (c.n_tx % c.n_pairs != 0) fail("n_tx mod n_pairs != 0");
  if (!detail::is_power_of_two(c.n_tx / c.n_pairs))
    fail("group size n_tx/n_pairs must be a power of two");
  if (!detail::is_power_of_two(c.qam_order) || c.qam_order < 2)
    fail("qam_order must be a power of two >= 2");
  if (c.bandwidth_hz <= 0) fail("bandwidth_hz must be positive");
  if (static_cast<int>(c.distances_km.size()) != 2 * c.n_pairs)
    fail("distances_km must have exactly 2*n_pairs entries");
  for (double d : c.distances_km)
    if (!(d > 0)) fail("distances_km entries must be positive");
  if (c.snr_grid_db.empty()) fail("snr_grid_db must be nonempty");
  for (std::size_t i = 1; i < c.snr_grid_db.size(); ++i)
    if (!(c.snr_grid_db[i] > c.snr_grid_db[i - 1]))
      fail("snr_grid_db must be strictly increasing");
  if (c.n_trials < 1) fail("n_trials must be >= 1");
  if (!(c.noma_power_split > 0.0 && c.noma_power_split < 1.0))
    fail("power split must be in open interval (0,1)");
  if (c.mi_noise_samples < 1) fail("mi_noise_samples must be >= 1");
}

/// The simulation setup used throughout: 4.32 MHz, -169 dBm/Hz, index users
/// at 0.15 km, symbol users at 0.1 km, 100k realizations.
inline SystemConfig default_config() {
  SystemConfig c;
  c.n_tx = 8;
  c.n_rx = 8;
  c.n_pairs = 4;
  c.qam_order = 64;
  c.bandwidth_hz = 4.32e6;
  c.noise_density_dbm_hz = -169.0;
  c.distances_km.clear();
  for (int p = 0; p < c.n_pairs; ++p) {
    c.distances_km.push_back(0.15);
    c.distances_km.push_back(0.10);
  }
  c.snr_grid_db = {0, 5, 10, 15, 20, 25, 30, 35};
  c.n_trials = 100000;
  c.seed = 1;
  c.noma_power_split = 0.8;
  validate_config(c);
  return c;
}

/// Desk-scale variant of the default setup: same grid, 10k trials.
inline SystemConfig desk_scale_config() {
  SystemConfig c = default_config();
  c.n_trials = 10000;
  return c;
}

inline std::string serialize_config(const SystemConfig& c) {
  std::ostringstream os;
  os << "n_tx = " << c.n_tx << "\n";
  os << "n_rx = " << c.n_rx << "\n";
  os << "n_pairs = " << c.n_pairs << "\n";
  os << "qam_order = " << c.qam_order << "\n";
  os << "bandwidth_hz = " << detail::format_double(c.bandwidth_hz) << "\n";
  os << "noise_density_dbm_hz = "
     << detail::format_double(c.noise_density_dbm_hz) << "\n";
  os << "distances_km = " << detail::join_list(c.distances_km) << "\n";
  os << "snr_grid_db = " << detail::join_list(c.snr_grid_db) << "\n";
  os << "n_trials = " << c.n_trials << "\n";
  os << "seed = " << c.seed << "\n";
  os << "noma_power_split = " << detail::format_double(c.noma_power_split)
     << "\n";
  os << "mi_noise_samples = " << c.mi_noise_samples << "\n";
  os << "pairing_mode = " << to_string(c.pairing_mode) << "\n";
  os << "alloc_mode = " << to_string(c.alloc_mode) << "\n";
  os << "rate_decomposition = " << to_string(c.rate_decomposition) << "\n";
  os << "mrc_norm_compensated = " << (c.mrc_norm_compensated ? 1 : 0) << "\n";
  return os.str();
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("invalid config: malformed line '" + line + "'");
    kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return kv;
}

inline std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::istringstream is(s);
  std::string tok;
  while (std::getline(is, tok, ',')) {
    tok = trim(tok);
    if (tok.empty()) continue;
    out.push_back(std::stod(tok));
  }
  return out;
}

}  // namespace detail

/// Parses the flat key=value document. Unknown keys are rejected; missing
/// required keys are named in the error.
inline SystemConfig load_config(const std::string& text) {
  auto kv = detail::parse_kv(text);
  SystemConfig c;
  auto take = [&kv](const char* key) {
    auto it = kv.find(key);
    if (it == kv.end())
      throw ConfigError(std::string("missing field: ") + key);
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  auto take_opt = [&kv](const char* key, std::string def) {
    auto it = kv.find(key);
    if (it == kv.end()) return def;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  try {
    c.n_tx = std::stoi(take("n_tx"));
    c.n_rx = std::stoi(take("n_rx"));
    c.n_pairs = std::stoi(take("n_pairs"));
    c.qam_order = std::stoi(take("qam_order"));
    c.bandwidth_hz = std::stod(take("bandwidth_hz"));
    c.noise_density_dbm_hz = std::stod(take("noise_density_dbm_hz"));
    c.distances_km = detail::parse_list(take("distances_km"));
    c.snr_grid_db = detail::parse_list(take("snr_grid_db"));
    c.n_trials = std::stoi(take("n_trials"));
    c.seed = std::stoull(take("seed"));
    c.noma_power_split = std::stod(take("noma_power_split"));
    c.mi_noise_samples = std::stoi(take_opt("mi_noise_samples", "200"));
    const std::string pm = take_opt("pairing_mode", "per_trial");
    if (pm == "per_trial") c.pairing_mode = PairingMode::kPerTrial;
    else if (pm == "fixed") c.pairing_mode = PairingMode::kFixed;
    else throw ConfigError("invalid config: pairing_mode '" + pm + "'");
    const std::string am = take_opt("alloc_mode", "roundrobin");
    if (am == "roundrobin") c.alloc_mode = AllocMode::kRoundRobin;
    else if (am == "greedy") c.alloc_mode = AllocMode::kGreedy;
    else if (am == "exhaustive") c.alloc_mode = AllocMode::kExhaustive;
    else throw ConfigError("invalid config: alloc_mode '" + am + "'");
    const std::string rd = take_opt("rate_decomposition", "marginal");
    if (rd == "marginal") c.rate_decomposition = RateDecomposition::kMarginal;
    else if (rd == "conditional")
      c.rate_decomposition = RateDecomposition::kConditional;
    else throw ConfigError("invalid config: rate_decomposition '" + rd + "'");
    c.mrc_norm_compensated =
        std::stoi(take_opt("mrc_norm_compensated", "0")) != 0;
  } catch (const std::invalid_argument&) {
    throw ConfigError("invalid config: non-numeric value");
  } catch (const std::out_of_range&) {
    throw ConfigError("invalid config: value out of range");
  }
  if (!kv.empty())
    throw ConfigError("invalid config: unknown key '" + kv.begin()->first +
                      "'");
  validate_config(c);
  return c;
}

/// FNV-1a over the canonical serialization; recorded in every output row.
inline std::string config_digest(const SystemConfig& c) {
  const std::string s = serialize_config(c);
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : s) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace smnoma

#endif  // SMNOMA_CONFIG_HPP
