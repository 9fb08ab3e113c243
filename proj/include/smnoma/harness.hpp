#ifndef SMNOMA_HARNESS_HPP
#define SMNOMA_HARNESS_HPP

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "smnoma/rates.hpp"

namespace smnoma {

enum class Scheme { kSmn, kCmn };

inline const char* to_string(Scheme s) {
  return s == Scheme::kSmn ? "SMN" : "CMN";
}

struct SweepRow {
  std::string scheme;
  double snr_db = 0.0;
  double sum_rate = 0.0;
  double worst_rate = 0.0;
  double index_ber = 0.0;
  double symbol_ber = 0.0;
  int n_trials = 0;
  std::uint64_t seed = 0;
  std::string config_digest;
  std::vector<double> per_user_rates;  // kept in memory, not serialized
};

struct SweepResult {
  std::vector<SweepRow> rows;
};

struct BerResult {
  double index_ber = 0.0;
  double symbol_ber = 0.0;
  long long index_bit_errors = 0;
  long long symbol_bit_errors = 0;
  long long index_bits = 0;
  long long symbol_bits = 0;
};

namespace detail {

inline int popcount_bits(unsigned v) { return std::popcount(v); }

struct UseErrors {
  int index_errors = 0;
  int symbol_errors = 0;
};

/// One SM channel use through all pairs: map bits, transmit, whiten, detect,
/// count bit errors at both receivers of every pair.
inline UseErrors ber_channel_use(const SystemConfig& cfg,
                                 const Constellation& constellation,
                                 int use_index, double total_power,
                                 double noise_power, std::uint64_t snr_key) {
  const auto ch = gen_channel(cfg, use_index);
  const auto pairs = pairs_for_trial(ch, cfg);
  const auto partition = partition_for_trial(ch, pairs, cfg);
  const int k = cfg.n_pairs;
  const int l = cfg.group_size();
  const int m = cfg.qam_order;
  const double group_power = total_power / k;
  const double amp = std::sqrt(group_power);
  constexpr std::uint64_t kBerTag = 0x424552ULL;
  CounterRng rng{cfg.seed, kBerTag, static_cast<std::uint64_t>(use_index),
                 snr_key};

  // per-group transmissions
  std::vector<int> tx_antenna(k), tx_point(k);
  for (int g = 0; g < k; ++g) {
    tx_antenna[g] = static_cast<int>(rng.uniform_below(l));
    tx_point[g] = static_cast<int>(rng.uniform_below(m));
  }

  std::vector<unsigned> label_of(m);
  for (int n = 0; n < m; ++n)
    label_of[n] = string_to_bits(constellation.labels[n]);

  UseErrors errs;
  const double noise_amp = std::sqrt(noise_power);
  for (std::size_t g = 0; g < pairs.size(); ++g) {
    for (int side = 0; side < 2; ++side) {
      const bool is_index_user = side == 0;
      const int user =
          is_index_user ? pairs[g].index_user : pairs[g].symbol_user;
      const CMatrix& h = ch.per_user[user];
      // received signal: every group's active antenna plus this user's noise
      CVector y = CVector::Zero(cfg.n_rx);
      for (int og = 0; og < k; ++og) {
        const int ant = partition.groups[og][tx_antenna[og]];
        y += amp * constellation.points[tx_point[og]] * h.col(ant);
      }
      CounterRng nrng{cfg.seed, kBerTag + 1,
                      static_cast<std::uint64_t>(use_index), snr_key,
                      static_cast<std::uint64_t>(user)};
      for (int r = 0; r < cfg.n_rx; ++r)
        y(r) += noise_amp * nrng.complex_gaussian_unit();

      auto cols = group_columns(h, partition.groups[g], amp);
      const Whitener w(
          interference_covariance(h, partition, g, group_power), noise_power);
      y = w.apply(y);
      cols = w.apply(cols);

      if (is_index_user) {
        const auto det =
            mrc_detect_index(y, cols, cfg.mrc_norm_compensated);
        errs.index_errors += popcount_bits(
            static_cast<unsigned>(det.antenna_local ^ tx_antenna[g]));
      } else {
        const auto det = ml_detect(y, cols, constellation);
        errs.symbol_errors += popcount_bits(label_of[det.point_index] ^
                                            label_of[tx_point[g]]);
      }
    }
  }
  return errs;
}

}  // namespace detail

/// BER at an explicit link budget; noise_power may be zero (noiseless).
inline BerResult run_ber_at_power(const SystemConfig& cfg, double total_power,
                                  double noise_power, long long n_uses,
                                  std::uint64_t snr_key, int workers = 0) {
  if (n_uses < 1) throw std::invalid_argument("run_ber: need at least 1 use");
  const Constellation constellation = make_constellation(cfg.qam_order);
  std::vector<detail::UseErrors> per_use(static_cast<std::size_t>(n_uses));
  parallel_for(
      static_cast<int>(n_uses),
      [&](int u) {
        per_use[u] = detail::ber_channel_use(cfg, constellation, u,
                                             total_power, noise_power,
                                             snr_key);
      },
      workers);
  BerResult r;
  for (const auto& e : per_use) {
    r.index_bit_errors += e.index_errors;
    r.symbol_bit_errors += e.symbol_errors;
  }
  r.index_bits = n_uses * cfg.n_pairs * cfg.index_bits_per_use();
  r.symbol_bits = n_uses * cfg.n_pairs * cfg.symbol_bits_per_use();
  r.index_ber = r.index_bits
                    ? static_cast<double>(r.index_bit_errors) / r.index_bits
                    : 0.0;
  r.symbol_ber = static_cast<double>(r.symbol_bit_errors) / r.symbol_bits;
  return r;
}

/// n_bits must be a multiple of the per-channel-use bit load
/// K * (log2 L + log2 M).
inline BerResult run_ber(const SystemConfig& cfg, double snr_db,
                         long long n_bits, int workers = 0) {
  const long long load = static_cast<long long>(cfg.n_pairs) *
                         (cfg.index_bits_per_use() + cfg.symbol_bits_per_use());
  if (n_bits <= 0 || n_bits % load != 0)
    throw std::invalid_argument(
        "run_ber: n_bits must be a positive multiple of the per-use bit "
        "load " +
        std::to_string(load));
  const LinkBudget budget = make_link_budget(cfg, snr_db);
  return run_ber_at_power(cfg, db_to_linear(budget.tx_power_dbm),
                          db_to_linear(budget.noise_power_dbm), n_bits / load,
                          std::bit_cast<std::uint64_t>(snr_db), workers);
}

/// Full sweep over the config's SNR grid for the requested schemes. Rows are
/// a pure function of (cfg, seed); worker count never changes the output.
inline SweepResult run_sweep(const SystemConfig& cfg,
                             const std::vector<Scheme>& schemes,
                             int workers = 0, bool with_ber = true) {
  validate_config(cfg);
  const std::string digest = config_digest(cfg);
  SweepResult result;
  for (Scheme scheme : schemes) {
    for (double snr_db : cfg.snr_grid_db) {
      SweepRow row;
      row.scheme = to_string(scheme);
      row.snr_db = snr_db;
      row.n_trials = cfg.n_trials;
      row.seed = cfg.seed;
      row.config_digest = digest;
      if (scheme == Scheme::kSmn) {
        const auto er = ergodic_rates(cfg, snr_db, workers);
        row.sum_rate = er.sum_rate;
        row.worst_rate = er.worst_rate;
        row.per_user_rates = er.per_user_rate;
        if (with_ber) {
          const auto ber = run_ber(
              cfg, snr_db,
              static_cast<long long>(cfg.n_trials) * cfg.n_pairs *
                  (cfg.index_bits_per_use() + cfg.symbol_bits_per_use()),
              workers);
          row.index_ber = ber.index_ber;
          row.symbol_ber = ber.symbol_ber;
        }
      } else {
        const auto er = ergodic_rates_baseline(cfg, snr_db, workers);
        row.sum_rate = er.sum_rate;
        row.worst_rate = er.worst_rate;
        row.per_user_rates = er.per_user_rate;
        // Gaussian-input baseline: no bit-level simulation, BER fields stay 0
      }
      result.rows.push_back(std::move(row));
    }
  }
  return result;
}

inline constexpr const char* kCsvHeader =
    "scheme,snr_db,sum_rate,worst_rate,index_ber,symbol_ber,n_trials,seed,"
    "config_digest";

namespace detail {

inline std::string format_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

}  // namespace detail

inline std::string format_csv(const SweepResult& result) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : result.rows) {
    out += r.scheme;
    out += ',';
    out += detail::format_g9(r.snr_db);
    out += ',';
    out += detail::format_g9(r.sum_rate);
    out += ',';
    out += detail::format_g9(r.worst_rate);
    out += ',';
    out += detail::format_g9(r.index_ber);
    out += ',';
    out += detail::format_g9(r.symbol_ber);
    out += ',';
    out += std::to_string(r.n_trials);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += r.config_digest;
    out += '\n';
  }
  return out;
}

inline void write_csv(const SweepResult& result, const std::string& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("write_csv: cannot open " + path);
  os << format_csv(result);
  if (!os) throw std::runtime_error("write_csv: write failed for " + path);
}

inline SweepResult parse_csv(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line != kCsvHeader)
    throw std::runtime_error("parse_csv: bad header");
  SweepResult result;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string tok;
    SweepRow r;
    std::getline(ls, r.scheme, ',');
    std::getline(ls, tok, ',');
    r.snr_db = std::stod(tok);
    std::getline(ls, tok, ',');
    r.sum_rate = std::stod(tok);
    std::getline(ls, tok, ',');
    r.worst_rate = std::stod(tok);
    std::getline(ls, tok, ',');
    r.index_ber = std::stod(tok);
    std::getline(ls, tok, ',');
    r.symbol_ber = std::stod(tok);
    std::getline(ls, tok, ',');
    r.n_trials = std::stoi(tok);
    std::getline(ls, tok, ',');
    r.seed = std::stoull(tok);
    if (!std::getline(ls, r.config_digest, ','))
      throw std::runtime_error("parse_csv: short row");
    result.rows.push_back(std::move(r));
  }
  return result;
}

}  // namespace smnoma

#endif  // SMNOMA_HARNESS_HPP
