#ifndef SMNOMA_CHANNEL_HPP
#define SMNOMA_CHANNEL_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "smnoma/config.hpp"
#include "smnoma/math.hpp"
#include "smnoma/rng.hpp"

namespace smnoma {

using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

/// 128.1 + 37.6 log10(r), r in km.
inline double pathloss_db(double distance_km) {
  if (!(distance_km > 0.0))
    throw std::domain_error("pathloss_db: distance must be positive");
  return 128.1 + 37.6 * std::log10(distance_km);
}

inline double noise_power_dbm(const SystemConfig& cfg) {
  if (!(cfg.bandwidth_hz > 0.0))
    throw std::domain_error("noise_power_dbm: bandwidth must be positive");
  return cfg.noise_density_dbm_hz + 10.0 * std::log10(cfg.bandwidth_hz);
}

struct LinkBudget {
  double noise_power_dbm = 0.0;
  std::vector<double> pathloss_db;  // per user
  double tx_power_dbm = 0.0;
};

/// Transmit power for a grid point. The grid value is the SNR the nearest
/// configured user would see before fading: tx_power = noise + snr + min
/// path loss. A pure P/sigma^2 axis would put every configured geometry
/// ~90 dB below threshold and flatten all curves to zero.
inline LinkBudget make_link_budget(const SystemConfig& cfg, double snr_db) {
  LinkBudget b;
  b.noise_power_dbm = noise_power_dbm(cfg);
  b.pathloss_db.reserve(cfg.distances_km.size());
  for (double d : cfg.distances_km) b.pathloss_db.push_back(pathloss_db(d));
  const double ref_loss =
      *std::min_element(b.pathloss_db.begin(), b.pathloss_db.end());
  b.tx_power_dbm = b.noise_power_dbm + snr_db + ref_loss;
  return b;
}

struct ChannelRealization {
  std::vector<CMatrix> per_user;  // 2K matrices, Nr x Nt, path loss included
  int trial_index = 0;
};

/// sqrt(pathloss gain) * iid CN(0,1); a pure function of
/// (seed, trial_index, user), independent of call order.
inline ChannelRealization gen_channel(const SystemConfig& cfg,
                                      int trial_index) {
  if (trial_index < 0)
    throw std::domain_error("gen_channel: trial_index must be >= 0");
  ChannelRealization ch;
  ch.trial_index = trial_index;
  ch.per_user.reserve(cfg.distances_km.size());
  constexpr std::uint64_t kChannelTag = 0x4348414eULL;  // stream selector
  for (std::size_t u = 0; u < cfg.distances_km.size(); ++u) {
    CounterRng rng{cfg.seed, kChannelTag, static_cast<std::uint64_t>(trial_index),
                   static_cast<std::uint64_t>(u)};
    const double amp =
        std::sqrt(db_to_linear(-pathloss_db(cfg.distances_km[u])));
    CMatrix h(cfg.n_rx, cfg.n_tx);
    for (int r = 0; r < cfg.n_rx; ++r)
      for (int c = 0; c < cfg.n_tx; ++c)
        h(r, c) = amp * rng.complex_gaussian_unit();
    ch.per_user.push_back(std::move(h));
  }
  return ch;
}

}  // namespace smnoma

#endif  // SMNOMA_CHANNEL_HPP
