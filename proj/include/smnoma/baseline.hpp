#ifndef SMNOMA_BASELINE_HPP
#define SMNOMA_BASELINE_HPP

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "smnoma/channel.hpp"
#include "smnoma/config.hpp"
#include "smnoma/pairing.hpp"

namespace smnoma {

struct Cluster {
  int strong_user = 0;
  int weak_user = 0;
  CVector beam;        // unit norm, filled by the beamforming stage
  double power_split = 0.8;  // fraction of cluster power to the weak user
};

struct NomaRates {
  std::vector<double> per_user_rate;  // bits/s/Hz, indexed by user
  double sum_rate = 0.0;
};

/// Same direction-similarity pairing as the SM scheme; the larger-norm user
/// of each pair becomes the strong (SIC-capable) user.
inline std::vector<Cluster> form_clusters(const ChannelRealization& ch, int k,
                                          double power_split) {
  const auto pairs = pair_users(ch);
  if (static_cast<int>(pairs.size()) != k)
    throw std::invalid_argument("form_clusters: pair count != K");
  std::vector<Cluster> clusters;
  clusters.reserve(pairs.size());
  for (const auto& p : pairs) {
    Cluster c;
    c.strong_user = p.symbol_user;  // stronger channel by construction
    c.weak_user = p.index_user;
    c.power_split = power_split;
    clusters.push_back(std::move(c));
  }
  return clusters;
}

/// Zero-forcing beams: beam k is orthogonal to every other cluster's
/// effective channel. Built from the pseudo-inverse of the stacked effective
/// channel rows, columns normalized to unit norm.
inline std::vector<CVector> zf_beams(
    const std::vector<CVector>& effective_channels) {
  const int k = static_cast<int>(effective_channels.size());
  if (k == 0) throw std::invalid_argument("zf_beams: empty channel set");
  const auto n_tx = effective_channels[0].size();
  if (k > n_tx) throw std::invalid_argument("zf_beams: K > Nt");
  CMatrix a(k, n_tx);
  for (int i = 0; i < k; ++i) a.row(i) = effective_channels[i].adjoint();
  const CMatrix gram = a * a.adjoint();
  Eigen::FullPivLU<CMatrix> lu(gram);
  if (!lu.isInvertible())
    throw std::runtime_error("zf_beams: singular channel set");
  const CMatrix pinv = a.adjoint() * lu.inverse();  // Nt x K
  std::vector<CVector> beams;
  beams.reserve(k);
  for (int i = 0; i < k; ++i) {
    CVector b = pinv.col(i);
    const double n = b.norm();
    if (n == 0.0) throw std::runtime_error("zf_beams: singular channel set");
    beams.push_back(b / n);
  }
  return beams;
}

/// Superposition coding with perfect SIC at the strong user; the weak user
/// decodes against the strong user's residual power.
inline std::pair<double, double> sic_rates(double power_split,
                                           double strong_gain,
                                           double weak_gain,
                                           double total_power,
                                           double noise_power) {
  if (strong_gain < 0.0 || weak_gain < 0.0)
    throw std::invalid_argument("sic_rates: gains must be >= 0");
  if (total_power <= 0.0 || noise_power <= 0.0)
    throw std::invalid_argument("sic_rates: powers must be positive");
  const double beta = power_split;
  const double weak_rate =
      std::log2(1.0 + beta * total_power * weak_gain /
                          ((1.0 - beta) * total_power * weak_gain +
                           noise_power));
  const double strong_rate =
      std::log2(1.0 + (1.0 - beta) * total_power * strong_gain / noise_power);
  return {strong_rate, weak_rate};
}

/// One-realization baseline pipeline: cluster, ZF on the strong users'
/// effective channels, MRC combining at each receiver, SIC rate formulas
/// with equal power per cluster.
inline NomaRates conventional_sum_rate(const ChannelRealization& ch,
                                       const SystemConfig& cfg,
                                       double total_power,
                                       double noise_power) {
  const int k = cfg.n_pairs;
  auto clusters = form_clusters(ch, k, cfg.noma_power_split);

  // effective row channel of each strong user: dominant left singular
  // vector combining (the best fixed receive combiner before beams exist)
  std::vector<CVector> effective(k);
  for (int i = 0; i < k; ++i) {
    const CMatrix& h = ch.per_user[clusters[i].strong_user];
    Eigen::JacobiSVD<CMatrix> svd(h, Eigen::ComputeThinU | Eigen::ComputeThinV);
    effective[i] = (svd.matrixU().col(0).adjoint() * h).adjoint();
  }
  const auto beams = zf_beams(effective);

  NomaRates out;
  out.per_user_rate.assign(cfg.n_users(), 0.0);
  const double cluster_power = total_power / k;
  for (int i = 0; i < k; ++i) {
    clusters[i].beam = beams[i];
    // post-MRC gains on the cluster's own beam
    const double g_strong =
        (ch.per_user[clusters[i].strong_user] * beams[i]).squaredNorm();
    const double g_weak =
        (ch.per_user[clusters[i].weak_user] * beams[i]).squaredNorm();
    const auto [rs, rw] = sic_rates(clusters[i].power_split, g_strong, g_weak,
                                    cluster_power, noise_power);
    out.per_user_rate[clusters[i].strong_user] = rs;
    out.per_user_rate[clusters[i].weak_user] = rw;
  }
  KahanSum s;
  for (double r : out.per_user_rate) s.add(r);
  out.sum_rate = s.value();
  return out;
}

}  // namespace smnoma

#endif  // SMNOMA_BASELINE_HPP
