#ifndef SMNOMA_RATES_HPP
#define SMNOMA_RATES_HPP

#include <bit>
#include <cmath>
#include <numbers>
#include <vector>

#include "smnoma/baseline.hpp"
#include "smnoma/channel.hpp"
#include "smnoma/detect.hpp"
#include "smnoma/modem.hpp"
#include "smnoma/pairing.hpp"
#include "smnoma/parallel.hpp"
#include "smnoma/rng.hpp"

namespace smnoma {

struct MiEstimate {
  double value = 0.0;      // bits per channel use
  double std_error = 0.0;  // sample standard error, bits
  int n_noise_samples = 0;
};

namespace detail {

enum class MiTarget { kIndex, kSymbol, kSymbolGivenIndex };

/// Monte Carlo mutual information against a Gaussian-likelihood mixture.
/// Per sample: draw (a, x, noise), form y = c_a x + w, and score
/// log2 of the matching likelihood ratio. All mixtures go through
/// log-sum-exp; the common ||y||^2 term cancels and is dropped.
inline MiEstimate mc_mutual_information(const std::vector<CVector>& columns,
                                        const Constellation& constellation,
                                        double noise_power, int n_samples,
                                        CounterRng rng, MiTarget target) {
  const int l = static_cast<int>(columns.size());
  const int m = constellation.order;
  const auto nr = columns[0].size();
  const double sigma2 = noise_power;
  const double log_l = std::log(static_cast<double>(l));
  const double log_m = std::log(static_cast<double>(m));

  CMatrix gram(l, l);  // gram(b,a) = <c_b, c_a>
  Eigen::ArrayXd col_energy(l);
  for (int b = 0; b < l; ++b) {
    for (int a = 0; a < l; ++a) gram(b, a) = columns[b].dot(columns[a]);
    col_energy(b) = gram(b, b).real();
  }
  Eigen::ArrayXd pt_re(m), pt_im(m), pt_energy(m);
  for (int n = 0; n < m; ++n) {
    pt_re(n) = constellation.points[n].real();
    pt_im(n) = constellation.points[n].imag();
    pt_energy(n) = std::norm(constellation.points[n]);
  }

  const double inv_sigma2 = 1.0 / sigma2;
  Eigen::ArrayXXd t(m, l);  // log-likelihood kernels, one column per antenna
  Eigen::ArrayXd cond(l);   // log p(y | antenna b) + const
  Eigen::ArrayXd scratch(m);
  std::vector<std::complex<double>> g(l);
  KahanSum acc, acc2;
  const double noise_amp = std::sqrt(sigma2);
  const auto lse = [](const Eigen::ArrayXd& v) {
    const double mx = v.maxCoeff();
    return mx + std::log((v - mx).exp().sum());
  };

  for (int s = 0; s < n_samples; ++s) {
    const int a = static_cast<int>(rng.uniform_below(l));
    const int n_true = static_cast<int>(rng.uniform_below(m));
    const std::complex<double> x = constellation.points[n_true];
    // g_b = <c_b, y> without materializing y
    for (int b = 0; b < l; ++b) g[b] = x * gram(b, a);
    for (Eigen::Index r = 0; r < nr; ++r) {
      const std::complex<double> w = noise_amp * rng.complex_gaussian_unit();
      for (int b = 0; b < l; ++b) g[b] += std::conj(columns[b](r)) * w;
    }

    for (int b = 0; b < l; ++b) {
      t.col(b) = (2.0 * (g[b].real() * pt_re + g[b].imag() * pt_im) -
                  col_energy(b) * pt_energy) *
                 inv_sigma2;
      const double mx = t.col(b).maxCoeff();
      scratch = (t.col(b) - mx).exp();
      cond(b) = mx + std::log(scratch.sum()) - log_m;
    }
    const double log_py = lse(cond) - log_l;

    double v = 0.0;
    switch (target) {
      case MiTarget::kIndex:
        v = cond(a) - log_py;
        break;
      case MiTarget::kSymbol:
        // log q(y | x_true) = LSE over antennas of t(:, n_true) - log L
        v = lse(t.row(n_true).transpose()) - log_l - log_py;
        break;
      case MiTarget::kSymbolGivenIndex:
        // cond(a) is already log p(y|a) = LSE_n t(n,a) - log M
        v = t(n_true, a) - cond(a);
        break;
    }
    v /= std::numbers::ln2;
    acc.add(v);
    acc2.add(v * v);
  }

  MiEstimate e;
  e.n_noise_samples = n_samples;
  e.value = acc.value() / n_samples;
  if (n_samples > 1) {
    const double var =
        std::max(0.0, (acc2.value() - n_samples * e.value * e.value) /
                          (n_samples - 1));
    e.std_error = std::sqrt(var / n_samples);
  }
  return e;
}

}  // namespace detail

/// I(A; Y) with the constellation symbol a uniform nuisance.
inline MiEstimate mi_index_user(const std::vector<CVector>& columns,
                                const Constellation& constellation,
                                double noise_power, int n_samples,
                                CounterRng rng) {
  if (columns.empty() || noise_power <= 0.0)
    throw std::invalid_argument("mi_index_user: bad arguments");
  return detail::mc_mutual_information(columns, constellation, noise_power,
                                       n_samples, rng,
                                       detail::MiTarget::kIndex);
}

/// I(X; Y) with the antenna index marginalized.
inline MiEstimate mi_symbol_user(const std::vector<CVector>& columns,
                                 const Constellation& constellation,
                                 double noise_power, int n_samples,
                                 CounterRng rng) {
  if (columns.empty() || noise_power <= 0.0)
    throw std::invalid_argument("mi_symbol_user: bad arguments");
  return detail::mc_mutual_information(columns, constellation, noise_power,
                                       n_samples, rng,
                                       detail::MiTarget::kSymbol);
}

/// I(X; Y | A), the alternative decomposition's symbol-user term.
inline MiEstimate mi_symbol_user_conditional(
    const std::vector<CVector>& columns, const Constellation& constellation,
    double noise_power, int n_samples, CounterRng rng) {
  if (columns.empty() || noise_power <= 0.0)
    throw std::invalid_argument("mi_symbol_user_conditional: bad arguments");
  return detail::mc_mutual_information(columns, constellation, noise_power,
                                       n_samples, rng,
                                       detail::MiTarget::kSymbolGivenIndex);
}

namespace detail {

inline std::vector<CVector> group_columns(const CMatrix& h,
                                          const std::vector<int>& antennas,
                                          double amplitude) {
  std::vector<CVector> cols;
  cols.reserve(antennas.size());
  for (int a : antennas) cols.push_back(amplitude * h.col(a));
  return cols;
}

/// sigma^2 I + sum over other groups of (P_group / L) H_g H_g^H, seen by one
/// user (interference treated as Gaussian with matched covariance).
inline CMatrix interference_covariance(const CMatrix& h,
                                       const AntennaPartition& partition,
                                       std::size_t own_group,
                                       double group_power) {
  const auto nr = h.rows();
  CMatrix cov = CMatrix::Zero(nr, nr);
  for (std::size_t g = 0; g < partition.groups.size(); ++g) {
    if (g == own_group) continue;
    const auto& ants = partition.groups[g];
    const double scale = group_power / static_cast<double>(ants.size());
    for (int a : ants) cov += scale * (h.col(a) * h.col(a).adjoint());
  }
  return cov;
}

}  // namespace detail

struct PairRates {
  MiEstimate index_user;
  MiEstimate symbol_user;
};

/// Per-realization rates of one pair: whiten each user against the other
/// groups' aggregate transmissions, then run both MI estimators on the
/// whitened (unit-noise) channels.
inline PairRates sm_pair_rate(const ChannelRealization& ch,
                              const UserPair& pair, std::size_t group_idx,
                              const AntennaPartition& partition,
                              const SystemConfig& cfg,
                              const Constellation& constellation,
                              double total_power, double noise_power,
                              std::uint64_t snr_key) {
  const double group_power = total_power / cfg.n_pairs;
  const double amp = std::sqrt(group_power);
  constexpr std::uint64_t kMiTag = 0x4d49ULL;
  PairRates out;

  const auto eval = [&](int user, detail::MiTarget target) {
    const CMatrix& h = ch.per_user[user];
    auto cols =
        detail::group_columns(h, partition.groups[group_idx], amp);
    const Whitener w(
        detail::interference_covariance(h, partition, group_idx, group_power),
        noise_power);
    cols = w.apply(cols);
    CounterRng rng{cfg.seed, kMiTag, static_cast<std::uint64_t>(ch.trial_index),
                   snr_key, static_cast<std::uint64_t>(user)};
    return detail::mc_mutual_information(cols, constellation, 1.0,
                                         cfg.mi_noise_samples, rng, target);
  };

  out.index_user = eval(pair.index_user, detail::MiTarget::kIndex);
  out.symbol_user =
      eval(pair.symbol_user,
           cfg.rate_decomposition == RateDecomposition::kMarginal
               ? detail::MiTarget::kSymbol
               : detail::MiTarget::kSymbolGivenIndex);
  return out;
}

namespace detail {

inline std::vector<UserPair> pairs_for_trial(const ChannelRealization& ch,
                                             const SystemConfig& cfg) {
  return cfg.pairing_mode == PairingMode::kPerTrial ? pair_users(ch)
                                                    : fixed_pairs(ch);
}

inline AntennaPartition partition_for_trial(const ChannelRealization& ch,
                                            const std::vector<UserPair>& pairs,
                                            const SystemConfig& cfg) {
  return allocate_antennas(ch, pairs, cfg, cfg.alloc_mode);
}

}  // namespace detail

/// Per-user SM rates for one channel realization, indexed by user.
inline std::vector<double> sm_trial_rates(const SystemConfig& cfg,
                                          const Constellation& constellation,
                                          int trial, double total_power,
                                          double noise_power,
                                          std::uint64_t snr_key) {
  const auto ch = gen_channel(cfg, trial);
  const auto pairs = detail::pairs_for_trial(ch, cfg);
  const auto partition = detail::partition_for_trial(ch, pairs, cfg);
  std::vector<double> rates(cfg.n_users(), 0.0);
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto pr = sm_pair_rate(ch, pairs[k], k, partition, cfg,
                                 constellation, total_power, noise_power,
                                 snr_key);
    rates[pairs[k].index_user] = pr.index_user.value;
    rates[pairs[k].symbol_user] = pr.symbol_user.value;
  }
  return rates;
}

struct ErgodicRates {
  std::vector<double> per_user_rate;  // ergodic mean per user
  double sum_rate = 0.0;
  double worst_rate = 0.0;
  double sum_rate_std_error = 0.0;
  int n_trials = 0;
};

/// Ergodic SM rates at one SNR point, averaged over cfg.n_trials
/// realizations. Aggregation is by trial index, so the result does not
/// depend on the worker count.
inline ErgodicRates ergodic_rates(const SystemConfig& cfg, double snr_db,
                                  int workers = 0) {
  const Constellation constellation = make_constellation(cfg.qam_order);
  const LinkBudget budget = make_link_budget(cfg, snr_db);
  const double total_power = db_to_linear(budget.tx_power_dbm);
  const double noise_power = db_to_linear(budget.noise_power_dbm);
  const std::uint64_t snr_key = std::bit_cast<std::uint64_t>(snr_db);

  std::vector<std::vector<double>> per_trial(cfg.n_trials);
  parallel_for(
      cfg.n_trials,
      [&](int t) {
        per_trial[t] = sm_trial_rates(cfg, constellation, t, total_power,
                                      noise_power, snr_key);
      },
      workers);

  ErgodicRates out;
  out.n_trials = cfg.n_trials;
  const int nu = cfg.n_users();
  std::vector<KahanSum> sums(nu);
  std::vector<double> trial_sum(cfg.n_trials, 0.0);
  for (int t = 0; t < cfg.n_trials; ++t) {
    KahanSum row;
    for (int u = 0; u < nu; ++u) {
      sums[u].add(per_trial[t][u]);
      row.add(per_trial[t][u]);
    }
    trial_sum[t] = row.value();
  }
  out.per_user_rate.resize(nu);
  for (int u = 0; u < nu; ++u)
    out.per_user_rate[u] = sums[u].value() / cfg.n_trials;
  const auto ms = mean_std_error(trial_sum);
  out.sum_rate = ms.mean;
  out.sum_rate_std_error = ms.std_error;
  out.worst_rate =
      *std::min_element(out.per_user_rate.begin(), out.per_user_rate.end());
  return out;
}

/// Baseline counterpart: ergodic conventional-NOMA rates at one SNR point.
inline ErgodicRates ergodic_rates_baseline(const SystemConfig& cfg,
                                           double snr_db, int workers = 0) {
  const LinkBudget budget = make_link_budget(cfg, snr_db);
  const double total_power = db_to_linear(budget.tx_power_dbm);
  const double noise_power = db_to_linear(budget.noise_power_dbm);

  std::vector<std::vector<double>> per_trial(cfg.n_trials);
  parallel_for(
      cfg.n_trials,
      [&](int t) {
        const auto ch = gen_channel(cfg, t);
        per_trial[t] =
            conventional_sum_rate(ch, cfg, total_power, noise_power)
                .per_user_rate;
      },
      workers);

  ErgodicRates out;
  out.n_trials = cfg.n_trials;
  const int nu = cfg.n_users();
  std::vector<KahanSum> sums(nu);
  std::vector<double> trial_sum(cfg.n_trials, 0.0);
  for (int t = 0; t < cfg.n_trials; ++t) {
    KahanSum row;
    for (int u = 0; u < nu; ++u) {
      sums[u].add(per_trial[t][u]);
      row.add(per_trial[t][u]);
    }
    trial_sum[t] = row.value();
  }
  out.per_user_rate.resize(nu);
  for (int u = 0; u < nu; ++u)
    out.per_user_rate[u] = sums[u].value() / cfg.n_trials;
  const auto ms = mean_std_error(trial_sum);
  out.sum_rate = ms.mean;
  out.sum_rate_std_error = ms.std_error;
  out.worst_rate =
      *std::min_element(out.per_user_rate.begin(), out.per_user_rate.end());
  return out;
}

}  // namespace smnoma

#endif  // SMNOMA_RATES_HPP
