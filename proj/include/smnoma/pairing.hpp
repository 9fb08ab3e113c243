#ifndef SMNOMA_PAIRING_HPP
#define SMNOMA_PAIRING_HPP

#include <Eigen/Dense>
#include <algorithm>
#include <complex>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "smnoma/channel.hpp"
#include "smnoma/config.hpp"

namespace smnoma {

struct UserPair {
  int index_user = 0;   // decodes the antenna index
  int symbol_user = 0;  // decodes the QAM symbol (the stronger channel)
  double similarity = 0.0;
};

struct AntennaPartition {
  std::vector<std::vector<int>> groups;  // K disjoint sets covering 0..Nt-1
};

namespace detail {

inline double channel_similarity(const CMatrix& a, const CMatrix& b) {
  // normalized correlation of the flattened matrices
  const std::complex<double> ip =
      (a.reshaped().adjoint() * b.reshaped())(0, 0);
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::abs(ip) / (na * nb);
}

inline UserPair make_pair(const ChannelRealization& ch, int u, int v,
                          double sim) {
  UserPair p;
  const bool v_stronger = ch.per_user[v].norm() >= ch.per_user[u].norm();
  p.symbol_user = v_stronger ? v : u;
  p.index_user = v_stronger ? u : v;
  p.similarity = sim;
  return p;
}

}  // namespace detail

/// Greedy maximum-similarity matching; within each pair the larger-norm user
/// takes the symbol role. Pairs are returned sorted by smallest member so
/// the group assignment is deterministic.
inline std::vector<UserPair> pair_users(const ChannelRealization& ch) {
  const int n = static_cast<int>(ch.per_user.size());
  if (n < 2 || n % 2 != 0)
    throw std::invalid_argument("pair_users: need an even user count >= 2");
  std::vector<char> used(n, 0);
  std::vector<UserPair> pairs;
  while (static_cast<int>(pairs.size()) < n / 2) {
    double best = -1.0;
    int bu = -1, bv = -1;
    for (int u = 0; u < n; ++u) {
      if (used[u]) continue;
      for (int v = u + 1; v < n; ++v) {
        if (used[v]) continue;
        const double s = detail::channel_similarity(ch.per_user[u],
                                                    ch.per_user[v]);
        if (s > best) {
          best = s;
          bu = u;
          bv = v;
        }
      }
    }
    used[bu] = used[bv] = 1;
    pairs.push_back(detail::make_pair(ch, bu, bv, best));
  }
  std::sort(pairs.begin(), pairs.end(), [](const UserPair& a, const UserPair& b) {
    return std::min(a.index_user, a.symbol_user) <
           std::min(b.index_user, b.symbol_user);
  });
  return pairs;
}

/// Fixed pairing (2i, 2i+1); roles still follow channel strength.
inline std::vector<UserPair> fixed_pairs(const ChannelRealization& ch) {
  const int n = static_cast<int>(ch.per_user.size());
  std::vector<UserPair> pairs;
  for (int i = 0; i + 1 < n; i += 2) {
    const double s =
        detail::channel_similarity(ch.per_user[i], ch.per_user[i + 1]);
    pairs.push_back(detail::make_pair(ch, i, i + 1, s));
  }
  return pairs;
}

inline AntennaPartition round_robin_partition(int n_tx, int k) {
  AntennaPartition part;
  part.groups.assign(k, {});
  for (int a = 0; a < n_tx; ++a) part.groups[a % k].push_back(a);
  return part;
}

namespace detail {

/// Allocation proxy for one pair: log det of the Gram matrix of the two
/// users' columns on the candidate antenna set.
inline double pair_group_logdet(const ChannelRealization& ch,
                                const UserPair& pair,
                                const std::vector<int>& antennas) {
  const CMatrix& hi = ch.per_user[pair.index_user];
  const CMatrix& hs = ch.per_user[pair.symbol_user];
  const int nr = static_cast<int>(hi.rows());
  const int l = static_cast<int>(antennas.size());
  CMatrix stacked(2 * nr, l);
  for (int j = 0; j < l; ++j) {
    stacked.col(j).head(nr) = hi.col(antennas[j]);
    stacked.col(j).tail(nr) = hs.col(antennas[j]);
  }
  const CMatrix gram = stacked.adjoint() * stacked;
  Eigen::LLT<CMatrix> llt(gram);
  if (llt.info() != Eigen::Success) return kNegInf;
  double ld = 0.0;
  for (int j = 0; j < l; ++j) ld += 2.0 * std::log(std::abs(llt.matrixL()(j, j)));
  return ld;
}

inline double partition_objective(const ChannelRealization& ch,
                                  const std::vector<UserPair>& pairs,
                                  const AntennaPartition& part) {
  double obj = 0.0;
  for (std::size_t k = 0; k < pairs.size(); ++k)
    obj += pair_group_logdet(ch, pairs[k], part.groups[k]);
  return obj;
}

inline std::vector<int> encode_partition(const AntennaPartition& part,
                                         int n_tx) {
  std::vector<int> code(n_tx, -1);
  for (std::size_t g = 0; g < part.groups.size(); ++g)
    for (int a : part.groups[g]) code[a] = static_cast<int>(g);
  return code;
}

inline void enumerate_balanced(int n_tx, int k, int l,
                               std::vector<int>& assign,
                               std::vector<int>& remaining, int antenna,
                               const std::function<void(const std::vector<int>&)>& emit) {
  if (antenna == n_tx) {
    emit(assign);
    return;
  }
  for (int g = 0; g < k; ++g) {
    if (remaining[g] == 0) continue;
    assign[antenna] = g;
    --remaining[g];
    enumerate_balanced(n_tx, k, l, assign, remaining, antenna + 1, emit);
    ++remaining[g];
  }
}

inline double multinomial_count(int n_tx, int k) {
  const int l = n_tx / k;
  double c = 1.0;
  int n = n_tx;
  for (int g = 0; g < k; ++g) {
    for (int j = 0; j < l; ++j) {
      c = c * n / (j + 1);
      --n;
    }
  }
  return c;
}

}  // namespace detail

/// Balanced antenna-to-group assignment. Exhaustive mode maximizes the
/// log-det proxy over all balanced partitions (ties broken by smallest
/// encoding); greedy assigns one antenna per pair per round by best marginal
/// gain.
inline AntennaPartition allocate_antennas(const ChannelRealization& ch,
                                          const std::vector<UserPair>& pairs,
                                          const SystemConfig& cfg,
                                          AllocMode mode) {
  const int k = cfg.n_pairs;
  const int l = cfg.group_size();
  if (mode == AllocMode::kRoundRobin) return round_robin_partition(cfg.n_tx, k);

  if (mode == AllocMode::kExhaustive) {
    if (detail::multinomial_count(cfg.n_tx, k) > 1e6)
      throw std::runtime_error(
          "allocate_antennas: exhaustive partition count exceeds 1e6, use "
          "greedy mode");
    AntennaPartition best;
    std::vector<int> best_code;
    double best_obj = kNegInf;
    std::vector<int> assign(cfg.n_tx, -1);
    std::vector<int> remaining(k, l);
    detail::enumerate_balanced(
        cfg.n_tx, k, l, assign, remaining, 0,
        [&](const std::vector<int>& code) {
          AntennaPartition part;
          part.groups.assign(k, {});
          for (int a = 0; a < cfg.n_tx; ++a) part.groups[code[a]].push_back(a);
          const double obj = detail::partition_objective(ch, pairs, part);
          if (obj > best_obj ||
              (obj == best_obj && !best_code.empty() && code < best_code)) {
            best_obj = obj;
            best = part;
            best_code = code;
          }
        });
    return best;
  }

  // greedy: round-robin passes, each pair takes the antenna with the best
  // marginal log-det gain
  AntennaPartition part;
  part.groups.assign(k, {});
  std::vector<char> taken(cfg.n_tx, 0);
  for (int round = 0; round < l; ++round) {
    for (int g = 0; g < k; ++g) {
      double best_gain = kNegInf;
      int best_a = -1;
      const double base =
          part.groups[g].empty()
              ? 0.0
              : detail::pair_group_logdet(ch, pairs[g], part.groups[g]);
      for (int a = 0; a < cfg.n_tx; ++a) {
        if (taken[a]) continue;
        std::vector<int> trial = part.groups[g];
        trial.push_back(a);
        const double gain =
            detail::pair_group_logdet(ch, pairs[g], trial) - base;
        if (gain > best_gain) {
          best_gain = gain;
          best_a = a;
        }
      }
      taken[best_a] = 1;
      part.groups[g].push_back(best_a);
      std::sort(part.groups[g].begin(), part.groups[g].end());
    }
  }
  return part;
}

}  // namespace smnoma

#endif  // SMNOMA_PAIRING_HPP
