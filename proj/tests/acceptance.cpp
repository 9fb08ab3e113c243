// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Budgets are sized for a commodity multi-core desktop; the heavy
// sweeps run last.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "smnoma/smnoma.hpp"
#include "support/oracles.hpp"

using namespace smnoma;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& what,
            const std::string& detail = "") {
  std::printf("criterion %2d: %s  %s%s%s\n", criterion,
              pass ? "PASS" : "FAIL", what.c_str(),
              detail.empty() ? "" : "  -- ", detail.c_str());
  std::fflush(stdout);
  if (!pass) ++g_failures;
}

SystemConfig desk_cfg(int n_pairs) {
  SystemConfig c = desk_scale_config();
  c.n_pairs = n_pairs;
  c.distances_km.clear();
  for (int p = 0; p < n_pairs; ++p) {
    c.distances_km.push_back(0.15);
    c.distances_km.push_back(0.10);
  }
  validate_config(c);
  return c;
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
  return buf;
}

// --- criterion 1: worst-user saturation caps ------------------------------
void criterion_worst_user_caps() {
  struct Case {
    int n_pairs;
    double cap;
  };
  for (const Case c : {Case{2, 2.0}, Case{4, 1.0}}) {
    SystemConfig cfg = desk_cfg(c.n_pairs);
    cfg.snr_grid_db = {40.0};
    // fixed near/far pairing keeps every far user in the index role, so the
    // worst-user ergodic rate saturates at the index entropy log2(Nt/K)
    cfg.pairing_mode = PairingMode::kFixed;
    const auto er = ergodic_rates(cfg, 40.0);
    const bool pass = std::abs(er.worst_rate - c.cap) <= 0.05;
    report(1, pass,
           "worst-user SM rate saturates at " + fmt(c.cap) +
               " bits/s/Hz (Nu=" + std::to_string(2 * c.n_pairs) + ")",
           "measured " + fmt(er.worst_rate));
  }
}

// --- criterion 2: sum-rate orderings in the mid-SNR band ------------------
void criterion_sum_rate_orderings() {
  const std::vector<double> band = {15.0, 20.0, 25.0};
  for (int n_pairs : {4, 2}) {
    SystemConfig cfg = desk_cfg(n_pairs);
    cfg.snr_grid_db = band;
    bool pass = true;
    std::string detail;
    for (double snr : band) {
      const auto smn = ergodic_rates(cfg, snr);
      const auto cmn = ergodic_rates_baseline(cfg, snr);
      const double diff = smn.sum_rate - cmn.sum_rate;
      const double combined = std::sqrt(
          smn.sum_rate_std_error * smn.sum_rate_std_error +
          cmn.sum_rate_std_error * cmn.sum_rate_std_error);
      const double z = diff / combined;
      const bool point_ok = n_pairs == 4 ? z >= 3.0 : z <= -3.0;
      if (!point_ok) pass = false;
      detail += fmt(snr) + "dB:z=" + fmt(z) + " ";
    }
    report(2, pass,
           std::string("SMN ") + (n_pairs == 4 ? ">" : "<") +
               " CMN sum rate by >= 3 combined SE, Nu=" +
               std::to_string(2 * n_pairs) + ", Ns=64",
           detail);
  }
}

// --- criterion 3: MI estimator vs quadrature ------------------------------
void criterion_mi_quadrature() {
  bool pass = true;
  double worst = 0.0;
  for (int l : {1, 2}) {
    for (int m : {2, 4}) {
      const auto c = make_constellation(m);
      for (std::uint64_t inst = 0; inst < 5; ++inst) {
        std::vector<std::complex<double>> h;
        CounterRng hr{inst, static_cast<std::uint64_t>(l * 16 + m), 0xaccULL};
        for (int i = 0; i < l; ++i) h.push_back(hr.complex_gaussian_unit());
        std::vector<CVector> cols;
        for (const auto& hc : h) {
          CVector v(1);
          v(0) = hc;
          cols.push_back(v);
        }
        for (double noise : {2.0, 0.5, 0.125}) {
          const auto exact = oracle::quadrature_mi(h, c, noise);
          const auto mi = mi_index_user(cols, c, noise, 300000,
                                        CounterRng{inst, 77, 1});
          const auto ms = mi_symbol_user(cols, c, noise, 300000,
                                         CounterRng{inst, 77, 2});
          worst = std::max({worst, std::abs(mi.value - exact.index_mi),
                            std::abs(ms.value - exact.symbol_mi)});
          if (std::abs(mi.value - exact.index_mi) >= 0.02 ||
              std::abs(ms.value - exact.symbol_mi) >= 0.02)
            pass = false;
        }
      }
    }
  }
  report(3, pass, "Monte Carlo MI within 0.02 bits of fine-grid quadrature",
         "max deviation " + fmt(worst));
}

// --- criterion 4: detector oracle equivalence -----------------------------
void criterion_detector_oracles() {
  const auto c = make_constellation(16);
  CounterRng rng{0xdeULL, 4};
  bool ml_ok = true;
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<CVector> cols;
    for (int i = 0; i < 4; ++i) {
      CVector v(2);
      for (int r = 0; r < 2; ++r) v(r) = rng.complex_gaussian_unit();
      cols.push_back(std::move(v));
    }
    const int i = static_cast<int>(rng.uniform_below(4));
    const int n = static_cast<int>(rng.uniform_below(16));
    CVector w(2);
    for (int r = 0; r < 2; ++r)
      w(r) = std::sqrt(0.5) * rng.complex_gaussian_unit();
    const CVector y = cols[i] * c.points[n] + w;
    const auto a = ml_detect(y, cols, c);
    const auto b = oracle::naive_ml_detect(y, cols, c);
    if (a.antenna_local != b.antenna_local || a.point_index != b.point_index)
      ml_ok = false;
  }
  report(4, ml_ok, "ml_detect bit-exact vs naive oracle on 10^4 instances");

  const auto qpsk = make_constellation(4);
  bool mrc_ok = true;
  std::string detail;
  const int n_trials = 6000;
  for (double snr_db : {-5.0, 0.0, 5.0, 10.0, 15.0}) {
    const double sigma2 = std::pow(10.0, -snr_db / 10.0);
    int err_lib = 0, err_orc = 0;
    CounterRng r1{0x3cULL, static_cast<std::uint64_t>(snr_db + 100)};
    CounterRng r2{0x7b5ULL, static_cast<std::uint64_t>(snr_db + 100)};
    auto run = [&](CounterRng& r, bool use_oracle) {
      std::vector<CVector> cols;
      for (int i = 0; i < 2; ++i) {
        CVector v(2);
        for (int q = 0; q < 2; ++q) v(q) = r.complex_gaussian_unit();
        cols.push_back(std::move(v));
      }
      const int a = static_cast<int>(r.uniform_below(2));
      const int n = static_cast<int>(r.uniform_below(4));
      CVector w(2);
      for (int q = 0; q < 2; ++q)
        w(q) = std::sqrt(sigma2) * r.complex_gaussian_unit();
      const CVector y = cols[a] * qpsk.points[n] + w;
      const int hat = use_oracle ? oracle::naive_mrc_index(y, cols)
                                 : mrc_detect_index(y, cols).antenna_local;
      return hat != a;
    };
    for (int t = 0; t < n_trials; ++t) {
      err_lib += run(r1, false);
      err_orc += run(r2, true);
    }
    const double p1 = static_cast<double>(err_lib) / n_trials;
    const double p2 = static_cast<double>(err_orc) / n_trials;
    const double half = 1.96 * (std::sqrt(p1 * (1 - p1) / n_trials) +
                                std::sqrt(p2 * (1 - p2) / n_trials));
    if (std::abs(p1 - p2) > half + 1e-12) mrc_ok = false;
  }
  report(4, mrc_ok,
         "mrc_detect_index error rate CI-overlaps naive oracle on 5 SNRs");
}

// --- criterion 5: ZF residuals --------------------------------------------
void criterion_zf() {
  bool pass = true;
  double worst = 0.0;
  for (int k : {2, 4}) {
    for (int inst = 0; inst < 1000; ++inst) {
      std::vector<CVector> rows;
      CounterRng rng{0x2fULL, static_cast<std::uint64_t>(k),
                     static_cast<std::uint64_t>(inst)};
      for (int i = 0; i < k; ++i) {
        CVector v(8);
        for (int j = 0; j < 8; ++j) v(j) = rng.complex_gaussian_unit();
        rows.push_back(std::move(v));
      }
      const auto beams = zf_beams(rows);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          if (i == j) continue;
          worst = std::max(worst, std::abs(rows[j].dot(beams[i])));
        }
    }
  }
  if (worst > 1e-10) pass = false;
  report(5, pass, "ZF cross-cluster residuals <= 1e-10, K in {2,4}, Nt=8",
         "max residual " + fmt(worst));
}

// --- criterion 6: sic_rates spot checks -----------------------------------
void criterion_sic() {
  bool pass = true;
  {
    const auto [rs, rw] = sic_rates(0.8, 4.0, 1.0, 1.0, 1.0);
    if (std::abs(rw / std::log2(1.0 + 0.8 / 1.2) - 1.0) > 1e-12) pass = false;
    if (std::abs(rs / std::log2(1.8) - 1.0) > 1e-12) pass = false;
  }
  {
    const auto [rs, rw] = sic_rates(1.0 - 1e-13, 4.0, 1.0, 1.0, 1.0);
    if (!(rs < 1e-11)) pass = false;
    if (std::abs(rw / std::log2(2.0) - 1.0) > 1e-9) pass = false;
  }
  {
    const auto [rs, rw] = sic_rates(0.8, 1.0, 1e16, 1.0, 1.0);
    (void)rs;
    if (std::abs(rw / std::log2(5.0) - 1.0) > 1e-9) pass = false;
  }
  CounterRng rng{0x51cULL, 0};
  for (int t = 0; t < 100000; ++t) {
    const double beta = 0.01 + 0.98 * rng.uniform01();
    const double gw = -std::log(rng.uniform01()) * 50.0;
    const double gs = -std::log(rng.uniform01()) * 50.0;
    const double p = 0.01 + 1000.0 * rng.uniform01();
    const auto [rs, rw] = sic_rates(beta, gs, gw, p, 1.0);
    (void)rs;
    if (rw > std::log2(1.0 + beta / (1.0 - beta)) + 1e-12) pass = false;
  }
  report(6, pass, "sic_rates analytic spot checks and weak-user ceiling");
}

// --- criterion 7: modem bijectivity ---------------------------------------
void criterion_bijectivity() {
  bool pass = true;
  long checked = 0;
  for (int l : {1, 2, 4, 8, 16}) {
    for (int m : {2, 4, 16, 64, 256}) {
      if (l * m > 4096) continue;
      const auto c = make_constellation(m);
      const int nbits = detail::log2_int(l) + detail::log2_int(m);
      for (unsigned v = 0; v < (1u << nbits); ++v) {
        const std::string bits = detail::bits_to_string(v, nbits);
        const auto sym = sm_map(split_bits(bits, l, m), 0, c);
        const auto back = sm_unmap(sym, l, c);
        if (back.index_bits + back.symbol_bits != bits) pass = false;
        ++checked;
      }
    }
  }
  report(7, pass, "exhaustive modem round trip, L*M <= 4096",
         std::to_string(checked) + " inputs, zero failures required");
}

// --- criteria 8 & 10: determinism and runtime of the desk-scale sweep -----
void criterion_determinism_and_runtime() {
  SystemConfig cfg = desk_cfg(4);  // Nt=8, Nu=8, Ns=64, 8 SNR points
  const auto t0 = std::chrono::steady_clock::now();
  const auto a = run_sweep(cfg, {Scheme::kSmn, Scheme::kCmn},
                           default_worker_count());
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  report(10, elapsed < 600.0,
         "desk-scale sweep (10k trials x 8 SNR x 2 schemes) under 10 min",
         fmt(elapsed) + " s with " + std::to_string(default_worker_count()) +
             " workers");

  const auto b = run_sweep(cfg, {Scheme::kSmn, Scheme::kCmn},
                           default_worker_count() + 2);
  report(8, format_csv(a) == format_csv(b),
         "identical (config, seed), different worker counts -> identical CSV "
         "bytes");
}

// --- criterion 9: BER sanity ----------------------------------------------
void criterion_ber() {
  SystemConfig cfg = desk_cfg(2);
  cfg.n_pairs = 1;
  cfg.distances_km = {0.15, 0.1};
  // norm-compensated MRC: the raw-correlation rule keeps a noise-free error
  // floor from its strong-column bias
  cfg.mrc_norm_compensated = true;
  validate_config(cfg);
  const auto noiseless = run_ber_at_power(cfg, 1.0, 0.0, 2000, 0);
  report(9, noiseless.index_bit_errors == 0 && noiseless.symbol_bit_errors == 0,
         "noiseless BER exactly zero");

  SystemConfig mcfg = desk_cfg(2);
  mcfg.mrc_norm_compensated = true;
  const long long uses = 4000;
  bool monotone = true;
  double prev_i = 1.0, prev_s = 1.0;
  long long prev_ni = 1, prev_ns = 1;
  std::string detail;
  for (double snr : {0.0, 6.0, 12.0, 18.0, 24.0, 30.0}) {
    const auto budget = make_link_budget(mcfg, snr);
    const auto r = run_ber_at_power(mcfg, db_to_linear(budget.tx_power_dbm),
                                    db_to_linear(budget.noise_power_dbm), uses,
                                    std::bit_cast<std::uint64_t>(snr));
    auto bound = [](double p, long long n) {
      return 1.96 * std::sqrt(p * (1.0 - p) / n);
    };
    if (r.index_ber >
        prev_i + bound(r.index_ber, r.index_bits) + bound(prev_i, prev_ni))
      monotone = false;
    if (r.symbol_ber >
        prev_s + bound(r.symbol_ber, r.symbol_bits) + bound(prev_s, prev_ns))
      monotone = false;
    detail += fmt(snr) + "dB:" + fmt(r.index_ber) + "/" + fmt(r.symbol_ber) +
              " ";
    prev_i = r.index_ber;
    prev_s = r.symbol_ber;
    prev_ni = r.index_bits;
    prev_ns = r.symbol_bits;
  }
  report(9, monotone, "BER nonincreasing in SNR within binomial 95% bounds",
         detail);
}

}  // namespace

int main() {
  criterion_mi_quadrature();
  criterion_detector_oracles();
  criterion_zf();
  criterion_sic();
  criterion_bijectivity();
  criterion_ber();
  criterion_worst_user_caps();
  criterion_sum_rate_orderings();
  criterion_determinism_and_runtime();
  std::printf("%s (%d failure%s)\n", g_failures ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED",
              g_failures, g_failures == 1 ? "" : "s");
  return g_failures ? 1 : 0;
}
