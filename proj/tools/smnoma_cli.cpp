// Command-line front end for the simulator.
//   smnoma sweep    --config cfg.txt [--schemes smn,cmn] [--out file.csv]
//                   [--trials N] [--seed S]
//   smnoma ber      --config cfg.txt --snr-db X --bits N
//   smnoma validate [--config cfg.txt]
// Worker count comes from the SMNOMA_WORKERS environment variable.
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "smnoma/smnoma.hpp"
#include "support/oracles.hpp"

namespace {

smnoma::SystemConfig read_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return smnoma::load_config(ss.str());
}

std::vector<smnoma::Scheme> parse_schemes(const std::string& spec) {
  std::vector<smnoma::Scheme> out;
  std::istringstream ss(spec);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (tok == "smn")
      out.push_back(smnoma::Scheme::kSmn);
    else if (tok == "cmn")
      out.push_back(smnoma::Scheme::kCmn);
    else
      throw std::runtime_error("unknown scheme '" + tok +
                               "' (expected smn and/or cmn)");
  }
  if (out.empty()) throw std::runtime_error("no schemes requested");
  return out;
}

int cmd_sweep(const std::string& config_path, const std::string& schemes,
              const std::string& out_path, int trials, long long seed) {
  smnoma::SystemConfig cfg = read_config(config_path);
  if (trials > 0) cfg.n_trials = trials;
  if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
  smnoma::validate_config(cfg);
  const auto result = smnoma::run_sweep(cfg, parse_schemes(schemes),
                                        smnoma::default_worker_count());
  if (out_path.empty()) {
    std::fputs(smnoma::format_csv(result).c_str(), stdout);
  } else {
    smnoma::write_csv(result, out_path);
    std::fprintf(stderr, "wrote %zu rows to %s\n", result.rows.size(),
                 out_path.c_str());
  }
  return 0;
}

int cmd_ber(const std::string& config_path, double snr_db, long long bits) {
  smnoma::SystemConfig cfg = read_config(config_path);
  const auto r = smnoma::run_ber(cfg, snr_db, bits,
                                 smnoma::default_worker_count());
  std::printf("snr_db=%g index_ber=%.9g symbol_ber=%.9g "
              "index_errors=%lld/%lld symbol_errors=%lld/%lld\n",
              snr_db, r.index_ber, r.symbol_ber, r.index_bit_errors,
              r.index_bits, r.symbol_bit_errors, r.symbol_bits);
  return 0;
}

// Fast self-checks of the library against independent reimplementations.
int cmd_validate(const std::string& config_path) {
  using namespace smnoma;
  int failures = 0;
  auto check = [&](bool ok, const char* what) {
    std::printf("%-52s %s\n", what, ok ? "ok" : "FAILED");
    if (!ok) ++failures;
  };

  SystemConfig cfg =
      config_path.empty() ? desk_scale_config() : read_config(config_path);

  // config round trip
  bool cfg_ok = false;
  try {
    cfg_ok = serialize_config(load_config(serialize_config(cfg))) ==
             serialize_config(cfg);
  } catch (...) {
  }
  check(cfg_ok, "config serialize/load round trip");

  // ML detector vs exhaustive oracle
  {
    const auto c = make_constellation(cfg.qam_order);
    CounterRng rng{cfg.seed, 0x76a1ULL};
    bool ok = true;
    for (int t = 0; t < 500; ++t) {
      std::vector<CVector> cols;
      for (int i = 0; i < cfg.group_size(); ++i) {
        CVector v(cfg.n_rx);
        for (int r = 0; r < cfg.n_rx; ++r) v(r) = rng.complex_gaussian_unit();
        cols.push_back(std::move(v));
      }
      CVector y(cfg.n_rx);
      for (int r = 0; r < cfg.n_rx; ++r) y(r) = rng.complex_gaussian_unit();
      const auto a = ml_detect(y, cols, c);
      const auto b = oracle::naive_ml_detect(y, cols, c);
      ok = ok && a.antenna_local == b.antenna_local &&
           a.point_index == b.point_index;
    }
    check(ok, "ml_detect matches exhaustive search");
  }

  // MI estimator vs quadrature (scalar channel)
  {
    const auto c = make_constellation(4);
    CounterRng hr{cfg.seed, 0x76a2ULL};
    std::vector<std::complex<double>> h = {hr.complex_gaussian_unit(),
                                           hr.complex_gaussian_unit()};
    std::vector<CVector> cols;
    for (auto hc : h) {
      CVector v(1);
      v(0) = hc;
      cols.push_back(v);
    }
    const auto exact = oracle::quadrature_mi(h, c, 0.5);
    const auto est = mi_index_user(cols, c, 0.5, 100000,
                                   CounterRng{cfg.seed, 0x76a3ULL});
    check(std::abs(est.value - exact.index_mi) < 0.03,
          "index mutual information matches quadrature");
  }

  // ZF beams null the other clusters
  {
    CounterRng rng{cfg.seed, 0x76a4ULL};
    std::vector<CVector> rows;
    for (int i = 0; i < cfg.n_pairs; ++i) {
      CVector v(cfg.n_tx);
      for (int j = 0; j < cfg.n_tx; ++j) v(j) = rng.complex_gaussian_unit();
      rows.push_back(std::move(v));
    }
    const auto beams = zf_beams(rows);
    double worst = 0.0;
    for (std::size_t i = 0; i < rows.size(); ++i)
      for (std::size_t j = 0; j < rows.size(); ++j)
        if (i != j) worst = std::max(worst, std::abs(rows[j].dot(beams[i])));
    check(worst <= 1e-10, "zero-forcing residual below 1e-10");
  }

  // baseline pipeline vs monolithic reimplementation
  {
    bool ok = true;
    for (int trial = 0; trial < 20; ++trial) {
      const auto ch = gen_channel(cfg, trial);
      const auto budget = make_link_budget(cfg, 20.0);
      const double p = db_to_linear(budget.tx_power_dbm);
      const double n0 = db_to_linear(budget.noise_power_dbm);
      const auto a = conventional_sum_rate(ch, cfg, p, n0);
      const auto b = oracle::monolithic_cmn_rates(ch, cfg, p, n0);
      if (a.per_user_rate.size() != b.size()) {
        ok = false;
        break;
      }
      for (std::size_t u = 0; u < b.size(); ++u)
        if (std::abs(a.per_user_rate[u] - b[u]) > 1e-9) ok = false;
    }
    check(ok, "baseline pipeline matches monolithic oracle");
  }

  // noiseless detection is error-free (single group: no interference, so
  // the zero-noise whitener is well defined; compensated MRC has no
  // noise-free floor)
  {
    SystemConfig one = cfg;
    one.n_pairs = 1;
    one.distances_km = {0.15, 0.1};
    one.mrc_norm_compensated = true;
    validate_config(one);
    const auto r = run_ber_at_power(one, 1.0, 0.0, 200, 0,
                                    default_worker_count());
    check(r.index_bit_errors == 0 && r.symbol_bit_errors == 0,
          "noiseless bit error rate is exactly zero");
  }

  std::printf("%s\n", failures ? "validation FAILED" : "validation passed");
  return failures ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"spatial-modulation NOMA link-level simulator"};
  app.require_subcommand(1);

  std::string config_path, schemes = "smn,cmn", out_path;
  int trials = 0;
  long long seed = -1;
  auto* sweep = app.add_subcommand("sweep", "rate/BER sweep over the SNR grid");
  sweep->add_option("--config", config_path, "config file")->required();
  sweep->add_option("--schemes", schemes, "comma list: smn,cmn");
  sweep->add_option("--out", out_path, "output CSV path (default: stdout)");
  sweep->add_option("--trials", trials, "override n_trials");
  sweep->add_option("--seed", seed, "override seed");

  std::string ber_config;
  double snr_db = 0.0;
  long long bits = 0;
  auto* ber = app.add_subcommand("ber", "bit error rate at one SNR point");
  ber->add_option("--config", ber_config, "config file")->required();
  ber->add_option("--snr-db", snr_db, "SNR grid value in dB")->required();
  ber->add_option("--bits", bits, "number of information bits")->required();

  std::string val_config;
  auto* validate = app.add_subcommand("validate", "self-check against oracles");
  validate->add_option("--config", val_config, "config file (optional)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (sweep->parsed()) return cmd_sweep(config_path, schemes, out_path,
                                          trials, seed);
    if (ber->parsed()) return cmd_ber(ber_config, snr_db, bits);
    return cmd_validate(val_config);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
