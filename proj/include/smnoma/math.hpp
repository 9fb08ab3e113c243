#ifndef SMNOMA_MATH_HPP
#define SMNOMA_MATH_HPP

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <vector>

namespace smnoma {

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

/// log(sum_i exp(v_i)) with max subtraction; safe for very negative inputs.
inline double log_sum_exp(std::span<const double> vals) {
  double m = kNegInf;
  for (double v : vals) m = std::max(m, v);
  if (!std::isfinite(m)) return m;  // all -inf
  double acc = 0.0;
  for (double v : vals) acc += std::exp(v - m);
  return m + std::log(acc);
}

inline double log_mean_exp(std::span<const double> vals) {
  return log_sum_exp(vals) - std::log(static_cast<double>(vals.size()));
}

/// Compensated (Kahan) accumulator; summation order still matters, callers
/// that need run-to-run identical results must feed it in a fixed order.
class KahanSum {
 public:
  void add(double x) {
    const double y = x - comp_;
    const double t = sum_ + y;
    comp_ = (t - sum_) - y;
    sum_ = t;
  }
  double value() const { return sum_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

struct MeanStdErr {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n = 0;
};

inline MeanStdErr mean_std_error(std::span<const double> xs) {
  MeanStdErr r;
  r.n = xs.size();
  if (r.n == 0) return r;
  KahanSum s;
  for (double x : xs) s.add(x);
  r.mean = s.value() / static_cast<double>(r.n);
  if (r.n < 2) return r;
  KahanSum v;
  for (double x : xs) v.add((x - r.mean) * (x - r.mean));
  const double var = v.value() / static_cast<double>(r.n - 1);
  r.std_error = std::sqrt(var / static_cast<double>(r.n));
  return r;
}

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

}  // namespace smnoma

#endif  // SMNOMA_MATH_HPP
