#ifndef SMNOMA_RNG_HPP
#define SMNOMA_RNG_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace smnoma {

namespace detail {
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}
}  // namespace detail

/// Counter-based stream: the state is a pure function of the key words, so a
/// draw sequence depends only on (seed, trial, user, ...) and never on which
/// thread or call order produced it.
class CounterRng {
 public:
  explicit CounterRng(std::initializer_list<std::uint64_t> key) {
    std::uint64_t s = 0x6a09e667f3bcc908ULL;
    for (std::uint64_t w : key) {
      s ^= detail::splitmix64(w);
      (void)detail::splitmix64(s);
      state_ = s;
    }
    // decorrelate nearby keys
    (void)next_u64();
  }

  std::uint64_t next_u64() { return detail::splitmix64(state_); }

  /// uniform in (0, 1], never zero (safe under log()).
  double uniform01() {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  std::uint64_t uniform_below(std::uint64_t n) { return next_u64() % n; }

  /// circularly-symmetric complex Gaussian, E|z|^2 = 1.
  std::complex<double> complex_gaussian_unit() {
    const double r = std::sqrt(-std::log(uniform01()));
    const double phi = 2.0 * std::numbers::pi * uniform01();
    return {r * std::cos(phi), r * std::sin(phi)};
  }

  /// real N(0, 1)
  double gaussian() {
    const double r = std::sqrt(-2.0 * std::log(uniform01()));
    return r * std::cos(2.0 * std::numbers::pi * uniform01());
  }

 private:
  std::uint64_t state_ = 0;
};

}  // namespace smnoma

#endif  // SMNOMA_RNG_HPP
