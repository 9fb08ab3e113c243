#ifndef SMNOMA_MODEM_HPP
#define SMNOMA_MODEM_HPP

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>
#include <vector>

#include "smnoma/pairing.hpp"

namespace smnoma {

/// Gray-labeled unit-energy constellation. labels[i] is the bit string of
/// points[i], MSB first, in-phase bits before quadrature bits.
struct Constellation {
  int order = 0;
  std::vector<std::complex<double>> points;
  std::vector<std::string> labels;
  std::vector<int> index_of_label;  // label value (binary) -> point index

  int bits() const { return detail::log2_int(order); }
};

struct BitSplit {
  std::string index_bits;
  std::string symbol_bits;
};

/// One SM channel use.
struct SmSymbol {
  int group = 0;
  int antenna_local = 0;
  int point_index = 0;
};

namespace detail {

inline unsigned gray_encode(unsigned v) { return v ^ (v >> 1); }

inline std::string bits_to_string(unsigned v, int nbits) {
  std::string s(static_cast<std::size_t>(nbits), '0');
  for (int b = 0; b < nbits; ++b)
    if (v & (1u << (nbits - 1 - b))) s[b] = '1';
  return s;
}

inline unsigned string_to_bits(const std::string& s) {
  unsigned v = 0;
  for (char c : s) {
    if (c != '0' && c != '1')
      throw std::invalid_argument("bit string must contain only 0/1");
    v = (v << 1) | static_cast<unsigned>(c - '0');
  }
  return v;
}

}  // namespace detail

/// BPSK for order 2, square QAM otherwise, per-axis Gray labels, unit
/// average energy.
inline Constellation make_constellation(int order) {
  Constellation c;
  c.order = order;
  if (order == 2) {
    c.points = {{1.0, 0.0}, {-1.0, 0.0}};
    c.labels = {"0", "1"};
    c.index_of_label = {0, 1};
    return c;
  }
  if (order != 4 && order != 16 && order != 64 && order != 256)
    throw std::invalid_argument("unsupported constellation order " +
                                std::to_string(order));
  const int side = static_cast<int>(std::lround(std::sqrt(order)));
  const int axis_bits = detail::log2_int(side);
  // levels {±1, ±3, ...}; per-axis mean square (side^2-1)/3
  const double norm = std::sqrt(2.0 * (side * side - 1) / 3.0);
  c.points.resize(order);
  c.labels.resize(order);
  c.index_of_label.assign(order, -1);
  for (int i = 0; i < side; ++i) {
    for (int q = 0; q < side; ++q) {
      const int idx = i * side + q;
      c.points[idx] = {(2 * i - (side - 1)) / norm, (2 * q - (side - 1)) / norm};
      const unsigned label = (detail::gray_encode(i) << axis_bits) |
                             detail::gray_encode(q);
      c.labels[idx] = detail::bits_to_string(label, 2 * axis_bits);
      c.index_of_label[label] = idx;
    }
  }
  return c;
}

/// First log2(L) bits (MSB first) select the antenna, the rest the symbol.
inline BitSplit split_bits(const std::string& bits, int l, int m) {
  const int nb_index = detail::log2_int(l);
  const int nb_symbol = detail::log2_int(m);
  if (static_cast<int>(bits.size()) != nb_index + nb_symbol)
    throw std::invalid_argument("split_bits: expected " +
                                std::to_string(nb_index + nb_symbol) +
                                " bits, got " + std::to_string(bits.size()));
  BitSplit s;
  s.index_bits = bits.substr(0, nb_index);
  s.symbol_bits = bits.substr(nb_index);
  return s;
}

inline SmSymbol sm_map(const BitSplit& split, int group,
                       const Constellation& constellation) {
  SmSymbol sym;
  sym.group = group;
  sym.antenna_local =
      static_cast<int>(detail::string_to_bits(split.index_bits));
  const unsigned label = detail::string_to_bits(split.symbol_bits);
  if (label >= constellation.index_of_label.size())
    throw std::invalid_argument("sm_map: symbol bits out of range");
  sym.point_index = constellation.index_of_label[label];
  return sym;
}

inline BitSplit sm_unmap(const SmSymbol& sym, int l,
                         const Constellation& constellation) {
  BitSplit s;
  s.index_bits = detail::bits_to_string(
      static_cast<unsigned>(sym.antenna_local), detail::log2_int(l));
  s.symbol_bits = constellation.labels[sym.point_index];
  return s;
}

/// All-zero transmit vector except the active antenna of the symbol's group.
inline CVector tx_vector(const SmSymbol& sym, const AntennaPartition& partition,
                         int n_tx, double tx_amplitude,
                         const Constellation& constellation) {
  if (sym.group < 0 || sym.group >= static_cast<int>(partition.groups.size()))
    throw std::invalid_argument("tx_vector: group out of range");
  const auto& group = partition.groups[sym.group];
  CVector x = CVector::Zero(n_tx);
  x(group.at(sym.antenna_local)) =
      tx_amplitude * constellation.points[sym.point_index];
  return x;
}

}  // namespace smnoma

#endif  // SMNOMA_MODEM_HPP
