#ifndef SMNOMA_DETECT_HPP
#define SMNOMA_DETECT_HPP

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "smnoma/modem.hpp"

namespace smnoma {

struct MrcStatistic {
  std::vector<double> scores;  // one per candidate antenna
};

struct DetectionResult {
  int antenna_local = 0;
  int point_index = -1;  // -1 for index-only detection
  double metric = 0.0;   // winning score (MRC) or squared distance (ML)
};

/// Index detection by correlating against each candidate column and taking
/// the largest magnitude (smallest index on ties). norm_compensated divides
/// by the column norm; the plain statistic is biased toward strong columns.
inline DetectionResult mrc_detect_index(const CVector& y,
                                        const std::vector<CVector>& columns,
                                        bool norm_compensated = false) {
  if (columns.empty())
    throw std::invalid_argument("mrc_detect_index: no candidate columns");
  DetectionResult r;
  r.metric = -1.0;
  for (std::size_t i = 0; i < columns.size(); ++i) {
    double score = std::abs(columns[i].dot(y));  // Eigen dot conjugates lhs
    if (norm_compensated) {
      const double n = columns[i].norm();
      score = n > 0.0 ? score / n : 0.0;
    }
    if (score > r.metric) {
      r.metric = score;
      r.antenna_local = static_cast<int>(i);
    }
  }
  return r;
}

inline MrcStatistic mrc_scores(const CVector& y,
                               const std::vector<CVector>& columns,
                               bool norm_compensated = false) {
  MrcStatistic s;
  s.scores.reserve(columns.size());
  for (const auto& col : columns) {
    double v = std::abs(col.dot(y));
    if (norm_compensated) {
      const double n = col.norm();
      v = n > 0.0 ? v / n : 0.0;
    }
    s.scores.push_back(v);
  }
  return s;
}

/// Joint (antenna, symbol) minimum-distance detection; ties go to the
/// lexicographically smallest (i, n).
inline DetectionResult ml_detect(const CVector& y,
                                 const std::vector<CVector>& columns,
                                 const Constellation& constellation) {
  if (columns.empty() || constellation.points.empty())
    throw std::invalid_argument("ml_detect: empty hypothesis set");
  DetectionResult r;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < columns.size(); ++i) {
    for (std::size_t n = 0; n < constellation.points.size(); ++n) {
      const double d =
          (y - columns[i] * constellation.points[n]).squaredNorm();
      if (d < best) {
        best = d;
        r.antenna_local = static_cast<int>(i);
        r.point_index = static_cast<int>(n);
      }
    }
  }
  r.metric = best;
  return r;
}

/// Inverse-square-root transform of (sigma^2 I + C): after applying it the
/// residual disturbance is white with unit variance. Built once per
/// realization and applied to the received vector and every candidate column.
class Whitener {
 public:
  Whitener(const CMatrix& interference_covariance, double noise_power) {
    const auto n = interference_covariance.rows();
    if (interference_covariance.cols() != n)
      throw std::invalid_argument("whiten: covariance must be square");
    if (noise_power == 0.0 && interference_covariance.norm() == 0.0) {
      identity_ = true;
      return;
    }
    CMatrix m = interference_covariance;
    m += noise_power * CMatrix::Identity(n, n);
    llt_.compute(m);
    if (llt_.info() != Eigen::Success)
      throw std::runtime_error("whiten: covariance not positive definite");
  }

  CVector apply(const CVector& v) const {
    if (identity_) return v;
    return llt_.matrixL().solve(v);
  }

  std::vector<CVector> apply(const std::vector<CVector>& cols) const {
    std::vector<CVector> out;
    out.reserve(cols.size());
    for (const auto& c : cols) out.push_back(apply(c));
    return out;
  }

 private:
  Eigen::LLT<CMatrix> llt_;
  bool identity_ = false;
};

inline std::pair<CVector, std::vector<CVector>> whiten(
    const CVector& y, const std::vector<CVector>& columns,
    const CMatrix& interference_covariance, double noise_power) {
  const Whitener w(interference_covariance, noise_power);
  return {w.apply(y), w.apply(columns)};
}

}  // namespace smnoma

#endif  // SMNOMA_DETECT_HPP
