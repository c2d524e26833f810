#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "fans/error.hpp"

namespace fans::metrics {

enum class SeKind { kRobust, kPlainSd };

inline double median(std::span<const double> values) {
  if (values.empty()) throw Error(ErrorCode::kInvalidData, "median of an empty sample");
  std::vector<double> v(values.begin(), values.end());
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

struct Summary {
  double median = 0.0;
  double se = 0.0;
};

/// median and standard error. kRobust: 1.4826 * MAD / sqrt(R);
/// kPlainSd: sample SD / sqrt(R) (0 for a single repetition).
inline Summary compute_metrics(std::span<const double> errors, SeKind kind = SeKind::kRobust) {
  if (errors.empty()) throw Error(ErrorCode::kInvalidData, "no repetitions to summarize");
  Summary s;
  s.median = median(errors);
  const double r = static_cast<double>(errors.size());
  if (kind == SeKind::kRobust) {
    std::vector<double> dev;
    dev.reserve(errors.size());
    for (double e : errors) dev.push_back(std::abs(e - s.median));
    s.se = 1.4826 * median(dev) / std::sqrt(r);
  } else if (errors.size() > 1) {
    double mean = 0.0;
    for (double e : errors) mean += e;
    mean /= r;
    double ss = 0.0;
    for (double e : errors) ss += (e - mean) * (e - mean);
    s.se = std::sqrt(ss / (r - 1.0)) / std::sqrt(r);
  }
  return s;
}

}  // namespace fans::metrics
