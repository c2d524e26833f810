#pragma once

// Seeded generators for the synthetic benchmark designs.
//
// Every row is drawn from its own counter-based stream keyed by
// (seed, design/part tag, row index); train and test use different tags.

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fans/dataset.hpp"
#include "fans/error.hpp"
#include "fans/rng.hpp"

namespace fans::sim {

enum class Example { kEx1, kEx2, kEx3, kEx4, kEx5, kIntroToy };

inline std::string_view to_string(Example e) {
  switch (e) {
    case Example::kEx1: return "ex1";
    case Example::kEx2: return "ex2";
    case Example::kEx3: return "ex3";
    case Example::kEx4: return "ex4";
    case Example::kEx5: return "ex5";
    case Example::kIntroToy: return "intro";
  }
  return "?";
}

inline Example parse_example(std::string_view text) {
  for (Example e : {Example::kEx1, Example::kEx2, Example::kEx3, Example::kEx4, Example::kEx5, Example::kIntroToy}) {
    if (text == to_string(e)) return e;
  }
  throw Error(ErrorCode::kConfig, "unknown example '" + std::string(text) + "'");
}

inline constexpr std::size_t kSignalDims = 10;

struct SimSpec {
  Example example = Example::kEx1;
  std::size_t p = 100;
  std::size_t n_per_class = 100;
  std::size_t n_test_per_class = 100;
  double rho = 0.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (p < 1) throw Error(ErrorCode::kConfig, "dimension must be at least 1");
    if (n_per_class < 1) throw Error(ErrorCode::kConfig, "need at least one training row per class");
    switch (example) {
      case Example::kEx1:
      case Example::kEx2:
      case Example::kEx3:
      case Example::kIntroToy:
        if (p < kSignalDims) throw Error(ErrorCode::kConfig, "this design needs p >= 10");
        break;
      case Example::kEx4:
        if (p < 2) throw Error(ErrorCode::kConfig, "ball-vs-shell needs p >= 2 (the shell is empty for p = 1)");
        break;
      case Example::kEx5:
        if (p < 3) throw Error(ErrorCode::kConfig, "non-additive design needs p >= 3");
        break;
    }
    if (!(rho >= 0.0 && rho < 1.0)) throw Error(ErrorCode::kConfig, "rho must lie in [0, 1)");
  }
};

/// x_1 = z_1, x_j = rho x_{j-1} + sqrt(1 - rho^2) z_j: exact draw from
/// N(0, Sigma) with Sigma_ij = rho^|i-j|.
inline void ar1_row(rng::Stream& s, double rho, std::span<double> out) {
  const double c = std::sqrt(1.0 - rho * rho);
  for (std::size_t j = 0; j < out.size(); ++j) {
    const double z = s.normal();
    out[j] = j == 0 ? z : rho * out[j - 1] + c * z;
  }
}

/// x = sqrt(rho) w 1 + sqrt(1 - rho) z: exact draw from N(0, (1-rho) I + rho 11').
inline void equicorrelated_row(rng::Stream& s, double rho, std::span<double> out) {
  const double common = std::sqrt(rho) * s.normal();
  const double c = std::sqrt(1.0 - rho);
  for (double& v : out) v = common + c * s.normal();
}

inline void add_signal(std::span<double> out, double shift) {
  for (std::size_t j = 0; j < kSignalDims && j < out.size(); ++j) out[j] += shift;
}

/// Uniform point in the unit ball: r u with u on the sphere and r = U^{1/p}.
inline void ball_row(rng::Stream& s, std::span<double> out) {
  double norm2 = 0.0;
  do {
    norm2 = 0.0;
    for (double& v : out) {
      v = s.normal();
      norm2 += v * v;
    }
  } while (norm2 == 0.0);
  const double r = std::pow(s.uniform(), 1.0 / static_cast<double>(out.size()));
  const double scale = r / std::sqrt(norm2);
  for (double& v : out) v *= scale;
}

/// Vol(unit ball) / Vol([-1,1]^p).
inline double ball_cube_volume_ratio(std::size_t p) {
  const double d = static_cast<double>(p);
  return std::exp(0.5 * d * std::log(std::numbers::pi) - std::lgamma(0.5 * d + 1.0) - d * std::numbers::ln2);
}

/// Uniform point in [-1,1]^p outside the unit ball, by rejection from the
/// cube. Adds the number of rejected candidates to *rejected when given.
inline void shell_row(rng::Stream& s, std::span<double> out, std::size_t* rejected = nullptr) {
  if (1.0 - ball_cube_volume_ratio(out.size()) < 1e-6) {
    throw Error(ErrorCode::kConfig, "cube-minus-ball acceptance probability below 1e-6");
  }
  while (true) {
    double norm2 = 0.0;
    for (double& v : out) {
      v = 2.0 * s.uniform() - 1.0;
      norm2 += v * v;
    }
    if (norm2 > 1.0) return;
    if (rejected) ++*rejected;
  }
}

inline int nonadditive_label(std::span<const double> x) {
  const double x2 = x[1] * x[1];
  const double x3 = x[2] * x[2];
  return x[0] * x[0] * std::sqrt(x2 + x3 * x3 + 1.0) >= 0.75 ? 1 : 0;
}

/// w o a + (1 - w) o b, coordinate-wise.
inline void masked_mix(std::span<const int> w, std::span<const double> a, std::span<const double> b,
                       std::span<double> out) {
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = w[j] ? a[j] : b[j];
}

namespace detail {

inline void draw_row(const SimSpec& spec, rng::Stream& s, int label, std::span<double> out) {
  switch (spec.example) {
    case Example::kEx1:
      ar1_row(s, spec.rho, out);
      if (label == 1) add_signal(out, 1.0);
      return;
    case Example::kEx2:
      equicorrelated_row(s, spec.rho, out);
      if (label == 1) add_signal(out, 1.0);
      return;
    case Example::kEx3:
      if (label == 0) {
        equicorrelated_row(s, spec.rho, out);
        add_signal(out, 3.0);
      } else if (s.bernoulli(0.5)) {
        for (double& v : out) v = s.normal();
      } else {
        equicorrelated_row(s, spec.rho, out);
        add_signal(out, 6.0);
      }
      return;
    case Example::kEx4:
      if (label == 0) {
        ball_row(s, out);
      } else {
        shell_row(s, out);
      }
      return;
    case Example::kEx5:
      for (double& v : out) v = s.normal();
      return;
    case Example::kIntroToy:
      if (label == 0) {
        equicorrelated_row(s, 0.5, out);
        add_signal(out, 5.0);
      } else {
        std::vector<double> a(out.size()), b(out.size());
        std::vector<int> w(out.size());
        for (double& v : a) v = s.normal();
        equicorrelated_row(s, 0.5, b);
        add_signal(b, 6.0);
        for (int& m : w) m = s.bernoulli(0.5) ? 1 : 0;
        masked_mix(w, a, b, out);
      }
      return;
  }
}

inline Dataset draw_set(const SimSpec& spec, std::size_t per_class, std::string_view part) {
  const std::string tag = std::string(to_string(spec.example)) + "-" + std::string(part);
  const std::size_t n = 2 * per_class;
  Dataset data;
  data.features.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(spec.p));
  data.labels = Labels(n);
  std::vector<double> row(spec.p);
  for (std::size_t i = 0; i < n; ++i) {
    rng::Stream s(spec.seed, tag, i);
    int label = i < per_class ? 0 : 1;
    draw_row(spec, s, label, row);
    if (spec.example == Example::kEx5) label = nonadditive_label(row);
    for (std::size_t j = 0; j < spec.p; ++j) data.features(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row[j];
    (*data.labels)[i] = label;
  }
  data.feature_names.reserve(spec.p);
  for (std::size_t j = 0; j < spec.p; ++j) data.feature_names.push_back("x" + std::to_string(j + 1));
  return data;
}

}  // namespace detail

/// Train and test sets. For every design except Ex5 the first half of the
/// rows is class 0 and the second half class 1. Ex5 draws 2n rows from
/// N(0, I) and labels them by the indicator, so class sizes are random.
inline DatasetPair generate(const SimSpec& spec) {
  spec.validate();
  return {detail::draw_set(spec, spec.n_per_class, "train"), detail::draw_set(spec, spec.n_test_per_class, "test")};
}

}  // namespace fans::sim
