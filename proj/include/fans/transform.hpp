#pragma once

// Log-density-ratio feature augmentation: z_j = log f_j(x_j) - log g_j(x_j).

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fans/dataset.hpp"
#include "fans/error.hpp"
#include "fans/kde.hpp"
#include "fans/parallel.hpp"

namespace fans {

enum class Variant { kFans, kFans2 };

inline std::string_view to_string(Variant v) { return v == Variant::kFans ? "fans" : "fans2"; }

inline Variant parse_variant(std::string_view text) {
  if (text == "fans") return Variant::kFans;
  if (text == "fans2") return Variant::kFans2;
  throw Error(ErrorCode::kConfig, "unknown variant '" + std::string(text) + "'");
}

/// Per-feature estimates for class 1 (f) and class 0 (g).
struct DensityPair {
  std::vector<kde::MarginalDensity> class1;
  std::vector<kde::MarginalDensity> class0;

  DensityPair(std::vector<kde::MarginalDensity> f, std::vector<kde::MarginalDensity> g)
      : class1(std::move(f)), class0(std::move(g)) {
    if (class1.empty() || class1.size() != class0.size()) {
      throw Error(ErrorCode::kShape, "density pair needs p >= 1 estimates for each class");
    }
  }

  std::size_t features() const noexcept { return class1.size(); }

  double log_ratio(std::size_t j, double x) const {
    return class1[j].log_density(x) - class0[j].log_density(x);
  }
};

inline std::size_t augmented_width(std::size_t p, Variant variant) {
  return variant == Variant::kFans ? p : 2 * p;
}

/// Fits f_j on the class-1 rows and g_j on the class-0 rows of x, column by
/// column. Bandwidths follow each class's own sample size.
inline DensityPair fit_density_pair(const Matrix& x, std::span<const int> y,
                                    const kde::BandwidthRule& rule, double floor,
                                    bool grid_cache = false, std::size_t workers = 1) {
  if (static_cast<std::size_t>(x.rows()) != y.size()) throw Error(ErrorCode::kShape, "row/label count mismatch");
  std::vector<std::size_t> rows1, rows0;
  for (std::size_t i = 0; i < y.size(); ++i) (y[i] == 1 ? rows1 : rows0).push_back(i);
  if (rows1.empty() || rows0.empty()) throw Error(ErrorCode::kEmptyClass, "density fit needs both classes");

  const auto p = static_cast<std::size_t>(x.cols());
  std::vector<std::optional<kde::MarginalDensity>> f(p), g(p);
  parallel_for(p, workers, [&](std::size_t j) {
    std::vector<double> a, b;
    a.reserve(rows1.size());
    b.reserve(rows0.size());
    for (std::size_t i : rows1) a.push_back(x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    for (std::size_t i : rows0) b.push_back(x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
    f[j].emplace(kde::fit_kde(a, rule, floor, grid_cache));
    g[j].emplace(kde::fit_kde(b, rule, floor, grid_cache));
  });
  std::vector<kde::MarginalDensity> fs, gs;
  fs.reserve(p);
  gs.reserve(p);
  for (std::size_t j = 0; j < p; ++j) {
    fs.push_back(std::move(*f[j]));
    gs.push_back(std::move(*g[j]));
  }
  return DensityPair(std::move(fs), std::move(gs));
}

/// FANS: z (length p). FANS2: [z, x] (length 2p), transformed block first.
inline std::vector<double> augment_row(std::span<const double> x, const DensityPair& dp, Variant variant) {
  const std::size_t p = dp.features();
  if (x.size() != p) throw Error(ErrorCode::kShape, "row length does not match density pair");
  std::vector<double> out;
  out.reserve(augmented_width(p, variant));
  for (std::size_t j = 0; j < p; ++j) {
    if (!std::isfinite(x[j])) throw Error(ErrorCode::kInvalidData, "non-finite feature value");
    out.push_back(dp.log_ratio(j, x[j]));
  }
  if (variant == Variant::kFans2) out.insert(out.end(), x.begin(), x.end());
  return out;
}

inline Matrix augment_matrix(const Matrix& x, const DensityPair& dp, Variant variant) {
  const std::size_t p = dp.features();
  if (static_cast<std::size_t>(x.cols()) != p) throw Error(ErrorCode::kShape, "column count does not match density pair");
  validate_finite(x);
  const Eigen::Index n = x.rows();
  const auto pi = static_cast<Eigen::Index>(p);
  Matrix z(n, static_cast<Eigen::Index>(augmented_width(p, variant)));
  for (Eigen::Index j = 0; j < pi; ++j) {
    const auto& f = dp.class1[static_cast<std::size_t>(j)];
    const auto& g = dp.class0[static_cast<std::size_t>(j)];
    for (Eigen::Index i = 0; i < n; ++i) z(i, j) = f.log_density(x(i, j)) - g.log_density(x(i, j));
  }
  if (variant == Variant::kFans2) z.rightCols(pi) = x;
  return z;
}

}  // namespace fans
