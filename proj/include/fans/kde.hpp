#pragma once

// Univariate Gaussian-kernel density estimates with two-sided truncation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fans/error.hpp"

namespace fans::kde {

inline constexpr double kDefaultFloor = 1e-2;
inline constexpr std::size_t kGridPoints = 2048;
inline constexpr double kGridHalo = 5.0;  // grid reaches this many bandwidths past the data

struct BandwidthRule {
  enum class Kind { kTheoryLog, kSilverman, kFixed };

  Kind kind = Kind::kTheoryLog;
  double fixed_h = 1.0;

  static BandwidthRule theory_log() { return {Kind::kTheoryLog, 1.0}; }
  static BandwidthRule silverman() { return {Kind::kSilverman, 1.0}; }
  static BandwidthRule fixed(double h) {
    if (!(h > 0.0) || !std::isfinite(h)) {
      throw Error(ErrorCode::kConfig, "fixed bandwidth must be positive and finite");
    }
    return {Kind::kFixed, h};
  }

  /// Accepts "theory", "silverman" or "fixed:<h>".
  static BandwidthRule parse(std::string_view text) {
    if (text == "theory") return theory_log();
    if (text == "silverman") return silverman();
    if (text.starts_with("fixed:")) {
      const std::string value(text.substr(6));
      double h = 0.0;
      try {
        std::size_t used = 0;
        h = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
      } catch (const std::exception&) {
        throw Error(ErrorCode::kConfig, "bad fixed bandwidth '" + value + "'");
      }
      return fixed(h);
    }
    throw Error(ErrorCode::kConfig, "unknown bandwidth rule '" + std::string(text) + "'");
  }

  std::string name() const {
    switch (kind) {
      case Kind::kTheoryLog: return "theory";
      case Kind::kSilverman: return "silverman";
      case Kind::kFixed: break;
    }
    char buf[64];
    std::snprintf(buf, sizeof buf, "fixed:%.17g", fixed_h);
    return buf;
  }

  friend bool operator==(const BandwidthRule&, const BandwidthRule&) = default;
};

struct Bandwidth {
  double value = 1.0;
  bool fallback = false;  // rule produced 0 or a non-finite value; 1.0 substituted
};

/// TheoryLog: (log n / n)^{1/5}. Silverman: 1.06 sd n^{-1/5}. Fixed: h.
inline Bandwidth compute_bandwidth(std::size_t n, const BandwidthRule& rule, double sample_sd = 0.0) {
  if (n == 0) throw Error(ErrorCode::kEmptyClass, "bandwidth requested for an empty class");
  const double nd = static_cast<double>(n);
  double h = 0.0;
  switch (rule.kind) {
    case BandwidthRule::Kind::kTheoryLog: h = std::pow(std::log(nd) / nd, 0.2); break;
    case BandwidthRule::Kind::kSilverman: h = 1.06 * sample_sd * std::pow(nd, -0.2); break;
    case BandwidthRule::Kind::kFixed: h = rule.fixed_h; break;
  }
  if (!(h > 0.0) || !std::isfinite(h)) return {1.0, true};
  return {h, false};
}

inline double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  double mean = 0.0;
  for (double v : values) mean += v;
  mean /= static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

/// One fitted marginal density for one feature of one class. Immutable after
/// construction; evaluation is clamped to [floor, 1/floor].
class MarginalDensity {
 public:
  MarginalDensity(std::vector<double> samples, double bandwidth, double floor,
                  bool grid_cache = false)
      : samples_(std::move(samples)), bandwidth_(bandwidth), floor_(floor) {
    if (samples_.empty()) throw Error(ErrorCode::kEmptyClass, "density fit on empty sample");
    for (double v : samples_) {
      if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidData, "non-finite value in density sample");
    }
    if (!(bandwidth_ > 0.0) || !std::isfinite(bandwidth_)) {
      throw Error(ErrorCode::kConfig, "bandwidth must be positive and finite");
    }
    if (!(floor_ > 0.0) || !(floor_ <= 1.0)) {
      throw Error(ErrorCode::kConfig, "density floor must lie in (0, 1]");
    }
    cap_ = 1.0 / floor_;
    norm_ = 1.0 / (static_cast<double>(samples_.size()) * bandwidth_ *
                   std::sqrt(2.0 * std::numbers::pi));
    inv_h_ = 1.0 / bandwidth_;
    if (grid_cache) build_grid();
  }

  const std::vector<double>& samples() const noexcept { return samples_; }
  double bandwidth() const noexcept { return bandwidth_; }
  double floor() const noexcept { return floor_; }
  double cap() const noexcept { return cap_; }
  bool grid_cached() const noexcept { return grid_ != nullptr; }

  /// Unclamped estimate (1/(n h)) sum_i phi((X_i - x)/h), summed in index order.
  double raw_density(double x) const {
    double sum = 0.0;
    for (double s : samples_) {
      const double u = (s - x) * inv_h_;
      sum += std::exp(-0.5 * u * u);
    }
    return sum * norm_;
  }

  double density(double x) const {
    const double raw = grid_ ? grid_->interpolate(x, *this) : raw_density(x);
    return std::clamp(raw, floor_, cap_);
  }

  double log_density(double x) const { return std::log(density(x)); }

 private:
  struct Grid {
    double lo = 0.0;
    double step = 0.0;
    std::vector<double> values;

    double interpolate(double x, const MarginalDensity& owner) const {
      const double t = (x - lo) / step;
      if (!(t >= 0.0) || t > static_cast<double>(values.size() - 1)) return owner.raw_density(x);
      const auto i = std::min(static_cast<std::size_t>(t), values.size() - 2);
      const double frac = t - static_cast<double>(i);
      return values[i] + frac * (values[i + 1] - values[i]);
    }
  };

  void build_grid() {
    const auto [lo_it, hi_it] = std::minmax_element(samples_.begin(), samples_.end());
    auto grid = std::make_shared<Grid>();
    grid->lo = *lo_it - kGridHalo * bandwidth_;
    const double hi = *hi_it + kGridHalo * bandwidth_;
    grid->step = (hi - grid->lo) / static_cast<double>(kGridPoints - 1);
    grid->values.resize(kGridPoints);
    for (std::size_t k = 0; k < kGridPoints; ++k) {
      grid->values[k] = raw_density(grid->lo + grid->step * static_cast<double>(k));
    }
    grid_ = std::move(grid);
  }

  std::vector<double> samples_;
  double bandwidth_;
  double floor_;
  double cap_ = 1.0;
  double norm_ = 1.0;
  double inv_h_ = 1.0;
  std::shared_ptr<const Grid> grid_;
};

inline MarginalDensity fit_kde(std::span<const double> samples, const BandwidthRule& rule,
                               double floor = kDefaultFloor, bool grid_cache = false) {
  if (samples.empty()) throw Error(ErrorCode::kEmptyClass, "density fit on empty sample");
  for (double v : samples) {
    if (!std::isfinite(v)) throw Error(ErrorCode::kInvalidData, "non-finite value in density sample");
  }
  const double sd = rule.kind == BandwidthRule::Kind::kSilverman ? sample_sd(samples) : 0.0;
  const Bandwidth h = compute_bandwidth(samples.size(), rule, sd);
  return MarginalDensity({samples.begin(), samples.end()}, h.value, floor, grid_cache);
}

inline double eval_density(const MarginalDensity& est, double x) { return est.density(x); }
inline double eval_log_density(const MarginalDensity& est, double x) { return est.log_density(x); }

}  // namespace fans::kde
