#pragma once

// Reference classifiers built from the same parts: kernel Naive Bayes
// (unit coefficients on the log density ratios) and L1 logistic regression
// on the raw features.

#include <cmath>
#include <cstdint>

#include "fans/dataset.hpp"
#include "fans/kde.hpp"
#include "fans/plr.hpp"
#include "fans/transform.hpp"

namespace fans::baselines {

struct NbModel {
  DensityPair densities;
  double log_prior_odds = 0.0;
};

inline NbModel fit_nb(const Dataset& data, const kde::BandwidthRule& rule, double floor = kde::kDefaultFloor,
                      bool balanced_prior = false) {
  const Labels& y = data.labels_or_throw();
  validate_labels(y);
  validate_finite(data.features);
  const auto n1 = static_cast<double>(count_class(y, 1));
  const auto n0 = static_cast<double>(count_class(y, 0));
  if (n1 == 0.0 || n0 == 0.0) throw Error(ErrorCode::kEmptyClass, "naive Bayes needs both classes");
  DensityPair dp = fit_density_pair(data.features, y, rule, floor);
  return {std::move(dp), balanced_prior ? 0.0 : std::log(n1) - std::log(n0)};
}

/// sum_j log f_j(x_j)/g_j(x_j) + log prior odds, per row.
inline Vector nb_scores(const NbModel& model, const Matrix& x) {
  const Matrix z = augment_matrix(x, model.densities, Variant::kFans);
  Vector s(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < z.cols(); ++j) total += z(i, j);
    s[i] = total + model.log_prior_odds;
  }
  return s;
}

inline Labels predict_nb(const NbModel& model, const Matrix& x) {
  const Vector s = nb_scores(model, x);
  Labels out(static_cast<std::size_t>(s.size()));
  for (Eigen::Index i = 0; i < s.size(); ++i) out[static_cast<std::size_t>(i)] = s[i] >= 0.0 ? 1 : 0;
  return out;
}

inline plr::PlrModel fit_plr_raw(const Dataset& data, const plr::PathOptions& path, const plr::CvOptions& cv,
                                 std::uint64_t seed, plr::CvResult* cv_out = nullptr) {
  return plr::fit_cv(data.features, data.labels_or_throw(), path, cv, seed, cv_out);
}

inline Labels predict_plr(const plr::PlrModel& model, const Matrix& x) {
  const Vector eta = plr::logits(model, x);
  Labels out(static_cast<std::size_t>(eta.size()));
  for (Eigen::Index i = 0; i < eta.size(); ++i) out[static_cast<std::size_t>(i)] = eta[i] >= 0.0 ? 1 : 0;
  return out;
}

}  // namespace fans::baselines
