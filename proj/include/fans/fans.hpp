#pragma once

// Split / estimate / transform / fit / average orchestration.
//
// For each of L random splits the class-conditional marginal densities are
// estimated on the first half, the second half is mapped to log density
// ratios, and a cross-validated L1 logistic regression is fitted on it.
// Prediction averages the L sub-model probabilities.

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fans/dataset.hpp"
#include "fans/error.hpp"
#include "fans/kde.hpp"
#include "fans/parallel.hpp"
#include "fans/plr.hpp"
#include "fans/rng.hpp"
#include "fans/transform.hpp"

namespace fans {

struct FansConfig {
  Variant variant = Variant::kFans;
  std::size_t splits = 20;
  bool balanced_pairing = true;
  double floor = kde::kDefaultFloor;
  kde::BandwidthRule bandwidth = kde::BandwidthRule::theory_log();
  bool grid_cache = false;
  std::size_t lambda_count = 100;
  double lambda_ratio = 1e-3;
  std::size_t cv_folds = 5;
  plr::CvLoss cv_loss = plr::CvLoss::kMisclassification;
  std::uint64_t seed = 1;
  std::size_t workers = 0;  // 0: FANS_WORKERS or 1

  void validate() const {
    if (splits < 1) throw Error(ErrorCode::kConfig, "number of splits must be at least 1");
    if (balanced_pairing && splits % 2 != 0) {
      throw Error(ErrorCode::kConfig, "balanced pairing needs an even number of splits, got " + std::to_string(splits));
    }
    if (!(floor > 0.0 && floor <= 1.0)) throw Error(ErrorCode::kConfig, "density floor must lie in (0, 1]");
    if (lambda_count < 2) throw Error(ErrorCode::kConfig, "penalty path needs at least two levels");
    if (!(lambda_ratio > 0.0 && lambda_ratio < 1.0)) throw Error(ErrorCode::kConfig, "penalty ratio must lie in (0, 1)");
    if (cv_folds < 2) throw Error(ErrorCode::kConfig, "cross-validation needs at least two folds");
  }

  plr::PathOptions path_options() const {
    plr::PathOptions o;
    o.lambda_count = lambda_count;
    o.lambda_ratio = lambda_ratio;
    return o;
  }
};

struct Split {
  std::vector<std::size_t> part1;  // density estimation
  std::vector<std::size_t> part2;  // penalized regression

  bool operator==(const Split&) const = default;
};

using SplitPlan = std::vector<Split>;

namespace detail {

// Stratified half split. Each class is shuffled by a stream keyed by its
// smallest row index, so relabeling the classes yields the same partition.
inline Split draw_split(std::span<const int> labels, std::uint64_t seed, std::uint64_t draw) {
  Split split;
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) members.push_back(i);
    }
    rng::Stream stream(seed, "split", draw, members.front());
    stream.shuffle(members);
    std::size_t first = members.size() / 2;
    if (members.size() % 2 == 1 && stream.bernoulli(0.5)) ++first;
    split.part1.insert(split.part1.end(), members.begin(), members.begin() + static_cast<std::ptrdiff_t>(first));
    split.part2.insert(split.part2.end(), members.begin() + static_cast<std::ptrdiff_t>(first), members.end());
  }
  std::sort(split.part1.begin(), split.part1.end());
  std::sort(split.part2.begin(), split.part2.end());
  return split;
}

inline std::uint64_t split_cv_seed(std::uint64_t seed, std::size_t l) {
  return rng::splitmix64(rng::splitmix64(seed ^ rng::tag_hash("split-cv")) ^ l);
}

}  // namespace detail

/// L stratified half splits. With pairing, split 2k+1 is split 2k with the
/// parts swapped (0-based).
inline SplitPlan make_splits(std::span<const int> labels, std::size_t count, std::uint64_t seed,
                             bool balanced_pairing = true) {
  validate_labels(labels);
  if (labels.size() < 4) throw Error(ErrorCode::kStratification, "need at least 4 rows to split");
  for (int label : {0, 1}) {
    if (count_class(labels, label) < 2) {
      throw Error(ErrorCode::kStratification, "class " + std::to_string(label) + " has fewer than 2 members");
    }
  }
  if (balanced_pairing && count % 2 != 0) throw Error(ErrorCode::kConfig, "balanced pairing needs an even number of splits");
  SplitPlan plan;
  plan.reserve(count);
  for (std::size_t l = 0; l < count; ++l) {
    if (balanced_pairing && l % 2 == 1) {
      plan.push_back({plan.back().part2, plan.back().part1});
    } else {
      plan.push_back(detail::draw_split(labels, seed, balanced_pairing ? l / 2 : l));
    }
  }
  return plan;
}

struct SubModel {
  DensityPair densities;
  plr::PlrModel regression;
};

struct FansModel {
  FansConfig config;
  std::size_t features = 0;
  std::vector<SubModel> submodels;

  Variant variant() const { return config.variant; }
};

/// Fits one sub-model from a split. Exposed for composition tests.
inline SubModel fit_submodel(const Matrix& x, std::span<const int> y, const Split& split, const FansConfig& config,
                             std::uint64_t cv_seed, plr::CvResult* cv_out = nullptr) {
  const Matrix x1 = take_rows(x, split.part1);
  const Labels y1 = take(y, split.part1);
  DensityPair dp = fit_density_pair(x1, y1, config.bandwidth, config.floor, config.grid_cache);
  const Matrix z2 = augment_matrix(take_rows(x, split.part2), dp, config.variant);
  const Labels y2 = take(y, split.part2);
  plr::CvOptions cv;
  cv.folds = config.cv_folds;
  cv.loss = config.cv_loss;
  plr::PlrModel model = plr::fit_cv(z2, y2, config.path_options(), cv, cv_seed, cv_out);
  return {std::move(dp), std::move(model)};
}

inline FansModel train(const Dataset& data, const FansConfig& config) {
  config.validate();
  const Labels& y = data.labels_or_throw();
  validate_labels(y);
  if (data.cols() < 1) throw Error(ErrorCode::kShape, "dataset has no features");
  if (data.rows() != y.size()) throw Error(ErrorCode::kShape, "row/label count mismatch");
  validate_finite(data.features);
  const SplitPlan plan = make_splits(y, config.splits, config.seed, config.balanced_pairing);

  std::vector<std::optional<SubModel>> fitted(plan.size());
  parallel_for(plan.size(), resolve_workers(config.workers), [&](std::size_t l) {
    fitted[l].emplace(fit_submodel(data.features, y, plan[l], config, detail::split_cv_seed(config.seed, l)));
  });

  FansModel model;
  model.config = config;
  model.features = data.cols();
  model.submodels.reserve(plan.size());
  for (auto& sub : fitted) model.submodels.push_back(std::move(*sub));
  return model;
}

/// p_l for every row and sub-model: result[l][i].
inline std::vector<Vector> submodel_probabilities(const FansModel& model, const Matrix& x,
                                                  std::size_t workers = 1) {
  if (static_cast<std::size_t>(x.cols()) != model.features) {
    throw Error(ErrorCode::kShape, "expected " + std::to_string(model.features) + " columns, got " +
                                       std::to_string(x.cols()));
  }
  std::vector<Vector> probs(model.submodels.size());
  parallel_for(model.submodels.size(), workers, [&](std::size_t l) {
    const auto& sub = model.submodels[l];
    const Vector eta = plr::logits(sub.regression, augment_matrix(x, sub.densities, model.variant()));
    probs[l] = eta.unaryExpr([](double e) { return plr::sigmoid(e); });
  });
  return probs;
}

/// Average of the sub-model probabilities, reduced in sub-model order.
inline Vector predict_proba(const FansModel& model, const Matrix& x, std::size_t workers = 1) {
  const auto probs = submodel_probabilities(model, x, workers);
  Vector avg = Vector::Zero(x.rows());
  for (const auto& p : probs) avg += p;
  return avg / static_cast<double>(probs.size());
}

inline Labels threshold(const Vector& prob) {
  Labels out(static_cast<std::size_t>(prob.size()));
  for (Eigen::Index i = 0; i < prob.size(); ++i) out[static_cast<std::size_t>(i)] = prob[i] >= 0.5 ? 1 : 0;
  return out;
}

inline Labels predict(const FansModel& model, const Matrix& x, std::size_t workers = 1) {
  return threshold(predict_proba(model, x, workers));
}

/// Each sub-model votes at 1/2; ties go to class 1.
inline Labels majority_vote_predict(const FansModel& model, const Matrix& x, std::size_t workers = 1) {
  const auto probs = submodel_probabilities(model, x, workers);
  Labels out(static_cast<std::size_t>(x.rows()));
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    std::size_t votes = 0;
    for (const auto& p : probs) votes += p[i] >= 0.5 ? 1 : 0;
    out[static_cast<std::size_t>(i)] = 2 * votes >= probs.size() ? 1 : 0;
  }
  return out;
}

}  // namespace fans
