#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fans/error.hpp"

namespace fans {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

/// Feature matrix (n x p) with optional 0/1 labels.
struct Dataset {
  Matrix features;
  std::optional<Labels> labels;
  std::vector<std::string> feature_names;

  std::size_t rows() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t cols() const { return static_cast<std::size_t>(features.cols()); }

  const Labels& labels_or_throw() const {
    if (!labels) throw Error(ErrorCode::kShape, "dataset has no labels");
    return *labels;
  }
};

struct DatasetPair {
  Dataset train;
  Dataset test;
};

inline void validate_labels(std::span<const int> y) {
  for (int v : y) {
    if (v != 0 && v != 1) throw Error(ErrorCode::kLabelDomain, "labels must be 0 or 1");
  }
}

inline void validate_finite(const Matrix& x) {
  if (!x.allFinite()) throw Error(ErrorCode::kInvalidData, "feature matrix contains NaN or infinity");
}

inline std::size_t count_class(std::span<const int> y, int label) {
  std::size_t n = 0;
  for (int v : y) n += (v == label);
  return n;
}

/// Rows of x at the given indices, in index order.
inline Matrix take_rows(const Matrix& x, std::span<const std::size_t> idx) {
  Matrix out(static_cast<Eigen::Index>(idx.size()), x.cols());
  for (std::size_t r = 0; r < idx.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(idx[r]));
  return out;
}

inline Labels take(std::span<const int> y, std::span<const std::size_t> idx) {
  Labels out;
  out.reserve(idx.size());
  for (std::size_t i : idx) out.push_back(y[i]);
  return out;
}

inline Dataset subset(const Dataset& data, std::span<const std::size_t> idx) {
  Dataset out;
  out.features = take_rows(data.features, idx);
  if (data.labels) out.labels = take(*data.labels, idx);
  out.feature_names = data.feature_names;
  return out;
}

inline double error_rate(std::span<const int> predicted, std::span<const int> truth) {
  if (predicted.size() != truth.size()) throw Error(ErrorCode::kShape, "prediction/label length mismatch");
  if (truth.empty()) return 0.0;
  std::size_t wrong = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) wrong += (predicted[i] != truth[i]);
  return static_cast<double>(wrong) / static_cast<double>(truth.size());
}

}  // namespace fans
