#pragma once

// L1-penalized logistic regression by cyclic coordinate descent on a
// geometric penalty path, with stratified K-fold cross-validation.
//
// Objective at penalty lambda, on standardized columns x~:
//   (1/n) sum_i [log(1 + exp(eta_i)) - y_i eta_i] + lambda * ||beta~||_1,
//   eta_i = b0 + x~_i' beta~.
// The intercept is not penalized. Coefficients are reported on the original
// column scale.
//
// Residuals, weights and losses are written so that relabeling (y -> 1-y)
// together with eta -> -eta maps every intermediate quantity to its exact
// negation or to itself.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fans/dataset.hpp"
#include "fans/error.hpp"
#include "fans/parallel.hpp"
#include "fans/rng.hpp"

namespace fans::plr {

inline constexpr double kProbClamp = 1e-5;

struct Standardization {
  Vector mean;
  Vector scale;
};

struct PlrModel {
  double intercept = 0.0;
  Vector coefficients;
  double lambda = 0.0;
  Standardization standardization;

  std::size_t dimension() const { return static_cast<std::size_t>(coefficients.size()); }

  double logit(std::span<const double> z) const {
    if (z.size() != dimension()) throw Error(ErrorCode::kShape, "input length does not match model dimension");
    double eta = intercept;
    for (std::size_t j = 0; j < z.size(); ++j) eta += coefficients[static_cast<Eigen::Index>(j)] * z[j];
    return eta;
  }
};

/// Numerically stable logistic function.
inline double sigmoid(double t) {
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// log(1 + exp(t)) without overflow.
inline double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

inline double predict_prob(const PlrModel& model, std::span<const double> z) {
  return sigmoid(model.logit(z));
}

inline Vector logits(const PlrModel& model, const Matrix& z) {
  if (static_cast<std::size_t>(z.cols()) != model.dimension()) {
    throw Error(ErrorCode::kShape, "column count does not match model dimension");
  }
  Vector eta(z.rows());
  for (Eigen::Index i = 0; i < z.rows(); ++i) {
    double s = model.intercept;
    for (Eigen::Index j = 0; j < z.cols(); ++j) s += model.coefficients[j] * z(i, j);
    eta[i] = s;
  }
  return eta;
}

struct PathOptions {
  std::size_t lambda_count = 100;
  double lambda_ratio = 1e-3;
  double tolerance = 1e-7;        // sup-norm coefficient change between outer iterations
  std::size_t max_outer = 10000;
  std::size_t max_inner_sweeps = 100000;
};

struct PlrPath {
  std::vector<double> lambdas;
  std::vector<PlrModel> models;
};

/// Per-solve diagnostics: penalized objective after each accepted outer step.
struct SolveTrace {
  std::vector<double> objectives;
  std::size_t outer_iterations = 0;
};

enum class CvLoss { kMisclassification, kDeviance };

struct CvResult {
  std::vector<double> lambdas;
  Matrix fold_errors;  // T x K
  Vector mean_error;   // length T
  double selected_lambda = 0.0;
  std::size_t selected_index = 0;
};

namespace detail {

inline void check_inputs(const Matrix& z, std::span<const int> y) {
  if (z.rows() == 0) throw Error(ErrorCode::kShape, "empty design matrix");
  if (static_cast<std::size_t>(z.rows()) != y.size()) throw Error(ErrorCode::kShape, "row/label count mismatch");
  if (!z.allFinite()) throw Error(ErrorCode::kInvalidData, "design matrix contains NaN or infinity");
  validate_labels(y);
  const std::size_t ones = count_class(y, 1);
  if (ones == 0 || ones == y.size()) throw Error(ErrorCode::kDegenerateLabels, "labels contain a single class");
}

inline Standardization standardize_columns(const Matrix& z) {
  const Eigen::Index n = z.rows();
  Standardization s{Vector(z.cols()), Vector(z.cols())};
  for (Eigen::Index j = 0; j < z.cols(); ++j) {
    double mean = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) mean += z(i, j);
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) ss += (z(i, j) - mean) * (z(i, j) - mean);
    const double sd = std::sqrt(ss / static_cast<double>(n));
    s.mean[j] = mean;
    s.scale[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

// y - p(eta) evaluated from the side that keeps relabeling exact.
inline double residual(int y, double eta) { return y == 1 ? sigmoid(-eta) : -sigmoid(eta); }

inline double row_loss(int y, double eta) { return y == 1 ? softplus(-eta) : softplus(eta); }

inline double soft_threshold(double value, double threshold) {
  const double mag = std::abs(value) - threshold;
  if (mag <= 0.0) return 0.0;
  return value > 0.0 ? mag : -mag;
}

/// Holds the standardized design and solves single-lambda problems from a
/// warm start. Not thread-safe; one instance per path.
class PathSolver {
 public:
  PathSolver(const Matrix& z, std::span<const int> y, const PathOptions& options)
      : y_(y.begin(), y.end()), options_(options) {
    check_inputs(z, y);
    n_ = z.rows();
    q_ = z.cols();
    std_ = standardize_columns(z);
    x_.resize(n_, q_);
    for (Eigen::Index j = 0; j < q_; ++j) {
      for (Eigen::Index i = 0; i < n_; ++i) x_(i, j) = (z(i, j) - std_.mean[j]) / std_.scale[j];
    }
    const auto ones = static_cast<double>(count_class(y_, 1));
    const auto zeros = static_cast<double>(y_.size()) - ones;
    null_intercept_ = std::log(ones) - std::log(zeros);
    const double nd = static_cast<double>(n_);
    double lmax = 0.0;
    for (Eigen::Index j = 0; j < q_; ++j) {
      double g = 0.0;
      for (Eigen::Index i = 0; i < n_; ++i) {
        g += x_(i, j) * (y_[static_cast<std::size_t>(i)] == 1 ? zeros / nd : -ones / nd);
      }
      lmax = std::max(lmax, std::abs(g / nd));
    }
    lambda_max_ = lmax;
    beta_ = Vector::Zero(q_);
    b0_ = null_intercept_;
  }

  double lambda_max() const { return lambda_max_; }
  const Standardization& standardization() const { return std_; }
  const Matrix& standardized() const { return x_; }

  void reset() {
    beta_.setZero();
    b0_ = null_intercept_;
  }

  double objective(double b0, const Vector& beta, double lambda) const {
    const Vector eta = linear_predictor(b0, beta);
    return objective_at(eta, beta, lambda);
  }

  /// Minimizes the penalized objective at lambda, starting from the current
  /// state (warm start). Throws on non-convergence.
  void solve(double lambda, SolveTrace* trace = nullptr) {
    if (lambda >= lambda_max_) {
      // KKT at the origin holds exactly for every lambda >= lambda_max.
      reset();
      if (trace) trace->objectives.push_back(objective(b0_, beta_, lambda));
      return;
    }
    Vector eta = linear_predictor(b0_, beta_);
    double current = objective_at(eta, beta_, lambda);
    if (trace) trace->objectives.push_back(current);

    Vector w(n_), r(n_);
    for (std::size_t outer = 0; outer < options_.max_outer; ++outer) {
      for (Eigen::Index i = 0; i < n_; ++i) {
        const double p = std::clamp(sigmoid(eta[i]), kProbClamp, 1.0 - kProbClamp);
        const double q = std::clamp(sigmoid(-eta[i]), kProbClamp, 1.0 - kProbClamp);
        w[i] = p * q;
        r[i] = residual(y_[static_cast<std::size_t>(i)], eta[i]);
      }

      Vector beta = beta_;
      double b0 = b0_;
      inner_solve(lambda, w, r, b0, beta);

      // Backtrack along the proximal-Newton direction until the objective
      // does not increase.
      const Vector dir = beta - beta_;
      const double dir0 = b0 - b0_;
      double step = 1.0;
      Vector cand_beta = beta;
      double cand_b0 = b0;
      Vector cand_eta = linear_predictor(cand_b0, cand_beta);
      double cand = objective_at(cand_eta, cand_beta, lambda);
      while (cand > current && step > 1e-12) {
        step *= 0.5;
        cand_beta = beta_ + step * dir;
        cand_b0 = b0_ + step * dir0;
        cand_eta = linear_predictor(cand_b0, cand_beta);
        cand = objective_at(cand_eta, cand_beta, lambda);
      }
      if (cand > current) {
        // No descent available along the direction: already at the optimum
        // to working precision.
        if (trace) trace->outer_iterations = outer + 1;
        return;
      }

      double change = std::abs(cand_b0 - b0_);
      for (Eigen::Index j = 0; j < q_; ++j) change = std::max(change, std::abs(cand_beta[j] - beta_[j]));
      beta_ = cand_beta;
      b0_ = cand_b0;
      eta = cand_eta;
      current = cand;
      if (trace) {
        trace->objectives.push_back(current);
        trace->outer_iterations = outer + 1;
      }
      if (change < options_.tolerance) return;
    }
    throw Error(ErrorCode::kConvergence,
                "coordinate descent did not converge within " + std::to_string(options_.max_outer) +
                    " outer iterations at lambda=" + std::to_string(lambda));
  }

  PlrModel model(double lambda) const {
    PlrModel m;
    m.lambda = lambda;
    m.standardization = std_;
    m.coefficients.resize(q_);
    double shift = 0.0;
    for (Eigen::Index j = 0; j < q_; ++j) {
      m.coefficients[j] = beta_[j] / std_.scale[j];
      shift += beta_[j] * std_.mean[j] / std_.scale[j];
    }
    m.intercept = b0_ - shift;
    return m;
  }

 private:
  Vector linear_predictor(double b0, const Vector& beta) const {
    Vector eta = Vector::Constant(n_, b0);
    for (Eigen::Index j = 0; j < q_; ++j) {
      if (beta[j] == 0.0) continue;
      for (Eigen::Index i = 0; i < n_; ++i) eta[i] += beta[j] * x_(i, j);
    }
    return eta;
  }

  double objective_at(const Vector& eta, const Vector& beta, double lambda) const {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < n_; ++i) loss += row_loss(y_[static_cast<std::size_t>(i)], eta[i]);
    double l1 = 0.0;
    for (Eigen::Index j = 0; j < q_; ++j) l1 += std::abs(beta[j]);
    return loss / static_cast<double>(n_) + lambda * l1;
  }

  // Weighted lasso on the quadratic approximation, solved in covariance
  // form over theta = (b0, beta). grad holds (1/n) X~' W (u - X~ theta) for
  // the working response u and is kept current through cached Gram columns,
  // so a coordinate update costs O(q). Once the active set settles, the
  // problem restricted to it is solved exactly.
  class Quadratic {
   public:
    Quadratic(const Matrix& x, const Vector& w, const Vector& r, double lambda)
        : x_(x), w_(w), lambda_(lambda), m_(x.cols() + 1), cols_(static_cast<std::size_t>(m_)) {
      const double nd = static_cast<double>(x.rows());
      grad_.resize(m_);
      grad_[0] = r.sum() / nd;
      grad_.tail(m_ - 1) = x.transpose() * r / nd;
      diag_.resize(m_);
      diag_[0] = w.sum() / nd;
      for (Eigen::Index j = 0; j < x.cols(); ++j) diag_[j + 1] = x.col(j).cwiseAbs2().dot(w) / nd;
    }

    Eigen::Index size() const { return m_; }
    double penalty(Eigen::Index k) const { return k == 0 ? 0.0 : lambda_; }

    const Vector& column(Eigen::Index k) {
      auto& c = cols_[static_cast<std::size_t>(k)];
      if (c.size() == 0) {
        const double nd = static_cast<double>(x_.rows());
        const Vector wx = k == 0 ? w_ : Vector(w_.cwiseProduct(x_.col(k - 1)));
        c.resize(m_);
        c[0] = wx.sum() / nd;
        c.tail(m_ - 1) = x_.transpose() * wx / nd;
        c[k] = diag_[k];
      }
      return c;
    }

    // One coordinate update; returns |delta|.
    double update(Eigen::Index k, Vector& theta) {
      if (diag_[k] <= 0.0) return 0.0;
      const double c = grad_[k] + diag_[k] * theta[k];
      const double updated = (k == 0 ? c : soft_threshold(c, lambda_)) / diag_[k];
      const double delta = updated - theta[k];
      if (delta == 0.0) return 0.0;
      theta[k] = updated;
      grad_ -= delta * column(k);
      return std::abs(delta);
    }

    // Exact minimizer on the face fixed by the current signs. Accepted only
    // when the solve is accurate and every sign is kept, so the step cannot
    // increase the objective.
    bool refine(Vector& theta) {
      std::vector<Eigen::Index> act{0};
      for (Eigen::Index k = 1; k < m_; ++k) {
        if (theta[k] != 0.0) act.push_back(k);
      }
      const auto a = static_cast<Eigen::Index>(act.size());
      Matrix g(a, a);
      Vector rhs(a);
      for (Eigen::Index c = 0; c < a; ++c) {
        const Vector& col = column(act[static_cast<std::size_t>(c)]);
        for (Eigen::Index r = 0; r < a; ++r) g(r, c) = col[act[static_cast<std::size_t>(r)]];
      }
      for (Eigen::Index r = 0; r < a; ++r) {
        const Eigen::Index k = act[static_cast<std::size_t>(r)];
        rhs[r] = grad_[k] - (k == 0 ? 0.0 : (theta[k] > 0.0 ? lambda_ : -lambda_));
      }
      const Eigen::LDLT<Matrix> ldlt(g);
      if (ldlt.info() != Eigen::Success) return false;
      const Vector d = ldlt.solve(rhs);
      if (!d.allFinite()) return false;
      if (!((g * d - rhs).norm() <= 1e-9 * rhs.norm())) return false;
      for (Eigen::Index r = 1; r < a; ++r) {
        const Eigen::Index k = act[static_cast<std::size_t>(r)];
        const double next = theta[k] + d[r];
        if (next == 0.0 || (next > 0.0) != (theta[k] > 0.0)) return false;
      }
      for (Eigen::Index r = 0; r < a; ++r) {
        const Eigen::Index k = act[static_cast<std::size_t>(r)];
        theta[k] += d[r];
        grad_ -= d[r] * column(k);
      }
      return true;
    }

   private:
    const Matrix& x_;
    const Vector& w_;
    double lambda_;
    Eigen::Index m_;
    std::vector<Vector> cols_;
    Vector grad_;
    Vector diag_;
  };

  // Full sweeps find the active set; sweeps restricted to it run until
  // stable, after an exact solve on it.
  void inner_solve(double lambda, const Vector& w, const Vector& r, double& b0, Vector& beta) const {
    const double tol = options_.tolerance * 0.1;
    Quadratic quad(x_, w, r, lambda);
    Vector theta(q_ + 1);
    theta[0] = b0;
    theta.tail(q_) = beta;
    std::size_t sweeps = 0;
    std::vector<Eigen::Index> active;
    while (true) {
      double full_change = 0.0;
      for (Eigen::Index k = 0; k < quad.size(); ++k) full_change = std::max(full_change, quad.update(k, theta));
      if (++sweeps > options_.max_inner_sweeps) break;
      if (full_change < tol) {
        b0 = theta[0];
        beta = theta.tail(q_);
        return;
      }
      quad.refine(theta);
      active.assign(1, 0);
      for (Eigen::Index k = 1; k < quad.size(); ++k) {
        if (theta[k] != 0.0) active.push_back(k);
      }
      while (true) {
        double change = 0.0;
        for (Eigen::Index k : active) change = std::max(change, quad.update(k, theta));
        if (++sweeps > options_.max_inner_sweeps || change < tol) break;
      }
      if (sweeps > options_.max_inner_sweeps) break;
    }
    throw Error(ErrorCode::kConvergence, "inner coordinate descent exceeded its sweep budget");
  }

  Matrix x_;
  std::vector<int> y_;
  PathOptions options_;
  Eigen::Index n_ = 0;
  Eigen::Index q_ = 0;
  Standardization std_;
  double null_intercept_ = 0.0;
  double lambda_max_ = 0.0;
  Vector beta_;
  double b0_ = 0.0;
};

}  // namespace detail

/// max_j |(1/n) sum_i x~_ij (y_i - ybar)| on standardized columns.
inline double lambda_max(const Matrix& z, std::span<const int> y) {
  return detail::PathSolver(z, y, PathOptions{}).lambda_max();
}

/// Geometric grid from top down to ratio * top. A zero top (no column
/// correlates with the labels) is replaced by 1; every model on that grid is
/// intercept-only.
inline std::vector<double> lambda_grid(double top, std::size_t count, double ratio) {
  if (count < 2) throw Error(ErrorCode::kConfig, "penalty path needs at least two levels");
  if (!(ratio > 0.0 && ratio < 1.0)) throw Error(ErrorCode::kConfig, "penalty ratio must lie in (0, 1)");
  if (!(top > 0.0)) top = 1.0;
  std::vector<double> grid(count);
  const double log_ratio = std::log(ratio);
  for (std::size_t t = 0; t < count; ++t) {
    grid[t] = top * std::exp(log_ratio * static_cast<double>(t) / static_cast<double>(count - 1));
  }
  return grid;
}

/// Fits every lambda in the given (strictly decreasing) grid with warm starts.
inline PlrPath fit_path(const Matrix& z, std::span<const int> y, std::span<const double> lambdas,
                        const PathOptions& options = {}) {
  for (std::size_t t = 1; t < lambdas.size(); ++t) {
    if (!(lambdas[t] < lambdas[t - 1])) throw Error(ErrorCode::kConfig, "penalty grid must be strictly decreasing");
  }
  detail::PathSolver solver(z, y, options);
  PlrPath path;
  path.lambdas.assign(lambdas.begin(), lambdas.end());
  path.models.reserve(lambdas.size());
  for (double lambda : lambdas) {
    solver.solve(lambda);
    path.models.push_back(solver.model(lambda));
  }
  return path;
}

inline PlrPath fit_path(const Matrix& z, std::span<const int> y, const PathOptions& options = {}) {
  detail::check_inputs(z, y);
  const auto grid = lambda_grid(lambda_max(z, y), options.lambda_count, options.lambda_ratio);
  return fit_path(z, y, grid, options);
}

/// Single-penalty fit from the intercept-only start.
inline PlrModel fit_at(const Matrix& z, std::span<const int> y, double lambda, const PathOptions& options = {},
                       SolveTrace* trace = nullptr) {
  detail::PathSolver solver(z, y, options);
  solver.solve(lambda, trace);
  return solver.model(lambda);
}

/// Fold id per row. Each class is shuffled by a stream keyed by its smallest
/// row index (not by its label), then dealt round-robin into K folds.
inline std::vector<std::size_t> stratified_folds(std::span<const int> y, std::size_t k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::kConfig, "cross-validation needs at least two folds");
  std::vector<std::size_t> fold(y.size());
  for (int label : {0, 1}) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] == label) members.push_back(i);
    }
    if (members.size() < k) {
      throw Error(ErrorCode::kStratification, "class " + std::to_string(label) + " has " +
                                                  std::to_string(members.size()) + " members, fewer than " +
                                                  std::to_string(k) + " folds");
    }
    rng::Stream stream(seed, "cv-folds", members.front());
    stream.shuffle(members);
    for (std::size_t pos = 0; pos < members.size(); ++pos) fold[members[pos]] = pos % k;
  }
  return fold;
}

struct CvOptions {
  std::size_t folds = 5;
  CvLoss loss = CvLoss::kMisclassification;
  std::size_t workers = 1;
};

inline CvResult cross_validate(const Matrix& z, std::span<const int> y, const PathOptions& path_options,
                               const CvOptions& cv_options, std::uint64_t seed) {
  detail::check_inputs(z, y);
  const std::size_t k = cv_options.folds;
  if (y.size() < k) throw Error(ErrorCode::kStratification, "fewer rows than folds");
  const auto fold = stratified_folds(y, k, seed);

  CvResult result;
  result.lambdas = lambda_grid(lambda_max(z, y), path_options.lambda_count, path_options.lambda_ratio);
  const auto t_count = static_cast<Eigen::Index>(result.lambdas.size());
  result.fold_errors = Matrix::Zero(t_count, static_cast<Eigen::Index>(k));

  parallel_for(k, cv_options.workers, [&](std::size_t f) {
    std::vector<std::size_t> train, held;
    for (std::size_t i = 0; i < y.size(); ++i) (fold[i] == f ? held : train).push_back(i);
    const Matrix z_train = take_rows(z, train);
    const Labels y_train = take(y, train);
    const Matrix z_held = take_rows(z, held);
    const PlrPath path = fit_path(z_train, y_train, result.lambdas, path_options);
    for (Eigen::Index t = 0; t < t_count; ++t) {
      const Vector eta = logits(path.models[static_cast<std::size_t>(t)], z_held);
      double total = 0.0;
      for (std::size_t r = 0; r < held.size(); ++r) {
        const int truth = y[held[r]];
        const double e = eta[static_cast<Eigen::Index>(r)];
        if (cv_options.loss == CvLoss::kMisclassification) {
          total += ((e >= 0.0 ? 1 : 0) != truth) ? 1.0 : 0.0;
        } else {
          total += 2.0 * detail::row_loss(truth, e);
        }
      }
      result.fold_errors(t, static_cast<Eigen::Index>(f)) = total / static_cast<double>(held.size());
    }
  });

  result.mean_error.resize(t_count);
  for (Eigen::Index t = 0; t < t_count; ++t) {
    double s = 0.0;
    for (Eigen::Index f = 0; f < static_cast<Eigen::Index>(k); ++f) s += result.fold_errors(t, f);
    result.mean_error[t] = s / static_cast<double>(k);
  }
  Eigen::Index best = 0;
  for (Eigen::Index t = 1; t < t_count; ++t) {
    if (result.mean_error[t] < result.mean_error[best]) best = t;
  }
  result.selected_index = static_cast<std::size_t>(best);
  result.selected_lambda = result.lambdas[static_cast<std::size_t>(best)];
  return result;
}

/// Cross-validates, then refits the full-data path and keeps the selected model.
inline PlrModel fit_cv(const Matrix& z, std::span<const int> y, const PathOptions& path_options,
                       const CvOptions& cv_options, std::uint64_t seed, CvResult* cv_out = nullptr) {
  CvResult cv = cross_validate(z, y, path_options, cv_options, seed);
  const std::vector<double> head(cv.lambdas.begin(),
                                 cv.lambdas.begin() + static_cast<std::ptrdiff_t>(cv.selected_index) + 1);
  detail::PathSolver solver(z, y, path_options);
  for (double lambda : head) solver.solve(lambda);
  PlrModel model = solver.model(cv.selected_lambda);
  if (cv_out) *cv_out = std::move(cv);
  return model;
}

}  // namespace fans::plr
