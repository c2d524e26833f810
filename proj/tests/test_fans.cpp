#include <chrono>
#include <cmath>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "fans/fans.hpp"
#include "fans/simgen.hpp"

namespace {

using fans::Error;
using fans::ErrorCode;
using fans::FansConfig;
using fans::Labels;

template <typename F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no fans::Error thrown";
  return ErrorCode::kIo;
}

fans::DatasetPair small_design(fans::sim::Example ex = fans::sim::Example::kEx1, std::uint64_t seed = 3) {
  fans::sim::SimSpec spec;
  spec.example = ex;
  spec.p = 10;
  spec.n_per_class = 40;
  spec.n_test_per_class = 40;
  spec.seed = seed;
  return fans::sim::generate(spec);
}

FansConfig small_config(std::size_t splits = 4) {
  FansConfig c;
  c.splits = splits;
  c.lambda_count = 30;
  c.seed = 5;
  c.workers = 1;
  return c;
}

// Intercept-only sub-model that always returns probability p.
fans::SubModel constant_submodel(double p) {
  using fans::kde::MarginalDensity;
  fans::SubModel sub{fans::DensityPair({MarginalDensity({0.0}, 1.0, 0.01)}, {MarginalDensity({0.0}, 1.0, 0.01)}), {}};
  sub.regression.intercept = std::log(p / (1.0 - p));
  sub.regression.coefficients = fans::Vector::Zero(1);
  return sub;
}

fans::FansModel constant_model(std::vector<double> probs) {
  fans::FansModel m;
  m.features = 1;
  m.config.splits = probs.size();
  for (double p : probs) m.submodels.push_back(constant_submodel(p));
  return m;
}

TEST(Splits, HandExample) {
  const Labels y{0, 0, 1, 1};
  const auto plan = fans::make_splits(y, 2, 1, true);
  ASSERT_EQ(plan.size(), 2u);
  EXPECT_EQ(plan[1].part1, plan[0].part2);
  EXPECT_EQ(plan[1].part2, plan[0].part1);
  for (const auto& part : {plan[0].part1, plan[0].part2}) {
    ASSERT_EQ(part.size(), 2u);
    EXPECT_EQ(y[part[0]] + y[part[1]], 1);
  }
}

TEST(Splits, PartitionAndStratify) {
  Labels y(31);
  for (std::size_t i = 0; i < y.size(); ++i) y[i] = i < 13 ? 1 : 0;
  const auto plan = fans::make_splits(y, 6, 9, false);
  for (const auto& s : plan) {
    std::vector<int> seen(y.size(), 0);
    for (auto i : s.part1) ++seen[i];
    for (auto i : s.part2) ++seen[i];
    for (int v : seen) EXPECT_EQ(v, 1);
    const auto ones1 = fans::count_class(fans::take(y, s.part1), 1);
    EXPECT_TRUE(ones1 == 6 || ones1 == 7);
  }
  EXPECT_EQ(plan, fans::make_splits(y, 6, 9, false));
  EXPECT_NE(plan[0].part1, fans::make_splits(y, 6, 10, false)[0].part1);
}

TEST(Splits, Errors) {
  EXPECT_EQ(code_of([] { fans::make_splits(Labels{0, 0, 1, 1}, 3, 1, true); }), ErrorCode::kConfig);
  EXPECT_EQ(code_of([] { fans::make_splits(Labels{0, 0, 0, 1}, 2, 1, true); }), ErrorCode::kStratification);
  FansConfig c;
  c.splits = 3;
  EXPECT_EQ(code_of([&] { c.validate(); }), ErrorCode::kConfig);
  c.balanced_pairing = false;
  EXPECT_NO_THROW(c.validate());
}

TEST(Predict, AveragesProbabilities) {
  const auto m = constant_model({0.6, 0.2});
  fans::Matrix x(1, 1);
  x << 0.3;
  EXPECT_NEAR(fans::predict_proba(m, x)[0], 0.4, 1e-15);
  EXPECT_EQ(fans::predict(m, x)[0], 0);
}

TEST(Predict, TieGoesToClassOne) {
  fans::Vector p(3);
  p << 0.5, 0.4999999, 0.7;
  EXPECT_EQ(fans::threshold(p), (Labels{1, 0, 1}));
  fans::Matrix x(1, 1);
  x << 0.0;
  EXPECT_EQ(fans::majority_vote_predict(constant_model({0.6, 0.4}), x)[0], 1);
  EXPECT_EQ(fans::majority_vote_predict(constant_model({0.4, 0.4}), x)[0], 0);
  EXPECT_EQ(fans::majority_vote_predict(constant_model({0.9, 0.4, 0.3}), x)[0], 0);
}

TEST(Predict, ShapeError) {
  const auto m = constant_model({0.6, 0.2});
  EXPECT_EQ(code_of([&] { fans::predict_proba(m, fans::Matrix(2, 3)); }), ErrorCode::kShape);
}

TEST(Train, SingleSplitIsOneSubModel) {
  const auto d = small_design();
  auto c = small_config(1);
  c.balanced_pairing = false;
  const auto model = fans::train(d.train, c);
  ASSERT_EQ(model.submodels.size(), 1u);
  const auto plan = fans::make_splits(*d.train.labels, 1, c.seed, false);
  const auto sub = fans::fit_submodel(d.train.features, *d.train.labels, plan[0], c, fans::detail::split_cv_seed(c.seed, 0));
  const fans::Matrix z = fans::augment_matrix(d.test.features, sub.densities, c.variant);
  const fans::Vector eta = fans::plr::logits(sub.regression, z);
  const fans::Vector prob = fans::predict_proba(model, d.test.features);
  for (Eigen::Index i = 0; i < eta.size(); ++i) EXPECT_EQ(prob[i], fans::plr::sigmoid(eta[i]));
}

TEST(Train, WorkerCountDoesNotChangeResults) {
  const auto d = small_design(fans::sim::Example::kEx3);
  auto c = small_config(4);
  const auto a = fans::predict_proba(fans::train(d.train, c), d.test.features, 1);
  c.workers = 4;
  const auto b = fans::predict_proba(fans::train(d.train, c), d.test.features, 4);
  ASSERT_EQ(a.size(), b.size());
  for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_EQ(a[i], b[i]);
}

TEST(Train, LabelSwapSymmetry) {
  for (auto variant : {fans::Variant::kFans, fans::Variant::kFans2}) {
    const auto d = small_design(fans::sim::Example::kEx3, 8);
    fans::Dataset swapped = d.train;
    for (int& v : *swapped.labels) v = 1 - v;
    auto c = small_config(2);
    c.variant = variant;
    const auto a = fans::predict_proba(fans::train(d.train, c), d.test.features);
    const auto b = fans::predict_proba(fans::train(swapped, c), d.test.features);
    for (Eigen::Index i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], 1.0 - b[i], 1e-12);
  }
}

TEST(Train, IdenticalClassesPredictNearHalf) {
  auto d = small_design(fans::sim::Example::kEx1, 12);
  fans::rng::Stream s(1, "identical");
  for (Eigen::Index i = 0; i < d.train.features.rows(); ++i) {
    for (Eigen::Index j = 0; j < d.train.features.cols(); ++j) d.train.features(i, j) = s.normal();
  }
  const auto prob = fans::predict_proba(fans::train(d.train, small_config(4)), d.test.features);
  EXPECT_NEAR(prob.mean(), 0.5, 0.1);
}

TEST(Train, Errors) {
  auto d = small_design();
  auto c = small_config(4);
  d.train.features(0, 0) = std::nan("");
  EXPECT_EQ(code_of([&] { fans::train(d.train, c); }), ErrorCode::kInvalidData);
  auto e = small_design();
  for (int& v : *e.train.labels) v = 0;
  EXPECT_EQ(code_of([&] { fans::train(e.train, c); }), ErrorCode::kStratification);
  auto f = small_design();
  (*f.train.labels)[0] = 2;
  EXPECT_EQ(code_of([&] { fans::train(f.train, c); }), ErrorCode::kLabelDomain);
}

TEST(Train, CostScalesLinearlyInSplits) {
  const auto d = small_design(fans::sim::Example::kEx3, 4);
  auto timed = [&](std::size_t splits) {
    const auto start = std::chrono::steady_clock::now();
    fans::train(d.train, small_config(splits));
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  timed(2);  // warm-up
  const double t4 = timed(4), t8 = timed(8);
  EXPECT_LE(t8, 2.0 * t4 * 1.5 + 0.05);
}

TEST(Parallel, LowestIndexExceptionWins) {
  for (std::size_t workers : {1u, 4u}) {
    try {
      fans::parallel_for(16, workers, [](std::size_t i) {
        if (i == 3 || i == 9) throw std::runtime_error("task " + std::to_string(i));
      });
      FAIL();
    } catch (const std::runtime_error& e) {
      EXPECT_STREQ(e.what(), "task 3");
    }
  }
}

}  // namespace
