#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "fans/rng.hpp"
#include "fans/simgen.hpp"

namespace {

using fans::sim::Example;
using fans::sim::SimSpec;

SimSpec spec_for(Example ex, std::size_t p, std::size_t n, double rho = 0.0, std::uint64_t seed = 1) {
  SimSpec s;
  s.example = ex;
  s.p = p;
  s.n_per_class = n;
  s.n_test_per_class = n;
  s.rho = rho;
  s.seed = seed;
  return s;
}

double class_col_mean(const fans::Dataset& d, int label, Eigen::Index j) {
  double s = 0.0;
  int c = 0;
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    if ((*d.labels)[static_cast<std::size_t>(i)] == label) {
      s += d.features(i, j);
      ++c;
    }
  }
  return s / c;
}

double corr(const fans::Matrix& x, Eigen::Index a, Eigen::Index b) {
  const double ma = x.col(a).mean(), mb = x.col(b).mean();
  const double cov = ((x.col(a).array() - ma) * (x.col(b).array() - mb)).mean();
  const double va = (x.col(a).array() - ma).square().mean(), vb = (x.col(b).array() - mb).square().mean();
  return cov / std::sqrt(va * vb);
}

TEST(Rng, Deterministic) {
  fans::rng::Stream a(7, "tag", 3, 1), b(7, "tag", 3, 1), c(7, "tag", 4, 1);
  for (int k = 0; k < 100; ++k) {
    const auto va = a.next_u64();
    EXPECT_EQ(va, b.next_u64());
    EXPECT_NE(va, c.next_u64());
  }
}

TEST(Rng, Moments) {
  fans::rng::Stream s(11, "moments");
  const int n = 200000;
  double su = 0, sn = 0, sn2 = 0;
  std::vector<int> bins(7, 0);
  for (int k = 0; k < n; ++k) {
    const double u = s.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    const double z = s.normal();
    sn += z;
    sn2 += z * z;
    ++bins[s.below(7)];
  }
  EXPECT_NEAR(su / n, 0.5, 0.005);
  EXPECT_NEAR(sn / n, 0.0, 0.01);
  EXPECT_NEAR(sn2 / n, 1.0, 0.02);
  for (int c : bins) EXPECT_NEAR(c / static_cast<double>(n), 1.0 / 7.0, 0.005);
}

TEST(Rng, ShuffleIsPermutation) {
  fans::rng::Stream s(1, "shuffle");
  std::vector<int> v(50);
  for (int i = 0; i < 50; ++i) v[static_cast<std::size_t>(i)] = i;
  s.shuffle(v);
  std::vector<int> sorted = v;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[static_cast<std::size_t>(i)], i);
}

TEST(Simgen, Ex1MeansAndAr1Correlation) {
  const auto d = fans::sim::generate(spec_for(Example::kEx1, 12, 4000, 0.5)).train;
  EXPECT_NEAR(class_col_mean(d, 1, 0), 1.0, 0.05);
  EXPECT_NEAR(class_col_mean(d, 1, 9), 1.0, 0.05);
  EXPECT_NEAR(class_col_mean(d, 1, 10), 0.0, 0.05);
  EXPECT_NEAR(class_col_mean(d, 0, 0), 0.0, 0.05);
  const fans::Matrix c0 = d.features.topRows(4000);
  EXPECT_NEAR(corr(c0, 3, 4), 0.5, 0.03);
  EXPECT_NEAR(corr(c0, 3, 5), 0.25, 0.03);
  EXPECT_NEAR((c0.col(7).array() - c0.col(7).mean()).square().mean(), 1.0, 0.06);
}

TEST(Simgen, Ex2EquicorrelatedCovariance) {
  const auto d = fans::sim::generate(spec_for(Example::kEx2, 10, 4000, 0.5)).train;
  const fans::Matrix c0 = d.features.topRows(4000);
  EXPECT_NEAR(corr(c0, 0, 1), 0.5, 0.03);
  EXPECT_NEAR(corr(c0, 2, 9), 0.5, 0.03);
  EXPECT_NEAR(class_col_mean(d, 1, 4), 1.0, 0.06);
}

TEST(Simgen, Ex3Mixture) {
  const auto d = fans::sim::generate(spec_for(Example::kEx3, 12, 4000)).train;
  EXPECT_NEAR(class_col_mean(d, 0, 0), 3.0, 0.05);
  EXPECT_NEAR(class_col_mean(d, 1, 0), 3.0, 0.15);
  const fans::Matrix c1 = d.features.bottomRows(4000);
  EXPECT_NEAR((c1.col(0).array() - c1.col(0).mean()).square().mean(), 10.0, 0.5);
  EXPECT_NEAR(class_col_mean(d, 1, 11), 0.0, 0.05);
}

TEST(Simgen, Ex4BallAndShell) {
  const auto d = fans::sim::generate(spec_for(Example::kEx4, 10, 500)).train;
  for (Eigen::Index i = 0; i < d.features.rows(); ++i) {
    const double norm = d.features.row(i).norm();
    if ((*d.labels)[static_cast<std::size_t>(i)] == 0) {
      EXPECT_LE(norm, 1.0);
    } else {
      EXPECT_GT(norm, 1.0);
      EXPECT_LE(d.features.row(i).cwiseAbs().maxCoeff(), 1.0);
    }
  }
  EXPECT_NEAR(fans::sim::ball_cube_volume_ratio(2), std::numbers::pi / 4.0, 1e-14);
  EXPECT_NEAR(fans::sim::ball_cube_volume_ratio(3), std::numbers::pi / 6.0, 1e-14);
}

TEST(Simgen, ShellRejectionRate) {
  fans::rng::Stream s(3, "shell");
  std::size_t rejected = 0;
  const std::size_t accepted = 100000;
  std::vector<double> row(2);
  for (std::size_t k = 0; k < accepted; ++k) fans::sim::shell_row(s, row, &rejected);
  const double frac = static_cast<double>(rejected) / static_cast<double>(rejected + accepted);
  EXPECT_NEAR(frac, std::numbers::pi / 4.0, 0.005);
}

TEST(Simgen, BallRadiusDistribution) {
  // P(|x| <= r) = r^p for a uniform point in the unit ball.
  fans::rng::Stream s(4, "ball");
  std::vector<double> row(5);
  int inside = 0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) {
    fans::sim::ball_row(s, row);
    double r2 = 0;
    for (double v : row) r2 += v * v;
    inside += std::sqrt(r2) <= 0.8;
  }
  EXPECT_NEAR(inside / static_cast<double>(n), std::pow(0.8, 5), 0.01);
}

TEST(Simgen, Ex5ClassBalance) {
  const auto d = fans::sim::generate(spec_for(Example::kEx5, 10, 20000)).train;
  const double frac = static_cast<double>(fans::count_class(*d.labels, 1)) / static_cast<double>(d.rows());
  EXPECT_NEAR(frac, 0.50, 0.05);
  for (Eigen::Index i = 0; i < 50; ++i) {
    std::vector<double> x(3);
    for (int j = 0; j < 3; ++j) x[static_cast<std::size_t>(j)] = d.features(i, j);
    EXPECT_EQ((*d.labels)[static_cast<std::size_t>(i)], fans::sim::nonadditive_label(x));
  }
}

TEST(Simgen, NonadditiveLabelHandValues) {
  EXPECT_EQ(fans::sim::nonadditive_label(std::vector<double>{1.0, 0.0, 0.0}), 1);
  EXPECT_EQ(fans::sim::nonadditive_label(std::vector<double>{0.5, 0.0, 0.0}), 0);
  EXPECT_EQ(fans::sim::nonadditive_label(std::vector<double>{0.5, 3.0, 0.0}), 1);  // 0.25 * sqrt(10)
}

TEST(Simgen, MaskedMix) {
  const std::vector<int> w{1, 0, 1};
  const std::vector<double> a{1, 2, 3}, b{4, 5, 6};
  std::vector<double> out(3);
  fans::sim::masked_mix(w, a, b, out);
  EXPECT_EQ(out, (std::vector<double>{1, 5, 3}));
}

TEST(Simgen, IntroToyMeans) {
  const auto d = fans::sim::generate(spec_for(Example::kIntroToy, 10, 4000)).train;
  EXPECT_NEAR(class_col_mean(d, 0, 0), 5.0, 0.05);
  EXPECT_NEAR(class_col_mean(d, 1, 0), 3.0, 0.15);
}

TEST(Simgen, DeterministicAndRowStable) {
  const auto a = fans::sim::generate(spec_for(Example::kEx3, 10, 50, 0.0, 9));
  const auto b = fans::sim::generate(spec_for(Example::kEx3, 10, 50, 0.0, 9));
  EXPECT_EQ(a.train.features, b.train.features);
  EXPECT_EQ(a.test.features, b.test.features);
  EXPECT_NE(a.train.features, a.test.features.topRows(100));
  const auto c = fans::sim::generate(spec_for(Example::kEx3, 10, 60, 0.0, 9));
  EXPECT_EQ(a.train.features.topRows(50), c.train.features.topRows(50));
  const auto e = fans::sim::generate(spec_for(Example::kEx3, 10, 50, 0.0, 10));
  EXPECT_NE(a.train.features, e.train.features);
}

TEST(Simgen, ValidationErrors) {
  auto expect_config = [](SimSpec s) {
    try {
      fans::sim::generate(s);
      ADD_FAILURE();
    } catch (const fans::Error& e) {
      EXPECT_EQ(e.code(), fans::ErrorCode::kConfig);
    }
  };
  expect_config(spec_for(Example::kEx1, 5, 10));
  expect_config(spec_for(Example::kEx4, 1, 10));
  expect_config(spec_for(Example::kEx2, 10, 10, 1.0));
  expect_config(spec_for(Example::kEx1, 10, 0));
  EXPECT_THROW(fans::sim::parse_example("ex9"), fans::Error);
  EXPECT_EQ(fans::sim::parse_example("intro"), Example::kIntroToy);
}

}  // namespace
