#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "fans/rng.hpp"
#include "fans/transform.hpp"

namespace {

using fans::DensityPair;
using fans::Error;
using fans::ErrorCode;
using fans::Variant;
using fans::kde::MarginalDensity;

DensityPair single(double f_at, double g_at, double floor = 1e-6) {
  return DensityPair({MarginalDensity({f_at}, 1.0, floor)}, {MarginalDensity({g_at}, 1.0, floor)});
}

TEST(Transform, IdenticalDensitiesGiveZero) {
  const auto dp = single(0.3, 0.3);
  for (double x : {-4.0, 0.0, 0.3, 2.5}) EXPECT_EQ(dp.log_ratio(0, x), 0.0);
}

TEST(Transform, HandValue) {
  // log phi(0) - log phi(-1) = 0.5
  const auto dp = single(0.0, 1.0);
  const std::vector<double> x{0.0};
  const auto z = fans::augment_row(x, dp, Variant::kFans);
  ASSERT_EQ(z.size(), 1u);
  EXPECT_NEAR(z[0], 0.5, 1e-12);
}

TEST(Transform, Fans2AppendsRawFeatures) {
  const DensityPair dp({MarginalDensity({0.0}, 1.0, 1e-6), MarginalDensity({0.0}, 1.0, 1e-6)},
                       {MarginalDensity({1.0}, 1.0, 1e-6), MarginalDensity({0.0}, 1.0, 1e-6)});
  const std::vector<double> x{0.0, 7.5};
  const auto z = fans::augment_row(x, dp, Variant::kFans2);
  ASSERT_EQ(z.size(), 4u);
  EXPECT_NEAR(z[0], 0.5, 1e-12);
  EXPECT_EQ(z[1], 0.0);
  EXPECT_EQ(z[2], 0.0);
  EXPECT_EQ(z[3], 7.5);
  EXPECT_EQ(fans::augmented_width(3, Variant::kFans), 3u);
  EXPECT_EQ(fans::augmented_width(3, Variant::kFans2), 6u);
}

TEST(Transform, MatrixMatchesRows) {
  fans::rng::Stream s(5, "transform");
  fans::Matrix x(30, 3);
  fans::Labels y(30);
  for (int i = 0; i < 30; ++i) {
    y[static_cast<std::size_t>(i)] = i % 2;
    for (int j = 0; j < 3; ++j) x(i, j) = s.normal() + (i % 2);
  }
  const auto dp = fans::fit_density_pair(x, y, fans::kde::BandwidthRule::theory_log(), 0.01);
  for (Variant v : {Variant::kFans, Variant::kFans2}) {
    const fans::Matrix z = fans::augment_matrix(x, dp, v);
    for (int i = 0; i < 30; ++i) {
      const std::vector<double> row{x(i, 0), x(i, 1), x(i, 2)};
      const auto zr = fans::augment_row(row, dp, v);
      for (std::size_t j = 0; j < zr.size(); ++j) EXPECT_EQ(z(i, static_cast<Eigen::Index>(j)), zr[j]);
    }
  }
}

TEST(Transform, BoundedByFloor) {
  fans::rng::Stream s(7, "bounded");
  for (int trial = 0; trial < 20; ++trial) {
    const double floor = std::pow(10.0, -1.0 - 4.0 * s.uniform());
    const auto dp = single(3.0 * s.normal(), 3.0 * s.normal(), floor);
    const double bound = 2.0 * std::log(1.0 / floor);
    for (int k = 0; k < 50; ++k) {
      const double x = 100.0 * (s.uniform() - 0.5);
      EXPECT_LE(std::abs(dp.log_ratio(0, x)), bound + 1e-12);
    }
  }
}

TEST(Transform, SwapAntisymmetry) {
  const auto dp = single(-0.4, 1.2, 0.01);
  const DensityPair swapped(dp.class0, dp.class1);
  for (double x : {-3.0, -0.1, 0.0, 0.9, 5.0}) EXPECT_EQ(dp.log_ratio(0, x), -swapped.log_ratio(0, x));
}

TEST(Transform, Errors) {
  fans::Matrix x(3, 1);
  x << 1, 2, 3;
  EXPECT_THROW(fans::fit_density_pair(x, fans::Labels{0, 0, 0}, fans::kde::BandwidthRule::theory_log(), 0.01), Error);
  try {
    fans::fit_density_pair(x, fans::Labels{0, 0, 0}, fans::kde::BandwidthRule::theory_log(), 0.01);
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kEmptyClass);
  }
  const auto dp = single(0.0, 1.0);
  const std::vector<double> wrong{1.0, 2.0};
  EXPECT_THROW(fans::augment_row(wrong, dp, Variant::kFans), Error);
  const std::vector<double> nan{std::nan("")};
  EXPECT_THROW(fans::augment_row(nan, dp, Variant::kFans), Error);
  EXPECT_THROW(fans::parse_variant("fans3"), Error);
}

TEST(Transform, EmptyInputGivesEmptyOutput) {
  const auto dp = single(0.0, 1.0);
  const fans::Matrix x(0, 1);
  EXPECT_EQ(fans::augment_matrix(x, dp, Variant::kFans).rows(), 0);
  EXPECT_EQ(fans::augment_matrix(x, dp, Variant::kFans2).cols(), 2);
}

}  // namespace
