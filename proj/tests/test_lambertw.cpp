#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qwsearch/lambertw.hpp"

namespace qwsearch {
namespace {

constexpr double kE = std::numbers::e;

double residual(double w, double x) { return std::abs(w * std::exp(w) - x); }

TEST(LambertW0, Examples) {
  EXPECT_EQ(lambert_w0(0.0), 0.0);
  EXPECT_EQ(lambert_w0(-1.0 / kE), -1.0);
  EXPECT_NEAR(lambert_w0(1.0), 0.567143, 1e-6);
  EXPECT_NEAR(lambert_w0(1.0), oracle::w0_bisect(1.0), 1e-13);
}

TEST(LambertWm1, Examples) {
  EXPECT_EQ(lambert_wm1(-1.0 / kE), -1.0);
  EXPECT_NEAR(lambert_wm1(-0.1), -3.5772, 1e-4);
  EXPECT_NEAR(lambert_wm1(-1.0 / (2.0 * kE)), -2.6783, 1e-4);
  EXPECT_NEAR(lambert_wm1(-0.1), oracle::wm1_bisect(-0.1), 1e-12);
}

TEST(LambertW, DomainErrors) {
  EXPECT_THROW(lambert_w0(-0.5), InvalidArgument);
  EXPECT_THROW(lambert_wm1(0.0), InvalidArgument);
  EXPECT_THROW(lambert_wm1(0.5), InvalidArgument);
  EXPECT_THROW(lambert_wm1(-0.4), InvalidArgument);
  EXPECT_THROW(lambert_w0(std::nan("")), InvalidArgument);
}

TEST(LambertW, SnapsJustBelowBranchPoint) {
  const double x = kBranchPoint - 5e-16;
  EXPECT_EQ(lambert_w0(x), -1.0);
  EXPECT_EQ(lambert_wm1(x), -1.0);
}

TEST(LambertW0, ResidualOnGrid) {
  const int points = 10000;
  for (int i = 0; i < points; ++i) {
    const double x = kBranchPoint + (50.0 - kBranchPoint) * i / (points - 1);
    const double w = lambert_w0(x);
    ASSERT_GE(w, -1.0);
    ASSERT_LE(residual(w, x), 1e-12 * std::max(1.0, std::abs(x))) << "x = " << x;
  }
  for (double x : {1e3, 1e6, 1e12, 1e100, 1e300}) {
    EXPECT_LE(residual(lambert_w0(x), x) / x, 1e-12);
  }
}

TEST(LambertWm1, ResidualOnGrid) {
  const int points = 10000;
  for (int i = 0; i < points; ++i) {
    const double x = kBranchPoint * (1.0 - static_cast<double>(i) / points);
    const double w = lambert_wm1(x);
    ASSERT_LE(w, -1.0);
    ASSERT_LE(residual(w, x), 1e-12) << "x = " << x;
  }
  for (double x : {-1e-10, -1e-100, -1e-300}) EXPECT_LE(residual(lambert_wm1(x), x), 1e-12);
}

TEST(LambertW, AgreesWithBisectionNearBranchPoint) {
  for (double eps : {1e-12, 1e-9, 1e-6, 1e-3}) {
    const double x = -1.0 / kE + eps;
    EXPECT_NEAR(lambert_w0(x), oracle::w0_bisect(x), 1e-7);
    EXPECT_NEAR(lambert_wm1(x), oracle::wm1_bisect(x), 1e-7);
  }
}

TEST(ThresholdConstants, PZeroTwo) {
  const auto tc = threshold_constants(2.0);
  EXPECT_NEAR(tc.a, 4.311, 1e-3);
  EXPECT_NEAR(tc.b, 0.3734, 1e-4);
  const double x = -1.0 / (2.0 * kE);
  EXPECT_NEAR(tc.a, -1.0 / oracle::w0_bisect(x), 1e-10);
  EXPECT_NEAR(tc.b, -1.0 / oracle::wm1_bisect(x), 1e-10);
  EXPECT_GT(tc.a, tc.p0);
  EXPECT_GT(tc.p0, tc.b);
  EXPECT_GT(tc.b, 0.0);
}

TEST(ThresholdConstants, LargePZeroRatioTendsToOne) {
  const auto tc = threshold_constants(1e6);
  EXPECT_NEAR(tc.b / tc.a, 1.0, 1e-2);
  EXPECT_GT(tc.a, 1e6);
  EXPECT_LT(tc.b, 1e6);
}

TEST(ThresholdConstants, NearOneDegenerates) {
  const auto tc = threshold_constants(1.0 + 1e-9);
  EXPECT_LT(tc.b / tc.a, 1e-6);
  EXPECT_THROW(threshold_constants(1.0), InvalidArgument);
  EXPECT_THROW(threshold_constants(0.5), InvalidArgument);
}

TEST(PBound, Examples) {
  const double x = -1.0 / (2.0 * kE);
  EXPECT_NEAR(p_bound(2.0), oracle::w0_bisect(x) / oracle::wm1_bisect(x), 1e-10);
  EXPECT_NEAR(p_bound(2.0), 0.0866, 1e-3);
  EXPECT_LT(p_bound(1.0 + 1e-6), 1e-3);
  EXPECT_GT(p_bound(1e8), 0.99);
  EXPECT_THROW(p_bound(1.0), InvalidArgument);
  EXPECT_THROW(p_bound(std::numeric_limits<double>::infinity()), InvalidArgument);
}

TEST(PBound, StrictlyIncreasingOnGrid) {
  double prev = 0.0;
  for (int i = 1; i <= 5000; ++i) {
    const double p0 = 1.0 + 99.0 * i / 5000.0;
    const double v = p_bound(p0);
    ASSERT_GT(v, prev) << "p0 = " << p0;
    ASSERT_LT(v, 1.0);
    prev = v;
  }
}

TEST(PBound, EqualsRatioOfConstants) {
  for (double p0 : {1.01, 1.5, 2.0, 3.7, 10.0, 100.0}) {
    const auto tc = threshold_constants(p0);
    EXPECT_NEAR(p_bound(p0) * tc.a, tc.b, 1e-12 * std::max(1.0, tc.b));
    const double c = (tc.a - tc.b) / (tc.a + tc.b);
    EXPECT_NEAR((1.0 - c) / (1.0 + c), p_bound(p0), 1e-12);
  }
}

}  // namespace
}  // namespace qwsearch
