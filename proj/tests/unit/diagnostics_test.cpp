#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "pprisk/streamtemp/diagnostics.hpp"
#include "pprisk/streamtemp/metrics.hpp"

using namespace pprisk;
using namespace pprisk::streamtemp;

TEST(Acf, LagZeroIsOne) {
  std::vector<double> x{1, 3, 2, 5, 4, 6};
  auto a = acf(x, 3);
  EXPECT_DOUBLE_EQ(a.r[0], 1.0);
  EXPECT_EQ(a.r.size(), 4u);
  EXPECT_DOUBLE_EQ(a.band, 1.96 / std::sqrt(6.0));
}

TEST(Acf, SeasonalCosine) {
  std::vector<double> x(600);
  for (std::size_t t = 0; t < x.size(); ++t) x[t] = std::cos(2 * std::numbers::pi * static_cast<double>(t) / 12.0);
  auto a = acf(x, 24);
  EXPECT_GE(a.r[12], 0.95);
  EXPECT_LE(a.r[6], -0.9);
}

TEST(Acf, WhiteNoiseMonteCarlo) {
  std::mt19937_64 rng(1001);
  std::normal_distribution<double> n(0, 1);
  const int reps = 1000, lags = 24;
  std::vector<int> within(lags + 1, 0);
  for (int r = 0; r < reps; ++r) {
    std::vector<double> x(600);
    for (auto& v : x) v = n(rng);
    auto a = acf(x, lags);
    for (int k = 1; k <= lags; ++k) within[static_cast<std::size_t>(k)] += std::abs(a.r[static_cast<std::size_t>(k)]) < 0.10;
  }
  for (int k = 1; k <= lags; ++k) EXPECT_GE(static_cast<double>(within[static_cast<std::size_t>(k)]) / reps, 0.95) << "lag " << k;
}

TEST(Acf, Errors) {
  std::vector<double> c(20, 3.0);
  try {
    acf(c, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ZeroVariance);
  }
  std::vector<double> s{1, 2, 3};
  EXPECT_THROW(acf(s, 2), Error);
}

TEST(Standardize, MomentsAndRoundTrip) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(12, 4);
  std::vector<double> x(97);
  for (auto& v : x) v = n(rng);
  auto z = standardize(x);
  double m = 0, ss = 0;
  for (double v : z.values) m += v;
  m /= static_cast<double>(z.values.size());
  for (double v : z.values) ss += (v - m) * (v - m);
  EXPECT_NEAR(m, 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt(ss / static_cast<double>(z.values.size() - 1)), 1.0, 1e-12);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(z.stats.invert(z.values[i]), x[i], 1e-12);
  std::vector<double> flat(5, 1.0);
  EXPECT_THROW(standardize(flat), Error);
}

TEST(Metrics, NseFixtures) {
  std::vector<double> obs{1, 2, 3};
  EXPECT_DOUBLE_EQ(nse(obs, obs), 1.0);
  EXPECT_DOUBLE_EQ(nse(obs, std::vector<double>{2, 2, 2}), 0.0);
  EXPECT_DOUBLE_EQ(nse(obs, std::vector<double>{1, 2, 4}), 0.5);
  EXPECT_THROW(nse(std::vector<double>{1, 1, 1}, obs), Error);
  EXPECT_THROW(nse(obs, std::vector<double>{1, 2}), Error);
}

TEST(Metrics, NseBoundsAndSign) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0, 3);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<double> o(20), p(20);
    for (auto& v : o) v = n(rng);
    for (auto& v : p) v = n(rng);
    double e = nse(o, p);
    EXPECT_LE(e, 1.0);
    double m = 0;
    for (double v : o) m += v;
    m /= 20;
    double num = 0, den = 0;
    for (int i = 0; i < 20; ++i) {
      num += (o[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)]) * (o[static_cast<std::size_t>(i)] - p[static_cast<std::size_t>(i)]);
      den += (o[static_cast<std::size_t>(i)] - m) * (o[static_cast<std::size_t>(i)] - m);
    }
    if (num > den) EXPECT_LT(e, 0.0);
  }
}

TEST(Metrics, PearsonFixtures) {
  std::vector<double> x{0.5, 1.7, 2.2, 4.9, 3.3};
  std::vector<double> affine, neg;
  for (double v : x) {
    affine.push_back(2 * v + 1);
    neg.push_back(-v);
  }
  EXPECT_NEAR(pearson_r(x, affine), 1.0, 1e-12);
  EXPECT_NEAR(pearson_r(x, neg), -1.0, 1e-12);
  EXPECT_THROW(pearson_r(x, std::vector<double>(5, 2.0)), Error);
}

TEST(Metrics, PearsonMatchesCovarianceOracle) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> n(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a(30), b(30);
    for (auto& v : a) v = n(rng);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] = 0.5 * a[i] + n(rng);
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < 30; ++i) {
      ma += a[i] / 30;
      mb += b[i] / 30;
    }
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < 30; ++i) {
      cov += (a[i] - ma) * (b[i] - mb) / 29;
      va += (a[i] - ma) * (a[i] - ma) / 29;
      vb += (b[i] - mb) * (b[i] - mb) / 29;
    }
    EXPECT_NEAR(pearson_r(a, b), cov / std::sqrt(va * vb), 1e-12);
  }
}
