#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <vector>

#include "pprisk/streamtemp.hpp"

using namespace pprisk;
using namespace pprisk::streamtemp;

namespace {

Eigen::MatrixXd random_matrix(std::mt19937_64& rng, Eigen::Index rows, Eigen::Index cols) {
  std::normal_distribution<double> n(0, 1);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = n(rng);
  return m;
}

// Oracle: kernel by explicit loops, full bordered system, Gaussian
// elimination with partial pivoting in long double.
std::vector<long double> bordered_oracle(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double sigma,
                                         double gamma) {
  const int n = static_cast<int>(x.rows());
  const int m = n + 1;
  std::vector<std::vector<long double>> a(static_cast<std::size_t>(m), std::vector<long double>(static_cast<std::size_t>(m + 1), 0));
  for (int i = 0; i < n; ++i) {
    a[0][static_cast<std::size_t>(i + 1)] = 1;
    a[static_cast<std::size_t>(i + 1)][0] = 1;
    a[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(m)] = y(i);
    for (int j = 0; j < n; ++j) {
      long double d2 = 0;
      for (Eigen::Index c = 0; c < x.cols(); ++c) {
        long double d = x(i, c) - x(j, c);
        d2 += d * d;
      }
      long double k = std::exp(-d2 / (2.0L * sigma * sigma));
      if (i == j) k += 1.0L / gamma;
      a[static_cast<std::size_t>(i + 1)][static_cast<std::size_t>(j + 1)] = k;
    }
  }
  for (int col = 0; col < m; ++col) {
    int piv = col;
    for (int r = col + 1; r < m; ++r)
      if (std::fabs(a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)]) > std::fabs(a[static_cast<std::size_t>(piv)][static_cast<std::size_t>(col)])) piv = r;
    std::swap(a[static_cast<std::size_t>(col)], a[static_cast<std::size_t>(piv)]);
    for (int r = 0; r < m; ++r) {
      if (r == col) continue;
      long double f = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / a[static_cast<std::size_t>(col)][static_cast<std::size_t>(col)];
      for (int c = col; c <= m; ++c) a[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] -= f * a[static_cast<std::size_t>(col)][static_cast<std::size_t>(c)];
    }
  }
  std::vector<long double> sol(static_cast<std::size_t>(m));
  for (int r = 0; r < m; ++r) sol[static_cast<std::size_t>(r)] = a[static_cast<std::size_t>(r)][static_cast<std::size_t>(m)] / a[static_cast<std::size_t>(r)][static_cast<std::size_t>(r)];
  return sol;  // [b, alpha...]
}

double nse_of(const Eigen::VectorXd& obs, const Eigen::VectorXd& pred) { return nse(to_std(obs), to_std(pred)); }

}  // namespace

TEST(Lssvm, MatchesBorderedSystemOracle) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd x = random_matrix(rng, 8, 3);
    Eigen::VectorXd y = random_matrix(rng, 8, 1).col(0) * 4.0;
    double sigma = trial % 2 ? 0.75 : 2.0, gamma = trial % 3 ? 10.0 : 0.5;
    auto m = lssvm_fit(x, y, sigma, gamma);
    auto want = bordered_oracle(x, y, sigma, gamma);
    EXPECT_NEAR(m.bias, static_cast<double>(want[0]), 1e-8);
    for (int i = 0; i < 8; ++i) EXPECT_NEAR(m.alpha(i), static_cast<double>(want[static_cast<std::size_t>(i + 1)]), 1e-8);
    EXPECT_NEAR(m.alpha.sum(), 0.0, 1e-10);
  }
}

TEST(Lssvm, ConstantTargetIsAbsorbedByIntercept) {
  std::mt19937_64 rng(72);
  Eigen::MatrixXd x = random_matrix(rng, 15, 2);
  Eigen::VectorXd y = Eigen::VectorXd::Constant(15, 17.25);
  auto m = lssvm_fit(x, y, 1.0, 100.0);
  Eigen::VectorXd p = lssvm_predict(m, x);
  for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_NEAR(p(i), 17.25, 1e-9);
}

TEST(Lssvm, SingleRowFitReturnsItsTarget) {
  Eigen::MatrixXd x(1, 2);
  x << 0.3, -1.2;
  Eigen::VectorXd y(1);
  y << 4.5;
  auto m = lssvm_fit(x, y, 1.0, 1.0);
  EXPECT_NEAR(lssvm_predict(m, x)(0), 4.5, 1e-12);
}

TEST(Lssvm, FarFieldPredictionIsIntercept) {
  std::mt19937_64 rng(73);
  Eigen::MatrixXd x = random_matrix(rng, 20, 2);
  Eigen::VectorXd y = random_matrix(rng, 20, 1).col(0);
  auto m = lssvm_fit(x, y, 0.5, 50.0);
  Eigen::MatrixXd far = Eigen::MatrixXd::Constant(3, 2, 1e3);
  Eigen::VectorXd p = lssvm_predict(m, far);
  for (Eigen::Index i = 0; i < p.size(); ++i) EXPECT_NEAR(p(i), m.bias, 1e-6);
}

TEST(Lssvm, EmptyQueryAndShapeErrors) {
  std::mt19937_64 rng(74);
  Eigen::MatrixXd x = random_matrix(rng, 5, 2);
  auto m = lssvm_fit(x, x.col(0), 1.0, 1.0);
  EXPECT_EQ(lssvm_predict(m, Eigen::MatrixXd(0, 2)).size(), 0);
  try {
    lssvm_predict(m, Eigen::MatrixXd::Zero(2, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Shape);
  }
  EXPECT_THROW(lssvm_fit(x, Eigen::VectorXd::Zero(4), 1.0, 1.0), Error);
}

TEST(Lssvm, SingularSystemIsConditioningError) {
  // Duplicate rows with an enormous gamma leave H numerically singular.
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(6, 1);
  Eigen::VectorXd y(6);
  y << 1, 2, 3, 4, 5, 6;
  try {
    lssvm_fit(x, y, 1.0, 1e300);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Conditioning);
  }
}

TEST(Lssvm, ShiftEquivariance) {
  std::mt19937_64 rng(75);
  Eigen::MatrixXd x = random_matrix(rng, 30, 3);
  Eigen::VectorXd y = random_matrix(rng, 30, 1).col(0);
  Eigen::MatrixXd q = random_matrix(rng, 10, 3);
  for (double c : {-12.5, 0.001, 300.0}) {
    auto a = lssvm_fit(x, y, 1.3, 20.0);
    auto b = lssvm_fit(x, (y.array() + c).matrix(), 1.3, 20.0);
    Eigen::VectorXd pa = lssvm_predict(a, q), pb = lssvm_predict(b, q);
    for (Eigen::Index i = 0; i < pa.size(); ++i) EXPECT_NEAR(pb(i), pa(i) + c, 1e-9);
  }
}

TEST(Lssvm, KernelIsSymmetricPsd) {
  std::mt19937_64 rng(76);
  for (double sigma : {0.125, 1.0, 32.0}) {
    Eigen::MatrixXd x = random_matrix(rng, 40, 3);
    Eigen::MatrixXd k = rbf_kernel(x, x, sigma);
    EXPECT_LE((k - k.transpose()).cwiseAbs().maxCoeff(), 0.0);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-8);
    for (Eigen::Index i = 0; i < k.rows(); ++i) EXPECT_DOUBLE_EQ(k(i, i), 1.0);
  }
}

TEST(Lssvm, NoiselessLinearFitAtTrainingRows) {
  std::mt19937_64 rng(77);
  Eigen::MatrixXd x = random_matrix(rng, 60, 2);
  Eigen::VectorXd y = 3.0 * x.col(0) - 2.0 * x.col(1);
  auto m = lssvm_fit(x, y, 2.0, 1000.0);
  EXPECT_GE(nse_of(y, lssvm_predict(m, x)), 0.99);
}

TEST(Lssvm, TunedModelGeneralizesOnSmoothTarget) {
  std::mt19937_64 rng(78);
  std::uniform_real_distribution<double> u(-2, 2);
  auto target = [](double a, double b) { return std::sin(1.5 * a) + 0.5 * b * b; };
  Eigen::MatrixXd xtr(100, 2), xte(40, 2);
  Eigen::VectorXd ytr(100), yte(40);
  for (Eigen::Index i = 0; i < 100; ++i) {
    xtr(i, 0) = u(rng);
    xtr(i, 1) = u(rng);
    ytr(i) = target(xtr(i, 0), xtr(i, 1));
  }
  for (Eigen::Index i = 0; i < 40; ++i) {
    xte(i, 0) = u(rng);
    xte(i, 1) = u(rng);
    yte(i) = target(xte(i, 0), xte(i, 1));
  }
  auto h = tune_hyperparams(xtr, ytr);
  auto m = lssvm_fit(xtr, ytr, h.sigma, h.gamma);
  EXPECT_GE(nse_of(yte, lssvm_predict(m, xte)), 0.95);

  // Same data again picks the same grid point.
  auto again = tune_hyperparams(xtr, ytr);
  EXPECT_EQ(again.sigma, h.sigma);
  EXPECT_EQ(again.gamma, h.gamma);
  EXPECT_EQ(again.cv_mse, h.cv_mse);
}

TEST(Lssvm, TuningNeedsTenRows) {
  std::mt19937_64 rng(79);
  Eigen::MatrixXd x = random_matrix(rng, 9, 1);
  EXPECT_THROW(tune_hyperparams(x, x.col(0)), Error);
  Eigen::MatrixXd x10 = random_matrix(rng, 10, 1);
  EXPECT_NO_THROW(tune_hyperparams(x10, x10.col(0)));
}

TEST(Lssvm, FeatureScalingUsesSampleMoments) {
  Eigen::MatrixXd x(4, 2);
  x << 1, 10, 2, 10, 3, 20, 4, 20;
  auto s = FeatureScaling::fit(x);
  EXPECT_DOUBLE_EQ(s.mean(0), 2.5);
  EXPECT_DOUBLE_EQ(s.mean(1), 15);
  EXPECT_NEAR(s.scale(0), std::sqrt(5.0 / 3.0), 1e-15);
  Eigen::MatrixXd z = s.apply(x);
  EXPECT_NEAR(z.col(0).sum(), 0.0, 1e-12);
  Eigen::MatrixXd flat = Eigen::MatrixXd::Ones(3, 1);
  EXPECT_THROW(FeatureScaling::fit(flat), Error);
}

TEST(Design, LagZeroIsIdentityAlignment) {
  PredictorInputs in;
  in.air = {{2000, 1}, {1, 2, 3, 4, 5, 6}};
  PredictorSpec spec{{{PredictorSource::AirTemperature, 0}}, 0};
  std::vector<std::pair<int, double>> targets;
  for (int k = 0; k < 6; ++k) targets.emplace_back(YearMonth{2000, 1}.index() + k, 10.0 + k);
  auto d = build_design(in, spec, targets);
  ASSERT_EQ(d.features.rows(), 6);
  for (Eigen::Index i = 0; i < 6; ++i) {
    EXPECT_EQ(d.features(i, 0), static_cast<double>(i + 1));
    EXPECT_EQ(d.target(i), 10.0 + static_cast<double>(i));
  }
  EXPECT_EQ(d.dropped, 0u);
}

TEST(Design, ThreeLagMatrixByHand) {
  PredictorInputs in;
  in.air = {{2000, 1}, {1, 2, 3, 4, 5, 6}};
  std::vector<std::pair<int, double>> targets;
  for (int k = 0; k < 6; ++k) targets.emplace_back(YearMonth{2000, 1}.index() + k, 0.5 * k);
  auto d = build_design(in, predictor_model(4), targets);
  Eigen::MatrixXd want(4, 3);
  want << 3, 2, 1, 4, 3, 2, 5, 4, 3, 6, 5, 4;
  ASSERT_EQ(d.features.rows(), 4);
  EXPECT_EQ(d.features, want);
  EXPECT_EQ(d.dropped, 2u);
  EXPECT_EQ(d.target(0), 1.0);
  EXPECT_EQ(d.month_index.front(), (YearMonth{2000, 3}.index()));
}

TEST(Design, ModelShapesAndErrors) {
  EXPECT_EQ(predictor_model(1).terms.size(), 7u);
  EXPECT_EQ(predictor_model(2).terms.size(), 3u);
  EXPECT_EQ(predictor_model(3).terms.size(), 3u);
  EXPECT_EQ(predictor_model(4).terms.size(), 3u);
  EXPECT_FALSE(predictor_model(4).uses(PredictorSource::LongwaveClearSky));
  EXPECT_EQ(term_name(predictor_model(1).terms[4]), "rldscs(t-1)");
  EXPECT_THROW(predictor_model(5), Error);

  PredictorInputs in;
  in.air = {{2000, 1}, std::vector<double>(12, 1.0)};
  in.longwave = MonthlySeries{{2000, 1}, std::vector<double>(12, 300.0)};
  in.shortwave = MonthlySeries{{2000, 1}, std::vector<double>(12, 200.0)};
  std::vector<std::pair<int, double>> targets;
  for (int k = 0; k < 12; ++k) targets.emplace_back(YearMonth{2000, 1}.index() + k, 1.0);
  EXPECT_EQ((build_design(in, predictor_model(1), targets).features.cols()), 7);
  EXPECT_EQ((build_design(in, predictor_model(1), targets).features.rows()), 10);

  PredictorInputs no_rad;
  no_rad.air = in.air;
  try {
    build_design(no_rad, predictor_model(2), targets);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::Alignment);
  }
}

TEST(GaugeModel, LagAwarePredictorsBeatLagZero) {
  // Stream temperature responds to air temperature over three months.
  std::mt19937_64 rng(80);
  std::normal_distribution<double> anomaly(0, 2.5), noise(0, 0.2);
  const YearMonth start{1997, 1};
  const int months = 16 * 12;
  PredictorInputs in;
  in.air.start = start;
  for (int t = 0; t < months; ++t)
    in.air.values.push_back(15 + 10 * std::cos(2 * 3.141592653589793 * ((t % 12) - 6) / 12.0) + anomaly(rng));
  GaugeSeries g;
  g.gauge_id = "G1";
  g.start = {1998, 1};
  for (int t = 12; t < months; ++t) {
    const auto& a = in.air.values;
    g.temps.push_back(2 + 0.4 * a[static_cast<std::size_t>(t)] + 0.3 * a[static_cast<std::size_t>(t - 1)] +
                      0.2 * a[static_cast<std::size_t>(t - 2)] + noise(rng));
  }
  auto lagged = fit_gauge_model(g, in, predictor_model(4));
  auto lag0 = fit_gauge_model(g, in, PredictorSpec{{{PredictorSource::AirTemperature, 0}}, 0});
  EXPECT_EQ(lagged.n_train, 120u);
  EXPECT_EQ(lagged.n_test, 60u);
  EXPECT_GE(lagged.test_nse, lag0.test_nse);
  EXPECT_GE(lagged.test_nse, 0.9);
}
