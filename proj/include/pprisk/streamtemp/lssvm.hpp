#pragma once

#include <Eigen/Dense>

#include <cfloat>
#include <cmath>
#include <limits>
#include <vector>

#include "pprisk/error.hpp"

namespace pprisk::streamtemp {

/// Per-column affine scaling applied to raw features before the kernel.
struct FeatureScaling {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static FeatureScaling identity(Eigen::Index dims) {
    return {Eigen::VectorXd::Zero(dims), Eigen::VectorXd::Ones(dims)};
  }

  /// Column means and sample standard deviations of the training rows.
  static FeatureScaling fit(const Eigen::MatrixXd& x) {
    if (x.rows() < 2) throw Error(ErrorCode::InsufficientData, "streamtemp", "scaling needs 2 rows");
    FeatureScaling s;
    s.mean = x.colwise().mean().transpose();
    s.scale.resize(x.cols());
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      double ss = (x.col(j).array() - s.mean(j)).square().sum();
      double sd = std::sqrt(ss / static_cast<double>(x.rows() - 1));
      if (!(sd > 0)) throw Error(ErrorCode::ZeroVariance, "streamtemp", "constant predictor column");
      s.scale(j) = sd;
    }
    return s;
  }

  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const {
    return (x.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
  }
};

/// Pairwise squared distances by direct differences; symmetric when a == b.
inline Eigen::MatrixXd squared_distances(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd d(a.rows(), b.rows());
  for (Eigen::Index j = 0; j < b.rows(); ++j)
    for (Eigen::Index i = 0; i < a.rows(); ++i) d(i, j) = (a.row(i) - b.row(j)).squaredNorm();
  return d;
}

/// RBF kernel exp(-|xi - xj|^2 / (2 sigma^2)).
inline Eigen::MatrixXd rbf_kernel(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, double sigma) {
  return (-squared_distances(a, b) / (2.0 * sigma * sigma)).array().exp().matrix();
}

struct LssvmModel {
  double sigma = 1.0;
  double gamma = 1.0;
  Eigen::VectorXd alpha;
  double bias = 0.0;
  FeatureScaling scaling;
  Eigen::MatrixXd support;  // scaled training rows

  Eigen::Index dims() const { return support.cols(); }
};

namespace detail {
inline LssvmModel solve_lssvm(Eigen::MatrixXd support, const Eigen::MatrixXd& kernel,
                              const Eigen::VectorXd& y, double sigma, double gamma) {
  const Eigen::Index n = y.size();
  Eigen::MatrixXd h = kernel;
  h.diagonal().array() += 1.0 / gamma;
  // [[0, 1'], [1, H]] [b; a] = [0; y]  =>  b = 1'H^-1 y / 1'H^-1 1, a = H^-1 (y - b 1)
  Eigen::LLT<Eigen::MatrixXd> llt(h);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorCode::Conditioning, "streamtemp",
                "LS-SVM system is singular; increase the ridge term 1/gamma");
  Eigen::VectorXd eta = llt.solve(Eigen::VectorXd::Ones(n));
  Eigen::VectorXd nu = llt.solve(y);
  double denom = eta.sum();
  if (!(std::abs(denom) > 0) || !std::isfinite(denom))
    throw Error(ErrorCode::Conditioning, "streamtemp", "LS-SVM intercept equation is degenerate");
  LssvmModel m;
  m.sigma = sigma;
  m.gamma = gamma;
  m.bias = nu.sum() / denom;
  m.alpha = nu - m.bias * eta;
  m.support = std::move(support);

  Eigen::VectorXd resid = h * m.alpha + Eigen::VectorXd::Constant(n, m.bias) - y;
  double r = std::sqrt(resid.squaredNorm() + m.alpha.sum() * m.alpha.sum());
  if (!std::isfinite(r) || r > 1e-8 * y.norm() + DBL_MIN)
    throw Error(ErrorCode::Conditioning, "streamtemp",
                "LS-SVM solve residual too large; increase the ridge term 1/gamma");
  return m;
}
}  // namespace detail

/// Fits the least-squares SVM on features already passed through `scaling`
/// (identity by default); prediction applies the same scaling to queries.
inline LssvmModel lssvm_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double sigma, double gamma,
                            const FeatureScaling* scaling = nullptr) {
  if (x.rows() != y.size()) throw Error(ErrorCode::Shape, "streamtemp", "feature/target row mismatch");
  if (x.rows() < 1) throw Error(ErrorCode::InsufficientData, "streamtemp", "LS-SVM needs training rows");
  if (!(sigma > 0) || !(gamma > 0)) throw Error(ErrorCode::Validation, "streamtemp", "sigma and gamma must be positive");
  LssvmModel m = detail::solve_lssvm(x, rbf_kernel(x, x, sigma), y, sigma, gamma);
  m.scaling = scaling ? *scaling : FeatureScaling::identity(x.cols());
  return m;
}

/// Predictions for raw query rows (scaled with the model's stored scaling).
inline Eigen::VectorXd lssvm_predict(const LssvmModel& model, const Eigen::MatrixXd& raw) {
  if (raw.rows() == 0) return Eigen::VectorXd(0);
  if (raw.cols() != model.dims()) throw Error(ErrorCode::Shape, "streamtemp", "query feature dimension mismatch");
  Eigen::MatrixXd q = model.scaling.apply(raw);
  return (rbf_kernel(q, model.support, model.sigma) * model.alpha).array() + model.bias;
}

struct Hyperparams {
  double sigma = 1.0;
  double gamma = 1.0;
  double cv_mse = std::numeric_limits<double>::infinity();
};

inline constexpr int kFolds = 5;

/// 5-fold cross-validated grid search over sigma in 2^-3..2^5 and gamma in
/// 2^-2..2^10. Row i belongs to fold i % 5. Ties favor smaller gamma, then
/// smaller sigma.
inline Hyperparams tune_hyperparams(const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  const Eigen::Index n = x.rows();
  if (n < 10) throw Error(ErrorCode::InsufficientData, "streamtemp", "hyperparameter tuning needs at least 10 rows");
  if (y.size() != n) throw Error(ErrorCode::Shape, "streamtemp", "feature/target row mismatch");

  std::vector<std::vector<Eigen::Index>> train(kFolds), test(kFolds);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int f = 0; f < kFolds; ++f) (i % kFolds == f ? test : train)[f].push_back(i);

  const Eigen::MatrixXd dist = squared_distances(x, x);
  Hyperparams best;
  for (int ge = -2; ge <= 10; ++ge) {
    for (int se = -3; se <= 5; ++se) {
      const double sigma = std::ldexp(1.0, se), gamma = std::ldexp(1.0, ge);
      const Eigen::MatrixXd kernel = (-dist / (2.0 * sigma * sigma)).array().exp().matrix();
      double sse = 0.0;
      bool ok = true;
      for (int f = 0; f < kFolds && ok; ++f) {
        const auto& tr = train[f];
        const auto& te = test[f];
        Eigen::MatrixXd ktr = kernel(tr, tr);
        try {
          LssvmModel m = detail::solve_lssvm(x(tr, Eigen::all), ktr, y(tr), sigma, gamma);
          Eigen::VectorXd pred = (kernel(te, tr) * m.alpha).array() + m.bias;
          sse += (pred - y(te)).squaredNorm();
        } catch (const Error&) {
          ok = false;
        }
      }
      if (!ok) continue;
      double mse = sse / static_cast<double>(n);
      if (mse < best.cv_mse) best = {sigma, gamma, mse};
    }
  }
  if (!std::isfinite(best.cv_mse))
    throw Error(ErrorCode::Conditioning, "streamtemp", "no hyperparameter pair produced a solvable system");
  return best;
}

}  // namespace pprisk::streamtemp
