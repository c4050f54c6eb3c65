// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/predictors/baselines.hpp"

#include <cmath>
#include <string>

namespace autohls::ml {

BaselineKind parse_baseline_kind(std::string_view name) {
  if (name == "logreg") return BaselineKind::LogReg;
  if (name == "svm") return BaselineKind::Svm;
  if (name == "linreg") return BaselineKind::LinReg;
  if (name == "lasso") return BaselineKind::Lasso;
  if (name == "krr") return BaselineKind::Krr;
  if (name == "bayes_ridge") return BaselineKind::BayesRidge;
  throw ConfigError("unknown baseline model '" + std::string(name) + "'");
}

std::string_view to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::LogReg: return "logreg";
    case BaselineKind::Svm: return "svm";
    case BaselineKind::LinReg: return "linreg";
    case BaselineKind::Lasso: return "lasso";
    case BaselineKind::Krr: return "krr";
    case BaselineKind::BayesRidge: return "bayes_ridge";
  }
  return "?";
}

bool is_classifier(BaselineKind kind) { return kind == BaselineKind::LogReg || kind == BaselineKind::Svm; }

double kernel_value(KrrKernel kernel, double gamma, const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (kernel == KrrKernel::Linear) return a.dot(b) + 1.0;
  return std::exp(-gamma * (a - b).squaredNorm());
}

double BaselineModel::predict(std::span<const double> x) const {
  const Eigen::Map<const Eigen::VectorXd> v(x.data(), static_cast<Eigen::Index>(x.size()));
  if (kind == BaselineKind::Krr) {
    if (v.size() != train_x.cols()) throw ContractError("krr input dimension mismatch");
    double s = 0.0;
    for (Eigen::Index i = 0; i < train_x.rows(); ++i) {
      s += dual(i) * kernel_value(kernel, rbf_gamma, train_x.row(i).transpose(), v);
    }
    return s;
  }
  if (v.size() != weights.size()) throw ContractError("baseline input dimension mismatch");
  const double z = weights.dot(v) + bias;
  return kind == BaselineKind::LogReg ? sigmoid(z) : z;
}

double BaselineModel::probability(std::span<const double> x) const {
  const double raw = predict(x);
  if (kind == BaselineKind::LogReg) return raw;
  if (kind == BaselineKind::Svm) return sigmoid(raw);
  throw ContractError(std::string(to_string(kind)) + " is a regressor, not a classifier");
}

namespace {

BaselineModel fit_logreg(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                         const BaselineParams& p) {
  const auto d = X.cols();
  BaselineModel m;
  m.kind = BaselineKind::LogReg;
  m.weights = Eigen::VectorXd::Zero(d);
  const double wsum = w.sum();
  for (std::size_t e = 0; e < p.epochs; ++e) {
    const Eigen::VectorXd z = (X * m.weights).array() + m.bias;
    Eigen::VectorXd r(z.size());
    for (Eigen::Index i = 0; i < z.size(); ++i) r(i) = w(i) * (sigmoid(z(i)) - y(i)) / wsum;
    const Eigen::VectorXd gw = X.transpose() * r + p.l2 * m.weights;
    m.weights -= p.lr * gw;
    m.bias -= p.lr * r.sum();
  }
  return m;
}

// Sub-gradient descent on weighted hinge loss + (l2 / 2) |w|^2, labels in {-1, +1}.
BaselineModel fit_svm(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
                      const BaselineParams& p) {
  BaselineModel m;
  m.kind = BaselineKind::Svm;
  m.weights = Eigen::VectorXd::Zero(X.cols());
  const double wsum = w.sum();
  for (std::size_t e = 0; e < p.epochs; ++e) {
    Eigen::VectorXd gw = p.l2 * m.weights;
    double gb = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
      const double t = y(i) != 0.0 ? 1.0 : -1.0;
      if (t * (X.row(i).dot(m.weights) + m.bias) < 1.0) {
        gw -= (w(i) * t / wsum) * X.row(i).transpose();
        gb -= w(i) * t / wsum;
      }
    }
    m.weights -= p.lr * gw;
    m.bias -= p.lr * gb;
  }
  return m;
}

Eigen::MatrixXd with_bias_column(const Eigen::MatrixXd& X) {
  Eigen::MatrixXd A(X.rows(), X.cols() + 1);
  A.leftCols(X.cols()) = X;
  A.col(X.cols()).setOnes();
  return A;
}

// Symmetric positive definite solve with an explicit singularity check.
Eigen::VectorXd spd_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const char* what) {
  Eigen::LDLT<Eigen::MatrixXd> ldlt(A);
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() || ldlt.rcond() < 1e-15) {
    throw SingularSystem(std::string(what) + ": system is singular or indefinite");
  }
  Eigen::VectorXd x = ldlt.solve(b);
  if (!x.allFinite()) throw SingularSystem(std::string(what) + ": non-finite solution");
  return x;
}

BaselineModel fit_linreg(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const BaselineParams& p) {
  const Eigen::MatrixXd A = with_bias_column(X);
  const Eigen::MatrixXd G0 = A.transpose() * A;
  Eigen::MatrixXd G = G0;
  G.diagonal().array() += p.ridge;
  const Eigen::VectorXd rhs = A.transpose() * y;
  Eigen::VectorXd beta = spd_solve(G, rhs, "linreg");
  // One refinement step against the unjittered system removes most of the
  // jitter bias on well-conditioned problems.
  beta += spd_solve(G, rhs - G0 * beta, "linreg");
  BaselineModel m;
  m.kind = BaselineKind::LinReg;
  m.weights = beta.head(X.cols());
  m.bias = beta(X.cols());
  return m;
}

double soft_threshold(double z, double t) {
  if (z > t) return z - t;
  if (z < -t) return z + t;
  return 0.0;
}

// Minimizes (1 / 2n) |y - Xw - b|^2 + lambda |w|_1 with an unpenalized intercept.
BaselineModel fit_lasso(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const BaselineParams& p) {
  const auto n = static_cast<double>(X.rows());
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - mean;
  const double ymean = y.mean();
  Eigen::VectorXd r = y.array() - ymean;
  Eigen::VectorXd w = Eigen::VectorXd::Zero(X.cols());
  const Eigen::VectorXd col_sq = Xc.colwise().squaredNorm().transpose() / n;
  BaselineModel m;
  m.kind = BaselineKind::Lasso;
  for (std::size_t it = 0; it < p.max_iter; ++it) {
    double max_delta = 0.0;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
      if (col_sq(j) == 0.0) continue;
      const double old = w(j);
      const double rho = Xc.col(j).dot(r) / n + col_sq(j) * old;
      w(j) = soft_threshold(rho, p.lambda) / col_sq(j);
      if (w(j) != old) {
        r -= (w(j) - old) * Xc.col(j);
        max_delta = std::max(max_delta, std::fabs(w(j) - old));
      }
    }
    m.iterations = it + 1;
    if (max_delta < p.tol) break;
  }
  m.weights = w;
  m.bias = ymean - mean.dot(w);
  return m;
}

BaselineModel fit_krr(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const BaselineParams& p) {
  if (X.rows() > 5000) throw ContractError("krr direct solve limited to 5000 rows");
  const auto n = X.rows();
  Eigen::MatrixXd K(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      K(i, j) = K(j, i) = kernel_value(p.kernel, p.rbf_gamma, X.row(i).transpose(), X.row(j).transpose());
    }
  }
  K.diagonal().array() += p.lambda;
  BaselineModel m;
  m.kind = BaselineKind::Krr;
  m.kernel = p.kernel;
  m.rbf_gamma = p.rbf_gamma;
  m.train_x = X;
  m.dual = spd_solve(K, y, "krr");
  return m;
}

// Evidence maximization (MacKay) on centered data.
BaselineModel fit_bayes_ridge(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const BaselineParams& p) {
  const auto n = static_cast<double>(X.rows());
  const Eigen::RowVectorXd mean = X.colwise().mean();
  const Eigen::MatrixXd Xc = X.rowwise() - mean;
  const double ymean = y.mean();
  const Eigen::VectorXd yc = y.array() - ymean;
  const Eigen::MatrixXd G = Xc.transpose() * Xc;
  const Eigen::VectorXd Xty = Xc.transpose() * yc;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(G);
  const Eigen::VectorXd s = eig.eigenvalues().cwiseMax(0.0);

  const double var_y = yc.squaredNorm() / n;
  double alpha = 1.0 / std::max(var_y, 1e-12);
  double lambda = 1.0;
  Eigen::VectorXd m = Eigen::VectorXd::Zero(X.cols());
  BaselineModel out;
  out.kind = BaselineKind::BayesRidge;
  for (std::size_t it = 0; it < p.evidence_iterations; ++it) {
    Eigen::MatrixXd A = alpha * G;
    A.diagonal().array() += lambda;
    m = spd_solve(A, alpha * Xty, "bayes_ridge");
    const double gamma = (alpha * s.array() / (lambda + alpha * s.array())).sum();
    const double new_lambda = gamma / std::max(m.squaredNorm(), 1e-300);
    const double resid = (yc - Xc * m).squaredNorm();
    const double new_alpha = (n - gamma) / std::max(resid, 1e-300);
    out.iterations = it + 1;
    const bool converged = std::fabs(new_lambda - lambda) <= 1e-3 * lambda &&
                           std::fabs(new_alpha - alpha) <= 1e-3 * alpha;
    lambda = std::min(new_lambda, 1e12);
    alpha = std::min(new_alpha, 1e12);
    if (converged) break;
  }
  Eigen::MatrixXd A = alpha * G;
  A.diagonal().array() += lambda;
  m = spd_solve(A, alpha * Xty, "bayes_ridge");
  out.weights = m;
  out.bias = ymean - mean.dot(m);
  out.alpha = alpha;
  out.lambda = lambda;
  return out;
}

}  // namespace

BaselineModel fit_baseline(const Dataset& data, BaselineKind kind, const BaselineParams& params) {
  data.validate(is_classifier(kind) ? Task::Classification : Task::Regression);
  const Eigen::MatrixXd X = data.matrix();
  const Eigen::VectorXd y = data.targets();
  const std::vector<double> cw = is_classifier(kind) && params.class_weighting
                                     ? class_weights(data.y)
                                     : std::vector<double>(data.rows, 1.0);
  const Eigen::Map<const Eigen::VectorXd> w(cw.data(), static_cast<Eigen::Index>(cw.size()));
  switch (kind) {
    case BaselineKind::LogReg: return fit_logreg(X, y, w, params);
    case BaselineKind::Svm: return fit_svm(X, y, w, params);
    case BaselineKind::LinReg: return fit_linreg(X, y, params);
    case BaselineKind::Lasso: return fit_lasso(X, y, params);
    case BaselineKind::Krr: return fit_krr(X, y, params);
    case BaselineKind::BayesRidge: return fit_bayes_ridge(X, y, params);
  }
  throw ContractError("unhandled baseline kind");
}

}  // namespace autohls::ml
