// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <span>
#include <string_view>

#include <Eigen/Dense>

#include "autohls/predictors/dataset.hpp"

namespace autohls::ml {

enum class BaselineKind { LogReg, Svm, LinReg, Lasso, Krr, BayesRidge };

BaselineKind parse_baseline_kind(std::string_view name);
std::string_view to_string(BaselineKind kind);
bool is_classifier(BaselineKind kind);

enum class KrrKernel { Rbf, Linear };

struct BaselineParams {
  // logreg / svm: full-batch (sub)gradient descent
  double lr = 0.5;
  std::size_t epochs = 500;
  double l2 = 1e-4;
  bool class_weighting = true;
  // linreg jitter
  double ridge = 1e-8;
  // lasso L1 weight, krr regularizer
  double lambda = 1e-2;
  double tol = 1e-8;
  std::size_t max_iter = 10000;
  // krr
  KrrKernel kernel = KrrKernel::Rbf;
  double rbf_gamma = 1.0;
  // bayes_ridge
  std::size_t evidence_iterations = 300;
};

struct BaselineModel {
  BaselineKind kind = BaselineKind::LinReg;
  // Linear families: prediction = w . x + b.
  Eigen::VectorXd weights;
  double bias = 0.0;
  // Kernel ridge: prediction = sum_i dual_i k(x_i, x).
  Eigen::MatrixXd train_x;
  Eigen::VectorXd dual;
  KrrKernel kernel = KrrKernel::Rbf;
  double rbf_gamma = 1.0;
  // Bayesian ridge precisions (noise alpha, weights lambda).
  double alpha = 1.0;
  double lambda = 1.0;
  std::size_t iterations = 0;

  // Raw model output: P(success) for logreg, the signed margin for svm, the
  // regression value otherwise.
  double predict(std::span<const double> x) const;
  // P(success) for classifiers; svm margins go through a sigmoid.
  double probability(std::span<const double> x) const;
};

BaselineModel fit_baseline(const Dataset& data, BaselineKind kind, const BaselineParams& params = {});

double kernel_value(KrrKernel kernel, double gamma, const Eigen::Ref<const Eigen::VectorXd>& a,
                    const Eigen::Ref<const Eigen::VectorXd>& b);

}  // namespace autohls::ml
