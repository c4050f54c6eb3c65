// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "autohls/predictors/dataset.hpp"

namespace autohls::ml {

struct DenseLayer {
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weight;  // out x in, row-major
  std::vector<double> bias;
};

struct BatchNormLayer {
  std::size_t width = 0;
  std::vector<double> gamma;
  std::vector<double> beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
  double momentum = 0.1;
  double eps = 1e-5;
};

// Linear -> BatchNorm -> ReLU for each hidden width, dropout, then a single
// linear output unit with a sigmoid (classification) or identity
// (regression) head.
class MlpModel {
 public:

  MlpModel() = default;
  static MlpModel create(std::size_t input_dim, Task task, std::uint64_t seed,
                         std::vector<std::size_t> hidden = {64, 32, 16}, double dropout = 0.2);
  static MlpModel zeros(std::size_t input_dim, Task task, std::vector<std::size_t> hidden = {64, 32, 16});

  std::size_t input_dim() const { return dense_.empty() ? 0 : dense_.front().in; }
  Task task() const { return task_; }
  double dropout() const { return dropout_; }
  std::vector<std::size_t> widths() const;  // input, hidden..., 1
  std::size_t trainable_parameter_count() const;

  // Flat trainable parameters: every dense (weight, bias) then every BN
  // (gamma, beta), in layer order.
  std::vector<double> parameters() const;
  void set_parameters(std::span<const double> flat);

  // Eval mode: running BN statistics, no dropout. Classification returns
  // P(success) in (0, 1); regression returns the target in original units.
  double predict(std::span<const double> x) const;
  std::vector<double> predict_batch(const Dataset& data) const;

  // Train-mode forward and backward on a batch (rows x input_dim, row-major).
  // `keep` is the dropout keep-mask over rows x last hidden width (1 keeps,
  // 0 drops); empty means no dropout. Returns the weighted mean loss and
  // fills `grad` in parameters() order.
  double loss_and_gradient(std::span<const double> batch, std::size_t rows,
                           std::span<const double> targets, std::span<const double> weights,
                           std::span<const double> keep, std::vector<double>& grad,
                           bool update_running_stats = false);

  const std::vector<DenseLayer>& dense() const { return dense_; }
  const std::vector<BatchNormLayer>& batch_norm() const { return bn_; }
  std::vector<BatchNormLayer>& batch_norm() { return bn_; }
  // Regression target standardization (identity for classification).
  double target_mean() const { return target_mean_; }
  double target_scale() const { return target_scale_; }
  void set_target_scaling(double mean, double scale) { target_mean_ = mean; target_scale_ = scale; }

  static MlpModel from_parts(Task task, double dropout, std::vector<DenseLayer> dense,
                             std::vector<BatchNormLayer> bn, double target_mean, double target_scale);

 private:
  Task task_ = Task::Classification;
  double dropout_ = 0.2;
  std::vector<DenseLayer> dense_;
  std::vector<BatchNormLayer> bn_;
  double target_mean_ = 0.0;
  double target_scale_ = 1.0;
};

struct MlpTrainOptions {
  std::size_t epochs = 100;
  double lr = 0.05;
  double dropout = 0.2;
  std::size_t batch = 32;
  std::uint64_t seed = 0;
  bool class_weighting = true;
  std::vector<std::size_t> hidden = {64, 32, 16};
};

struct MlpTrainResult {
  MlpModel model;
  std::vector<double> epoch_loss;
};

// Plain minibatch gradient descent. Throws TrainingDiverged on a non-finite
// loss.
MlpTrainResult mlp_train(const Dataset& data, Task task, const MlpTrainOptions& options);

}  // namespace autohls::ml
