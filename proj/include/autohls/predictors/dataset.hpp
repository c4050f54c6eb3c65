// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "autohls/common.hpp"

namespace autohls::ml {

enum class Task { Classification, Regression };

// Row-major design matrix plus targets. Classification labels are 1 for a
// successful synthesis and 0 for a failure.
struct Dataset {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> x;
  std::vector<double> y;
  std::vector<std::string> kernels;  // optional, one per row

  std::span<const double> row(std::size_t i) const { return {x.data() + i * cols, cols}; }
  void push_back(std::span<const double> features, double target, std::string kernel = {});
  // Throws ContractError on empty data, non-finite entries, or non-binary
  // labels when `task` is classification.
  void validate(Task task) const;
  Dataset subset(std::span<const std::size_t> indices) const;
  double positive_fraction() const;

  Eigen::MatrixXd matrix() const;
  Eigen::VectorXd targets() const;
};

// Deterministic shuffled split: the first round(fraction * rows) shuffled
// rows train, the rest are held out. Stratified by label for classification
// so both parts keep both classes where possible.
struct SplitIndices {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};
SplitIndices split_dataset(const Dataset& d, double train_fraction, std::uint64_t seed, Task task);

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(std::size_t epoch, const std::string& what)
      : std::runtime_error(what), epoch_(epoch) {}
  std::size_t epoch() const { return epoch_; }

 private:
  std::size_t epoch_;
};

class SingularSystem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

// log(1 + exp(z)) without overflow.
inline double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// Inverse-frequency class weights (n / (2 n_c)); all ones when a class is missing.
std::vector<double> class_weights(std::span<const double> labels);

}  // namespace autohls::ml
