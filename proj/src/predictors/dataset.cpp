// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/predictors/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace autohls::ml {

void Dataset::push_back(std::span<const double> features, double target, std::string kernel) {
  if (rows == 0 && cols == 0) cols = features.size();
  if (features.size() != cols) throw ContractError("dataset row width mismatch");
  x.insert(x.end(), features.begin(), features.end());
  y.push_back(target);
  kernels.push_back(std::move(kernel));
  ++rows;
}

void Dataset::validate(Task task) const {
  if (rows == 0) throw ContractError("dataset is empty");
  if (x.size() != rows * cols || y.size() != rows) throw ContractError("dataset shape mismatch");
  for (const double v : x) {
    if (!std::isfinite(v)) throw ContractError("dataset has non-finite features");
  }
  for (const double v : y) {
    if (!std::isfinite(v)) throw ContractError("dataset has non-finite targets");
    if (task == Task::Classification && v != 0.0 && v != 1.0) {
      throw ContractError("classification labels must be 0 or 1");
    }
  }
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
  Dataset d;
  d.cols = cols;
  for (const auto i : indices) {
    d.push_back(row(i), y[i], kernels.size() == rows ? kernels[i] : std::string());
  }
  return d;
}

double Dataset::positive_fraction() const {
  if (rows == 0) return 0.0;
  return std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(rows);
}

Eigen::MatrixXd Dataset::matrix() const {
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = x[i * cols + j];
  }
  return m;
}

Eigen::VectorXd Dataset::targets() const {
  return Eigen::Map<const Eigen::VectorXd>(y.data(), static_cast<Eigen::Index>(y.size()));
}

SplitIndices split_dataset(const Dataset& d, double train_fraction, std::uint64_t seed, Task task) {
  if (!(train_fraction > 0.0 && train_fraction <= 1.0)) {
    throw ContractError("train fraction must lie in (0, 1]");
  }
  Rng rng(seed);
  auto shuffle = [&](std::vector<std::size_t>& v) {
    for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[uniform_index(rng, i)]);
  };
  SplitIndices out;
  std::vector<std::vector<std::size_t>> groups(task == Task::Classification ? 2 : 1);
  for (std::size_t i = 0; i < d.rows; ++i) {
    groups[task == Task::Classification ? static_cast<std::size_t>(d.y[i] != 0.0) : 0].push_back(i);
  }
  for (auto& g : groups) {
    shuffle(g);
    auto n_train = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(g.size())));
    if (g.size() >= 2) n_train = std::clamp<std::size_t>(n_train, 1, g.size() - (train_fraction < 1.0 ? 1 : 0));
    out.train.insert(out.train.end(), g.begin(), g.begin() + static_cast<std::ptrdiff_t>(n_train));
    out.test.insert(out.test.end(), g.begin() + static_cast<std::ptrdiff_t>(n_train), g.end());
  }
  std::sort(out.train.begin(), out.train.end());
  std::sort(out.test.begin(), out.test.end());
  return out;
}

std::vector<double> class_weights(std::span<const double> labels) {
  double pos = 0.0;
  for (const double y : labels) pos += y;
  const double n = static_cast<double>(labels.size());
  const double neg = n - pos;
  std::vector<double> w(labels.size(), 1.0);
  if (pos == 0.0 || neg == 0.0) return w;
  for (std::size_t i = 0; i < labels.size(); ++i) w[i] = labels[i] != 0.0 ? n / (2 * pos) : n / (2 * neg);
  return w;
}

}  // namespace autohls::ml
