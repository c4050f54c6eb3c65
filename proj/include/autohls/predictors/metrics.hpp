// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <span>
#include <vector>

namespace autohls::ml {

struct RocCurve {
  // The sweep starts at (+inf threshold, 0, 0) and ends at (lowest score, 1, 1).
  std::vector<double> thresholds;
  std::vector<double> tpr;
  std::vector<double> fpr;
  double auc = 0.0;
};

// Positive class is label 1; a score >= threshold predicts positive.
// Throws ContractError unless both classes are present.
RocCurve roc_curve(std::span<const double> scores, std::span<const double> labels);
double auc(const RocCurve& curve);

// Fraction of rows where (score >= threshold) matches label == 1.
double accuracy(std::span<const double> scores, std::span<const double> labels, double threshold = 0.5);

}  // namespace autohls::ml
