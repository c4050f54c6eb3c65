// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/predictors/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "autohls/common.hpp"
#include "autohls/predictors/dataset.hpp"

namespace autohls::ml {

RocCurve roc_curve(std::span<const double> scores, std::span<const double> labels) {
  if (scores.size() != labels.size()) throw ContractError("roc_curve: length mismatch");
  double pos = 0.0;
  for (const double y : labels) pos += y != 0.0;
  const double neg = static_cast<double>(labels.size()) - pos;
  if (pos == 0.0 || neg == 0.0) throw ContractError("roc_curve: labels must contain both classes");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve c;
  c.thresholds.push_back(std::numeric_limits<double>::infinity());
  c.tpr.push_back(0.0);
  c.fpr.push_back(0.0);
  double tp = 0.0, fp = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    // Tied scores move the operating point together.
    for (; i < order.size() && scores[order[i]] == s; ++i) {
      if (labels[order[i]] != 0.0) {
        tp += 1.0;
      } else {
        fp += 1.0;
      }
    }
    c.thresholds.push_back(s);
    c.tpr.push_back(tp / pos);
    c.fpr.push_back(fp / neg);
  }
  c.auc = auc(c);
  return c;
}

double auc(const RocCurve& curve) {
  double area = 0.0;
  for (std::size_t i = 1; i < curve.fpr.size(); ++i) {
    area += (curve.fpr[i] - curve.fpr[i - 1]) * (curve.tpr[i] + curve.tpr[i - 1]) * 0.5;
  }
  return area;
}

double accuracy(std::span<const double> scores, std::span<const double> labels, double threshold) {
  if (scores.size() != labels.size() || scores.empty()) throw ContractError("accuracy: bad lengths");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) hits += (scores[i] >= threshold) == (labels[i] != 0.0);
  return static_cast<double>(hits) / static_cast<double>(scores.size());
}

}  // namespace autohls::ml
