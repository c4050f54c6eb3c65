// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autohls/design_space.hpp"
#include "autohls/kernel_transform.hpp"

namespace autohls {

// Quality of results reported by a synthesis run.
struct QoR {
  std::int64_t ff = 0;
  std::int64_t lut = 0;
  std::int64_t dsp = 0;
  std::int64_t latency_cycles = 0;
  double synth_seconds = 0.0;
  std::optional<double> mse;

  bool operator==(const QoR&) const = default;
};

// Objective names understood by qor_value: ff, lut, dsp, latency_cycles,
// synth_seconds, mse.
double qor_value(const QoR& qor, std::string_view objective);
bool is_qor_field(std::string_view objective);

enum class Outcome { Completed, Failed, Pending, Skipped };

std::string_view to_string(Outcome outcome);
Outcome parse_outcome(std::string_view name);

struct TrialRecord {
  std::size_t index = 0;  // submission order
  space::DesignPoint point;
  Outcome outcome = Outcome::Pending;
  std::optional<QoR> qor;
  // Predicted failure probability at decision time, when a gate was active.
  std::optional<double> prediction_score;
  // "time_budget_exceeded" or "tool_error" for failures, empty otherwise.
  std::string failure_kind;
  std::string failure_detail;
  // Evaluation-only ground truth for skipped trials (true = would complete).
  std::optional<bool> eval_completed;
  std::optional<quant::OpCount> ops;
  double budget_seconds = 0.0;
  double wall_seconds = 0.0;

  bool operator==(const TrialRecord&) const = default;
};

// Throws ContractError when the outcome/QoR pairing is inconsistent.
void check_record(const TrialRecord& r);

}  // namespace autohls
