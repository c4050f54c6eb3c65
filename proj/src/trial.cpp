// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/trial.hpp"

#include "autohls/common.hpp"

namespace autohls {

bool is_qor_field(std::string_view o) {
  return o == "ff" || o == "lut" || o == "dsp" || o == "latency_cycles" || o == "synth_seconds" ||
         o == "mse";
}

double qor_value(const QoR& q, std::string_view o) {
  if (o == "ff") return static_cast<double>(q.ff);
  if (o == "lut") return static_cast<double>(q.lut);
  if (o == "dsp") return static_cast<double>(q.dsp);
  if (o == "latency_cycles") return static_cast<double>(q.latency_cycles);
  if (o == "synth_seconds") return q.synth_seconds;
  if (o == "mse") {
    if (!q.mse) throw ContractError("QoR has no mse value");
    return *q.mse;
  }
  throw ConfigError("unknown objective '" + std::string(o) + "'");
}

std::string_view to_string(Outcome outcome) {
  switch (outcome) {
    case Outcome::Completed: return "completed";
    case Outcome::Failed: return "failed";
    case Outcome::Pending: return "pending";
    case Outcome::Skipped: return "skipped";
  }
  return "?";
}

Outcome parse_outcome(std::string_view name) {
  if (name == "completed") return Outcome::Completed;
  if (name == "failed") return Outcome::Failed;
  if (name == "pending") return Outcome::Pending;
  if (name == "skipped") return Outcome::Skipped;
  throw ConfigError("unknown outcome '" + std::string(name) + "'");
}

void check_record(const TrialRecord& r) {
  if (r.outcome == Outcome::Completed && !r.qor) {
    throw ContractError("trial " + std::to_string(r.index) + ": completed without QoR");
  }
  if ((r.outcome == Outcome::Failed || r.outcome == Outcome::Skipped) && r.qor) {
    throw ContractError("trial " + std::to_string(r.index) + ": QoR on a non-completed trial");
  }
  if (r.prediction_score && (*r.prediction_score < 0.0 || *r.prediction_score > 1.0)) {
    throw ContractError("trial " + std::to_string(r.index) + ": prediction score outside [0,1]");
  }
}

}  // namespace autohls
