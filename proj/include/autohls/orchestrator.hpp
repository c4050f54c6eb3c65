// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "autohls/design_space.hpp"
#include "autohls/optimizer.hpp"
#include "autohls/predictors/checkpoint.hpp"
#include "autohls/synthesis_backend.hpp"
#include "autohls/trial_db.hpp"

namespace autohls::orch {

enum class Mode { Baseline, AutoHls };
std::string_view to_string(Mode mode);
Mode parse_mode(std::string_view name);

struct RunConfig {
  Mode mode = Mode::Baseline;
  std::size_t n_samples = 200;
  double tau = 0.85;
  std::size_t retrain_every = 25;
  ml::PredictorKind predictor_kind = ml::PredictorKind::Mlp;
  double budget_seconds = 150.0;
  double assumed_synth_minutes = 10.0;
  double overhead_minutes = 0.0;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  std::vector<opt::Objective> objectives = {{"lut", opt::Direction::Minimize},
                                            {"latency_cycles", opt::Direction::Minimize}};
  opt::TpeConfig tpe;
  ml::PredictorTraining training;

  // Throws ConfigError on out-of-range values.
  void validate() const;
};

struct RunStats {
  std::size_t n_sampled = 0;
  std::size_t n_synthesized = 0;
  std::size_t n_skipped = 0;
  std::size_t tp = 0;  // synthesized and completed
  std::size_t fp = 0;  // synthesized and failed
  std::size_t fn_eval = 0;  // skipped, but ground truth says it would complete
  std::size_t tn_eval = 0;  // skipped and would fail
  std::size_t retrains = 0;
  // Synthesis clock time charged by the backend, summed over trials.
  double wall_seconds = 0.0;
  std::optional<double> speedup;  // empty when nothing was synthesized

  bool operator==(const RunStats&) const = default;
};

struct RunResult {
  store::TrialDb db;
  RunStats stats;
};

enum class Decision { Synthesize, Skip };
Decision decide(double score_fail, double tau);

// (n_sampled * t) / (n_synthesized * t + overhead); throws ContractError when
// n_synthesized is zero.
double compute_speedup(std::size_t n_sampled, std::size_t n_synthesized, double assumed_synth_minutes,
                       double overhead_minutes);

// Labeled training set from the synthesized trials (1 = completed).
ml::Dataset failure_dataset(const space::ParameterSpace& space, std::span<const TrialRecord> trials);

RunStats compute_stats(std::span<const TrialRecord> trials, const RunConfig& cfg);
// Throws ContractError if the accounting identities do not hold.
void check_stats(const RunStats& s);

RunResult run(const space::ParameterSpace& space, synth::SynthesisBackend& backend, const RunConfig& cfg);
RunResult run_baseline(const space::ParameterSpace& space, synth::SynthesisBackend& backend, RunConfig cfg);
RunResult run_autohls(const space::ParameterSpace& space, synth::SynthesisBackend& backend, RunConfig cfg);

struct BudgetRow {
  std::string kernel;
  double budget_minutes = 0.0;
  std::size_t comp = 0;
  std::size_t fail = 0;
  std::size_t total = 0;
  double pct_fail = 0.0;  // rounded to 2 decimals
  double pct_comp = 0.0;
};

double round2(double x);
BudgetRow budget_row(std::string kernel, double budget_minutes, std::size_t comp, std::size_t fail);
// One row per (kernel, budget) with synthesized trials, ordered by kernel then
// budget. Skipped trials are not counted.
std::vector<BudgetRow> summarize_budget_table(std::span<const TrialRecord> trials);
BudgetRow total_row(std::span<const BudgetRow> rows);

// Recomputed row next to the percentages a table printed for it.
struct BudgetCheck {
  BudgetRow computed;
  double printed_fail = 0.0;
  double printed_comp = 0.0;
  bool fail_consistent = true;
  bool comp_consistent = true;
  bool consistent() const { return fail_consistent && comp_consistent; }
};
BudgetCheck check_printed(const BudgetRow& computed, double printed_fail, double printed_comp,
                          double tolerance = 0.02);

}  // namespace autohls::orch
