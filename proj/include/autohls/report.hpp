// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include "autohls/optimizer.hpp"
#include "autohls/orchestrator.hpp"
#include "autohls/predictors/metrics.hpp"
#include "autohls/trial_db.hpp"
#include "json.hpp"

namespace autohls::report {

// Shortest text that parses back to the same double; "inf"/"-inf"/"nan" for
// non-finite values.
std::string format_real(double v);

// index,kernel,params,outcome,failure_kind,prediction_score,<objectives...>;
// objective cells are empty for trials without QoR.
std::string trials_csv(std::span<const TrialRecord> trials, std::span<const opt::Objective> objectives);
// index,kernel,params,<objectives...> for each front member.
std::string pareto_csv(const opt::ParetoFront& front);
// threshold,fpr,tpr
std::string roc_csv(const ml::RocCurve& curve);
std::string scatter_svg(std::span<const TrialRecord> trials, const opt::Objective& x, const opt::Objective& y,
                        const opt::ParetoFront& front);

// File writers. Exports of an empty db throw ContractError; unknown
// objective names throw ConfigError.
void export_csv(const store::TrialDb& db, std::span<const opt::Objective> objectives,
                const std::filesystem::path& path);
opt::ParetoFront export_pareto(const store::TrialDb& db, std::span<const opt::Objective> objectives,
                               const std::filesystem::path& path);
void export_roc(const ml::RocCurve& curve, const std::filesystem::path& path);
void render_scatter_svg(const store::TrialDb& db, const opt::Objective& x, const opt::Objective& y,
                        const opt::ParetoFront& front, const std::filesystem::path& path);

nlohmann::json stats_to_json(const orch::RunStats& s);
std::string format_stats(const orch::RunStats& s);

std::string format_budget_rows(std::span<const orch::BudgetRow> rows);
// Rows with the printed percentages alongside; inconsistent rows are flagged.
std::string format_budget_checks(std::span<const orch::BudgetCheck> checks);

// BO hours, AutoHLS hours and speedup for one accounting scenario.
struct SpeedupReport {
  std::size_t n_sampled = 0;
  std::size_t n_synthesized = 0;
  double t_minutes = 10.0;
  double overhead_minutes = 0.0;
  double bo_hours = 0.0;
  double autohls_hours = 0.0;
  double speedup = 0.0;
};
SpeedupReport speedup_report(std::size_t n_sampled, std::size_t n_synthesized, double t_minutes,
                             double overhead_minutes = 0.0);
std::string format_speedup(const SpeedupReport& r);

}  // namespace autohls::report
