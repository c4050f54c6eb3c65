// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <thread>

#include "autohls/run_config.hpp"

namespace autohls::orch {

namespace {
constexpr std::uint64_t kSuggestStream = 0x73756767;  // "sugg"
constexpr std::uint64_t kTrainStream = 0x74726169;    // "trai"
}  // namespace

std::string_view to_string(Mode mode) { return mode == Mode::Baseline ? "baseline" : "autohls"; }

Mode parse_mode(std::string_view name) {
  if (name == "baseline") return Mode::Baseline;
  if (name == "autohls" || name == "explore") return Mode::AutoHls;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected baseline or autohls)");
}

void RunConfig::validate() const {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  if (!(tau >= 0.0 && tau <= 1.0)) throw ConfigError("tau must lie in [0, 1]");
  if (retrain_every < 1) throw ConfigError("retrain_every must be >= 1");
  if (!(budget_seconds >= 0.0)) throw ConfigError("budget_seconds must be >= 0");
  if (!(assumed_synth_minutes > 0.0)) throw ConfigError("assumed_synth_minutes must be > 0");
  if (!(overhead_minutes >= 0.0)) throw ConfigError("overhead_minutes must be >= 0");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (objectives.empty()) throw ConfigError("at least one objective is required");
  for (const auto& o : objectives) {
    if (!is_qor_field(o.name)) throw ConfigError("unknown objective '" + o.name + "'");
  }
  if (training.epochs < 1 || training.batch < 2) throw ConfigError("predictor needs epochs >= 1 and batch >= 2");
  tpe.validate();
}

Decision decide(double score_fail, double tau) { return score_fail >= tau ? Decision::Skip : Decision::Synthesize; }

double compute_speedup(std::size_t n_sampled, std::size_t n_synthesized, double t, double overhead) {
  if (n_synthesized == 0) throw ContractError("speedup undefined: nothing was synthesized");
  return static_cast<double>(n_sampled) * t / (static_cast<double>(n_synthesized) * t + overhead);
}

ml::Dataset failure_dataset(const space::ParameterSpace& space, std::span<const TrialRecord> trials) {
  ml::Dataset d;
  d.cols = space.feature_length();
  for (const auto& r : trials) {
    if (r.outcome != Outcome::Completed && r.outcome != Outcome::Failed) continue;
    d.push_back(space::encode(space, r.point).values, r.outcome == Outcome::Completed ? 1.0 : 0.0, r.point.kernel);
  }
  return d;
}

RunStats compute_stats(std::span<const TrialRecord> trials, const RunConfig& cfg) {
  RunStats s;
  for (const auto& r : trials) {
    if (r.outcome == Outcome::Pending) continue;
    ++s.n_sampled;
    s.wall_seconds += r.wall_seconds;
    switch (r.outcome) {
      case Outcome::Completed: ++s.n_synthesized; ++s.tp; break;
      case Outcome::Failed: ++s.n_synthesized; ++s.fp; break;
      case Outcome::Skipped:
        ++s.n_skipped;
        if (r.eval_completed) ++(*r.eval_completed ? s.fn_eval : s.tn_eval);
        break;
      case Outcome::Pending: break;
    }
  }
  if (s.n_synthesized > 0) {
    s.speedup = compute_speedup(s.n_sampled, s.n_synthesized, cfg.assumed_synth_minutes, cfg.overhead_minutes);
  }
  return s;
}

void check_stats(const RunStats& s) {
  if (s.n_synthesized + s.n_skipped != s.n_sampled) throw ContractError("n_synthesized + n_skipped != n_sampled");
  if (s.tp + s.fp != s.n_synthesized) throw ContractError("tp + fp != n_synthesized");
  if (s.fn_eval + s.tn_eval > s.n_skipped) throw ContractError("evaluation labels exceed skipped count");
}

namespace {

synth::SynthesisOutcome safe_synthesize(synth::SynthesisBackend& backend, const space::DesignPoint& p,
                                        double budget) {
  try {
    return backend.synthesize(p, budget);
  } catch (const std::exception& e) {
    return synth::SynthesisOutcome::tool_error(std::string("backend error: ") + e.what());
  }
}

void apply_outcome(TrialRecord& r, const synth::SynthesisOutcome& out) {
  r.wall_seconds = out.elapsed_seconds();
  if (out.is_completed()) {
    r.outcome = Outcome::Completed;
    r.qor = out.qor();
    r.ops = out.ops();
  } else {
    r.outcome = Outcome::Failed;
    r.failure_kind = std::string(synth::failure_kind_name(out.failure().reason));
    r.failure_detail = out.failure().detail;
  }
}

bool has_both_classes(const ml::Dataset& d) {
  const double p = d.rows ? d.positive_fraction() : 0.0;
  return p > 0.0 && p < 1.0;
}

}  // namespace

RunResult run(const space::ParameterSpace& space, synth::SynthesisBackend& backend, const RunConfig& cfg) {
  cfg.validate();
  space::validate_space(space);
  RunResult result;
  result.db.seed = cfg.seed;
  result.db.config = {{"run", config_to_json(cfg)}, {"space", space::format_space(space)},
                      {"backend", backend.name()}};
  auto& records = result.db.records;
  records.reserve(cfg.n_samples);
  const auto directions = opt::directions_of(cfg.objectives);

  std::optional<ml::FailurePredictor> gate;
  std::size_t since_retrain = 0;
  std::size_t retrains = 0;

  for (std::size_t start = 0; start < cfg.n_samples; start += cfg.workers) {
    const std::size_t batch = std::min(cfg.workers, cfg.n_samples - start);
    const auto history = opt::observations(records, cfg.objectives);

    std::vector<TrialRecord> pending(batch);
    std::vector<std::size_t> to_run;
    for (std::size_t k = 0; k < batch; ++k) {
      auto& r = pending[k];
      r.index = start + k;
      Rng rng(derive_seed(cfg.seed, kSuggestStream, r.index));
      r.point = opt::suggest(space, history, directions, cfg.tpe, rng);
      r.budget_seconds = cfg.budget_seconds;
      if (cfg.mode == Mode::AutoHls && gate) {
        const auto x = space::encode(space, r.point).values;
        const double score = std::clamp(gate->failure_probability(x), 0.0, 1.0);
        r.prediction_score = score;
        if (decide(score, cfg.tau) == Decision::Skip) {
          r.outcome = Outcome::Skipped;
          if (const auto truth = backend.ground_truth(r.point, cfg.budget_seconds)) {
            r.eval_completed = truth->is_completed();
          }
          continue;
        }
      }
      to_run.push_back(k);
    }

    std::vector<synth::SynthesisOutcome> outcomes(to_run.size());
    if (to_run.size() > 1) {
      std::vector<std::thread> threads;
      threads.reserve(to_run.size());
      for (std::size_t i = 0; i < to_run.size(); ++i) {
        threads.emplace_back([&, i] {
          outcomes[i] = safe_synthesize(backend, pending[to_run[i]].point, cfg.budget_seconds);
        });
      }
      for (auto& t : threads) t.join();
    } else if (to_run.size() == 1) {
      outcomes[0] = safe_synthesize(backend, pending[to_run[0]].point, cfg.budget_seconds);
    }
    for (std::size_t i = 0; i < to_run.size(); ++i) apply_outcome(pending[to_run[i]], outcomes[i]);
    for (auto& r : pending) result.db.append(std::move(r));

    since_retrain += to_run.size();
    if (cfg.mode == Mode::AutoHls && since_retrain >= cfg.retrain_every) {
      const auto data = failure_dataset(space, records);
      // A single-class history cannot train a classifier; keep the previous
      // gate and try again after the next batch.
      if (has_both_classes(data)) {
        gate = ml::FailurePredictor::train(cfg.predictor_kind, data, cfg.training,
                                           derive_seed(cfg.seed, kTrainStream, retrains));
        ++retrains;
        since_retrain = 0;
      }
    }
  }

  result.stats = compute_stats(records, cfg);
  result.stats.retrains = retrains;
  check_stats(result.stats);
  return result;
}

RunResult run_baseline(const space::ParameterSpace& space, synth::SynthesisBackend& backend, RunConfig cfg) {
  cfg.mode = Mode::Baseline;
  return run(space, backend, cfg);
}

RunResult run_autohls(const space::ParameterSpace& space, synth::SynthesisBackend& backend, RunConfig cfg) {
  cfg.mode = Mode::AutoHls;
  return run(space, backend, cfg);
}

double round2(double x) { return std::round(x * 100.0) / 100.0; }

BudgetRow budget_row(std::string kernel, double budget_minutes, std::size_t comp, std::size_t fail) {
  BudgetRow r;
  r.kernel = std::move(kernel);
  r.budget_minutes = budget_minutes;
  r.comp = comp;
  r.fail = fail;
  r.total = comp + fail;
  if (r.total > 0) {
    r.pct_fail = round2(100.0 * static_cast<double>(fail) / static_cast<double>(r.total));
    r.pct_comp = round2(100.0 * static_cast<double>(comp) / static_cast<double>(r.total));
  }
  return r;
}

std::vector<BudgetRow> summarize_budget_table(std::span<const TrialRecord> trials) {
  std::map<std::pair<std::string, double>, std::pair<std::size_t, std::size_t>> counts;
  for (const auto& r : trials) {
    if (r.outcome != Outcome::Completed && r.outcome != Outcome::Failed) continue;
    auto& c = counts[{r.point.kernel, r.budget_seconds}];
    ++(r.outcome == Outcome::Completed ? c.first : c.second);
  }
  std::vector<BudgetRow> rows;
  for (const auto& [key, c] : counts) rows.push_back(budget_row(key.first, key.second / 60.0, c.first, c.second));
  return rows;
}

BudgetRow total_row(std::span<const BudgetRow> rows) {
  std::size_t comp = 0, fail = 0;
  for (const auto& r : rows) {
    comp += r.comp;
    fail += r.fail;
  }
  return budget_row("Total", 0.0, comp, fail);
}

BudgetCheck check_printed(const BudgetRow& computed, double printed_fail, double printed_comp, double tolerance) {
  BudgetCheck c;
  c.computed = computed;
  c.printed_fail = printed_fail;
  c.printed_comp = printed_comp;
  // A hair of slack so that a printed value exactly `tolerance` away passes.
  c.fail_consistent = std::fabs(computed.pct_fail - printed_fail) <= tolerance + 1e-9;
  c.comp_consistent = std::fabs(computed.pct_comp - printed_comp) <= tolerance + 1e-9;
  return c;
}

}  // namespace autohls::orch
