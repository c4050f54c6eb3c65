// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include <cmath>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "autohls/fixtures.hpp"
#include "autohls/orchestrator.hpp"
#include "autohls/predictors/checkpoint.hpp"
#include "autohls/predictors/metrics.hpp"
#include "autohls/report.hpp"
#include "autohls/run_config.hpp"
#include "autohls/trial_db.hpp"

namespace fs = std::filesystem;
using namespace autohls;

namespace {

struct ExploreFlags {
  std::string config;
  std::optional<double> tau;
  std::optional<std::size_t> trials;
  std::optional<std::string> predictor;
  std::optional<std::size_t> retrain_every;
  std::optional<double> budget_s;
  std::optional<std::size_t> workers;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> objectives;
  std::optional<double> t_synth_min;
  std::string out = "run";
};

void add_explore_flags(CLI::App* cmd, ExploreFlags& f) {
  cmd->add_option("--config", f.config, "Run configuration (TOML)")->check(CLI::ExistingFile);
  cmd->add_option("--tau", f.tau, "Skip threshold on predicted failure probability, in [0,1]");
  cmd->add_option("--trials", f.trials, "Number of design points to sample");
  cmd->add_option("--predictor", f.predictor, "Failure predictor: mlp, qnn, logreg or svm")
      ->check(CLI::IsMember({"mlp", "qnn", "logreg", "svm"}));
  cmd->add_option("--retrain-every", f.retrain_every, "Retrain after this many synthesized results");
  cmd->add_option("--budget-s", f.budget_s, "Synthesis time budget per design, seconds");
  cmd->add_option("--workers", f.workers, "Concurrent synthesis jobs per batch");
  cmd->add_option("--seed", f.seed, "Seed for every random choice of the run");
  cmd->add_option("--objectives", f.objectives, "Objectives, e.g. lut,latency_cycles or lut:min,ff:max");
  cmd->add_option("--t-synth-min", f.t_synth_min, "Assumed minutes per synthesis for speedup accounting");
  cmd->add_option("--out", f.out, "Output directory for trials.jsonl and stats.json")->capture_default_str();
}

ResolvedConfig resolve(const ExploreFlags& f, orch::Mode mode) {
  ResolvedConfig c = f.config.empty() ? default_config() : load_run_config(f.config);
  auto& r = c.run;
  r.mode = mode;
  if (f.tau) r.tau = *f.tau;
  if (f.trials) r.n_samples = *f.trials;
  if (f.predictor) r.predictor_kind = ml::parse_predictor_kind(*f.predictor);
  if (f.retrain_every) r.retrain_every = *f.retrain_every;
  if (f.budget_s) r.budget_seconds = *f.budget_s;
  if (f.workers) r.workers = *f.workers;
  if (f.seed) r.seed = *f.seed;
  if (f.objectives) r.objectives = opt::parse_objectives(*f.objectives);
  if (f.t_synth_min) r.assumed_synth_minutes = *f.t_synth_min;
  r.validate();
  return c;
}

int cmd_explore(const ExploreFlags& f, orch::Mode mode) {
  const auto cfg = resolve(f, mode);
  auto backend = make_backend(cfg);
  auto result = orch::run(cfg.space, *backend, cfg.run);
  result.db.config = resolved_to_json(cfg);
  const fs::path out = f.out;
  store::save(result.db, out / "trials.jsonl");
  const nlohmann::json stats{{"config", resolved_to_json(cfg)}, {"stats", report::stats_to_json(result.stats)}};
  store::write_file_atomic(out / "stats.json", stats.dump(2) + "\n");
  std::cout << orch::to_string(mode) << ": " << report::format_stats(result.stats);
  std::cout << "wrote " << (out / "trials.jsonl").string() << " and " << (out / "stats.json").string() << "\n";
  return 0;
}

space::ParameterSpace space_of(const store::TrialDb& db) {
  if (!db.config.contains("space") || !db.config["space"].is_string()) {
    throw ConfigError("trial-db header carries no space definition");
  }
  return space::parse_space(db.config["space"].get<std::string>());
}

bool is_classifier_name(const std::string& m) { return m == "mlp" || m == "qnn" || m == "logreg" || m == "svm"; }

bool is_classifier_model(const ml::PredictorModel& m) {
  if (const auto* mlp = std::get_if<ml::MlpModel>(&m)) return mlp->task() == ml::Task::Classification;
  if (const auto* b = std::get_if<ml::BaselineModel>(&m)) return ml::is_classifier(b->kind);
  return true;
}

// Failure labels for classifiers, a QoR field for regressors.
ml::Dataset dataset_for(const store::TrialDb& db, bool classify, const std::string& target) {
  const auto space = space_of(db);
  if (classify) return orch::failure_dataset(space, db.records);
  if (!is_qor_field(target)) throw ConfigError("unknown target '" + target + "'");
  ml::Dataset d;
  d.cols = space.feature_length();
  for (const auto& r : db.records) {
    if (r.outcome != Outcome::Completed || !r.qor) continue;
    if (target == "mse" && !r.qor->mse) continue;
    d.push_back(space::encode(space, r.point).values, qor_value(*r.qor, target), r.point.kernel);
  }
  return d;
}

struct TrainFlags {
  std::string db;
  std::string model = "mlp";
  std::optional<std::size_t> epochs;
  std::optional<double> lr;
  std::optional<std::size_t> batch;
  double split = 0.05;
  std::uint64_t seed = 0;
  std::string target = "lut";
  std::string out = "model.json";
};

int cmd_train(const TrainFlags& f) {
  const auto db = store::load(f.db);
  const bool classify = is_classifier_name(f.model);
  const auto task = classify ? ml::Task::Classification : ml::Task::Regression;
  const auto data = dataset_for(db, classify, f.target);
  data.validate(task);
  const auto split = ml::split_dataset(data, f.split, f.seed, task);
  const auto train = data.subset(split.train);
  ml::PredictorModel model;
  if (classify) {
    ml::PredictorTraining t;
    if (f.epochs) t.epochs = *f.epochs;
    if (f.lr) t.lr = *f.lr;
    if (f.batch) t.batch = *f.batch;
    model = ml::FailurePredictor::train(ml::parse_predictor_kind(f.model), train, t, f.seed).model();
  } else if (f.model == "mlp_reg") {
    ml::MlpTrainOptions o;
    if (f.epochs) o.epochs = *f.epochs;
    if (f.lr) o.lr = *f.lr;
    if (f.batch) o.batch = *f.batch;
    o.seed = f.seed;
    model = ml::mlp_train(train, ml::Task::Regression, o).model;
  } else {
    model = ml::fit_baseline(train, ml::parse_baseline_kind(f.model));
  }
  ml::save_model(model, f.out);
  std::cout << "trained " << ml::model_kind(model) << " on " << train.rows << " of " << data.rows
            << " rows; wrote " << f.out << "\n";
  return 0;
}

struct EvaluateFlags {
  std::string db;
  std::string model_path;
  double split = 0.05;
  std::uint64_t seed = 0;
  std::string target = "lut";
  std::string roc = "roc.csv";
};

double model_output(const ml::PredictorModel& m, std::span<const double> x) {
  if (const auto* mlp = std::get_if<ml::MlpModel>(&m)) return mlp->predict(x);
  if (const auto* q = std::get_if<ml::QnnModel>(&m)) return ml::qnn_predict(*q, x);
  const auto& b = std::get<ml::BaselineModel>(m);
  return ml::is_classifier(b.kind) ? b.probability(x) : b.predict(x);
}

int cmd_evaluate(const EvaluateFlags& f) {
  const auto db = store::load(f.db);
  const auto model = ml::load_model(f.model_path);
  const bool classify = is_classifier_model(model);
  const auto task = classify ? ml::Task::Classification : ml::Task::Regression;
  const auto data = dataset_for(db, classify, f.target);
  data.validate(task);
  const auto split = ml::split_dataset(data, f.split, f.seed, task);
  const auto test = data.subset(split.test);
  std::vector<double> scores(test.rows);
  for (std::size_t i = 0; i < test.rows; ++i) scores[i] = model_output(model, test.row(i));
  if (classify) {
    const auto curve = ml::roc_curve(scores, test.y);
    report::export_roc(curve, f.roc);
    std::cout << ml::model_kind(model) << ": held-out rows " << test.rows << ", AUC " << report::format_real(curve.auc)
              << ", accuracy " << report::format_real(ml::accuracy(scores, test.y)) << "\nwrote " << f.roc << "\n";
  } else {
    double sse = 0, mean = 0, sst = 0;
    for (std::size_t i = 0; i < test.rows; ++i) mean += test.y[i] / static_cast<double>(test.rows);
    for (std::size_t i = 0; i < test.rows; ++i) {
      sse += (scores[i] - test.y[i]) * (scores[i] - test.y[i]);
      sst += (test.y[i] - mean) * (test.y[i] - mean);
    }
    std::cout << ml::model_kind(model) << ": held-out rows " << test.rows << ", RMSE "
              << report::format_real(std::sqrt(sse / static_cast<double>(test.rows))) << ", R^2 "
              << report::format_real(sst > 0 ? 1.0 - sse / sst : 0.0) << "\n";
  }
  return 0;
}

struct ParetoFlags {
  std::string db;
  std::string objectives = "lut,latency_cycles";
  std::string out = "pareto.csv";
  std::string svg;
};

int cmd_pareto(const ParetoFlags& f) {
  const auto db = store::load(f.db);
  const auto objectives = opt::parse_objectives(f.objectives);
  const auto front = report::export_pareto(db, objectives, f.out);
  std::cout << report::pareto_csv(front);
  if (!f.svg.empty()) {
    if (objectives.size() != 2) throw ConfigError("--svg needs exactly two objectives");
    report::render_scatter_svg(db, objectives[0], objectives[1], front, f.svg);
  }
  return 0;
}

struct ReportFlags {
  std::string db;
  bool table2 = false;
  bool speedup = false;
  double t_synth_min = 10.0;
  double overhead_min = 0.0;
  std::optional<std::size_t> n_sampled;
  std::optional<std::size_t> n_synthesized;
};

int cmd_report(const ReportFlags& f) {
  if (f.table2 == f.speedup) throw CLI::ValidationError("report", "give exactly one of --table2 or --speedup");
  if (f.table2) {
    if (f.db.empty()) {
      const auto checks = fixtures::check_table2(fixtures::load_fixture("table2"));
      std::cout << report::format_budget_checks(checks);
    } else {
      const auto db = store::load(f.db);
      auto rows = orch::summarize_budget_table(db.records);
      if (!rows.empty()) rows.push_back(orch::total_row(rows));
      std::cout << report::format_budget_rows(rows);
    }
    return 0;
  }
  std::size_t sampled = 0, synthesized = 0;
  if (!f.db.empty()) {
    const auto db = store::load(f.db);
    orch::RunConfig cfg;
    cfg.assumed_synth_minutes = f.t_synth_min;
    cfg.overhead_minutes = f.overhead_min;
    const auto s = orch::compute_stats(db.records, cfg);
    sampled = s.n_sampled;
    synthesized = s.n_synthesized;
  } else {
    if (!f.n_sampled || !f.n_synthesized) {
      throw CLI::ValidationError("report", "--speedup needs --db or both --n-sampled and --n-synthesized");
    }
    sampled = *f.n_sampled;
    synthesized = *f.n_synthesized;
  }
  std::cout << report::format_speedup(report::speedup_report(sampled, synthesized, f.t_synth_min, f.overhead_min));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Design-space exploration for HLS kernels with early failure prediction"};
  app.require_subcommand(1, 1);

  ExploreFlags explore_flags, baseline_flags;
  auto* explore = app.add_subcommand("explore", "Run BO with the predictor-gated synthesis loop");
  add_explore_flags(explore, explore_flags);
  auto* baseline = app.add_subcommand("baseline", "Run plain BO, synthesizing every suggestion");
  add_explore_flags(baseline, baseline_flags);

  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "Train a predictor on a trial-db");
  train->add_option("--db", train_flags.db, "Trial-db (JSONL)")->required()->check(CLI::ExistingFile);
  train->add_option("--model", train_flags.model,
                    "mlp, qnn, logreg, svm (failure classifiers) or mlp_reg, linreg, lasso, krr, bayes_ridge")
      ->check(CLI::IsMember({"mlp", "qnn", "logreg", "svm", "mlp_reg", "linreg", "lasso", "krr", "bayes_ridge"}))
      ->capture_default_str();
  train->add_option("--epochs", train_flags.epochs, "Training epochs (mlp, qnn)");
  train->add_option("--lr", train_flags.lr, "Learning rate (mlp, qnn)");
  train->add_option("--batch", train_flags.batch, "Minibatch size (mlp, qnn)");
  train->add_option("--split", train_flags.split, "Training fraction of the labeled rows")->capture_default_str();
  train->add_option("--seed", train_flags.seed, "Seed for the split and initialization")->capture_default_str();
  train->add_option("--target", train_flags.target, "QoR field for regressors")->capture_default_str();
  train->add_option("--out", train_flags.out, "Model checkpoint path")->capture_default_str();

  EvaluateFlags eval_flags;
  auto* evaluate = app.add_subcommand("evaluate", "Score a trained model on the held-out split");
  evaluate->add_option("--db", eval_flags.db, "Trial-db (JSONL)")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--model-path", eval_flags.model_path, "Model checkpoint")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--split", eval_flags.split, "Training fraction used by train")->capture_default_str();
  evaluate->add_option("--seed", eval_flags.seed, "Seed used by train")->capture_default_str();
  evaluate->add_option("--target", eval_flags.target, "QoR field for regressors")->capture_default_str();
  evaluate->add_option("--roc", eval_flags.roc, "ROC CSV output (classifiers)")->capture_default_str();

  ParetoFlags pareto_flags;
  auto* pareto = app.add_subcommand("pareto", "Export the Pareto front of completed trials");
  pareto->add_option("--db", pareto_flags.db, "Trial-db (JSONL)")->required()->check(CLI::ExistingFile);
  pareto->add_option("--objectives", pareto_flags.objectives, "Objective list")->capture_default_str();
  pareto->add_option("--out", pareto_flags.out, "Pareto CSV output")->capture_default_str();
  pareto->add_option("--svg", pareto_flags.svg, "Also render a scatter plot with the front (two objectives)");

  ReportFlags report_flags;
  auto* report_cmd = app.add_subcommand("report", "Budget table or speedup accounting");
  report_cmd->add_option("--db", report_flags.db, "Trial-db (JSONL); --table2 without it checks the bundled table")
      ->check(CLI::ExistingFile);
  report_cmd->add_flag("--table2", report_flags.table2, "Per-kernel, per-budget completion table");
  report_cmd->add_flag("--speedup", report_flags.speedup, "BO vs AutoHLS hours and speedup");
  report_cmd->add_option("--t-synth-min", report_flags.t_synth_min, "Assumed minutes per synthesis")
      ->capture_default_str();
  report_cmd->add_option("--overhead-min", report_flags.overhead_min, "Extra minutes charged to AutoHLS")
      ->capture_default_str();
  report_cmd->add_option("--n-sampled", report_flags.n_sampled, "Sampled count when no --db is given");
  report_cmd->add_option("--n-synthesized", report_flags.n_synthesized, "Synthesized count when no --db is given");

  std::string table;
  auto* fixtures_cmd = app.add_subcommand("fixtures", "Print a bundled reference table");
  fixtures_cmd->add_option("--table", table, "1 or 2")->required()->check(CLI::IsMember({"1", "2"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*explore) return cmd_explore(explore_flags, orch::Mode::AutoHls);
    if (*baseline) return cmd_explore(baseline_flags, orch::Mode::Baseline);
    if (*train) return cmd_train(train_flags);
    if (*evaluate) return cmd_evaluate(eval_flags);
    if (*pareto) return cmd_pareto(pareto_flags);
    if (*report_cmd) return cmd_report(report_flags);
    if (*fixtures_cmd) {
      std::cout << fixtures::format_fixture(fixtures::load_fixture(table));
      return 0;
    }
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
