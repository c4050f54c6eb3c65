// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/run_config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "toml.hpp"

namespace autohls {

using nlohmann::json;

space::ParameterSpace default_space() {
  using space::Dim;
  using space::IntegerRange;
  using space::PragmaKind;
  space::ParameterSpace s;
  s.dims = {Dim{"unroll", PragmaKind::Unroll, IntegerRange{1, 128, 1}, {}},
            Dim{"ii", PragmaKind::Pipeline, IntegerRange{1, 16, 1}, {}},
            Dim{"latency_min", PragmaKind::LatencyBound, IntegerRange{0, 4096, 1}, {}},
            Dim{"latency_max", PragmaKind::LatencyBound, IntegerRange{0, 4096, 1}, {}}};
  s.kernel_variants = {"PoT16_6", "APoT16_6"};
  return s;
}

ResolvedConfig default_config() {
  ResolvedConfig c;
  c.space = default_space();
  return c;
}

namespace {

void reject_unknown(const toml::table& t, const std::string& section, const std::set<std::string>& allowed) {
  for (const auto& [key, _] : t) {
    if (!allowed.contains(std::string(key.str()))) {
      throw ConfigError(section + ": unknown key '" + std::string(key.str()) + "'");
    }
  }
}

double get_real(const toml::table& t, const char* key, const std::string& section, double fallback) {
  const auto* node = t.get(key);
  if (node == nullptr) return fallback;
  if (const auto v = node->value<double>()) return *v;  // integers convert too
  throw ConfigError(section + "." + key + " must be a number");
}

std::int64_t get_int(const toml::table& t, const char* key, const std::string& section, std::int64_t fallback) {
  const auto* node = t.get(key);
  if (node == nullptr) return fallback;
  if (!node->is_integer()) throw ConfigError(section + "." + key + " must be an integer");
  return *node->value<std::int64_t>();
}

std::size_t get_count(const toml::table& t, const char* key, const std::string& section, std::size_t fallback) {
  const auto v = get_int(t, key, section, static_cast<std::int64_t>(fallback));
  if (v < 0) throw ConfigError(section + "." + key + " must be >= 0");
  return static_cast<std::size_t>(v);
}

std::string get_string(const toml::table& t, const char* key, const std::string& section, std::string fallback) {
  const auto* node = t.get(key);
  if (node == nullptr) return fallback;
  if (const auto v = node->value<std::string>()) return *v;
  throw ConfigError(section + "." + key + " must be a string");
}

bool get_bool(const toml::table& t, const char* key, const std::string& section, bool fallback) {
  const auto* node = t.get(key);
  if (node == nullptr) return fallback;
  if (const auto v = node->value<bool>()) return *v;
  throw ConfigError(section + "." + key + " must be a boolean");
}

const toml::table* section(const toml::table& root, const char* name) {
  const auto* node = root.get(name);
  if (node == nullptr) return nullptr;
  if (!node->is_table()) throw ConfigError(std::string("[") + name + "] must be a table");
  return node->as_table();
}

void apply_run(const toml::table& t, ResolvedConfig& c, const std::filesystem::path& base_dir) {
  const std::string s = "[run]";
  reject_unknown(t, s, {"mode", "n_samples", "tau", "retrain_every", "budget_seconds", "assumed_synth_minutes",
                        "overhead_minutes", "workers", "seed", "objectives", "space"});
  auto& r = c.run;
  if (t.contains("mode")) r.mode = orch::parse_mode(get_string(t, "mode", s, ""));
  r.n_samples = get_count(t, "n_samples", s, r.n_samples);
  r.tau = get_real(t, "tau", s, r.tau);
  r.retrain_every = get_count(t, "retrain_every", s, r.retrain_every);
  r.budget_seconds = get_real(t, "budget_seconds", s, r.budget_seconds);
  r.assumed_synth_minutes = get_real(t, "assumed_synth_minutes", s, r.assumed_synth_minutes);
  r.overhead_minutes = get_real(t, "overhead_minutes", s, r.overhead_minutes);
  r.workers = get_count(t, "workers", s, r.workers);
  r.seed = static_cast<std::uint64_t>(get_int(t, "seed", s, static_cast<std::int64_t>(r.seed)));
  if (t.contains("objectives")) r.objectives = opt::parse_objectives(get_string(t, "objectives", s, ""));
  if (t.contains("space")) {
    std::filesystem::path p = get_string(t, "space", s, "");
    if (p.is_relative()) p = base_dir / p;
    c.space = space::load_space(p);
  }
}

void apply_tpe(const toml::table& t, opt::TpeConfig& tpe) {
  const std::string s = "[tpe]";
  reject_unknown(t, s, {"n_startup", "gamma_fraction", "gamma_cap", "n_candidates", "bandwidth_floor",
                        "prior_weight"});
  tpe.n_startup = get_count(t, "n_startup", s, tpe.n_startup);
  tpe.gamma_fraction = get_real(t, "gamma_fraction", s, tpe.gamma_fraction);
  tpe.gamma_cap = get_count(t, "gamma_cap", s, tpe.gamma_cap);
  tpe.n_candidates = get_count(t, "n_candidates", s, tpe.n_candidates);
  tpe.bandwidth_floor = get_real(t, "bandwidth_floor", s, tpe.bandwidth_floor);
  tpe.prior_weight = get_real(t, "prior_weight", s, tpe.prior_weight);
}

void apply_oracle(const toml::table& t, synth::SyntheticOracleConfig& o) {
  const std::string s = "[oracle]";
  reject_unknown(t, s, {"lut0", "ff0", "lut_u", "ff_u", "lut_p", "s0", "a", "b", "j", "seed", "c_in", "length",
                        "c_out", "functional_model", "kernel"});
  o.base.lut0 = get_real(t, "lut0", s, o.base.lut0);
  o.base.ff0 = get_real(t, "ff0", s, o.base.ff0);
  o.lut_u = get_real(t, "lut_u", s, o.lut_u);
  o.ff_u = get_real(t, "ff_u", s, o.ff_u);
  o.lut_p = get_real(t, "lut_p", s, o.lut_p);
  o.s0 = get_real(t, "s0", s, o.s0);
  o.a = get_real(t, "a", s, o.a);
  o.b = get_real(t, "b", s, o.b);
  o.jitter = get_real(t, "j", s, o.jitter);
  o.seed = static_cast<std::uint64_t>(get_int(t, "seed", s, static_cast<std::int64_t>(o.seed)));
  o.c_in = get_count(t, "c_in", s, o.c_in);
  o.length = get_count(t, "length", s, o.length);
  o.c_out = get_count(t, "c_out", s, o.c_out);
  o.functional_model = get_bool(t, "functional_model", s, o.functional_model);
  if (const auto* kernels = section(t, "kernel")) {
    for (const auto& [name, node] : *kernels) {
      const std::string ks = "[oracle.kernel." + std::string(name.str()) + "]";
      if (!node.is_table()) throw ConfigError(ks + " must be a table");
      const auto& kt = *node.as_table();
      reject_unknown(kt, ks, {"lut0", "ff0"});
      synth::KernelCost cost = o.base;
      cost.lut0 = get_real(kt, "lut0", ks, cost.lut0);
      cost.ff0 = get_real(kt, "ff0", ks, cost.ff0);
      o.per_kernel[std::string(name.str())] = cost;
    }
  }
  o.validate();
}

void apply_predictor(const toml::table& t, orch::RunConfig& r) {
  const std::string s = "[predictor]";
  reject_unknown(t, s, {"kind", "epochs", "lr", "batch", "class_weighting"});
  if (t.contains("kind")) r.predictor_kind = ml::parse_predictor_kind(get_string(t, "kind", s, ""));
  r.training.epochs = get_count(t, "epochs", s, r.training.epochs);
  r.training.lr = get_real(t, "lr", s, r.training.lr);
  r.training.batch = get_count(t, "batch", s, r.training.batch);
  r.training.class_weighting = get_bool(t, "class_weighting", s, r.training.class_weighting);
}

void apply_backend(const toml::table& t, BackendConfig& b, const std::filesystem::path& base_dir) {
  const std::string s = "[backend]";
  reject_unknown(t, s, {"kind", "command", "work_root", "report_name"});
  const auto kind = get_string(t, "kind", s, b.kind == BackendKind::Synthetic ? "synthetic" : "command");
  if (kind == "synthetic") {
    b.kind = BackendKind::Synthetic;
  } else if (kind == "command") {
    b.kind = BackendKind::Command;
  } else {
    throw ConfigError("[backend].kind must be \"synthetic\" or \"command\"");
  }
  b.command.command_template = get_string(t, "command", s, b.command.command_template);
  if (t.contains("work_root")) {
    std::filesystem::path p = get_string(t, "work_root", s, "");
    b.command.work_root = p.is_relative() ? base_dir / p : p;
  }
  b.command.report_name = get_string(t, "report_name", s, b.command.report_name);
  if (b.kind == BackendKind::Command && b.command.command_template.empty()) {
    throw ConfigError("[backend]: kind = \"command\" needs a command template");
  }
}

}  // namespace

ResolvedConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir, ResolvedConfig c) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "syntax error at line " << e.source().begin.line << ", column " << e.source().begin.column << ": "
       << e.description();
    throw ConfigError(os.str());
  }
  reject_unknown(root, "run config", {"run", "tpe", "oracle", "predictor", "backend", "kernel", "dim"});
  if (root.contains("kernel") || root.contains("dim")) {
    const auto* run = section(root, "run");
    if (run != nullptr && run->contains("space")) {
      throw ConfigError("give the space either inline ([kernel]/[[dim]]) or as run.space, not both");
    }
    toml::table space_table;
    if (const auto* k = root.get("kernel")) space_table.insert("kernel", *k);
    if (const auto* d = root.get("dim")) space_table.insert("dim", *d);
    c.space = space::parse_space(space_table);
  }
  if (const auto* t = section(root, "run")) apply_run(*t, c, base_dir);
  if (const auto* t = section(root, "tpe")) apply_tpe(*t, c.run.tpe);
  if (const auto* t = section(root, "oracle")) apply_oracle(*t, c.oracle);
  if (const auto* t = section(root, "predictor")) apply_predictor(*t, c.run);
  if (const auto* t = section(root, "backend")) apply_backend(*t, c.backend, base_dir);
  c.run.validate();
  return c;
}

ResolvedConfig load_run_config(const std::filesystem::path& path, ResolvedConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_run_config(ss.str(), path.parent_path(), std::move(base));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

json config_to_json(const orch::RunConfig& r) {
  return {{"mode", orch::to_string(r.mode)},
          {"n_samples", r.n_samples},
          {"tau", r.tau},
          {"retrain_every", r.retrain_every},
          {"predictor_kind", ml::to_string(r.predictor_kind)},
          {"budget_seconds", r.budget_seconds},
          {"assumed_synth_minutes", r.assumed_synth_minutes},
          {"overhead_minutes", r.overhead_minutes},
          {"workers", r.workers},
          {"seed", r.seed},
          {"objectives", opt::format_objectives(r.objectives)},
          {"tpe",
           {{"n_startup", r.tpe.n_startup},
            {"gamma_fraction", r.tpe.gamma_fraction},
            {"gamma_cap", r.tpe.gamma_cap},
            {"n_candidates", r.tpe.n_candidates},
            {"bandwidth_floor", r.tpe.bandwidth_floor},
            {"prior_weight", r.tpe.prior_weight}}},
          {"predictor",
           {{"epochs", r.training.epochs},
            {"lr", r.training.lr},
            {"batch", r.training.batch},
            {"class_weighting", r.training.class_weighting}}}};
}

json oracle_to_json(const synth::SyntheticOracleConfig& o) {
  json kernels = json::object();
  for (const auto& [k, c] : o.per_kernel) kernels[k] = {{"lut0", c.lut0}, {"ff0", c.ff0}};
  return {{"lut0", o.base.lut0}, {"ff0", o.base.ff0}, {"lut_u", o.lut_u},   {"ff_u", o.ff_u},
          {"lut_p", o.lut_p},    {"s0", o.s0},        {"a", o.a},           {"b", o.b},
          {"j", o.jitter},       {"seed", o.seed},    {"c_in", o.c_in},     {"length", o.length},
          {"c_out", o.c_out},    {"functional_model", o.functional_model}, {"kernel", kernels}};
}

json resolved_to_json(const ResolvedConfig& c) {
  json backend{{"kind", c.backend.kind == BackendKind::Synthetic ? "synthetic" : "command"}};
  if (c.backend.kind == BackendKind::Command) {
    backend["command"] = c.backend.command.command_template;
    backend["work_root"] = c.backend.command.work_root.string();
    backend["report_name"] = c.backend.command.report_name;
  }
  return {{"run", config_to_json(c.run)},
          {"oracle", oracle_to_json(c.oracle)},
          {"backend", backend},
          {"space", space::format_space(c.space)}};
}

std::unique_ptr<synth::SynthesisBackend> make_backend(const ResolvedConfig& c) {
  if (c.backend.kind == BackendKind::Command) return std::make_unique<synth::CommandAdapter>(c.backend.command);
  return std::make_unique<synth::SyntheticOracle>(c.oracle);
}

}  // namespace autohls
