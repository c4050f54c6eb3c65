// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/synthesis_backend.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace autohls::synth {

SynthesisOutcome SynthesisOutcome::completed(QoR qor, std::optional<quant::OpCount> ops) {
  SynthesisOutcome o;
  o.elapsed_ = qor.synth_seconds;
  o.value_ = std::move(qor);
  o.ops_ = ops;
  return o;
}

SynthesisOutcome SynthesisOutcome::time_budget_exceeded(std::string detail) {
  SynthesisOutcome o;
  o.value_ = SynthesisFailure{FailureReason::TimeBudgetExceeded, std::move(detail)};
  return o;
}

SynthesisOutcome SynthesisOutcome::tool_error(std::string detail) {
  SynthesisOutcome o;
  o.value_ = SynthesisFailure{FailureReason::ToolError, std::move(detail)};
  return o;
}

const QoR& SynthesisOutcome::qor() const {
  if (const auto* q = std::get_if<QoR>(&value_)) return *q;
  throw ContractError("outcome is a failure and carries no QoR");
}

const SynthesisFailure& SynthesisOutcome::failure() const {
  if (const auto* f = std::get_if<SynthesisFailure>(&value_)) return *f;
  throw ContractError("outcome completed and carries no failure");
}

std::string_view failure_kind_name(FailureReason reason) {
  return reason == FailureReason::TimeBudgetExceeded ? "time_budget_exceeded" : "tool_error";
}

void SyntheticOracleConfig::validate() const {
  auto check = [](double v, const char* name) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ConfigError(std::string("oracle constant ") + name + " must be finite and >= 0");
    }
  };
  check(base.lut0, "lut0");
  check(base.ff0, "ff0");
  for (const auto& [k, c] : per_kernel) {
    check(c.lut0, "lut0");
    check(c.ff0, "ff0");
  }
  check(lut_u, "lut_u");
  check(ff_u, "ff_u");
  check(lut_p, "lut_p");
  check(s0, "s0");
  check(a, "a");
  check(b, "b");
  check(jitter, "j");
  if (c_in == 0 || length == 0 || c_out == 0) throw ConfigError("oracle conv shape must be >= 1");
}

const KernelCost& SyntheticOracleConfig::cost_for(std::string_view kernel) const {
  const auto it = per_kernel.find(std::string(kernel));
  return it == per_kernel.end() ? base : it->second;
}

std::string canonical_text(const space::DesignPoint& point) {
  std::string s = point.kernel;
  for (const auto& [name, value] : point.params) {  // std::map: sorted by name
    s += ';';
    s += name;
    s += '=';
    s += std::to_string(value);
  }
  return s;
}

double point_hash(const space::DesignPoint& point, std::uint64_t seed) {
  const std::uint64_t h = mix64(fnv1a(canonical_text(point)) ^ mix64(seed));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

namespace {

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

std::optional<std::int64_t> param(const space::DesignPoint& p, const std::string& name) {
  const auto it = p.params.find(name);
  if (it == p.params.end()) return std::nullopt;
  return it->second;
}

}  // namespace

OracleModel evaluate_oracle(const SyntheticOracleConfig& cfg, const space::DesignPoint& point) {
  OracleModel m;
  m.unroll = param(point, cfg.unroll_dim).value_or(1);
  m.ii = param(point, cfg.ii_dim).value_or(1);
  if (m.unroll < 1 || m.ii < 1) throw ContractError("oracle needs unroll >= 1 and ii >= 1");
  m.work = static_cast<std::int64_t>(cfg.c_in * cfg.length);
  const std::int64_t per_ii = ceil_div(m.work, m.ii);
  const auto& cost = cfg.cost_for(point.kernel);
  m.lut = std::llround(cost.lut0 + cfg.lut_u * m.unroll + cfg.lut_p * per_ii);
  m.ff = std::llround(cost.ff0 + cfg.ff_u * m.unroll);
  const auto info = quant::parse_kernel_variant(point.kernel);
  m.dsp = info.multiplier_free() ? 0 : std::max<std::int64_t>(1, ceil_div(m.unroll, 4));
  m.natural_latency = ceil_div(m.work, m.unroll) * m.ii + 64;

  std::int64_t latency = m.natural_latency;
  const auto lo = param(point, cfg.latency_min_dim);
  const auto hi = param(point, cfg.latency_max_dim);
  if (lo && latency < *lo) latency = *lo;  // the schedule is padded up to the lower bound
  if (hi && latency > *hi) {
    m.latency.reset();
  } else {
    m.latency = latency;
  }
  m.jitter_h = point_hash(point, cfg.seed);
  m.synth_minutes = cfg.s0 * (1.0 + cfg.a * static_cast<double>(m.unroll)) *
                    (1.0 + cfg.b * static_cast<double>(per_ii) / 1000.0) * (1.0 + cfg.jitter * m.jitter_h);
  return m;
}

SynthesisOutcome synthetic_synthesize(const SyntheticOracleConfig& cfg, const space::DesignPoint& point,
                                      double budget_seconds) {
  const OracleModel m = evaluate_oracle(cfg, point);
  const double seconds = m.synth_minutes * 60.0;
  if (seconds > budget_seconds) {
    return SynthesisOutcome::time_budget_exceeded().with_elapsed(std::max(0.0, budget_seconds));
  }
  if (!m.latency) return SynthesisOutcome::tool_error("latency bound infeasible").with_elapsed(seconds);
  QoR q;
  q.ff = m.ff;
  q.lut = m.lut;
  q.dsp = m.dsp;
  q.latency_cycles = *m.latency;
  q.synth_seconds = seconds;
  return SynthesisOutcome::completed(q);
}

KernelProfile profile_kernel(std::string_view variant, std::size_t c_in, std::size_t length,
                             std::size_t c_out, std::uint64_t seed) {
  const std::size_t taps = c_in * length;
  Rng rng(derive_seed(seed, 0x6b65726e656c));
  std::uniform_real_distribution<double> wdist(-0.25, 0.25);
  std::uniform_real_distribution<double> xdist(-1.0, 1.0);
  std::vector<double> w(c_out * taps), x(taps), bias(c_out);
  for (auto& v : w) v = wdist(rng);
  for (auto& v : x) v = xdist(rng);
  for (auto& v : bias) v = wdist(rng);

  quant::ConvSpec ref;
  ref.c_in = c_in;
  ref.length = length;
  ref.c_out = c_out;
  ref.mode = quant::ArithmeticMode::MacFloat;
  const auto reference = quant::conv_forward(ref, w, bias, x);
  const auto spec = quant::ConvSpec::for_variant(variant, c_in, length, c_out);
  const auto got = quant::conv_forward(spec, w, bias, x);
  return {quant::kernel_mse(reference.output, got.output), got.ops, got.saturated_outputs};
}

SyntheticOracle::SyntheticOracle(SyntheticOracleConfig cfg) : cfg_(std::move(cfg)) { cfg_.validate(); }

const SyntheticOracle::Functional& SyntheticOracle::functional(const std::string& kernel) const {
  std::lock_guard lock(mutex_);
  auto it = functional_cache_.find(kernel);
  if (it == functional_cache_.end()) {
    const auto prof = profile_kernel(kernel, cfg_.c_in, cfg_.length, cfg_.c_out, cfg_.seed);
    it = functional_cache_.emplace(kernel, Functional{prof.mse, prof.ops}).first;
  }
  return it->second;
}

SynthesisOutcome SyntheticOracle::run(const space::DesignPoint& point, double budget_seconds) const {
  auto out = synthetic_synthesize(cfg_, point, budget_seconds);
  if (cfg_.functional_model && out.is_completed()) {
    const auto& f = functional(point.kernel);
    QoR q = out.qor();
    q.mse = f.mse;
    out = SynthesisOutcome::completed(q, f.ops);
  }
  return out;
}

SynthesisOutcome SyntheticOracle::synthesize(const space::DesignPoint& point, double budget_seconds) {
  return run(point, budget_seconds);
}

std::optional<SynthesisOutcome> SyntheticOracle::ground_truth(const space::DesignPoint& point,
                                                              double budget_seconds) const {
  return run(point, budget_seconds);
}

}  // namespace autohls::synth
