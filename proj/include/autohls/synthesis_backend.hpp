// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "autohls/design_space.hpp"
#include "autohls/kernel_transform.hpp"
#include "autohls/trial.hpp"

namespace autohls::synth {

enum class FailureReason { TimeBudgetExceeded, ToolError };

struct SynthesisFailure {
  FailureReason reason = FailureReason::ToolError;
  std::string detail;
  bool operator==(const SynthesisFailure&) const = default;
};

class SynthesisOutcome {
 public:
  static SynthesisOutcome completed(QoR qor, std::optional<quant::OpCount> ops = {});
  static SynthesisOutcome time_budget_exceeded(std::string detail = "time budget exceeded");
  static SynthesisOutcome tool_error(std::string detail);

  bool is_completed() const { return std::holds_alternative<QoR>(value_); }
  const QoR& qor() const;
  const SynthesisFailure& failure() const;
  const std::optional<quant::OpCount>& ops() const { return ops_; }
  // Clock time the synthesis occupied: the report's synth_seconds, or the
  // time spent before the failure was detected.
  double elapsed_seconds() const { return elapsed_; }
  SynthesisOutcome& with_elapsed(double seconds) {
    elapsed_ = seconds;
    return *this;
  }

  bool operator==(const SynthesisOutcome&) const = default;

 private:
  std::variant<QoR, SynthesisFailure> value_;
  std::optional<quant::OpCount> ops_;
  double elapsed_ = 0.0;
};

std::string_view failure_kind_name(FailureReason reason);

// Implementations must be safe to call concurrently for distinct points.
class SynthesisBackend {
 public:
  virtual ~SynthesisBackend() = default;
  virtual std::string name() const = 0;
  virtual SynthesisOutcome synthesize(const space::DesignPoint& point, double budget_seconds) = 0;
  // Evaluation-only oracle answer for a point that was never synthesized.
  virtual std::optional<SynthesisOutcome> ground_truth(const space::DesignPoint&, double) const {
    return std::nullopt;
  }
};

struct KernelCost {
  double lut0 = 500.0;
  double ff0 = 800.0;
  bool operator==(const KernelCost&) const = default;
};

struct SyntheticOracleConfig {
  KernelCost base;                             // for kernels without an override
  std::map<std::string, KernelCost> per_kernel;
  double lut_u = 120.0;
  double ff_u = 200.0;
  double lut_p = 4.0;
  double s0 = 1.2;  // minutes
  double a = 0.02;
  double b = 1.0;
  double jitter = 0.25;
  std::uint64_t seed = 0;
  // Convolution block shape; work = c_in * length.
  std::size_t c_in = 100;
  std::size_t length = 7;
  std::size_t c_out = 106;
  // Attach mse and op counts from the functional conv model to completed QoR.
  bool functional_model = false;
  // Dim names read from the design point; missing dims default to U = II = 1
  // and no latency bounds.
  std::string unroll_dim = "unroll";
  std::string ii_dim = "ii";
  std::string latency_min_dim = "latency_min";
  std::string latency_max_dim = "latency_max";

  // Throws ConfigError for negative constants or an empty conv shape.
  void validate() const;
  const KernelCost& cost_for(std::string_view kernel) const;
  bool operator==(const SyntheticOracleConfig&) const = default;
};

// Closed-form quantities the oracle derives for one point.
struct OracleModel {
  std::int64_t unroll = 1;
  std::int64_t ii = 1;
  std::int64_t work = 0;
  std::int64_t lut = 0;
  std::int64_t ff = 0;
  std::int64_t dsp = 0;
  std::int64_t natural_latency = 0;
  std::optional<std::int64_t> latency;  // empty when the bound window excludes it
  double jitter_h = 0.0;
  double synth_minutes = 0.0;
};

// Seeded hash of the canonical point text, in [0, 1).
double point_hash(const space::DesignPoint& point, std::uint64_t seed);
std::string canonical_text(const space::DesignPoint& point);

OracleModel evaluate_oracle(const SyntheticOracleConfig& cfg, const space::DesignPoint& point);
SynthesisOutcome synthetic_synthesize(const SyntheticOracleConfig& cfg, const space::DesignPoint& point,
                                      double budget_seconds);

class SyntheticOracle final : public SynthesisBackend {
 public:
  explicit SyntheticOracle(SyntheticOracleConfig cfg);
  std::string name() const override { return "synthetic"; }
  SynthesisOutcome synthesize(const space::DesignPoint& point, double budget_seconds) override;
  std::optional<SynthesisOutcome> ground_truth(const space::DesignPoint& point,
                                               double budget_seconds) const override;
  const SyntheticOracleConfig& config() const { return cfg_; }

 private:
  struct Functional {
    double mse = 0.0;
    quant::OpCount ops;
  };
  SynthesisOutcome run(const space::DesignPoint& point, double budget_seconds) const;
  const Functional& functional(const std::string& kernel) const;

  SyntheticOracleConfig cfg_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, Functional> functional_cache_;
};

// Conv MSE and op counts of a kernel variant against the float reference on
// seeded weights and inputs.
struct KernelProfile {
  double mse = 0.0;
  quant::OpCount ops;
  std::size_t saturated_outputs = 0;
};
KernelProfile profile_kernel(std::string_view variant, std::size_t c_in, std::size_t length,
                             std::size_t c_out, std::uint64_t seed);

struct CommandAdapterConfig {
  // e.g. "python3 synth.py --design {design_json} --budget {budget_s} --out {out_dir}"
  std::string command_template;
  std::filesystem::path work_root = "synth_work";
  std::string report_name = "report.json";
  double poll_interval_seconds = 0.01;
};

// Renders {design_json}, {budget_s} and {out_dir}; substituted paths are
// shell-quoted. Throws ConfigError on unknown placeholders.
std::string render_command(std::string_view command_template, const std::filesystem::path& design_json,
                           double budget_seconds, const std::filesystem::path& out_dir);

// Parses a report against the exact contract; returns ToolError outcomes for
// violations.
SynthesisOutcome parse_report(std::string_view text);

std::string design_json(const space::DesignPoint& point);

class CommandAdapter final : public SynthesisBackend {
 public:
  explicit CommandAdapter(CommandAdapterConfig cfg);
  std::string name() const override { return "command"; }
  SynthesisOutcome synthesize(const space::DesignPoint& point, double budget_seconds) override;
  const CommandAdapterConfig& config() const { return cfg_; }

 private:
  CommandAdapterConfig cfg_;
  std::atomic<std::uint64_t> invocations_{0};
};

SynthesisOutcome command_synthesize(const CommandAdapterConfig& cfg, const space::DesignPoint& point,
                                    double budget_seconds, const std::filesystem::path& out_dir);

}  // namespace autohls::synth
