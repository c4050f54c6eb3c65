// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <string_view>

#include "autohls/design_space.hpp"
#include "autohls/orchestrator.hpp"
#include "autohls/synthesis_backend.hpp"
#include "json.hpp"

namespace autohls {

enum class BackendKind { Synthetic, Command };

struct BackendConfig {
  BackendKind kind = BackendKind::Synthetic;
  synth::CommandAdapterConfig command;
};

// Everything a run needs, after merging defaults, the config file and flags.
struct ResolvedConfig {
  orch::RunConfig run;
  synth::SyntheticOracleConfig oracle;
  BackendConfig backend;
  space::ParameterSpace space;
};

// unroll [1,128], ii [1,16], latency_min/latency_max [0,4096] over the
// PoT16_6 and APoT16_6 kernels.
space::ParameterSpace default_space();
ResolvedConfig default_config();

// Sections: [run], [tpe], [oracle] (with [oracle.kernel.<variant>] cost
// overrides), [predictor], [backend], and either inline [kernel]/[[dim]]
// tables or run.space = "<path>" resolved against `base_dir`. Unknown keys are
// rejected. Values not present keep those of `base`.
ResolvedConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir,
                                ResolvedConfig base = default_config());
ResolvedConfig load_run_config(const std::filesystem::path& path, ResolvedConfig base = default_config());

nlohmann::json config_to_json(const orch::RunConfig& cfg);
nlohmann::json oracle_to_json(const synth::SyntheticOracleConfig& cfg);
nlohmann::json resolved_to_json(const ResolvedConfig& cfg);

std::unique_ptr<synth::SynthesisBackend> make_backend(const ResolvedConfig& cfg);

}  // namespace autohls
