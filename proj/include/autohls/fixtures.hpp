// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "autohls/orchestrator.hpp"

namespace autohls::fixtures {

// Convolution kernel resource usage, one row per kernel variant.
struct Table1Row {
  std::string kernel;  // variant id, e.g. PoT16_6
  std::string label;   // as printed, e.g. "PoT<16, 6>"
  std::int64_t ff = 0;
  std::int64_t lut = 0;
  std::int64_t dsp = 0;
  std::int64_t latency = 0;
  std::optional<double> mse;  // "-" in the table
  bool operator==(const Table1Row&) const = default;
};

// Synthesis outcomes per kernel and time budget, with the printed percentages.
struct Table2Row {
  std::string kernel;
  std::string time_text;  // printed budget, empty on the total row
  double time_minutes = 0.0;
  std::int64_t comp = 0;
  std::int64_t fail = 0;
  std::int64_t total = 0;
  double pct_fail = 0.0;
  double pct_comp = 0.0;
  bool operator==(const Table2Row&) const = default;
};

struct Fixture {
  std::string id;  // "table1" or "table2"
  std::vector<Table1Row> table1;
  std::vector<Table2Row> table2;  // per-budget rows
  std::optional<Table2Row> table2_total;
};

// $AUTOHLS_DATA_DIR when set, else the data/ directory of the source tree.
std::filesystem::path data_dir();

// Accepts "table1", "table2", "1" or "2"; throws ConfigError otherwise.
Fixture load_fixture(std::string_view id);
Fixture parse_fixture(std::string_view id, std::string_view csv_text);

// Splits one CSV record; double quotes wrap fields that contain commas.
std::vector<std::string> split_csv_line(std::string_view line);

std::string format_fixture(const Fixture& f);

// Recomputes every per-budget row from its counts and compares against the
// printed percentages; the last entry is the recomputed total row.
std::vector<orch::BudgetCheck> check_table2(const Fixture& f, double tolerance = 0.02);

}  // namespace autohls::fixtures
