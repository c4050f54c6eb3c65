// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "autohls/common.hpp"
#include "autohls/trial.hpp"
#include "json.hpp"

namespace autohls::store {

inline constexpr int kSchemaVersion = 1;

// Append-only trial log plus the run metadata needed to reproduce it.
struct TrialDb {
  int schema_version = kSchemaVersion;
  std::uint64_t seed = 0;
  nlohmann::json config = nlohmann::json::object();
  std::vector<TrialRecord> records;

  // Records must arrive in submission order (index == size()).
  void append(TrialRecord record);
  bool operator==(const TrialDb&) const = default;
};

// Load failure; `line` is 1-based, 0 when the problem is not tied to a line.
class DbError : public ConfigError {
 public:
  DbError(std::size_t line, const std::string& what)
      : ConfigError(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

nlohmann::json record_to_json(const TrialRecord& r);
TrialRecord record_from_json(const nlohmann::json& j);

// JSON Lines: a header object, then one record per line.
std::string serialize(const TrialDb& db);
TrialDb parse_db(std::string_view text);

// Writes to a sibling temp file, then renames over `path`.
void save(const TrialDb& db, const std::filesystem::path& path);
TrialDb load(const std::filesystem::path& path);

// Atomic whole-file write shared by every artifact writer.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace autohls::store
