// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/trial_db.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace autohls::store {

using nlohmann::json;

void TrialDb::append(TrialRecord record) {
  if (record.index != records.size()) {
    throw ContractError("trial index " + std::to_string(record.index) + " out of order (expected " +
                        std::to_string(records.size()) + ")");
  }
  check_record(record);
  records.push_back(std::move(record));
}

json record_to_json(const TrialRecord& r) {
  json params = json::object();
  for (const auto& [k, v] : r.point.params) params[k] = v;
  json j{{"index", r.index},
         {"kernel", r.point.kernel},
         {"params", params},
         {"outcome", to_string(r.outcome)},
         {"budget_seconds", r.budget_seconds},
         {"wall_seconds", r.wall_seconds}};
  if (r.qor) {
    json q{{"ff", r.qor->ff},
           {"lut", r.qor->lut},
           {"dsp", r.qor->dsp},
           {"latency_cycles", r.qor->latency_cycles},
           {"synth_seconds", r.qor->synth_seconds}};
    if (r.qor->mse) q["mse"] = *r.qor->mse;
    j["qor"] = q;
  }
  if (r.prediction_score) j["prediction_score"] = *r.prediction_score;
  if (!r.failure_kind.empty()) j["failure_kind"] = r.failure_kind;
  if (!r.failure_detail.empty()) j["failure_detail"] = r.failure_detail;
  if (r.eval_completed) j["eval_completed"] = *r.eval_completed;
  if (r.ops) j["ops"] = {{"multiplies", r.ops->multiplies}, {"shifts", r.ops->shifts}, {"adds", r.ops->adds}};
  return j;
}

TrialRecord record_from_json(const json& j) {
  static const char* const known[] = {"index",        "kernel",           "params",         "outcome",
                                      "budget_seconds", "wall_seconds",   "qor",            "prediction_score",
                                      "failure_kind", "failure_detail",   "eval_completed", "ops"};
  if (!j.is_object()) throw ConfigError("record is not a JSON object");
  for (const auto& [key, value] : j.items()) {
    if (std::find(std::begin(known), std::end(known), key) == std::end(known)) {
      throw ConfigError("unknown record field '" + key + "'");
    }
  }
  TrialRecord r;
  r.index = j.at("index").get<std::size_t>();
  r.point.kernel = j.at("kernel").get<std::string>();
  for (const auto& [k, v] : j.at("params").items()) r.point.params[k] = v.get<std::int64_t>();
  r.outcome = parse_outcome(j.at("outcome").get<std::string>());
  r.budget_seconds = j.at("budget_seconds").get<double>();
  r.wall_seconds = j.at("wall_seconds").get<double>();
  if (j.contains("qor")) {
    const auto& q = j["qor"];
    QoR qor;
    qor.ff = q.at("ff").get<std::int64_t>();
    qor.lut = q.at("lut").get<std::int64_t>();
    qor.dsp = q.at("dsp").get<std::int64_t>();
    qor.latency_cycles = q.at("latency_cycles").get<std::int64_t>();
    qor.synth_seconds = q.at("synth_seconds").get<double>();
    if (q.contains("mse")) qor.mse = q["mse"].get<double>();
    r.qor = qor;
  }
  if (j.contains("prediction_score")) r.prediction_score = j["prediction_score"].get<double>();
  if (j.contains("failure_kind")) r.failure_kind = j["failure_kind"].get<std::string>();
  if (j.contains("failure_detail")) r.failure_detail = j["failure_detail"].get<std::string>();
  if (j.contains("eval_completed")) r.eval_completed = j["eval_completed"].get<bool>();
  if (j.contains("ops")) {
    const auto& o = j["ops"];
    r.ops = quant::OpCount{o.at("multiplies").get<std::uint64_t>(), o.at("shifts").get<std::uint64_t>(),
                           o.at("adds").get<std::uint64_t>()};
  }
  check_record(r);
  return r;
}

std::string serialize(const TrialDb& db) {
  std::string out;
  const json header{{"schema", "autohls-trials"},
                    {"schema_version", db.schema_version},
                    {"seed", db.seed},
                    {"config", db.config},
                    {"records", db.records.size()}};
  out += header.dump();
  out += '\n';
  for (const auto& r : db.records) {
    out += record_to_json(r).dump();
    out += '\n';
  }
  return out;
}

TrialDb parse_db(std::string_view text) {
  TrialDb db;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  bool have_header = false;
  std::size_t declared = 0;
  while (pos < text.size()) {
    auto end = text.find('\n', pos);
    const bool terminated = end != std::string_view::npos;
    if (!terminated) end = text.size();
    const auto line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (line.empty()) {
      if (terminated && pos >= text.size()) break;
      throw DbError(line_no, "empty line");
    }
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw DbError(line_no, std::string("malformed JSON") + (terminated ? "" : " (truncated line)") + ": " +
                                 e.what());
    }
    try {
      if (!have_header) {
        if (j.value("schema", "") != "autohls-trials") throw ConfigError("missing trial-db header");
        db.schema_version = j.at("schema_version").get<int>();
        if (db.schema_version != kSchemaVersion) {
          throw ConfigError("schema version " + std::to_string(db.schema_version) + " unsupported (expected " +
                            std::to_string(kSchemaVersion) + ")");
        }
        db.seed = j.at("seed").get<std::uint64_t>();
        db.config = j.at("config");
        declared = j.at("records").get<std::size_t>();
        have_header = true;
        continue;
      }
      db.append(record_from_json(j));
    } catch (const DbError&) {
      throw;
    } catch (const std::exception& e) {
      throw DbError(line_no, e.what());
    }
  }
  if (!have_header) throw DbError(0, "empty trial-db: no header line");
  if (db.records.size() != declared) {
    throw DbError(line_no + 1, "expected " + std::to_string(declared) + " records, found " +
                                   std::to_string(db.records.size()));
  }
  return db;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    out.flush();
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void save(const TrialDb& db, const std::filesystem::path& path) { write_file_atomic(path, serialize(db)); }

TrialDb load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DbError(0, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_db(buf.str());
}

}  // namespace autohls::store
