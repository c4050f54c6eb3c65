// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/fixtures.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "autohls/report.hpp"

#ifndef AUTOHLS_DATA_DIR
#define AUTOHLS_DATA_DIR "data"
#endif

namespace autohls::fixtures {

std::filesystem::path data_dir() {
  if (const char* env = std::getenv("AUTOHLS_DATA_DIR"); env != nullptr && *env != '\0') return env;
  return AUTOHLS_DATA_DIR;
}

std::vector<std::string> split_csv_line(std::string_view line) {
  std::vector<std::string> fields(1);
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        fields.back() += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        fields.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.emplace_back();
    } else if (c != '\r') {
      fields.back() += c;
    }
  }
  if (quoted) throw ConfigError("unterminated quote in CSV line");
  return fields;
}

namespace {

std::int64_t to_int(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  long long v = 0;
  try {
    v = std::stoll(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ConfigError("line " + std::to_string(line) + ": bad integer '" + s + "'");
  return v;
}

double to_real(const std::string& s, std::size_t line) {
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size() || s.empty()) throw ConfigError("line " + std::to_string(line) + ": bad number '" + s + "'");
  return v;
}

std::string canonical_id(std::string_view id) {
  if (id == "table1" || id == "1") return "table1";
  if (id == "table2" || id == "2") return "table2";
  throw ConfigError("unknown fixture '" + std::string(id) + "' (expected table1 or table2)");
}

}  // namespace

Fixture parse_fixture(std::string_view id_in, std::string_view text) {
  Fixture f;
  f.id = canonical_id(id_in);
  const std::vector<std::string> header1{"kernel", "label", "ff", "lut", "dsp", "latency", "mse"};
  const std::vector<std::string> header2{"kernel", "time_min", "comp", "fail", "total", "pct_fail", "pct_comp"};
  const auto& header = f.id == "table1" ? header1 : header2;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (n == 1) {
      if (cells != header) throw ConfigError(f.id + ": unexpected CSV header");
      continue;
    }
    if (cells.size() != header.size()) {
      throw ConfigError(f.id + " line " + std::to_string(n) + ": expected " + std::to_string(header.size()) +
                        " fields");
    }
    if (f.id == "table1") {
      Table1Row r{cells[0], cells[1], to_int(cells[2], n), to_int(cells[3], n), to_int(cells[4], n),
                  to_int(cells[5], n), std::nullopt};
      if (cells[6] != "-") r.mse = to_real(cells[6], n);
      f.table1.push_back(std::move(r));
    } else {
      Table2Row r;
      r.kernel = cells[0];
      r.time_text = cells[1];
      r.time_minutes = cells[1].empty() ? 0.0 : to_real(cells[1], n);
      r.comp = to_int(cells[2], n);
      r.fail = to_int(cells[3], n);
      r.total = to_int(cells[4], n);
      r.pct_fail = to_real(cells[5], n);
      r.pct_comp = to_real(cells[6], n);
      if (r.kernel == "Total") {
        f.table2_total = r;
      } else {
        f.table2.push_back(std::move(r));
      }
    }
  }
  if (n == 0) throw ConfigError(f.id + ": empty fixture");
  return f;
}

Fixture load_fixture(std::string_view id) {
  const auto canonical = canonical_id(id);
  const auto path = data_dir() / (canonical + ".csv");
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open fixture " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_fixture(canonical, ss.str());
}

std::string format_fixture(const Fixture& f) {
  std::ostringstream os;
  char buf[200];
  if (f.id == "table1") {
    os << "kernel         ff      lut    dsp  latency  mse\n";
    for (const auto& r : f.table1) {
      std::snprintf(buf, sizeof buf, "%-12s %6lld %8lld %6lld %8lld  %s\n", r.label.c_str(),
                    static_cast<long long>(r.ff), static_cast<long long>(r.lut), static_cast<long long>(r.dsp),
                    static_cast<long long>(r.latency), r.mse ? report::format_real(*r.mse).c_str() : "-");
      os << buf;
    }
    return os.str();
  }
  os << "kernel     time_min   comp   fail  total    %fail    %comp\n";
  auto line = [&](const Table2Row& r) {
    std::snprintf(buf, sizeof buf, "%-10s %8s %6lld %6lld %6lld %8.2f %8.2f\n", r.kernel.c_str(), r.time_text.c_str(),
                  static_cast<long long>(r.comp), static_cast<long long>(r.fail), static_cast<long long>(r.total),
                  r.pct_fail, r.pct_comp);
    os << buf;
  };
  for (const auto& r : f.table2) line(r);
  if (f.table2_total) line(*f.table2_total);
  return os.str();
}

std::vector<orch::BudgetCheck> check_table2(const Fixture& f, double tolerance) {
  if (f.id != "table2") throw ContractError("check_table2 needs the table2 fixture");
  std::vector<orch::BudgetCheck> out;
  std::vector<orch::BudgetRow> rows;
  for (const auto& r : f.table2) {
    const auto row = orch::budget_row(r.kernel, r.time_minutes, static_cast<std::size_t>(r.comp),
                                      static_cast<std::size_t>(r.fail));
    rows.push_back(row);
    out.push_back(orch::check_printed(row, r.pct_fail, r.pct_comp, tolerance));
  }
  const auto total = orch::total_row(rows);
  const double pf = f.table2_total ? f.table2_total->pct_fail : total.pct_fail;
  const double pc = f.table2_total ? f.table2_total->pct_comp : total.pct_comp;
  out.push_back(orch::check_printed(total, pf, pc, tolerance));
  return out;
}

}  // namespace autohls::fixtures
