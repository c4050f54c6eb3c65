// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/tensor_io.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <string>

#include "autohls/common.hpp"

namespace autohls::io {

std::size_t Tensor::element_count() const {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>());
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  const auto e = s.find_last_not_of(" \t\r");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

}  // namespace

Tensor read_tensor_csv(std::istream& in) {
  Tensor t;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("tensor csv: empty input");
  const auto head = split_csv(line);
  if (head.empty() || trim(head[0]) != "shape" || head.size() < 2) {
    throw ConfigError("tensor csv: first line must be 'shape,d0,...'");
  }
  for (std::size_t i = 1; i < head.size(); ++i) {
    const auto cell = trim(head[i]);
    std::size_t d = 0;
    const auto [p, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), d);
    if (ec != std::errc() || p != cell.data() + cell.size() || d == 0) {
      throw ConfigError("tensor csv: bad dimension '" + cell + "'");
    }
    t.shape.push_back(d);
  }
  t.data.reserve(t.element_count());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    for (const auto& raw : split_csv(line)) {
      const auto cell = trim(raw);
      try {
        std::size_t used = 0;
        t.data.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw ConfigError("tensor csv line " + std::to_string(line_no) + ": bad value '" + cell + "'");
      }
    }
  }
  if (t.data.size() != t.element_count()) {
    throw ConfigError("tensor csv: expected " + std::to_string(t.element_count()) + " values, got " +
                      std::to_string(t.data.size()));
  }
  return t;
}

Tensor read_tensor_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open tensor file " + path.string());
  return read_tensor_csv(in);
}

void write_tensor_csv(const Tensor& t, std::ostream& out) {
  if (t.shape.empty() || t.data.size() != t.element_count()) {
    throw ContractError("write_tensor_csv: data does not match shape");
  }
  out << "shape";
  for (const auto d : t.shape) out << ',' << d;
  out << '\n' << std::setprecision(17);
  const std::size_t row = t.shape.back();
  for (std::size_t i = 0; i < t.data.size(); ++i) {
    out << t.data[i] << ((i + 1) % row == 0 ? '\n' : ',');
  }
}

void write_tensor_csv(const Tensor& t, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write tensor file " + path.string());
  write_tensor_csv(t, out);
}

}  // namespace autohls::io
