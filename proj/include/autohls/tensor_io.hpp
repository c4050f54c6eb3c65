// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <vector>

namespace autohls::io {

// Dense row-major tensor of doubles.
struct Tensor {
  std::vector<std::size_t> shape;
  std::vector<double> data;

  std::size_t element_count() const;
  bool operator==(const Tensor&) const = default;
};

// CSV layout: first line "shape,d0,d1,...", then the values in row-major
// order, one innermost row per line.
Tensor read_tensor_csv(std::istream& in);
Tensor read_tensor_csv(const std::filesystem::path& path);
void write_tensor_csv(const Tensor& t, std::ostream& out);
void write_tensor_csv(const Tensor& t, const std::filesystem::path& path);

}  // namespace autohls::io
