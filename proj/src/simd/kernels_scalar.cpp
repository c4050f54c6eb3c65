// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/simd/kernels.hpp"

namespace autohls::simd {
namespace {

double dot_f64(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

float dot_f32(const float* a, const float* b, std::size_t n) {
  float acc = 0.0f;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy_f64(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

std::int64_t dot_i32(const std::int32_t* a, const std::int32_t* b, std::size_t n) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    acc += static_cast<std::int64_t>(a[i]) * static_cast<std::int64_t>(b[i]);
  }
  return acc;
}

std::int64_t shift_accumulate(const std::int64_t* x, const std::int8_t* sign,
                              const std::uint8_t* shift, std::size_t n) {
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (sign[i] == 0) continue;
    // Left shift on the unsigned image keeps negative operands well defined.
    const auto shifted =
        static_cast<std::int64_t>(static_cast<std::uint64_t>(x[i]) << shift[i]);
    acc = sign[i] > 0 ? acc + shifted : acc - shifted;
  }
  return acc;
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, dot_f64, dot_f32, axpy_f64, dot_i32,
                                 shift_accumulate};
  return table;
}

}  // namespace autohls::simd
