// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace autohls::simd {

enum class Isa { Scalar, Avx2 };

std::string_view isa_name(Isa isa);

// Flat function table. Every entry has a scalar reference implementation;
// vector variants must agree with it exactly for the integer kernels and to
// rounding for the floating-point ones.
struct KernelTable {
  Isa isa;
  double (*dot_f64)(const double* a, const double* b, std::size_t n);
  float (*dot_f32)(const float* a, const float* b, std::size_t n);
  // y[i] += alpha * x[i]
  void (*axpy_f64)(double alpha, const double* x, double* y, std::size_t n);
  // sum a[i] * b[i], exact in 64-bit
  std::int64_t (*dot_i32)(const std::int32_t* a, const std::int32_t* b, std::size_t n);
  // sum sign[i] * (x[i] << shift[i]); sign in {-1, 0, 1}, shift in [0, 62].
  // Multiplier-free: realized with shifts, masks and adds only.
  std::int64_t (*shift_accumulate)(const std::int64_t* x, const std::int8_t* sign,
                                   const std::uint8_t* shift, std::size_t n);
};

const KernelTable& scalar_kernels();
bool isa_supported(Isa isa);
// Table for a specific ISA; throws std::runtime_error when unsupported.
const KernelTable& kernels_for(Isa isa);

// Best supported table, chosen once per process. The AUTOHLS_ISA environment
// variable ("scalar" or "avx2") overrides the choice.
const KernelTable& active();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot_f64(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy_f64(alpha, x.data(), y.data(), x.size());
}

namespace detail {
#if defined(AUTOHLS_HAVE_AVX2_TU)
const KernelTable& avx2_kernels();
#endif
}  // namespace detail

}  // namespace autohls::simd
