// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace autohls::quant {

// Signed two's-complement fixed point with `total_bits` bits of which
// `integer_bits` (sign included) sit left of the binary point.
struct FixedPointFormat {
  int total_bits = 16;
  int integer_bits = 6;

  int frac_bits() const { return total_bits - integer_bits; }
  double step() const;
  std::int64_t raw_min() const;
  std::int64_t raw_max() const;
  double min_value() const;
  double max_value() const;
  // Throws ContractError unless 1 <= integer_bits <= total_bits <= 62.
  void validate() const;
  bool operator==(const FixedPointFormat&) const = default;
};

struct FixedValue {
  std::int64_t raw = 0;
  FixedPointFormat format;
  bool saturated = false;
};

// Round-to-nearest-even onto the format grid, saturating at the range bounds.
FixedValue to_fixed(double x, FixedPointFormat format);
double from_fixed(const FixedValue& v);

// Arithmetic right shift by `bits` with round-half-even.
std::int64_t round_shift_right(std::int64_t v, int bits);

struct ExponentRange {
  int lo = -10;
  int hi = 5;
};

struct PoTCode {
  int sign = 0;  // -1, 0, +1
  int exponent = 0;

  double value() const;
  bool operator==(const PoTCode&) const = default;
};

// s_hi * 2^u + s_lo * 2^v with v < u, or zero.
struct APoTCode {
  bool zero = true;
  int sign_hi = 1;
  int exp_hi = 0;  // u
  int sign_lo = 1;
  int exp_lo = 0;  // v

  double value() const;
  bool operator==(const APoTCode&) const = default;
};

// Nearest code; ties go to the smaller magnitude.
PoTCode pot_quantize(double w, ExponentRange range = {});
// Nearest code; ties go to the smaller magnitude, then to the smaller u.
APoTCode apot_quantize(double w, ExponentRange range = {});

enum class ArithmeticMode { MacFloat, MacFixed, PotFixed, ApotFixed };

ArithmeticMode parse_arithmetic_mode(std::string_view name);
std::string_view to_string(ArithmeticMode mode);

enum class KernelFamily { Mac, Pot, Apot };

// Kernel variant identifiers look like "MAC", "PoT16_6" or "APoT16_6": an
// arithmetic family optionally followed by <total>_<integer> fixed-point bits.
struct KernelVariantInfo {
  KernelFamily family = KernelFamily::Mac;
  std::optional<FixedPointFormat> format;

  bool multiplier_free() const { return family != KernelFamily::Mac && format.has_value(); }
};

KernelVariantInfo parse_kernel_variant(std::string_view name);

struct ConvSpec {
  std::size_t c_in = 100;
  std::size_t length = 7;  // window size L
  std::size_t c_out = 106;
  ArithmeticMode mode = ArithmeticMode::MacFloat;
  FixedPointFormat format;
  ExponentRange exponents;

  // Throws ContractError for PoT/APoT families without a fixed-point format.
  static ConvSpec for_variant(std::string_view variant, std::size_t c_in, std::size_t length,
                              std::size_t c_out);
};

struct OpCount {
  std::uint64_t multiplies = 0;
  std::uint64_t shifts = 0;
  std::uint64_t adds = 0;

  OpCount& operator+=(const OpCount& o);
  bool operator==(const OpCount&) const = default;
};

struct ConvResult {
  std::vector<double> output;  // length c_out
  OpCount ops;
  std::size_t saturated_outputs = 0;
};

// y[o] = sum_{c,l} W[o,c,l] * x[c,l] + b[o]. Weights are (c_out, c_in, L)
// row-major, input (c_in, L), bias (c_out). Zero weights are skipped.
ConvResult conv_forward(const ConvSpec& spec, std::span<const double> weights,
                        std::span<const double> bias, std::span<const double> input);

double kernel_mse(std::span<const double> reference, std::span<const double> test);

}  // namespace autohls::quant
