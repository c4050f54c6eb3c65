// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/kernel_transform.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "autohls/common.hpp"
#include "autohls/simd/kernels.hpp"

namespace autohls::quant {

double FixedPointFormat::step() const { return std::ldexp(1.0, -frac_bits()); }
std::int64_t FixedPointFormat::raw_min() const { return -(std::int64_t{1} << (total_bits - 1)); }
std::int64_t FixedPointFormat::raw_max() const { return (std::int64_t{1} << (total_bits - 1)) - 1; }
double FixedPointFormat::min_value() const { return std::ldexp(static_cast<double>(raw_min()), -frac_bits()); }
double FixedPointFormat::max_value() const { return std::ldexp(static_cast<double>(raw_max()), -frac_bits()); }

void FixedPointFormat::validate() const {
  if (integer_bits < 1 || integer_bits > total_bits || total_bits > 62) {
    throw ContractError("invalid fixed-point format <" + std::to_string(total_bits) + "," +
                        std::to_string(integer_bits) + ">");
  }
}

FixedValue to_fixed(double x, FixedPointFormat format) {
  format.validate();
  FixedValue v{0, format, false};
  if (std::isnan(x)) {
    v.saturated = true;
    return v;
  }
  // nearbyint honours the default round-to-nearest-even mode.
  const double scaled = std::nearbyint(std::ldexp(x, format.frac_bits()));
  if (scaled > static_cast<double>(format.raw_max())) {
    v.raw = format.raw_max();
    v.saturated = true;
  } else if (scaled < static_cast<double>(format.raw_min())) {
    v.raw = format.raw_min();
    v.saturated = true;
  } else {
    v.raw = static_cast<std::int64_t>(scaled);
  }
  return v;
}

double from_fixed(const FixedValue& v) {
  return std::ldexp(static_cast<double>(v.raw), -v.format.frac_bits());
}

std::int64_t round_shift_right(std::int64_t v, int bits) {
  if (bits <= 0) return v;
  const std::int64_t floor = v >> bits;  // arithmetic shift
  const std::int64_t rem = v - (floor << bits);
  const std::int64_t half = std::int64_t{1} << (bits - 1);
  if (rem > half || (rem == half && (floor & 1) != 0)) return floor + 1;
  return floor;
}

double PoTCode::value() const { return sign == 0 ? 0.0 : sign * std::ldexp(1.0, exponent); }

double APoTCode::value() const {
  if (zero) return 0.0;
  return sign_hi * std::ldexp(1.0, exp_hi) + sign_lo * std::ldexp(1.0, exp_lo);
}

namespace {

// floor(log2(a)) for finite a > 0.
int floor_log2(double a) {
  int e = 0;
  std::frexp(a, &e);  // a = m * 2^e, m in [0.5, 1)
  return e - 1;
}

void check_range(const ExponentRange& r) {
  if (r.lo > r.hi) throw ContractError("exponent range lo > hi");
}

}  // namespace

PoTCode pot_quantize(double w, ExponentRange range) {
  check_range(range);
  if (!std::isfinite(w)) throw ContractError("pot_quantize: non-finite weight");
  const double a = std::fabs(w);
  PoTCode best{0, 0};
  double best_err = a;
  double best_mag = 0.0;
  if (a == 0.0) return best;
  const int e = floor_log2(a);
  for (const int cand : {e, e + 1}) {
    const int u = std::clamp(cand, range.lo, range.hi);
    const double mag = std::ldexp(1.0, u);
    const double err = std::fabs(a - mag);
    if (err < best_err || (err == best_err && mag < best_mag)) {
      best = {1, u};
      best_err = err;
      best_mag = mag;
    }
  }
  if (w < 0 && best.sign != 0) best.sign = -1;
  return best;
}

APoTCode apot_quantize(double w, ExponentRange range) {
  check_range(range);
  if (!std::isfinite(w)) throw ContractError("apot_quantize: non-finite weight");
  const double a = std::fabs(w);
  APoTCode best;  // zero
  double best_err = a;
  double best_mag = 0.0;
  if (a == 0.0 || range.hi == range.lo) return best;
  // For a fixed leading exponent u, the best trailing term brackets the
  // residual a - 2^u; scanning u is linear in the exponent range.
  for (int u = range.lo + 1; u <= range.hi; ++u) {
    const double lead = std::ldexp(1.0, u);
    const double r = a - lead;
    const int e = r == 0.0 ? range.lo : floor_log2(std::fabs(r));
    for (const int cand : {e, e + 1}) {
      const int v = std::clamp(cand, range.lo, u - 1);
      for (const int s : {1, -1}) {
        const double mag = lead + s * std::ldexp(1.0, v);
        const double err = std::fabs(a - mag);
        const bool better = err < best_err || (err == best_err && mag < best_mag);
        if (better) {
          best = APoTCode{false, 1, u, s, v};
          best_err = err;
          best_mag = mag;
        }
      }
    }
  }
  if (w < 0 && !best.zero) {
    best.sign_hi = -best.sign_hi;
    best.sign_lo = -best.sign_lo;
  }
  return best;
}

ArithmeticMode parse_arithmetic_mode(std::string_view name) {
  if (name == "mac_float") return ArithmeticMode::MacFloat;
  if (name == "mac_fixed") return ArithmeticMode::MacFixed;
  if (name == "pot_fixed") return ArithmeticMode::PotFixed;
  if (name == "apot_fixed") return ArithmeticMode::ApotFixed;
  throw ConfigError("unknown arithmetic mode '" + std::string(name) + "'");
}

std::string_view to_string(ArithmeticMode mode) {
  switch (mode) {
    case ArithmeticMode::MacFloat: return "mac_float";
    case ArithmeticMode::MacFixed: return "mac_fixed";
    case ArithmeticMode::PotFixed: return "pot_fixed";
    case ArithmeticMode::ApotFixed: return "apot_fixed";
  }
  return "?";
}

KernelVariantInfo parse_kernel_variant(std::string_view name) {
  KernelVariantInfo info;
  std::string_view rest;
  if (name.starts_with("APoT")) {
    info.family = KernelFamily::Apot;
    rest = name.substr(4);
  } else if (name.starts_with("PoT")) {
    info.family = KernelFamily::Pot;
    rest = name.substr(3);
  } else if (name.starts_with("MAC")) {
    info.family = KernelFamily::Mac;
    rest = name.substr(3);
  } else {
    throw ConfigError("unrecognized kernel variant '" + std::string(name) + "'");
  }
  if (rest.empty()) return info;
  const auto sep = rest.find('_');
  try {
    if (sep == std::string_view::npos) throw std::invalid_argument("no separator");
    std::size_t used = 0;
    const std::string total(rest.substr(0, sep));
    const std::string integer(rest.substr(sep + 1));
    FixedPointFormat f{std::stoi(total, &used), 0};
    if (used != total.size()) throw std::invalid_argument("trailing");
    f.integer_bits = std::stoi(integer, &used);
    if (used != integer.size()) throw std::invalid_argument("trailing");
    f.validate();
    info.format = f;
  } catch (const std::exception&) {
    throw ConfigError("malformed fixed-point suffix in kernel variant '" + std::string(name) + "'");
  }
  return info;
}

ConvSpec ConvSpec::for_variant(std::string_view variant, std::size_t c_in, std::size_t length,
                               std::size_t c_out) {
  const auto info = parse_kernel_variant(variant);
  ConvSpec spec;
  spec.c_in = c_in;
  spec.length = length;
  spec.c_out = c_out;
  if (info.format) spec.format = *info.format;
  switch (info.family) {
    case KernelFamily::Mac:
      spec.mode = info.format ? ArithmeticMode::MacFixed : ArithmeticMode::MacFloat;
      break;
    case KernelFamily::Pot:
    case KernelFamily::Apot:
      if (!info.format) {
        throw ContractError("conv model needs a fixed-point format for " + std::string(variant));
      }
      spec.mode = info.family == KernelFamily::Pot ? ArithmeticMode::PotFixed
                                                   : ArithmeticMode::ApotFixed;
      break;
  }
  return spec;
}

OpCount& OpCount::operator+=(const OpCount& o) {
  multiplies += o.multiplies;
  shifts += o.shifts;
  adds += o.adds;
  return *this;
}

namespace {

// Saturate a raw accumulator into the output format.
std::int64_t saturate(std::int64_t raw, const FixedPointFormat& f, bool& hit) {
  if (raw > f.raw_max()) {
    hit = true;
    return f.raw_max();
  }
  if (raw < f.raw_min()) {
    hit = true;
    return f.raw_min();
  }
  return raw;
}

}  // namespace

ConvResult conv_forward(const ConvSpec& spec, std::span<const double> weights,
                        std::span<const double> bias, std::span<const double> input) {
  if (spec.c_in == 0 || spec.length == 0 || spec.c_out == 0) {
    throw ContractError("conv_forward: channel counts and window must be >= 1");
  }
  const std::size_t taps = spec.c_in * spec.length;
  if (weights.size() != spec.c_out * taps || input.size() != taps || bias.size() != spec.c_out) {
    throw ContractError("conv_forward: shape mismatch (weights " + std::to_string(weights.size()) +
                        ", input " + std::to_string(input.size()) + ", bias " +
                        std::to_string(bias.size()) + ")");
  }
  const auto& k = simd::active();
  ConvResult result;
  result.output.resize(spec.c_out);

  if (spec.mode == ArithmeticMode::MacFloat) {
    std::vector<float> x(input.begin(), input.end());
    std::vector<float> row(taps);
    for (std::size_t o = 0; o < spec.c_out; ++o) {
      std::uint64_t nonzero = 0;
      for (std::size_t i = 0; i < taps; ++i) {
        row[i] = static_cast<float>(weights[o * taps + i]);
        nonzero += row[i] != 0.0f;
      }
      const float acc = k.dot_f32(row.data(), x.data(), taps) + static_cast<float>(bias[o]);
      result.output[o] = acc;
      result.ops.multiplies += nonzero;
      result.ops.adds += nonzero + 1;
    }
    return result;
  }

  const FixedPointFormat& f = spec.format;
  f.validate();
  const int frac = f.frac_bits();

  if (spec.mode == ArithmeticMode::MacFixed) {
    if (f.total_bits > 32) throw ContractError("mac_fixed supports at most 32-bit formats");
    std::vector<std::int32_t> x(taps);
    for (std::size_t i = 0; i < taps; ++i) x[i] = static_cast<std::int32_t>(to_fixed(input[i], f).raw);
    std::vector<std::int32_t> row(taps);
    for (std::size_t o = 0; o < spec.c_out; ++o) {
      std::uint64_t nonzero = 0;
      for (std::size_t i = 0; i < taps; ++i) {
        row[i] = static_cast<std::int32_t>(to_fixed(weights[o * taps + i], f).raw);
        nonzero += row[i] != 0;
      }
      // Products carry 2F fractional bits.
      std::int64_t acc = k.dot_i32(row.data(), x.data(), taps);
      acc += to_fixed(bias[o], f).raw << frac;
      bool hit = false;
      const auto raw = saturate(round_shift_right(acc, frac), f, hit);
      result.saturated_outputs += hit;
      result.output[o] = from_fixed({raw, f, hit});
      result.ops.multiplies += nonzero;
      result.ops.adds += nonzero + 1;
    }
    return result;
  }

  // Shift-add modes: terms accumulate with `guard` extra fractional bits so
  // that every exponent down to exponents.lo becomes a left shift.
  const int guard = std::max(0, -spec.exponents.lo);
  if (spec.exponents.hi + guard > 62 - f.total_bits) {
    throw ContractError("exponent range too wide for 64-bit shift accumulation");
  }
  std::vector<std::int64_t> x(taps);
  for (std::size_t i = 0; i < taps; ++i) x[i] = to_fixed(input[i], f).raw;
  const bool two_terms = spec.mode == ArithmeticMode::ApotFixed;
  std::vector<std::int8_t> sign_hi(taps), sign_lo(taps);
  std::vector<std::uint8_t> shift_hi(taps), shift_lo(taps);
  for (std::size_t o = 0; o < spec.c_out; ++o) {
    std::uint64_t nonzero = 0;
    for (std::size_t i = 0; i < taps; ++i) {
      const double w = weights[o * taps + i];
      if (two_terms) {
        const auto code = apot_quantize(w, spec.exponents);
        sign_hi[i] = static_cast<std::int8_t>(code.zero ? 0 : code.sign_hi);
        sign_lo[i] = static_cast<std::int8_t>(code.zero ? 0 : code.sign_lo);
        shift_hi[i] = static_cast<std::uint8_t>(code.zero ? 0 : code.exp_hi + guard);
        shift_lo[i] = static_cast<std::uint8_t>(code.zero ? 0 : code.exp_lo + guard);
        nonzero += !code.zero;
      } else {
        const auto code = pot_quantize(w, spec.exponents);
        sign_hi[i] = static_cast<std::int8_t>(code.sign);
        shift_hi[i] = static_cast<std::uint8_t>(code.sign == 0 ? 0 : code.exponent + guard);
        nonzero += code.sign != 0;
      }
    }
    std::int64_t acc = k.shift_accumulate(x.data(), sign_hi.data(), shift_hi.data(), taps);
    if (two_terms) acc += k.shift_accumulate(x.data(), sign_lo.data(), shift_lo.data(), taps);
    acc += to_fixed(bias[o], f).raw << guard;
    bool hit = false;
    const auto raw = saturate(round_shift_right(acc, guard), f, hit);
    result.saturated_outputs += hit;
    result.output[o] = from_fixed({raw, f, hit});
    const std::uint64_t per_weight = two_terms ? 2 : 1;
    result.ops.shifts += per_weight * nonzero;
    result.ops.adds += per_weight * nonzero + 1;
  }
  return result;
}

double kernel_mse(std::span<const double> reference, std::span<const double> test) {
  if (reference.size() != test.size()) {
    throw ContractError("kernel_mse: shape mismatch (" + std::to_string(reference.size()) + " vs " +
                        std::to_string(test.size()) + ")");
  }
  if (reference.empty()) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < reference.size(); ++i) {
    const double d = reference[i] - test[i];
    acc += d * d;
  }
  return acc / static_cast<double>(reference.size());
}

}  // namespace autohls::quant
