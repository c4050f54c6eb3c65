#include <cmath>
#include <limits>
#include <vector>

#include "autohls/common.hpp"
#include "autohls/kernel_transform.hpp"
#include "autohls/simd/kernels.hpp"
#include "doctest.h"

using namespace autohls;
using namespace autohls::quant;

namespace {

// Exhaustive nearest-code search with the documented tie policy.
PoTCode brute_pot(double w, ExponentRange r) {
  PoTCode best{0, 0};
  double best_err = std::fabs(w);
  for (int u = r.lo; u <= r.hi; ++u) {
    for (const int s : {1, -1}) {
      const double val = s * std::ldexp(1.0, u);
      const double err = std::fabs(w - val);
      if (err < best_err || (err == best_err && std::fabs(val) < std::fabs(best.value()))) {
        best = {s, u};
        best_err = err;
      }
    }
  }
  return best;
}

APoTCode brute_apot(double w, ExponentRange r) {
  APoTCode best;
  double best_err = std::fabs(w);
  for (int u = r.lo; u <= r.hi; ++u) {
    for (int v = r.lo; v < u; ++v) {
      for (const int s1 : {1, -1}) {
        for (const int s2 : {1, -1}) {
          const APoTCode c{false, s1, u, s2, v};
          const double err = std::fabs(w - c.value());
          const double mag = std::fabs(c.value());
          const double best_mag = std::fabs(best.value());
          if (err < best_err || (err == best_err && (mag < best_mag || (mag == best_mag && !best.zero &&
                                                                        u < best.exp_hi)))) {
            best = c;
            best_err = err;
          }
        }
      }
    }
  }
  return best;
}

double random_weight(Rng& rng) {
  const double e = -13.0 + 20.0 * uniform01(rng);
  const double s = uniform01(rng) < 0.5 ? -1.0 : 1.0;
  return s * std::exp2(e);
}

std::int64_t oracle_round_shift(std::int64_t v, int bits) {
  // Exact: v / 2^bits rounded half to even, via long double (|v| < 2^60).
  const long double q = static_cast<long double>(v) / std::ldexp(1.0L, bits);
  const long double fl = std::floor(q);
  const long double frac = q - fl;
  auto f = static_cast<std::int64_t>(fl);
  if (frac > 0.5L || (frac == 0.5L && (f % 2 != 0))) ++f;
  return f;
}

}  // namespace

TEST_CASE("fixed-point format arithmetic") {
  const FixedPointFormat f{16, 6};
  CHECK(f.frac_bits() == 10);
  CHECK(f.step() == std::ldexp(1.0, -10));
  CHECK(f.min_value() == -32.0);
  CHECK(f.max_value() == 32.0 - std::ldexp(1.0, -10));
  CHECK_THROWS_AS((FixedPointFormat{8, 0}.validate()), ContractError);
  CHECK_THROWS_AS((FixedPointFormat{8, 9}.validate()), ContractError);
  CHECK_NOTHROW((FixedPointFormat{1, 1}.validate()));
}

TEST_CASE("to_fixed rounds half to even and saturates") {
  const FixedPointFormat f{16, 6};
  const double q = f.step();
  CHECK(to_fixed(0.5 * q, f).raw == 0);
  CHECK(to_fixed(1.5 * q, f).raw == 2);
  CHECK(to_fixed(2.5 * q, f).raw == 2);
  CHECK(to_fixed(-1.5 * q, f).raw == -2);
  CHECK(to_fixed(1.2, f).raw == 1229);  // 1.2 * 1024 = 1228.8
  auto hi = to_fixed(100.0, f);
  CHECK(hi.saturated);
  CHECK(hi.raw == 32767);
  auto lo = to_fixed(-100.0, f);
  CHECK(lo.saturated);
  CHECK(lo.raw == -32768);
  CHECK(!to_fixed(-32.0, f).saturated);
  CHECK(from_fixed(to_fixed(3.25, f)) == 3.25);
}

TEST_CASE("round_shift_right matches an exact oracle") {
  CHECK(round_shift_right(5, 1) == 2);
  CHECK(round_shift_right(7, 1) == 4);
  CHECK(round_shift_right(-3, 1) == -2);
  CHECK(round_shift_right(-5, 1) == -2);
  CHECK(round_shift_right(9, 0) == 9);
  Rng rng(17);
  for (int i = 0; i < 5000; ++i) {
    const auto v = static_cast<std::int64_t>(uniform_index(rng, 1ULL << 40)) - (std::int64_t{1} << 39);
    const int bits = 1 + static_cast<int>(uniform_index(rng, 20));
    CHECK(round_shift_right(v, bits) == oracle_round_shift(v, bits));
  }
}

TEST_CASE("pot examples") {
  const ExponentRange r{-10, 10};
  CHECK(pot_quantize(-2.0, r) == PoTCode{-1, 1});
  CHECK(pot_quantize(0.0, r) == PoTCode{0, 0});
  CHECK(pot_quantize(3.5, r) == PoTCode{1, 2});
  CHECK(pot_quantize(3.0, r) == PoTCode{1, 1});  // tie 2 vs 4 goes to 2
  CHECK(pot_quantize(std::ldexp(1.0, -11), r) == PoTCode{0, 0});  // tie with 2^-10 goes to zero
  CHECK(pot_quantize(5000.0, r) == PoTCode{1, 10});
  CHECK_THROWS_AS(pot_quantize(NAN, r), ContractError);
}

TEST_CASE("apot examples") {
  const ExponentRange r{-10, 10};
  const auto c = apot_quantize(3.0, r);  // 2 + 1 and 4 - 1 tie; smaller u wins
  CHECK(c.value() == 3.0);
  CHECK(c.exp_hi == 1);
  CHECK(apot_quantize(0.0, r).zero);
  CHECK(apot_quantize(-5.0, r).value() == -5.0);
  const auto e = apot_quantize(0.3, r);
  CHECK(e.exp_lo < e.exp_hi);
  CHECK(std::fabs(0.3 - e.value()) <= std::fabs(0.3 - pot_quantize(0.3, r).value()));
}

TEST_CASE("quantizers agree with brute-force enumeration") {
  Rng rng(123);
  const ExponentRange ranges[] = {{-10, 5}, {-4, 4}, {0, 0}, {-2, 1}};
  for (const auto r : ranges) {
    for (int i = 0; i < 2500; ++i) {
      const double w = random_weight(rng);
      CHECK(pot_quantize(w, r) == brute_pot(w, r));
      const auto fast = apot_quantize(w, r);
      const auto slow = brute_apot(w, r);
      CHECK(std::fabs(w - fast.value()) == std::fabs(w - slow.value()));
      CHECK(fast.value() == slow.value());
    }
  }
}

TEST_CASE("conv_forward float mode against a double oracle") {
  ConvSpec spec;
  spec.c_in = 5;
  spec.length = 3;
  spec.c_out = 4;
  Rng rng(8);
  const std::size_t taps = 15;
  std::vector<double> w(spec.c_out * taps), x(taps), b(spec.c_out);
  for (auto& v : w) v = 2 * uniform01(rng) - 1;
  for (auto& v : x) v = 2 * uniform01(rng) - 1;
  for (auto& v : b) v = 2 * uniform01(rng) - 1;
  w[0] = 0.0;
  const auto res = conv_forward(spec, w, b, x);
  for (std::size_t o = 0; o < spec.c_out; ++o) {
    double want = b[o];
    for (std::size_t i = 0; i < taps; ++i) want += w[o * taps + i] * x[i];
    CHECK(res.output[o] == doctest::Approx(want).epsilon(1e-5));
  }
  CHECK(res.ops.multiplies == spec.c_out * taps - 1);
  CHECK(res.ops.shifts == 0);
}

TEST_CASE("fixed and shift-add modes against exact integer oracles") {
  const FixedPointFormat f{16, 6};
  Rng rng(21);
  const std::size_t c_in = 7, len = 3, c_out = 5, taps = c_in * len;
  std::vector<double> w(c_out * taps), x(taps), b(c_out);
  for (auto& v : w) v = (2 * uniform01(rng) - 1) * 0.5;
  for (auto& v : x) v = 2 * uniform01(rng) - 1;
  for (auto& v : b) v = 2 * uniform01(rng) - 1;

  for (const auto mode : {ArithmeticMode::MacFixed, ArithmeticMode::PotFixed, ArithmeticMode::ApotFixed}) {
    ConvSpec spec;
    spec.c_in = c_in;
    spec.length = len;
    spec.c_out = c_out;
    spec.mode = mode;
    spec.format = f;
    const auto res = conv_forward(spec, w, b, x);
    for (std::size_t o = 0; o < c_out; ++o) {
      // Exact real-valued sum of the quantized terms, then one rounding.
      long double acc = from_fixed(to_fixed(b[o], f));
      for (std::size_t i = 0; i < taps; ++i) {
        const double xi = from_fixed(to_fixed(x[i], f));
        double wi = 0;
        if (mode == ArithmeticMode::MacFixed) wi = from_fixed(to_fixed(w[o * taps + i], f));
        if (mode == ArithmeticMode::PotFixed) wi = pot_quantize(w[o * taps + i]).value();
        if (mode == ArithmeticMode::ApotFixed) wi = apot_quantize(w[o * taps + i]).value();
        acc += static_cast<long double>(wi) * xi;
      }
      const long double scaled = acc * 1024.0L;
      const auto raw = oracle_round_shift(static_cast<std::int64_t>(std::llround(scaled * 1048576.0L)), 20);
      CHECK(res.output[o] == std::ldexp(static_cast<double>(raw), -10));
    }
    if (mode != ArithmeticMode::MacFixed) {
      CHECK(res.ops.multiplies == 0);
      CHECK(res.ops.shifts > 0);
    } else {
      CHECK(res.ops.multiplies > 0);
    }
  }
}

TEST_CASE("conv_forward is identical under every kernel table") {
  // AUTOHLS_ISA is read once, so compare through the function table directly.
  const auto& ref = simd::scalar_kernels();
  const auto& act = simd::active();
  Rng rng(4);
  std::vector<std::int64_t> x(700);
  std::vector<std::int8_t> s(700);
  std::vector<std::uint8_t> sh(700);
  for (std::size_t i = 0; i < 700; ++i) {
    x[i] = static_cast<std::int64_t>(uniform_index(rng, 65536)) - 32768;
    s[i] = static_cast<std::int8_t>(static_cast<int>(uniform_index(rng, 3)) - 1);
    sh[i] = static_cast<std::uint8_t>(uniform_index(rng, 16));
  }
  CHECK(ref.shift_accumulate(x.data(), s.data(), sh.data(), 700) ==
        act.shift_accumulate(x.data(), s.data(), sh.data(), 700));
}

TEST_CASE("kernel variant parsing") {
  CHECK(parse_kernel_variant("MAC").family == KernelFamily::Mac);
  CHECK(!parse_kernel_variant("MAC").multiplier_free());
  CHECK(!parse_kernel_variant("MAC16_6").multiplier_free());
  CHECK(parse_kernel_variant("PoT16_6").multiplier_free());
  CHECK(parse_kernel_variant("APoT16_6").family == KernelFamily::Apot);
  CHECK(*parse_kernel_variant("APoT16_6").format == FixedPointFormat{16, 6});
  CHECK(!parse_kernel_variant("PoT").multiplier_free());
  CHECK_THROWS_AS(parse_kernel_variant("XYZ"), ConfigError);
  CHECK_THROWS_AS(parse_kernel_variant("PoT16"), ConfigError);
  CHECK_THROWS_AS(parse_kernel_variant("PoT16_x"), ConfigError);
  CHECK_THROWS_AS(ConvSpec::for_variant("PoT", 1, 1, 1), ContractError);
  CHECK(ConvSpec::for_variant("MAC16_6", 1, 1, 1).mode == ArithmeticMode::MacFixed);
  CHECK(parse_arithmetic_mode("apot_fixed") == ArithmeticMode::ApotFixed);
  CHECK_THROWS_AS(parse_arithmetic_mode("fp8"), ConfigError);
}

TEST_CASE("shape errors") {
  ConvSpec spec;
  spec.c_in = 2;
  spec.length = 2;
  spec.c_out = 1;
  std::vector<double> w(3), b(1), x(4);
  CHECK_THROWS_AS(conv_forward(spec, w, b, x), ContractError);
  spec.c_out = 0;
  CHECK_THROWS_AS(conv_forward(spec, w, b, x), ContractError);
  CHECK_THROWS_AS(kernel_mse(std::vector<double>{1.0}, std::vector<double>{}), ContractError);
  CHECK(kernel_mse(std::vector<double>{1.0, 3.0}, std::vector<double>{0.0, 1.0}) == 2.5);
}
