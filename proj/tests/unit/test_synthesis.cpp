#include <cmath>
#include <set>

#include "autohls/design_space.hpp"
#include "autohls/run_config.hpp"
#include "autohls/synthesis_backend.hpp"
#include "doctest.h"

using namespace autohls;
using namespace autohls::synth;

namespace {

space::DesignPoint make_point(std::string kernel, std::int64_t u, std::int64_t ii, std::int64_t lmin = 0,
                              std::int64_t lmax = 4096) {
  space::DesignPoint p;
  p.kernel = std::move(kernel);
  p.params = {{"unroll", u}, {"ii", ii}, {"latency_min", lmin}, {"latency_max", lmax}};
  return p;
}

std::int64_t ceil_div(std::int64_t a, std::int64_t b) { return (a + b - 1) / b; }

}  // namespace

TEST_CASE("closed-form example at U=1, II=1") {
  const SyntheticOracleConfig cfg;
  const auto p = make_point("MAC16_6", 1, 1);
  const auto m = evaluate_oracle(cfg, p);
  CHECK(m.work == 700);
  CHECK(m.lut == 500 + 120 + 4 * 700);
  CHECK(m.lut == 3420);
  CHECK(m.ff == 1000);
  CHECK(m.dsp == 1);
  CHECK(m.natural_latency == 700 + 64);
  const double h = point_hash(p, 0);
  CHECK(h >= 0.0);
  CHECK(h < 1.0);
  CHECK(m.synth_minutes == doctest::Approx(1.2 * 1.02 * 1.7 * (1 + 0.25 * h)).epsilon(1e-12));
}

TEST_CASE("oracle matches the formulas on random points") {
  SyntheticOracleConfig cfg;
  cfg.per_kernel["APoT16_6"] = {700.0, 900.0};
  const auto space = default_space();
  Rng rng(1);
  for (int i = 0; i < 500; ++i) {
    const auto p = space::sample_random(space, rng);
    const auto m = evaluate_oracle(cfg, p);
    const std::int64_t u = p.at("unroll"), ii = p.at("ii");
    const double lut0 = p.kernel == "APoT16_6" ? 700.0 : 500.0;
    const double ff0 = p.kernel == "APoT16_6" ? 900.0 : 800.0;
    const auto per_ii = ceil_div(700, ii);
    CHECK(m.lut == std::llround(lut0 + 120.0 * u + 4.0 * per_ii));
    CHECK(m.ff == std::llround(ff0 + 200.0 * u));
    CHECK(m.dsp == 0);  // both default kernels are multiplier-free
    const auto lat = ceil_div(700, u) * ii + 64;
    CHECK(m.natural_latency == lat);
    const double h = point_hash(p, cfg.seed);
    CHECK(m.synth_minutes ==
          doctest::Approx(1.2 * (1 + 0.02 * u) * (1 + per_ii / 1000.0) * (1 + 0.25 * h)).epsilon(1e-12));
    const auto out = synthetic_synthesize(cfg, p, 150.0);
    if (lat > p.at("latency_max")) {
      REQUIRE(!out.is_completed());
    } else if (m.synth_minutes * 60 > 150.0) {
      REQUIRE(!out.is_completed());
      CHECK(out.failure().reason == FailureReason::TimeBudgetExceeded);
    } else {
      REQUIRE(out.is_completed());
      CHECK(out.qor().latency_cycles == std::max(lat, p.at("latency_min")));
      CHECK(out.qor().synth_seconds == doctest::Approx(m.synth_minutes * 60));
    }
  }
}

TEST_CASE("latency window handling") {
  SyntheticOracleConfig cfg;
  cfg.jitter = 0;
  auto out = synthetic_synthesize(cfg, make_point("PoT16_6", 128, 1, 0, 4096), 1e6);
  REQUIRE(out.is_completed());
  CHECK(out.qor().latency_cycles == 6 * 1 + 64);  // ceil(700/128) = 6
  out = synthetic_synthesize(cfg, make_point("PoT16_6", 128, 1, 500, 4096), 1e6);
  REQUIRE(out.is_completed());
  CHECK(out.qor().latency_cycles == 500);
  out = synthetic_synthesize(cfg, make_point("PoT16_6", 1, 16, 0, 100), 1e6);
  REQUIRE(!out.is_completed());
  CHECK(out.failure().reason == FailureReason::ToolError);
  CHECK(out.failure().detail == "latency bound infeasible");
}

TEST_CASE("budget outcomes") {
  const SyntheticOracleConfig cfg;
  const auto small = make_point("PoT16_6", 1, 16, 0, 1 << 20);
  CHECK(synthetic_synthesize(cfg, small, 3600).is_completed());
  const auto zero = synthetic_synthesize(cfg, small, 0.0);
  REQUIRE(!zero.is_completed());
  CHECK(zero.failure().reason == FailureReason::TimeBudgetExceeded);
  CHECK(zero.elapsed_seconds() == 0.0);
  CHECK(failure_kind_name(FailureReason::ToolError) == "tool_error");
  CHECK(failure_kind_name(FailureReason::TimeBudgetExceeded) == "time_budget_exceeded");
}

TEST_CASE("monotone in unroll and in 1/II") {
  SyntheticOracleConfig cfg;
  cfg.jitter = 0;
  for (const std::string k : {"MAC16_6", "PoT16_6"}) {
    for (std::int64_t ii = 1; ii <= 16; ii += 3) {
      for (std::int64_t u = 1; u < 128; u += 7) {
        const auto a = evaluate_oracle(cfg, make_point(k, u, ii));
        const auto b = evaluate_oracle(cfg, make_point(k, u + 1, ii));
        CHECK(b.lut >= a.lut);
        CHECK(b.ff >= a.ff);
        CHECK(b.synth_minutes >= a.synth_minutes);
        const auto c = evaluate_oracle(cfg, make_point(k, u, ii + 1));
        CHECK(c.lut <= a.lut);
        CHECK(c.synth_minutes <= a.synth_minutes);
      }
    }
  }
}

TEST_CASE("dsp rule") {
  const SyntheticOracleConfig cfg;
  for (std::int64_t u = 1; u <= 128; ++u) {
    CHECK(evaluate_oracle(cfg, make_point("PoT16_6", u, 1)).dsp == 0);
    CHECK(evaluate_oracle(cfg, make_point("APoT16_6", u, 1)).dsp == 0);
    CHECK(evaluate_oracle(cfg, make_point("MAC16_6", u, 1)).dsp == std::max<std::int64_t>(1, ceil_div(u, 4)));
    CHECK(evaluate_oracle(cfg, make_point("PoT", u, 1)).dsp == std::max<std::int64_t>(1, ceil_div(u, 4)));
  }
}

TEST_CASE("failure fraction at a 150 s budget") {
  const SyntheticOracleConfig cfg;
  const auto space = default_space();
  Rng rng(42);
  int failed = 0;
  for (int i = 0; i < 500; ++i) failed += !synthetic_synthesize(cfg, space::sample_random(space, rng), 150).is_completed();
  const double frac = failed / 500.0;
  CHECK(frac >= 0.60);
  CHECK(frac <= 0.98);
}

TEST_CASE("determinism and hash sensitivity") {
  const SyntheticOracleConfig cfg;
  const auto p = make_point("PoT16_6", 9, 3);
  CHECK(synthetic_synthesize(cfg, p, 150) == synthetic_synthesize(cfg, p, 150));
  CHECK(canonical_text(p) == "PoT16_6;ii=3;latency_max=4096;latency_min=0;unroll=9");
  CHECK(point_hash(p, 0) != point_hash(p, 1));
  std::set<double> seen;
  for (std::int64_t u = 1; u <= 50; ++u) seen.insert(point_hash(make_point("PoT16_6", u, 1), 0));
  CHECK(seen.size() == 50);
}

TEST_CASE("oracle backend and ground truth agree") {
  SyntheticOracle oracle{SyntheticOracleConfig{}};
  const auto p = make_point("APoT16_6", 4, 8);
  const auto live = oracle.synthesize(p, 150);
  const auto truth = oracle.ground_truth(p, 150);
  REQUIRE(truth.has_value());
  CHECK(*truth == live);
  CHECK(oracle.name() == "synthetic");
}

TEST_CASE("functional profile ordering and op accounting") {
  const auto mac = profile_kernel("MAC16_6", 100, 7, 106, 0);
  const auto pot = profile_kernel("PoT16_6", 100, 7, 106, 0);
  const auto apot = profile_kernel("APoT16_6", 100, 7, 106, 0);
  CHECK(mac.mse < apot.mse);
  CHECK(apot.mse < pot.mse);
  CHECK(mac.ops.multiplies > 0);
  CHECK(pot.ops.multiplies == 0);
  CHECK(apot.ops.multiplies == 0);
  CHECK(apot.ops.shifts > pot.ops.shifts);

  SyntheticOracleConfig cfg;
  cfg.functional_model = true;
  SyntheticOracle oracle(cfg);
  const auto out = oracle.synthesize(make_point("PoT16_6", 1, 16, 0, 1 << 20), 3600);
  REQUIRE(out.is_completed());
  REQUIRE(out.qor().mse.has_value());
  CHECK(*out.qor().mse == doctest::Approx(pot.mse).epsilon(1e-12));
  REQUIRE(out.ops().has_value());
  CHECK(out.ops()->multiplies == 0);
}

TEST_CASE("config validation") {
  SyntheticOracleConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.a = -1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.jitter = -0.1;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
}
