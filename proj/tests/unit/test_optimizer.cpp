#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "autohls/optimizer.hpp"
#include "doctest.h"

using namespace autohls;
using namespace autohls::opt;

namespace {

const std::vector<Direction> kMinMin{Direction::Minimize, Direction::Minimize};

std::vector<std::size_t> brute_front(const std::vector<std::vector<double>>& pts,
                                     const std::vector<Direction>& dirs) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool dominated = false;
    for (std::size_t j = 0; j < pts.size() && !dominated; ++j) {
      if (i == j) continue;
      bool all_le = true, any_lt = false;
      for (std::size_t k = 0; k < dirs.size(); ++k) {
        const double a = dirs[k] == Direction::Minimize ? pts[j][k] : -pts[j][k];
        const double b = dirs[k] == Direction::Minimize ? pts[i][k] : -pts[i][k];
        if (a > b) all_le = false;
        if (a < b) any_lt = true;
      }
      dominated = all_le && any_lt;
    }
    if (!dominated) out.push_back(i);
  }
  return out;
}

space::ParameterSpace line_space(std::int64_t hi) {
  space::ParameterSpace s;
  space::Dim d;
  d.name = "x";
  d.pragma = space::PragmaKind::Unroll;
  d.domain = space::IntegerRange{0, hi, 1};
  s.dims.push_back(d);
  s.kernel_variants = {"K"};
  return s;
}

Observation obs_of(std::int64_t x, std::optional<std::vector<double>> y) {
  Observation o;
  o.point.kernel = "K";
  o.point.params["x"] = x;
  o.objectives = std::move(y);
  return o;
}

TrialRecord completed(std::size_t index, std::int64_t lut, std::int64_t lat) {
  TrialRecord r;
  r.index = index;
  r.point.kernel = "K";
  r.point.params["x"] = static_cast<std::int64_t>(index);
  r.outcome = Outcome::Completed;
  QoR q;
  q.lut = lut;
  q.latency_cycles = lat;
  q.synth_seconds = 1.0;
  r.qor = q;
  return r;
}

}  // namespace

TEST_CASE("objective parsing") {
  const auto objs = parse_objectives("lut,latency_cycles");
  REQUIRE(objs.size() == 2);
  CHECK(objs[0] == Objective{"lut", Direction::Minimize});
  CHECK(parse_objectives("ff:max")[0].direction == Direction::Maximize);
  CHECK(format_objectives(parse_objectives("lut:min,ff:max")) == "lut:min,ff:max");
  CHECK_THROWS_AS(parse_objectives(""), ConfigError);
  CHECK_THROWS_AS(parse_objectives("lut,lut"), ConfigError);
  CHECK_THROWS_AS(parse_objectives("power"), ConfigError);
  CHECK_THROWS_AS(parse_objectives("lut:up"), ConfigError);
}

TEST_CASE("dominance examples") {
  const std::vector<double> a{100, 10}, b{110, 12}, c{100, 12}, d{110, 10};
  CHECK(dominates(a, b, kMinMin));
  CHECK(!dominates(b, a, kMinMin));
  CHECK(!dominates(a, a, kMinMin));
  CHECK(!dominates(c, d, kMinMin));
  CHECK(!dominates(d, c, kMinMin));
  const std::vector<Direction> max_min{Direction::Maximize, Direction::Minimize};
  CHECK(dominates(std::vector<double>{110, 10}, std::vector<double>{100, 10}, max_min));
  CHECK_THROWS_AS(dominates(std::vector<double>{1}, b, kMinMin), ContractError);
}

TEST_CASE("dominance is a strict partial order") {
  Rng rng(5);
  std::vector<std::vector<double>> v(40);
  for (auto& p : v) p = {std::floor(uniform01(rng) * 4), std::floor(uniform01(rng) * 4)};
  for (const auto& a : v) {
    CHECK(!dominates(a, a, kMinMin));
    for (const auto& b : v) {
      if (dominates(a, b, kMinMin)) CHECK(!dominates(b, a, kMinMin));
      for (const auto& c : v) {
        if (dominates(a, b, kMinMin) && dominates(b, c, kMinMin)) CHECK(dominates(a, c, kMinMin));
      }
    }
  }
}

TEST_CASE("pareto front examples") {
  std::vector<TrialRecord> t{completed(0, 1, 3), completed(1, 2, 2), completed(2, 3, 1),
                             completed(3, 3, 3)};
  const auto objs = parse_objectives("lut,latency_cycles");
  auto front = pareto_front(t, objs);
  REQUIRE(front.members.size() == 3);
  CHECK(front.members[0].index == 0);
  CHECK(front.members[2].index == 2);

  std::vector<TrialRecord> one{completed(0, 5, 5)};
  CHECK(pareto_front(one, objs).members.size() == 1);

  TrialRecord failed;
  failed.index = 4;
  failed.outcome = Outcome::Failed;
  t.push_back(failed);
  CHECK(pareto_front(t, objs).members.size() == 3);
  CHECK(pareto_front(std::vector<TrialRecord>{}, objs).members.empty());
}

TEST_CASE("pareto_indices equals brute force on random instances") {
  Rng rng(99);
  for (int inst = 0; inst < 100; ++inst) {
    const std::size_t n = 1 + uniform_index(rng, 500);
    const std::size_t m = 2 + uniform_index(rng, 2);
    std::vector<Direction> dirs(m);
    for (auto& d : dirs) d = uniform01(rng) < 0.5 ? Direction::Minimize : Direction::Maximize;
    std::vector<std::vector<double>> pts(n, std::vector<double>(m));
    for (auto& p : pts) {
      for (auto& x : p) x = std::floor(uniform01(rng) * 50);  // coarse grid forces ties
    }
    CHECK(pareto_indices(pts, dirs) == brute_front(pts, dirs));
  }
}

TEST_CASE("good_count ceiling and cap") {
  TpeConfig c;
  c.gamma_fraction = 0.2;
  CHECK(good_count(10, c) == 2);
  c.gamma_fraction = 0.1;
  CHECK(good_count(10, c) == 1);
  CHECK(good_count(11, c) == 2);
  CHECK(good_count(1000, c) == 25);
  CHECK(good_count(1, c) == 1);
}

TEST_CASE("split_good_bad on a single objective") {
  std::vector<Observation> h;
  for (int v = 100; v >= 1; --v) h.push_back(obs_of(v, std::vector<double>{static_cast<double>(v)}));
  TpeConfig c;
  const std::vector<Direction> dirs{Direction::Minimize};
  const auto split = split_good_bad(h, dirs, c, std::uint64_t{7});
  REQUIRE(split.good.size() == 10);
  CHECK(split.bad.size() == 90);
  std::vector<double> vals;
  for (const auto i : split.good) vals.push_back((*h[i].objectives)[0]);
  std::sort(vals.begin(), vals.end());
  for (int k = 0; k < 10; ++k) CHECK(vals[k] == k + 1);
}

TEST_CASE("split_good_bad with failures") {
  std::vector<Observation> h;
  for (int i = 0; i < 10; ++i) h.push_back(obs_of(i, std::nullopt));
  TpeConfig c;
  c.gamma_fraction = 0.2;
  auto split = split_good_bad(h, kMinMin, c, std::uint64_t{1});
  CHECK(split.good.size() == 2);
  CHECK(split.good.size() + split.bad.size() == 10);

  h[3] = obs_of(3, std::vector<double>{4.0, 4.0});
  split = split_good_bad(h, kMinMin, c, std::uint64_t{1});
  CHECK(std::find(split.good.begin(), split.good.end(), 3U) != split.good.end());
  CHECK_THROWS_AS(split_good_bad(std::vector<Observation>{}, kMinMin, c, std::uint64_t{1}), ContractError);
}

TEST_CASE("scalarize normalizes and ranks failures worst") {
  std::vector<Observation> h{obs_of(0, std::vector<double>{0.0, 10.0}),
                             obs_of(1, std::vector<double>{10.0, 20.0}),
                             obs_of(2, std::nullopt)};
  const std::vector<double> w{0.5, 0.5};
  const auto s = scalarize(h, kMinMin, w);
  CHECK(s[0] == doctest::Approx(0.0));
  CHECK(s[1] == doctest::Approx(1.0));
  CHECK(std::isinf(s[2]));
}

TEST_CASE("suggest startup, determinism and admissibility") {
  const auto s = line_space(200);
  TpeConfig c;
  Rng a(3), b(3);
  const std::vector<Direction> dirs{Direction::Minimize};
  CHECK(suggest(s, {}, dirs, c, a) == suggest(s, {}, dirs, c, b));

  std::vector<Observation> h;
  Rng r(11);
  for (int i = 0; i < 40; ++i) {
    const auto x = static_cast<std::int64_t>(uniform_index(r, 201));
    h.push_back(obs_of(x, std::vector<double>{static_cast<double>(x)}));
  }
  for (int seed = 0; seed < 50; ++seed) {
    Rng r1(seed), r2(seed);
    const auto p = suggest(s, h, dirs, c, r1);
    CHECK(p == suggest(s, h, dirs, c, r2));
    CHECK(space::validate_point(s, p).empty());
  }
}

TEST_CASE("suggest concentrates near good values") {
  const auto s = line_space(128);
  std::vector<Observation> h;
  for (int i = 0; i < 5; ++i) h.push_back(obs_of(8, std::vector<double>{1.0}));
  for (int i = 0; i < 45; ++i) h.push_back(obs_of(120, std::vector<double>{100.0}));
  TpeConfig c;
  c.gamma_fraction = 0.1;
  const std::vector<Direction> dirs{Direction::Minimize};
  int near = 0;
  for (int seed = 0; seed < 100; ++seed) {
    Rng rng(seed);
    const auto x = suggest(s, h, dirs, c, rng).at("x");
    if (std::abs(x - 8) < std::abs(x - 120)) ++near;
  }
  CHECK(near >= 90);
}

TEST_CASE("suggest keeps ordering pairs and gated dims admissible") {
  const auto s = space::parse_space(R"(
[kernel]
variants = ["A", "B"]
[[dim]]
name = "latency_min"
pragma = "latency"
type = "int"
lo = 0
hi = 50
[[dim]]
name = "latency_max"
pragma = "latency"
type = "int"
lo = 0
hi = 50
[[dim]]
name = "pipe"
pragma = "pipeline"
type = "flag"
[[dim]]
name = "ii"
pragma = "pipeline"
type = "int"
lo = 1
hi = 8
gated_by = "pipe"
)");
  std::vector<Observation> h;
  Rng r(2);
  for (int i = 0; i < 30; ++i) {
    Observation o;
    o.point = space::sample_random(s, r);
    o.objectives = std::vector<double>{uniform01(r)};
    h.push_back(o);
  }
  const std::vector<Direction> dirs{Direction::Minimize};
  for (int seed = 0; seed < 200; ++seed) {
    Rng rng(seed);
    CHECK(space::validate_point(s, suggest(s, h, dirs, TpeConfig{}, rng)).empty());
  }
}

TEST_CASE("tpe beats random search on a 1-D quadratic") {
  const auto s = line_space(1000);
  const auto f = [](std::int64_t x) { return std::pow(static_cast<double>(x - 637), 2); };
  const std::vector<Direction> dirs{Direction::Minimize};
  int wins = 0;
  for (int seed = 0; seed < 20; ++seed) {
    std::vector<Observation> h;
    Rng rng(1000 + seed);
    double best_tpe = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 50; ++t) {
      const auto p = suggest(s, h, dirs, TpeConfig{}, rng);
      const double y = f(p.at("x"));
      best_tpe = std::min(best_tpe, y);
      h.push_back(obs_of(p.at("x"), std::vector<double>{y}));
    }
    Rng rr(5000 + seed);
    double best_rand = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 50; ++t) best_rand = std::min(best_rand, f(space::sample_random(s, rr).at("x")));
    if (best_tpe <= best_rand) ++wins;
  }
  CHECK(wins >= 16);
}

TEST_CASE("tpe config validation") {
  TpeConfig c;
  CHECK_NOTHROW(c.validate());
  c.n_startup = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.gamma_fraction = 1.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.n_candidates = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}
