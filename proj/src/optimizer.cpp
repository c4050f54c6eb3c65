// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace autohls::opt {

std::vector<Objective> parse_objectives(std::string_view list) {
  std::vector<Objective> out;
  std::stringstream ss{std::string(list)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    Objective o;
    const auto colon = item.find(':');
    o.name = item.substr(0, colon);
    if (colon != std::string::npos) {
      const auto dir = item.substr(colon + 1);
      if (dir == "min") {
        o.direction = Direction::Minimize;
      } else if (dir == "max") {
        o.direction = Direction::Maximize;
      } else {
        throw ConfigError("objective '" + o.name + "': direction must be min or max");
      }
    }
    if (!is_qor_field(o.name)) throw ConfigError("unknown objective name '" + o.name + "'");
    for (const auto& prev : out) {
      if (prev.name == o.name) throw ConfigError("duplicate objective '" + o.name + "'");
    }
    out.push_back(o);
  }
  if (out.empty()) throw ConfigError("objective list is empty");
  return out;
}

std::string format_objectives(std::span<const Objective> objectives) {
  std::string s;
  for (const auto& o : objectives) {
    if (!s.empty()) s += ',';
    s += o.name;
    s += o.direction == Direction::Minimize ? ":min" : ":max";
  }
  return s;
}

std::vector<Direction> directions_of(std::span<const Objective> objectives) {
  std::vector<Direction> d;
  for (const auto& o : objectives) d.push_back(o.direction);
  return d;
}

std::vector<double> objective_vector(const QoR& qor, std::span<const Objective> objectives) {
  std::vector<double> v;
  v.reserve(objectives.size());
  for (const auto& o : objectives) v.push_back(qor_value(qor, o.name));
  return v;
}

bool dominates(std::span<const double> a, std::span<const double> b,
               std::span<const Direction> directions) {
  if (a.size() != b.size() || a.size() != directions.size()) {
    throw ContractError("dominates: vector length mismatch");
  }
  bool strict = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double x = directions[i] == Direction::Maximize ? -a[i] : a[i];
    const double y = directions[i] == Direction::Maximize ? -b[i] : b[i];
    if (x > y) return false;
    if (x < y) strict = true;
  }
  return strict;
}

std::vector<std::size_t> pareto_indices(std::span<const std::vector<double>> points,
                                        std::span<const Direction> directions) {
  // After a lexicographic sort on the normalized vectors a dominator always
  // precedes the points it dominates, and checking against the running front
  // suffices because dominance is transitive.
  std::vector<std::size_t> order(points.size());
  std::iota(order.begin(), order.end(), 0);
  auto key = [&](std::size_t i, std::size_t k) {
    return directions[k] == Direction::Maximize ? -points[i][k] : points[i][k];
  };
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    for (std::size_t k = 0; k < directions.size(); ++k) {
      if (key(a, k) != key(b, k)) return key(a, k) < key(b, k);
    }
    return false;
  });
  std::vector<std::size_t> front;
  for (const auto i : order) {
    const bool dominated = std::any_of(front.begin(), front.end(), [&](std::size_t j) {
      return dominates(points[j], points[i], directions);
    });
    if (!dominated) front.push_back(i);
  }
  std::sort(front.begin(), front.end());
  return front;
}

ParetoFront pareto_front(std::span<const TrialRecord> trials, std::span<const Objective> objectives) {
  std::vector<std::vector<double>> points;
  std::vector<std::size_t> owners;
  for (std::size_t i = 0; i < trials.size(); ++i) {
    if (trials[i].outcome != Outcome::Completed || !trials[i].qor) continue;
    points.push_back(objective_vector(*trials[i].qor, objectives));
    owners.push_back(i);
  }
  ParetoFront front;
  front.objectives.assign(objectives.begin(), objectives.end());
  const auto dirs = directions_of(objectives);
  for (const auto k : pareto_indices(points, dirs)) front.members.push_back(trials[owners[k]]);
  return front;
}

void TpeConfig::validate() const {
  if (n_startup < 1) throw ConfigError("tpe.n_startup must be >= 1");
  if (n_candidates < 1) throw ConfigError("tpe.n_candidates must be >= 1");
  if (!(gamma_fraction > 0.0 && gamma_fraction < 1.0)) {
    throw ConfigError("tpe.gamma_fraction must lie in (0, 1)");
  }
  if (gamma_cap < 1) throw ConfigError("tpe.gamma_cap must be >= 1");
  if (!(bandwidth_floor > 0.0) || !(prior_weight >= 0.0)) {
    throw ConfigError("tpe.bandwidth_floor must be > 0 and tpe.prior_weight >= 0");
  }
}

std::vector<Observation> observations(std::span<const TrialRecord> trials,
                                      std::span<const Objective> objectives) {
  std::vector<Observation> obs;
  obs.reserve(trials.size());
  for (const auto& t : trials) {
    if (t.outcome == Outcome::Pending) continue;
    Observation o{t.point, std::nullopt};
    if (t.outcome == Outcome::Completed && t.qor) o.objectives = objective_vector(*t.qor, objectives);
    obs.push_back(std::move(o));
  }
  return obs;
}

std::size_t good_count(std::size_t n, const TpeConfig& config) {
  const double raw = std::min(config.gamma_fraction * static_cast<double>(n),
                              static_cast<double>(config.gamma_cap));
  // Guard against 0.1 * 10 landing a hair above 1.
  const auto count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(count, 1, n);
}

std::vector<double> scalarize(std::span<const Observation> history,
                              std::span<const Direction> directions, std::span<const double> weights) {
  const std::size_t m = directions.size();
  std::vector<double> lo(m, std::numeric_limits<double>::infinity());
  std::vector<double> hi(m, -std::numeric_limits<double>::infinity());
  for (const auto& o : history) {
    if (!o.objectives) continue;
    if (o.objectives->size() != m) throw ContractError("observation objective count mismatch");
    for (std::size_t k = 0; k < m; ++k) {
      lo[k] = std::min(lo[k], (*o.objectives)[k]);
      hi[k] = std::max(hi[k], (*o.objectives)[k]);
    }
  }
  std::vector<double> s(history.size(), std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < history.size(); ++i) {
    if (!history[i].objectives) continue;
    double acc = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double span = hi[k] - lo[k];
      double z = span > 0.0 ? ((*history[i].objectives)[k] - lo[k]) / span : 0.0;
      if (directions[k] == Direction::Maximize) z = 1.0 - z;
      acc += weights[k] * z;
    }
    s[i] = acc;
  }
  return s;
}

Split split_good_bad(std::span<const Observation> history, std::span<const Direction> directions,
                     const TpeConfig& config, Rng& rng) {
  if (history.empty()) throw ContractError("split_good_bad: empty history");
  if (directions.empty()) throw ContractError("split_good_bad: no objectives");
  // Uniform draw from the weight simplex (normalized exponentials).
  std::vector<double> w(directions.size());
  double total = 0.0;
  for (auto& x : w) {
    x = -std::log(1.0 - uniform01(rng));
    total += x;
  }
  for (auto& x : w) x = total > 0.0 ? x / total : 1.0 / static_cast<double>(w.size());
  const auto s = scalarize(history, directions, w);

  // Ties (notably the shared worst value of failed trials) break in a seeded
  // random order, so an all-failed history does not keep favouring its
  // oldest entries.
  std::vector<std::uint64_t> tiebreak(history.size());
  for (auto& t : tiebreak) t = rng();
  std::vector<std::size_t> order(history.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (s[a] != s[b]) return s[a] < s[b];
    return tiebreak[a] != tiebreak[b] ? tiebreak[a] < tiebreak[b] : a < b;
  });
  const std::size_t n_good = good_count(history.size(), config);
  Split split;
  split.good.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_good));
  split.bad.assign(order.begin() + static_cast<std::ptrdiff_t>(n_good), order.end());
  std::sort(split.good.begin(), split.good.end());
  std::sort(split.bad.begin(), split.bad.end());
  return split;
}

Split split_good_bad(std::span<const Observation> history, std::span<const Direction> directions,
                     const TpeConfig& config, std::uint64_t scalarization_seed) {
  Rng rng(scalarization_seed);
  return split_good_bad(history, directions, config, rng);
}

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

double phi(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double standard_normal(Rng& rng) {
  // Box-Muller; one draw per call keeps the stream position simple.
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586 * u2);
}

// Mixture of truncated Gaussians on [0, 1] plus a uniform prior, evaluated as
// probability mass on K equal-width bins (one per grid value).
class BinnedParzen {
 public:
  BinnedParzen(std::vector<double> centers, std::size_t bins, const TpeConfig& cfg)
      : mu_(std::move(centers)), bins_(bins), prior_(cfg.prior_weight) {
    std::sort(mu_.begin(), mu_.end());
    sigma_.resize(mu_.size());
    for (std::size_t i = 0; i < mu_.size(); ++i) {
      const double left = mu_[i] - (i == 0 ? 0.0 : mu_[i - 1]);
      const double right = (i + 1 == mu_.size() ? 1.0 : mu_[i + 1]) - mu_[i];
      sigma_[i] = std::clamp(std::max(left, right), cfg.bandwidth_floor, 1.0);
    }
    // Repeated grid values give identical components; evaluate each once.
    for (std::size_t i = 0; i < mu_.size(); ++i) {
      if (!unique_.empty() && unique_.back().mu == mu_[i] && unique_.back().sigma == sigma_[i]) {
        unique_.back().weight += 1.0;
        continue;
      }
      const double norm = phi((1.0 - mu_[i]) / sigma_[i]) - phi(-mu_[i] / sigma_[i]);
      unique_.push_back({mu_[i], sigma_[i], 1.0, norm});
    }
    total_ = static_cast<double>(mu_.size()) + prior_;
    if (total_ <= 0.0) {
      prior_ = 1.0;
      total_ = 1.0;
    }
  }

  double log_mass(std::size_t bin) const {
    const double width = 1.0 / static_cast<double>(bins_);
    const double a = static_cast<double>(bin) * width;
    const double b = a + width;
    double m = prior_ * width;
    for (const auto& c : unique_) {
      // Beyond 8.5 sigma the bin mass is below double resolution of the sum.
      if (a - c.mu > kCutoff * c.sigma || c.mu - b > kCutoff * c.sigma) continue;
      const double p = phi((b - c.mu) / c.sigma) - phi((a - c.mu) / c.sigma);
      m += c.weight * std::max(p, 0.0) / c.norm;
    }
    return std::log(std::max(m / total_, std::numeric_limits<double>::min()));
  }

  std::size_t sample(Rng& rng) const {
    const double pick = uniform01(rng) * total_;
    const auto comp = static_cast<std::size_t>(pick);
    double z;
    if (pick >= static_cast<double>(mu_.size())) {
      z = uniform01(rng);
    } else {
      z = -1.0;
      for (int tries = 0; tries < 64 && (z < 0.0 || z >= 1.0); ++tries) {
        z = mu_[comp] + sigma_[comp] * standard_normal(rng);
      }
      if (z < 0.0 || z >= 1.0) z = std::clamp(mu_[comp], 0.0, std::nextafter(1.0, 0.0));
    }
    return std::min(bins_ - 1, static_cast<std::size_t>(z * static_cast<double>(bins_)));
  }

 private:
  struct Component {
    double mu;
    double sigma;
    double weight;
    double norm;
  };
  static constexpr double kCutoff = 8.5;

  std::vector<double> mu_;
  std::vector<double> sigma_;
  std::vector<Component> unique_;
  std::size_t bins_;
  double prior_;
  double total_ = 0.0;
};

// Add-one smoothed empirical frequencies.
class CategoricalParzen {
 public:
  CategoricalParzen(const std::vector<std::size_t>& values, std::size_t k) : p_(k, 1.0) {
    for (const auto v : values) p_[v] += 1.0;
    const double total = static_cast<double>(values.size() + k);
    for (auto& x : p_) x /= total;
  }
  double log_mass(std::size_t v) const { return std::log(p_[v]); }
  std::size_t sample(Rng& rng) const {
    double u = uniform01(rng);
    for (std::size_t i = 0; i < p_.size(); ++i) {
      if (u < p_[i]) return i;
      u -= p_[i];
    }
    return p_.size() - 1;
  }

 private:
  std::vector<double> p_;
};

struct DimModel {
  bool numeric = false;
  std::optional<BinnedParzen> num_good, num_bad;
  std::optional<CategoricalParzen> cat_good, cat_bad;

  double score(std::size_t idx) const {
    return numeric ? num_good->log_mass(idx) - num_bad->log_mass(idx)
                   : cat_good->log_mass(idx) - cat_bad->log_mass(idx);
  }
  std::size_t sample(Rng& rng) const { return numeric ? num_good->sample(rng) : cat_good->sample(rng); }
};

// Grid index of a stored value.
std::size_t value_index(const space::Dim& d, std::int64_t v) {
  if (const auto* r = std::get_if<space::IntegerRange>(&d.domain)) {
    return static_cast<std::size_t>((v - r->lo) / r->step);
  }
  return static_cast<std::size_t>(v);
}

std::int64_t index_value(const space::Dim& d, std::size_t idx) {
  if (const auto* r = std::get_if<space::IntegerRange>(&d.domain)) {
    return r->value_at(static_cast<std::int64_t>(idx));
  }
  return static_cast<std::int64_t>(idx);
}

}  // namespace

space::DesignPoint suggest(const space::ParameterSpace& space, std::span<const Observation> history,
                           std::span<const Direction> directions, const TpeConfig& config, Rng& rng) {
  config.validate();
  if (history.size() < config.n_startup) return space::sample_random(space, rng);

  const Split split = split_good_bad(history, directions, config, rng);

  auto kernel_indices = [&](const std::vector<std::size_t>& members) {
    std::vector<std::size_t> v;
    for (const auto i : members) {
      if (const auto k = space.kernel_index(history[i].point.kernel)) v.push_back(*k);
    }
    return v;
  };
  const std::size_t n_kernels = space.kernel_variants.size();
  const CategoricalParzen kernel_good(kernel_indices(split.good), n_kernels);
  const CategoricalParzen kernel_bad(kernel_indices(split.bad), n_kernels);

  std::vector<DimModel> models;
  models.reserve(space.dims.size());
  for (const auto& d : space.dims) {
    const auto k = static_cast<std::size_t>(d.cardinality());
    auto collect = [&](const std::vector<std::size_t>& members) {
      std::vector<std::size_t> idx;
      for (const auto i : members) {
        const auto& p = history[i].point;
        const auto it = p.params.find(d.name);
        if (it == p.params.end() || !space.is_active(p, d)) continue;
        idx.push_back(std::min(value_index(d, it->second), k - 1));
      }
      return idx;
    };
    const auto good = collect(split.good);
    const auto bad = collect(split.bad);
    DimModel m;
    m.numeric = std::holds_alternative<space::IntegerRange>(d.domain);
    if (m.numeric) {
      auto centers = [&](const std::vector<std::size_t>& idx) {
        std::vector<double> c;
        for (const auto i : idx) c.push_back((static_cast<double>(i) + 0.5) / static_cast<double>(k));
        return c;
      };
      m.num_good.emplace(centers(good), k, config);
      m.num_bad.emplace(centers(bad), k, config);
    } else {
      m.cat_good.emplace(good, k);
      m.cat_bad.emplace(bad, k);
    }
    models.push_back(std::move(m));
  }

  space::DesignPoint best;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t c = 0; c < config.n_candidates; ++c) {
    space::DesignPoint cand;
    const auto kidx = kernel_good.sample(rng);
    cand.kernel = space.kernel_variants[kidx];
    for (std::size_t i = 0; i < space.dims.size(); ++i) {
      cand.params[space.dims[i].name] = index_value(space.dims[i], models[i].sample(rng));
    }
    // Inactive dims carry their first grid value.
    for (const auto& d : space.dims) {
      if (!space.is_active(cand, d)) cand.params[d.name] = index_value(d, 0);
    }
    space::repair_ordering(space, cand);
    double score = kernel_good.log_mass(kidx) - kernel_bad.log_mass(kidx);
    for (std::size_t i = 0; i < space.dims.size(); ++i) {
      const auto& d = space.dims[i];
      if (!space.is_active(cand, d)) continue;
      score += models[i].score(value_index(d, cand.params[d.name]));
    }
    if (score > best_score) {
      best_score = score;
      best = std::move(cand);
    }
  }
  return best;
}

}  // namespace autohls::opt
