// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "autohls/common.hpp"
#include "autohls/design_space.hpp"
#include "autohls/trial.hpp"

namespace autohls::opt {

enum class Direction { Minimize, Maximize };

struct Objective {
  std::string name;
  Direction direction = Direction::Minimize;
  bool operator==(const Objective&) const = default;
};

// "lut,latency_cycles" or with explicit directions "lut:min,ff:max".
std::vector<Objective> parse_objectives(std::string_view list);
std::string format_objectives(std::span<const Objective> objectives);
std::vector<Direction> directions_of(std::span<const Objective> objectives);

std::vector<double> objective_vector(const QoR& qor, std::span<const Objective> objectives);

// Strict Pareto dominance after direction normalization.
bool dominates(std::span<const double> a, std::span<const double> b,
               std::span<const Direction> directions);

// Indices of the non-dominated points, ascending.
std::vector<std::size_t> pareto_indices(std::span<const std::vector<double>> points,
                                        std::span<const Direction> directions);

struct ParetoFront {
  std::vector<TrialRecord> members;  // submission order
  std::vector<Objective> objectives;
};

ParetoFront pareto_front(std::span<const TrialRecord> trials, std::span<const Objective> objectives);

struct TpeConfig {
  std::size_t n_startup = 10;
  double gamma_fraction = 0.10;
  std::size_t gamma_cap = 25;
  std::size_t n_candidates = 24;
  double bandwidth_floor = 0.01;
  double prior_weight = 1.0;

  void validate() const;
  bool operator==(const TpeConfig&) const = default;
};

// One history entry as the sampler sees it. Entries without objectives
// (failed or skipped designs) rank worst.
struct Observation {
  space::DesignPoint point;
  std::optional<std::vector<double>> objectives;
};

std::vector<Observation> observations(std::span<const TrialRecord> trials,
                                      std::span<const Objective> objectives);

struct Split {
  std::vector<std::size_t> good;
  std::vector<std::size_t> bad;
};

std::size_t good_count(std::size_t n, const TpeConfig& config);

// Random-weight linear scalarization of min-max normalized objectives; the
// best good_count(n) entries are `good`. Throws ContractError on empty history.
Split split_good_bad(std::span<const Observation> history, std::span<const Direction> directions,
                     const TpeConfig& config, Rng& rng);
Split split_good_bad(std::span<const Observation> history, std::span<const Direction> directions,
                     const TpeConfig& config, std::uint64_t scalarization_seed);

// The scalar values split_good_bad ranks by for a given weight vector.
std::vector<double> scalarize(std::span<const Observation> history,
                              std::span<const Direction> directions, std::span<const double> weights);

space::DesignPoint suggest(const space::ParameterSpace& space, std::span<const Observation> history,
                           std::span<const Direction> directions, const TpeConfig& config, Rng& rng);

}  // namespace autohls::opt
