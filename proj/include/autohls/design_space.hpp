// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "autohls/common.hpp"

namespace toml {
inline namespace v3 {
class table;
}
}  // namespace toml

namespace autohls::space {

enum class PragmaKind { Pipeline, Unroll, LatencyBound, ArrayPartition };

PragmaKind parse_pragma_kind(std::string_view name);
std::string_view to_string(PragmaKind kind);

struct IntegerRange {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  std::int64_t step = 1;

  // Number of grid values lo, lo + step, ... <= hi.
  std::int64_t count() const { return (hi - lo) / step + 1; }
  std::int64_t value_at(std::int64_t index) const { return lo + index * step; }
  bool operator==(const IntegerRange&) const = default;
};

struct Categorical {
  std::vector<std::string> labels;
  bool operator==(const Categorical&) const = default;
};

struct Flag {
  bool operator==(const Flag&) const = default;
};

using ParamDomain = std::variant<IntegerRange, Categorical, Flag>;

struct Dim {
  std::string name;
  PragmaKind pragma = PragmaKind::Unroll;
  ParamDomain domain;
  // Name of a Flag dim that must be true for this dim to be active; empty when
  // the dim is always active.
  std::string gated_by;

  std::int64_t cardinality() const;
  bool operator==(const Dim&) const = default;
};

// Values are stored as integers: IntegerRange dims hold the value itself,
// Categorical dims the label index, Flag dims 0 or 1.
using Assignment = std::map<std::string, std::int64_t>;

struct DesignPoint {
  std::string kernel;
  Assignment params;

  std::int64_t at(const std::string& dim) const;
  bool operator==(const DesignPoint&) const = default;
  auto operator<=>(const DesignPoint&) const = default;
};

struct ParameterSpace {
  std::vector<Dim> dims;
  std::vector<std::string> kernel_variants;

  const Dim* find(std::string_view name) const;
  std::optional<std::size_t> index_of(std::string_view name) const;
  std::optional<std::size_t> kernel_index(std::string_view kernel) const;
  std::size_t feature_length() const { return dims.size() + kernel_variants.size(); }

  // (min dim, max dim) index pairs for every `<prefix>_min` / `<prefix>_max`
  // couple; admissible points keep min <= max.
  std::vector<std::pair<std::size_t, std::size_t>> ordering_pairs() const;

  // Whether `dim` participates for point `p` (its gating flag, if any, is set).
  bool is_active(const DesignPoint& p, const Dim& dim) const;

  bool operator==(const ParameterSpace&) const = default;
};

struct FeatureVector {
  // |dims| min-max scaled entries followed by a one-hot kernel block.
  std::vector<double> values;
};

// Throws ConfigError describing the first problem found.
void validate_space(const ParameterSpace& space);

ParameterSpace parse_space(std::string_view config_text);
ParameterSpace parse_space(const toml::table& root);
ParameterSpace load_space(const std::filesystem::path& path);
std::string format_space(const ParameterSpace& space);

// Empty result iff `p` is admissible.
std::vector<std::string> validate_point(const ParameterSpace& space, const DesignPoint& p);

DesignPoint sample_random(const ParameterSpace& space, std::uint64_t seed);
DesignPoint sample_random(const ParameterSpace& space, Rng& rng);

// Swaps every ordering pair that is out of order. Used by samplers to keep
// candidates admissible.
void repair_ordering(const ParameterSpace& space, DesignPoint& p);

FeatureVector encode(const ParameterSpace& space, const DesignPoint& p);
DesignPoint decode(const ParameterSpace& space, const FeatureVector& f);

// Normalized coordinate of a single grid value in [0, 1].
double normalize(const Dim& dim, std::int64_t value);

std::string label_of(const Dim& dim, std::int64_t value);

}  // namespace autohls::space
