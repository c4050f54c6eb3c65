// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/design_space.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "toml.hpp"

namespace autohls::space {

PragmaKind parse_pragma_kind(std::string_view name) {
  if (name == "pipeline") return PragmaKind::Pipeline;
  if (name == "unroll") return PragmaKind::Unroll;
  if (name == "latency") return PragmaKind::LatencyBound;
  if (name == "array_partition") return PragmaKind::ArrayPartition;
  throw ConfigError("unknown pragma kind '" + std::string(name) + "'");
}

std::string_view to_string(PragmaKind kind) {
  switch (kind) {
    case PragmaKind::Pipeline: return "pipeline";
    case PragmaKind::Unroll: return "unroll";
    case PragmaKind::LatencyBound: return "latency";
    case PragmaKind::ArrayPartition: return "array_partition";
  }
  return "?";
}

std::int64_t Dim::cardinality() const {
  return std::visit(
      [](const auto& d) -> std::int64_t {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, IntegerRange>) {
          return d.count();
        } else if constexpr (std::is_same_v<T, Categorical>) {
          return static_cast<std::int64_t>(d.labels.size());
        } else {
          return 2;
        }
      },
      domain);
}

std::int64_t DesignPoint::at(const std::string& dim) const {
  const auto it = params.find(dim);
  if (it == params.end()) throw ContractError("design point has no value for '" + dim + "'");
  return it->second;
}

const Dim* ParameterSpace::find(std::string_view name) const {
  for (const auto& d : dims) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::optional<std::size_t> ParameterSpace::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> ParameterSpace::kernel_index(std::string_view kernel) const {
  for (std::size_t i = 0; i < kernel_variants.size(); ++i) {
    if (kernel_variants[i] == kernel) return i;
  }
  return std::nullopt;
}

std::vector<std::pair<std::size_t, std::size_t>> ParameterSpace::ordering_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    const auto& n = dims[i].name;
    if (n.size() <= 4 || n.compare(n.size() - 4, 4, "_min") != 0) continue;
    if (!std::holds_alternative<IntegerRange>(dims[i].domain)) continue;
    const auto partner = index_of(n.substr(0, n.size() - 4) + "_max");
    if (partner && std::holds_alternative<IntegerRange>(dims[*partner].domain)) {
      pairs.emplace_back(i, *partner);
    }
  }
  return pairs;
}

bool ParameterSpace::is_active(const DesignPoint& p, const Dim& dim) const {
  if (dim.gated_by.empty()) return true;
  const auto it = p.params.find(dim.gated_by);
  return it != p.params.end() && it->second != 0;
}

void validate_space(const ParameterSpace& space) {
  if (space.kernel_variants.empty()) throw ConfigError("space needs at least one kernel variant");
  std::set<std::string> kernels;
  for (const auto& k : space.kernel_variants) {
    if (k.empty()) throw ConfigError("empty kernel variant name");
    if (!kernels.insert(k).second) throw ConfigError("duplicate kernel variant '" + k + "'");
  }
  std::set<std::string> names;
  for (const auto& d : space.dims) {
    if (d.name.empty()) throw ConfigError("dim with empty name");
    if (!names.insert(d.name).second) throw ConfigError("duplicate dim name '" + d.name + "'");
    if (const auto* r = std::get_if<IntegerRange>(&d.domain)) {
      if (r->lo > r->hi) {
        throw ConfigError("dim '" + d.name + "': lo (" + std::to_string(r->lo) + ") > hi (" +
                          std::to_string(r->hi) + ")");
      }
      if (r->step < 1) throw ConfigError("dim '" + d.name + "': step must be >= 1");
    } else if (const auto* c = std::get_if<Categorical>(&d.domain)) {
      if (c->labels.empty()) throw ConfigError("dim '" + d.name + "': empty label list");
      std::set<std::string> seen(c->labels.begin(), c->labels.end());
      if (seen.size() != c->labels.size()) {
        throw ConfigError("dim '" + d.name + "': duplicate categorical label");
      }
    }
    if (!d.gated_by.empty()) {
      const Dim* gate = space.find(d.gated_by);
      if (gate == nullptr || !std::holds_alternative<Flag>(gate->domain)) {
        throw ConfigError("dim '" + d.name + "': gated_by must name a flag dim");
      }
      if (gate == &d) throw ConfigError("dim '" + d.name + "' cannot gate itself");
    }
  }
}

namespace {

const std::set<std::string>& dim_keys() {
  static const std::set<std::string> keys{"name", "pragma", "type", "lo", "hi",
                                          "step", "labels", "gated_by"};
  return keys;
}

std::int64_t require_int(const toml::table& t, const std::string& key, const std::string& ctx) {
  const auto v = t[key].value<std::int64_t>();
  if (!v) throw ConfigError(ctx + ": '" + key + "' must be an integer");
  return *v;
}

std::string require_string(const toml::table& t, const std::string& key, const std::string& ctx) {
  const auto v = t[key].value<std::string>();
  if (!v) throw ConfigError(ctx + ": '" + key + "' must be a string");
  return *v;
}

Dim parse_dim(const toml::table& t, std::size_t index) {
  const std::string ctx = "[[dim]] #" + std::to_string(index + 1);
  for (const auto& [key, _] : t) {
    if (!dim_keys().contains(std::string(key.str()))) {
      throw ConfigError(ctx + ": unknown key '" + std::string(key.str()) + "'");
    }
  }
  Dim d;
  d.name = require_string(t, "name", ctx);
  d.pragma = parse_pragma_kind(require_string(t, "pragma", ctx));
  const std::string type = require_string(t, "type", ctx + " '" + d.name + "'");
  auto reject = [&](std::initializer_list<const char*> keys) {
    for (const char* k : keys) {
      if (t.contains(k)) {
        throw ConfigError(ctx + " '" + d.name + "': key '" + k + "' not allowed for type " + type);
      }
    }
  };
  if (type == "int") {
    reject({"labels"});
    IntegerRange r;
    r.lo = require_int(t, "lo", ctx);
    r.hi = require_int(t, "hi", ctx);
    r.step = t.contains("step") ? require_int(t, "step", ctx) : 1;
    d.domain = r;
  } else if (type == "categorical") {
    reject({"lo", "hi", "step"});
    const auto* arr = t["labels"].as_array();
    if (arr == nullptr) throw ConfigError(ctx + ": categorical dim needs 'labels'");
    Categorical c;
    for (const auto& el : *arr) {
      const auto s = el.value<std::string>();
      if (!s) throw ConfigError(ctx + ": labels must be strings");
      c.labels.push_back(*s);
    }
    d.domain = c;
  } else if (type == "flag") {
    reject({"lo", "hi", "step", "labels"});
    d.domain = Flag{};
  } else {
    throw ConfigError(ctx + ": unknown type '" + type + "'");
  }
  if (t.contains("gated_by")) d.gated_by = require_string(t, "gated_by", ctx);
  return d;
}

}  // namespace

ParameterSpace parse_space(const toml::table& root) {
  ParameterSpace space;
  const auto* kernel = root["kernel"].as_table();
  if (kernel == nullptr) throw ConfigError("missing [kernel] table");
  for (const auto& [key, _] : *kernel) {
    if (key.str() != "variants") {
      throw ConfigError("[kernel]: unknown key '" + std::string(key.str()) + "'");
    }
  }
  const auto* variants = (*kernel)["variants"].as_array();
  if (variants == nullptr) throw ConfigError("[kernel]: 'variants' must be an array of strings");
  for (const auto& el : *variants) {
    const auto s = el.value<std::string>();
    if (!s) throw ConfigError("[kernel]: 'variants' must be an array of strings");
    space.kernel_variants.push_back(*s);
  }
  if (const auto* node = root.get("dim")) {
    const auto* dims = node->as_array();
    if (dims == nullptr || !dims->is_array_of_tables()) {
      throw ConfigError("'dim' must be an array of tables ([[dim]])");
    }
    for (std::size_t i = 0; i < dims->size(); ++i) {
      space.dims.push_back(parse_dim(*dims->get(i)->as_table(), i));
    }
  }
  validate_space(space);
  return space;
}

ParameterSpace parse_space(std::string_view config_text) {
  toml::table root;
  try {
    root = toml::parse(config_text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "syntax error at line " << e.source().begin.line << ", column "
       << e.source().begin.column << ": " << e.description();
    throw ConfigError(os.str());
  }
  for (const auto& [key, _] : root) {
    if (key.str() != "kernel" && key.str() != "dim") {
      throw ConfigError("unknown top-level key '" + std::string(key.str()) + "'");
    }
  }
  return parse_space(root);
}

ParameterSpace load_space(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open space file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_space(ss.str());
}

std::string format_space(const ParameterSpace& space) {
  std::ostringstream os;
  os << "[kernel]\nvariants = [";
  for (std::size_t i = 0; i < space.kernel_variants.size(); ++i) {
    os << (i ? ", " : "") << '"' << space.kernel_variants[i] << '"';
  }
  os << "]\n";
  for (const auto& d : space.dims) {
    os << "\n[[dim]]\nname = \"" << d.name << "\"\npragma = \"" << to_string(d.pragma) << "\"\n";
    if (const auto* r = std::get_if<IntegerRange>(&d.domain)) {
      os << "type = \"int\"\nlo = " << r->lo << "\nhi = " << r->hi << "\nstep = " << r->step
         << "\n";
    } else if (const auto* c = std::get_if<Categorical>(&d.domain)) {
      os << "type = \"categorical\"\nlabels = [";
      for (std::size_t i = 0; i < c->labels.size(); ++i) {
        os << (i ? ", " : "") << '"' << c->labels[i] << '"';
      }
      os << "]\n";
    } else {
      os << "type = \"flag\"\n";
    }
    if (!d.gated_by.empty()) os << "gated_by = \"" << d.gated_by << "\"\n";
  }
  return os.str();
}

std::vector<std::string> validate_point(const ParameterSpace& space, const DesignPoint& p) {
  std::vector<std::string> violations;
  if (!space.kernel_index(p.kernel)) violations.push_back("kernel '" + p.kernel + "' unknown");
  for (const auto& [name, _] : p.params) {
    if (space.find(name) == nullptr) violations.push_back("unknown dim " + name);
  }
  for (const auto& d : space.dims) {
    const auto it = p.params.find(d.name);
    if (it == p.params.end()) {
      violations.push_back(d.name + " missing");
      continue;
    }
    const std::int64_t v = it->second;
    if (const auto* r = std::get_if<IntegerRange>(&d.domain)) {
      if (v < r->lo || v > r->hi) {
        violations.push_back(d.name + " out of range");
      } else if ((v - r->lo) % r->step != 0) {
        violations.push_back(d.name + " not on step grid");
      }
    } else if (v < 0 || v >= d.cardinality()) {
      violations.push_back(d.name + " out of range");
    }
  }
  for (const auto& [lo_i, hi_i] : space.ordering_pairs()) {
    const auto& lo_d = space.dims[lo_i];
    const auto& hi_d = space.dims[hi_i];
    const auto a = p.params.find(lo_d.name);
    const auto b = p.params.find(hi_d.name);
    if (a != p.params.end() && b != p.params.end() && a->second > b->second) {
      violations.push_back(lo_d.name + " exceeds " + hi_d.name);
    }
  }
  return violations;
}

void repair_ordering(const ParameterSpace& space, DesignPoint& p) {
  for (const auto& [lo_i, hi_i] : space.ordering_pairs()) {
    auto& a = p.params[space.dims[lo_i].name];
    auto& b = p.params[space.dims[hi_i].name];
    if (a > b) std::swap(a, b);
  }
}

DesignPoint sample_random(const ParameterSpace& space, Rng& rng) {
  DesignPoint p;
  p.kernel = space.kernel_variants[uniform_index(rng, space.kernel_variants.size())];
  for (const auto& d : space.dims) {
    const auto idx = static_cast<std::int64_t>(
        uniform_index(rng, static_cast<std::uint64_t>(d.cardinality())));
    if (const auto* r = std::get_if<IntegerRange>(&d.domain)) {
      p.params[d.name] = r->value_at(idx);
    } else {
      p.params[d.name] = idx;
    }
  }
  repair_ordering(space, p);
  return p;
}

DesignPoint sample_random(const ParameterSpace& space, std::uint64_t seed) {
  Rng rng(seed);
  return sample_random(space, rng);
}

double normalize(const Dim& dim, std::int64_t value) {
  if (const auto* r = std::get_if<IntegerRange>(&dim.domain)) {
    if (r->hi == r->lo) return 0.0;
    return static_cast<double>(value - r->lo) / static_cast<double>(r->hi - r->lo);
  }
  const auto k = dim.cardinality();
  return k <= 1 ? 0.0 : static_cast<double>(value) / static_cast<double>(k - 1);
}

std::string label_of(const Dim& dim, std::int64_t value) {
  if (const auto* c = std::get_if<Categorical>(&dim.domain)) {
    return c->labels.at(static_cast<std::size_t>(value));
  }
  if (std::holds_alternative<Flag>(dim.domain)) return value ? "true" : "false";
  return std::to_string(value);
}

FeatureVector encode(const ParameterSpace& space, const DesignPoint& p) {
  const auto violations = validate_point(space, p);
  if (!violations.empty()) throw ContractError("cannot encode inadmissible point: " + violations[0]);
  FeatureVector f;
  f.values.reserve(space.feature_length());
  for (const auto& d : space.dims) f.values.push_back(normalize(d, p.params.at(d.name)));
  const auto k = *space.kernel_index(p.kernel);
  for (std::size_t i = 0; i < space.kernel_variants.size(); ++i) {
    f.values.push_back(i == k ? 1.0 : 0.0);
  }
  return f;
}

DesignPoint decode(const ParameterSpace& space, const FeatureVector& f) {
  if (f.values.size() != space.feature_length()) {
    throw ContractError("feature vector length " + std::to_string(f.values.size()) +
                        " does not match space (" + std::to_string(space.feature_length()) + ")");
  }
  DesignPoint p;
  for (std::size_t i = 0; i < space.dims.size(); ++i) {
    const auto& d = space.dims[i];
    const double x = std::clamp(f.values[i], 0.0, 1.0);
    if (const auto* r = std::get_if<IntegerRange>(&d.domain)) {
      const double steps = x * static_cast<double>(r->hi - r->lo) / static_cast<double>(r->step);
      const auto idx = std::clamp<std::int64_t>(std::llround(steps), 0, r->count() - 1);
      p.params[d.name] = r->value_at(idx);
    } else {
      const auto k = d.cardinality();
      p.params[d.name] =
          k <= 1 ? 0 : std::clamp<std::int64_t>(std::llround(x * static_cast<double>(k - 1)), 0, k - 1);
    }
  }
  const auto begin = f.values.begin() + static_cast<std::ptrdiff_t>(space.dims.size());
  const auto best = std::max_element(begin, f.values.end());
  p.kernel = space.kernel_variants[static_cast<std::size_t>(best - begin)];
  return p;
}

}  // namespace autohls::space
