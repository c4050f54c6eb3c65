// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include "autohls/report.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace autohls::report {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string params_text(const space::DesignPoint& p) {
  std::string s;
  for (const auto& [k, v] : p.params) {
    if (!s.empty()) s += ';';
    s += k + "=" + std::to_string(v);
  }
  return s;
}

void check_objectives(std::span<const opt::Objective> objectives) {
  if (objectives.empty()) throw ConfigError("no objectives given");
  for (const auto& o : objectives) {
    if (!is_qor_field(o.name)) throw ConfigError("unknown objective '" + o.name + "'");
  }
}

std::string objective_cell(const QoR& q, const opt::Objective& o) {
  if (o.name == "mse" && !q.mse) return "";
  return format_real(qor_value(q, o.name));
}

void require_records(const store::TrialDb& db) {
  if (db.records.empty()) throw ContractError("trial-db is empty; nothing to export");
}

}  // namespace

std::string trials_csv(std::span<const TrialRecord> trials, std::span<const opt::Objective> objectives) {
  check_objectives(objectives);
  std::string out = "index,kernel,params,outcome,failure_kind,prediction_score";
  for (const auto& o : objectives) out += "," + o.name;
  out += '\n';
  for (const auto& r : trials) {
    out += std::to_string(r.index) + "," + r.point.kernel + "," + params_text(r.point) + "," +
           std::string(to_string(r.outcome)) + "," + r.failure_kind + ",";
    if (r.prediction_score) out += format_real(*r.prediction_score);
    for (const auto& o : objectives) {
      out += ',';
      if (r.qor) out += objective_cell(*r.qor, o);
    }
    out += '\n';
  }
  return out;
}

std::string pareto_csv(const opt::ParetoFront& front) {
  check_objectives(front.objectives);
  std::string out = "index,kernel,params";
  for (const auto& o : front.objectives) out += "," + o.name;
  out += '\n';
  for (const auto& r : front.members) {
    out += std::to_string(r.index) + "," + r.point.kernel + "," + params_text(r.point);
    for (const auto& o : front.objectives) out += "," + objective_cell(*r.qor, o);
    out += '\n';
  }
  return out;
}

std::string roc_csv(const ml::RocCurve& curve) {
  std::string out = "threshold,fpr,tpr\n";
  for (std::size_t i = 0; i < curve.thresholds.size(); ++i) {
    out += format_real(curve.thresholds[i]) + "," + format_real(curve.fpr[i]) + "," + format_real(curve.tpr[i]) +
           "\n";
  }
  return out;
}

std::string scatter_svg(std::span<const TrialRecord> trials, const opt::Objective& xo, const opt::Objective& yo,
                        const opt::ParetoFront& front) {
  const opt::Objective both[] = {xo, yo};
  check_objectives(both);
  constexpr double W = 640, H = 480, ML = 70, MR = 20, MT = 30, MB = 50;
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : trials) {
    if (r.outcome == Outcome::Completed && r.qor) pts.emplace_back(qor_value(*r.qor, xo.name), qor_value(*r.qor, yo.name));
  }
  std::vector<std::pair<double, double>> fpts;
  for (const auto& r : front.members) fpts.emplace_back(qor_value(*r.qor, xo.name), qor_value(*r.qor, yo.name));
  std::sort(fpts.begin(), fpts.end());

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (!pts.empty() || !fpts.empty()) {
    x0 = y0 = HUGE_VAL;
    x1 = y1 = -HUGE_VAL;
    for (const auto* v : {&pts, &fpts}) {
      for (const auto& [x, y] : *v) {
        x0 = std::min(x0, x), x1 = std::max(x1, x), y0 = std::min(y0, y), y1 = std::max(y1, y);
      }
    }
    if (x1 == x0) x0 -= 1, x1 += 1;
    if (y1 == y0) y0 -= 1, y1 += 1;
  }
  auto sx = [&](double x) { return ML + (x - x0) / (x1 - x0) * (W - ML - MR); };
  auto sy = [&](double y) { return H - MB - (y - y0) / (y1 - y0) * (H - MT - MB); };

  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
     << W << ' ' << H << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<g stroke=\"black\" stroke-width=\"1\">\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << H - MB << "\" x2=\"" << W - MR << "\" y2=\"" << H - MB << "\"/>\n";
  os << "<line x1=\"" << ML << "\" y1=\"" << MT << "\" x2=\"" << ML << "\" y2=\"" << H - MB << "\"/>\n";
  os << "</g>\n<g font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<text x=\"" << (ML + W - MR) / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xo.name
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << (MT + H - MB) / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
     << (MT + H - MB) / 2 << ")\">" << yo.name << "</text>\n";
  os << "<text x=\"" << ML << "\" y=\"" << H - MB + 16 << "\" text-anchor=\"start\">" << fixed(x0, 2) << "</text>\n";
  os << "<text x=\"" << W - MR << "\" y=\"" << H - MB + 16 << "\" text-anchor=\"end\">" << fixed(x1, 2)
     << "</text>\n";
  os << "<text x=\"" << ML - 4 << "\" y=\"" << H - MB << "\" text-anchor=\"end\">" << fixed(y0, 2) << "</text>\n";
  os << "<text x=\"" << ML - 4 << "\" y=\"" << MT + 4 << "\" text-anchor=\"end\">" << fixed(y1, 2) << "</text>\n";
  os << "</g>\n<g fill=\"#9a9a9a\" fill-opacity=\"0.7\">\n";
  for (const auto& [x, y] : pts) {
    os << "<circle cx=\"" << fixed(sx(x), 2) << "\" cy=\"" << fixed(sy(y), 2) << "\" r=\"3\"/>\n";
  }
  os << "</g>\n";
  if (!fpts.empty()) {
    os << "<polyline fill=\"none\" stroke=\"#1f4e9c\" stroke-width=\"1.5\" stroke-dasharray=\"4 3\" points=\"";
    for (std::size_t i = 0; i < fpts.size(); ++i) {
      os << (i ? " " : "") << fixed(sx(fpts[i].first), 2) << ',' << fixed(sy(fpts[i].second), 2);
    }
    os << "\"/>\n<g fill=\"#1f4e9c\">\n";
    for (const auto& [x, y] : fpts) {
      os << "<circle cx=\"" << fixed(sx(x), 2) << "\" cy=\"" << fixed(sy(y), 2) << "\" r=\"4\"/>\n";
    }
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void export_csv(const store::TrialDb& db, std::span<const opt::Objective> objectives,
                const std::filesystem::path& path) {
  require_records(db);
  store::write_file_atomic(path, trials_csv(db.records, objectives));
}

opt::ParetoFront export_pareto(const store::TrialDb& db, std::span<const opt::Objective> objectives,
                               const std::filesystem::path& path) {
  require_records(db);
  check_objectives(objectives);
  auto front = opt::pareto_front(db.records, objectives);
  store::write_file_atomic(path, pareto_csv(front));
  return front;
}

void export_roc(const ml::RocCurve& curve, const std::filesystem::path& path) {
  store::write_file_atomic(path, roc_csv(curve));
}

void render_scatter_svg(const store::TrialDb& db, const opt::Objective& x, const opt::Objective& y,
                        const opt::ParetoFront& front, const std::filesystem::path& path) {
  require_records(db);
  store::write_file_atomic(path, scatter_svg(db.records, x, y, front));
}

nlohmann::json stats_to_json(const orch::RunStats& s) {
  nlohmann::json j{{"n_sampled", s.n_sampled}, {"n_synthesized", s.n_synthesized}, {"n_skipped", s.n_skipped},
                   {"tp", s.tp},               {"fp", s.fp},                       {"fn_eval", s.fn_eval},
                   {"tn_eval", s.tn_eval},     {"retrains", s.retrains},           {"wall_seconds", s.wall_seconds}};
  j["speedup"] = s.speedup ? nlohmann::json(*s.speedup) : nlohmann::json(nullptr);
  return j;
}

std::string format_stats(const orch::RunStats& s) {
  std::ostringstream os;
  os << "sampled " << s.n_sampled << ", synthesized " << s.n_synthesized << " (completed " << s.tp << ", failed "
     << s.fp << "), skipped " << s.n_skipped;
  if (s.fn_eval + s.tn_eval > 0) os << " (would complete " << s.fn_eval << ", would fail " << s.tn_eval << ")";
  os << "\nretrains " << s.retrains << ", synthesis time " << fixed(s.wall_seconds / 3600.0, 2) << " h";
  if (s.speedup) os << ", accounting speedup " << fixed(*s.speedup, 2) << "x";
  os << '\n';
  return os.str();
}

namespace {

std::string budget_line(const orch::BudgetRow& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-10s %8s %6zu %6zu %6zu %8.2f %8.2f", r.kernel.c_str(),
                r.kernel == "Total" ? "" : fixed(r.budget_minutes, 2).c_str(), r.comp, r.fail, r.total, r.pct_fail,
                r.pct_comp);
  return buf;
}

const char* kBudgetHeader = "kernel     time_min   comp   fail  total    %fail    %comp";

}  // namespace

std::string format_budget_rows(std::span<const orch::BudgetRow> rows) {
  std::string out = std::string(kBudgetHeader) + "\n";
  for (const auto& r : rows) out += budget_line(r) + "\n";
  return out;
}

std::string format_budget_checks(std::span<const orch::BudgetCheck> checks) {
  std::string out = std::string(kBudgetHeader) + "  printed %fail/%comp\n";
  std::size_t flagged = 0;
  for (const auto& c : checks) {
    out += budget_line(c.computed) + "  " + fixed(c.printed_fail, 2) + "/" + fixed(c.printed_comp, 2);
    if (!c.fail_consistent) out += "  INCONSISTENT %fail";
    if (!c.comp_consistent) out += "  INCONSISTENT %comp";
    flagged += !c.consistent();
    out += '\n';
  }
  out += std::to_string(checks.size() - flagged) + " of " + std::to_string(checks.size()) +
         " rows match the printed percentages within 0.02; " + std::to_string(flagged) + " flagged\n";
  return out;
}

SpeedupReport speedup_report(std::size_t n_sampled, std::size_t n_synthesized, double t, double overhead) {
  SpeedupReport r;
  r.n_sampled = n_sampled;
  r.n_synthesized = n_synthesized;
  r.t_minutes = t;
  r.overhead_minutes = overhead;
  r.bo_hours = static_cast<double>(n_sampled) * t / 60.0;
  r.autohls_hours = (static_cast<double>(n_synthesized) * t + overhead) / 60.0;
  r.speedup = orch::compute_speedup(n_sampled, n_synthesized, t, overhead);
  return r;
}

std::string format_speedup(const SpeedupReport& r) {
  std::ostringstream os;
  os << "sampled " << r.n_sampled << ", synthesized " << r.n_synthesized << ", t = " << fixed(r.t_minutes, 2)
     << " min\nBO hours " << fixed(r.bo_hours, 2) << ", AutoHLS hours " << fixed(r.autohls_hours, 2)
     << ", speedup " << fixed(r.speedup, 2) << "x\n";
  return os.str();
}

}  // namespace autohls::report
