// Copyright 2026 The AutoHLS-DSE Authors
// Licensed under the Apache License, Version 2.0

#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <thread>

#include "autohls/synthesis_backend.hpp"
#include "json.hpp"

namespace autohls::synth {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (const char c : s) {
    if (c == '\'') {
      out += "'\\''";
    } else {
      out += c;
    }
  }
  out += '\'';
  return out;
}

std::string format_budget(double seconds) {
  std::ostringstream os;
  os.precision(17);
  os << seconds;
  return os.str();
}

}  // namespace

std::string render_command(std::string_view tmpl, const fs::path& design, double budget_seconds,
                           const fs::path& out_dir) {
  std::string out;
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] != '{') {
      out += tmpl[i++];
      continue;
    }
    const auto close = tmpl.find('}', i);
    if (close == std::string_view::npos) throw ConfigError("unterminated placeholder in command template");
    const auto key = tmpl.substr(i + 1, close - i - 1);
    if (key == "design_json") {
      out += shell_quote(design.string());
    } else if (key == "budget_s") {
      out += format_budget(budget_seconds);
    } else if (key == "out_dir") {
      out += shell_quote(out_dir.string());
    } else {
      throw ConfigError("unknown placeholder {" + std::string(key) + "} in command template");
    }
    i = close + 1;
  }
  return out;
}

std::string design_json(const space::DesignPoint& point) {
  json params = json::object();
  for (const auto& [k, v] : point.params) params[k] = v;
  return json{{"kernel", point.kernel}, {"params", params}}.dump();
}

SynthesisOutcome parse_report(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    return SynthesisOutcome::tool_error(std::string("unparsable report: ") + e.what());
  }
  if (!j.is_object()) return SynthesisOutcome::tool_error("report is not a JSON object");
  if (!j.contains("status")) return SynthesisOutcome::tool_error("missing field status");
  if (!j["status"].is_string()) return SynthesisOutcome::tool_error("field status must be a string");
  const auto status = j["status"].get<std::string>();
  if (status != "ok" && status != "fail") {
    return SynthesisOutcome::tool_error("field status must be \"ok\" or \"fail\"");
  }
  if (status == "fail") return SynthesisOutcome::tool_error("tool reported status fail");
  QoR q;
  for (const auto& [name, slot] : {std::pair{"ff", &q.ff}, std::pair{"lut", &q.lut}, std::pair{"dsp", &q.dsp},
                                   std::pair{"latency_cycles", &q.latency_cycles}}) {
    if (!j.contains(name)) return SynthesisOutcome::tool_error(std::string("missing field ") + name);
    const auto& v = j[name];
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
      return SynthesisOutcome::tool_error(std::string("field ") + name + " must be a non-negative integer");
    }
    *slot = v.get<std::int64_t>();
  }
  if (!j.contains("synth_seconds")) return SynthesisOutcome::tool_error("missing field synth_seconds");
  const auto& s = j["synth_seconds"];
  if (!s.is_number() || !(s.get<double>() > 0.0) || !std::isfinite(s.get<double>())) {
    return SynthesisOutcome::tool_error("field synth_seconds must be a positive number");
  }
  q.synth_seconds = s.get<double>();
  if (j.contains("mse") && j["mse"].is_number()) q.mse = j["mse"].get<double>();
  return SynthesisOutcome::completed(q);
}

SynthesisOutcome command_synthesize(const CommandAdapterConfig& cfg, const space::DesignPoint& point,
                                    double budget_seconds, const fs::path& out_dir) {
  if (!(budget_seconds > 0.0)) return SynthesisOutcome::time_budget_exceeded();
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) return SynthesisOutcome::tool_error("cannot create " + out_dir.string() + ": " + ec.message());
  const fs::path design = out_dir / "design.json";
  {
    std::ofstream f(design);
    f << design_json(point) << '\n';
    if (!f) return SynthesisOutcome::tool_error("cannot write " + design.string());
  }
  const std::string command = render_command(cfg.command_template, design, budget_seconds, out_dir);
  const std::string log_path = (out_dir / "tool.log").string();
  // Everything the child touches is prepared before fork.
  const char* argv[] = {"sh", "-c", command.c_str(), nullptr};

  const auto start = std::chrono::steady_clock::now();
  const pid_t pid = fork();
  if (pid < 0) return SynthesisOutcome::tool_error(std::string("fork failed: ") + std::strerror(errno));
  if (pid == 0) {
    setpgid(0, 0);
    const int fd = open(log_path.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
    if (fd >= 0) {
      dup2(fd, STDOUT_FILENO);
      dup2(fd, STDERR_FILENO);
      close(fd);
    }
    execv("/bin/sh", const_cast<char* const*>(argv));
    _exit(127);
  }
  setpgid(pid, pid);  // also from the parent, to close the race with the child

  const auto deadline = start + std::chrono::duration<double>(budget_seconds);
  const auto poll = std::chrono::duration<double>(cfg.poll_interval_seconds);
  int status = 0;
  for (;;) {
    const pid_t r = waitpid(pid, &status, WNOHANG);
    if (r == pid) break;
    if (r < 0 && errno != EINTR) return SynthesisOutcome::tool_error("waitpid failed");
    if (std::chrono::steady_clock::now() >= deadline) {
      kill(-pid, SIGKILL);
      kill(pid, SIGKILL);
      while (waitpid(pid, &status, 0) < 0 && errno == EINTR) {
      }
      return SynthesisOutcome::time_budget_exceeded().with_elapsed(budget_seconds);
    }
    std::this_thread::sleep_for(poll);
  }
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!WIFEXITED(status)) {
    return SynthesisOutcome::tool_error("tool terminated by signal " + std::to_string(WTERMSIG(status)))
        .with_elapsed(elapsed);
  }
  if (WEXITSTATUS(status) != 0) {
    return SynthesisOutcome::tool_error("tool exited with status " + std::to_string(WEXITSTATUS(status)))
        .with_elapsed(elapsed);
  }
  const fs::path report = out_dir / cfg.report_name;
  std::ifstream in(report);
  if (!in) return SynthesisOutcome::tool_error("missing report " + report.string()).with_elapsed(elapsed);
  std::stringstream buf;
  buf << in.rdbuf();
  auto out = parse_report(buf.str());
  if (!out.is_completed()) out.with_elapsed(elapsed);
  return out;
}

CommandAdapter::CommandAdapter(CommandAdapterConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.command_template.empty()) throw ConfigError("command adapter needs a command template");
  // Validate placeholders up front.
  render_command(cfg_.command_template, "d", 1.0, "o");
}

SynthesisOutcome CommandAdapter::synthesize(const space::DesignPoint& point, double budget_seconds) {
  const auto n = invocations_.fetch_add(1);
  const auto dir = cfg_.work_root / ("synth-" + std::to_string(n));
  return command_synthesize(cfg_, point, budget_seconds, dir);
}

}  // namespace autohls::synth
