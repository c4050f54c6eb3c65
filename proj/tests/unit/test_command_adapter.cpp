#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unistd.h>
#include <vector>

#include <nlohmann/json.hpp>

#include "autohls/synthesis_backend.hpp"
#include "doctest.h"

using namespace autohls;
using namespace autohls::synth;
namespace fs = std::filesystem;

namespace {

struct StubDir {
  fs::path root;
  StubDir() {
    root = fs::temp_directory_path() / ("autohls_stub_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~StubDir() { fs::remove_all(root); }

  fs::path script(const std::string& name, const std::string& body) const {
    const auto p = root / name;
    std::ofstream(p) << "#!/bin/sh\n" << body;
    return p;
  }
};

space::DesignPoint point() {
  space::DesignPoint p;
  p.kernel = "PoT16_6";
  p.params = {{"unroll", 4}, {"ii", 2}};
  return p;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

// $1 = design json, $2 = budget, $3 = out dir
std::string tmpl(const fs::path& script) { return "sh " + script.string() + " {design_json} {budget_s} {out_dir}"; }

}  // namespace

TEST_CASE("render_command substitutes and quotes") {
  CHECK(render_command("run {design_json} -t {budget_s} -o {out_dir}", "/a b/d.json", 150.0, "/o") ==
        "run '/a b/d.json' -t 150 -o '/o'");
  CHECK(render_command("x '{out_dir}'", "d", 1, "it's") == "x ''it'\\''s''");
  CHECK(render_command("plain", "d", 2.5, "o") == "plain");
  CHECK_THROWS_AS(render_command("x {design}", "d", 1, "o"), ConfigError);
  CHECK_THROWS_AS(render_command("x {out_dir", "d", 1, "o"), ConfigError);
  CHECK_THROWS_AS(CommandAdapter(CommandAdapterConfig{}), ConfigError);
}

TEST_CASE("design json layout") {
  const auto j = nlohmann::json::parse(design_json(point()));
  CHECK(j["kernel"] == "PoT16_6");
  CHECK(j["params"]["unroll"] == 4);
  CHECK(j["params"]["ii"] == 2);
}

TEST_CASE("report parsing contract") {
  auto ok = parse_report(R"({"status":"ok","ff":100,"lut":200,"dsp":0,"latency_cycles":50,"synth_seconds":3.5,"extra":1})");
  REQUIRE(ok.is_completed());
  CHECK(ok.qor().ff == 100);
  CHECK(ok.qor().lut == 200);
  CHECK(ok.qor().dsp == 0);
  CHECK(ok.qor().latency_cycles == 50);
  CHECK(ok.qor().synth_seconds == 3.5);
  CHECK(!ok.qor().mse);
  CHECK(ok.elapsed_seconds() == 3.5);

  const auto missing = parse_report(R"({"status":"ok","ff":100,"dsp":0,"latency_cycles":50,"synth_seconds":3.5})");
  REQUIRE(!missing.is_completed());
  CHECK(missing.failure().reason == FailureReason::ToolError);
  CHECK(missing.failure().detail == "missing field lut");

  CHECK(parse_report("{").failure().reason == FailureReason::ToolError);
  CHECK(parse_report("[]").failure().detail == "report is not a JSON object");
  CHECK(parse_report(R"({"ff":1})").failure().detail == "missing field status");
  CHECK(!parse_report(R"({"status":"ok","ff":-1,"lut":2,"dsp":0,"latency_cycles":5,"synth_seconds":1})").is_completed());
  CHECK(!parse_report(R"({"status":"ok","ff":1.5,"lut":2,"dsp":0,"latency_cycles":5,"synth_seconds":1})").is_completed());
  CHECK(!parse_report(R"({"status":"ok","ff":1,"lut":2,"dsp":0,"latency_cycles":5,"synth_seconds":0})").is_completed());
  CHECK(!parse_report(R"({"status":"maybe","ff":1,"lut":2,"dsp":0,"latency_cycles":5,"synth_seconds":1})").is_completed());
  CHECK(parse_report(R"({"status":"fail"})").failure().reason == FailureReason::ToolError);
  const auto mse = parse_report(R"({"status":"ok","ff":1,"lut":2,"dsp":0,"latency_cycles":5,"synth_seconds":1,"mse":0.25})");
  CHECK(mse.qor().mse == 0.25);
}

TEST_CASE("stub tool round trip") {
  StubDir dir;
  const auto s = dir.script("ok.sh",
                            "cp \"$1\" \"$3/seen.json\"\n"
                            "echo \"$2\" > \"$3/budget.txt\"\n"
                            "echo '{\"status\":\"ok\",\"ff\":100,\"lut\":200,\"dsp\":0,\"latency_cycles\":50,"
                            "\"synth_seconds\":3.5}' > \"$3/report.json\"\n");
  CommandAdapterConfig cfg;
  cfg.command_template = tmpl(s);
  cfg.work_root = dir.root / "work";
  CommandAdapter adapter(cfg);
  const auto out = adapter.synthesize(point(), 60);
  REQUIRE(out.is_completed());
  CHECK(out.qor().lut == 200);
  CHECK(out.qor().latency_cycles == 50);
  CHECK(nlohmann::json::parse(read(cfg.work_root / "synth-0" / "seen.json")) == nlohmann::json::parse(design_json(point())));
  CHECK(read(cfg.work_root / "synth-0" / "budget.txt") == "60\n");
  // Each invocation gets its own directory.
  CHECK(adapter.synthesize(point(), 60).is_completed());
  CHECK(fs::exists(cfg.work_root / "synth-1" / "report.json"));
}

TEST_CASE("nonzero exit, missing report, bad report") {
  StubDir dir;
  CommandAdapterConfig cfg;
  cfg.work_root = dir.root / "work";

  cfg.command_template = tmpl(dir.script("exit.sh", "echo boom >&2\nexit 3\n"));
  auto out = CommandAdapter(cfg).synthesize(point(), 60);
  REQUIRE(!out.is_completed());
  CHECK(out.failure().reason == FailureReason::ToolError);
  CHECK(out.failure().detail == "tool exited with status 3");
  CHECK(read(cfg.work_root / "synth-0" / "tool.log") == "boom\n");

  cfg.command_template = tmpl(dir.script("quiet.sh", "exit 0\n"));
  out = CommandAdapter(cfg).synthesize(point(), 60);
  REQUIRE(!out.is_completed());
  CHECK(out.failure().reason == FailureReason::ToolError);

  cfg.work_root = dir.root / "work2";
  cfg.command_template = tmpl(dir.script(
      "nolut.sh", "echo '{\"status\":\"ok\",\"ff\":1,\"dsp\":0,\"latency_cycles\":5,\"synth_seconds\":1}' > \"$3/report.json\"\n"));
  out = CommandAdapter(cfg).synthesize(point(), 60);
  REQUIRE(!out.is_completed());
  CHECK(out.failure().detail == "missing field lut");
}

TEST_CASE("budget expiry kills the whole process group") {
  StubDir dir;
  const auto marker = dir.root / "survived";
  CommandAdapterConfig cfg;
  cfg.work_root = dir.root / "work";
  cfg.command_template = tmpl(dir.script("slow.sh", "(sleep 2; touch '" + marker.string() + "') &\nsleep 30\n"));
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = CommandAdapter(cfg).synthesize(point(), 0.3);
  const double took = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(!out.is_completed());
  CHECK(out.failure().reason == FailureReason::TimeBudgetExceeded);
  CHECK(out.elapsed_seconds() == 0.3);
  CHECK(took < 2.0);
  std::this_thread::sleep_for(std::chrono::milliseconds(2500));
  CHECK(!fs::exists(marker));

  const auto zero = CommandAdapter(cfg).synthesize(point(), 0.0);
  CHECK(zero.failure().reason == FailureReason::TimeBudgetExceeded);
}
