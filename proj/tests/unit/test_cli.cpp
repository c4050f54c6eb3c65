#include <sys/wait.h>
#include <unistd.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "autohls/run_config.hpp"
#include "autohls/trial_db.hpp"
#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

const fs::path kSource = AUTOHLS_TEST_SOURCE_DIR;
const fs::path kRoot = kSource.parent_path();

struct Result {
  int code = -1;
  std::string out;  // stdout and stderr
};

Result cli(const std::string& args) {
  const std::string cmd = std::string(AUTOHLS_CLI_PATH) + " " + args + " 2>&1";
  Result r;
  FILE* p = ::popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::array<char, 4096> buf{};
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), p)) > 0) r.out.append(buf.data(), n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string read(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("autohls_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("explore writes the trial-db and stats, reproducibly") {
  TempDir tmp;
  const auto config = (kRoot / "configs/run.toml").string();
  const auto args = "--config " + config + " --tau 0.85 --trials 40 --seed 7 --retrain-every 10 --out ";
  auto a = cli("explore " + args + (tmp / "a"));
  REQUIRE(a.code == 0);
  auto b = cli("explore " + args + (tmp / "b"));
  REQUIRE(b.code == 0);
  CHECK(a.out.find("sampled 40") != std::string::npos);
  const auto ta = read(tmp / "a/trials.jsonl");
  CHECK(ta == read(tmp / "b/trials.jsonl"));
  CHECK(read(tmp / "a/stats.json") == read(tmp / "b/stats.json"));

  const auto db = autohls::store::parse_db(ta);
  CHECK(db.records.size() == 40);
  CHECK(db.seed == 7);
  const auto stats = nlohmann::json::parse(read(tmp / "a/stats.json"));
  CHECK(stats["config"]["run"]["tau"] == 0.85);
  CHECK(stats["config"]["run"]["seed"] == 7);
  CHECK(stats["config"]["run"]["mode"] == "autohls");
  CHECK(stats["stats"]["n_sampled"] == 40);
  // Flags override the file; unset flags keep the file's values.
  CHECK(stats["config"]["run"]["retrain_every"] == 10);
  CHECK(stats["config"]["run"]["budget_seconds"] == 150.0);

  auto c = cli("explore " + args.substr(0, args.find("--seed")) + "--seed 8 --out " + (tmp / "c"));
  REQUIRE(c.code == 0);
  CHECK(read(tmp / "c/trials.jsonl") != ta);
}

TEST_CASE("report, pareto, train and evaluate on a baseline db") {
  TempDir tmp;
  REQUIRE(cli("baseline --trials 120 --seed 3 --out " + (tmp / "run")).code == 0);
  const auto db_path = tmp / "run/trials.jsonl";
  const auto db = autohls::store::load(db_path);

  auto t2 = cli("report --db " + db_path + " --table2");
  REQUIRE(t2.code == 0);
  std::size_t comp = 0;
  for (const auto& r : db.records) comp += r.outcome == autohls::Outcome::Completed;
  const double pct = 100.0 * static_cast<double>(comp) / 120.0;
  char expect[64];
  std::snprintf(expect, sizeof expect, "%6zu %6zu %6d", comp, 120 - comp, 120);
  CHECK(t2.out.find(std::string("Total") ) != std::string::npos);
  CHECK(t2.out.find(expect) != std::string::npos);
  std::snprintf(expect, sizeof expect, "%8.2f", std::round(pct * 100.0) / 100.0);
  CHECK(t2.out.find(expect) != std::string::npos);

  auto sp = cli("report --db " + db_path + " --speedup --t-synth-min 10");
  REQUIRE(sp.code == 0);
  CHECK(sp.out.find("speedup 1.00x") != std::string::npos);

  auto pf = cli("pareto --db " + db_path + " --objectives lut,latency_cycles --out " + (tmp / "p.csv") +
                " --svg " + (tmp / "p.svg"));
  REQUIRE(pf.code == 0);
  CHECK(read(tmp / "p.csv").rfind("index,kernel,params,lut,latency_cycles\n", 0) == 0);
  CHECK(fs::exists(tmp / "p.svg"));

  auto tr = cli("train --db " + db_path + " --model logreg --split 0.5 --out " + (tmp / "m.json"));
  REQUIRE(tr.code == 0);
  auto ev = cli("evaluate --db " + db_path + " --model-path " + (tmp / "m.json") + " --split 0.5 --roc " +
                (tmp / "roc.csv"));
  REQUIRE(ev.code == 0);
  CHECK(ev.out.find("AUC") != std::string::npos);
  CHECK(read(tmp / "roc.csv").rfind("threshold,fpr,tpr\n", 0) == 0);
}

TEST_CASE("fixtures and bundled table check") {
  auto t1 = cli("fixtures --table 1");
  REQUIRE(t1.code == 0);
  CHECK(t1.out.find("PoT<16, 6>") != std::string::npos);
  auto line = t1.out.substr(t1.out.find("PoT<16, 6>"));
  line = line.substr(0, line.find('\n'));
  CHECK(line.find("24893") != std::string::npos);
  CHECK(line.find(" 0 ") != std::string::npos);

  auto t2 = cli("report --table2");
  REQUIRE(t2.code == 0);
  CHECK(t2.out.find("INCONSISTENT %comp") != std::string::npos);
  CHECK(t2.out.find("INCONSISTENT %fail") != std::string::npos);
  CHECK(t2.out.find("70.90") != std::string::npos);
  CHECK(t2.out.find("29.10") != std::string::npos);

  auto sp = cli("report --speedup --n-sampled 2000 --n-synthesized 27");
  REQUIRE(sp.code == 0);
  CHECK(sp.out.find("74.07x") != std::string::npos);
}

TEST_CASE("exit codes") {
  TempDir tmp;
  CHECK(cli("--help").code == 0);
  for (const char* sub : {"explore", "baseline", "train", "evaluate", "pareto", "report", "fixtures"}) {
    const auto h = cli(std::string(sub) + " --help");
    CHECK(h.code == 0);
    CHECK(h.out.find("--") != std::string::npos);
  }
  const auto eh = cli("explore --help").out;
  for (const char* flag : {"--config", "--tau", "--trials", "--predictor", "--retrain-every", "--budget-s",
                           "--workers", "--seed", "--out"}) {
    CHECK(eh.find(flag) != std::string::npos);
  }
  CHECK(cli("").code == 1);
  CHECK(cli("explore --bogus 1").code == 1);
  CHECK(cli("explore --config /nonexistent.toml").code == 1);
  CHECK(cli("explore --predictor forest").code == 1);
  CHECK(cli("explore --tau 2 --out " + (tmp / "x")).code == 1);
  CHECK(cli("fixtures --table 3").code == 1);
  CHECK(cli("report --table2 --speedup").code == 1);

  {
    std::ofstream bad(tmp / "bad.toml");
    bad << "[run]\ntua = 0.5\n";
  }
  const auto cfg = cli("explore --config " + (tmp / "bad.toml"));
  CHECK(cfg.code == 1);
  CHECK(cfg.out.find("unknown key 'tua'") != std::string::npos);

  {
    std::ofstream empty(tmp / "empty.jsonl");
    autohls::store::TrialDb db;
    empty << autohls::store::serialize(db);
  }
  CHECK(cli("pareto --db " + (tmp / "empty.jsonl") + " --out " + (tmp / "p.csv")).code == 2);
}

TEST_CASE("bundled configs parse") {
  for (const char* name : {"run.toml", "command_backend.toml"}) {
    CAPTURE(name);
    CHECK_NOTHROW(autohls::load_run_config(kRoot / "configs" / name));
  }
  const auto c = autohls::load_run_config(kRoot / "configs/run.toml");
  CHECK(c.space == autohls::default_space());
  CHECK(c.run.n_samples == 500);
}
