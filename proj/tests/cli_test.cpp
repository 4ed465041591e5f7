#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "relog/report.hpp"
#include "support/synthetic_history.hpp"
#include "support/temp_dir.hpp"

namespace relog::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using relog::testing::TempDir;

const fs::path kFixtures = RELOG_FIXTURES;
const fs::path kCache = RELOG_VALIDATION_CACHE;
const fs::path kCorpus = kFixtures / "corpus";
const std::string kToolchain = (kFixtures / "runtime" / "toolchain.json").string();

struct Result {
  int code = -1;
  std::string out;
  std::string err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "relog");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Result r;
  r.code = main(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p, std::ios::trunc) << text; }

/// The single file matching `name` below `dir`.
fs::path find_one(const fs::path& dir, const std::string& name) {
  std::vector<fs::path> hits;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.path().filename() == name) hits.push_back(e.path());
  }
  if (hits.size() != 1) throw std::runtime_error("expected one " + name + " under " + dir.string());
  return hits[0];
}

fs::path config(const TempDir& dir, json stub, json extra = json::object()) {
  json c = {{"toolchain", kToolchain}, {"provider", {{"kind", "stub"}, {"stub", std::move(stub)}}}};
  c.update(extra);
  auto p = dir.path() / "cfg.json";
  write(p, c.dump());
  return p;
}

std::vector<std::string> window_sum_args(const fs::path& cfg, const fs::path& out) {
  auto d = kCorpus / "window_sum";
  return {"run", (d / "window_sum.cpp").string(), "--companion", (d / "driver.cpp").string(),
          "--test", "t_tail", "--config", cfg.string(), "--out", out.string()};
}

const json kWindowStub = {{"key_variable", "end"}, {"key_anchor", 9}, {"key_position", "after"}};

TEST(CliRun, ConvergesOnFixture) {
  TempDir dir;
  auto r = cli(window_sum_args(config(dir, kWindowStub), dir.path() / "runs"));
  EXPECT_EQ(r.code, kSufficient) << r.err;
  auto ledger = report::read_ledger(find_one(dir.path() / "runs", "ledger.jsonl"));
  EXPECT_EQ(ledger.termination, pipeline::Termination::sufficient);
  EXPECT_TRUE(fs::exists(find_one(dir.path() / "runs", "trace.txt")));
  auto cfg = json::parse(slurp(find_one(dir.path() / "runs", "config.json")));
  EXPECT_EQ(cfg["budgets"]["max_iterations"], 5);
}

TEST(CliRun, AlwaysInsufficientCriticExhaustsBudget) {
  TempDir dir;
  auto stub = kWindowStub;
  stub["critic"] = "always_insufficient";
  auto r = cli(window_sum_args(config(dir, stub), dir.path() / "runs"));
  EXPECT_EQ(r.code, kBudgetExhausted) << r.err;
  auto ledger = report::read_ledger(find_one(dir.path() / "runs", "ledger.jsonl"));
  EXPECT_EQ(ledger.iterations.size(), 5u);
}

TEST(CliRun, MissingCompilerIsToolchainUnavailable) {
  TempDir dir;
  auto profile = json::parse(slurp(kToolchain));
  profile["compile_cmd"] = "relog-no-such-compiler {sources}";
  write(dir.path() / "tc.json", profile.dump());
  fs::copy_file(kFixtures / "runtime" / "rt.hpp", dir.path() / "rt.hpp");
  auto args = window_sum_args(config(dir, kWindowStub), dir.path() / "runs");
  args.push_back("--toolchain");
  args.push_back((dir.path() / "tc.json").string());
  auto r = cli(args);
  EXPECT_EQ(r.code, kToolchainUnavailable);
  // the ledger is written regardless
  auto ledger = report::read_ledger(find_one(dir.path() / "runs", "ledger.jsonl"));
  EXPECT_EQ(ledger.termination, pipeline::Termination::execution_error);
}

TEST(CliRun, ConfigAndIoErrors) {
  TempDir dir;
  auto cfg = config(dir, kWindowStub);
  auto src = (kCorpus / "window_sum" / "window_sum.cpp").string();
  EXPECT_EQ(cli({"run", (dir.path() / "absent.cpp").string(), "--config", cfg.string()}).code, kIoError);
  EXPECT_EQ(cli({"run", src, "--config", cfg.string(), "--max-iterations", "0"}).code, kConfigError);
  EXPECT_EQ(cli({"run", src, "--config", cfg.string(), "--mode", "sideways"}).code, kConfigError);
  EXPECT_EQ(cli({"run", src, "--config", (dir.path() / "none.json").string()}).code, kIoError);
  EXPECT_EQ(cli({"run", src}).code, kConfigError);  // no toolchain anywhere
  EXPECT_EQ(cli({"run"}).code, kConfigError);
  EXPECT_EQ(cli({}).code, kConfigError);
  write(dir.path() / "bad.json", R"({"toolchain": "x", "budget": {}})");
  auto r = cli({"run", src, "--config", (dir.path() / "bad.json").string()});
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("budget"), std::string::npos);
}

TEST(CliRun, CredentialComesFromNamedVariable) {
  TempDir dir;
  json c = {{"toolchain", kToolchain},
            {"provider",
             {{"kind", "remote"},
              {"remote", {{"base_url", "http://127.0.0.1:9"}, {"model", "m"}, {"api_key_env", "RELOG_TEST_UNSET_KEY"}}}}}};
  write(dir.path() / "cfg.json", c.dump());
  auto parsed = RunConfig::load(dir.path() / "cfg.json");
  ASSERT_TRUE(parsed.provider.remote.has_value());
  EXPECT_EQ(parsed.provider.remote->api_key_env, "RELOG_TEST_UNSET_KEY");
  ::unsetenv("RELOG_TEST_UNSET_KEY");
  auto args = window_sum_args(dir.path() / "cfg.json", dir.path() / "runs");
  auto r = cli(args);
  EXPECT_EQ(r.code, kConfigError);
  EXPECT_NE(r.err.find("RELOG_TEST_UNSET_KEY"), std::string::npos);
}

TEST(CliReplay, RecordedRunReplaysByteIdentically) {
  TempDir dir;
  auto cfg = config(dir, kWindowStub);
  auto store = dir.path() / "store";
  auto rec = window_sum_args(cfg, dir.path() / "recorded");
  rec.push_back("--record");
  rec.push_back(store.string());
  ASSERT_EQ(cli(rec).code, kSufficient);

  std::vector<std::string> ledgers, traces;
  for (const char* name : {"replay1", "replay2"}) {
    auto args = window_sum_args(cfg, dir.path() / name);
    args.push_back("--replay");
    args.push_back(store.string());
    ASSERT_EQ(cli(args).code, kSufficient);
    auto ledger = find_one(dir.path() / name, "ledger.jsonl");
    ledgers.push_back(slurp(ledger));
    traces.push_back(cli({"report", ledger.string()}).out);
  }
  EXPECT_EQ(ledgers[0], ledgers[1]);
  EXPECT_EQ(ledgers[0], slurp(find_one(dir.path() / "recorded", "ledger.jsonl")));
  EXPECT_EQ(traces[0], traces[1]);
  EXPECT_EQ(traces[0], slurp(find_one(dir.path() / "recorded", "trace.txt")));
}

TEST(CliReport, RendersLedgerOrFailsWithIoError) {
  TempDir dir;
  ASSERT_EQ(cli(window_sum_args(config(dir, kWindowStub), dir.path() / "runs")).code, kSufficient);
  auto ledger = find_one(dir.path() / "runs", "ledger.jsonl");
  auto r = cli({"report", ledger.string()});
  EXPECT_EQ(r.code, 0);
  EXPECT_EQ(r.out, report::render_trace(report::read_ledger(ledger)));
  write(dir.path() / "junk.jsonl", "not a ledger\n");
  EXPECT_EQ(cli({"report", (dir.path() / "junk.jsonl").string()}).code, kIoError);
}

json eval_report(const fs::path& out) { return json::parse(slurp(find_one(out, "report.json"))); }

TEST(CliEval, NoneBaselineAndRelogOnIndirectFixtures) {
  TempDir dir;
  auto manifest = (kFixtures / "manifests" / "indirect.json").string();
  auto none = cli({"eval", manifest, "--generator", "none", "--cache", kCache.string(), "--out",
                   (dir.path() / "none").string()});
  ASSERT_EQ(none.code, 0) << none.err;
  auto relog = cli({"eval", manifest, "--cache", kCache.string(), "--out", (dir.path() / "relog").string()});
  ASSERT_EQ(relog.code, 0) << relog.err;
  auto n = eval_report(dir.path() / "none")["metrics"][0];
  auto r = eval_report(dir.path() / "relog")["metrics"][0];
  EXPECT_EQ(n["avg_logs"], 0.0);
  EXPECT_GE(r["recall"].get<double>(), n["recall"].get<double>());
  EXPECT_NE(relog.out.find("Avg. Logs per Caller"), std::string::npos);
  EXPECT_EQ(fs::exists(find_one(dir.path() / "relog", "trip_speed.jsonl")), true);
}

TEST(CliEval, AblatedFixerLeavesCompilationFailures) {
  TempDir dir;
  // two fault-injected instances from the ablation corpus, paths made absolute
  auto src = json::parse(slurp(kFixtures / "manifests" / "ablation.json"));
  auto base = kFixtures / "manifests";
  json m = {{"name", "broken"}, {"toolchain", (base / src["toolchain"].get<std::string>()).string()},
            {"instances", json::array()}};
  for (auto inst : src["instances"]) {
    if (!inst["stub"].contains("inject_fault") || m["instances"].size() == 2) continue;
    for (auto& [k, v] : inst["paths"].items()) {
      if (v.is_string()) {
        v = (base / v.get<std::string>()).string();
      } else {
        for (auto& p : v) p = (base / p.get<std::string>()).string();
      }
    }
    m["instances"].push_back(inst);
  }
  ASSERT_EQ(m["instances"].size(), 2u);
  write(dir.path() / "m.json", m.dump());
  auto manifest = (dir.path() / "m.json").string();
  auto r = cli({"eval", manifest, "--ablate-fixer", "--cache", kCache.string(), "--out", (dir.path() / "a").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(eval_report(dir.path() / "a")["metrics"][0]["compilation_failures"].get<int>(), 0);
  auto full = cli({"eval", manifest, "--cache", kCache.string(), "--out", (dir.path() / "f").string()});
  ASSERT_EQ(full.code, 0) << full.err;
  EXPECT_EQ(eval_report(dir.path() / "f")["metrics"][0]["compilation_failures"].get<int>(), 0);
}

TEST(CliEval, Errors) {
  TempDir dir;
  EXPECT_EQ(cli({"eval", (dir.path() / "absent.json").string()}).code, kManifestInvalid);
  auto manifest = (kFixtures / "manifests" / "indirect.json").string();
  EXPECT_EQ(cli({"eval", manifest, "--generator", "oracle"}).code, kConfigError);
  EXPECT_EQ(cli({"eval", manifest, "--generator", "plan-file"}).code, kConfigError);
}

TEST(CliMine, SyntheticHistoryAndErrors) {
  TempDir dir;
  auto repo = dir.path() / "repo";
  auto truth = relog::testing::HistoryScript(repo, 11).generate(3, 2).truth();
  auto r = cli({"mine", repo.string(), "--out", (dir.path() / "out").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  auto rep = json::parse(slurp(find_one(dir.path() / "out", "report.json")));
  std::size_t modified = 0;
  std::map<std::string, std::size_t> buckets;
  for (const auto& [tag, changes] : truth) {
    if (changes == 0) continue;
    ++modified;
    ++buckets[changes >= 3 ? ">=3" : std::to_string(changes)];
  }
  EXPECT_EQ(rep["lineage_count"].get<std::size_t>(), truth.size());
  for (const auto& [k, n] : buckets) {
    EXPECT_NEAR(rep["buckets"][k].get<double>(), 100.0 * static_cast<double>(n) / static_cast<double>(modified), 1e-9);
  }
  EXPECT_TRUE(fs::exists(find_one(dir.path() / "out", "lineages.csv")));

  auto empty = dir.path() / "empty";
  fs::create_directories(empty);
  relog::testing::git_or_throw(empty, {"init", "-q"});
  ASSERT_EQ(cli({"mine", empty.string(), "--out", (dir.path() / "e").string()}).code, 0);
  auto e = json::parse(slurp(find_one(dir.path() / "e", "report.json")));
  EXPECT_EQ(e["lineage_count"], 0);
  EXPECT_TRUE(e["buckets"].empty());

  EXPECT_EQ(cli({"mine", (dir.path() / "nowhere").string()}).code, kRepoUnreadable);
  EXPECT_EQ(cli({"mine", repo.string(), "--theta", "1.5"}).code, kConfigError);
}

TEST(CliRunDir, TimestampedAndUnique) {
  TempDir dir;
  auto a = make_run_dir(dir.path(), "run", "x");
  auto b = make_run_dir(dir.path(), "run", "x");
  EXPECT_NE(a, b);
  EXPECT_TRUE(fs::is_directory(a));
  EXPECT_TRUE(fs::is_directory(b));
  EXPECT_NE(a.filename().string().find("-run-x"), std::string::npos);
}

}  // namespace
}  // namespace relog::cli
