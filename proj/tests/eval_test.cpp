#include <gtest/gtest.h>

#include <fstream>
#include <random>

#include "relog/eval.hpp"
#include "support/temp_dir.hpp"

namespace relog::eval {
namespace {

using nlohmann::json;
using relog::testing::TempDir;

const std::filesystem::path kFixtures = RELOG_FIXTURES;

Benchmark load_unvalidated(const std::string& manifest) {
  LoadOptions opts;
  opts.validate = false;
  return load_benchmark(kFixtures / "manifests" / manifest, opts);
}

const BenchmarkInstance& find(const Benchmark& b, const std::string& id) {
  for (const auto& i : b.instances) {
    if (i.instance_id == id) return i;
  }
  throw std::runtime_error("no instance " + id);
}

void write(const std::filesystem::path& p, const std::string& text) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream(p, std::ios::trunc) << text;
}

// ------------------------------------------------------------------ metrics

TEST(Metrics, PrintedRowsAndZeroDivision) {
  auto a = score({311, 300, 159});
  EXPECT_NEAR(a.precision, 0.530, 0.001);
  EXPECT_NEAR(a.recall, 0.511, 0.001);
  EXPECT_NEAR(a.f1, 0.520, 0.001);
  auto b = score({225, 142, 75});
  EXPECT_NEAR(b.precision, 0.528, 0.001);
  EXPECT_NEAR(b.recall, 0.333, 0.001);
  EXPECT_NEAR(b.f1, 0.408, 0.001);
  auto z = score({10, 0, 0});
  EXPECT_EQ(z.precision, 0.0);
  EXPECT_EQ(z.recall, 0.0);
  EXPECT_EQ(z.f1, 0.0);
  EXPECT_EQ(score({0, 0, 0}).recall, 0.0);
}

TEST(Metrics, IdentitiesHoldForRandomCounts) {
  std::mt19937 rng(5);
  for (int i = 0; i < 2000; ++i) {
    Counts c;
    c.total = std::uniform_int_distribution<std::size_t>(0, 400)(rng);
    c.detected = std::uniform_int_distribution<std::size_t>(0, c.total)(rng);
    c.true_positives = std::uniform_int_distribution<std::size_t>(0, c.detected)(rng);
    auto s = score(c);
    ASSERT_GE(s.precision, 0.0);
    ASSERT_LE(s.precision, 1.0);
    ASSERT_LE(s.recall, 1.0);
    if (s.precision + s.recall > 0) {
      ASSERT_NEAR(s.f1, 2 * s.precision * s.recall / (s.precision + s.recall), 1e-9);
    } else {
      ASSERT_EQ(s.f1, 0.0);
    }
    ASSERT_LE(s.f1, std::max(s.precision, s.recall) + 1e-12);
  }
}

TEST(Metrics, CompileFailuresForfeitDetection) {
  std::vector<InstanceResult> rs(5);
  for (auto& r : rs) r.units = 2;
  rs[0].compile_failed = true;
  rs[0].verdict.defect_reported = true;  // ignored
  rs[0].statements = 4;
  rs[1].verdict.defect_reported = true;
  rs[1].true_positive = true;
  rs[1].repaired = true;
  rs[1].statements = 2;
  rs[2].verdict.defect_reported = true;
  rs[2].repaired = false;
  rs[3].mode = pipeline::Mode::indirect;
  rs[3].verdict.defect_reported = true;
  rs[3].true_positive = true;
  auto m = compute_metrics(rs, pipeline::Mode::direct);
  EXPECT_EQ(m.total, 4u);
  EXPECT_EQ(m.compilation_failures, 1u);
  EXPECT_EQ(m.detected_defects, 2u);
  EXPECT_EQ(m.true_positives, 1u);
  EXPECT_DOUBLE_EQ(m.precision, 0.5);
  EXPECT_DOUBLE_EQ(m.recall, 0.25);
  EXPECT_EQ(m.successful_repairs, 1u);
  EXPECT_DOUBLE_EQ(m.avg_logs, 6.0 / 8.0);
  auto ind = compute_metrics(rs, pipeline::Mode::indirect);
  EXPECT_EQ(ind.total, 1u);
  EXPECT_FALSE(ind.successful_repairs.has_value());
}

// ------------------------------------------------------------------ patches

TEST(Patch, RoundTripsRandomEdits) {
  std::mt19937 rng(17);
  for (int round = 0; round < 300; ++round) {
    std::vector<std::string> a;
    auto n = std::uniform_int_distribution<int>(0, 12)(rng);
    for (int i = 0; i < n; ++i) a.push_back("l" + std::to_string(std::uniform_int_distribution<int>(0, 5)(rng)));
    auto b = a;
    auto edits = std::uniform_int_distribution<int>(0, 4)(rng);
    for (int e = 0; e < edits; ++e) {
      int kind = std::uniform_int_distribution<int>(0, 2)(rng);
      if (kind == 0 || b.empty()) {
        auto at = std::uniform_int_distribution<std::size_t>(0, b.size())(rng);
        b.insert(b.begin() + static_cast<long>(at), "new" + std::to_string(e));
      } else if (kind == 1) {
        b.erase(b.begin() + static_cast<long>(std::uniform_int_distribution<std::size_t>(0, b.size() - 1)(rng)));
      } else {
        b[std::uniform_int_distribution<std::size_t>(0, b.size() - 1)(rng)] = "changed";
      }
    }
    auto ua = SourceUnit::from_lines("u.cpp", a);
    auto ub = SourceUnit::from_lines("u.cpp", b);
    auto p = make_patch(ua, ub);
    ASSERT_EQ(apply_patch(ua, p).lines, b) << p.dump();
    if (a == b) ASSERT_TRUE(p["hunks"].empty());
  }
}

TEST(Patch, RejectsBadScripts) {
  auto u = SourceUnit::from_lines("u.cpp", {"a", "b", "c"});
  EXPECT_THROW(apply_patch(u, json{{"file", "other.cpp"}, {"hunks", json::array()}}), PatchApplyFailure);
  EXPECT_THROW(apply_patch(u, json{{"file", "u.cpp"},
                                   {"hunks", {{{"line", 1}, {"delete", 2}, {"insert", json::array()}},
                                              {{"line", 2}, {"delete", 1}, {"insert", json::array()}}}}}),
               PatchApplyFailure);
  EXPECT_THROW(apply_patch(u, json{{"file", "u.cpp"}, {"hunks", {{{"line", 3}, {"delete", 2}, {"insert", {"x"}}}}}}),
               PatchApplyFailure);
  auto appended = apply_patch(u, json{{"file", "u.cpp"}, {"hunks", {{{"line", 4}, {"delete", 0}, {"insert", {"d"}}}}}});
  EXPECT_EQ(appended.lines, (std::vector<std::string>{"a", "b", "c", "d"}));
}

// ------------------------------------------------------------------ manifest

TEST(Manifest, LoadsCorpusAndDerivesPatches) {
  auto b = load_unvalidated("convergent.json");
  EXPECT_EQ(b.instances.size(), 10u);
  const auto& w = find(b, "window_sum");
  EXPECT_EQ(w.defective_unit.path, "window_sum.cpp");
  EXPECT_EQ(w.ground_truth.fixed_unit.path, "window_sum.cpp");
  ASSERT_TRUE(w.stub.patch.has_value());
  EXPECT_EQ(apply_patch(w.defective_unit, *w.stub.patch).lines, w.ground_truth.fixed_unit.lines);
  auto in = w.inputs();
  EXPECT_EQ(in.source.path, "window_sum.cpp");
  ASSERT_EQ(in.companions.size(), 1u);
  EXPECT_EQ(in.companions[0].path, "driver.cpp");

  auto ind = load_unvalidated("indirect.json");
  const auto& t = find(ind, "trip_speed");
  auto tin = t.inputs();
  EXPECT_EQ(tin.source.path, "trip_speed_caller.cpp");
  EXPECT_EQ(tin.companions.front().path, "trip_speed.cpp");
  EXPECT_FALSE(t.stub.patch.has_value());
}

TEST(Manifest, Rejections) {
  TempDir dir;
  auto m = dir.path() / "m.json";
  auto toolchain = (kFixtures / "runtime" / "toolchain.json").string();
  auto unit = (kFixtures / "corpus" / "trip_speed" / "trip_speed.cpp").string();
  auto fixed = (kFixtures / "corpus" / "trip_speed" / "fixed.cpp").string();
  json inst = {{"instance_id", "x"},
               {"mode", "indirect"},
               {"paths", {{"defective", unit}, {"fixed", fixed}}},
               {"failing_tests", {"t"}},
               {"fault_lines", {{{"file", "trip_speed.cpp"}, {"line", 8}}}}};
  write(m, json{{"toolchain", toolchain}, {"instances", {inst}}}.dump());
  EXPECT_THROW(load_benchmark(m, {false, {}}), ManifestInvalid);  // indirect without callers

  write(m, "{not json");
  EXPECT_THROW(load_benchmark(m, {false, {}}), ManifestInvalid);

  inst["mode"] = "direct";
  write(m, json{{"toolchain", toolchain}, {"instances", {inst, inst}}}.dump());
  EXPECT_THROW(load_benchmark(m, {false, {}}), ManifestInvalid);  // duplicate id

  inst["mode"] = "sideways";
  write(m, json{{"toolchain", toolchain}, {"instances", {inst}}}.dump());
  EXPECT_THROW(load_benchmark(m, {false, {}}), ManifestInvalid);

  EXPECT_THROW(load_benchmark(dir.path() / "absent.json"), ManifestInvalid);
}

TEST(Manifest, PassingFailingTestIsUnreproducible) {
  TempDir dir;
  auto base = kFixtures / "corpus" / "fahrenheit";
  json fixed_as_defective = {{"instance_id", "already_fixed"},
                             {"mode", "direct"},
                             {"paths",
                              {{"defective", (base / "fixed.cpp").string()},
                               {"fixed", (base / "fixed.cpp").string()},
                               {"support", {(base / "driver.cpp").string()}}}},
                             {"failing_tests", {"t_boil"}},
                             {"fault_lines", {{{"file", "fixed.cpp"}, {"line", 9}}}}};
  write(dir.path() / "m.json",
        json{{"toolchain", (kFixtures / "runtime" / "toolchain.json").string()}, {"instances", {fixed_as_defective}}}
            .dump());
  auto b = load_benchmark(dir.path() / "m.json");
  EXPECT_TRUE(b.instances.empty());
  ASSERT_EQ(b.excluded.size(), 1u);
  EXPECT_NE(b.excluded[0].find("already_fixed"), std::string::npos);
}

TEST(Manifest, ValidationIsCached) {
  TempDir dir;
  auto b = load_unvalidated("convergent.json");
  const auto& inst = find(b, "fahrenheit");
  auto first = validate_instance(inst, dir.path());
  EXPECT_EQ(first.status, toolchain::OutcomeStatus::test_failure);
  std::size_t entries = 0;
  for (auto& e : std::filesystem::directory_iterator(dir.path())) entries += e.path().extension() == ".json";
  EXPECT_EQ(entries, 1u);
  auto t0 = std::chrono::steady_clock::now();
  auto again = validate_instance(inst, dir.path());
  EXPECT_LT(std::chrono::steady_clock::now() - t0, std::chrono::milliseconds(200));
  EXPECT_EQ(json(again), json(first));
}

// ------------------------------------------------------------------ repair

TEST(Repair, GroundTruthEmptyAndBreakingPatches) {
  auto b = load_unvalidated("convergent.json");
  const auto& inst = find(b, "loan_months");
  auto truth = make_patch(inst.defective_unit, inst.ground_truth.fixed_unit);
  EXPECT_TRUE(validate_repair(inst, truth).ok);
  auto empty = validate_repair(inst, json{{"file", inst.defective_unit.path}, {"hunks", json::array()}});
  EXPECT_FALSE(empty.ok);
  EXPECT_NE(empty.reason.find("still fail"), std::string::npos);
  auto broken = validate_repair(
      inst, json{{"file", inst.defective_unit.path}, {"hunks", {{{"line", 8}, {"delete", 1}, {"insert", {"  int months = ;"}}}}}});
  EXPECT_FALSE(broken.ok);
  EXPECT_NE(broken.reason.find("compile"), std::string::npos);
  EXPECT_FALSE(validate_repair(inst, json{{"file", "elsewhere.cpp"}, {"hunks", json::array()}}).ok);
}

// ------------------------------------------------------------------ agent

class Capture : public gateway::Provider {
public:
  explicit Capture(gateway::StubConfig cfg) : stub_(std::move(cfg)) {}
  gateway::ProviderKind kind() const override { return gateway::ProviderKind::stub; }
  std::string complete_raw(const gateway::ProviderRequest& req) override {
    slots = req.envelope.slots;
    return stub_.complete_raw(req);
  }
  std::map<std::string, std::string> slots;

private:
  gateway::StubProvider stub_;
};

class Down : public gateway::Provider {
public:
  gateway::ProviderKind kind() const override { return gateway::ProviderKind::remote; }
  std::string complete_raw(const gateway::ProviderRequest&) override {
    throw gateway::ProviderUnavailable("connection refused");
  }
};

toolchain::ExecutionOutcome exception_outcome(const std::string& file, std::size_t line) {
  toolchain::ExecutionOutcome o;
  o.status = toolchain::OutcomeStatus::exception;
  o.exception = toolchain::ExceptionInfo{};
  o.exception->type_name = "std::out_of_range";
  o.exception->message = "index 4";
  o.exception->frames.push_back({"sum_window", file, line});
  return o;
}

TEST(Agent, ExceptionGivesLocationAndPatchInDirectMode) {
  auto b = load_unvalidated("convergent.json");
  const auto& inst = find(b, "window_sum");
  auto cap = std::make_shared<Capture>(inst.stub);
  gateway::Gateway gw(cap);
  auto v = run_debug_agent(inst, exception_outcome("window_sum.cpp", 12), LoggingPlan{"p", 0, {}}, gw);
  EXPECT_TRUE(v.defect_reported);
  ASSERT_TRUE(v.location.has_value());
  EXPECT_EQ(v.location->file, "window_sum.cpp");
  EXPECT_EQ(v.location->line, 12u);
  EXPECT_TRUE(v.patch.has_value());
  EXPECT_TRUE(tp_match(v, inst));
  EXPECT_NE(cap->slots.at("context").find("int end = start + k;"), std::string::npos);
  EXPECT_EQ(cap->slots.at("mode"), "direct");
}

TEST(Agent, SilentBugWithoutLogsIsMissed) {
  auto b = load_unvalidated("convergent.json");
  const auto& inst = find(b, "fahrenheit");
  toolchain::ExecutionOutcome o;
  o.status = toolchain::OutcomeStatus::test_failure;
  o.stdout_text = "FAIL t_boil: to_fahrenheit(100) expected 212 got 203\n";
  gateway::Gateway gw(std::make_shared<gateway::StubProvider>(inst.stub));
  auto v = run_debug_agent(inst, o, LoggingPlan{"p", 0, {}}, gw);
  EXPECT_FALSE(v.defect_reported);
  EXPECT_FALSE(tp_match(v, inst));
}

TEST(Agent, IndirectPromptHidesDefectiveSource) {
  auto b = load_unvalidated("indirect.json");
  const auto& inst = find(b, "trip_speed");
  auto cap = std::make_shared<Capture>(inst.stub);
  gateway::Gateway gw(cap);
  auto v = run_debug_agent(inst, exception_outcome("trip_speed.cpp", 10), LoggingPlan{"p", 0, {}}, gw);
  EXPECT_TRUE(v.defect_reported);
  EXPECT_FALSE(v.patch.has_value());
  EXPECT_EQ(cap->slots.at("mode"), "indirect");
  EXPECT_NE(cap->slots.at("context").find("trip_summary"), std::string::npos);
  EXPECT_EQ(cap->slots.at("context").find("hours_x100"), std::string::npos);
}

TEST(Agent, GatewayErrorCountsAsNotDetected) {
  auto b = load_unvalidated("convergent.json");
  const auto& inst = find(b, "window_sum");
  gateway::Gateway gw(std::make_shared<Down>());
  auto v = run_debug_agent(inst, exception_outcome("window_sum.cpp", 12), LoggingPlan{"p", 0, {}}, gw);
  EXPECT_FALSE(v.defect_reported);
  ASSERT_TRUE(v.error.has_value());
  EXPECT_NE(v.error->find("connection refused"), std::string::npos);
}

TEST(Agent, TpMatchAtMethodGranularity) {
  auto b = load_unvalidated("ablation.json");
  const auto& inst = find(b, "ratio_helper");
  const auto fault = inst.ground_truth.fault_lines.front();
  DebugVerdict v;
  v.defect_reported = true;
  v.location = ReportedLocation{fault.file, fault.line, ""};
  EXPECT_TRUE(tp_match(v, inst));
  v.location->line = fault.line + 2;  // same method
  EXPECT_TRUE(tp_match(v, inst));
  v.location->line = 9;  // inside checked_div
  EXPECT_FALSE(tp_match(v, inst));
  v.location = ReportedLocation{"driver.cpp", fault.line, ""};
  EXPECT_FALSE(tp_match(v, inst));
  v.location = ReportedLocation{fault.file, 0, "hit_ratio"};
  EXPECT_TRUE(tp_match(v, inst));
  v.defect_reported = false;
  EXPECT_FALSE(tp_match(v, inst));
}

// ------------------------------------------------------------------ runs

TEST(Evaluate, IndirectCorpusLogsBeatNoLogging) {
  auto b = load_benchmark(kFixtures / "manifests" / "indirect.json");
  ASSERT_EQ(b.instances.size(), 4u);
  EvalOptions opts;
  auto relog = evaluate(b, opts, "relog");
  opts.generator = Generator::none;
  auto none = evaluate(b, opts, "none");
  const auto* r = relog.for_mode(pipeline::Mode::indirect);
  const auto* n = none.for_mode(pipeline::Mode::indirect);
  ASSERT_TRUE(r && n);
  EXPECT_EQ(r->compilation_failures, 0u);
  EXPECT_GT(r->recall, n->recall);
  EXPECT_EQ(n->avg_logs, 0.0);
  EXPECT_GT(r->avg_logs, 0.0);
  auto table = render_table({&relog, &none});
  EXPECT_NE(table.find("Avg. Logs per Caller"), std::string::npos);
  EXPECT_NE(table.find(kTpRule), std::string::npos);
  EXPECT_EQ(relog.to_json()["instances"].size(), 4u);
}

TEST(Evaluate, PlanFileGenerator) {
  TempDir dir;
  auto b = load_unvalidated("convergent.json");
  Benchmark one{"one", {find(b, "fahrenheit")}, {}};
  // logs the key variable: the stub agent flags the wrong offset
  write(dir.path() / "fahrenheit.json",
        R"({"plan_id": "ext", "revision": 0, "statements": [
             {"anchor_line": 9, "position": "after", "severity": "debug",
              "template": "offset={}", "variables": ["offset"]}]})");
  EvalOptions opts;
  opts.generator = Generator::plan_file;
  opts.plan_dir = dir.path();
  auto rep = evaluate(one, opts);
  ASSERT_EQ(rep.results.size(), 1u);
  EXPECT_FALSE(rep.results[0].compile_failed);
  EXPECT_EQ(rep.results[0].statements, 1u);
  EXPECT_TRUE(rep.results[0].true_positive);

  write(dir.path() / "fahrenheit.json",
        R"({"plan_id": "ext", "revision": 0, "statements": [
             {"anchor_line": 9, "position": "after", "severity": "debug",
              "template": "x={}", "variables": ["no_such_name"]}]})");
  auto broken = evaluate(one, opts);
  EXPECT_TRUE(broken.results[0].compile_failed);
  EXPECT_EQ(broken.metrics[0].compilation_failures, 1u);
}

}  // namespace
}  // namespace relog::eval
