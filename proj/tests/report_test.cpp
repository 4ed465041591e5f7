#include <gtest/gtest.h>

#include <fstream>

#include "relog/report.hpp"
#include "support/temp_dir.hpp"

namespace relog::report {
namespace {

using pipeline::CriticVerdict;
using pipeline::IterationRecord;
using pipeline::RunLedger;
using pipeline::Termination;

LoggingStatement stmt(std::size_t line, Position pos, std::string tpl, std::vector<std::string> vars,
                      Severity sev = Severity::debug) {
  return {sev, std::move(tpl), std::move(vars), line, pos};
}

LoggingPlan plan(std::uint64_t rev, std::vector<LoggingStatement> s) { return {"relog", rev, std::move(s)}; }

std::size_t count(const std::string& hay, const std::string& needle) {
  std::size_t n = 0;
  for (auto p = hay.find(needle); p != std::string::npos; p = hay.find(needle, p + 1)) ++n;
  return n;
}

RunLedger two_iterations() {
  RunLedger l;
  l.source_path = "window_sum.cpp";
  l.source_digest = std::string(64, 'a');
  l.config = {{"mode", "direct"}, {"max_iterations", 5}, {"fix_budget", 3}};

  IterationRecord r0;
  r0.iteration = 0;
  toolchain::ExecutionOutcome probe;
  probe.status = toolchain::OutcomeStatus::exception;
  probe.exception = toolchain::ExceptionInfo{"std::out_of_range", "index 4 past 4", {{"sum_window", "window_sum.cpp", 12}}};
  r0.probe = probe;
  r0.repairs.push_back({plan(0, {stmt(9, Position::after, "end={}", {"end"}), stmt(12, Position::after, "unreachable", {})}),
                        toolchain::CompileResult{false,
                                                 {{"window_sum.cpp", 12, 14, "error", "expected ';'", "raw", 1}},
                                                 1,
                                                 "raw"}});
  r0.plan = plan(1, {stmt(9, Position::after, "end={}", {"end"}), stmt(12, Position::before, "i={}", {"i"})});
  r0.compile.ok = true;
  toolchain::ExecutionOutcome o0 = probe;
  o0.log_events.push_back({Severity::debug, "[#0] end=4", 0, 0});
  r0.outcome = o0;
  CriticVerdict v0;
  v0.traceability = 1;
  v0.state_visibility = 2;
  v0.causal_linkage = 0;
  v0.feedback.push_back({pipeline::Action::add, 10, "start", "log the window start"});
  v0.rationale = "the loop bound is not visible";
  r0.verdict = v0;
  r0.gateway_calls = {{"generation", std::string(64, 'b')}, {"fixer", std::string(64, 'c')}, {"critic", std::string(64, 'd')}};

  IterationRecord r1;
  r1.iteration = 1;
  r1.plan = plan(2, {stmt(9, Position::after, "end={}", {"end"}), stmt(10, Position::before, "start={} k={}", {"start", "k"}),
                     stmt(12, Position::before, "i={} size={}", {"i", "v.size()"})});
  r1.compile.ok = true;
  r1.outcome = o0;
  CriticVerdict v1;
  v1.traceability = v1.state_visibility = v1.causal_linkage = 2;
  v1.sufficient = true;
  r1.verdict = v1;

  l.iterations = {r0, r1};
  l.termination = Termination::sufficient;
  l.final_plan = r1.plan;
  return l;
}

TEST(PlanDiff, AddedRemovedModified) {
  auto a = plan(0, {stmt(3, Position::before, "x={}", {"x"}), stmt(5, Position::after, "y", {}), stmt(7, Position::after, "z", {})});
  auto b = plan(1, {stmt(3, Position::before, "x={}", {"x"}), stmt(5, Position::after, "y={}", {"y"}),
                    stmt(6, Position::before, "w", {})});
  auto d = diff_plans(a, b);
  ASSERT_EQ(d.size(), 3u);
  EXPECT_EQ(d[0].kind, DiffKind::modified);
  EXPECT_EQ(d[0].after->template_text, "y={}");
  EXPECT_EQ(d[1].kind, DiffKind::added);
  EXPECT_EQ(d[1].after->anchor_line, 6u);
  EXPECT_EQ(d[2].kind, DiffKind::removed);
  EXPECT_EQ(d[2].before->anchor_line, 7u);
  EXPECT_TRUE(diff_plans(a, a).empty());
  EXPECT_EQ(describe(b.statements[1]), "L5 after debug \"y={}\" [y]");
}

TEST(Trace, TwoIterationsShowSectionsAndDiff) {
  auto text = render_trace(two_iterations());
  EXPECT_EQ(count(text, "== iteration "), 2u);
  EXPECT_NE(text.find("termination: sufficient after 2 iterations"), std::string::npos);
  // fixer turns the unreachable statement into a before-anchored one
  EXPECT_NE(text.find("window_sum.cpp:12: error: expected ';' (statement #1)"), std::string::npos);
  EXPECT_NE(text.find("fixer -> r1"), std::string::npos);
  // second section diffs against the first iteration's compiled plan
  auto second = text.substr(text.find("== iteration 1 =="));
  EXPECT_NE(second.find("vs r1"), std::string::npos);
  EXPECT_NE(second.find("+ L10 before debug \"start={} k={}\" [start, k]"), std::string::npos);
  EXPECT_NE(second.find("~ L12 before debug \"i={}\" [i]"), std::string::npos);
  EXPECT_EQ(second.find("L9 after"), std::string::npos);
  EXPECT_NE(text.find("critic: traceability 1, state_visibility 2, causal_linkage 0 -> insufficient"), std::string::npos);
  EXPECT_NE(text.find("add L10 start: log the window start"), std::string::npos);
  EXPECT_NE(text.find("[debug] [#0] end=4  <- #0 L9"), std::string::npos);
  EXPECT_NE(text.find("at sum_window (window_sum.cpp:12)"), std::string::npos);
}

TEST(Trace, CompileFailedEndsAtDiagnostics) {
  auto l = two_iterations();
  l.iterations.resize(1);
  auto& r = l.iterations[0];
  r.compile = r.repairs.front().compile;
  r.plan = r.repairs.front().plan;
  r.repairs.clear();
  r.outcome.reset();
  r.verdict.reset();
  l.termination = Termination::compile_failed;
  auto text = render_trace(l);
  auto last = text.substr(text.rfind('\n', text.size() - 2) + 1);
  EXPECT_EQ(last, "    window_sum.cpp:12: error: expected ';' (statement #1)\n");
  EXPECT_NE(text.find("termination: compile_failed"), std::string::npos);
}

TEST(Trace, PureFunctionOfLedgerFile) {
  relog::testing::TempDir dir;
  auto l = two_iterations();
  auto file = dir.path() / "ledger.jsonl";
  std::ofstream(file) << l.to_jsonl();
  auto a = render_trace(read_ledger(file));
  auto b = render_trace(read_ledger(file));
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, render_trace(l));
  EXPECT_THROW(read_ledger(dir.path() / "missing.jsonl"), Error);
}

TEST(Trace, CapsEventLines) {
  auto l = two_iterations();
  auto& events = l.iterations[1].outcome->log_events;
  for (std::size_t i = 0; i < 30; ++i) events.push_back({Severity::info, "tick " + std::to_string(i), std::nullopt, i});
  TraceOptions opts;
  opts.max_events = 4;
  auto text = render_trace(l, opts);
  EXPECT_NE(text.find("... 27 more"), std::string::npos);
}

}  // namespace
}  // namespace relog::report
