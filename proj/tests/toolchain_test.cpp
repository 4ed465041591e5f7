#include <gtest/gtest.h>

#include "relog/instrument.hpp"
#include "relog/toolchain.hpp"
#include "support/fixture_programs.hpp"

namespace relog::toolchain {
namespace {

using relog::testing::fixture_profile;
using relog::testing::window_driver;
using relog::testing::window_unit;

class ToolchainTest : public ::testing::Test {
protected:
  ToolchainProfile profile = fixture_profile();
  SourceUnit unit = window_unit();
  std::vector<SourceUnit> companions = {window_driver()};

  InstrumentedUnit with(std::vector<LoggingStatement> stmts) {
    return apply_plan(unit, LoggingPlan{"t", 0, std::move(stmts)}, profile.render);
  }
};

TEST_F(ToolchainTest, PristineCompiles) {
  auto r = compile(with({}), profile, companions);
  EXPECT_TRUE(r.ok) << r.output;
}

TEST_F(ToolchainTest, UndeclaredVariableMapsToAnchor) {
  auto r = compile(with({{Severity::debug, "ghost={}", {"ghost_value"}, 6, Position::before}}), profile, companions);
  ASSERT_FALSE(r.ok);
  bool found = false;
  for (const auto& d : r.diagnostics) {
    if (d.is_error() && d.file == "unit.cpp") {
      EXPECT_EQ(d.line, 6u);
      ASSERT_TRUE(d.statement_index.has_value());
      EXPECT_EQ(*d.statement_index, 0u);
      EXPECT_NE(d.message.find("undeclared identifier"), std::string::npos);
      found = true;
    }
  }
  EXPECT_TRUE(found) << r.output;
}

TEST_F(ToolchainTest, StatementAfterReturnIsUnreachable) {
  auto r = compile(with({{Severity::info, std::string("done"), {}, 8, Position::after}}), profile, companions);
  ASSERT_FALSE(r.ok);
  ASSERT_FALSE(r.diagnostics.empty());
  EXPECT_NE(r.diagnostics.front().message.find("will never be executed"), std::string::npos);
  EXPECT_EQ(r.diagnostics.front().line, 8u);
  EXPECT_EQ(r.diagnostics.front().statement_index, std::optional<std::size_t>(0));
}

TEST_F(ToolchainTest, MissingCompilerIsUnavailable) {
  profile.compile_cmd = "no-such-compiler-relog -o prog driver.cpp";
  EXPECT_THROW(compile(with({}), profile, companions), ToolchainUnavailable);
}

TEST_F(ToolchainTest, ClassifiesOutcomes) {
  auto instr = with({{Severity::debug, "i={} total={}", {"i", "total"}, 6, Position::before}});
  Workspace ws(profile, instr, companions);
  ASSERT_TRUE(ws.compile().ok);

  auto pass = ws.execute({"t_sum"});
  EXPECT_EQ(pass.status, OutcomeStatus::pass);
  EXPECT_EQ(pass.exit_code, 0);
  EXPECT_EQ(pass.log_events.size(), 3u);

  auto thrown = ws.execute({"t_over"});
  ASSERT_EQ(thrown.status, OutcomeStatus::exception);
  ASSERT_TRUE(thrown.exception.has_value());
  EXPECT_EQ(thrown.exception->type_name, "std::out_of_range");
  EXPECT_EQ(thrown.exception->message, "index past end");
  ASSERT_FALSE(thrown.exception->frames.empty());
  EXPECT_EQ(thrown.exception->frames.front().file, "unit.cpp");
  EXPECT_EQ(thrown.exception->frames.front().line, 5u);  // original coordinates
  EXPECT_EQ(thrown.exception->frames.front().rendered_line, 5u);

  auto wrong = ws.execute({"t_wrong"});
  EXPECT_EQ(wrong.status, OutcomeStatus::test_failure);
  EXPECT_NE(wrong.stdout_text.find("FAIL t_wrong"), std::string::npos);
}

TEST_F(ToolchainTest, TimeoutKillsRun) {
  profile.timeout_s = 2;
  Workspace ws(profile, with({}), companions);
  ASSERT_TRUE(ws.compile().ok);
  auto out = ws.execute({"t_spin"});
  EXPECT_EQ(out.status, OutcomeStatus::timeout);
  EXPECT_FALSE(out.exit_code.has_value());
  EXPECT_GE(out.wall_time_ms, 2000);
}

TEST_F(ToolchainTest, CrashWithoutTestCommand) {
  profile.test_cmd.reset();
  profile.run_cmd = "./prog t_wrong";
  Workspace ws(profile, with({}), companions);
  ASSERT_TRUE(ws.compile().ok);
  EXPECT_EQ(ws.execute().status, OutcomeStatus::crash);
}

TEST_F(ToolchainTest, DeterministicAndSideEffectFree) {
  auto a = execute(with({}), profile, companions, {"t_over"});
  auto b = execute(with({}), profile, companions, {"t_over"});
  EXPECT_EQ(a.status, b.status);
  EXPECT_EQ(a.stderr_text, b.stderr_text);
  EXPECT_EQ(a.stdout_text, b.stdout_text);
  // an empty plan renders the pristine text, so the pristine run is the same run
  EXPECT_EQ(with({}).rendered().text(), unit.text());
}

TEST(ExtractLogEvents, Cases) {
  auto profile = fixture_profile();
  EXPECT_TRUE(extract_log_events("", profile).empty());
  auto events = extract_log_events(
      "noise\n@@RELOG INFO a\nmore noise\n@@RELOG DEBUG [#7] x=1\n@@RELOG WARN c\n not @@RELOG INFO\n", profile);
  ASSERT_EQ(events.size(), 3u);
  EXPECT_EQ(events[0].sequence, 1u);
  EXPECT_EQ(events[2].sequence, 3u);
  EXPECT_EQ(events[1].severity, Severity::debug);
  EXPECT_EQ(events[1].source_marker, std::optional<std::size_t>(7));
  EXPECT_EQ(events[1].message, "[#7] x=1");
  EXPECT_FALSE(events[0].source_marker.has_value());
}

TEST(ProfileJson, RejectsNonPositiveTimeout) {
  auto j = fixture_profile().to_json();
  j["timeout_s"] = 0;
  EXPECT_THROW(ToolchainProfile::from_json(j, "."), ProfileInvalid);
}

}  // namespace
}  // namespace relog::toolchain
