#include <gtest/gtest.h>

#include "relog/instrument.hpp"
#include "support/generators.hpp"

namespace relog {
namespace {

SourceUnit lines(std::initializer_list<std::string> l) { return SourceUnit::from_lines("unit.cpp", l); }

LoggingStatement stmt(std::size_t anchor, std::string tmpl, std::vector<std::string> vars = {},
                      Position pos = Position::before, Severity sev = Severity::info) {
  return {sev, std::move(tmpl), std::move(vars), anchor, pos};
}

std::vector<std::string> unmarked(const InstrumentedUnit& u) {
  std::vector<std::string> out;
  for (const auto& l : u.rendered_lines) {
    if (!find_marker(l, u.profile)) out.push_back(l);
  }
  return out;
}

TEST(ApplyPlan, InsertsBeforeAnchors) {
  auto src = lines({"L1", "L2", "L3", "L4"});
  LoggingPlan plan{"p", 0, {stmt(2, "a"), stmt(4, "b")}};
  auto u = apply_plan(src, plan);
  ASSERT_EQ(u.rendered_lines.size(), 6u);
  EXPECT_EQ(u.rendered_lines[0], "L1");
  EXPECT_EQ(u.rendered_lines[1], "rlog::info(\"[#0] a\"); /*RELOG:p:0:b*/");
  EXPECT_EQ(u.rendered_lines[2], "L2");
  EXPECT_EQ(u.rendered_lines[3], "L3");
  EXPECT_EQ(u.rendered_lines[4], "rlog::info(\"[#1] b\"); /*RELOG:p:1:b*/");
  EXPECT_EQ(u.rendered_lines[5], "L4");
  EXPECT_EQ(u.line_map, (std::vector<std::size_t>{1, 3, 4, 6}));
}

TEST(ApplyPlan, EmptyPlanIsIdentity) {
  auto src = lines({"a", "b", "c"});
  auto u = apply_plan(src, LoggingPlan{});
  EXPECT_EQ(u.rendered_lines, src.lines);
  EXPECT_EQ(u.line_map, (std::vector<std::size_t>{1, 2, 3}));
}

TEST(ApplyPlan, SameAnchorKeepsOrder) {
  auto src = lines({"L1", "L2", "L3"});
  LoggingPlan plan{"p", 0, {stmt(2, "first"), stmt(2, "second")}};
  auto u = apply_plan(src, plan);
  ASSERT_EQ(u.rendered_lines.size(), 5u);
  EXPECT_NE(u.rendered_lines[1].find("first"), std::string::npos);
  EXPECT_NE(u.rendered_lines[2].find("second"), std::string::npos);
  EXPECT_EQ(u.rendered_lines[3], "L2");
}

TEST(ApplyPlan, AfterPositionAndIndentation) {
  auto src = lines({"int f(int a) {", "    int b = a * 2;", "    return b;", "}"});
  LoggingPlan plan{"p", 0, {stmt(2, "b={}", {"b"}, Position::after, Severity::debug)}};
  auto u = apply_plan(src, plan);
  EXPECT_EQ(u.rendered_lines[2], "    rlog::debug(\"[#0] b={}\", b); /*RELOG:p:0:a*/");
  EXPECT_EQ(u.rendered_lines[3], "    return b;");
}

TEST(ApplyPlan, AnchorOutOfRange) {
  auto src = lines({"a", "b"});
  try {
    apply_plan(src, LoggingPlan{"p", 0, {stmt(3, "x")}});
    FAIL() << "expected AnchorOutOfRange";
  } catch (const AnchorOutOfRange& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(ApplyPlan, RejectsSlotMismatch) {
  auto src = lines({"a"});
  EXPECT_THROW(apply_plan(src, LoggingPlan{"p", 0, {stmt(1, "x={} y={}", {"x"})}}), InvalidStatement);
  EXPECT_THROW(apply_plan(src, LoggingPlan{"p", 0, {stmt(1, "")}}), InvalidStatement);
}

TEST(StripPlan, RoundTrip) {
  auto src = lines({"a", "b", "c"});
  LoggingPlan plan{"p7", 3,
                   {stmt(1, "q=\"{}\" \\ done", {"f(x, y)"}, Position::after), stmt(3, "tail {}", {"v[i]"})}};
  auto [back_src, back_plan] = strip_plan(apply_plan(src, plan));
  EXPECT_EQ(back_src, src);
  EXPECT_EQ(back_plan, plan);
}

TEST(StripPlan, EmptyPlan) {
  auto src = lines({"a", "b"});
  auto [s, p] = strip_plan(apply_plan(src, LoggingPlan{"x", 2, {}}));
  EXPECT_EQ(s, src);
  EXPECT_TRUE(p.statements.empty());
  EXPECT_EQ(p.revision, 2u);
}

TEST(StripPlan, HandEditedMarkerIsCorruption) {
  auto src = lines({"a", "b"});
  auto u = apply_plan(src, LoggingPlan{"p", 0, {stmt(2, "x")}});
  auto& line = u.rendered_lines[1];
  line = line.substr(0, line.find(" /*RELOG"));
  EXPECT_THROW(strip_plan(u), MarkerCorruption);
}

TEST(StripPlan, GarbledCallIsCorruption) {
  auto src = lines({"a"});
  auto u = apply_plan(src, LoggingPlan{"p", 0, {stmt(1, "x")}});
  u.rendered_lines[0] = "printf(\"x\"); /*RELOG:p:0:b*/";
  EXPECT_THROW(strip_plan(u), MarkerCorruption);
}

TEST(VerifyLogic, DetectsDeletionAndInsertion) {
  auto src = lines({"a", "b", "c"});
  auto u = apply_plan(src, LoggingPlan{"p", 0, {stmt(2, "x")}});
  EXPECT_TRUE(verify_logic_preserved(src, u).ok);

  auto deleted = u;
  deleted.rendered_lines.erase(deleted.rendered_lines.begin() + 2);  // original "b"
  auto r = verify_logic_preserved(src, deleted);
  EXPECT_FALSE(r.ok);
  EXPECT_EQ(r.first_divergent_line, 2u);

  auto added = u;
  added.rendered_lines.insert(added.rendered_lines.begin() + 1, "evil();");
  EXPECT_FALSE(verify_logic_preserved(src, added).ok);
}

TEST(NormalizePlan, CollapsesDuplicatesAndSorts) {
  LoggingPlan p{"p", 4, {stmt(5, "x"), stmt(2, "y"), stmt(5, "x")}};
  auto n = normalize_plan(p);
  ASSERT_EQ(n.statements.size(), 2u);
  EXPECT_EQ(n.statements[0].anchor_line, 2u);
  EXPECT_EQ(n.statements[1].anchor_line, 5u);
  EXPECT_EQ(n.revision, 4u);
  EXPECT_EQ(normalize_plan(n), n);
}

TEST(PlanJson, SchemaAndRoundTrip) {
  LoggingPlan p{"p", 1, {stmt(3, "x={}", {"x"}, Position::after, Severity::warn)}};
  nlohmann::json j = p;
  EXPECT_EQ(j.dump(),
            R"({"plan_id":"p","revision":1,"statements":[{"anchor_line":3,"position":"after","severity":"warn","template":"x={}","variables":["x"]}]})");
  EXPECT_FALSE(check_plan_schema(j).has_value());
  EXPECT_EQ(j.get<LoggingPlan>(), p);
  j["statements"][0]["variables"] = nlohmann::json::array();
  EXPECT_TRUE(check_plan_schema(j).has_value());
  EXPECT_TRUE(check_plan_schema(nlohmann::json::parse(R"({"plan_id":"p","revision":0})")).has_value());
  EXPECT_TRUE(check_plan_schema(nlohmann::json("prose")).has_value());
}

TEST(SourceUnit, DigestAndText) {
  auto u = SourceUnit::from_text("a.cpp", "x\ny");
  EXPECT_FALSE(u.final_newline);
  EXPECT_EQ(u.text(), "x\ny");
  EXPECT_TRUE(u.digest_ok());
  u.lines[0] = "z";
  EXPECT_FALSE(u.digest_ok());
  EXPECT_EQ(SourceUnit::from_text("a", "").line_count(), 0u);
}

TEST(Properties, InstrumentorInvariants) {
  testing::PlanGenerator gen(0x5eed);
  for (int trial = 0; trial < 200; ++trial) {
    auto src = gen.source();
    auto plan = gen.plan(src);
    auto u = apply_plan(src, plan);
    ASSERT_EQ(u.rendered_lines.size(), src.line_count() + plan.statements.size());
    for (std::size_t i = 1; i < u.line_map.size(); ++i) ASSERT_LT(u.line_map[i - 1], u.line_map[i]);
    ASSERT_TRUE(verify_logic_preserved(src, u).ok);
    ASSERT_EQ(unmarked(u), src.lines);
    auto [s2, p2] = strip_plan(u);
    ASSERT_EQ(s2, src);
    ASSERT_EQ(normalize_plan(p2), normalize_plan(plan));
    ASSERT_EQ(apply_plan(s2, p2).rendered_lines, u.rendered_lines);
  }
}

}  // namespace
}  // namespace relog
