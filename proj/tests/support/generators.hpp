#pragma once

#include <random>
#include <string>
#include <vector>

#include "relog/core.hpp"

namespace relog::testing {

/// Random C-like sources and valid plans for property tests.
class PlanGenerator {
public:
  explicit PlanGenerator(std::uint64_t seed) : rng_(seed) {}

  SourceUnit source() {
    static const std::vector<std::string> shapes = {
        "int x = 0;", "  total += v[i];", "}", "", "    return acc;", "for (int i = 0; i < n; ++i) {",
        "  // comment with \"quotes\"", "\tif (a > b) {", "x = f(a, b);", "  s = \"/* not a marker */\";",
        "    log(\"RELOG\");", "  ",
    };
    std::size_t n = pick(1, 40);
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < n; ++i) lines.push_back(shapes[pick(0, shapes.size() - 1)]);
    return SourceUnit::from_lines("unit.cpp", std::move(lines), pick(0, 3) != 0);
  }

  LoggingStatement statement(std::size_t line_count) {
    static const std::vector<std::string> words = {"enter", "value", "state", "i", "acc", "x=", "\"q\"", "a\\b",
                                                   "tab\there", "path", "{", "}", "%d", "ok", "--", "é"};
    static const std::vector<std::string> exprs = {"x", "acc", "v[i]", "f(a, b)", "obj.field", "p->next",
                                                   "std::string(\"a,b\")", "'c'", "n * 2", "g({1, 2})"};
    LoggingStatement s;
    s.severity = static_cast<Severity>(pick(0, 4));
    s.position = pick(0, 1) ? Position::after : Position::before;
    s.anchor_line = pick(1, line_count);
    std::size_t vars = pick(0, 3);
    std::string t = words[pick(0, words.size() - 1)];
    for (std::size_t v = 0; v < vars; ++v) {
      t += " " + words[pick(0, words.size() - 1)] + "={}";
      s.variables.push_back(exprs[pick(0, exprs.size() - 1)]);
    }
    s.template_text = t;
    if (placeholder_count(s.template_text) != s.variables.size()) {
      s.template_text = "fallback";
      s.variables.clear();
    }
    return s;
  }

  LoggingPlan plan(const SourceUnit& src) {
    LoggingPlan p;
    p.plan_id = "p" + std::to_string(pick(0, 999));
    p.revision = pick(0, 9);
    std::size_t n = pick(0, 12);
    for (std::size_t i = 0; i < n; ++i) p.statements.push_back(statement(src.line_count()));
    if (n > 0 && pick(0, 2) == 0) p.statements.push_back(p.statements.front());
    return p;
  }

  std::size_t pick(std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_); }

private:
  std::mt19937_64 rng_;
};

}  // namespace relog::testing
