#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "relog/core.hpp"

namespace relog {

/// Renders a plan into a source as marker-tagged lines. Anchors refer to
/// original lines; `before` statements go directly above their anchor and
/// `after` statements directly below, keeping plan order within an anchor.
InstrumentedUnit apply_plan(const SourceUnit& source, const LoggingPlan& plan,
                            const RenderProfile& profile = RenderProfile::cpp_default());

/// Inverse of apply_plan. Throws MarkerCorruption when a marker line does not
/// parse back into a statement, or when marker lines were edited by hand.
std::pair<SourceUnit, LoggingPlan> strip_plan(const InstrumentedUnit& instr);

PreservationReport verify_logic_preserved(const SourceUnit& original, const InstrumentedUnit& instr);

/// Collapses duplicates and sorts by (anchor_line, original order).
LoggingPlan normalize_plan(const LoggingPlan& plan);

/// One rendered line (call + trailing marker comment).
std::string render_statement(const LoggingStatement& s, std::string_view plan_id, std::size_t index,
                             const RenderProfile& profile);

struct MarkerInfo {
  std::string plan_id;
  std::size_t index = 0;
  Position position = Position::before;
  std::size_t marker_offset = 0;  // byte offset of the comment opener
};

/// Finds the trailing marker comment of a rendered line.
std::optional<MarkerInfo> find_marker(std::string_view line, const RenderProfile& profile);

/// Parses the call part of a marker line back into severity, template and
/// variables. Anchor and position come from the caller.
std::optional<LoggingStatement> parse_call(std::string_view call, const RenderProfile& profile);

/// Splits a comma-separated argument list at top level, respecting
/// brackets and string/char literals.
std::vector<std::string> split_top_level(std::string_view args);

std::string escape_literal(std::string_view text);
std::optional<std::string> unescape_literal(std::string_view body);

}  // namespace relog
