#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace relog {

enum class Severity { trace, debug, info, warn, error };
enum class Position { before, after };

std::string_view to_string(Severity s);
std::string_view to_string(Position p);
Severity parse_severity(std::string_view text);
Position parse_position(std::string_view text);

/// Base of every error this library throws.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class InvalidStatement : public Error {
public:
  using Error::Error;
};

class AnchorOutOfRange : public Error {
public:
  AnchorOutOfRange(std::size_t line, std::size_t line_count)
      : Error("anchor line " + std::to_string(line) + " outside source of " +
              std::to_string(line_count) + " lines"),
        line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

class MarkerCorruption : public Error {
public:
  MarkerCorruption(std::size_t rendered_line, const std::string& why)
      : Error("marker corruption at rendered line " + std::to_string(rendered_line) + ": " + why),
        rendered_line_(rendered_line) {}
  std::size_t rendered_line() const noexcept { return rendered_line_; }

private:
  std::size_t rendered_line_;
};

/// One logging call: severity, a template with `{}` slots, and one
/// expression per slot, anchored to a line of the ORIGINAL source.
struct LoggingStatement {
  Severity severity = Severity::info;
  std::string template_text;
  std::vector<std::string> variables;
  std::size_t anchor_line = 1;
  Position position = Position::before;

  bool operator==(const LoggingStatement&) const = default;
};

/// Number of `{}` placeholders in a template.
std::size_t placeholder_count(std::string_view template_text, std::string_view token = "{}");

/// Throws InvalidStatement when the statement breaks its invariants.
void validate(const LoggingStatement& s, std::string_view placeholder = "{}");

struct LoggingPlan {
  std::string plan_id = "plan";
  std::uint64_t revision = 0;
  std::vector<LoggingStatement> statements;

  bool operator==(const LoggingPlan&) const = default;
};

struct SourceUnit {
  std::string path;
  std::vector<std::string> lines;
  bool final_newline = true;
  std::string digest;

  static SourceUnit from_text(std::string path, std::string_view text);
  static SourceUnit from_lines(std::string path, std::vector<std::string> lines, bool final_newline = true);

  std::string text() const;
  std::size_t line_count() const noexcept { return lines.size(); }
  bool digest_ok() const;

  bool operator==(const SourceUnit&) const = default;
};

/// Surface syntax of logging calls for a target language.
struct RenderProfile {
  /// Call pattern per severity. `{template}` is the escaped template literal
  /// body, `{args}` expands to `, v1, v2` (empty when there are no variables).
  std::map<Severity, std::string> call_patterns;
  std::string placeholder = "{}";
  /// Prepended to the template body; `{index}` is the plan index.
  std::string index_token = "[#{index}] ";
  std::string comment_open = "/*";
  std::string comment_close = "*/";
  std::string marker_tag = "RELOG";
  std::string block_open = "{";
  std::string block_close = "}";

  static RenderProfile cpp_default();
};

void to_json(nlohmann::json& j, const RenderProfile& p);
void from_json(const nlohmann::json& j, RenderProfile& p);

struct InstrumentedUnit {
  SourceUnit base;
  std::vector<std::string> rendered_lines;
  /// line_map[i] is the 1-based rendered line of original line i+1.
  std::vector<std::size_t> line_map;
  std::uint64_t plan_revision = 0;
  std::string plan_id;
  RenderProfile profile;

  SourceUnit rendered() const;
  /// Original line for a rendered line, or nullopt for marker lines.
  std::optional<std::size_t> original_line(std::size_t rendered_line) const;
  /// Plan index of a marker line, or nullopt for original lines.
  std::optional<std::size_t> statement_at(std::size_t rendered_line) const;
  /// Anchor (original line) of the statement rendered at a marker line.
  std::optional<std::size_t> anchor_at(std::size_t rendered_line) const;
};

struct PreservationReport {
  bool ok = true;
  std::optional<std::size_t> first_divergent_line;
  std::string detail;
};

// JSON for plans: {plan_id, revision, statements:[{anchor_line, position, severity, template, variables[]}]}
void to_json(nlohmann::json& j, const LoggingStatement& s);
void from_json(const nlohmann::json& j, LoggingStatement& s);
void to_json(nlohmann::json& j, const LoggingPlan& p);
void from_json(const nlohmann::json& j, LoggingPlan& p);

/// Strict schema check for a plan document; returns an error description or
/// nullopt if the document is a valid plan.
std::optional<std::string> check_plan_schema(const nlohmann::json& j);

}  // namespace relog
