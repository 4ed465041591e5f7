#include "relog/core.hpp"

#include <algorithm>
#include <array>

#include "relog/digest.hpp"
#include "relog/instrument.hpp"

namespace relog {

namespace {

constexpr std::array<std::string_view, 5> kSeverityNames = {"trace", "debug", "info", "warn", "error"};

}  // namespace

std::string_view to_string(Severity s) { return kSeverityNames[static_cast<std::size_t>(s)]; }

std::string_view to_string(Position p) { return p == Position::before ? "before" : "after"; }

Severity parse_severity(std::string_view text) {
  for (std::size_t i = 0; i < kSeverityNames.size(); ++i) {
    if (kSeverityNames[i] == text) return static_cast<Severity>(i);
  }
  if (text == "warning") return Severity::warn;
  throw InvalidStatement("unknown severity '" + std::string(text) + "'");
}

Position parse_position(std::string_view text) {
  if (text == "before") return Position::before;
  if (text == "after") return Position::after;
  throw InvalidStatement("unknown position '" + std::string(text) + "'");
}

std::size_t placeholder_count(std::string_view template_text, std::string_view token) {
  if (token.empty()) return 0;
  std::size_t count = 0;
  for (std::size_t pos = template_text.find(token); pos != std::string_view::npos;
       pos = template_text.find(token, pos + token.size())) {
    ++count;
  }
  return count;
}

void validate(const LoggingStatement& s, std::string_view placeholder) {
  if (s.template_text.empty()) throw InvalidStatement("empty template");
  if (s.anchor_line < 1) throw InvalidStatement("anchor_line must be >= 1");
  const auto slots = placeholder_count(s.template_text, placeholder);
  if (slots != s.variables.size()) {
    throw InvalidStatement("template '" + s.template_text + "' has " + std::to_string(slots) +
                           " slots but " + std::to_string(s.variables.size()) + " variables");
  }
  for (const auto& v : s.variables) {
    if (v.empty()) throw InvalidStatement("empty variable expression");
    if (v.find_first_of("\r\n") != std::string::npos) throw InvalidStatement("multi-line variable expression");
    if (v.front() == ' ' || v.back() == ' ' || v.front() == '\t' || v.back() == '\t') {
      throw InvalidStatement("variable expression '" + v + "' has surrounding whitespace");
    }
    if (v.find("/*") != std::string::npos || v.find("//") != std::string::npos) {
      throw InvalidStatement("variable expression '" + v + "' contains a comment");
    }
  }
}

SourceUnit SourceUnit::from_text(std::string path, std::string_view text) {
  std::vector<std::string> lines;
  bool final_newline = !text.empty() && text.back() == '\n';
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.emplace_back(text.substr(start));
      break;
    }
    lines.emplace_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  return from_lines(std::move(path), std::move(lines), final_newline || text.empty());
}

SourceUnit SourceUnit::from_lines(std::string path, std::vector<std::string> lines, bool final_newline) {
  SourceUnit u;
  u.path = std::move(path);
  u.lines = std::move(lines);
  u.final_newline = final_newline;
  u.digest = sha256_hex(u.text());
  return u;
}

std::string SourceUnit::text() const {
  std::string out;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size() || final_newline) out += '\n';
  }
  return out;
}

bool SourceUnit::digest_ok() const { return sha256_hex(text()) == digest; }

RenderProfile RenderProfile::cpp_default() {
  RenderProfile p;
  p.call_patterns = {
      {Severity::trace, "rlog::trace(\"{template}\"{args});"},
      {Severity::debug, "rlog::debug(\"{template}\"{args});"},
      {Severity::info, "rlog::info(\"{template}\"{args});"},
      {Severity::warn, "rlog::warn(\"{template}\"{args});"},
      {Severity::error, "rlog::error(\"{template}\"{args});"},
  };
  return p;
}

void to_json(nlohmann::json& j, const RenderProfile& p) {
  nlohmann::json calls = nlohmann::json::object();
  for (const auto& [sev, pattern] : p.call_patterns) calls[std::string(to_string(sev))] = pattern;
  j = {{"call_patterns", calls},       {"placeholder", p.placeholder},     {"index_token", p.index_token},
       {"comment_open", p.comment_open}, {"comment_close", p.comment_close}, {"marker_tag", p.marker_tag},
       {"block_open", p.block_open},   {"block_close", p.block_close}};
}

void from_json(const nlohmann::json& j, RenderProfile& p) {
  p = RenderProfile::cpp_default();
  if (j.contains("call_patterns")) {
    p.call_patterns.clear();
    for (const auto& [name, pattern] : j.at("call_patterns").items()) {
      p.call_patterns[parse_severity(name)] = pattern.get<std::string>();
    }
  }
  p.placeholder = j.value("placeholder", p.placeholder);
  p.index_token = j.value("index_token", p.index_token);
  p.comment_open = j.value("comment_open", p.comment_open);
  p.comment_close = j.value("comment_close", p.comment_close);
  p.marker_tag = j.value("marker_tag", p.marker_tag);
  p.block_open = j.value("block_open", p.block_open);
  p.block_close = j.value("block_close", p.block_close);
}

SourceUnit InstrumentedUnit::rendered() const {
  return SourceUnit::from_lines(base.path, rendered_lines, base.final_newline);
}

std::optional<std::size_t> InstrumentedUnit::original_line(std::size_t rendered_line) const {
  auto it = std::lower_bound(line_map.begin(), line_map.end(), rendered_line);
  if (it == line_map.end() || *it != rendered_line) return std::nullopt;
  return static_cast<std::size_t>(it - line_map.begin()) + 1;
}

std::optional<std::size_t> InstrumentedUnit::statement_at(std::size_t rendered_line) const {
  if (rendered_line == 0 || rendered_line > rendered_lines.size()) return std::nullopt;
  if (original_line(rendered_line)) return std::nullopt;
  auto m = find_marker(rendered_lines[rendered_line - 1], profile);
  if (!m) return std::nullopt;
  return m->index;
}

std::optional<std::size_t> InstrumentedUnit::anchor_at(std::size_t rendered_line) const {
  if (!statement_at(rendered_line)) return std::nullopt;
  auto marker = find_marker(rendered_lines[rendered_line - 1], profile);
  auto next = std::lower_bound(line_map.begin(), line_map.end(), rendered_line);
  if (marker->position == Position::before) {
    if (next == line_map.end()) return std::nullopt;
    return static_cast<std::size_t>(next - line_map.begin()) + 1;
  }
  if (next == line_map.begin()) return std::nullopt;
  return static_cast<std::size_t>(next - line_map.begin());
}

void to_json(nlohmann::json& j, const LoggingStatement& s) {
  j = nlohmann::json{{"anchor_line", s.anchor_line},
                     {"position", to_string(s.position)},
                     {"severity", to_string(s.severity)},
                     {"template", s.template_text},
                     {"variables", s.variables}};
}

void from_json(const nlohmann::json& j, LoggingStatement& s) {
  s.anchor_line = j.at("anchor_line").get<std::size_t>();
  s.position = parse_position(j.at("position").get<std::string>());
  s.severity = parse_severity(j.at("severity").get<std::string>());
  s.template_text = j.at("template").get<std::string>();
  s.variables = j.at("variables").get<std::vector<std::string>>();
}

void to_json(nlohmann::json& j, const LoggingPlan& p) {
  j = nlohmann::json{{"plan_id", p.plan_id}, {"revision", p.revision}, {"statements", p.statements}};
}

void from_json(const nlohmann::json& j, LoggingPlan& p) {
  p.plan_id = j.at("plan_id").get<std::string>();
  p.revision = j.at("revision").get<std::uint64_t>();
  p.statements = j.at("statements").get<std::vector<LoggingStatement>>();
}

std::optional<std::string> check_plan_schema(const nlohmann::json& j) {
  if (!j.is_object()) return "plan must be an object";
  for (const char* key : {"plan_id", "revision", "statements"}) {
    if (!j.contains(key)) return std::string("missing field '") + key + "'";
  }
  if (j.size() != 3) return "plan has unexpected fields";
  if (!j["plan_id"].is_string()) return "plan_id must be a string";
  if (!j["revision"].is_number_unsigned() && !(j["revision"].is_number_integer() && j["revision"].get<long long>() >= 0)) {
    return "revision must be a non-negative integer";
  }
  if (!j["statements"].is_array()) return "statements must be an array";
  std::size_t idx = 0;
  for (const auto& s : j["statements"]) {
    const auto where = "statement " + std::to_string(idx++) + ": ";
    if (!s.is_object()) return where + "not an object";
    for (const char* key : {"anchor_line", "position", "severity", "template", "variables"}) {
      if (!s.contains(key)) return where + "missing field '" + key + "'";
    }
    if (s.size() != 5) return where + "unexpected fields";
    if (!s["anchor_line"].is_number_integer() || s["anchor_line"].get<long long>() < 1) {
      return where + "anchor_line must be a positive integer";
    }
    if (!s["position"].is_string() || !s["severity"].is_string() || !s["template"].is_string()) {
      return where + "position, severity and template must be strings";
    }
    if (!s["variables"].is_array()) return where + "variables must be an array";
    for (const auto& v : s["variables"]) {
      if (!v.is_string()) return where + "variables must be strings";
    }
    try {
      auto stmt = s.get<LoggingStatement>();
      validate(stmt);
    } catch (const std::exception& e) {
      return where + e.what();
    }
  }
  return std::nullopt;
}

}  // namespace relog
