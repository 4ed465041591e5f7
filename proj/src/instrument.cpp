#include "relog/instrument.hpp"

#include <algorithm>
#include <charconv>
#include <map>

namespace relog {

namespace {

std::string replace_once(std::string text, std::string_view key, std::string_view value) {
  auto pos = text.find(key);
  if (pos != std::string::npos) text.replace(pos, key.size(), value);
  return text;
}

std::string index_token_for(const RenderProfile& profile, std::size_t index) {
  return replace_once(profile.index_token, "{index}", std::to_string(index));
}

std::string leading_whitespace(std::string_view line) {
  auto end = line.find_first_not_of(" \t");
  return std::string(line.substr(0, end == std::string_view::npos ? line.size() : end));
}

std::string_view trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

struct PatternParts {
  std::string prefix;  // before {template}
  std::string middle;  // between {template} and {args}
  std::string suffix;  // after {args}
};

std::optional<PatternParts> split_pattern(const std::string& pattern) {
  auto t = pattern.find("{template}");
  auto a = pattern.find("{args}");
  if (t == std::string::npos || a == std::string::npos || a < t) return std::nullopt;
  PatternParts parts;
  parts.prefix = pattern.substr(0, t);
  parts.middle = pattern.substr(t + 10, a - (t + 10));
  parts.suffix = pattern.substr(a + 6);
  return parts;
}

bool escaped_at(std::string_view s, std::size_t pos) {
  std::size_t backslashes = 0;
  while (pos > backslashes && s[pos - backslashes - 1] == '\\') ++backslashes;
  return backslashes % 2 == 1;
}

}  // namespace

std::string escape_literal(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '"': out += "\\\""; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (c < 0x20 || c == 0x7f) {
          const char oct[] = {'\\', static_cast<char>('0' + ((c >> 6) & 7)), static_cast<char>('0' + ((c >> 3) & 7)),
                              static_cast<char>('0' + (c & 7))};
          out.append(oct, 4);
        } else {
          out += static_cast<char>(c);
        }
    }
  }
  return out;
}

std::optional<std::string> unescape_literal(std::string_view body) {
  std::string out;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '"') return std::nullopt;
    if (c != '\\') {
      out += c;
      continue;
    }
    if (++i >= body.size()) return std::nullopt;
    switch (body[i]) {
      case '\\': out += '\\'; break;
      case '"': out += '"'; break;
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      default: {
        if (i + 2 >= body.size()) return std::nullopt;
        int value = 0;
        for (int k = 0; k < 3; ++k) {
          char d = body[i + k];
          if (d < '0' || d > '7') return std::nullopt;
          value = value * 8 + (d - '0');
        }
        out += static_cast<char>(value);
        i += 2;
      }
    }
  }
  return out;
}

std::vector<std::string> split_top_level(std::string_view args) {
  std::vector<std::string> out;
  int depth = 0;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < args.size(); ++i) {
    char c = args[i];
    if (quote) {
      if (c == '\\') {
        ++i;
      } else if (c == quote) {
        quote = 0;
      }
      continue;
    }
    switch (c) {
      case '"':
      case '\'': quote = c; break;
      case '(':
      case '[':
      case '{': ++depth; break;
      case ')':
      case ']':
      case '}': --depth; break;
      case ',':
        if (depth == 0) {
          out.emplace_back(trim(args.substr(start, i - start)));
          start = i + 1;
        }
        break;
      default: break;
    }
  }
  out.emplace_back(trim(args.substr(start)));
  return out;
}

std::string render_statement(const LoggingStatement& s, std::string_view plan_id, std::size_t index,
                             const RenderProfile& profile) {
  auto it = profile.call_patterns.find(s.severity);
  if (it == profile.call_patterns.end()) {
    throw InvalidStatement("render profile has no call pattern for severity " + std::string(to_string(s.severity)));
  }
  std::string args;
  for (const auto& v : s.variables) args += ", " + v;
  const std::string body = escape_literal(index_token_for(profile, index) + s.template_text);
  auto parts = split_pattern(it->second);
  if (!parts) throw InvalidStatement("call pattern must contain {template} followed by {args}");
  std::string call = parts->prefix + body + parts->middle + args + parts->suffix;
  return call + " " + profile.comment_open + profile.marker_tag + ":" + std::string(plan_id) + ":" +
         std::to_string(index) + ":" + (s.position == Position::before ? "b" : "a") + profile.comment_close;
}

std::optional<MarkerInfo> find_marker(std::string_view line, const RenderProfile& profile) {
  const std::string opener = profile.comment_open + profile.marker_tag + ":";
  auto pos = line.rfind(opener);
  if (pos == std::string_view::npos) return std::nullopt;
  auto close = line.find(profile.comment_close, pos + opener.size());
  if (close == std::string_view::npos || close + profile.comment_close.size() != line.size()) return std::nullopt;
  std::string_view fields = line.substr(pos + opener.size(), close - pos - opener.size());
  // plan_id:index:pos, plan_id itself may not contain ':'
  auto c1 = fields.find(':');
  auto c2 = c1 == std::string_view::npos ? c1 : fields.find(':', c1 + 1);
  if (c2 == std::string_view::npos || fields.find(':', c2 + 1) != std::string_view::npos) return std::nullopt;
  MarkerInfo info;
  info.plan_id = std::string(fields.substr(0, c1));
  auto idx = fields.substr(c1 + 1, c2 - c1 - 1);
  auto [ptr, ec] = std::from_chars(idx.data(), idx.data() + idx.size(), info.index);
  if (ec != std::errc{} || ptr != idx.data() + idx.size() || idx.empty()) return std::nullopt;
  auto p = fields.substr(c2 + 1);
  if (p == "b") {
    info.position = Position::before;
  } else if (p == "a") {
    info.position = Position::after;
  } else {
    return std::nullopt;
  }
  info.marker_offset = pos;
  return info;
}

std::optional<LoggingStatement> parse_call(std::string_view call, const RenderProfile& profile) {
  for (const auto& [severity, pattern] : profile.call_patterns) {
    auto parts = split_pattern(pattern);
    if (!parts) continue;
    if (call.size() < parts->prefix.size() + parts->suffix.size()) continue;
    if (call.substr(0, parts->prefix.size()) != parts->prefix) continue;
    if (call.substr(call.size() - parts->suffix.size()) != parts->suffix) continue;
    auto inner = call.substr(parts->prefix.size(), call.size() - parts->prefix.size() - parts->suffix.size());
    std::size_t split = std::string_view::npos;
    for (auto p = inner.find(parts->middle); p != std::string_view::npos; p = inner.find(parts->middle, p + 1)) {
      if (!escaped_at(inner, p)) {
        split = p;
        break;
      }
    }
    if (split == std::string_view::npos) continue;
    auto body = unescape_literal(inner.substr(0, split));
    if (!body) continue;
    auto rest = inner.substr(split + parts->middle.size());
    LoggingStatement s;
    s.severity = severity;
    s.template_text = *body;
    if (!rest.empty()) {
      if (rest.substr(0, 2) != ", ") continue;
      s.variables = split_top_level(rest.substr(2));
    }
    return s;
  }
  return std::nullopt;
}

InstrumentedUnit apply_plan(const SourceUnit& source, const LoggingPlan& plan, const RenderProfile& profile) {
  if (plan.plan_id.empty() || plan.plan_id.find(':') != std::string::npos ||
      plan.plan_id.find(profile.comment_close) != std::string::npos) {
    throw InvalidStatement("plan_id '" + plan.plan_id + "' is not usable in a marker");
  }
  std::map<std::size_t, std::vector<std::size_t>> before, after;
  for (std::size_t i = 0; i < plan.statements.size(); ++i) {
    const auto& s = plan.statements[i];
    validate(s, profile.placeholder);
    if (s.anchor_line > source.line_count()) throw AnchorOutOfRange(s.anchor_line, source.line_count());
    (s.position == Position::before ? before : after)[s.anchor_line].push_back(i);
  }

  InstrumentedUnit out;
  out.base = source;
  out.plan_revision = plan.revision;
  out.plan_id = plan.plan_id;
  out.profile = profile;
  out.rendered_lines.reserve(source.line_count() + plan.statements.size());
  out.line_map.reserve(source.line_count());

  auto emit = [&](std::size_t idx, const std::string& indent) {
    out.rendered_lines.push_back(indent + render_statement(plan.statements[idx], plan.plan_id, idx, profile));
  };
  for (std::size_t line = 1; line <= source.line_count(); ++line) {
    const auto& text = source.lines[line - 1];
    const auto indent = leading_whitespace(text);
    if (auto it = before.find(line); it != before.end()) {
      for (auto idx : it->second) emit(idx, indent);
    }
    out.rendered_lines.push_back(text);
    out.line_map.push_back(out.rendered_lines.size());
    if (auto it = after.find(line); it != after.end()) {
      for (auto idx : it->second) emit(idx, indent);
    }
  }
  return out;
}

std::pair<SourceUnit, LoggingPlan> strip_plan(const InstrumentedUnit& instr) {
  const auto& profile = instr.profile;
  std::vector<std::string> original;
  std::map<std::size_t, LoggingStatement> by_index;

  for (std::size_t r = 0; r < instr.rendered_lines.size(); ++r) {
    const auto& line = instr.rendered_lines[r];
    auto marker = find_marker(line, profile);
    bool is_original = instr.original_line(r + 1).has_value();
    if (!marker) {
      if (!is_original) throw MarkerCorruption(r + 1, "inserted line has no marker");
      original.push_back(line);
      continue;
    }
    if (is_original) {
      // An original line that happens to end in a marker-shaped comment.
      original.push_back(line);
      continue;
    }
    if (marker->plan_id != instr.plan_id) throw MarkerCorruption(r + 1, "marker names plan '" + marker->plan_id + "'");
    auto call_view = std::string_view(line).substr(0, marker->marker_offset);
    if (call_view.empty() || call_view.back() != ' ') throw MarkerCorruption(r + 1, "malformed marker spacing");
    call_view = trim(call_view.substr(0, call_view.size() - 1));
    auto stmt = parse_call(call_view, profile);
    if (!stmt) throw MarkerCorruption(r + 1, "call does not match any pattern");
    const auto token = index_token_for(profile, marker->index);
    if (stmt->template_text.compare(0, token.size(), token) != 0) {
      throw MarkerCorruption(r + 1, "template lacks index token");
    }
    stmt->template_text.erase(0, token.size());
    stmt->position = marker->position;
    // before-statements attach to the next original line, after-statements to the last one
    stmt->anchor_line = marker->position == Position::before ? original.size() + 1 : original.size();
    if (stmt->anchor_line == 0 || stmt->anchor_line > instr.base.line_count()) {
      throw MarkerCorruption(r + 1, "marker position has no anchor line");
    }
    if (!by_index.emplace(marker->index, std::move(*stmt)).second) {
      throw MarkerCorruption(r + 1, "duplicate plan index " + std::to_string(marker->index));
    }
  }

  if (original != instr.base.lines) throw MarkerCorruption(0, "unmarked lines differ from the base source");
  LoggingPlan plan;
  plan.plan_id = instr.plan_id;
  plan.revision = instr.plan_revision;
  std::size_t expect = 0;
  for (auto& [idx, stmt] : by_index) {
    if (idx != expect++) throw MarkerCorruption(0, "plan indices are not contiguous");
    plan.statements.push_back(std::move(stmt));
  }
  return {instr.base, std::move(plan)};
}

PreservationReport verify_logic_preserved(const SourceUnit& original, const InstrumentedUnit& instr) {
  PreservationReport report;
  std::size_t orig = 0;
  for (std::size_t r = 0; r < instr.rendered_lines.size(); ++r) {
    const auto& line = instr.rendered_lines[r];
    if (find_marker(line, instr.profile)) {
      // A marker-looking line that the original also has at this point is original text.
      if (orig < original.lines.size() && original.lines[orig] == line) {
        ++orig;
      }
      continue;
    }
    if (orig >= original.lines.size()) {
      report.ok = false;
      report.first_divergent_line = orig + 1;
      report.detail = "extra unmarked line at rendered line " + std::to_string(r + 1);
      return report;
    }
    if (original.lines[orig] != line) {
      report.ok = false;
      report.first_divergent_line = orig + 1;
      report.detail = "rendered line " + std::to_string(r + 1) + " differs from original line " + std::to_string(orig + 1);
      return report;
    }
    ++orig;
  }
  if (orig != original.lines.size()) {
    report.ok = false;
    report.first_divergent_line = orig + 1;
    report.detail = "original line " + std::to_string(orig + 1) + " missing";
    return report;
  }
  if (original.final_newline != instr.base.final_newline) {
    report.ok = false;
    report.first_divergent_line = original.lines.size();
    report.detail = "trailing newline differs";
  }
  return report;
}

LoggingPlan normalize_plan(const LoggingPlan& plan) {
  LoggingPlan out;
  out.plan_id = plan.plan_id;
  out.revision = plan.revision;
  for (const auto& s : plan.statements) {
    if (std::find(out.statements.begin(), out.statements.end(), s) == out.statements.end()) {
      out.statements.push_back(s);
    }
  }
  std::stable_sort(out.statements.begin(), out.statements.end(),
                   [](const LoggingStatement& a, const LoggingStatement& b) { return a.anchor_line < b.anchor_line; });
  return out;
}

}  // namespace relog
