// Rule-based provider. Every answer is a pure function of the envelope
// slots and the per-instance StubConfig.
#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <regex>
#include <set>

#include "relog/gateway.hpp"
#include "relog/syntax.hpp"

namespace relog::gateway {

using nlohmann::json;

namespace {

const std::string& slot(const PromptEnvelope& env, const char* name) {
  static const std::string empty;
  auto it = env.slots.find(name);
  return it == env.slots.end() ? empty : it->second;
}

json slot_json(const PromptEnvelope& env, const char* name, json fallback) {
  auto j = json::parse(slot(env, name), nullptr, false);
  return j.is_discarded() ? fallback : j;
}

std::string base_name(const std::string& path) { return std::filesystem::path(path).filename().string(); }

json make_statement(std::size_t anchor, Position pos, Severity sev, const std::string& tpl,
                    const std::vector<std::string>& vars) {
  return {{"anchor_line", anchor},
          {"position", to_string(pos)},
          {"severity", to_string(sev)},
          {"template", tpl},
          {"variables", vars}};
}

std::string state_template(const std::vector<std::string>& vars) {
  std::string t;
  for (const auto& v : vars) {
    if (!t.empty()) t += ' ';
    t += v + "={}";
  }
  return t;
}

// Logged `name=value` pairs; value runs to the next blank.
std::vector<std::string> logged_values(const std::string& message, const std::string& name) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  const auto key = name + "=";
  while ((pos = message.find(key, pos)) != std::string::npos) {
    bool boundary = pos == 0 || !(std::isalnum(static_cast<unsigned char>(message[pos - 1])) ||
                                  message[pos - 1] == '_' || message[pos - 1] == '.' || message[pos - 1] == '>');
    auto start = pos + key.size();
    if (boundary) {
      auto end = message.find_first_of(" \t,;", start);
      out.push_back(message.substr(start, end == std::string::npos ? std::string::npos : end - start));
    }
    pos = start;
  }
  return out;
}

std::map<std::string, std::string> parse_detail(const std::string& detail) {
  std::map<std::string, std::string> kv;
  std::size_t start = 0;
  while (start <= detail.size()) {
    auto end = detail.find(';', start);
    auto part = syntax::trim(std::string_view(detail).substr(start, end == std::string::npos ? std::string::npos : end - start));
    if (auto eq = part.find('='); eq != std::string_view::npos) {
      kv[std::string(syntax::trim(part.substr(0, eq)))] = std::string(syntax::trim(part.substr(eq + 1)));
    }
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return kv;
}

}  // namespace

bool Expectation::holds(std::string_view logged) const {
  std::string text(logged);
  if (value.is_number()) {
    char* end = nullptr;
    double got = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size()) return true;  // not comparable: no signal
    double want = value.get<double>();
    if (op == "==") return std::fabs(got - want) < 1e-9;
    if (op == "!=") return std::fabs(got - want) >= 1e-9;
    if (op == "<") return got < want;
    if (op == "<=") return got <= want;
    if (op == ">") return got > want;
    if (op == ">=") return got >= want;
    return true;
  }
  std::string want = value.is_string() ? value.get<std::string>() : value.dump();
  if (text.size() >= 2 && text.front() == '"' && text.back() == '"') text = text.substr(1, text.size() - 2);
  if (op == "==") return text == want;
  if (op == "!=") return text != want;
  return true;
}

void from_json(const json& j, StubConfig& c) {
  c = StubConfig{};
  if (j.contains("key_variable") && !j["key_variable"].is_null()) c.key_variable = j["key_variable"].get<std::string>();
  c.key_anchor = j.value("key_anchor", std::size_t{0});
  if (j.contains("key_position")) c.key_position = parse_position(j["key_position"].get<std::string>());
  auto critic = j.value("critic", std::string("oracle"));
  if (critic == "oracle") c.critic = StubConfig::Critic::oracle;
  else if (critic == "always_insufficient") c.critic = StubConfig::Critic::always_insufficient;
  else if (critic == "always_sufficient") c.critic = StubConfig::Critic::always_sufficient;
  else throw Error("unknown stub critic mode '" + critic + "'");
  auto fixer = j.value("fixer", std::string("heuristic"));
  if (fixer == "heuristic") c.fixer = StubConfig::Fixer::heuristic;
  else if (fixer == "never") c.fixer = StubConfig::Fixer::never;
  else throw Error("unknown stub fixer mode '" + fixer + "'");
  auto fault = j.value("inject_fault", std::string("none"));
  if (fault == "none") c.inject_fault = StubConfig::Fault::none;
  else if (fault == "undeclared") c.inject_fault = StubConfig::Fault::undeclared;
  else if (fault == "unreachable") c.inject_fault = StubConfig::Fault::unreachable;
  else throw Error("unknown stub fault '" + fault + "'");
  c.window = j.value("window", c.window);
  if (j.contains("expectation") && !j["expectation"].is_null()) {
    const auto& e = j["expectation"];
    c.expectation = Expectation{e.at("variable").get<std::string>(), e.value("op", std::string("==")), e.at("value")};
    static const std::set<std::string> ops = {"==", "!=", "<", "<=", ">", ">="};
    if (!ops.count(c.expectation->op)) throw Error("unknown expectation operator '" + c.expectation->op + "'");
  }
  if (j.contains("implicates") && !j["implicates"].is_null()) {
    c.implicates = Location{j["implicates"].at("file").get<std::string>(), j["implicates"].at("line").get<std::size_t>()};
  }
  if (j.contains("patch") && !j["patch"].is_null()) c.patch = j["patch"];
  c.patch_radius = j.value("patch_radius", c.patch_radius);
}

void to_json(json& j, const StubConfig& c) {
  const char* critic[] = {"oracle", "always_insufficient", "always_sufficient"};
  const char* fixer[] = {"heuristic", "never"};
  const char* fault[] = {"none", "undeclared", "unreachable"};
  j = {{"key_variable", c.key_variable ? json(*c.key_variable) : json(nullptr)},
       {"key_anchor", c.key_anchor},
       {"key_position", to_string(c.key_position)},
       {"critic", critic[static_cast<int>(c.critic)]},
       {"fixer", fixer[static_cast<int>(c.fixer)]},
       {"inject_fault", fault[static_cast<int>(c.inject_fault)]},
       {"window", c.window},
       {"patch_radius", c.patch_radius}};
  j["expectation"] = c.expectation ? json{{"variable", c.expectation->variable}, {"op", c.expectation->op},
                                          {"value", c.expectation->value}}
                                   : json(nullptr);
  j["implicates"] = c.implicates ? json{{"file", c.implicates->file}, {"line", c.implicates->line}} : json(nullptr);
  j["patch"] = c.patch ? *c.patch : json(nullptr);
}

std::string StubProvider::complete_raw(const ProviderRequest& req) {
  json out;
  switch (req.envelope.expected_schema) {
    case Schema::generation: out = generate(req.envelope); break;
    case Schema::repair: out = repair(req.envelope); break;
    case Schema::critic: out = critique(req.envelope); break;
    case Schema::refinement: out = refine(req.envelope); break;
    case Schema::debug: out = debug(req.envelope); break;
  }
  return out.dump();
}

json StubProvider::generate(const PromptEnvelope& env) const {
  const auto lines = parse_listing(slot(env, "source"));
  const auto file = base_name(slot(env, "path"));
  const auto outcome = slot_json(env, "outcome", json::object());
  const auto n_lines = lines.size();
  json statements = json::array();

  std::optional<std::size_t> failure;
  if (outcome.contains("exception") && outcome["exception"].is_object()) {
    for (const auto& f : outcome["exception"].value("frames", json::array())) {
      if (base_name(f.value("file", "")) == file && f.value("line", 0) >= 1) {
        failure = f["line"].get<std::size_t>();
        break;
      }
    }
  }

  if (failure && *failure <= n_lines) {
    const auto L = *failure;
    const auto w = static_cast<std::size_t>(std::max(cfg_.window, 0));
    const auto lo = L > w ? L - w : 1;
    const auto hi = std::min(n_lines, L + w);
    for (auto n = lo; n <= hi; ++n) {
      auto vars = syntax::assigned_variables(lines[n - 1]);
      if (!vars.empty() && syntax::safe_after(lines[n - 1])) {
        statements.push_back(make_statement(n, Position::after, Severity::debug, state_template(vars), vars));
      }
    }
    if (statements.empty() && syntax::safe_before(lines, L)) {
      statements.push_back(make_statement(L, Position::before, Severity::trace, "reached line " + std::to_string(L), {}));
    }
  }

  if (statements.empty()) {
    // source-only fallback: method entry with parameters, and return values
    for (const auto& f : syntax::find_functions(lines, RenderProfile::cpp_default())) {
      if (syntax::safe_after(lines[f.open_line - 1])) {
        std::string tpl = "enter " + f.name;
        if (!f.params.empty()) tpl += " " + state_template(f.params);
        statements.push_back(make_statement(f.open_line, Position::after, Severity::debug, tpl, f.params));
      }
      for (auto n = f.open_line + 1; n < f.close_line; ++n) {
        auto expr = syntax::return_expression(lines[n - 1]);
        if (!expr || !syntax::safe_before(lines, n)) continue;
        if (expr->empty()) {
          statements.push_back(make_statement(n, Position::before, Severity::debug, f.name + " returns", {}));
        } else if (expr->front() != '{') {
          statements.push_back(
              make_statement(n, Position::before, Severity::debug, f.name + " returns {}", {*expr}));
        }
      }
    }
  }

  if (cfg_.inject_fault == StubConfig::Fault::unreachable) {
    // after a return that closes its block
    std::optional<std::size_t> target;
    for (std::size_t n = 1; n <= n_lines && !target; ++n) {
      if (!syntax::return_expression(lines[n - 1])) continue;
      for (auto m = n + 1; m <= n_lines; ++m) {
        auto t = syntax::trim(lines[m - 1]);
        if (t.empty()) continue;
        if (t.front() == '}') target = n;
        break;
      }
    }
    if (target) {
      statements.push_back(make_statement(*target, Position::after, Severity::info, "leaving scope", {}));
    } else if (!statements.empty()) {
      auto s = statements.front();
      statements.push_back(make_statement(s["anchor_line"], parse_position(s["position"].get<std::string>()),
                                          Severity::debug, "state={}", {"relog_missing_state"}));
    }
  } else if (cfg_.inject_fault == StubConfig::Fault::undeclared && !statements.empty()) {
    auto s = statements.front();
    statements.push_back(make_statement(s["anchor_line"], parse_position(s["position"].get<std::string>()),
                                        Severity::debug, "state={}", {"relog_missing_state"}));
  }

  return {{"plan_id", "plan"}, {"revision", 0}, {"statements", statements}};
}

json StubProvider::repair(const PromptEnvelope& env) const {
  auto plan = slot_json(env, "plan", json::object());
  if (cfg_.fixer == StubConfig::Fixer::never || !plan.contains("statements")) return plan;
  auto& stmts = plan["statements"];
  const auto diags = slot_json(env, "diagnostics", json::array());

  std::set<std::size_t> drop;
  std::set<std::size_t> flip;
  bool located = false;
  auto handle = [&](const json& d) {
    if (!d.contains("statement_index") || d["statement_index"].is_null()) return;
    auto idx = d["statement_index"].get<std::size_t>();
    if (idx >= stmts.size()) return;
    located = true;
    const auto msg = d.value("message", "");
    if (msg.find("will never be executed") != std::string::npos || msg.find("unreachable") != std::string::npos) {
      if (stmts[idx]["position"] == "after") {
        flip.insert(idx);
        return;
      }
    }
    drop.insert(idx);
  };
  for (const auto& d : diags) {
    auto sev = d.value("severity", "error");
    if (sev == "error" || sev == "fatal error") handle(d);
  }
  if (!located) {
    for (const auto& d : diags) handle(d);  // notes pointing back at a statement
  }
  if (!located && !stmts.empty()) {
    // nothing points at a statement: drop the one nearest the first error line
    std::size_t line = 0;
    for (const auto& d : diags) {
      if (d.value("line", 0) > 0) {
        line = d["line"].get<std::size_t>();
        break;
      }
    }
    std::size_t best = stmts.size() - 1;
    if (line) {
      std::size_t best_dist = SIZE_MAX;
      for (std::size_t i = 0; i < stmts.size(); ++i) {
        auto a = stmts[i]["anchor_line"].get<std::size_t>();
        auto dist = a > line ? a - line : line - a;
        if (dist < best_dist) best_dist = dist, best = i;
      }
    }
    drop.insert(best);
  }

  json kept = json::array();
  for (std::size_t i = 0; i < stmts.size(); ++i) {
    if (drop.count(i) && !flip.count(i)) continue;
    auto s = stmts[i];
    if (flip.count(i)) s["position"] = "before";
    kept.push_back(s);
  }
  plan["statements"] = kept;
  return plan;
}

json StubProvider::critique(const PromptEnvelope& env) const {
  const auto events = slot_json(env, "logs", json::array());
  const auto rubric = slot(env, "rubric");

  bool has_key = false;
  bool has_state = false;
  for (const auto& e : events) {
    auto msg = e.value("message", "");
    if (msg.find('=') != std::string::npos) has_state = true;
    if (cfg_.key_variable && !logged_values(msg, *cfg_.key_variable).empty()) has_key = true;
  }

  int trace = 0, state = 0, causal = 0;
  bool sufficient = false;
  std::string rationale;
  if (cfg_.critic == StubConfig::Critic::always_sufficient) {
    trace = state = causal = 2;
    sufficient = true;
    rationale = "accepted unconditionally";
  } else if (events.empty()) {
    rationale = "no log events were collected";
  } else if (cfg_.critic == StubConfig::Critic::oracle && cfg_.key_variable && has_key) {
    trace = state = causal = 2;
    sufficient = true;
    rationale = "the logs expose " + *cfg_.key_variable + " along the executed path";
  } else if (cfg_.critic == StubConfig::Critic::oracle && !cfg_.key_variable && has_state) {
    trace = 2, state = 2, causal = 1;
    sufficient = true;
    rationale = "the logs show the executed path with variable states";
  } else {
    trace = 2;
    state = has_state ? 1 : 0;
    causal = 0;
    rationale = cfg_.key_variable ? "the state of " + *cfg_.key_variable + " is never logged"
                                  : "the logs do not connect state to the outcome";
  }

  json feedback = json::array();
  if (!sufficient) {
    json item = {{"action", "add"},
                 {"subject", cfg_.key_variable.value_or("state near the failure")},
                 {"detail", "position=" + std::string(to_string(cfg_.key_position)) + "; severity=debug"}};
    item["target_anchor"] = cfg_.key_anchor > 0 ? json(cfg_.key_anchor) : json(nullptr);
    feedback.push_back(item);
  }

  json verdict = {{"traceability", trace}, {"state_visibility", state}, {"causal_linkage", causal},
                  {"sufficient", sufficient}, {"feedback", feedback},      {"rationale", rationale}};
  // extra rubric lines look like "- name: description"
  static const std::regex extra(R"(^- ([A-Za-z_][\w]*):)", std::regex::multiline);
  json extras = json::object();
  for (auto it = std::sregex_iterator(rubric.begin(), rubric.end(), extra); it != std::sregex_iterator(); ++it) {
    auto name = (*it)[1].str();
    if (name == "traceability" || name == "state_visibility" || name == "causal_linkage") continue;
    extras[name] = sufficient ? 2 : 1;
  }
  if (!extras.empty()) verdict["extra_scores"] = extras;
  return verdict;
}

json StubProvider::refine(const PromptEnvelope& env) const {
  const auto feedback = slot_json(env, "feedback", json::array());
  json edits = json::array();
  for (const auto& f : feedback) {
    auto action = f.value("action", "");
    bool has_anchor = f.contains("target_anchor") && f["target_anchor"].is_number_integer();
    if (!has_anchor) continue;
    auto anchor = f["target_anchor"].get<std::size_t>();
    auto kv = parse_detail(f.value("detail", ""));
    if (action == "add") {
      auto subject = f.value("subject", "");
      Position pos = kv.count("position") && kv["position"] == "before" ? Position::before : Position::after;
      Severity sev = Severity::debug;
      if (kv.count("severity")) {
        try {
          sev = parse_severity(kv["severity"]);
        } catch (const Error&) {
        }
      }
      if (subject.empty()) continue;
      if (syntax::is_expression_like(subject)) {
        edits.push_back({{"action", "add"},
                         {"statement", make_statement(anchor, pos, sev, subject + "={}", {subject})}});
      } else {
        edits.push_back({{"action", "add"}, {"statement", make_statement(anchor, pos, sev, subject, {})}});
      }
    } else if (action == "remove") {
      edits.push_back({{"action", "remove"}, {"anchor_line", anchor}});
    } else if (action == "modify") {
      json changes = json::object();
      for (auto key : {"severity", "position", "template"}) {
        if (kv.count(key)) changes[key] = kv[key];
      }
      if (!changes.empty()) edits.push_back({{"action", "modify"}, {"anchor_line", anchor}, {"changes", changes}});
    }
  }
  return {{"edits", edits}};
}

json StubProvider::debug(const PromptEnvelope& env) const {
  const auto mode = slot(env, "mode");
  const auto outcome = slot_json(env, "outcome", json::object());
  const auto events = slot_json(env, "logs", json::array());

  bool reported = false;
  json location = nullptr;
  std::string explanation = "no evidence of a defect in the available output";

  if (outcome.contains("exception") && outcome["exception"].is_object()) {
    const auto& ex = outcome["exception"];
    reported = true;
    explanation = "uncaught " + ex.value("type", std::string("exception")) + ": " + ex.value("message", "");
    auto frames = ex.value("frames", json::array());
    if (!frames.empty() && frames[0].value("line", 0) >= 1) {
      location = {{"file", base_name(frames[0].value("file", ""))}, {"line", frames[0]["line"]}};
    }
  } else if (cfg_.expectation) {
    for (const auto& e : events) {
      bool violated = false;
      std::string seen;
      for (const auto& v : logged_values(e.value("message", ""), cfg_.expectation->variable)) {
        if (!cfg_.expectation->holds(v)) {
          violated = true;
          seen = v;
          break;
        }
      }
      if (!violated) continue;
      reported = true;
      explanation = cfg_.expectation->variable + " was " + seen + ", expected " + cfg_.expectation->op + " " +
                    (cfg_.expectation->value.is_string() ? cfg_.expectation->value.get<std::string>()
                                                         : cfg_.expectation->value.dump());
      if (cfg_.implicates) {
        location = {{"file", cfg_.implicates->file}, {"line", cfg_.implicates->line}};
      } else if (e.contains("anchor") && e["anchor"].is_number_integer()) {
        location = {{"file", base_name(e.value("file", ""))}, {"line", e["anchor"]}};
      }
      break;
    }
  }

  json patch = nullptr;
  if (reported && mode == "direct" && cfg_.patch && location.is_object() && location.contains("line")) {
    const auto& p = *cfg_.patch;
    if (p.value("file", "") == location["file"].get<std::string>() && !p.value("hunks", json::array()).empty()) {
      long long first = p["hunks"][0].value("line", 0);
      long long at = location["line"].get<long long>();
      if (std::llabs(first - at) <= cfg_.patch_radius) patch = p;
    }
  }
  return {{"defect_reported", reported}, {"location", location}, {"explanation", explanation}, {"patch", patch}};
}

}  // namespace relog::gateway
