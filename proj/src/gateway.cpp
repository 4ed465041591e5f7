#include "relog/gateway.hpp"

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "relog/digest.hpp"

namespace relog::gateway {

using nlohmann::json;

std::string_view to_string(ProviderKind k) {
  switch (k) {
    case ProviderKind::remote: return "remote";
    case ProviderKind::replay: return "replay";
    case ProviderKind::stub: return "stub";
  }
  return "stub";
}

std::string_view to_string(Schema s) {
  switch (s) {
    case Schema::generation: return "generation";
    case Schema::repair: return "repair";
    case Schema::critic: return "critic";
    case Schema::refinement: return "refinement";
    case Schema::debug: return "debug";
  }
  return "generation";
}

Schema parse_schema(std::string_view s) {
  for (auto v : {Schema::generation, Schema::repair, Schema::critic, Schema::refinement, Schema::debug}) {
    if (to_string(v) == s) return v;
  }
  throw Error("unknown schema '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- schemas

namespace {

bool is_score(const json& v) { return v.is_number_integer() && v.get<long long>() >= 0 && v.get<long long>() <= 2; }

bool is_line(const json& v) { return v.is_number_integer() && v.get<long long>() >= 1; }

std::optional<std::string> check_keys(const json& j, std::initializer_list<const char*> required,
                                      std::initializer_list<const char*> optional_keys, const std::string& where) {
  if (!j.is_object()) return where + "must be an object";
  std::set<std::string> allowed;
  for (auto k : required) {
    if (!j.contains(k)) return where + "missing field '" + k + "'";
    allowed.insert(k);
  }
  for (auto k : optional_keys) allowed.insert(k);
  for (auto& [k, _] : j.items()) {
    if (!allowed.count(k)) return where + "unexpected field '" + k + "'";
  }
  return std::nullopt;
}

std::optional<std::string> check_statement(const json& s, const std::string& where) {
  json wrapper = {{"plan_id", "x"}, {"revision", 0}, {"statements", json::array({s})}};
  if (auto e = check_plan_schema(wrapper)) return where + *e;
  return std::nullopt;
}

std::optional<std::string> check_critic(const json& j) {
  if (auto e = check_keys(j, {"traceability", "state_visibility", "causal_linkage", "sufficient", "feedback", "rationale"},
                          {"extra_scores"}, "verdict: ")) {
    return e;
  }
  for (auto k : {"traceability", "state_visibility", "causal_linkage"}) {
    if (!is_score(j[k])) return std::string("verdict: ") + k + " must be an integer in 0..2";
  }
  if (!j["sufficient"].is_boolean()) return "verdict: sufficient must be a boolean";
  if (!j["rationale"].is_string()) return "verdict: rationale must be a string";
  if (!j["feedback"].is_array()) return "verdict: feedback must be an array";
  if (!j["sufficient"].get<bool>() && j["feedback"].empty()) return "verdict: insufficient verdict without feedback";
  if (j.contains("extra_scores")) {
    if (!j["extra_scores"].is_object()) return "verdict: extra_scores must be an object";
    for (auto& [k, v] : j["extra_scores"].items()) {
      if (!is_score(v)) return "verdict: extra score '" + k + "' must be an integer in 0..2";
    }
  }
  std::size_t i = 0;
  for (const auto& f : j["feedback"]) {
    auto where = "feedback " + std::to_string(i++) + ": ";
    if (auto e = check_keys(f, {"action", "subject", "detail"}, {"target_anchor"}, where)) return e;
    if (!f["action"].is_string()) return where + "action must be a string";
    auto action = f["action"].get<std::string>();
    if (action != "add" && action != "remove" && action != "modify") return where + "unknown action '" + action + "'";
    bool has_anchor = f.contains("target_anchor") && !f["target_anchor"].is_null();
    if (has_anchor && !is_line(f["target_anchor"])) return where + "target_anchor must be a positive integer";
    if (action != "add" && !has_anchor) return where + action + " requires target_anchor";
    if (!f["subject"].is_string() || !f["detail"].is_string()) return where + "subject and detail must be strings";
  }
  return std::nullopt;
}

std::optional<std::string> check_refinement(const json& j) {
  if (auto e = check_keys(j, {"edits"}, {}, "refinement: ")) return e;
  if (!j["edits"].is_array()) return "refinement: edits must be an array";
  std::size_t i = 0;
  for (const auto& ed : j["edits"]) {
    auto where = "edit " + std::to_string(i++) + ": ";
    if (!ed.is_object() || !ed.contains("action") || !ed["action"].is_string()) return where + "missing action";
    auto action = ed["action"].get<std::string>();
    if (action == "add") {
      if (auto e = check_keys(ed, {"action", "statement"}, {}, where)) return e;
      if (auto e = check_statement(ed["statement"], where)) return e;
    } else if (action == "remove") {
      if (auto e = check_keys(ed, {"action", "anchor_line"}, {}, where)) return e;
      if (!is_line(ed["anchor_line"])) return where + "anchor_line must be a positive integer";
    } else if (action == "modify") {
      if (auto e = check_keys(ed, {"action", "anchor_line", "changes"}, {}, where)) return e;
      if (!is_line(ed["anchor_line"])) return where + "anchor_line must be a positive integer";
      const auto& c = ed["changes"];
      if (auto e = check_keys(c, {}, {"severity", "template", "variables", "position", "anchor_line"}, where + "changes: "))
        return e;
      if (c.empty()) return where + "changes must not be empty";
      try {
        if (c.contains("severity")) parse_severity(c["severity"].get<std::string>());
        if (c.contains("position")) parse_position(c["position"].get<std::string>());
        if (c.contains("template")) (void)c["template"].get<std::string>();
        if (c.contains("variables")) (void)c["variables"].get<std::vector<std::string>>();
        if (c.contains("anchor_line") && !is_line(c["anchor_line"])) return where + "bad anchor_line";
      } catch (const std::exception& e) {
        return where + e.what();
      }
    } else {
      return where + "unknown action '" + action + "'";
    }
  }
  return std::nullopt;
}

std::optional<std::string> check_debug(const json& j) {
  if (auto e = check_keys(j, {"defect_reported", "location", "explanation", "patch"}, {}, "debug: ")) return e;
  if (!j["defect_reported"].is_boolean()) return "debug: defect_reported must be a boolean";
  if (!j["explanation"].is_string()) return "debug: explanation must be a string";
  const auto& loc = j["location"];
  if (!loc.is_null()) {
    if (auto e = check_keys(loc, {"file"}, {"line", "method"}, "debug: location: ")) return e;
    if (!loc["file"].is_string()) return "debug: location.file must be a string";
    if (loc.contains("line") && !is_line(loc["line"])) return "debug: location.line must be a positive integer";
    if (loc.contains("method") && !loc["method"].is_string()) return "debug: location.method must be a string";
    if (!loc.contains("line") && !loc.contains("method")) return "debug: location needs a line or a method";
  }
  const auto& patch = j["patch"];
  if (!patch.is_null()) {
    if (!j["defect_reported"].get<bool>()) return "debug: patch without a reported defect";
    if (auto e = check_keys(patch, {"file", "hunks"}, {}, "debug: patch: ")) return e;
    if (!patch["file"].is_string() || !patch["hunks"].is_array()) return "debug: patch needs file and hunks";
    for (const auto& h : patch["hunks"]) {
      if (auto e = check_keys(h, {"line", "delete", "insert"}, {}, "debug: hunk: ")) return e;
      if (!is_line(h["line"]) || !h["delete"].is_number_integer() || h["delete"].get<long long>() < 0) {
        return "debug: hunk line/delete out of range";
      }
      if (!h["insert"].is_array()) return "debug: hunk insert must be an array";
      for (const auto& t : h["insert"]) {
        if (!t.is_string()) return "debug: hunk insert lines must be strings";
      }
    }
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> validate_payload(Schema s, const json& payload) {
  switch (s) {
    case Schema::generation:
    case Schema::repair: return check_plan_schema(payload);
    case Schema::critic: return check_critic(payload);
    case Schema::refinement: return check_refinement(payload);
    case Schema::debug: return check_debug(payload);
  }
  return "unknown schema";
}

std::optional<json> extract_json(std::string_view raw) {
  auto attempt = [](std::string_view text) -> std::optional<json> {
    auto j = json::parse(text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return std::nullopt;
    return j;
  };
  if (auto j = attempt(raw)) return j;
  if (auto fence = raw.find("```"); fence != std::string_view::npos) {
    auto body = raw.find('\n', fence);
    auto close = body == std::string_view::npos ? body : raw.find("```", body);
    if (close != std::string_view::npos) {
      if (auto j = attempt(raw.substr(body + 1, close - body - 1))) return j;
    }
  }
  auto open = raw.find('{');
  auto close = raw.rfind('}');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    return attempt(raw.substr(open, close - open + 1));
  }
  return std::nullopt;
}

// -------------------------------------------------------------- templates

namespace {

const char* kGeneration = R"(You add logging statements to a program so that its runtime logs explain what it does.
Do not change the program. Each statement is anchored to a line of the numbered listing and goes
either before or after that line. Templates use {} once per logged variable.

Generation mode: {{mode}}
(execution: the observed outcome below comes from running the program; source: the program ran
cleanly, so reason from the source alone.)

Program {{path}}:
{{source}}

Observed outcome:
{{outcome}}

Answer with one JSON object:
{"plan_id": "plan", "revision": 0, "statements": [{"anchor_line": <int>, "position": "before" | "after",
 "severity": "trace" | "debug" | "info" | "warn" | "error", "template": "<text with {}>", "variables": ["<expr>", ...]}]}
)";

const char* kRepair = R"(The logging statements below were inserted into {{path}} and the build failed.
Change only the logging statements: drop a statement, change its variables, or move it. The program
itself must stay exactly as listed.

Program (without logging):
{{source}}

Current logging plan:
{{plan}}

Compiler diagnostics (line numbers refer to the listing; statement is the plan index):
{{diagnostics}}

Answer with the corrected plan as one JSON object with fields plan_id, revision, statements.
)";

const char* kCritic = R"(Judge whether these runtime logs are sufficient for the downstream task: {{goal}}

Score each dimension 0 (absent), 1 (partial) or 2 (good):
{{rubric}}

Program {{path}}:
{{source}}

Logging plan:
{{plan}}

Execution outcome:
{{outcome}}

Collected log events:
{{logs}}

Answer with one JSON object:
{"traceability": <0-2>, "state_visibility": <0-2>, "causal_linkage": <0-2>, "sufficient": <bool>,
 "feedback": [{"action": "add" | "remove" | "modify", "target_anchor": <line or null>, "subject": "<variable or reason>",
 "detail": "<what to change>"}], "rationale": "<short text>"}
Feedback must not be empty when the logs are insufficient. Scores for extra criteria go in "extra_scores".
)";

const char* kRefinement = R"(Revise the logging plan for {{path}} according to the reviewer feedback. Edit individual
statements only: add, remove, or modify. Anchors refer to the numbered listing.

Program:
{{source}}

Current plan:
{{plan}}

Feedback:
{{feedback}}

Answer with one JSON object:
{"edits": [{"action": "add", "statement": {<statement>}} | {"action": "remove", "anchor_line": <int>} |
 {"action": "modify", "anchor_line": <int>, "changes": {"severity"?, "template"?, "variables"?, "position"?}}]}
)";

const char* kDebug = R"(You are debugging a failing test. Setting: {{mode}}.
Decide whether the code under test is defective, and where.

Code you may inspect:
{{context}}

Execution outcome:
{{outcome}}

Runtime logs:
{{logs}}

Answer with one JSON object:
{"defect_reported": <bool>, "location": null | {"file": "<name>", "line": <int>}, "explanation": "<text>",
 "patch": null | {"file": "<name>", "hunks": [{"line": <int>, "delete": <int>, "insert": ["<line>", ...]}]}}
)";

}  // namespace

std::string PromptTemplate::version() const { return sha256_hex(text).substr(0, 16); }

std::vector<std::string> PromptTemplate::slots() const {
  static const std::regex slot(R"(\{\{([A-Za-z_][\w]*)\}\})");
  std::set<std::string> names;
  for (auto it = std::sregex_iterator(text.begin(), text.end(), slot); it != std::sregex_iterator(); ++it) {
    names.insert((*it)[1].str());
  }
  return {names.begin(), names.end()};
}

TemplateSet TemplateSet::builtin() {
  TemplateSet set;
  auto add = [&](const char* id, const char* text, Schema s) { set.templates_[id] = PromptTemplate{id, text, s}; };
  add("generation", kGeneration, Schema::generation);
  add("repair", kRepair, Schema::repair);
  add("critic", kCritic, Schema::critic);
  add("refinement", kRefinement, Schema::refinement);
  add("debug", kDebug, Schema::debug);
  return set;
}

TemplateSet TemplateSet::with_overrides(const std::filesystem::path& dir) {
  auto set = builtin();
  for (auto& [id, tpl] : set.templates_) {
    auto file = dir / (id + ".txt");
    if (!std::filesystem::exists(file)) continue;
    std::ifstream in(file, std::ios::binary);
    if (!in) throw Error("cannot read template " + file.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    tpl.text = ss.str();
  }
  return set;
}

const PromptTemplate& TemplateSet::get(const std::string& id) const {
  auto it = templates_.find(id);
  if (it == templates_.end()) throw Error("unknown prompt template '" + id + "'");
  return it->second;
}

std::string render_prompt(const PromptEnvelope& env, const PromptTemplate& tpl) {
  std::string out;
  const auto& text = tpl.text;
  std::size_t pos = 0;
  while (pos < text.size()) {
    auto open = text.find("{{", pos);
    if (open == std::string::npos) break;
    auto close = text.find("}}", open + 2);
    if (close == std::string::npos) break;
    auto name = text.substr(open + 2, close - open - 2);
    out.append(text, pos, open - pos);
    auto it = env.slots.find(name);
    if (it == env.slots.end()) throw Error("envelope for '" + tpl.id + "' lacks slot '" + name + "'");
    out += it->second;
    pos = close + 2;
  }
  out.append(text, pos, std::string::npos);
  return out;
}

std::string envelope_digest(const PromptEnvelope& env, const PromptTemplate& tpl) {
  json key = {{"template_id", env.template_id}, {"template_version", tpl.version()}, {"slots", env.slots}};
  return sha256_hex(key.dump());
}

// ---------------------------------------------------------------- storage

ReplayStore::ReplayStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  std::filesystem::create_directories(dir_, ec);
  if (ec) throw StoreWriteFailure("cannot create replay store " + dir_.string() + ": " + ec.message());
}

std::optional<json> ReplayStore::get(const std::string& digest) const {
  std::ifstream in(dir_ / (digest + ".json"), std::ios::binary);
  if (!in) return std::nullopt;
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) return std::nullopt;
  return j;
}

void ReplayStore::put(const std::string& digest, const json& entry) {
  auto target = dir_ / (digest + ".json");
  if (std::filesystem::exists(target)) return;
  static std::atomic<unsigned> counter{0};
  std::ostringstream tmp_name;
  tmp_name << "." << digest << "." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << "."
           << counter++ << ".tmp";
  auto tmp = dir_ / tmp_name.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << entry.dump(2) << "\n";
    if (!out) throw StoreWriteFailure("cannot write " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, target, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw StoreWriteFailure("cannot publish " + target.string());
  }
}

std::size_t ReplayStore::size() const {
  std::size_t n = 0;
  for (auto& e : std::filesystem::directory_iterator(dir_)) {
    auto name = e.path().filename().string();
    if (e.path().extension() == ".json" && name.front() != '.') ++n;
  }
  return n;
}

std::string ReplayProvider::complete_raw(const ProviderRequest& req) {
  auto entry = store_->get(req.digest);
  if (!entry || !entry->contains("raw")) throw ReplayMiss(req.digest);
  return (*entry)["raw"].get<std::string>();
}

// ----------------------------------------------------------------- remote

void from_json(const json& j, RemoteConfig& c) {
  c.base_url = j.at("base_url").get<std::string>();
  c.path = j.value("path", c.path);
  c.model = j.value("model", c.model);
  c.api_key_env = j.value("api_key_env", c.api_key_env);
  c.timeout_s = j.value("timeout_s", c.timeout_s);
  c.temperature = j.value("temperature", c.temperature);
  c.system_prompt = j.value("system_prompt", c.system_prompt);
}

RemoteProvider::RemoteProvider(RemoteConfig cfg) : cfg_(std::move(cfg)) {
  if (cfg_.base_url.empty()) throw ProviderUnavailable("remote provider needs a base_url");
  if (!cfg_.api_key_env.empty()) {
    const char* key = std::getenv(cfg_.api_key_env.c_str());
    if (!key || !*key) throw ProviderUnavailable("environment variable " + cfg_.api_key_env + " is not set");
    api_key_ = key;
  }
}

std::string RemoteProvider::complete_raw(const ProviderRequest& req) {
  httplib::Client client(cfg_.base_url);
  auto secs = static_cast<time_t>(cfg_.timeout_s);
  client.set_read_timeout(secs, 0);
  client.set_write_timeout(secs, 0);
  client.set_connection_timeout(std::min<time_t>(secs, 30), 0);

  std::string user = req.prompt;
  if (!req.previous_error.empty()) {
    user += "\n\nYour previous answer was rejected (" + req.previous_error + "). Reply with the JSON object only.";
  }
  json body = {{"model", cfg_.model},
               {"messages", json::array({{{"role", "system"}, {"content", cfg_.system_prompt}},
                                         {{"role", "user"}, {"content", user}}})},
               {"max_tokens", req.envelope.budget},
               {"temperature", cfg_.temperature}};
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);
  auto res = client.Post(cfg_.path, headers, body.dump(), "application/json");
  if (!res) throw ProviderUnavailable("request to " + cfg_.base_url + " failed: " + httplib::to_string(res.error()));
  if (res->status != 200) {
    throw ProviderUnavailable("endpoint answered HTTP " + std::to_string(res->status));
  }
  auto reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded()) return res->body;
  try {
    return reply.at("choices").at(0).at("message").at("content").get<std::string>();
  } catch (const std::exception&) {
    return res->body;
  }
}

// ---------------------------------------------------------------- gateway

Gateway::Gateway(std::shared_ptr<Provider> provider, TemplateSet templates, int retry_limit)
    : provider_(std::move(provider)), templates_(std::move(templates)), retry_limit_(retry_limit) {
  if (!provider_) throw Error("gateway needs a provider");
  if (retry_limit_ < 0) throw Error("retry_limit must be >= 0");
}

StructuredResponse Gateway::complete(const PromptEnvelope& env) const {
  const auto& tpl = templates_.get(env.template_id);
  if (tpl.schema != env.expected_schema) {
    throw Error("template '" + tpl.id + "' answers " + std::string(to_string(tpl.schema)) + ", not " +
                std::string(to_string(env.expected_schema)));
  }
  const auto prompt = render_prompt(env, tpl);
  const auto digest = envelope_digest(env, tpl);

  std::string why;
  std::string last_raw;
  const int max_attempts = 1 + retry_limit_;
  for (int attempt = 1; attempt <= max_attempts; ++attempt) {
    ProviderRequest req{env, prompt, digest, attempt, why};
    last_raw = provider_->complete_raw(req);
    auto doc = extract_json(last_raw);
    if (!doc) {
      why = "reply is not a JSON object";
      continue;
    }
    if (auto err = validate_payload(env.expected_schema, *doc)) {
      why = *err;
      continue;
    }
    StructuredResponse r{*doc, last_raw, provider_->kind(), attempt, digest};
    if (recorder_) {
      recorder_->put(digest, {{"digest", digest},
                              {"template_id", env.template_id},
                              {"template_version", tpl.version()},
                              {"schema", to_string(env.expected_schema)},
                              {"raw", last_raw},
                              {"payload", *doc}});
    }
    return r;
  }
  throw MalformedAfterRetries(last_raw, max_attempts, why);
}

// ----------------------------------------------------------------- slots

std::string numbered_listing(const SourceUnit& unit) {
  std::string out;
  char buf[16];
  for (std::size_t i = 0; i < unit.lines.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%4zu | ", i + 1);
    out += buf;
    out += unit.lines[i];
    out += '\n';
  }
  return out;
}

std::vector<std::string> parse_listing(std::string_view listing) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start < listing.size()) {
    auto nl = listing.find('\n', start);
    auto line = listing.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    auto bar = line.find(" | ");
    if (bar != std::string_view::npos) {
      lines.emplace_back(line.substr(bar + 3));
    } else if (auto b = line.find(" |"); b != std::string_view::npos && b + 2 == line.size()) {
      lines.emplace_back();
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

}  // namespace relog::gateway
