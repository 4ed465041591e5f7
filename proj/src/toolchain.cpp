#include "relog/toolchain.hpp"

#include <cstdlib>
#include <fstream>
#include <regex>
#include <sstream>

#include "relog/process.hpp"

namespace relog::toolchain {

namespace fs = std::filesystem;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw Error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
  fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error("cannot write " + p.string());
  out << text;
}

void replace_all(std::string& text, const std::string& from, const std::string& to) {
  if (from.empty()) return;
  for (auto pos = text.find(from); pos != std::string::npos; pos = text.find(from, pos + to.size())) {
    text.replace(pos, from.size(), to);
  }
}

bool is_safe_relative(const std::string& path) {
  fs::path p(path);
  if (path.empty() || p.is_absolute()) return false;
  for (const auto& part : p) {
    if (part == "..") return false;
  }
  return true;
}

bool same_file(std::string_view reported, std::string_view unit_path) {
  if (reported == unit_path) return true;
  if (reported.size() > unit_path.size() && reported.substr(reported.size() - unit_path.size()) == unit_path &&
      reported[reported.size() - unit_path.size() - 1] == '/') {
    return true;
  }
  return reported.substr(0, 2) == "./" && reported.substr(2) == unit_path;
}

std::string regex_escape(std::string_view s) {
  static const std::string special = R"(\^$.|?*+()[]{})";
  std::string out;
  for (char c : s) {
    if (special.find(c) != std::string::npos) out += '\\';
    out += c;
  }
  return out;
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto end = nl == std::string_view::npos ? text.size() : nl;
    auto line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

DiagnosticPattern default_diagnostic_pattern() {
  return {R"(^([^:\s][^:]*):(\d+):(?:\d+:)?\s*(error|warning|note|fatal error):\s*(.*)$)", 1, 2, 3, 4};
}

}  // namespace

std::string_view to_string(OutcomeStatus s) {
  switch (s) {
    case OutcomeStatus::pass: return "pass";
    case OutcomeStatus::test_failure: return "test_failure";
    case OutcomeStatus::exception: return "exception";
    case OutcomeStatus::timeout: return "timeout";
    case OutcomeStatus::crash: return "crash";
  }
  return "crash";
}

OutcomeStatus parse_outcome_status(std::string_view s) {
  for (auto st : {OutcomeStatus::pass, OutcomeStatus::test_failure, OutcomeStatus::exception, OutcomeStatus::timeout,
                  OutcomeStatus::crash}) {
    if (to_string(st) == s) return st;
  }
  throw Error("unknown outcome status '" + std::string(s) + "'");
}

// ---------------------------------------------------------------- profile

void ToolchainProfile::check() const {
  if (!(timeout_s > 0)) throw ProfileInvalid("timeout_s must be positive");
  if (run_cmd.empty() && !test_cmd) throw ProfileInvalid("run_cmd or test_cmd required");
  if (log_marker.empty()) throw ProfileInvalid("log_marker must not be empty");
  for (const auto& p : diagnostic_patterns) {
    try {
      std::regex re(p.regex);
    } catch (const std::regex_error& e) {
      throw ProfileInvalid("bad diagnostic pattern '" + p.regex + "': " + e.what());
    }
  }
  for (const auto& f : support_files) {
    if (!is_safe_relative(f)) throw ProfileInvalid("support file must be a relative path: " + f);
  }
}

ToolchainProfile ToolchainProfile::from_json(const nlohmann::json& j, const fs::path& base_dir) {
  ToolchainProfile p;
  p.base_dir = base_dir;
  try {
    p.name = j.value("name", p.name);
    if (j.contains("workspace_template")) {
      p.support_files = j["workspace_template"].value("support_files", std::vector<std::string>{});
    }
    p.compile_cmd = j.value("compile_cmd", std::string{});
    p.run_cmd = j.value("run_cmd", std::string{});
    if (j.contains("test_cmd") && !j["test_cmd"].is_null()) p.test_cmd = j["test_cmd"].get<std::string>();
    p.timeout_s = j.value("timeout_s", p.timeout_s);
    if (j.contains("diagnostic_patterns")) {
      for (const auto& d : j["diagnostic_patterns"]) {
        DiagnosticPattern dp;
        dp.regex = d.at("regex").get<std::string>();
        dp.file_group = d.value("file", 1);
        dp.line_group = d.value("line", 2);
        dp.severity_group = d.value("severity", 0);
        dp.message_group = d.value("message", 3);
        p.diagnostic_patterns.push_back(dp);
      }
    } else {
      p.diagnostic_patterns.push_back(default_diagnostic_pattern());
    }
    if (j.contains("trace_patterns")) {
      p.trace.header = j["trace_patterns"].value("header", p.trace.header);
      p.trace.frame = j["trace_patterns"].value("frame", p.trace.frame);
    }
    p.log_marker = j.value("log_marker", p.log_marker);
    p.env_passthrough = j.value("env_passthrough", p.env_passthrough);
    p.stream_cap = j.value("stream_cap_bytes", p.stream_cap);
    if (j.contains("render")) p.render = j["render"].get<RenderProfile>();
  } catch (const nlohmann::json::exception& e) {
    throw ProfileInvalid(std::string("toolchain profile: ") + e.what());
  }
  p.check();
  return p;
}

ToolchainProfile ToolchainProfile::load(const fs::path& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file(file));
  } catch (const nlohmann::json::exception& e) {
    throw ProfileInvalid(file.string() + ": " + e.what());
  }
  return from_json(j, file.parent_path());
}

nlohmann::json ToolchainProfile::to_json() const {
  nlohmann::json diags = nlohmann::json::array();
  for (const auto& d : diagnostic_patterns) {
    diags.push_back({{"regex", d.regex}, {"file", d.file_group}, {"line", d.line_group},
                     {"severity", d.severity_group}, {"message", d.message_group}});
  }
  return {{"name", name},
          {"workspace_template", {{"support_files", support_files}}},
          {"compile_cmd", compile_cmd},
          {"run_cmd", run_cmd},
          {"test_cmd", test_cmd ? nlohmann::json(*test_cmd) : nlohmann::json()},
          {"timeout_s", timeout_s},
          {"diagnostic_patterns", diags},
          {"trace_patterns", {{"header", trace.header}, {"frame", trace.frame}}},
          {"log_marker", log_marker},
          {"env_passthrough", env_passthrough},
          {"stream_cap_bytes", stream_cap},
          {"render", render}};
}

// ---------------------------------------------------------------- parsing

std::vector<LogEvent> extract_log_events(std::string_view text, const ToolchainProfile& profile) {
  std::vector<LogEvent> events;
  std::string token_re = regex_escape(profile.render.index_token);
  replace_all(token_re, regex_escape("{index}"), "(\\d+)");
  const std::regex index_re(token_re);
  for (auto line : split_lines(text)) {
    if (line.substr(0, profile.log_marker.size()) != profile.log_marker) continue;
    auto rest = line.substr(profile.log_marker.size());
    LogEvent ev;
    auto space = rest.find(' ');
    std::string level(rest.substr(0, space));
    for (auto& c : level) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    try {
      ev.severity = parse_severity(level);
      rest = space == std::string_view::npos ? std::string_view{} : rest.substr(space + 1);
    } catch (const InvalidStatement&) {
      ev.severity = Severity::info;
    }
    ev.message = std::string(rest);
    std::smatch m;
    if (!profile.render.index_token.empty() && std::regex_search(ev.message, m, index_re)) {
      ev.source_marker = std::stoul(m[1].str());
    }
    ev.sequence = events.size() + 1;
    events.push_back(std::move(ev));
  }
  return events;
}

std::vector<CompilerDiagnostic> parse_diagnostics(std::string_view output, const ToolchainProfile& profile) {
  std::vector<std::regex> res;
  for (const auto& p : profile.diagnostic_patterns) res.emplace_back(p.regex);
  std::vector<CompilerDiagnostic> out;
  for (auto line : split_lines(output)) {
    std::string s(line);
    for (std::size_t i = 0; i < res.size(); ++i) {
      std::smatch m;
      if (!std::regex_match(s, m, res[i])) continue;
      const auto& p = profile.diagnostic_patterns[i];
      CompilerDiagnostic d;
      d.raw = s;
      if (p.file_group > 0) d.file = m[p.file_group].str();
      if (p.line_group > 0) d.line = d.rendered_line = std::stoul(m[p.line_group].str());
      if (p.severity_group > 0) d.severity = m[p.severity_group].str();
      if (p.message_group > 0) d.message = m[p.message_group].str();
      out.push_back(std::move(d));
      break;
    }
  }
  return out;
}

std::optional<ExceptionInfo> parse_exception(std::string_view text, const ToolchainProfile& profile) {
  const std::regex header(profile.trace.header);
  const std::regex frame(profile.trace.frame);
  std::optional<ExceptionInfo> info;
  for (auto line : split_lines(text)) {
    std::string s(line);
    std::smatch m;
    if (!info) {
      if (std::regex_match(s, m, header)) {
        info.emplace();
        info->type_name = m[1].str();
        if (m.size() > 2) info->message = m[2].str();
      }
      continue;
    }
    if (std::regex_match(s, m, frame)) {
      StackFrame f;
      f.function = m[1].str();
      f.file = m[2].str();
      f.line = f.rendered_line = std::stoul(m[3].str());
      info->frames.push_back(std::move(f));
    } else if (!info->frames.empty()) {
      break;
    }
  }
  return info;
}

// ---------------------------------------------------------------- workspace

Workspace::Workspace(const ToolchainProfile& profile, const InstrumentedUnit& unit, std::span<const SourceUnit> companions)
    : profile_(profile), unit_(unit) {
  std::string tmpl = (fs::temp_directory_path() / "relog-ws-XXXXXX").string();
  if (::mkdtemp(tmpl.data()) == nullptr) throw Error("cannot create workspace under " + fs::temp_directory_path().string());
  dir_ = tmpl;
  try {
    for (const auto& f : profile.support_files) {
      fs::copy_file(profile.base_dir / f, dir_ / f, fs::copy_options::overwrite_existing);
    }
    if (!is_safe_relative(unit.base.path)) throw Error("unit path must be relative: " + unit.base.path);
    write_file(dir_ / unit.base.path, unit.rendered().text());
    sources_.push_back(unit.base.path);
    for (const auto& c : companions) {
      if (!is_safe_relative(c.path)) throw Error("unit path must be relative: " + c.path);
      if (c.path == unit.base.path) continue;
      write_file(dir_ / c.path, c.text());
      sources_.push_back(c.path);
    }
  } catch (...) {
    std::error_code ec;
    fs::remove_all(dir_, ec);
    throw;
  }
}

Workspace::~Workspace() {
  std::error_code ec;
  fs::remove_all(dir_, ec);
}

std::vector<std::string> Workspace::expand(const std::string& command, const std::vector<std::string>& tests) const {
  std::vector<std::string> argv;
  std::ostringstream timeout;
  timeout << profile_.timeout_s;
  for (auto token : split_command(command)) {
    if (token == "{tests}") {
      argv.insert(argv.end(), tests.begin(), tests.end());
      continue;
    }
    if (token == "{sources}") {
      argv.insert(argv.end(), sources_.begin(), sources_.end());
      continue;
    }
    replace_all(token, "{workspace}", dir_.string());
    replace_all(token, "{main_file}", unit_.base.path);
    replace_all(token, "{timeout}", timeout.str());
    argv.push_back(std::move(token));
  }
  return argv;
}

std::string Workspace::normalize(std::string text) const {
  replace_all(text, dir_.string() + "/", "");
  replace_all(text, dir_.string(), "{workspace}");
  return text;
}

CompileResult Workspace::compile() {
  CompileResult result;
  if (profile_.compile_cmd.empty()) return result;
  ProcessSpec spec;
  spec.argv = expand(profile_.compile_cmd, {});
  spec.cwd = dir_;
  spec.env = environment_subset(profile_.env_passthrough);
  spec.timeout = std::chrono::milliseconds(static_cast<long long>(profile_.timeout_s * 1000 * 6));
  spec.stream_cap = profile_.stream_cap;
  auto proc = run_process(spec);
  if (!proc.spawned) throw ToolchainUnavailable("compile: " + proc.spawn_error);
  result.exit_code = proc.exit_code;
  result.output = normalize(proc.err + proc.out);
  result.ok = proc.success();
  result.diagnostics = parse_diagnostics(result.output, profile_);
  for (auto& d : result.diagnostics) {
    if (!same_file(d.file, unit_.base.path)) continue;
    d.file = unit_.base.path;
    if (auto orig = unit_.original_line(d.rendered_line)) {
      d.line = *orig;
    } else if (auto idx = unit_.statement_at(d.rendered_line)) {
      d.statement_index = idx;
      d.line = unit_.anchor_at(d.rendered_line).value_or(0);
    }
  }
  if (result.ok) {
    std::erase_if(result.diagnostics, [](const CompilerDiagnostic& d) { return d.is_error(); });
  }
  return result;
}

ExecutionOutcome Workspace::execute(const std::vector<std::string>& tests) {
  ExecutionOutcome outcome;
  const bool testing = profile_.test_cmd.has_value();
  ProcessSpec spec;
  spec.argv = expand(testing ? *profile_.test_cmd : profile_.run_cmd, tests);
  spec.cwd = dir_;
  spec.env = environment_subset(profile_.env_passthrough);
  spec.timeout = std::chrono::milliseconds(static_cast<long long>(profile_.timeout_s * 1000));
  spec.stream_cap = profile_.stream_cap;
  auto proc = run_process(spec);
  if (!proc.spawned) throw ToolchainUnavailable("run: " + proc.spawn_error);

  outcome.wall_time_ms = proc.wall_ms;
  outcome.stdout_text = normalize(std::move(proc.out));
  outcome.stderr_text = normalize(std::move(proc.err));
  outcome.stdout_truncated = proc.out_truncated;
  outcome.stderr_truncated = proc.err_truncated;
  outcome.log_events = extract_log_events(outcome.stderr_text, profile_);
  for (auto& ev : extract_log_events(outcome.stdout_text, profile_)) {
    ev.sequence = outcome.log_events.size() + 1;
    outcome.log_events.push_back(std::move(ev));
  }

  auto exception = parse_exception(outcome.stderr_text, profile_);
  if (!exception) exception = parse_exception(outcome.stdout_text, profile_);
  if (exception) {
    for (auto& f : exception->frames) {
      if (!same_file(f.file, unit_.base.path)) continue;
      f.file = unit_.base.path;
      if (auto orig = unit_.original_line(f.rendered_line)) {
        f.line = *orig;
      } else if (auto idx = unit_.statement_at(f.rendered_line)) {
        f.statement_index = idx;
        f.line = unit_.anchor_at(f.rendered_line).value_or(0);
      }
    }
  }

  if (proc.timed_out || proc.wall_ms > static_cast<std::int64_t>(profile_.timeout_s * 1000)) {
    outcome.status = OutcomeStatus::timeout;
    outcome.exit_code.reset();
  } else if (exception) {
    outcome.status = OutcomeStatus::exception;
    outcome.exception = std::move(exception);
    outcome.exit_code = proc.exit_code;
  } else if (testing && !proc.success()) {
    outcome.status = OutcomeStatus::test_failure;
    outcome.exit_code = proc.exit_code;
  } else if (!proc.success()) {
    outcome.status = OutcomeStatus::crash;
    outcome.exit_code = proc.exit_code;
  } else {
    outcome.status = OutcomeStatus::pass;
    outcome.exit_code = proc.exit_code;
  }
  return outcome;
}

CompileResult compile(const InstrumentedUnit& unit, const ToolchainProfile& profile, std::span<const SourceUnit> companions) {
  Workspace ws(profile, unit, companions);
  return ws.compile();
}

ExecutionOutcome execute(const InstrumentedUnit& unit, const ToolchainProfile& profile,
                         std::span<const SourceUnit> companions, const std::vector<std::string>& tests) {
  Workspace ws(profile, unit, companions);
  auto c = ws.compile();
  if (!c.ok) throw Error("execute: compilation failed:\n" + c.output);
  return ws.execute(tests);
}

// ---------------------------------------------------------------- json

void to_json(nlohmann::json& j, const CompilerDiagnostic& d) {
  j = {{"file", d.file},         {"line", d.line}, {"rendered_line", d.rendered_line}, {"severity", d.severity},
       {"message", d.message},   {"raw", d.raw},
       {"statement_index", d.statement_index ? nlohmann::json(*d.statement_index) : nlohmann::json()}};
}

void from_json(const nlohmann::json& j, CompilerDiagnostic& d) {
  d.file = j.at("file").get<std::string>();
  d.line = j.at("line").get<std::size_t>();
  d.rendered_line = j.value("rendered_line", d.line);
  d.severity = j.value("severity", std::string("error"));
  d.message = j.at("message").get<std::string>();
  d.raw = j.value("raw", std::string{});
  if (j.contains("statement_index") && !j["statement_index"].is_null()) d.statement_index = j["statement_index"].get<std::size_t>();
}

void to_json(nlohmann::json& j, const CompileResult& r) {
  j = {{"ok", r.ok},
       {"diagnostics", r.diagnostics},
       {"exit_code", r.exit_code ? nlohmann::json(*r.exit_code) : nlohmann::json()}};
}

void from_json(const nlohmann::json& j, CompileResult& r) {
  r.ok = j.at("ok").get<bool>();
  r.diagnostics = j.value("diagnostics", std::vector<CompilerDiagnostic>{});
  if (j.contains("exit_code") && !j["exit_code"].is_null()) r.exit_code = j["exit_code"].get<int>();
}

void to_json(nlohmann::json& j, const LogEvent& e) {
  j = {{"sequence", e.sequence},
       {"severity", to_string(e.severity)},
       {"message", e.message},
       {"source_marker", e.source_marker ? nlohmann::json(*e.source_marker) : nlohmann::json()}};
}

void from_json(const nlohmann::json& j, LogEvent& e) {
  e.sequence = j.at("sequence").get<std::size_t>();
  e.severity = parse_severity(j.at("severity").get<std::string>());
  e.message = j.at("message").get<std::string>();
  if (j.contains("source_marker") && !j["source_marker"].is_null()) e.source_marker = j["source_marker"].get<std::size_t>();
}

void to_json(nlohmann::json& j, const StackFrame& f) {
  j = {{"function", f.function}, {"file", f.file}, {"line", f.line}, {"rendered_line", f.rendered_line},
       {"statement_index", f.statement_index ? nlohmann::json(*f.statement_index) : nlohmann::json()}};
}

void from_json(const nlohmann::json& j, StackFrame& f) {
  f.function = j.value("function", std::string{});
  f.file = j.at("file").get<std::string>();
  f.line = j.at("line").get<std::size_t>();
  f.rendered_line = j.value("rendered_line", f.line);
  if (j.contains("statement_index") && !j["statement_index"].is_null()) f.statement_index = j["statement_index"].get<std::size_t>();
}

void to_json(nlohmann::json& j, const ExceptionInfo& e) {
  j = {{"type_name", e.type_name}, {"message", e.message}, {"frames", e.frames}};
}

void from_json(const nlohmann::json& j, ExceptionInfo& e) {
  e.type_name = j.at("type_name").get<std::string>();
  e.message = j.value("message", std::string{});
  e.frames = j.value("frames", std::vector<StackFrame>{});
}

void to_json(nlohmann::json& j, const ExecutionOutcome& o) {
  j = {{"status", to_string(o.status)},
       {"exit_code", o.exit_code ? nlohmann::json(*o.exit_code) : nlohmann::json()},
       {"exception", o.exception ? nlohmann::json(*o.exception) : nlohmann::json()},
       {"stdout", o.stdout_text},
       {"stderr", o.stderr_text},
       {"stdout_truncated", o.stdout_truncated},
       {"stderr_truncated", o.stderr_truncated},
       {"log_events", o.log_events}};
}

void from_json(const nlohmann::json& j, ExecutionOutcome& o) {
  o.status = parse_outcome_status(j.at("status").get<std::string>());
  if (j.contains("exit_code") && !j["exit_code"].is_null()) o.exit_code = j["exit_code"].get<int>();
  if (j.contains("exception") && !j["exception"].is_null()) o.exception = j["exception"].get<ExceptionInfo>();
  o.stdout_text = j.value("stdout", std::string{});
  o.stderr_text = j.value("stderr", std::string{});
  o.stdout_truncated = j.value("stdout_truncated", false);
  o.stderr_truncated = j.value("stderr_truncated", false);
  o.log_events = j.value("log_events", std::vector<LogEvent>{});
  o.wall_time_ms = j.value("wall_time_ms", std::int64_t{0});
}

}  // namespace relog::toolchain
