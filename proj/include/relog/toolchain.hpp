#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relog/core.hpp"

namespace relog::toolchain {

/// The external command could not be spawned at all. Distinct from a
/// command that ran and failed.
class ToolchainUnavailable : public Error {
public:
  using Error::Error;
};

class ProfileInvalid : public Error {
public:
  using Error::Error;
};

/// One regex rule turning a compiler output line into (file, line, message).
/// Group indices are 1-based; 0 means "not captured".
struct DiagnosticPattern {
  std::string regex;
  int file_group = 1;
  int line_group = 2;
  int severity_group = 0;
  int message_group = 3;
};

struct TracePatterns {
  std::string header = R"(^Exception in thread "[^"]*" ([A-Za-z_][\w:.<>$]*): ?(.*)$)";
  std::string frame = R"(^\s+at ([^\s(]*)\(([^:()]+):(\d+)\)\s*$)";
};

struct ToolchainProfile {
  std::string name = "default";
  /// Directory that support files are resolved against.
  std::filesystem::path base_dir;
  /// Files copied into each fresh workspace, relative to base_dir.
  std::vector<std::string> support_files;
  std::string compile_cmd;
  std::string run_cmd;
  std::optional<std::string> test_cmd;
  double timeout_s = 10.0;
  std::vector<DiagnosticPattern> diagnostic_patterns;
  TracePatterns trace;
  std::string log_marker = "@@RELOG ";
  std::vector<std::string> env_passthrough = {"PATH", "HOME", "LANG", "TMPDIR"};
  std::size_t stream_cap = 256 * 1024;
  RenderProfile render = RenderProfile::cpp_default();

  /// Throws ProfileInvalid.
  void check() const;
  static ToolchainProfile load(const std::filesystem::path& file);
  static ToolchainProfile from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  nlohmann::json to_json() const;
};

struct CompilerDiagnostic {
  std::string file;
  /// Line in ORIGINAL coordinates for the instrumented file; for a marker
  /// line this is the offending statement's anchor.
  std::size_t line = 0;
  std::size_t rendered_line = 0;
  std::string severity = "error";
  std::string message;
  std::string raw;
  std::optional<std::size_t> statement_index;

  bool is_error() const { return severity == "error" || severity == "fatal error"; }
};

struct CompileResult {
  bool ok = true;
  std::vector<CompilerDiagnostic> diagnostics;
  std::optional<int> exit_code;
  std::string output;
};

enum class OutcomeStatus { pass, test_failure, exception, timeout, crash };
std::string_view to_string(OutcomeStatus s);
OutcomeStatus parse_outcome_status(std::string_view s);

struct StackFrame {
  std::string function;
  std::string file;
  std::size_t line = 0;
  std::size_t rendered_line = 0;
  std::optional<std::size_t> statement_index;
};

struct ExceptionInfo {
  std::string type_name;
  std::string message;
  std::vector<StackFrame> frames;
};

struct LogEvent {
  Severity severity = Severity::info;
  std::string message;
  std::optional<std::size_t> source_marker;
  std::size_t sequence = 0;
};

struct ExecutionOutcome {
  OutcomeStatus status = OutcomeStatus::pass;
  std::optional<int> exit_code;
  std::optional<ExceptionInfo> exception;
  std::string stdout_text;
  std::string stderr_text;
  bool stdout_truncated = false;
  bool stderr_truncated = false;
  std::vector<LogEvent> log_events;
  std::int64_t wall_time_ms = 0;
};

/// Every line starting with the profile's log marker becomes one event.
std::vector<LogEvent> extract_log_events(std::string_view text, const ToolchainProfile& profile);

std::vector<CompilerDiagnostic> parse_diagnostics(std::string_view output, const ToolchainProfile& profile);
std::optional<ExceptionInfo> parse_exception(std::string_view text, const ToolchainProfile& profile);

/// A throwaway directory holding one instrumented unit, its companion units
/// and the profile's support files. Removed on destruction.
class Workspace {
public:
  Workspace(const ToolchainProfile& profile, const InstrumentedUnit& unit, std::span<const SourceUnit> companions = {});
  ~Workspace();
  Workspace(const Workspace&) = delete;
  Workspace& operator=(const Workspace&) = delete;

  const std::filesystem::path& dir() const { return dir_; }

  CompileResult compile();
  /// Runs test_cmd (with `tests`) when the profile has one, else run_cmd.
  ExecutionOutcome execute(const std::vector<std::string>& tests = {});

private:
  std::vector<std::string> expand(const std::string& command, const std::vector<std::string>& tests) const;
  std::string normalize(std::string text) const;

  const ToolchainProfile& profile_;
  InstrumentedUnit unit_;
  std::vector<std::string> sources_;
  std::filesystem::path dir_;
};

CompileResult compile(const InstrumentedUnit& unit, const ToolchainProfile& profile,
                      std::span<const SourceUnit> companions = {});

/// Compiles (when compile_cmd is set) and runs in a fresh workspace.
/// Throws Error when compilation fails.
ExecutionOutcome execute(const InstrumentedUnit& unit, const ToolchainProfile& profile,
                         std::span<const SourceUnit> companions = {}, const std::vector<std::string>& tests = {});

void to_json(nlohmann::json& j, const CompilerDiagnostic& d);
void from_json(const nlohmann::json& j, CompilerDiagnostic& d);
void to_json(nlohmann::json& j, const CompileResult& r);
void from_json(const nlohmann::json& j, CompileResult& r);
void to_json(nlohmann::json& j, const LogEvent& e);
void from_json(const nlohmann::json& j, LogEvent& e);
void to_json(nlohmann::json& j, const StackFrame& f);
void from_json(const nlohmann::json& j, StackFrame& f);
void to_json(nlohmann::json& j, const ExceptionInfo& e);
void from_json(const nlohmann::json& j, ExceptionInfo& e);
/// Omits wall_time_ms so serialized outcomes are reproducible.
void to_json(nlohmann::json& j, const ExecutionOutcome& o);
void from_json(const nlohmann::json& j, ExecutionOutcome& o);

}  // namespace relog::toolchain
