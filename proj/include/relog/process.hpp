#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace relog {

struct ProcessSpec {
  std::vector<std::string> argv;
  std::filesystem::path cwd;
  std::map<std::string, std::string> env;
  std::chrono::milliseconds timeout{10000};
  std::size_t stream_cap = 256 * 1024;
};

struct ProcessResult {
  bool spawned = false;
  std::string spawn_error;
  std::optional<int> exit_code;
  std::optional<int> term_signal;
  bool timed_out = false;
  std::string out;
  std::string err;
  bool out_truncated = false;
  bool err_truncated = false;
  std::int64_t wall_ms = 0;

  bool success() const { return spawned && !timed_out && exit_code && *exit_code == 0; }
};

/// Runs argv[0] (PATH lookup against spec.env, falling back to the caller's
/// PATH) in its own process group. On timeout the whole group is killed.
ProcessResult run_process(const ProcessSpec& spec);

/// Whitespace splitting with single/double quote grouping; no expansion.
std::vector<std::string> split_command(std::string_view command);

/// Environment restricted to the named variables of the current process.
std::map<std::string, std::string> environment_subset(const std::vector<std::string>& names);

}  // namespace relog
