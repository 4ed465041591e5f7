#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relog/core.hpp"
#include "relog/gateway.hpp"
#include "relog/pipeline.hpp"

namespace relog::cli {

enum ExitCode : int {
  kSufficient = 0,
  kBudgetExhausted = 2,
  kCompileFailed = 3,
  kExecutionError = 4,
  kConfigError = 10,
  kIoError = 11,
  kToolchainUnavailable = 12,
  kRepoUnreadable = 13,
  kManifestInvalid = 14,
};

int exit_code_for(pipeline::Termination t);

class ConfigError : public Error {
public:
  using Error::Error;
};

class IoError : public Error {
public:
  using Error::Error;
};

struct ProviderSettings {
  std::string kind = "stub";  // stub | replay | remote
  /// Stub knobs for `run`; `eval` takes them from the manifest.
  nlohmann::json stub = nlohmann::json::object();
  std::optional<std::filesystem::path> replay_dir;
  std::optional<gateway::RemoteConfig> remote;
};

/// JSON config file. Relative paths resolve against the file's directory.
struct RunConfig {
  std::optional<std::filesystem::path> toolchain;
  ProviderSettings provider;
  int max_iterations = 5;
  int fix_budget = 3;
  int retry_limit = 2;
  bool ablate_fixer = false;
  bool ablate_refine = false;
  std::vector<pipeline::Dimension> dimensions = pipeline::default_dimensions();
  pipeline::Mode mode = pipeline::Mode::direct;
  std::filesystem::path output_dir = "runs";
  unsigned threads = 1;

  /// Throws ConfigError.
  static RunConfig from_json(const nlohmann::json& j, const std::filesystem::path& base_dir);
  /// Throws ConfigError (bad content) or IoError (unreadable file).
  static RunConfig load(const std::filesystem::path& file);
  /// Throws ConfigError.
  void check() const;
  pipeline::LoopConfig loop() const;
};

/// Fresh `<output_dir>/<UTC timestamp>-<command>-<name>` directory.
std::filesystem::path make_run_dir(const std::filesystem::path& output_dir, const std::string& command,
                                   const std::string& name);

/// Entry point. Never throws; errors map to exit codes.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace relog::cli
