#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "relog/core.hpp"

namespace relog::gateway {

class MalformedAfterRetries : public Error {
public:
  MalformedAfterRetries(std::string last_raw, int attempts, const std::string& why)
      : Error("no valid response after " + std::to_string(attempts) + " attempts: " + why),
        last_raw_(std::move(last_raw)),
        attempts_(attempts) {}
  const std::string& last_raw() const noexcept { return last_raw_; }
  int attempts() const noexcept { return attempts_; }

private:
  std::string last_raw_;
  int attempts_;
};

class ProviderUnavailable : public Error {
public:
  using Error::Error;
};

class ReplayMiss : public Error {
public:
  explicit ReplayMiss(const std::string& digest) : Error("no recorded response for envelope " + digest), digest_(digest) {}
  const std::string& digest() const noexcept { return digest_; }

private:
  std::string digest_;
};

class StoreWriteFailure : public Error {
public:
  using Error::Error;
};

enum class ProviderKind { remote, replay, stub };
std::string_view to_string(ProviderKind k);

/// generation and repair answer with a plan, critic with a verdict,
/// refinement with an edit list, debug with a defect report.
enum class Schema { generation, repair, critic, refinement, debug };
std::string_view to_string(Schema s);
Schema parse_schema(std::string_view s);

/// Validates a payload; returns the first problem found.
std::optional<std::string> validate_payload(Schema s, const nlohmann::json& payload);

/// Pulls a JSON document out of model text (bare, fenced, or embedded).
std::optional<nlohmann::json> extract_json(std::string_view raw);

struct PromptTemplate {
  std::string id;
  std::string text;
  Schema schema = Schema::generation;

  /// Content hash prefix.
  std::string version() const;
  /// Slot names referenced as {{name}}, sorted and unique.
  std::vector<std::string> slots() const;
};

class TemplateSet {
public:
  /// Built-in templates: generation, repair, critic, refinement, debug.
  static TemplateSet builtin();
  /// Built-ins overridden by `<id>.txt` files found in `dir`.
  static TemplateSet with_overrides(const std::filesystem::path& dir);

  const PromptTemplate& get(const std::string& id) const;
  bool contains(const std::string& id) const { return templates_.count(id) != 0; }

private:
  std::map<std::string, PromptTemplate> templates_;
};

struct PromptEnvelope {
  std::string template_id;
  std::map<std::string, std::string> slots;
  Schema expected_schema = Schema::generation;
  int budget = 4096;
};

/// Throws Error when the template demands a slot the envelope lacks.
std::string render_prompt(const PromptEnvelope& env, const PromptTemplate& tpl);

/// sha256 over (template_id, template version, slot texts).
std::string envelope_digest(const PromptEnvelope& env, const PromptTemplate& tpl);

struct StructuredResponse {
  nlohmann::json payload;
  std::string raw;
  ProviderKind provider = ProviderKind::stub;
  int attempts = 1;
  std::string digest;
};

struct ProviderRequest {
  const PromptEnvelope& envelope;
  const std::string& prompt;
  const std::string& digest;
  int attempt = 1;
  /// Validation error of the previous attempt, empty on the first.
  std::string previous_error;
};

class Provider {
public:
  virtual ~Provider() = default;
  virtual ProviderKind kind() const = 0;
  /// Raw completion text. Implementations must be safe for concurrent calls.
  virtual std::string complete_raw(const ProviderRequest& req) = 0;
};

/// Directory of `<digest>.json` entries, written by temp file + rename.
class ReplayStore {
public:
  explicit ReplayStore(std::filesystem::path dir);

  const std::filesystem::path& dir() const { return dir_; }
  std::optional<nlohmann::json> get(const std::string& digest) const;
  /// Existing entries are left untouched. Throws StoreWriteFailure.
  void put(const std::string& digest, const nlohmann::json& entry);
  std::size_t size() const;

private:
  std::filesystem::path dir_;
};

class ReplayProvider : public Provider {
public:
  explicit ReplayProvider(std::shared_ptr<const ReplayStore> store) : store_(std::move(store)) {}
  ProviderKind kind() const override { return ProviderKind::replay; }
  std::string complete_raw(const ProviderRequest& req) override;

private:
  std::shared_ptr<const ReplayStore> store_;
};

struct RemoteConfig {
  std::string base_url;
  std::string path = "/v1/chat/completions";
  std::string model;
  /// Name of the environment variable holding the credential.
  std::string api_key_env;
  double timeout_s = 120;
  double temperature = 0;
  std::string system_prompt = "Reply with exactly one JSON document and nothing else.";
};

void from_json(const nlohmann::json& j, RemoteConfig& c);

/// Chat-completion style HTTP endpoint.
class RemoteProvider : public Provider {
public:
  explicit RemoteProvider(RemoteConfig cfg);
  ProviderKind kind() const override { return ProviderKind::remote; }
  std::string complete_raw(const ProviderRequest& req) override;

private:
  RemoteConfig cfg_;
  std::string api_key_;
};

struct Expectation {
  std::string variable;
  std::string op = "==";  // == != < <= > >=
  nlohmann::json value;

  /// True when a logged textual value satisfies the expectation.
  bool holds(std::string_view logged) const;
};

struct Location {
  std::string file;
  std::size_t line = 0;
};

/// Per-instance knobs of the rule stub.
struct StubConfig {
  enum class Critic { oracle, always_insufficient, always_sufficient };
  enum class Fixer { heuristic, never };
  enum class Fault { none, undeclared, unreachable };

  std::optional<std::string> key_variable;
  std::size_t key_anchor = 0;
  Position key_position = Position::after;
  Critic critic = Critic::oracle;
  Fixer fixer = Fixer::heuristic;
  Fault inject_fault = Fault::none;
  int window = 2;

  std::optional<Expectation> expectation;
  std::optional<Location> implicates;
  /// {file, hunks:[{line, delete, insert[]}]}, offered when the agent
  /// reports a location near the first hunk.
  std::optional<nlohmann::json> patch;
  int patch_radius = 5;
};

void from_json(const nlohmann::json& j, StubConfig& c);
void to_json(nlohmann::json& j, const StubConfig& c);

/// Deterministic rule-based stand-in for a model.
class StubProvider : public Provider {
public:
  explicit StubProvider(StubConfig cfg = {}) : cfg_(std::move(cfg)) {}
  ProviderKind kind() const override { return ProviderKind::stub; }
  std::string complete_raw(const ProviderRequest& req) override;
  const StubConfig& config() const { return cfg_; }

  nlohmann::json generate(const PromptEnvelope& env) const;
  nlohmann::json repair(const PromptEnvelope& env) const;
  nlohmann::json critique(const PromptEnvelope& env) const;
  nlohmann::json refine(const PromptEnvelope& env) const;
  nlohmann::json debug(const PromptEnvelope& env) const;

private:
  StubConfig cfg_;
};

/// Numbered listing used for the `source` slots: "%4d | text".
std::string numbered_listing(const SourceUnit& unit);
std::vector<std::string> parse_listing(std::string_view listing);

class Gateway {
public:
  Gateway(std::shared_ptr<Provider> provider, TemplateSet templates = TemplateSet::builtin(), int retry_limit = 2);

  /// Every successful completion is also written to `store`.
  void record_to(std::shared_ptr<ReplayStore> store) { recorder_ = std::move(store); }

  StructuredResponse complete(const PromptEnvelope& env) const;

  const TemplateSet& templates() const { return templates_; }
  ProviderKind kind() const { return provider_->kind(); }
  int retry_limit() const { return retry_limit_; }

private:
  std::shared_ptr<Provider> provider_;
  TemplateSet templates_;
  int retry_limit_;
  std::shared_ptr<ReplayStore> recorder_;
};

}  // namespace relog::gateway
