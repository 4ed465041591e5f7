#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relog/core.hpp"
#include "relog/gateway.hpp"
#include "relog/toolchain.hpp"

namespace relog::pipeline {

enum class Action { add, remove, modify };
std::string_view to_string(Action a);

struct FeedbackItem {
  Action action = Action::add;
  std::optional<std::size_t> target_anchor;
  std::string subject;
  std::string detail;

  bool operator==(const FeedbackItem&) const = default;
};

struct CriticVerdict {
  int traceability = 0;
  int state_visibility = 0;
  int causal_linkage = 0;
  std::map<std::string, int> extra_scores;
  bool sufficient = false;
  std::vector<FeedbackItem> feedback;
  std::string rationale;
};

struct Dimension {
  std::string name;
  std::string description;
};

/// Default rubric: traceability, state_visibility, causal_linkage.
std::vector<Dimension> default_dimensions();

/// Sufficient iff every scored dimension >= min_each and at least
/// `min_full` dimensions reach 2.
struct SufficiencyRule {
  int min_each = 1;
  int min_full = 2;
  bool operator()(const CriticVerdict& v) const;
};

enum class Mode { direct, indirect };
std::string_view to_string(Mode m);
Mode parse_mode(std::string_view s);

struct LoopConfig {
  int max_iterations = 5;
  int fix_budget = 3;
  bool ablate_fixer = false;
  bool ablate_refine = false;
  std::string plan_id = "relog";
  std::string goal = "locate and explain the defect behind the failing behaviour";
  std::vector<Dimension> dimensions = default_dimensions();
  SufficiencyRule rule;
  bool critic_sees_source = true;
  std::size_t summary_events = 50;
  std::size_t summary_stream_chars = 2000;

  /// Throws Error on non-positive budgets.
  void check() const;
};

enum class Termination { sufficient, budget_exhausted, compile_failed, execution_error };
std::string_view to_string(Termination t);
Termination parse_termination(std::string_view s);

struct GatewayCall {
  std::string stage;
  std::string digest;
};

struct RepairStep {
  LoggingPlan plan;
  toolchain::CompileResult compile;
};

struct IterationRecord {
  std::size_t iteration = 0;
  /// Outcome of the uninstrumented program; iteration 0 only.
  std::optional<toolchain::ExecutionOutcome> probe;
  /// Plan actually compiled (after any repairs).
  LoggingPlan plan;
  /// Failed candidates preceding `plan`, each followed by one fixer call.
  std::vector<RepairStep> repairs;
  toolchain::CompileResult compile;
  bool logic_preserved = true;
  std::optional<toolchain::ExecutionOutcome> outcome;
  std::optional<CriticVerdict> verdict;
  std::vector<GatewayCall> gateway_calls;
  /// Anchors clamped into range, and refinement edits that were skipped.
  std::vector<std::string> notes;

  std::size_t fix_attempts() const { return repairs.size(); }
};

struct RunError {
  std::string kind;  // toolchain_unavailable, gateway, pristine_compile, ...
  std::string message;
};

struct RunLedger {
  std::string source_path;
  std::string source_digest;
  nlohmann::json config;
  std::vector<IterationRecord> iterations;
  Termination termination = Termination::execution_error;
  LoggingPlan final_plan;
  std::optional<RunError> error;

  /// Header line, one line per iteration, footer line.
  std::string to_jsonl() const;
  static RunLedger from_jsonl(std::string_view text);
  std::string digest() const;

  /// Outcome of the last executed iteration, if any.
  const toolchain::ExecutionOutcome* final_outcome() const;
};

/// What a run works on. In indirect mode `source` is the caller unit and the
/// defective unit travels in `companions`.
struct RunInputs {
  SourceUnit source;
  std::vector<SourceUnit> companions;
  std::vector<std::string> tests;
  Mode mode = Mode::direct;
  /// Known outcome of the uninstrumented program; skips the probe build.
  std::optional<toolchain::ExecutionOutcome> probe;
};

// ---- stage operations

toolchain::ExecutionOutcome probe_original(const RunInputs& in, const toolchain::ToolchainProfile& profile);

/// Bounded outcome view used in prompts.
nlohmann::json summarize_outcome(const toolchain::ExecutionOutcome& o, const toolchain::ToolchainProfile& profile,
                                 const LoopConfig& cfg);

/// Log events joined with the statement and anchor that emitted them.
nlohmann::json events_view(const toolchain::ExecutionOutcome& o, const LoggingPlan& plan, const std::string& file,
                           std::size_t cap);

/// Parses a plan payload, forces plan_id/revision, clamps anchors (noting
/// each clamp) and normalizes.
LoggingPlan accept_plan(const nlohmann::json& payload, const SourceUnit& source, const std::string& plan_id,
                        std::uint64_t revision, std::vector<std::string>* notes);

struct StageResult {
  LoggingPlan plan;
  GatewayCall call;
};

StageResult generate_initial_plan(const RunInputs& in, const toolchain::ExecutionOutcome& outcome0,
                                  const gateway::Gateway& gw, const toolchain::ToolchainProfile& profile,
                                  const LoopConfig& cfg, std::vector<std::string>* notes);

struct RepairResult {
  /// Workspace holding the compiled program when `compile.ok`.
  std::unique_ptr<toolchain::Workspace> workspace;
  LoggingPlan plan;
  toolchain::CompileResult compile;
  std::vector<RepairStep> failed;
  std::vector<GatewayCall> calls;
  int attempts = 0;
  bool logic_preserved = true;
};

/// Compiles `plan` into the pristine source and, while it fails, asks the
/// fixer for a new plan, at most `fix_budget` times.
RepairResult repair_compilation(const RunInputs& in, const LoggingPlan& plan, const toolchain::ToolchainProfile& profile,
                                const gateway::Gateway& gw, int fix_budget, const LoopConfig& cfg,
                                std::vector<std::string>* notes);

CriticVerdict verdict_from_json(const nlohmann::json& payload, const SufficiencyRule& rule);

std::pair<CriticVerdict, GatewayCall> evaluate_sufficiency(const RunInputs& in, const LoggingPlan& plan,
                                                           const toolchain::ExecutionOutcome& outcome,
                                                           const gateway::Gateway& gw,
                                                           const toolchain::ToolchainProfile& profile,
                                                           const LoopConfig& cfg);

/// Applies an edit list to a plan: revision + 1, normalized. Edits naming
/// an absent anchor are skipped and reported in `errors`.
LoggingPlan apply_edits(const LoggingPlan& plan, const nlohmann::json& edits, std::vector<std::string>* errors);

StageResult refine_plan(const RunInputs& in, const LoggingPlan& plan, const CriticVerdict& verdict,
                        const gateway::Gateway& gw, const LoopConfig& cfg, std::vector<std::string>* notes);

/// The full loop. Never throws for run-level failures; they become the
/// ledger's termination and error.
RunLedger run_loop(const RunInputs& in, const toolchain::ToolchainProfile& profile, const gateway::Gateway& gw,
                   const LoopConfig& cfg = {});

void to_json(nlohmann::json& j, const FeedbackItem& f);
void from_json(const nlohmann::json& j, FeedbackItem& f);
void to_json(nlohmann::json& j, const CriticVerdict& v);
void from_json(const nlohmann::json& j, CriticVerdict& v);
void to_json(nlohmann::json& j, const IterationRecord& r);
void from_json(const nlohmann::json& j, IterationRecord& r);
nlohmann::json config_snapshot(const LoopConfig& cfg, const toolchain::ToolchainProfile& profile, const RunInputs& in,
                               int retry_limit);

}  // namespace relog::pipeline
