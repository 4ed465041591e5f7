#pragma once

#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "relog/core.hpp"
#include "relog/gateway.hpp"
#include "relog/pipeline.hpp"
#include "relog/toolchain.hpp"

namespace relog::eval {

class ManifestInvalid : public Error {
public:
  using Error::Error;
};

class InstanceUnreproducible : public Error {
public:
  using Error::Error;
};

class PatchApplyFailure : public Error {
public:
  using Error::Error;
};

struct FaultLine {
  std::string file;
  std::size_t line = 0;
};

struct GroundTruth {
  bool defective = true;
  std::vector<FaultLine> fault_lines;
  SourceUnit fixed_unit;
};

struct BenchmarkInstance {
  std::string instance_id;
  pipeline::Mode mode = pipeline::Mode::direct;
  SourceUnit defective_unit;
  /// Indirect mode: the first caller is instrumented, the rest travel along.
  std::vector<SourceUnit> caller_units;
  /// Test driver and other units the program needs.
  std::vector<SourceUnit> support_units;
  std::shared_ptr<const toolchain::ToolchainProfile> toolchain;
  std::vector<std::string> failing_tests;
  std::vector<std::string> regression_tests;
  GroundTruth ground_truth;
  /// Knobs for the rule stub (critic key, agent expectation, offered patch).
  gateway::StubConfig stub;
  /// Failing-test outcome of the pristine program, set by validation.
  std::optional<toolchain::ExecutionOutcome> pristine_outcome;

  /// Direct: the defective unit is instrumented. Indirect: the caller is.
  pipeline::RunInputs inputs() const;
  /// Units the instrumented one is built with, for `unit` replacing the
  /// defective unit.
  std::vector<SourceUnit> companions_for(const SourceUnit& defective) const;
};

struct Benchmark {
  std::string name;
  std::vector<BenchmarkInstance> instances;
  /// One line per instance dropped as unreproducible.
  std::vector<std::string> excluded;
};

struct LoadOptions {
  bool validate = true;
  /// Validation results are cached here across processes when set.
  std::optional<std::filesystem::path> cache_dir;
};

/// Throws ManifestInvalid. Unreproducible instances are excluded and listed
/// in `excluded`.
Benchmark load_benchmark(const std::filesystem::path& manifest, const LoadOptions& opts = {});

/// Pristine build compiles, failing tests fail, fixed unit makes failing and
/// regression tests pass. Returns the pristine failing-test outcome. Throws
/// InstanceUnreproducible.
toolchain::ExecutionOutcome validate_instance(const BenchmarkInstance& inst,
                                              const std::optional<std::filesystem::path>& cache_dir = std::nullopt);

// ---- edit scripts: {file, hunks:[{line, delete, insert[]}]}, lines 1-based
// against the original text.

nlohmann::json make_patch(const SourceUnit& from, const SourceUnit& to);
/// Throws PatchApplyFailure.
SourceUnit apply_patch(const SourceUnit& unit, const nlohmann::json& patch);

struct RepairCheck {
  bool ok = false;
  std::string reason;
};

RepairCheck validate_repair(const BenchmarkInstance& inst, const nlohmann::json& patch);

// ---- debugging agent

struct ReportedLocation {
  std::string file;
  std::size_t line = 0;  // 0 when only a method was named
  std::string method;
};

struct DebugVerdict {
  bool defect_reported = false;
  std::optional<ReportedLocation> location;
  std::string explanation;
  std::optional<nlohmann::json> patch;
  /// Set when the gateway failed; the verdict then counts as not detected.
  std::optional<std::string> error;
  std::string digest;
};

DebugVerdict verdict_from_json(const nlohmann::json& payload);

struct DebugOptions {
  std::size_t log_cap = 200;
  pipeline::LoopConfig summary;
};

/// Direct prompts carry the defective source and the logs; indirect prompts
/// carry the caller units and the logs only.
DebugVerdict run_debug_agent(const BenchmarkInstance& inst, const toolchain::ExecutionOutcome& outcome,
                             const LoggingPlan& plan, const gateway::Gateway& gw, const DebugOptions& opts = {});

/// Reported location lies inside the method enclosing a fault line.
bool tp_match(const DebugVerdict& v, const BenchmarkInstance& inst);

// ---- metrics

struct Counts {
  std::size_t total = 0;
  std::size_t detected = 0;
  std::size_t true_positives = 0;
};

struct Scores {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
};

Scores score(const Counts& c);

struct InstanceResult {
  std::string instance_id;
  pipeline::Mode mode = pipeline::Mode::direct;
  bool compile_failed = false;
  std::optional<pipeline::Termination> termination;
  DebugVerdict verdict;
  bool true_positive = false;
  std::optional<bool> repaired;
  std::string repair_reason;
  std::size_t statements = 0;
  /// Methods (direct) or callers (indirect) the statements are spread over.
  std::size_t units = 1;
  std::size_t events = 0;
  std::size_t iterations = 0;
  std::optional<std::string> error;
  /// relog generator only.
  std::optional<pipeline::RunLedger> ledger;
};

struct MetricsReport {
  pipeline::Mode mode = pipeline::Mode::direct;
  std::size_t total = 0;
  std::size_t compilation_failures = 0;
  std::size_t detected_defects = 0;
  std::size_t true_positives = 0;
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  std::optional<std::size_t> successful_repairs;  // direct only
  double avg_logs = 0;
  double avg_events = 0;
};

/// Aggregates results of one mode.
MetricsReport compute_metrics(const std::vector<InstanceResult>& results, pipeline::Mode mode);

enum class Generator { relog, none, plan_file };
std::string_view to_string(Generator g);
Generator parse_generator(std::string_view s);

using ProviderFactory = std::function<std::shared_ptr<gateway::Provider>(const BenchmarkInstance&)>;

struct EvalOptions {
  Generator generator = Generator::relog;
  pipeline::LoopConfig loop;
  /// plan_file generator: `<plan_dir>/<instance_id>.json`.
  std::optional<std::filesystem::path> plan_dir;
  ProviderFactory provider;
  std::shared_ptr<gateway::ReplayStore> record;
  int retry_limit = 2;
  unsigned threads = 1;
  DebugOptions debug;
};

/// Rule stub configured from each instance.
ProviderFactory stub_factory();

InstanceResult evaluate_instance(const BenchmarkInstance& inst, const EvalOptions& opts);

struct EvalReport {
  std::string benchmark;
  std::string label;
  std::vector<InstanceResult> results;
  std::vector<MetricsReport> metrics;  // one per mode present, direct first
  std::vector<std::string> excluded;

  const MetricsReport* for_mode(pipeline::Mode m) const;
  nlohmann::json to_json() const;
  /// Fixed column order: compilation failures, detected, true positives,
  /// precision, recall, F1, repairs (direct), average logs. One block per mode.
  std::string render_table() const;
};

/// Several reports as rows of one table per mode.
std::string render_table(const std::vector<const EvalReport*>& reports);

EvalReport evaluate(const Benchmark& bench, const EvalOptions& opts, std::string label = {});

/// Report header naming the true-positive rule.
extern const char* const kTpRule;

}  // namespace relog::eval
