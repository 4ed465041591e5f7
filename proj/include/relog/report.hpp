#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "relog/core.hpp"
#include "relog/pipeline.hpp"

namespace relog::report {

enum class DiffKind { added, removed, modified };

struct DiffEntry {
  DiffKind kind = DiffKind::added;
  std::optional<LoggingStatement> before;
  std::optional<LoggingStatement> after;
};

/// Statement-level diff. Statements sharing (anchor_line, position) pair up
/// as modifications; the rest are additions or removals. Sorted by anchor.
std::vector<DiffEntry> diff_plans(const LoggingPlan& before, const LoggingPlan& after);

/// `L12 after  warn  "text {}" [x]`
std::string describe(const LoggingStatement& s);

struct TraceOptions {
  std::size_t max_events = 20;
  std::size_t max_frames = 5;
  std::size_t max_stream_lines = 5;
};

/// Per-iteration narrative: plan diff, compile and fixer events, outcome,
/// critic scores and feedback. A pure function of the ledger.
std::string render_trace(const pipeline::RunLedger& ledger, const TraceOptions& opts = {});

/// Reads a JSONL ledger file. Throws Error when it cannot be read or parsed.
pipeline::RunLedger read_ledger(const std::filesystem::path& file);

}  // namespace relog::report
