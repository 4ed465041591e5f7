#include "relog/report.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

namespace relog::report {

namespace {

namespace tc = relog::toolchain;
using pipeline::IterationRecord;
using pipeline::RunLedger;

using Key = std::pair<std::size_t, int>;

Key key_of(const LoggingStatement& s) { return {s.anchor_line, s.position == Position::before ? 0 : 1}; }

std::string quoted(const std::string& s) { return nlohmann::json(s).dump(); }

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

void diff_block(std::ostream& os, const LoggingPlan& before, const LoggingPlan& after, const std::string& indent) {
  auto d = diff_plans(before, after);
  if (d.empty()) {
    os << indent << "(no statement changes)\n";
    return;
  }
  for (const auto& e : d) {
    switch (e.kind) {
      case DiffKind::added: os << indent << "+ " << describe(*e.after) << "\n"; break;
      case DiffKind::removed: os << indent << "- " << describe(*e.before) << "\n"; break;
      case DiffKind::modified:
        os << indent << "~ " << describe(*e.before) << "\n";
        os << indent << "  -> " << describe(*e.after) << "\n";
        break;
    }
  }
}

void diagnostics_block(std::ostream& os, const tc::CompileResult& c) {
  std::size_t shown = 0;
  for (const auto& d : c.diagnostics) {
    if (!d.is_error()) continue;
    os << "    " << d.file << ":" << d.line << ": " << d.severity << ": " << d.message;
    if (d.statement_index) os << " (statement #" << *d.statement_index << ")";
    os << "\n";
    ++shown;
  }
  if (shown == 0) {
    auto raw = lines_of(c.output);
    for (std::size_t i = 0; i < raw.size() && i < 5; ++i) os << "    " << raw[i] << "\n";
    if (raw.empty()) os << "    (no compiler output)\n";
  }
}

void outcome_block(std::ostream& os, const char* label, const tc::ExecutionOutcome& o, const LoggingPlan* plan,
                   const TraceOptions& opts) {
  os << "  " << label << ": " << tc::to_string(o.status);
  if (o.exit_code) os << " (exit " << *o.exit_code << ")";
  os << "\n";
  if (o.exception) {
    os << "    " << o.exception->type_name;
    if (!o.exception->message.empty()) os << ": " << o.exception->message;
    os << "\n";
    for (std::size_t i = 0; i < o.exception->frames.size() && i < opts.max_frames; ++i) {
      const auto& f = o.exception->frames[i];
      os << "      at " << (f.function.empty() ? "?" : f.function) << " (" << f.file << ":" << f.line << ")\n";
    }
  }
  std::size_t shown = 0;
  for (const auto& l : lines_of(o.stdout_text)) {
    if (l.find("FAIL") == std::string::npos) continue;
    if (shown++ == opts.max_stream_lines) break;
    os << "    " << l << "\n";
  }
  if (o.log_events.empty()) {
    if (plan) os << "    no log events\n";
    return;
  }
  os << "    log events: " << o.log_events.size() << "\n";
  for (std::size_t i = 0; i < o.log_events.size() && i < opts.max_events; ++i) {
    const auto& e = o.log_events[i];
    os << "      [" << to_string(e.severity) << "] " << e.message;
    if (e.source_marker && plan && *e.source_marker < plan->statements.size()) {
      os << "  <- #" << *e.source_marker << " L" << plan->statements[*e.source_marker].anchor_line;
    }
    os << "\n";
  }
  if (o.log_events.size() > opts.max_events) {
    os << "      ... " << o.log_events.size() - opts.max_events << " more\n";
  }
}

void verdict_block(std::ostream& os, const pipeline::CriticVerdict& v) {
  os << "  critic: traceability " << v.traceability << ", state_visibility " << v.state_visibility
     << ", causal_linkage " << v.causal_linkage;
  for (const auto& [name, s] : v.extra_scores) os << ", " << name << " " << s;
  os << " -> " << (v.sufficient ? "sufficient" : "insufficient") << "\n";
  for (const auto& f : v.feedback) {
    os << "    " << pipeline::to_string(f.action);
    if (f.target_anchor) os << " L" << *f.target_anchor;
    if (!f.subject.empty()) os << " " << f.subject;
    if (!f.detail.empty()) os << ": " << f.detail;
    os << "\n";
  }
  if (!v.rationale.empty()) os << "    rationale: " << v.rationale << "\n";
}

// Returns false when the section ends at failing diagnostics.
bool iteration_block(std::ostream& os, const IterationRecord& r, const LoggingPlan& previous,
                     const TraceOptions& opts) {
  os << "\n== iteration " << r.iteration << " ==\n";
  if (r.probe) outcome_block(os, "original program", *r.probe, nullptr, opts);

  const LoggingPlan& first = r.repairs.empty() ? r.plan : r.repairs.front().plan;
  os << "  plan " << first.plan_id << " r" << first.revision << " (" << first.statements.size() << " statements)";
  if (r.iteration == 0) {
    os << "\n";
  } else {
    os << " vs r" << previous.revision << ":\n";
  }
  diff_block(os, previous, first, "    ");

  for (std::size_t i = 0; i < r.repairs.size(); ++i) {
    const auto& step = r.repairs[i];
    os << "  compile r" << step.plan.revision << ": failed\n";
    diagnostics_block(os, step.compile);
    const LoggingPlan& next = i + 1 < r.repairs.size() ? r.repairs[i + 1].plan : r.plan;
    os << "  fixer -> r" << next.revision << ":\n";
    diff_block(os, step.plan, next, "    ");
  }

  os << "  compile r" << r.plan.revision << ": " << (r.compile.ok ? "ok" : "failed") << "\n";
  if (!r.compile.ok) {
    diagnostics_block(os, r.compile);
    return false;
  }
  if (!r.logic_preserved) os << "  logic preservation check failed\n";
  for (const auto& n : r.notes) os << "  note: " << n << "\n";
  if (r.outcome) outcome_block(os, "outcome", *r.outcome, &r.plan, opts);
  if (r.verdict) verdict_block(os, *r.verdict);
  if (!r.gateway_calls.empty()) {
    os << "  calls:";
    for (const auto& c : r.gateway_calls) os << " " << c.stage << "@" << c.digest.substr(0, 12);
    os << "\n";
  }
  return true;
}

}  // namespace

std::string describe(const LoggingStatement& s) {
  std::ostringstream os;
  os << "L" << s.anchor_line << " " << to_string(s.position) << " " << to_string(s.severity) << " "
     << quoted(s.template_text);
  if (!s.variables.empty()) {
    os << " [";
    for (std::size_t i = 0; i < s.variables.size(); ++i) os << (i ? ", " : "") << s.variables[i];
    os << "]";
  }
  return os.str();
}

std::vector<DiffEntry> diff_plans(const LoggingPlan& before, const LoggingPlan& after) {
  std::map<Key, std::pair<std::vector<LoggingStatement>, std::vector<LoggingStatement>>> groups;
  for (const auto& s : before.statements) groups[key_of(s)].first.push_back(s);
  for (const auto& s : after.statements) groups[key_of(s)].second.push_back(s);

  std::vector<DiffEntry> out;
  for (auto& [key, g] : groups) {
    auto& [old_s, new_s] = g;
    // drop statements present on both sides
    for (auto it = old_s.begin(); it != old_s.end();) {
      auto hit = std::find(new_s.begin(), new_s.end(), *it);
      if (hit != new_s.end()) {
        new_s.erase(hit);
        it = old_s.erase(it);
      } else {
        ++it;
      }
    }
    std::size_t paired = std::min(old_s.size(), new_s.size());
    for (std::size_t i = 0; i < paired; ++i) out.push_back({DiffKind::modified, old_s[i], new_s[i]});
    for (std::size_t i = paired; i < old_s.size(); ++i) out.push_back({DiffKind::removed, old_s[i], std::nullopt});
    for (std::size_t i = paired; i < new_s.size(); ++i) out.push_back({DiffKind::added, std::nullopt, new_s[i]});
  }
  return out;
}

std::string render_trace(const RunLedger& ledger, const TraceOptions& opts) {
  std::ostringstream os;
  os << "run: " << ledger.source_path << " (sha256 " << ledger.source_digest.substr(0, 12) << ")\n";
  if (ledger.config.is_object()) {
    if (ledger.config.contains("mode")) os << "mode: " << ledger.config["mode"].get<std::string>() << "\n";
    const auto& c = ledger.config;
    os << "budgets: " << c.value("max_iterations", 0) << " iterations, fix budget " << c.value("fix_budget", 0);
    if (c.value("ablate_fixer", false)) os << ", fixer ablated";
    if (c.value("ablate_refine", false)) os << ", refinement ablated";
    os << "\n";
  }
  os << "termination: " << pipeline::to_string(ledger.termination) << " after " << ledger.iterations.size()
     << (ledger.iterations.size() == 1 ? " iteration" : " iterations") << "\n";
  if (ledger.error) os << "error: " << ledger.error->kind << ": " << ledger.error->message << "\n";
  os << "final plan: " << ledger.final_plan.plan_id << " r" << ledger.final_plan.revision << " ("
     << ledger.final_plan.statements.size() << " statements)\n";

  LoggingPlan previous;
  previous.plan_id = ledger.final_plan.plan_id;
  for (const auto& r : ledger.iterations) {
    if (!iteration_block(os, r, previous, opts)) break;
    previous = r.plan;
  }
  return os.str();
}

RunLedger read_ledger(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw Error("cannot read ledger " + file.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return RunLedger::from_jsonl(buf.str());
}

}  // namespace relog::report
