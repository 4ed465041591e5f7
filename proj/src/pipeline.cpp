#include "relog/pipeline.hpp"

#include <algorithm>

#include "relog/digest.hpp"
#include "relog/instrument.hpp"

namespace relog::pipeline {

using nlohmann::json;
namespace tc = relog::toolchain;

std::string_view to_string(Action a) {
  switch (a) {
    case Action::add: return "add";
    case Action::remove: return "remove";
    case Action::modify: return "modify";
  }
  return "add";
}

namespace {

Action parse_action(std::string_view s) {
  if (s == "add") return Action::add;
  if (s == "remove") return Action::remove;
  if (s == "modify") return Action::modify;
  throw Error("unknown feedback action '" + std::string(s) + "'");
}

std::string tail(const std::string& text, std::size_t cap) {
  if (text.size() <= cap) return text;
  return "..." + text.substr(text.size() - cap);
}

std::string without_log_lines(const std::string& text, const std::string& marker) {
  std::string out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string::npos ? std::string::npos : nl - start + 1);
    if (marker.empty() || line.rfind(marker, 0) != 0) out += line;
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return out;
}

std::string rubric_text(const std::vector<Dimension>& dims) {
  std::string out;
  for (const auto& d : dims) out += "- " + d.name + ": " + d.description + "\n";
  return out;
}

}  // namespace

std::vector<Dimension> default_dimensions() {
  return {
      {"traceability", "can the executed path that led to the outcome be followed through the logs"},
      {"state_visibility", "do the logs expose the values of the variables that decide the outcome"},
      {"causal_linkage", "do the logs connect those states to the failure or to the wrong result"},
  };
}

bool SufficiencyRule::operator()(const CriticVerdict& v) const {
  std::vector<int> scores = {v.traceability, v.state_visibility, v.causal_linkage};
  for (const auto& [_, s] : v.extra_scores) scores.push_back(s);
  int full = 0;
  for (int s : scores) {
    if (s < min_each) return false;
    if (s == 2) ++full;
  }
  return full >= min_full;
}

std::string_view to_string(Mode m) { return m == Mode::direct ? "direct" : "indirect"; }

Mode parse_mode(std::string_view s) {
  if (s == "direct") return Mode::direct;
  if (s == "indirect") return Mode::indirect;
  throw Error("unknown mode '" + std::string(s) + "'");
}

void LoopConfig::check() const {
  if (max_iterations < 1) throw Error("max_iterations must be positive");
  if (fix_budget < 1) throw Error("fix_budget must be positive");
  if (dimensions.empty()) throw Error("the rubric needs at least one dimension");
}

std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::sufficient: return "sufficient";
    case Termination::budget_exhausted: return "budget_exhausted";
    case Termination::compile_failed: return "compile_failed";
    case Termination::execution_error: return "execution_error";
  }
  return "execution_error";
}

Termination parse_termination(std::string_view s) {
  for (auto t : {Termination::sufficient, Termination::budget_exhausted, Termination::compile_failed,
                 Termination::execution_error}) {
    if (to_string(t) == s) return t;
  }
  throw Error("unknown termination '" + std::string(s) + "'");
}

// ------------------------------------------------------------------ stages

tc::ExecutionOutcome probe_original(const RunInputs& in, const tc::ToolchainProfile& profile) {
  auto pristine = apply_plan(in.source, LoggingPlan{"probe", 0, {}}, profile.render);
  tc::Workspace ws(profile, pristine, in.companions);
  auto c = ws.compile();
  if (!c.ok) throw Error("pristine source does not compile:\n" + c.output);
  return ws.execute(in.tests);
}

json summarize_outcome(const tc::ExecutionOutcome& o, const tc::ToolchainProfile& profile, const LoopConfig& cfg) {
  json j = {{"status", tc::to_string(o.status)}, {"exit_code", o.exit_code ? json(*o.exit_code) : json(nullptr)}};
  if (o.exception) {
    json frames = json::array();
    for (std::size_t i = 0; i < o.exception->frames.size() && i < 3; ++i) {
      const auto& f = o.exception->frames[i];
      frames.push_back({{"function", f.function}, {"file", f.file}, {"line", f.line}});
    }
    j["exception"] = {{"type", o.exception->type_name}, {"message", o.exception->message}, {"frames", frames}};
  } else {
    j["exception"] = nullptr;
  }
  json events = json::array();
  auto first = o.log_events.size() > cfg.summary_events ? o.log_events.size() - cfg.summary_events : 0;
  for (auto i = first; i < o.log_events.size(); ++i) {
    const auto& e = o.log_events[i];
    events.push_back({{"sequence", e.sequence}, {"severity", to_string(e.severity)}, {"message", e.message}});
  }
  j["log_events"] = events;
  j["log_events_total"] = o.log_events.size();
  j["stdout"] = tail(o.stdout_text, cfg.summary_stream_chars);
  j["stderr"] = tail(without_log_lines(o.stderr_text, profile.log_marker), cfg.summary_stream_chars);
  j["stdout_truncated"] = o.stdout_truncated;
  j["stderr_truncated"] = o.stderr_truncated;
  return j;
}

json events_view(const tc::ExecutionOutcome& o, const LoggingPlan& plan, const std::string& file, std::size_t cap) {
  json out = json::array();
  auto first = o.log_events.size() > cap ? o.log_events.size() - cap : 0;
  for (auto i = first; i < o.log_events.size(); ++i) {
    const auto& e = o.log_events[i];
    json ev = {{"sequence", e.sequence}, {"severity", to_string(e.severity)}, {"message", e.message},
               {"file", file},           {"statement", nullptr},              {"anchor", nullptr}};
    if (e.source_marker && *e.source_marker < plan.statements.size()) {
      ev["statement"] = *e.source_marker;
      ev["anchor"] = plan.statements[*e.source_marker].anchor_line;
    }
    out.push_back(ev);
  }
  return out;
}

LoggingPlan accept_plan(const json& payload, const SourceUnit& source, const std::string& plan_id,
                        std::uint64_t revision, std::vector<std::string>* notes) {
  auto plan = payload.get<LoggingPlan>();
  plan.plan_id = plan_id;
  plan.revision = revision;
  const auto last = std::max<std::size_t>(source.line_count(), 1);
  for (auto& s : plan.statements) {
    if (s.anchor_line > last) {
      if (notes) notes->push_back("clamped anchor " + std::to_string(s.anchor_line) + " to " + std::to_string(last));
      s.anchor_line = last;
    }
  }
  return normalize_plan(plan);
}

StageResult generate_initial_plan(const RunInputs& in, const tc::ExecutionOutcome& outcome0, const gateway::Gateway& gw,
                                  const tc::ToolchainProfile& profile, const LoopConfig& cfg,
                                  std::vector<std::string>* notes) {
  gateway::PromptEnvelope env{"generation",
                              {{"mode", outcome0.status == tc::OutcomeStatus::pass ? "source" : "execution"},
                               {"path", in.source.path},
                               {"source", gateway::numbered_listing(in.source)},
                               {"outcome", summarize_outcome(outcome0, profile, cfg).dump()}},
                              gateway::Schema::generation};
  auto r = gw.complete(env);
  return {accept_plan(r.payload, in.source, cfg.plan_id, 0, notes), {"generation", r.digest}};
}

RepairResult repair_compilation(const RunInputs& in, const LoggingPlan& plan, const tc::ToolchainProfile& profile,
                                const gateway::Gateway& gw, int fix_budget, const LoopConfig& cfg,
                                std::vector<std::string>* notes) {
  RepairResult r;
  r.plan = plan;
  for (;;) {
    auto inst = apply_plan(in.source, r.plan, profile.render);
    if (!verify_logic_preserved(in.source, inst).ok) r.logic_preserved = false;
    auto ws = std::make_unique<tc::Workspace>(profile, inst, in.companions);
    auto c = ws->compile();
    if (c.ok || r.attempts >= fix_budget) {
      r.compile = std::move(c);
      if (r.compile.ok) r.workspace = std::move(ws);
      return r;
    }
    ws.reset();
    json diagnostics = c.diagnostics;
    r.failed.push_back({r.plan, std::move(c)});
    gateway::PromptEnvelope env{"repair",
                                {{"path", in.source.path},
                                 {"source", gateway::numbered_listing(in.source)},
                                 {"plan", json(r.plan).dump()},
                                 {"diagnostics", diagnostics.dump()}},
                                gateway::Schema::repair};
    auto resp = gw.complete(env);
    r.calls.push_back({"repair", resp.digest});
    ++r.attempts;
    r.plan = accept_plan(resp.payload, in.source, cfg.plan_id, r.plan.revision + 1, notes);
  }
}

CriticVerdict verdict_from_json(const json& payload, const SufficiencyRule& rule) {
  auto v = payload.get<CriticVerdict>();
  v.sufficient = rule(v);
  if (!v.sufficient && v.feedback.empty()) {
    v.feedback.push_back({Action::add, std::nullopt, "unspecified", "critic judged the logs insufficient without feedback"});
  }
  return v;
}

std::pair<CriticVerdict, GatewayCall> evaluate_sufficiency(const RunInputs& in, const LoggingPlan& plan,
                                                           const tc::ExecutionOutcome& outcome,
                                                           const gateway::Gateway& gw,
                                                           const tc::ToolchainProfile& profile, const LoopConfig& cfg) {
  gateway::PromptEnvelope env{
      "critic",
      {{"rubric", rubric_text(cfg.dimensions)},
       {"goal", cfg.goal},
       {"path", in.source.path},
       {"source", cfg.critic_sees_source ? gateway::numbered_listing(in.source) : std::string("(withheld)")},
       {"plan", json(plan).dump()},
       {"outcome", summarize_outcome(outcome, profile, cfg).dump()},
       {"logs", events_view(outcome, plan, in.source.path, cfg.summary_events).dump()}},
      gateway::Schema::critic};
  auto r = gw.complete(env);
  auto v = verdict_from_json(r.payload, cfg.rule);
  // only configured extra dimensions count
  std::map<std::string, int> extras;
  for (const auto& d : cfg.dimensions) {
    if (auto it = v.extra_scores.find(d.name); it != v.extra_scores.end()) extras.insert(*it);
  }
  v.extra_scores = std::move(extras);
  v.sufficient = cfg.rule(v);
  if (!v.sufficient && v.feedback.empty()) {
    v.feedback.push_back({Action::add, std::nullopt, "unspecified", "critic judged the logs insufficient without feedback"});
  }
  return {v, {"critic", r.digest}};
}

LoggingPlan apply_edits(const LoggingPlan& plan, const json& edits, std::vector<std::string>* errors) {
  LoggingPlan out = plan;
  auto fail = [&](const std::string& why) {
    if (errors) errors->push_back(why);
  };
  for (const auto& e : edits) {
    const auto action = e.at("action").get<std::string>();
    if (action == "add") {
      auto s = e.at("statement").get<LoggingStatement>();
      try {
        validate(s);
        out.statements.push_back(std::move(s));
      } catch (const Error& ex) {
        fail(std::string("add skipped: ") + ex.what());
      }
      continue;
    }
    const auto anchor = e.at("anchor_line").get<std::size_t>();
    auto matches = [&](const LoggingStatement& s) { return s.anchor_line == anchor; };
    if (std::none_of(out.statements.begin(), out.statements.end(), matches)) {
      fail(action + " skipped: no statement anchored at line " + std::to_string(anchor));
      continue;
    }
    if (action == "remove") {
      std::erase_if(out.statements, matches);
      continue;
    }
    const auto& c = e.at("changes");
    for (auto& s : out.statements) {
      if (!matches(s)) continue;
      auto updated = s;
      if (c.contains("severity")) updated.severity = parse_severity(c["severity"].get<std::string>());
      if (c.contains("position")) updated.position = parse_position(c["position"].get<std::string>());
      if (c.contains("template")) updated.template_text = c["template"].get<std::string>();
      if (c.contains("variables")) updated.variables = c["variables"].get<std::vector<std::string>>();
      if (c.contains("anchor_line")) updated.anchor_line = c["anchor_line"].get<std::size_t>();
      try {
        validate(updated);
        s = std::move(updated);
      } catch (const Error& ex) {
        fail(std::string("modify skipped: ") + ex.what());
      }
    }
  }
  out.revision = plan.revision + 1;
  return normalize_plan(out);
}

StageResult refine_plan(const RunInputs& in, const LoggingPlan& plan, const CriticVerdict& verdict,
                        const gateway::Gateway& gw, const LoopConfig& cfg, std::vector<std::string>* notes) {
  gateway::PromptEnvelope env{"refinement",
                              {{"path", in.source.path},
                               {"source", gateway::numbered_listing(in.source)},
                               {"plan", json(plan).dump()},
                               {"feedback", json(verdict.feedback).dump()}},
                              gateway::Schema::refinement};
  auto r = gw.complete(env);
  auto edited = apply_edits(plan, r.payload.at("edits"), notes);
  return {accept_plan(json(edited), in.source, cfg.plan_id, edited.revision, notes), {"refinement", r.digest}};
}

// -------------------------------------------------------------------- loop

RunLedger run_loop(const RunInputs& in, const tc::ToolchainProfile& profile, const gateway::Gateway& gw,
                   const LoopConfig& cfg) {
  cfg.check();
  RunLedger ledger;
  ledger.source_path = in.source.path;
  ledger.source_digest = in.source.digest;
  ledger.config = config_snapshot(cfg, profile, in, gw.retry_limit());

  IterationRecord rec;
  auto finish = [&](Termination t, std::optional<RunError> err = std::nullopt) {
    ledger.iterations.push_back(std::move(rec));
    ledger.termination = t;
    ledger.error = std::move(err);
    ledger.final_plan = ledger.iterations.back().plan;
    return ledger;
  };
  auto classify = [](const std::exception& e) -> RunError {
    if (dynamic_cast<const tc::ToolchainUnavailable*>(&e)) return {"toolchain_unavailable", e.what()};
    if (dynamic_cast<const gateway::ReplayMiss*>(&e)) return {"replay_miss", e.what()};
    if (dynamic_cast<const gateway::MalformedAfterRetries*>(&e)) return {"malformed_response", e.what()};
    if (dynamic_cast<const gateway::ProviderUnavailable*>(&e)) return {"provider_unavailable", e.what()};
    if (dynamic_cast<const gateway::StoreWriteFailure*>(&e)) return {"store_write_failure", e.what()};
    return {"internal", e.what()};
  };

  LoggingPlan plan{cfg.plan_id, 0, {}};
  rec.plan = plan;
  try {
    rec.probe = in.probe ? *in.probe : probe_original(in, profile);
  } catch (const tc::ToolchainUnavailable& e) {
    return finish(Termination::execution_error, classify(e));
  } catch (const Error& e) {
    return finish(Termination::execution_error, RunError{"pristine_compile", e.what()});
  }

  try {
    auto gen = generate_initial_plan(in, *rec.probe, gw, profile, cfg, &rec.notes);
    rec.gateway_calls.push_back(gen.call);
    plan = gen.plan;
    rec.plan = plan;
  } catch (const Error& e) {
    return finish(Termination::execution_error, classify(e));
  }

  for (int i = 0;; ++i) {
    if (i > 0) {
      rec = IterationRecord{};
      rec.iteration = static_cast<std::size_t>(i);
      rec.plan = plan;
    }

    RepairResult rr;
    try {
      rr = repair_compilation(in, plan, profile, gw, cfg.ablate_fixer ? 0 : cfg.fix_budget, cfg, &rec.notes);
    } catch (const Error& e) {
      return finish(Termination::execution_error, classify(e));
    }
    rec.repairs = std::move(rr.failed);
    rec.plan = rr.plan;
    rec.compile = rr.compile;
    rec.logic_preserved = rr.logic_preserved;
    for (auto& c : rr.calls) rec.gateway_calls.push_back(std::move(c));
    plan = rr.plan;
    if (!rr.compile.ok) return finish(Termination::compile_failed);

    try {
      rec.outcome = rr.workspace->execute(in.tests);
      rr.workspace.reset();
      auto [verdict, call] = evaluate_sufficiency(in, plan, *rec.outcome, gw, profile, cfg);
      rec.gateway_calls.push_back(call);
      rec.verdict = verdict;
    } catch (const Error& e) {
      return finish(Termination::execution_error, classify(e));
    }

    if (rec.verdict->sufficient) return finish(Termination::sufficient);
    if (cfg.ablate_refine || i + 1 >= cfg.max_iterations) return finish(Termination::budget_exhausted);

    try {
      auto refined = refine_plan(in, plan, *rec.verdict, gw, cfg, &rec.notes);
      rec.gateway_calls.push_back(refined.call);
      plan = refined.plan;
    } catch (const Error& e) {
      return finish(Termination::execution_error, classify(e));
    }
    ledger.iterations.push_back(std::move(rec));
  }
}

const tc::ExecutionOutcome* RunLedger::final_outcome() const {
  if (iterations.empty() || !iterations.back().outcome) return nullptr;
  return &*iterations.back().outcome;
}

// -------------------------------------------------------------------- json

void to_json(json& j, const FeedbackItem& f) {
  j = {{"action", to_string(f.action)},
       {"target_anchor", f.target_anchor ? json(*f.target_anchor) : json(nullptr)},
       {"subject", f.subject},
       {"detail", f.detail}};
}

void from_json(const json& j, FeedbackItem& f) {
  f.action = parse_action(j.at("action").get<std::string>());
  f.target_anchor.reset();
  if (j.contains("target_anchor") && !j["target_anchor"].is_null()) f.target_anchor = j["target_anchor"].get<std::size_t>();
  f.subject = j.at("subject").get<std::string>();
  f.detail = j.at("detail").get<std::string>();
}

void to_json(json& j, const CriticVerdict& v) {
  j = {{"traceability", v.traceability}, {"state_visibility", v.state_visibility}, {"causal_linkage", v.causal_linkage},
       {"sufficient", v.sufficient},     {"feedback", v.feedback},                 {"rationale", v.rationale}};
  if (!v.extra_scores.empty()) j["extra_scores"] = v.extra_scores;
}

void from_json(const json& j, CriticVerdict& v) {
  v.traceability = j.at("traceability").get<int>();
  v.state_visibility = j.at("state_visibility").get<int>();
  v.causal_linkage = j.at("causal_linkage").get<int>();
  v.sufficient = j.at("sufficient").get<bool>();
  v.feedback = j.at("feedback").get<std::vector<FeedbackItem>>();
  v.rationale = j.value("rationale", "");
  v.extra_scores = j.value("extra_scores", std::map<std::string, int>{});
}

void to_json(json& j, const IterationRecord& r) {
  json repairs = json::array();
  for (const auto& s : r.repairs) repairs.push_back({{"plan", s.plan}, {"compile", s.compile}});
  json calls = json::array();
  for (const auto& c : r.gateway_calls) calls.push_back({{"stage", c.stage}, {"digest", c.digest}});
  j = {{"iteration", r.iteration},
       {"probe", r.probe ? json(*r.probe) : json(nullptr)},
       {"plan", r.plan},
       {"fix_attempts", r.fix_attempts()},
       {"repairs", repairs},
       {"compile", r.compile},
       {"logic_preserved", r.logic_preserved},
       {"outcome", r.outcome ? json(*r.outcome) : json(nullptr)},
       {"verdict", r.verdict ? json(*r.verdict) : json(nullptr)},
       {"gateway_calls", calls},
       {"notes", r.notes}};
}

void from_json(const json& j, IterationRecord& r) {
  r = IterationRecord{};
  r.iteration = j.at("iteration").get<std::size_t>();
  if (!j.at("probe").is_null()) r.probe = j["probe"].get<tc::ExecutionOutcome>();
  r.plan = j.at("plan").get<LoggingPlan>();
  for (const auto& s : j.at("repairs")) r.repairs.push_back({s.at("plan").get<LoggingPlan>(), s.at("compile").get<tc::CompileResult>()});
  r.compile = j.at("compile").get<tc::CompileResult>();
  r.logic_preserved = j.at("logic_preserved").get<bool>();
  if (!j.at("outcome").is_null()) r.outcome = j["outcome"].get<tc::ExecutionOutcome>();
  if (!j.at("verdict").is_null()) r.verdict = j["verdict"].get<CriticVerdict>();
  for (const auto& c : j.at("gateway_calls")) r.gateway_calls.push_back({c.at("stage"), c.at("digest")});
  r.notes = j.at("notes").get<std::vector<std::string>>();
}

json config_snapshot(const LoopConfig& cfg, const tc::ToolchainProfile& profile, const RunInputs& in, int retry_limit) {
  json dims = json::array();
  for (const auto& d : cfg.dimensions) dims.push_back({{"name", d.name}, {"description", d.description}});
  json companions = json::array();
  for (const auto& c : in.companions) companions.push_back({{"path", c.path}, {"digest", c.digest}});
  return {{"max_iterations", cfg.max_iterations},
          {"fix_budget", cfg.fix_budget},
          {"retry_limit", retry_limit},
          {"ablate_fixer", cfg.ablate_fixer},
          {"ablate_refine", cfg.ablate_refine},
          {"plan_id", cfg.plan_id},
          {"goal", cfg.goal},
          {"dimensions", dims},
          {"sufficiency", {{"min_each", cfg.rule.min_each}, {"min_full", cfg.rule.min_full}}},
          {"critic_sees_source", cfg.critic_sees_source},
          {"summary_events", cfg.summary_events},
          {"summary_stream_chars", cfg.summary_stream_chars},
          {"toolchain", profile.name},
          {"mode", to_string(in.mode)},
          {"tests", in.tests},
          {"companions", companions}};
}

std::string RunLedger::to_jsonl() const {
  std::string out;
  json header = {{"record", "header"}, {"source", {{"path", source_path}, {"digest", source_digest}}}, {"config", config}};
  out += header.dump() + "\n";
  for (const auto& r : iterations) {
    json line = r;
    line["record"] = "iteration";
    out += line.dump() + "\n";
  }
  json footer = {{"record", "footer"},
                 {"termination", to_string(termination)},
                 {"iterations", iterations.size()},
                 {"final_plan", final_plan},
                 {"error", error ? json{{"kind", error->kind}, {"message", error->message}} : json(nullptr)}};
  out += footer.dump() + "\n";
  return out;
}

RunLedger RunLedger::from_jsonl(std::string_view text) {
  RunLedger l;
  bool saw_header = false, saw_footer = false;
  std::size_t start = 0;
  std::size_t line_no = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == std::string_view::npos ? std::string_view::npos : nl - start);
    start = nl == std::string_view::npos ? text.size() : nl + 1;
    ++line_no;
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("record")) throw Error("ledger line " + std::to_string(line_no) + " is not a record");
    try {
      auto kind = j["record"].get<std::string>();
      if (kind == "header") {
        l.source_path = j.at("source").at("path");
        l.source_digest = j.at("source").at("digest");
        l.config = j.at("config");
        saw_header = true;
      } else if (kind == "iteration") {
        l.iterations.push_back(j.get<IterationRecord>());
      } else if (kind == "footer") {
        l.termination = parse_termination(j.at("termination").get<std::string>());
        l.final_plan = j.at("final_plan").get<LoggingPlan>();
        if (!j.at("error").is_null()) l.error = RunError{j["error"].at("kind"), j["error"].at("message")};
        saw_footer = true;
      } else {
        throw Error("unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw Error("ledger line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (!saw_header || !saw_footer) throw Error("ledger lacks a header or footer line");
  return l;
}

std::string RunLedger::digest() const { return sha256_hex(to_jsonl()); }

}  // namespace relog::pipeline
