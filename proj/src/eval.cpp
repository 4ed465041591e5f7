#include "relog/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "relog/digest.hpp"
#include "relog/instrument.hpp"
#include "relog/syntax.hpp"

namespace relog::eval {

namespace fs = std::filesystem;
namespace tc = relog::toolchain;
using nlohmann::json;
using pipeline::Mode;

const char* const kTpRule =
    "a reported location is a true positive when it lies inside the method enclosing a fault line";

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ManifestInvalid("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string base_name(const std::string& p) { return fs::path(p).filename().string(); }

SourceUnit load_unit(const fs::path& base, const json& rel) {
  if (!rel.is_string()) throw ManifestInvalid("unit paths must be strings");
  auto p = base / rel.get<std::string>();
  return SourceUnit::from_text(p.filename().string(), read_file(p));
}

std::vector<std::string> string_list(const json& j, const char* key, const std::string& where) {
  std::vector<std::string> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_array()) throw ManifestInvalid(where + ": " + key + " must be an array");
  for (const auto& v : j[key]) {
    if (!v.is_string()) throw ManifestInvalid(where + ": " + key + " entries must be strings");
    out.push_back(v.get<std::string>());
  }
  return out;
}

tc::CompileResult build(const BenchmarkInstance& inst, const SourceUnit& defective,
                        std::unique_ptr<tc::Workspace>& ws) {
  auto unit = apply_plan(defective, LoggingPlan{"pristine", 0, {}}, inst.toolchain->render);
  auto companions = inst.companions_for(defective);
  ws = std::make_unique<tc::Workspace>(*inst.toolchain, unit, companions);
  return ws->compile();
}

std::string validation_key(const BenchmarkInstance& inst) {
  json units = json::array();
  units.push_back({inst.defective_unit.path, inst.defective_unit.text()});
  units.push_back({inst.ground_truth.fixed_unit.path, inst.ground_truth.fixed_unit.text()});
  for (const auto& u : inst.caller_units) units.push_back({u.path, u.text()});
  for (const auto& u : inst.support_units) units.push_back({u.path, u.text()});
  json key = {{"toolchain", inst.toolchain->to_json()},
              {"units", units},
              {"failing", inst.failing_tests},
              {"regression", inst.regression_tests}};
  return sha256_hex(key.dump());
}

}  // namespace

// ------------------------------------------------------------------ instances

pipeline::RunInputs BenchmarkInstance::inputs() const {
  pipeline::RunInputs in;
  in.mode = mode;
  in.tests = failing_tests;
  in.probe = pristine_outcome;
  if (mode == Mode::direct) {
    in.source = defective_unit;
    in.companions = companions_for(defective_unit);
  } else {
    in.source = caller_units.front();
    in.companions.push_back(defective_unit);
    in.companions.insert(in.companions.end(), caller_units.begin() + 1, caller_units.end());
    in.companions.insert(in.companions.end(), support_units.begin(), support_units.end());
  }
  return in;
}

std::vector<SourceUnit> BenchmarkInstance::companions_for(const SourceUnit&) const {
  std::vector<SourceUnit> out = caller_units;
  out.insert(out.end(), support_units.begin(), support_units.end());
  return out;
}

tc::ExecutionOutcome validate_instance(const BenchmarkInstance& inst, const std::optional<fs::path>& cache_dir) {
  fs::path cached;
  if (cache_dir) {
    cached = *cache_dir / (validation_key(inst) + ".json");
    std::error_code ec;
    if (fs::exists(cached, ec)) {
      try {
        return json::parse(read_file(cached)).get<tc::ExecutionOutcome>();
      } catch (const std::exception&) {
        // unreadable cache entry: validate again
      }
    }
  }
  const auto& id = inst.instance_id;
  std::unique_ptr<tc::Workspace> ws;
  auto c = build(inst, inst.defective_unit, ws);
  if (!c.ok) throw InstanceUnreproducible(id + ": pristine build fails:\n" + c.output);
  auto before = ws->execute(inst.failing_tests);
  if (before.status == tc::OutcomeStatus::pass) {
    throw InstanceUnreproducible(id + ": failing tests pass on the defective unit");
  }

  c = build(inst, inst.ground_truth.fixed_unit, ws);
  if (!c.ok) throw InstanceUnreproducible(id + ": fixed build fails:\n" + c.output);
  auto tests = inst.failing_tests;
  tests.insert(tests.end(), inst.regression_tests.begin(), inst.regression_tests.end());
  auto after = ws->execute(tests);
  if (after.status != tc::OutcomeStatus::pass) {
    throw InstanceUnreproducible(id + ": tests still fail with the fixed unit (" +
                                 std::string(tc::to_string(after.status)) + ")");
  }

  if (cache_dir) {
    std::error_code ec;
    fs::create_directories(*cache_dir, ec);
    auto tmp = cached;
    tmp += ".tmp" + std::to_string(std::hash<std::thread::id>{}(std::this_thread::get_id()));
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      out << json(before).dump();
    }
    fs::rename(tmp, cached, ec);
    if (ec) fs::remove(tmp, ec);
  }
  return before;
}

Benchmark load_benchmark(const fs::path& manifest, const LoadOptions& opts) {
  json m;
  try {
    m = json::parse(read_file(manifest));
  } catch (const json::exception& e) {
    throw ManifestInvalid(manifest.string() + ": " + e.what());
  }
  const auto base = manifest.parent_path();
  if (!m.is_object() || !m.contains("instances") || !m["instances"].is_array()) {
    throw ManifestInvalid(manifest.string() + ": expected an object with an instances array");
  }
  if (!m.contains("toolchain") || !m["toolchain"].is_string()) {
    throw ManifestInvalid(manifest.string() + ": toolchain path missing");
  }
  std::shared_ptr<const tc::ToolchainProfile> profile;
  try {
    profile = std::make_shared<const tc::ToolchainProfile>(tc::ToolchainProfile::load(base / m["toolchain"].get<std::string>()));
  } catch (const Error& e) {
    throw ManifestInvalid(std::string("toolchain profile: ") + e.what());
  }

  Benchmark bench;
  bench.name = m.value("name", manifest.stem().string());
  std::set<std::string> ids;
  for (const auto& j : m["instances"]) {
    BenchmarkInstance inst;
    try {
      inst.instance_id = j.at("instance_id").get<std::string>();
      const auto where = "instance " + inst.instance_id;
      if (!ids.insert(inst.instance_id).second) throw ManifestInvalid("duplicate instance_id " + inst.instance_id);
      inst.mode = pipeline::parse_mode(j.at("mode").get<std::string>());
      const auto& paths = j.at("paths");
      inst.defective_unit = load_unit(base, paths.at("defective"));
      {
        // the fixed text takes the defective unit's name
        auto fixed = load_unit(base, paths.at("fixed"));
        inst.ground_truth.fixed_unit = SourceUnit::from_lines(inst.defective_unit.path, fixed.lines, fixed.final_newline);
      }
      for (const auto& p : paths.value("callers", json::array())) inst.caller_units.push_back(load_unit(base, p));
      for (const auto& p : paths.value("support", json::array())) inst.support_units.push_back(load_unit(base, p));
      if (inst.mode == Mode::indirect && inst.caller_units.empty()) {
        throw ManifestInvalid(where + ": indirect instances need caller units");
      }
      std::set<std::string> names{inst.defective_unit.path};
      for (const auto* group : {&inst.caller_units, &inst.support_units}) {
        for (const auto& u : *group) {
          if (!names.insert(u.path).second) throw ManifestInvalid(where + ": two units named " + u.path);
        }
      }
      inst.toolchain = profile;
      inst.failing_tests = string_list(j, "failing_tests", where);
      if (inst.failing_tests.empty()) throw ManifestInvalid(where + ": failing_tests is empty");
      inst.regression_tests = string_list(j, "regression_tests", where);
      inst.ground_truth.defective = j.value("defective", true);
      for (const auto& f : j.value("fault_lines", json::array())) {
        FaultLine fl{f.at("file").get<std::string>(), f.at("line").get<std::size_t>()};
        if (fl.line == 0) throw ManifestInvalid(where + ": fault line 0");
        inst.ground_truth.fault_lines.push_back(std::move(fl));
      }
      if (inst.ground_truth.defective && inst.ground_truth.fault_lines.empty()) {
        throw ManifestInvalid(where + ": fault_lines is empty");
      }
      inst.stub = j.value("stub", json::object()).get<gateway::StubConfig>();
      if (inst.mode == Mode::direct && !(j.contains("stub") && j["stub"].contains("patch"))) {
        inst.stub.patch = make_patch(inst.defective_unit, inst.ground_truth.fixed_unit);
      }
    } catch (const ManifestInvalid&) {
      throw;
    } catch (const std::exception& e) {
      throw ManifestInvalid(manifest.string() + ": " + (inst.instance_id.empty() ? "instance" : inst.instance_id) +
                            ": " + e.what());
    }
    if (opts.validate) {
      try {
        inst.pristine_outcome = validate_instance(inst, opts.cache_dir);
      } catch (const InstanceUnreproducible& e) {
        bench.excluded.push_back(e.what());
        continue;
      }
    }
    bench.instances.push_back(std::move(inst));
  }
  return bench;
}

// ------------------------------------------------------------------ patches

json make_patch(const SourceUnit& from, const SourceUnit& to) {
  const auto& a = from.lines;
  const auto& b = to.lines;
  const auto n = a.size(), m = b.size();
  // lcs[i][j]: LCS length of a[i..] and b[j..]
  std::vector<std::vector<std::uint32_t>> lcs(n + 1, std::vector<std::uint32_t>(m + 1, 0));
  for (auto i = n; i-- > 0;) {
    for (auto j = m; j-- > 0;) {
      lcs[i][j] = a[i] == b[j] ? lcs[i + 1][j + 1] + 1 : std::max(lcs[i + 1][j], lcs[i][j + 1]);
    }
  }
  json hunks = json::array();
  std::size_t i = 0, j = 0;
  while (i < n || j < m) {
    if (i < n && j < m && a[i] == b[j]) {
      ++i, ++j;
      continue;
    }
    json h = {{"line", i + 1}, {"delete", 0}, {"insert", json::array()}};
    std::size_t del = 0;
    while (i < n || j < m) {
      if (i < n && j < m && a[i] == b[j]) break;
      if (j < m && (i == n || lcs[i][j + 1] >= lcs[i + 1][j])) {
        h["insert"].push_back(b[j++]);
      } else {
        ++del, ++i;
      }
    }
    h["delete"] = del;
    hunks.push_back(h);
  }
  return {{"file", from.path}, {"hunks", hunks}};
}

SourceUnit apply_patch(const SourceUnit& unit, const json& patch) {
  if (!patch.is_object() || !patch.contains("hunks") || !patch["hunks"].is_array()) {
    throw PatchApplyFailure("patch needs a hunks array");
  }
  auto file = patch.value("file", std::string());
  if (!file.empty() && base_name(file) != base_name(unit.path)) {
    throw PatchApplyFailure("patch targets " + file + ", not " + unit.path);
  }
  struct Hunk {
    std::size_t line, del;
    std::vector<std::string> insert;
  };
  std::vector<Hunk> hunks;
  for (const auto& h : patch["hunks"]) {
    try {
      hunks.push_back({h.at("line").get<std::size_t>(), h.at("delete").get<std::size_t>(),
                       h.at("insert").get<std::vector<std::string>>()});
    } catch (const json::exception& e) {
      throw PatchApplyFailure(std::string("malformed hunk: ") + e.what());
    }
  }
  std::stable_sort(hunks.begin(), hunks.end(), [](const Hunk& x, const Hunk& y) { return x.line < y.line; });
  const auto n = unit.lines.size();
  std::vector<std::string> out;
  std::size_t next = 1;  // next original line to copy
  for (const auto& h : hunks) {
    if (h.line < next || h.line == 0) throw PatchApplyFailure("overlapping or zero-line hunk at " + std::to_string(h.line));
    if (h.line + h.del > n + 1) throw PatchApplyFailure("hunk at line " + std::to_string(h.line) + " runs past the end");
    for (; next < h.line; ++next) out.push_back(unit.lines[next - 1]);
    out.insert(out.end(), h.insert.begin(), h.insert.end());
    next = h.line + h.del;
  }
  for (; next <= n; ++next) out.push_back(unit.lines[next - 1]);
  return SourceUnit::from_lines(unit.path, std::move(out), unit.final_newline);
}

RepairCheck validate_repair(const BenchmarkInstance& inst, const json& patch) {
  SourceUnit patched;
  try {
    patched = apply_patch(inst.defective_unit, patch);
  } catch (const PatchApplyFailure& e) {
    return {false, std::string("patch does not apply: ") + e.what()};
  }
  std::unique_ptr<tc::Workspace> ws;
  auto c = build(inst, patched, ws);
  if (!c.ok) return {false, "patched unit does not compile"};
  auto r = ws->execute(inst.failing_tests);
  if (r.status != tc::OutcomeStatus::pass) {
    return {false, "failing tests still fail (" + std::string(tc::to_string(r.status)) + ")"};
  }
  if (!inst.regression_tests.empty()) {
    auto reg = ws->execute(inst.regression_tests);
    if (reg.status != tc::OutcomeStatus::pass) return {false, "regression tests fail"};
  }
  return {true, "failing and regression tests pass"};
}

// ------------------------------------------------------------------ agent

DebugVerdict verdict_from_json(const json& payload) {
  DebugVerdict v;
  v.defect_reported = payload.at("defect_reported").get<bool>();
  v.explanation = payload.value("explanation", std::string());
  const auto& loc = payload.at("location");
  if (loc.is_object()) {
    ReportedLocation l;
    l.file = loc.value("file", std::string());
    l.line = loc.value("line", std::size_t{0});
    l.method = loc.value("method", std::string());
    v.location = l;
  }
  if (v.defect_reported && payload.contains("patch") && !payload["patch"].is_null()) v.patch = payload["patch"];
  return v;
}

DebugVerdict run_debug_agent(const BenchmarkInstance& inst, const tc::ExecutionOutcome& outcome,
                             const LoggingPlan& plan, const gateway::Gateway& gw, const DebugOptions& opts) {
  std::string context;
  std::string instrumented;
  if (inst.mode == Mode::direct) {
    context = "// file: " + inst.defective_unit.path + "\n" + gateway::numbered_listing(inst.defective_unit);
    instrumented = inst.defective_unit.path;
  } else {
    for (const auto& u : inst.caller_units) context += "// file: " + u.path + "\n" + gateway::numbered_listing(u);
    instrumented = inst.caller_units.front().path;
  }
  gateway::PromptEnvelope env{
      "debug",
      {{"mode", std::string(pipeline::to_string(inst.mode))},
       {"context", context},
       {"outcome", pipeline::summarize_outcome(outcome, *inst.toolchain, opts.summary).dump()},
       {"logs", pipeline::events_view(outcome, plan, instrumented, opts.log_cap).dump()}},
      gateway::Schema::debug};
  DebugVerdict v;
  try {
    auto r = gw.complete(env);
    v = verdict_from_json(r.payload);
    v.digest = r.digest;
  } catch (const std::exception& e) {
    v = DebugVerdict{};
    v.error = e.what();
  }
  return v;
}

bool tp_match(const DebugVerdict& v, const BenchmarkInstance& inst) {
  if (!v.defect_reported || !v.location) return false;
  const auto& loc = *v.location;
  const auto& lines = inst.defective_unit.lines;
  const auto& render = inst.toolchain->render;
  for (const auto& f : inst.ground_truth.fault_lines) {
    if (base_name(f.file) != base_name(loc.file)) continue;
    auto fn = syntax::enclosing_function(lines, f.line, render);
    if (loc.line > 0) {
      if (loc.line == f.line) return true;
      if (fn && loc.line >= fn->signature_line && loc.line <= fn->close_line) return true;
    } else if (fn && !loc.method.empty() && loc.method == fn->name) {
      return true;
    }
  }
  return false;
}

// ------------------------------------------------------------------ metrics

Scores score(const Counts& c) {
  Scores s;
  s.precision = c.detected ? static_cast<double>(c.true_positives) / static_cast<double>(c.detected) : 0.0;
  s.recall = c.total ? static_cast<double>(c.true_positives) / static_cast<double>(c.total) : 0.0;
  s.f1 = s.precision + s.recall > 0 ? 2 * s.precision * s.recall / (s.precision + s.recall) : 0.0;
  return s;
}

MetricsReport compute_metrics(const std::vector<InstanceResult>& results, Mode mode) {
  MetricsReport m;
  m.mode = mode;
  std::size_t statements = 0, units = 0, events = 0, repairs = 0;
  for (const auto& r : results) {
    if (r.mode != mode) continue;
    ++m.total;
    statements += r.statements;
    units += r.units;
    events += r.events;
    if (r.compile_failed) {
      ++m.compilation_failures;
      continue;
    }
    if (!r.verdict.defect_reported) continue;
    ++m.detected_defects;
    if (r.true_positive) ++m.true_positives;
    if (r.repaired.value_or(false)) ++repairs;
  }
  auto s = score({m.total, m.detected_defects, m.true_positives});
  m.precision = s.precision;
  m.recall = s.recall;
  m.f1 = s.f1;
  if (mode == Mode::direct) m.successful_repairs = repairs;
  m.avg_logs = units ? static_cast<double>(statements) / static_cast<double>(units) : 0.0;
  m.avg_events = m.total ? static_cast<double>(events) / static_cast<double>(m.total) : 0.0;
  return m;
}

// ------------------------------------------------------------------ runs

std::string_view to_string(Generator g) {
  switch (g) {
    case Generator::relog: return "relog";
    case Generator::none: return "none";
    case Generator::plan_file: return "plan-file";
  }
  return "relog";
}

Generator parse_generator(std::string_view s) {
  for (auto g : {Generator::relog, Generator::none, Generator::plan_file}) {
    if (to_string(g) == s) return g;
  }
  throw Error("unknown generator '" + std::string(s) + "'");
}

ProviderFactory stub_factory() {
  return [](const BenchmarkInstance& inst) { return std::make_shared<gateway::StubProvider>(inst.stub); };
}

InstanceResult evaluate_instance(const BenchmarkInstance& inst, const EvalOptions& opts) {
  InstanceResult r;
  r.instance_id = inst.instance_id;
  r.mode = inst.mode;
  const auto& profile = *inst.toolchain;
  auto in = inst.inputs();
  if (inst.mode == Mode::direct) {
    r.units = std::max<std::size_t>(1, syntax::find_functions(inst.defective_unit.lines, profile.render).size());
  } else {
    r.units = inst.caller_units.size();
  }

  auto provider = opts.provider ? opts.provider(inst) : stub_factory()(inst);
  gateway::Gateway gw(provider, gateway::TemplateSet::builtin(), opts.retry_limit);
  if (opts.record) gw.record_to(opts.record);

  std::optional<tc::ExecutionOutcome> outcome;
  LoggingPlan plan{opts.loop.plan_id, 0, {}};
  try {
    switch (opts.generator) {
      case Generator::relog: {
        auto ledger = pipeline::run_loop(in, profile, gw, opts.loop);
        r.termination = ledger.termination;
        r.iterations = ledger.iterations.size();
        plan = ledger.final_plan;
        r.compile_failed = ledger.termination == pipeline::Termination::compile_failed;
        if (ledger.error) r.error = ledger.error->kind + ": " + ledger.error->message;
        if (!r.compile_failed) {
          if (const auto* o = ledger.final_outcome()) outcome = *o;
        }
        r.ledger = std::move(ledger);
        break;
      }
      case Generator::none:
        outcome = in.probe ? *in.probe : pipeline::probe_original(in, profile);
        break;
      case Generator::plan_file: {
        if (!opts.plan_dir) throw Error("plan-file generator needs a plan directory");
        auto path = *opts.plan_dir / (inst.instance_id + ".json");
        std::ifstream f(path);
        if (!f) throw Error("no plan file " + path.string());
        plan = normalize_plan(json::parse(f).get<LoggingPlan>());
        InstrumentedUnit unit;
        try {
          unit = apply_plan(in.source, plan, profile.render);
        } catch (const Error& e) {
          r.compile_failed = true;
          r.error = std::string("plan does not apply: ") + e.what();
          break;
        }
        tc::Workspace ws(profile, unit, in.companions);
        if (!ws.compile().ok) {
          r.compile_failed = true;
          break;
        }
        outcome = ws.execute(in.tests);
        break;
      }
    }
  } catch (const std::exception& e) {
    r.error = e.what();
  }
  r.statements = plan.statements.size();
  if (!outcome) return r;

  r.events = outcome->log_events.size();
  r.verdict = run_debug_agent(inst, *outcome, plan, gw, opts.debug);
  r.true_positive = tp_match(r.verdict, inst);
  if (r.verdict.patch && inst.mode == Mode::direct) {
    auto check = validate_repair(inst, *r.verdict.patch);
    r.repaired = check.ok;
    r.repair_reason = check.reason;
  }
  return r;
}

EvalReport evaluate(const Benchmark& bench, const EvalOptions& opts, std::string label) {
  EvalReport rep;
  rep.benchmark = bench.name;
  rep.label = label.empty() ? std::string(to_string(opts.generator)) : std::move(label);
  rep.excluded = bench.excluded;
  rep.results.resize(bench.instances.size());

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (auto i = next++; i < bench.instances.size(); i = next++) {
      rep.results[i] = evaluate_instance(bench.instances[i], opts);
    }
  };
  const auto threads = std::max(1u, std::min<unsigned>(opts.threads, static_cast<unsigned>(bench.instances.size())));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  for (auto mode : {Mode::direct, Mode::indirect}) {
    bool any = std::any_of(rep.results.begin(), rep.results.end(), [&](const auto& r) { return r.mode == mode; });
    if (any) rep.metrics.push_back(compute_metrics(rep.results, mode));
  }
  return rep;
}

const MetricsReport* EvalReport::for_mode(Mode m) const {
  for (const auto& x : metrics) {
    if (x.mode == m) return &x;
  }
  return nullptr;
}

json EvalReport::to_json() const {
  json metrics_j = json::array();
  for (const auto& m : metrics) {
    json j = {{"mode", pipeline::to_string(m.mode)},
              {"total", m.total},
              {"compilation_failures", m.compilation_failures},
              {"detected_defects", m.detected_defects},
              {"true_positives", m.true_positives},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"successful_repairs", m.successful_repairs ? json(*m.successful_repairs) : json(nullptr)},
              {"avg_logs", m.avg_logs},
              {"avg_events", m.avg_events}};
    metrics_j.push_back(j);
  }
  json instances = json::array();
  for (const auto& r : results) {
    json loc = nullptr;
    if (r.verdict.location) {
      loc = {{"file", r.verdict.location->file}, {"line", r.verdict.location->line}};
      if (!r.verdict.location->method.empty()) loc["method"] = r.verdict.location->method;
    }
    instances.push_back({{"instance_id", r.instance_id},
                         {"mode", pipeline::to_string(r.mode)},
                         {"termination", r.termination ? json(pipeline::to_string(*r.termination)) : json(nullptr)},
                         {"iterations", r.iterations},
                         {"compile_failed", r.compile_failed},
                         {"defect_reported", r.verdict.defect_reported},
                         {"location", loc},
                         {"true_positive", r.true_positive},
                         {"repaired", r.repaired ? json(*r.repaired) : json(nullptr)},
                         {"statements", r.statements},
                         {"units", r.units},
                         {"events", r.events},
                         {"error", r.error ? json(*r.error) : r.verdict.error ? json(*r.verdict.error) : json(nullptr)}});
  }
  return {{"benchmark", benchmark},
          {"label", label},
          {"tp_rule", kTpRule},
          {"avg_logs_counts", "final-plan statements per method (direct) or per caller (indirect)"},
          {"metrics", metrics_j},
          {"instances", instances},
          {"excluded", excluded}};
}

std::string EvalReport::render_table() const { return eval::render_table({this}); }

std::string render_table(const std::vector<const EvalReport*>& reports) {
  std::string out;
  if (reports.empty()) return out;
  out += "benchmark: " + reports.front()->benchmark + "\n";
  out += std::string("true positives: ") + kTpRule + "\n";
  char buf[256];
  for (auto mode : {Mode::direct, Mode::indirect}) {
    bool any = std::any_of(reports.begin(), reports.end(), [&](auto* r) { return r->for_mode(mode); });
    if (!any) continue;
    const bool direct = mode == Mode::direct;
    std::size_t width = 7;
    for (auto* r : reports) width = std::max(width, r->label.size());
    out += direct ? "\nDirect debugging\n" : "\nIndirect debugging\n";
    std::snprintf(buf, sizeof buf, "%-*s | %20s | %16s | %14s | %9s | %6s | %8s", static_cast<int>(width), "Variant",
                  "Compilation Failures", "Detected Defects", "True Positives", "Precision", "Recall", "F1 Score");
    out += buf;
    out += direct ? " | Successful Repairs | Avg. Logs\n" : " | Avg. Logs per Caller\n";
    for (auto* r : reports) {
      const auto* m = r->for_mode(mode);
      if (!m) continue;
      std::snprintf(buf, sizeof buf, "%-*s | %20zu | %16zu | %14zu | %9.3f | %6.3f | %8.3f", static_cast<int>(width),
                    r->label.c_str(), m->compilation_failures, m->detected_defects, m->true_positives, m->precision,
                    m->recall, m->f1);
      out += buf;
      if (direct) {
        std::snprintf(buf, sizeof buf, " | %18zu | %9.2f\n", m->successful_repairs.value_or(0), m->avg_logs);
      } else {
        std::snprintf(buf, sizeof buf, " | %20.2f\n", m->avg_logs);
      }
      out += buf;
    }
    std::snprintf(buf, sizeof buf, "(%zu instances)\n", reports.front()->for_mode(mode) ? reports.front()->for_mode(mode)->total : 0);
    out += buf;
  }
  return out;
}

}  // namespace relog::eval
