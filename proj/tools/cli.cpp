#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "relog/eval.hpp"
#include "relog/miner.hpp"
#include "relog/report.hpp"
#include "relog/toolchain.hpp"

namespace relog::cli {

namespace fs = std::filesystem;
namespace tc = relog::toolchain;
using nlohmann::json;

int exit_code_for(pipeline::Termination t) {
  switch (t) {
    case pipeline::Termination::sufficient: return kSufficient;
    case pipeline::Termination::budget_exhausted: return kBudgetExhausted;
    case pipeline::Termination::compile_failed: return kCompileFailed;
    case pipeline::Termination::execution_error: return kExecutionError;
  }
  return kExecutionError;
}

namespace {

std::string read_text(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw IoError("cannot read " + p.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw IoError("cannot write " + p.string());
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

template <class T>
T get_as(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config field '") + key + "': " + e.what());
  }
}

}  // namespace

RunConfig RunConfig::from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {"toolchain", "provider",    "budgets", "ablate_fixer", "ablate_refine",
                                              "dimensions", "mode",       "output_dir", "threads"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ConfigError("unknown config field '" + key + "'");
  }
  RunConfig c;
  if (j.contains("toolchain")) c.toolchain = resolve(base_dir, get_as<std::string>(j, "toolchain"));
  if (j.contains("provider")) {
    const auto& p = j["provider"];
    if (!p.is_object()) throw ConfigError("provider must be an object");
    c.provider.kind = p.value("kind", std::string("stub"));
    if (p.contains("stub")) c.provider.stub = p["stub"];
    if (p.contains("replay_dir")) c.provider.replay_dir = resolve(base_dir, get_as<std::string>(p, "replay_dir"));
    if (p.contains("remote")) {
      try {
        c.provider.remote = p["remote"].get<gateway::RemoteConfig>();
      } catch (const std::exception& e) {
        throw ConfigError(std::string("provider.remote: ") + e.what());
      }
    }
  }
  if (j.contains("budgets")) {
    const auto& b = j["budgets"];
    if (b.contains("max_iterations")) c.max_iterations = get_as<int>(b, "max_iterations");
    if (b.contains("fix_budget")) c.fix_budget = get_as<int>(b, "fix_budget");
    if (b.contains("retry_limit")) c.retry_limit = get_as<int>(b, "retry_limit");
  }
  if (j.contains("ablate_fixer")) c.ablate_fixer = get_as<bool>(j, "ablate_fixer");
  if (j.contains("ablate_refine")) c.ablate_refine = get_as<bool>(j, "ablate_refine");
  if (j.contains("dimensions")) {
    c.dimensions.clear();
    for (const auto& d : j["dimensions"]) {
      c.dimensions.push_back({get_as<std::string>(d, "name"), d.value("description", std::string())});
    }
  }
  if (j.contains("mode")) {
    try {
      c.mode = pipeline::parse_mode(get_as<std::string>(j, "mode"));
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      throw ConfigError(e.what());
    }
  }
  if (j.contains("output_dir")) c.output_dir = resolve(base_dir, get_as<std::string>(j, "output_dir"));
  if (j.contains("threads")) c.threads = get_as<unsigned>(j, "threads");
  c.check();
  return c;
}

RunConfig RunConfig::load(const fs::path& file) {
  auto text = read_text(file);
  auto j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ConfigError(file.string() + ": not valid JSON");
  return from_json(j, file.parent_path());
}

void RunConfig::check() const {
  if (max_iterations < 1) throw ConfigError("max_iterations must be positive");
  if (fix_budget < 1) throw ConfigError("fix_budget must be positive");
  if (retry_limit < 1) throw ConfigError("retry_limit must be positive");
  if (threads < 1) throw ConfigError("threads must be positive");
  if (dimensions.empty()) throw ConfigError("the rubric needs at least one dimension");
  if (provider.kind != "stub" && provider.kind != "replay" && provider.kind != "remote") {
    throw ConfigError("unknown provider '" + provider.kind + "'");
  }
  if (provider.kind == "replay" && !provider.replay_dir) throw ConfigError("replay provider needs a replay directory");
  if (provider.kind == "remote" && !provider.remote) throw ConfigError("remote provider needs a provider.remote section");
}

pipeline::LoopConfig RunConfig::loop() const {
  pipeline::LoopConfig l;
  l.max_iterations = max_iterations;
  l.fix_budget = fix_budget;
  l.ablate_fixer = ablate_fixer;
  l.ablate_refine = ablate_refine;
  l.dimensions = dimensions;
  // a rubric smaller than the default still needs a reachable rule
  l.rule.min_full = std::min<int>(l.rule.min_full, static_cast<int>(dimensions.size()));
  return l;
}

fs::path make_run_dir(const fs::path& output_dir, const std::string& command, const std::string& name) {
  auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream stamp;
  stamp << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  std::error_code ec;
  fs::create_directories(output_dir, ec);
  auto base = output_dir / (stamp.str() + "-" + command + (name.empty() ? "" : "-" + name));
  auto dir = base;
  for (int n = 2; !fs::create_directory(dir, ec); ++n) {
    if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
    dir = base.string() + "-" + std::to_string(n);
  }
  return dir;
}

namespace {

struct CommonFlags {
  std::optional<std::string> config;
  std::optional<std::string> provider;
  std::optional<std::string> replay;
  std::optional<std::string> record;
  std::optional<int> max_iterations;
  std::optional<int> fix_budget;
  bool ablate_fixer = false;
  bool ablate_refine = false;
  std::optional<std::string> mode;
  std::optional<std::string> out;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "JSON config file");
    app->add_option("--provider", provider, "stub, replay or remote");
    app->add_option("--replay", replay, "replay responses recorded in this directory");
    app->add_option("--record", record, "record every response into this directory");
    app->add_option("--max-iterations", max_iterations, "refinement budget (default 5)");
    app->add_option("--fix-budget", fix_budget, "compilation repair budget (default 3)");
    app->add_flag("--ablate-fixer", ablate_fixer, "disable compilation repair");
    app->add_flag("--ablate-refine", ablate_refine, "stop after the first critic verdict");
    app->add_option("--mode", mode, "direct or indirect");
    app->add_option("--out", out, "output directory for run artifacts");
  }

  RunConfig resolve() const {
    RunConfig c = config ? RunConfig::load(*config) : RunConfig{};
    if (provider) c.provider.kind = *provider;
    if (replay) {
      c.provider.replay_dir = *replay;
      if (!provider) c.provider.kind = "replay";
    }
    if (max_iterations) c.max_iterations = *max_iterations;
    if (fix_budget) c.fix_budget = *fix_budget;
    c.ablate_fixer = c.ablate_fixer || ablate_fixer;
    c.ablate_refine = c.ablate_refine || ablate_refine;
    if (mode) {
      try {
        c.mode = pipeline::parse_mode(*mode);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    if (out) c.output_dir = *out;
    c.check();
    return c;
  }

  std::shared_ptr<gateway::ReplayStore> recorder() const {
    if (!record) return nullptr;
    try {
      return std::make_shared<gateway::ReplayStore>(*record);
    } catch (const std::exception& e) {
      throw IoError(e.what());
    }
  }
};

std::shared_ptr<gateway::Provider> shared_provider(const RunConfig& c) {
  if (c.provider.kind == "replay") {
    if (!fs::is_directory(*c.provider.replay_dir)) throw IoError("no replay directory " + c.provider.replay_dir->string());
    return std::make_shared<gateway::ReplayProvider>(std::make_shared<gateway::ReplayStore>(*c.provider.replay_dir));
  }
  if (c.provider.kind == "remote") return std::make_shared<gateway::RemoteProvider>(*c.provider.remote);
  try {
    return std::make_shared<gateway::StubProvider>(c.provider.stub.get<gateway::StubConfig>());
  } catch (const std::exception& e) {
    throw ConfigError(std::string("provider.stub: ") + e.what());
  }
}

tc::ToolchainProfile load_profile(const RunConfig& c, const std::optional<std::string>& flag) {
  std::optional<fs::path> path = flag ? std::optional<fs::path>(*flag) : c.toolchain;
  if (!path) throw ConfigError("no toolchain profile: pass --toolchain or set it in the config");
  if (!fs::exists(*path)) throw ConfigError("toolchain profile " + path->string() + " does not exist");
  try {
    return tc::ToolchainProfile::load(*path);
  } catch (const tc::ProfileInvalid& e) {
    throw ConfigError(e.what());
  }
}

json effective_config(const RunConfig& c) {
  json dims = json::array();
  for (const auto& d : c.dimensions) dims.push_back({{"name", d.name}, {"description", d.description}});
  json provider = {{"kind", c.provider.kind}};
  if (c.provider.kind == "stub") provider["stub"] = c.provider.stub;
  if (c.provider.replay_dir) provider["replay_dir"] = c.provider.replay_dir->string();
  if (c.provider.remote) {
    // the credential itself is never written out
    provider["remote"] = {{"base_url", c.provider.remote->base_url},
                          {"model", c.provider.remote->model},
                          {"api_key_env", c.provider.remote->api_key_env}};
  }
  return {{"toolchain", c.toolchain ? json(c.toolchain->string()) : json(nullptr)},
          {"provider", provider},
          {"budgets", {{"max_iterations", c.max_iterations}, {"fix_budget", c.fix_budget}, {"retry_limit", c.retry_limit}}},
          {"ablate_fixer", c.ablate_fixer},
          {"ablate_refine", c.ablate_refine},
          {"dimensions", dims},
          {"mode", pipeline::to_string(c.mode)},
          {"output_dir", c.output_dir.string()},
          {"threads", c.threads}};
}

SourceUnit read_unit(const fs::path& p) {
  return SourceUnit::from_text(p.filename().string(), read_text(p));
}

// ------------------------------------------------------------------ run

struct RunArgs {
  CommonFlags common;
  std::string source;
  std::vector<std::string> companions;
  std::vector<std::string> tests;
  std::optional<std::string> toolchain;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  auto cfg = a.common.resolve();
  auto profile = load_profile(cfg, a.toolchain);
  pipeline::RunInputs in;
  in.source = read_unit(a.source);
  for (const auto& c : a.companions) in.companions.push_back(read_unit(c));
  in.tests = a.tests;
  in.mode = cfg.mode;

  gateway::Gateway gw(shared_provider(cfg), gateway::TemplateSet::builtin(), cfg.retry_limit);
  if (auto rec = a.common.recorder()) gw.record_to(rec);
  auto ledger = pipeline::run_loop(in, profile, gw, cfg.loop());

  auto dir = make_run_dir(cfg.output_dir, "run", fs::path(a.source).stem().string());
  write_text(dir / "ledger.jsonl", ledger.to_jsonl());
  write_text(dir / "trace.txt", report::render_trace(ledger));
  write_text(dir / "config.json", effective_config(cfg).dump(2) + "\n");

  out << "termination: " << pipeline::to_string(ledger.termination) << " after " << ledger.iterations.size()
      << " iteration(s)\n";
  out << "ledger: " << (dir / "ledger.jsonl").string() << "\n";
  if (ledger.error) {
    err << "error: " << ledger.error->kind << ": " << ledger.error->message << "\n";
    if (ledger.error->kind == "toolchain_unavailable") return kToolchainUnavailable;
  }
  return exit_code_for(ledger.termination);
}

// ------------------------------------------------------------------ eval

struct EvalArgs {
  CommonFlags common;
  std::string manifest;
  std::string generator = "relog";
  std::optional<std::string> plan_dir;
  std::optional<unsigned> threads;
  std::optional<std::string> cache;
  bool validate = true;
};

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
  auto cfg = a.common.resolve();
  eval::EvalOptions opts;
  try {
    opts.generator = eval::parse_generator(a.generator);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (opts.generator == eval::Generator::plan_file) {
    if (!a.plan_dir) throw ConfigError("--generator plan-file needs --plan-dir");
    opts.plan_dir = *a.plan_dir;
  }
  opts.loop = cfg.loop();
  opts.retry_limit = cfg.retry_limit;
  opts.threads = a.threads.value_or(cfg.threads);
  opts.record = a.common.recorder();
  if (cfg.provider.kind != "stub") {
    auto shared = shared_provider(cfg);
    opts.provider = [shared](const eval::BenchmarkInstance&) { return shared; };
  }

  eval::LoadOptions load;
  load.validate = a.validate;
  if (a.cache) load.cache_dir = *a.cache;
  auto bench = eval::load_benchmark(a.manifest, load);
  if (a.common.mode) {
    std::erase_if(bench.instances, [&](const auto& i) { return i.mode != cfg.mode; });
  }
  for (const auto& x : bench.excluded) err << "excluded: " << x << "\n";

  auto rep = eval::evaluate(bench, opts);
  auto dir = make_run_dir(cfg.output_dir, "eval", bench.name + "-" + rep.label);
  write_text(dir / "report.json", rep.to_json().dump(2) + "\n");
  auto table = rep.render_table();
  write_text(dir / "table.txt", table);
  write_text(dir / "config.json", effective_config(cfg).dump(2) + "\n");
  bool ledgers = false;
  for (const auto& r : rep.results) {
    if (!r.ledger) continue;
    if (!ledgers) fs::create_directories(dir / "ledgers");
    ledgers = true;
    write_text(dir / "ledgers" / (r.instance_id + ".jsonl"), r.ledger->to_jsonl());
  }
  out << table;
  out << "report: " << (dir / "report.json").string() << "\n";
  return kSufficient;
}

// ------------------------------------------------------------------ mine

struct MineArgs {
  std::string repo;
  std::optional<double> theta;
  std::vector<std::string> patterns;
  std::vector<std::string> extensions;
  bool no_renames = false;
  std::optional<std::string> out;
};

int cmd_mine(const MineArgs& a, std::ostream& out) {
  miner::MinerConfig cfg;
  if (a.theta) {
    if (*a.theta <= 0 || *a.theta > 1) throw ConfigError("--theta must lie in (0, 1]");
    cfg.theta = *a.theta;
  }
  if (!a.patterns.empty()) {
    cfg.patterns.clear();
    for (const auto& p : a.patterns) cfg.patterns.push_back({p});
  }
  if (!a.extensions.empty()) cfg.extensions = a.extensions;
  cfg.follow_renames = !a.no_renames;
  auto rep = miner::mine(a.repo, cfg);

  auto dir = make_run_dir(a.out ? fs::path(*a.out) : fs::path("runs"), "mine", rep.project);
  write_text(dir / "report.json", rep.to_json().dump(2) + "\n");
  write_text(dir / "lineages.csv", rep.lineages_csv());
  const auto& d = rep.distribution;
  out << "project: " << rep.project << "\n"
      << "commits: " << rep.commit_count << ", statements seen: " << rep.sighting_count << "\n"
      << "lineages: " << d.lineage_count << ", modified: " << d.modified_count << " (" << std::fixed
      << std::setprecision(1) << d.modified_share * 100 << "%)\n";
  for (const auto& [bucket, pct] : d.buckets) out << "  changed " << bucket << "x: " << pct << "%\n";
  out << "report: " << (dir / "report.json").string() << "\n";
  return kSufficient;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Iterative logging generation, evaluation and logging-history mining"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "generate logging for one program");
  run_cmd->add_option("source", run.source, "unit to instrument")->required();
  run_cmd->add_option("--companion", run.companions, "other units the program is built with");
  run_cmd->add_option("--test", run.tests, "test names passed to the test command");
  run_cmd->add_option("--toolchain", run.toolchain, "toolchain profile (overrides the config)");
  run.common.add_to(run_cmd);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "evaluate a benchmark manifest");
  eval_cmd->add_option("manifest", ev.manifest, "benchmark manifest")->required();
  eval_cmd->add_option("--generator", ev.generator, "relog, none or plan-file");
  eval_cmd->add_option("--plan-dir", ev.plan_dir, "plans for --generator plan-file, one <instance_id>.json each");
  eval_cmd->add_option("--threads", ev.threads, "instances evaluated in parallel");
  eval_cmd->add_option("--cache", ev.cache, "cache directory for instance validation");
  eval_cmd->add_flag("!--no-validate", ev.validate, "skip the reproducibility check");
  ev.common.add_to(eval_cmd);

  MineArgs mine;
  auto* mine_cmd = app.add_subcommand("mine", "mine logging-statement changes from a git history");
  mine_cmd->add_option("repo", mine.repo, "local clone")->required();
  mine_cmd->add_option("--theta", mine.theta, "token Jaccard threshold for matching (default 0.7)");
  mine_cmd->add_option("--pattern", mine.patterns, "call regex up to the opening parenthesis; repeatable");
  mine_cmd->add_option("--ext", mine.extensions, "file extensions to scan; repeatable");
  mine_cmd->add_flag("--no-renames", mine.no_renames, "do not follow renames");
  mine_cmd->add_option("--out", mine.out, "output directory");

  std::string ledger_file;
  auto* report_cmd = app.add_subcommand("report", "render the per-iteration trace of a ledger");
  report_cmd->add_option("ledger", ledger_file, "ledger.jsonl")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kConfigError;
  }

  try {
    if (*run_cmd) return cmd_run(run, out, err);
    if (*eval_cmd) return cmd_eval(ev, out, err);
    if (*mine_cmd) return cmd_mine(mine, out);
    if (*report_cmd) {
      pipeline::RunLedger ledger;
      try {
        ledger = report::read_ledger(ledger_file);
      } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kIoError;
      }
      out << report::render_trace(ledger);
      return kSufficient;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kIoError;
  } catch (const eval::ManifestInvalid& e) {
    err << "invalid manifest: " << e.what() << "\n";
    return kManifestInvalid;
  } catch (const miner::RepoUnreadable& e) {
    err << "unreadable repository: " << e.what() << "\n";
    return kRepoUnreadable;
  } catch (const tc::ToolchainUnavailable& e) {
    err << "toolchain unavailable: " << e.what() << "\n";
    return kToolchainUnavailable;
  } catch (const gateway::ProviderUnavailable& e) {
    err << "provider unavailable: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExecutionError;
  }
  return kConfigError;
}

}  // namespace relog::cli
