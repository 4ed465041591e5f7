#include "relog/miner.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <regex>
#include <set>
#include <sstream>

#include "relog/process.hpp"

namespace relog::miner {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kEmptyTree = "4b825dc642cb6eb9a060e54bf8d69288fbee4904";

// Replaces comments with blanks, keeping newlines and string literals.
std::string blank_comments(std::string_view text) {
  std::string out(text);
  char quote = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    char c = out[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote || c == '\n') quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == '/' && i + 1 < out.size() && out[i + 1] == '/') {
      while (i < out.size() && out[i] != '\n') out[i++] = ' ';
    } else if (c == '/' && i + 1 < out.size() && out[i + 1] == '*') {
      out[i] = out[i + 1] = ' ';
      i += 2;
      while (i < out.size() && !(out[i] == '*' && i + 1 < out.size() && out[i + 1] == '/')) {
        if (out[i] != '\n') out[i] = ' ';
        ++i;
      }
      if (i < out.size()) out[i] = out[i + 1] = ' ', ++i;
    }
  }
  return out;
}

// Index one past the paren closing the call opened just before `pos`.
std::optional<std::size_t> close_call(std::string_view text, std::size_t pos) {
  int depth = 1;
  char quote = 0;
  for (std::size_t i = pos; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    else if (c == '(') ++depth;
    else if (c == ')' && --depth == 0) return i + 1;
    else if (c == ';' && depth > 0) return std::nullopt;  // unbalanced statement
  }
  return std::nullopt;
}

struct Proc {
  std::string out;
  bool ok = false;
  std::string err;
};

Proc git(const fs::path& repo, std::vector<std::string> args) {
  ProcessSpec spec;
  spec.argv = {"git", "-C", repo.string()};
  spec.argv.insert(spec.argv.end(), args.begin(), args.end());
  spec.env = environment_subset({"PATH", "HOME", "LANG", "TMPDIR"});
  spec.env["GIT_CONFIG_NOSYSTEM"] = "1";
  spec.env["GIT_TERMINAL_PROMPT"] = "0";
  spec.timeout = std::chrono::milliseconds(120000);
  spec.stream_cap = 256u * 1024 * 1024;
  auto r = run_process(spec);
  if (!r.spawned) throw RepoUnreadable("cannot run git: " + r.spawn_error);
  return {r.out, r.success(), r.err};
}

std::vector<std::string> split_nul(const std::string& s) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start < s.size()) {
    auto end = s.find('\0', start);
    if (end == std::string::npos) end = s.size();
    parts.push_back(s.substr(start, end - start));
    start = end + 1;
  }
  return parts;
}

bool wanted(const std::string& path, const MinerConfig& cfg) {
  if (cfg.extensions.empty()) return true;
  auto ext = fs::path(path).extension().string();
  return std::find(cfg.extensions.begin(), cfg.extensions.end(), ext) != cfg.extensions.end();
}

}  // namespace

std::vector<ApiPattern> MinerConfig::default_patterns() {
  return {
      {R"(\b(?:log|logger|LOG|LOGGER|Log|Logger|logging|rlog)\s*(?:\.|::)\s*(?:trace|debug|info|warn|warning|error|fatal|critical)\s*\()"},
  };
}

std::string normalize_call(std::string_view call) {
  std::string out;
  char quote = 0;
  bool pending_space = false;
  for (std::size_t i = 0; i < call.size(); ++i) {
    char c = call[i];
    if (quote) {
      out += c;
      if (c == '\\' && i + 1 < call.size()) out += call[++i];
      else if (c == quote) quote = 0;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      // keep a blank only between two word characters
      char prev = out.back();
      bool word_prev = std::isalnum(static_cast<unsigned char>(prev)) || prev == '_';
      bool word_next = std::isalnum(static_cast<unsigned char>(c)) || c == '_';
      if (word_prev && word_next) out += ' ';
      pending_space = false;
    }
    if (c == '"' || c == '\'') quote = c;
    out += c;
  }
  return out;
}

std::vector<std::string> word_tokens(std::string_view normalized) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char c : normalized) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
      cur += c;
    } else if (!cur.empty()) {
      tokens.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) tokens.push_back(std::move(cur));
  return tokens;
}

double token_jaccard(std::string_view a, std::string_view b) {
  auto ta = word_tokens(a);
  auto tb = word_tokens(b);
  std::set<std::string> sa(ta.begin(), ta.end()), sb(tb.begin(), tb.end());
  if (sa.empty() && sb.empty()) return 1.0;
  std::size_t inter = 0;
  for (const auto& t : sa) inter += sb.count(t);
  return static_cast<double>(inter) / static_cast<double>(sa.size() + sb.size() - inter);
}

std::vector<StatementSighting> extract_statements(std::string_view raw, const MinerConfig& cfg) {
  const auto text = blank_comments(raw);
  struct Hit {
    std::size_t begin, end;
    std::string api;
  };
  std::vector<Hit> hits;
  for (const auto& p : cfg.patterns) {
    std::regex re(p.regex);
    for (auto it = std::sregex_iterator(text.begin(), text.end(), re); it != std::sregex_iterator(); ++it) {
      auto begin = static_cast<std::size_t>(it->position(0));
      auto open = begin + static_cast<std::size_t>(it->length(0));
      // matches inside string literals are not calls
      bool in_literal = false;
      {
        auto line_start = text.rfind('\n', begin);
        line_start = line_start == std::string::npos ? 0 : line_start + 1;
        char quote = 0;
        for (auto i = line_start; i < begin; ++i) {
          if (quote) {
            if (text[i] == '\\') ++i;
            else if (text[i] == quote) quote = 0;
          } else if (text[i] == '"' || text[i] == '\'') {
            quote = text[i];
          }
        }
        in_literal = quote != 0;
      }
      if (in_literal) continue;
      auto end = close_call(text, open);
      if (!end) continue;
      std::string api;
      for (char c : it->str(0)) {
        if (!std::isspace(static_cast<unsigned char>(c)) && c != '(') api += c;
      }
      hits.push_back({begin, *end, api});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const Hit& a, const Hit& b) { return a.begin < b.begin; });
  std::vector<StatementSighting> out;
  std::size_t covered = 0;
  for (const auto& h : hits) {
    if (h.begin < covered) continue;  // nested or overlapping match
    covered = h.end;
    StatementSighting s;
    s.line = static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<long>(h.begin), '\n')) + 1;
    s.api_name = h.api;
    s.normalized_template = normalize_call(std::string_view(raw).substr(h.begin, h.end - h.begin));
    out.push_back(std::move(s));
  }
  return out;
}

ScanResult scan_repository(const fs::path& repo, const MinerConfig& cfg) {
  if (cfg.patterns.empty()) throw Error("miner needs at least one API pattern");
  std::error_code ec;
  if (!fs::is_directory(repo, ec)) throw RepoUnreadable("not a directory: " + repo.string());
  if (!git(repo, {"rev-parse", "--git-dir"}).ok) throw RepoUnreadable("not a git repository: " + repo.string());
  ScanResult result;
  if (!git(repo, {"rev-parse", "--verify", "-q", "HEAD"}).ok) return result;  // no commits yet

  auto revs = git(repo, {"rev-list", "--first-parent", "--reverse", "HEAD"});
  if (!revs.ok) throw RepoUnreadable("git rev-list failed: " + revs.err);
  std::vector<std::string> commits;
  std::istringstream lines(revs.out);
  for (std::string c; std::getline(lines, c);) {
    if (!c.empty()) commits.push_back(c);
  }
  result.commit_count = commits.size();

  std::map<std::string, std::string> key_of;  // current path -> file key
  std::size_t generation = 0;                 // distinguishes re-added paths
  std::string prev = kEmptyTree;
  for (const auto& commit : commits) {
    auto diff = git(repo, {"diff-tree", "-r", "-z", "--name-status", cfg.follow_renames ? "-M" : "--no-renames", prev, commit});
    if (!diff.ok) throw RepoUnreadable("git diff-tree failed at " + commit + ": " + diff.err);
    auto fields = split_nul(diff.out);
    std::vector<std::string> touched;
    for (std::size_t i = 0; i + 1 < fields.size();) {
      const auto& status = fields[i];
      char kind = status.empty() ? '?' : status[0];
      if (kind == 'R' && i + 2 < fields.size()) {
        const auto& from = fields[i + 1];
        const auto& to = fields[i + 2];
        auto it = key_of.find(from);
        key_of[to] = it != key_of.end() ? it->second : to + "#" + std::to_string(generation++);
        if (it != key_of.end()) key_of.erase(it);
        touched.push_back(to);
        i += 3;
        continue;
      }
      const auto& path = fields[i + 1];
      if (kind == 'D') {
        if (auto it = key_of.find(path); it != key_of.end()) {
          if (wanted(path, cfg)) result.touches.push_back({commit, path, it->second});
          key_of.erase(it);
        }
      } else {
        if (!key_of.count(path)) key_of[path] = path + "#" + std::to_string(generation++);
        touched.push_back(path);
      }
      i += 2;
    }
    for (const auto& path : touched) {
      if (!wanted(path, cfg)) continue;
      result.touches.push_back({commit, path, key_of[path]});
      auto blob = git(repo, {"cat-file", "blob", commit + ":" + path});
      if (!blob.ok) continue;  // submodule or similar
      for (auto& s : extract_statements(blob.out, cfg)) {
        s.commit = commit;
        s.path = path;
        s.file_key = key_of[path];
        result.sightings.push_back(std::move(s));
      }
    }
    prev = commit;
  }
  return result;
}

namespace {

using Batch = std::pair<std::string, std::vector<const StatementSighting*>>;  // file key, sightings

std::vector<StatementLineage> track_batches(const std::vector<Batch>& batches, double theta) {
  std::vector<StatementLineage> lineages;
  std::map<std::string, std::vector<std::size_t>> open;  // file key -> open lineage indices

  for (const auto& [key, batch] : batches) {
    auto& candidates = open[key];
    struct Pair {
      double score;
      std::size_t distance;
      std::size_t lineage;
      std::size_t sighting;
    };
    std::vector<Pair> pairs;
    for (auto l : candidates) {
      const auto& last = lineages[l].sightings.back();
      for (std::size_t s = 0; s < batch.size(); ++s) {
        double score = token_jaccard(last.normalized_template, batch[s]->normalized_template);
        if (score + 1e-12 < theta) continue;
        auto line = batch[s]->line;
        auto d = last.line > line ? last.line - line : line - last.line;
        pairs.push_back({score, d, l, s});
      }
    }
    std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
      if (a.score != b.score) return a.score > b.score;
      if (a.distance != b.distance) return a.distance < b.distance;
      if (a.lineage != b.lineage) return a.lineage < b.lineage;
      return a.sighting < b.sighting;
    });
    std::set<std::size_t> used_l, used_s;
    std::vector<std::size_t> next_open;
    for (const auto& p : pairs) {
      if (used_l.count(p.lineage) || used_s.count(p.sighting)) continue;
      used_l.insert(p.lineage);
      used_s.insert(p.sighting);
      auto& lin = lineages[p.lineage];
      if (lin.sightings.back().normalized_template != batch[p.sighting]->normalized_template) ++lin.change_count;
      lin.sightings.push_back(*batch[p.sighting]);
      next_open.push_back(p.lineage);
    }
    for (std::size_t s = 0; s < batch.size(); ++s) {
      if (used_s.count(s)) continue;
      StatementLineage lin;
      lin.lineage_id = lineages.size();
      lin.file_key = key;
      lin.sightings.push_back(*batch[s]);
      next_open.push_back(lineages.size());
      lineages.push_back(std::move(lin));
    }
    std::sort(next_open.begin(), next_open.end());
    candidates = std::move(next_open);  // unmatched lineages close here
  }
  return lineages;
}

}  // namespace

std::vector<StatementLineage> track_lineages(const std::vector<StatementSighting>& sightings, double theta) {
  std::vector<Batch> batches;
  for (std::size_t i = 0; i < sightings.size();) {
    Batch b{sightings[i].file_key, {}};
    auto j = i;
    while (j < sightings.size() && sightings[j].commit == sightings[i].commit &&
           sightings[j].file_key == sightings[i].file_key) {
      b.second.push_back(&sightings[j++]);
    }
    batches.push_back(std::move(b));
    i = j;
  }
  return track_batches(batches, theta);
}

std::vector<StatementLineage> track_lineages(const ScanResult& scan, double theta) {
  std::map<std::pair<std::string, std::string>, std::vector<const StatementSighting*>> by_touch;
  for (const auto& s : scan.sightings) by_touch[{s.commit, s.file_key}].push_back(&s);
  std::vector<Batch> batches;
  for (const auto& t : scan.touches) {
    auto it = by_touch.find({t.commit, t.file_key});
    batches.push_back({t.file_key, it == by_touch.end() ? std::vector<const StatementSighting*>{} : it->second});
  }
  return track_batches(batches, theta);
}

FrequencyDistribution frequency_report(const std::vector<StatementLineage>& lineages) {
  FrequencyDistribution d;
  d.lineage_count = lineages.size();
  std::size_t one = 0, two = 0, more = 0;
  for (const auto& l : lineages) {
    if (l.change_count == 1) ++one;
    else if (l.change_count == 2) ++two;
    else if (l.change_count >= 3) ++more;
  }
  d.modified_count = one + two + more;
  if (d.lineage_count) d.modified_share = static_cast<double>(d.modified_count) / static_cast<double>(d.lineage_count);
  if (d.modified_count) {
    auto pct = [&](std::size_t n) { return 100.0 * static_cast<double>(n) / static_cast<double>(d.modified_count); };
    d.buckets = {{"1", pct(one)}, {"2", pct(two)}, {">=3", pct(more)}};
  }
  return d;
}

json ProjectReport::to_json() const {
  return {{"project", project},
          {"commit_count", commit_count},
          {"sighting_count", sighting_count},
          {"lineage_count", distribution.lineage_count},
          {"modified_count", distribution.modified_count},
          {"modified_share", distribution.modified_share},
          {"buckets", distribution.buckets},
          {"bucket_scheme", "1, 2, >=3 changes"},
          {"theta", theta}};
}

std::string ProjectReport::lineages_csv() const {
  auto quote = [](const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
      if (c == '"') out += '"';
      out += c;
    }
    return out + "\"";
  };
  std::string out = "lineage_id,file,first_commit,last_commit,sightings,change_count,first_line,template\n";
  for (const auto& l : lineages) {
    const auto& first = l.sightings.front();
    const auto& last = l.sightings.back();
    out += std::to_string(l.lineage_id) + "," + quote(last.path) + "," + first.commit + "," + last.commit + "," +
           std::to_string(l.sightings.size()) + "," + std::to_string(l.change_count) + "," +
           std::to_string(first.line) + "," + quote(last.normalized_template) + "\n";
  }
  return out;
}

ProjectReport mine(const fs::path& repo, const MinerConfig& cfg) {
  ProjectReport r;
  auto abs = fs::absolute(repo).lexically_normal();
  r.project = abs.filename().empty() ? abs.parent_path().filename().string() : abs.filename().string();
  r.theta = cfg.theta;
  auto scan = scan_repository(repo, cfg);
  r.commit_count = scan.commit_count;
  r.sighting_count = scan.sightings.size();
  r.lineages = track_lineages(scan, cfg.theta);
  r.distribution = frequency_report(r.lineages);
  return r;
}

}  // namespace relog::miner
