#pragma once

// Scripted git histories with known logging-statement edit counts.
//
// Every statement carries a tag word that is never edited, so a recovered
// lineage maps back to the statement that produced it. An edit changes
// exactly one other token (a message word, the level or the argument), which
// keeps the token Jaccard against the previous version above 0.7; distinct
// statements share only the API tokens.

#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "relog/process.hpp"

namespace relog::testing {

struct ScriptedStatement {
  std::string tag;
  std::vector<std::string> words;  // words[0] == tag
  std::string level = "info";
  std::string arg;
  bool multiline = false;
  bool alive = true;
  std::size_t changes = 0;
};

struct ScriptedFile {
  std::string path;
  /// Line items: statement index (>= 0) or filler (-1 - filler id).
  std::vector<long> items;
  bool alive = true;
};

struct SyntheticHistory {
  std::vector<ScriptedStatement> statements;
  std::vector<ScriptedFile> files;
  std::size_t commits = 0;
  std::size_t renames = 0;
  std::size_t file_deletions = 0;
  std::size_t untouched_commits = 0;

  /// Ground truth: tag -> number of commits that changed the statement.
  std::map<std::string, std::size_t> truth() const {
    std::map<std::string, std::size_t> t;
    for (const auto& s : statements) t[s.tag] = s.changes;
    return t;
  }
};

inline void git_or_throw(const std::filesystem::path& repo, std::vector<std::string> args) {
  ProcessSpec spec;
  spec.argv = {"git", "-C", repo.string(), "-c", "user.name=relog", "-c", "user.email=relog@example.invalid",
               "-c", "commit.gpgsign=false"};
  spec.argv.insert(spec.argv.end(), args.begin(), args.end());
  spec.env = environment_subset({"PATH", "HOME", "LANG", "TMPDIR"});
  spec.env["GIT_CONFIG_NOSYSTEM"] = "1";
  spec.timeout = std::chrono::milliseconds(30000);
  auto r = run_process(spec);
  if (!r.success()) throw std::runtime_error("git " + args.front() + " failed: " + r.err);
}

class HistoryScript {
public:
  HistoryScript(std::filesystem::path repo, unsigned seed) : repo_(std::move(repo)), rng_(seed) {}

  SyntheticHistory generate(std::size_t commits, std::size_t files) {
    std::filesystem::create_directories(repo_);
    git_or_throw(repo_, {"init", "-q"});
    for (std::size_t f = 0; f < files; ++f) {
      ScriptedFile file;
      file.path = "src/Unit" + std::to_string(f) + ".java";
      for (int i = 0; i < 4; ++i) file.items.push_back(new_filler());
      for (int i = 0; i < 3; ++i) insert_random(file, new_statement());
      h_.files.push_back(std::move(file));
    }
    write_all();
    commit("initial");

    while (h_.commits < commits) {
      std::uniform_int_distribution<int> kind(0, 19);
      int k = kind(rng_);
      if (k == 0) {
        // commit touching only a file the miner does not scan
        std::ofstream(repo_ / "NOTES.txt", std::ios::app) << "note " << h_.commits << "\n";
        ++h_.untouched_commits;
        commit("notes");
      } else if (k == 1 && live_files() > 1) {
        auto& f = random_live_file();
        auto old = f.path;
        f.path = "src/moved/Moved" + std::to_string(renamed_++) + ".java";
        std::filesystem::create_directories((repo_ / f.path).parent_path());
        git_or_throw(repo_, {"mv", old, f.path});
        ++h_.renames;
        commit("rename");
      } else if (k == 2 && live_files() > 2) {
        auto& f = random_live_file();
        f.alive = false;
        for (auto item : f.items) {
          if (item >= 0) h_.statements[static_cast<std::size_t>(item)].alive = false;
        }
        git_or_throw(repo_, {"rm", "-q", f.path});
        ++h_.file_deletions;
        commit("delete file");
      } else {
        for (auto& f : h_.files) {
          if (f.alive && coin(0.6)) mutate(f);
        }
        write_all();
        commit("edit");
      }
    }
    return h_;
  }

private:
  bool coin(double p) { return std::bernoulli_distribution(p)(rng_); }

  std::size_t live_files() const {
    std::size_t n = 0;
    for (const auto& f : h_.files) n += f.alive;
    return n;
  }

  ScriptedFile& random_live_file() {
    std::vector<std::size_t> live;
    for (std::size_t i = 0; i < h_.files.size(); ++i) {
      if (h_.files[i].alive) live.push_back(i);
    }
    return h_.files[live[std::uniform_int_distribution<std::size_t>(0, live.size() - 1)(rng_)]];
  }

  std::string fresh_word() { return "w" + std::to_string(word_++) + "x"; }

  long new_filler() { return -1 - static_cast<long>(filler_++); }

  long new_statement() {
    ScriptedStatement s;
    s.tag = "tag" + std::to_string(h_.statements.size()) + "q";
    s.words.push_back(s.tag);
    for (int i = 0; i < 7; ++i) s.words.push_back(fresh_word());
    s.arg = "v" + std::to_string(word_++);
    s.multiline = coin(0.25);
    h_.statements.push_back(s);
    return static_cast<long>(h_.statements.size() - 1);
  }

  void insert_random(ScriptedFile& f, long item) {
    auto pos = std::uniform_int_distribution<std::size_t>(0, f.items.size())(rng_);
    f.items.insert(f.items.begin() + static_cast<long>(pos), item);
  }

  void mutate(ScriptedFile& f) {
    static const char* kLevels[] = {"trace", "debug", "info", "warn", "error"};
    std::vector<long> kept;
    for (auto item : f.items) {
      if (item < 0) {
        if (!coin(0.1)) kept.push_back(item);
        continue;
      }
      auto& s = h_.statements[static_cast<std::size_t>(item)];
      if (coin(0.06)) {
        s.alive = false;
        continue;
      }
      if (coin(0.3)) {
        int what = std::uniform_int_distribution<int>(0, 5)(rng_);
        if (what == 0) {
          std::string lvl;
          do lvl = kLevels[std::uniform_int_distribution<int>(0, 4)(rng_)];
          while (lvl == s.level);
          s.level = lvl;
        } else if (what == 1) {
          s.arg = "v" + std::to_string(word_++);
        } else {
          s.words[std::uniform_int_distribution<std::size_t>(1, s.words.size() - 1)(rng_)] = fresh_word();
        }
        ++s.changes;
      }
      // layout only; normalization hides it
      if (coin(0.1)) s.multiline = !s.multiline;
      kept.push_back(item);
    }
    f.items = std::move(kept);
    if (coin(0.4)) insert_random(f, new_statement());
    if (coin(0.5)) insert_random(f, new_filler());
  }

  std::string render(const ScriptedFile& f) const {
    std::string out = "package demo;\n\nclass Unit {\n";
    out += "  // logger.info(\"commented out, never counted\");\n";
    out += "  void run(int v) {\n";
    out += "    catalog.info(\"not a logging call\");\n";
    for (auto item : f.items) {
      if (item < 0) {
        out += "    int f" + std::to_string(-item) + " = " + std::to_string(-item) + ";\n";
        continue;
      }
      const auto& s = h_.statements[static_cast<std::size_t>(item)];
      std::string msg;
      for (const auto& w : s.words) msg += (msg.empty() ? "" : " ") + w;
      if (s.multiline) {
        out += "    logger." + s.level + "(\n        \"" + msg + " {}\",\n        " + s.arg + ");\n";
      } else {
        out += "    logger." + s.level + "(\"" + msg + " {}\", " + s.arg + ");\n";
      }
    }
    out += "  }\n}\n";
    return out;
  }

  void write_all() {
    for (const auto& f : h_.files) {
      if (!f.alive) continue;
      auto p = repo_ / f.path;
      std::filesystem::create_directories(p.parent_path());
      std::ofstream(p, std::ios::trunc) << render(f);
    }
  }

  void commit(const std::string& msg) {
    git_or_throw(repo_, {"add", "-A"});
    git_or_throw(repo_, {"commit", "-q", "--allow-empty", "-m", msg});
    ++h_.commits;
  }

  std::filesystem::path repo_;
  std::mt19937 rng_;
  SyntheticHistory h_;
  std::size_t word_ = 0;
  std::size_t filler_ = 1;
  std::size_t renamed_ = 0;
};

/// Tag word of a lineage's sightings, or "" if they disagree.
template <class Lineage>
std::string lineage_tag(const Lineage& l) {
  std::string tag;
  for (const auto& s : l.sightings) {
    auto pos = s.normalized_template.find("\"tag");
    if (pos == std::string::npos) return "";
    auto end = s.normalized_template.find(' ', pos);
    auto t = s.normalized_template.substr(pos + 1, end - pos - 1);
    if (!tag.empty() && t != tag) return "";
    tag = t;
  }
  return tag;
}

}  // namespace relog::testing
