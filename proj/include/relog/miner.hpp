#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "relog/core.hpp"

namespace relog::miner {

class RepoUnreadable : public Error {
public:
  using Error::Error;
};

struct ApiPattern {
  /// Regex matching the call prefix up to and including the opening paren.
  std::string regex;
};

struct MinerConfig {
  std::vector<ApiPattern> patterns = default_patterns();
  double theta = 0.7;
  /// File extensions scanned; empty means every file.
  std::vector<std::string> extensions = {".java", ".scala", ".kt", ".c", ".cc", ".cpp", ".cxx", ".h", ".hpp",
                                         ".py",   ".js",    ".ts", ".go"};
  bool follow_renames = true;

  static std::vector<ApiPattern> default_patterns();
};

struct StatementSighting {
  std::string commit;
  std::string path;
  /// Stable per-file identity; follows renames.
  std::string file_key;
  std::size_t line = 0;
  std::string api_name;
  std::string normalized_template;
};

struct StatementLineage {
  std::size_t lineage_id = 0;
  std::string file_key;
  std::vector<StatementSighting> sightings;
  std::size_t change_count = 0;
};

struct FrequencyDistribution {
  std::size_t lineage_count = 0;
  std::size_t modified_count = 0;
  double modified_share = 0;
  /// Percentages over modified lineages, keys "1", "2", ">=3". Empty when
  /// nothing was modified.
  std::map<std::string, double> buckets;
};

/// Logging calls found in one file's text. Comments are ignored; a call
/// spanning several lines is one statement, reported at its first line.
std::vector<StatementSighting> extract_statements(std::string_view text, const MinerConfig& cfg);

/// Whitespace-collapsed call text with string literals kept verbatim.
std::string normalize_call(std::string_view call);

/// Word tokens of a normalized template (identifiers, numbers and words
/// inside literals); punctuation is dropped.
std::vector<std::string> word_tokens(std::string_view normalized);

double token_jaccard(std::string_view a, std::string_view b);

/// A commit touching a scanned file. Deleted or emptied files close the
/// lineages open in them.
struct FileTouch {
  std::string commit;
  std::string path;
  std::string file_key;
};

struct ScanResult {
  std::vector<StatementSighting> sightings;
  std::vector<FileTouch> touches;
  std::size_t commit_count = 0;
};

/// Walks first-parent history oldest first. Throws RepoUnreadable.
ScanResult scan_repository(const std::filesystem::path& repo, const MinerConfig& cfg);

/// Groups sightings by (commit, file_key) in order of appearance; each group
/// is matched against the lineages left open by the previous group of the
/// same file.
std::vector<StatementLineage> track_lineages(const std::vector<StatementSighting>& sightings, double theta);
/// Same, with touches that carry no sightings closing lineages too.
std::vector<StatementLineage> track_lineages(const ScanResult& scan, double theta);

FrequencyDistribution frequency_report(const std::vector<StatementLineage>& lineages);

struct ProjectReport {
  std::string project;
  std::size_t commit_count = 0;
  std::size_t sighting_count = 0;
  double theta = 0.7;
  FrequencyDistribution distribution;
  std::vector<StatementLineage> lineages;

  nlohmann::json to_json() const;
  std::string lineages_csv() const;
};

ProjectReport mine(const std::filesystem::path& repo, const MinerConfig& cfg);

}  // namespace relog::miner
