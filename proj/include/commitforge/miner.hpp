#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace commitforge::miner {

enum class Language { c, cpp, java, python, go, javascript, typescript, other };

std::string_view to_string(Language lang);
Language language_from_string(std::string_view s);

/// Extension-based detection (c/h -> C; cc/cpp/hpp/cxx -> C++; java; py;
/// go; js/jsx/mjs -> JavaScript; ts/tsx -> TypeScript); anything else is other.
Language detect_language(const std::string& path);

bool is_supported_language(Language lang);

struct FileModification {
    std::optional<std::string> path_before;
    std::optional<std::string> path_after;
    Language language = Language::other;
    std::string unified_diff;
    long added_lines = 0;
    long deleted_lines = 0;
    std::optional<std::string> content_before;
    std::optional<std::string> content_after;
};

struct RawCommit {
    std::string repo_id;
    std::string hash; // 40-hex
    std::string author_name;
    std::string author_email;
    std::int64_t timestamp = 0; // seconds since epoch, UTC
    std::string message;
    std::vector<FileModification> modifications;
    std::vector<std::string> linked_refs;
};

struct MinerWarning {
    std::string hash;
    std::string what;
};

struct MineOptions {
    std::string repo_id;
    std::int64_t since = 0; // author timestamp lower bound, inclusive
    std::size_t content_byte_cap = 1 << 20;
    bool keep_contents = true; // full file texts for supported languages
};

/// Walks every non-merge commit authored on/after `since`, newest first.
/// Throws std::runtime_error when repo_path is not a git repository; per-commit
/// corruption is skipped and reported through `warnings`.
std::vector<RawCommit> walk_history(const std::string& repo_path, const MineOptions& opts,
                                    std::vector<MinerWarning>* warnings = nullptr);

/// All `#<digits>` tokens plus Closes/Fixes/Refs footer values, deduplicated,
/// original order.
std::vector<std::string> extract_linked_refs(const std::string& message);

/// Counts '+' / '-' body lines of a unified diff (file headers excluded).
std::pair<long, long> count_diff_lines(std::string_view unified_diff);

// --- repository discovery --------------------------------------------------

struct RepoCriteria {
    std::vector<std::string> license_allowlist = {"Apache-2.0", "MIT", "BSD-3-Clause"};
    long min_forks = 10;
    double max_avg_daily_commits = 10.0;
    int min_age_years = 2;
    int max_age_years = 10;
    std::string earliest_commit_date = "2020-01-01";
    std::string ccs_marker = "conventionalcommits.org";
};

struct RepoDescriptor {
    std::string id;
    std::string license;
    long forks = 0;
    std::string created_at;         // ISO date
    std::string latest_commit_date; // ISO date
    double avg_daily_commits = 0.0;
    std::vector<std::string> doc_files; // README/CONTRIBUTING contents
    std::map<std::string, bool> criteria_passed;
};

class ForgeClient {
  public:
    virtual ~ForgeClient() = default;
    /// Throws std::runtime_error("forge-unreachable") or
    /// std::runtime_error("rate-limited: retry-after=N") on transport failure.
    virtual std::vector<RepoDescriptor> list_repos() = 0;
};

/// Fixture-backed client reading a JSON array of descriptors from a file.
class FixtureForgeClient : public ForgeClient {
  public:
    explicit FixtureForgeClient(std::string path) : path_(std::move(path)) {}
    std::vector<RepoDescriptor> list_repos() override;

  private:
    std::string path_;
};

/// HTTPS+JSON client: GET <base_url>/repos with a bearer token taken from
/// COMMITFORGE_FORGE_TOKEN.
class HttpForgeClient : public ForgeClient {
  public:
    explicit HttpForgeClient(std::string base_url) : base_url_(std::move(base_url)) {}
    std::vector<RepoDescriptor> list_repos() override;

  private:
    std::string base_url_;
};

/// Repositories whose docs contain criteria.ccs_marker and which satisfy all
/// thresholds; every returned descriptor records which criteria passed.
/// `today` is an ISO date used for age computation (injectable for tests).
std::vector<RepoDescriptor> discover_repos(const RepoCriteria& criteria, ForgeClient& forge,
                                           const std::string& today);

// --- time helpers ----------------------------------------------------------

/// Parses "YYYY-MM-DD" or ISO-8601 "YYYY-MM-DDTHH:MM:SS[+-HH:MM|Z]" into UTC
/// epoch seconds. Throws std::invalid_argument on malformed input.
std::int64_t parse_iso_instant(const std::string& s);

std::string format_iso_utc(std::int64_t epoch_seconds);

} // namespace commitforge::miner
