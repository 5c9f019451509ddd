#include "commitforge/miner.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "commitforge/text.hpp"

namespace commitforge::miner {

namespace {

struct CmdResult {
    int status = -1;
    std::string out;
};

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (char c : s) {
        if (c == '\'') out += "'\\''";
        else out += c;
    }
    out += "'";
    return out;
}

CmdResult run_cmd(const std::string& cmd) {
    CmdResult res;
    FILE* pipe = popen((cmd + " 2>/dev/null").c_str(), "r");
    if (!pipe) return res;
    char buf[8192];
    std::size_t n;
    while ((n = fread(buf, 1, sizeof(buf), pipe)) > 0) res.out.append(buf, n);
    res.status = pclose(pipe);
    return res;
}

CmdResult run_git(const std::string& repo, const std::string& args) {
    return run_cmd("git -C " + shell_quote(repo) + " " + args);
}

// Extracts the two paths from a "diff --git a/X b/Y" header.
std::pair<std::string, std::string> parse_diff_header(const std::string& line) {
    std::string rest = line.substr(std::strlen("diff --git "));
    std::size_t sep = rest.find(" b/");
    if (sep == std::string::npos || rest.rfind("a/", 0) != 0) return {"", ""};
    return {rest.substr(2, sep - 2), rest.substr(sep + 3)};
}

struct ParsedFileDiff {
    std::optional<std::string> path_before;
    std::optional<std::string> path_after;
    std::string unified_diff;
};

std::vector<ParsedFileDiff> parse_patch(const std::string& patch) {
    std::vector<ParsedFileDiff> files;
    auto lines = text::split_lines(patch);
    ParsedFileDiff* cur = nullptr;
    std::string a_path, b_path;
    bool new_file = false, deleted_file = false;
    std::optional<std::string> rename_from, rename_to;

    auto finish = [&]() {
        if (!cur) return;
        if (rename_from) a_path = *rename_from;
        if (rename_to) b_path = *rename_to;
        cur->path_before = deleted_file || !new_file ? std::optional<std::string>(a_path)
                                                     : std::nullopt;
        if (new_file) cur->path_before = std::nullopt;
        cur->path_after = deleted_file ? std::nullopt : std::optional<std::string>(b_path);
        cur = nullptr;
    };

    for (const auto& line : lines) {
        if (line.rfind("diff --git ", 0) == 0) {
            finish();
            files.emplace_back();
            cur = &files.back();
            std::tie(a_path, b_path) = parse_diff_header(line);
            new_file = deleted_file = false;
            rename_from.reset();
            rename_to.reset();
            continue;
        }
        if (!cur) continue;
        if (line.rfind("new file mode", 0) == 0) new_file = true;
        else if (line.rfind("deleted file mode", 0) == 0) deleted_file = true;
        else if (line.rfind("rename from ", 0) == 0) rename_from = line.substr(12);
        else if (line.rfind("rename to ", 0) == 0) rename_to = line.substr(10);
        else if (line.rfind("--- ", 0) == 0 || line.rfind("+++ ", 0) == 0 ||
                 line.rfind("@@", 0) == 0 || !cur->unified_diff.empty() ||
                 line.rfind("Binary files", 0) == 0) {
            if (line.rfind("--- ", 0) == 0 || line.rfind("+++ ", 0) == 0 ||
                line.rfind("@@", 0) == 0 || !cur->unified_diff.empty()) {
                cur->unified_diff += line;
                cur->unified_diff += '\n';
            }
        }
    }
    finish();
    return files;
}

} // namespace

std::string_view to_string(Language lang) {
    switch (lang) {
    case Language::c: return "c";
    case Language::cpp: return "cpp";
    case Language::java: return "java";
    case Language::python: return "python";
    case Language::go: return "go";
    case Language::javascript: return "javascript";
    case Language::typescript: return "typescript";
    case Language::other: return "other";
    }
    return "other";
}

Language language_from_string(std::string_view s) {
    if (s == "c") return Language::c;
    if (s == "cpp" || s == "c++") return Language::cpp;
    if (s == "java") return Language::java;
    if (s == "python") return Language::python;
    if (s == "go") return Language::go;
    if (s == "javascript") return Language::javascript;
    if (s == "typescript") return Language::typescript;
    return Language::other;
}

Language detect_language(const std::string& path) {
    std::size_t dot = path.rfind('.');
    if (dot == std::string::npos) return Language::other;
    std::string ext = text::to_lower(path.substr(dot + 1));
    if (ext == "c" || ext == "h") return Language::c;
    if (ext == "cc" || ext == "cpp" || ext == "hpp" || ext == "cxx") return Language::cpp;
    if (ext == "java") return Language::java;
    if (ext == "py") return Language::python;
    if (ext == "go") return Language::go;
    if (ext == "js" || ext == "jsx" || ext == "mjs") return Language::javascript;
    if (ext == "ts" || ext == "tsx") return Language::typescript;
    return Language::other;
}

bool is_supported_language(Language lang) { return lang != Language::other; }

std::pair<long, long> count_diff_lines(std::string_view unified_diff) {
    long added = 0, deleted = 0;
    for (const auto& line : text::split_lines(unified_diff)) {
        if (line.rfind("+++", 0) == 0 || line.rfind("---", 0) == 0) continue;
        if (!line.empty() && line[0] == '+') ++added;
        else if (!line.empty() && line[0] == '-') ++deleted;
    }
    return {added, deleted};
}

std::vector<std::string> extract_linked_refs(const std::string& message) {
    std::vector<std::string> refs;
    std::set<std::string> seen;
    auto add = [&](const std::string& r) {
        if (seen.insert(r).second) refs.push_back(r);
    };
    for (std::size_t i = 0; i < message.size(); ++i) {
        if (message[i] == '#' && i + 1 < message.size() &&
            std::isdigit(static_cast<unsigned char>(message[i + 1]))) {
            std::size_t j = i + 1;
            while (j < message.size() && std::isdigit(static_cast<unsigned char>(message[j])))
                ++j;
            add(message.substr(i, j - i));
            i = j - 1;
        }
    }
    for (const auto& raw_line : text::split_lines(message)) {
        std::string line = text::trim(raw_line);
        for (const char* kw : {"Closes", "Fixes", "Refs"}) {
            std::string low = text::to_lower(line);
            std::string kwl = text::to_lower(kw);
            if (low.rfind(kwl, 0) != 0) continue;
            std::string rest = text::trim(line.substr(std::strlen(kw)));
            if (!rest.empty() && rest[0] == ':') rest = text::trim(rest.substr(1));
            if (rest.empty()) continue;
            std::size_t sp = rest.find_first_of(" \t");
            add(sp == std::string::npos ? rest : rest.substr(0, sp));
        }
    }
    return refs;
}

std::vector<RawCommit> walk_history(const std::string& repo_path, const MineOptions& opts,
                                    std::vector<MinerWarning>* warnings) {
    auto check = run_git(repo_path, "rev-parse --git-dir");
    if (check.status != 0)
        throw std::runtime_error("repository-not-found: " + repo_path);

    auto log = run_git(repo_path,
                       "log --no-merges --date-order "
                       "--pretty=format:%x1e%H%x1f%an%x1f%ae%x1f%at%x1f%B");
    std::vector<RawCommit> commits;
    std::size_t pos = 0;
    while (pos < log.out.size()) {
        if (log.out[pos] != '\x1e') {
            ++pos;
            continue;
        }
        std::size_t end = log.out.find('\x1e', pos + 1);
        std::string record = log.out.substr(pos + 1, end == std::string::npos
                                                         ? std::string::npos
                                                         : end - pos - 1);
        pos = end == std::string::npos ? log.out.size() : end;

        std::vector<std::string> fields;
        std::size_t start = 0;
        for (int i = 0; i < 4; ++i) {
            std::size_t sep = record.find('\x1f', start);
            if (sep == std::string::npos) break;
            fields.push_back(record.substr(start, sep - start));
            start = sep + 1;
        }
        if (fields.size() != 4) continue;
        std::string message = record.substr(start);
        while (!message.empty() && (message.back() == '\n' || message.back() == '\r'))
            message.pop_back();

        RawCommit commit;
        commit.repo_id = opts.repo_id.empty() ? repo_path : opts.repo_id;
        commit.hash = fields[0];
        commit.author_name = fields[1];
        commit.author_email = fields[2];
        commit.timestamp = std::stoll(fields[3]);
        commit.message = message;
        if (commit.timestamp < opts.since) continue;
        commit.linked_refs = extract_linked_refs(commit.message);

        auto patch = run_git(repo_path, "show " + commit.hash +
                                            " --format= --patch -M --unified=3 --no-color");
        if (patch.status != 0) {
            if (warnings)
                warnings->push_back({commit.hash, "corrupt-object: git show failed"});
            continue;
        }
        for (auto& fd : parse_patch(patch.out)) {
            FileModification mod;
            mod.path_before = fd.path_before;
            mod.path_after = fd.path_after;
            mod.unified_diff = std::move(fd.unified_diff);
            std::tie(mod.added_lines, mod.deleted_lines) = count_diff_lines(mod.unified_diff);
            const std::string& lang_path =
                mod.path_after ? *mod.path_after : mod.path_before.value_or("");
            mod.language = detect_language(lang_path);

            if (opts.keep_contents && is_supported_language(mod.language)) {
                if (mod.path_after) {
                    auto c = run_git(repo_path,
                                     "show " + commit.hash + ":" + shell_quote(*mod.path_after));
                    if (c.status == 0 && c.out.size() <= opts.content_byte_cap)
                        mod.content_after = std::move(c.out);
                }
                if (mod.path_before) {
                    auto c = run_git(repo_path, "show " + commit.hash + "^:" +
                                                    shell_quote(*mod.path_before));
                    if (c.status == 0 && c.out.size() <= opts.content_byte_cap)
                        mod.content_before = std::move(c.out);
                }
            }
            commit.modifications.push_back(std::move(mod));
        }
        commits.push_back(std::move(commit));
    }
    return commits;
}

// --- discovery --------------------------------------------------------------

namespace {

RepoDescriptor descriptor_from_json(const nlohmann::json& j) {
    RepoDescriptor d;
    d.id = j.value("id", "");
    d.license = j.value("license", "");
    d.forks = j.value("forks", 0L);
    d.created_at = j.value("created_at", "");
    d.latest_commit_date = j.value("latest_commit_date", "");
    d.avg_daily_commits = j.value("avg_daily_commits", 0.0);
    if (j.contains("doc_files"))
        for (const auto& doc : j["doc_files"]) d.doc_files.push_back(doc.get<std::string>());
    return d;
}

} // namespace

std::vector<RepoDescriptor> FixtureForgeClient::list_repos() {
    std::ifstream in(path_);
    if (!in) throw std::runtime_error("forge-unreachable: cannot open " + path_);
    nlohmann::json j;
    in >> j;
    std::vector<RepoDescriptor> out;
    for (const auto& item : j) out.push_back(descriptor_from_json(item));
    return out;
}

std::vector<RepoDescriptor> discover_repos(const RepoCriteria& criteria, ForgeClient& forge,
                                           const std::string& today) {
    std::int64_t now = parse_iso_instant(today);
    std::int64_t window_start = parse_iso_instant(criteria.earliest_commit_date);
    std::vector<RepoDescriptor> selected;
    for (auto d : forge.list_repos()) {
        bool license_ok = std::find(criteria.license_allowlist.begin(),
                                    criteria.license_allowlist.end(),
                                    d.license) != criteria.license_allowlist.end();
        bool forks_ok = d.forks >= criteria.min_forks;
        bool activity_ok = d.avg_daily_commits < criteria.max_avg_daily_commits;
        double age_years =
            double(now - parse_iso_instant(d.created_at)) / (365.25 * 86400.0);
        bool age_ok = age_years >= criteria.min_age_years && age_years <= criteria.max_age_years;
        bool window_ok = parse_iso_instant(d.latest_commit_date) >= window_start;
        bool marker_ok = false;
        for (const auto& doc : d.doc_files) {
            if (text::contains_ci(doc, criteria.ccs_marker)) {
                marker_ok = true;
                break;
            }
        }
        d.criteria_passed = {{"license", license_ok}, {"forks", forks_ok},
                             {"activity", activity_ok}, {"age", age_ok},
                             {"window", window_ok},   {"ccs_marker", marker_ok}};
        if (license_ok && forks_ok && activity_ok && age_ok && window_ok && marker_ok)
            selected.push_back(std::move(d));
    }
    return selected;
}

// --- time helpers -----------------------------------------------------------

namespace {

// Days since 1970-01-01 for a proleptic Gregorian date.
std::int64_t days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    unsigned yoe = static_cast<unsigned>(y - era * 400);
    unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, int& y, int& m, int& d) {
    z += 719468;
    std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    unsigned doe = static_cast<unsigned>(z - era * 146097);
    unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    int yr = static_cast<int>(yoe) + static_cast<int>(era) * 400;
    unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    unsigned mp = (5 * doy + 2) / 153;
    d = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    m = static_cast<int>(mp + (mp < 10 ? 3 : -9));
    y = yr + (m <= 2);
}

} // namespace

std::int64_t parse_iso_instant(const std::string& s) {
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, se = 0;
    int consumed = 0;
    if (std::sscanf(s.c_str(), "%4d-%2d-%2d%n", &y, &mo, &d, &consumed) != 3)
        throw std::invalid_argument("bad ISO date: " + s);
    std::int64_t t = days_from_civil(y, mo, d) * 86400;
    std::string rest = s.substr(consumed);
    if (rest.empty()) return t;
    if (rest[0] != 'T' && rest[0] != ' ')
        throw std::invalid_argument("bad ISO instant: " + s);
    int c2 = 0;
    if (std::sscanf(rest.c_str() + 1, "%2d:%2d:%2d%n", &h, &mi, &se, &c2) != 3)
        throw std::invalid_argument("bad ISO time: " + s);
    t += h * 3600 + mi * 60 + se;
    std::string zone = rest.substr(1 + c2);
    if (zone.empty() || zone == "Z") return t;
    int zh = 0, zm = 0;
    char sign;
    if (std::sscanf(zone.c_str(), "%c%2d:%2d", &sign, &zh, &zm) < 2 ||
        (sign != '+' && sign != '-'))
        throw std::invalid_argument("bad ISO zone: " + s);
    std::int64_t offset = zh * 3600 + zm * 60;
    return sign == '+' ? t - offset : t + offset;
}

std::string format_iso_utc(std::int64_t epoch_seconds) {
    std::int64_t days = epoch_seconds >= 0 ? epoch_seconds / 86400
                                           : (epoch_seconds - 86399) / 86400;
    std::int64_t rem = epoch_seconds - days * 86400;
    int y, m, d;
    civil_from_days(days, y, m, d);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02dT%02lld:%02lld:%02lldZ", y, m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>((rem / 60) % 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

} // namespace commitforge::miner
