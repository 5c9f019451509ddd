#include "commitforge/datastore.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <stdexcept>

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include "commitforge/text.hpp"

namespace commitforge::datastore {

using nlohmann::json;

std::string_view to_string(ComplianceTier t) {
    return t == ComplianceTier::strict ? "strict" : "partial";
}

ComplianceTier compliance_tier_from_string(std::string_view s) {
    if (s == "strict") return ComplianceTier::strict;
    if (s == "partial") return ComplianceTier::partial;
    throw std::invalid_argument("unknown compliance tier: " + std::string(s));
}

std::string projected_message(const AnnotatedCommit& commit) {
    return std::string(ccs::to_string(commit.ccs.type)) + ": " + commit.ccs.description;
}

miner::Language commit_language(const AnnotatedCommit& commit) {
    for (const auto& mod : commit.raw.modifications)
        if (miner::is_supported_language(mod.language)) return mod.language;
    return miner::Language::other;
}

std::string language_group(miner::Language lang) {
    using miner::Language;
    switch (lang) {
    case Language::c:
    case Language::cpp: return "c_cpp";
    default: return std::string(miner::to_string(lang));
    }
}

namespace {

json modification_to_json(const miner::FileModification& m) {
    json j;
    if (m.path_before) j["path_before"] = *m.path_before;
    if (m.path_after) j["path_after"] = *m.path_after;
    j["language"] = miner::to_string(m.language);
    j["unified_diff"] = m.unified_diff;
    j["added_lines"] = m.added_lines;
    j["deleted_lines"] = m.deleted_lines;
    if (m.content_before) j["content_before"] = *m.content_before;
    if (m.content_after) j["content_after"] = *m.content_after;
    return j;
}

miner::FileModification modification_from_json(const json& j) {
    miner::FileModification m;
    if (j.contains("path_before")) m.path_before = j["path_before"].get<std::string>();
    if (j.contains("path_after")) m.path_after = j["path_after"].get<std::string>();
    m.language = miner::language_from_string(j.at("language").get<std::string>());
    m.unified_diff = j.at("unified_diff").get<std::string>();
    m.added_lines = j.at("added_lines").get<long>();
    m.deleted_lines = j.at("deleted_lines").get<long>();
    if (j.contains("content_before")) m.content_before = j["content_before"].get<std::string>();
    if (j.contains("content_after")) m.content_after = j["content_after"].get<std::string>();
    return m;
}

json ccs_to_json(const ccs::CcsMessage& m) {
    json j;
    j["type"] = ccs::to_string(m.type);
    if (m.scope) j["scope"] = *m.scope;
    j["breaking"] = m.breaking;
    j["description"] = m.description;
    if (m.body) j["body"] = *m.body;
    json footers = json::array();
    for (const auto& [token, value] : m.footers)
        footers.push_back({{"token", token}, {"value", value}});
    j["footers"] = footers;
    return j;
}

ccs::CcsMessage ccs_from_json(const json& j) {
    ccs::CcsMessage m;
    auto type = ccs::type_from_string(j.at("type").get<std::string>());
    if (!type) throw std::runtime_error("unknown ccs type: " + j.at("type").dump());
    m.type = *type;
    if (j.contains("scope")) m.scope = j["scope"].get<std::string>();
    m.breaking = j.at("breaking").get<bool>();
    m.description = j.at("description").get<std::string>();
    if (j.contains("body")) m.body = j["body"].get<std::string>();
    for (const auto& f : j.at("footers"))
        m.footers.emplace_back(f.at("token").get<std::string>(),
                               f.at("value").get<std::string>());
    return m;
}

json change_to_json(const ast::StructuralChange& c) {
    json j;
    j["file_path"] = c.file_path;
    j["language"] = miner::to_string(c.language);
    j["kind"] = ast::to_string(c.kind);
    j["qualified_name"] = c.qualified_name;
    j["change"] = ast::to_string(c.change);
    if (c.span_before) j["span_before"] = {c.span_before->first, c.span_before->second};
    if (c.span_after) j["span_after"] = {c.span_after->first, c.span_after->second};
    return j;
}

ast::StructuralChange change_from_json(const json& j) {
    ast::StructuralChange c;
    c.file_path = j.at("file_path").get<std::string>();
    c.language = miner::language_from_string(j.at("language").get<std::string>());
    auto kind = ast::structure_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw std::runtime_error("unknown structure kind: " + j.at("kind").dump());
    c.kind = *kind;
    c.qualified_name = j.at("qualified_name").get<std::string>();
    std::string ch = j.at("change").get<std::string>();
    if (ch == "added") c.change = ast::ChangeKind::added;
    else if (ch == "deleted") c.change = ast::ChangeKind::deleted;
    else if (ch == "modified") c.change = ast::ChangeKind::modified;
    else throw std::runtime_error("unknown change kind: " + ch);
    if (j.contains("span_before"))
        c.span_before = {j["span_before"][0].get<int>(), j["span_before"][1].get<int>()};
    if (j.contains("span_after"))
        c.span_after = {j["span_after"][0].get<int>(), j["span_after"][1].get<int>()};
    return c;
}

json hunk_context_to_json(const ast::HunkContext& h) {
    json j;
    j["hunk"] = {{"old_start", h.hunk.old_start},
                 {"old_len", h.hunk.old_len},
                 {"new_start", h.hunk.new_start},
                 {"new_len", h.hunk.new_len}};
    json chain = json::array();
    for (const auto& [kind, name] : h.enclosing_chain)
        chain.push_back({{"kind", ast::to_string(kind)}, {"name", name}});
    j["enclosing_chain"] = chain;
    j["orphan"] = h.orphan;
    return j;
}

ast::HunkContext hunk_context_from_json(const json& j) {
    ast::HunkContext h;
    const json& hk = j.at("hunk");
    h.hunk = {hk.at("old_start").get<int>(), hk.at("old_len").get<int>(),
              hk.at("new_start").get<int>(), hk.at("new_len").get<int>()};
    for (const auto& link : j.at("enclosing_chain")) {
        auto kind = ast::structure_kind_from_string(link.at("kind").get<std::string>());
        if (!kind) throw std::runtime_error("unknown structure kind in chain");
        h.enclosing_chain.emplace_back(*kind, link.at("name").get<std::string>());
    }
    h.orphan = j.at("orphan").get<bool>();
    return h;
}

json provenance_to_json(const filter::FilterProvenance& p) {
    json stages = json::array();
    for (const auto& s : p.stage_results)
        stages.push_back({{"stage", s.stage}, {"pass", s.pass}, {"reason", s.reason}});
    return {{"stage_results", stages}, {"kept", p.kept}};
}

filter::FilterProvenance provenance_from_json(const json& j) {
    filter::FilterProvenance p;
    for (const auto& s : j.at("stage_results"))
        p.stage_results.push_back({s.at("stage").get<std::string>(), s.at("pass").get<bool>(),
                                   s.at("reason").get<std::string>()});
    p.kept = j.at("kept").get<bool>();
    return p;
}

struct FileLock {
    int fd = -1;
    FileLock(const std::string& path, int operation, bool create) {
        fd = ::open(path.c_str(), create ? (O_RDWR | O_CREAT) : O_RDONLY, 0644);
        if (fd >= 0) ::flock(fd, operation);
    }
    ~FileLock() {
        if (fd >= 0) {
            ::flock(fd, LOCK_UN);
            ::close(fd);
        }
    }
};

std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t n) {
    // Rejection sampling keeps the draw unbiased and, unlike the standard
    // distribution objects, identical on every platform.
    std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() / n * n;
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % n;
}

using Key = std::pair<std::string, std::string>;

struct Eligible {
    Key key;
    std::int64_t timestamp;
};

std::vector<Key> pick(std::vector<Eligible> pool, std::size_t count, std::mt19937_64& rng) {
    std::sort(pool.begin(), pool.end(), [](const Eligible& a, const Eligible& b) {
        return std::tie(a.key.first, a.timestamp, a.key.second) <
               std::tie(b.key.first, b.timestamp, b.key.second);
    });
    std::vector<Key> out;
    out.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t j = i + uniform_below(rng, pool.size() - i);
        std::swap(pool[i], pool[j]);
        out.push_back(pool[i].key);
    }
    return out;
}

double quantile_sorted(const std::vector<double>& sorted, double p) {
    double h = double(sorted.size() - 1) * p;
    std::size_t lo = static_cast<std::size_t>(std::floor(h));
    std::size_t hi = static_cast<std::size_t>(std::ceil(h));
    return sorted[lo] + (h - double(lo)) * (sorted[hi] - sorted[lo]);
}

} // namespace

json commit_to_json(const AnnotatedCommit& commit) {
    json j;
    j["repo_id"] = commit.raw.repo_id;
    j["hash"] = commit.raw.hash;
    j["author_name"] = commit.raw.author_name;
    j["author_email"] = commit.raw.author_email;
    j["timestamp"] = commit.raw.timestamp;
    j["message"] = commit.raw.message;
    json mods = json::array();
    for (const auto& m : commit.raw.modifications) mods.push_back(modification_to_json(m));
    j["modifications"] = mods;
    j["linked_refs"] = commit.raw.linked_refs;
    j["ccs"] = ccs_to_json(commit.ccs);
    json changes = json::array();
    for (const auto& c : commit.ast_changes) changes.push_back(change_to_json(c));
    j["ast_changes"] = changes;
    json hunks = json::array();
    for (const auto& h : commit.hunk_contexts) hunks.push_back(hunk_context_to_json(h));
    j["hunk_contexts"] = hunks;
    j["what_why"] = {{"has_what", commit.what_why.has_what},
                     {"has_why", commit.what_why.has_why}};
    j["provenance"] = provenance_to_json(commit.provenance);
    j["compliance_tier"] = to_string(commit.compliance_tier);
    j["label_verified"] = commit.label_verified;
    return j;
}

AnnotatedCommit commit_from_json(const json& j) {
    AnnotatedCommit c;
    c.raw.repo_id = j.at("repo_id").get<std::string>();
    c.raw.hash = j.at("hash").get<std::string>();
    c.raw.author_name = j.at("author_name").get<std::string>();
    c.raw.author_email = j.at("author_email").get<std::string>();
    c.raw.timestamp = j.at("timestamp").get<std::int64_t>();
    c.raw.message = j.at("message").get<std::string>();
    for (const auto& m : j.at("modifications"))
        c.raw.modifications.push_back(modification_from_json(m));
    c.raw.linked_refs = j.at("linked_refs").get<std::vector<std::string>>();
    c.ccs = ccs_from_json(j.at("ccs"));
    for (const auto& ch : j.at("ast_changes")) c.ast_changes.push_back(change_from_json(ch));
    for (const auto& h : j.at("hunk_contexts"))
        c.hunk_contexts.push_back(hunk_context_from_json(h));
    c.what_why.has_what = j.at("what_why").at("has_what").get<bool>();
    c.what_why.has_why = j.at("what_why").at("has_why").get<bool>();
    c.provenance = provenance_from_json(j.at("provenance"));
    c.compliance_tier = compliance_tier_from_string(j.at("compliance_tier").get<std::string>());
    c.label_verified = j.value("label_verified", false);
    return c;
}

void write_dataset(const std::string& path, const std::vector<AnnotatedCommit>& commits) {
    std::set<Key> keys;
    for (const auto& c : commits) {
        if (!keys.insert({c.raw.repo_id, c.raw.hash}).second)
            throw std::runtime_error("duplicate (repo_id, hash): " + c.raw.repo_id + " " +
                                     c.raw.hash);
    }
    FileLock lock(path, LOCK_EX, /*create=*/true);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << json{{"schema_version", kSchemaVersion}, {"kind", "commitforge-dataset"}}.dump()
        << '\n';
    for (const auto& c : commits) out << commit_to_json(c).dump() << '\n';
    if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<AnnotatedCommit> read_dataset(const std::string& path) {
    FileLock lock(path, LOCK_SH, /*create=*/false);
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::string line;
    long lineno = 0;
    std::vector<AnnotatedCommit> commits;
    std::set<Key> keys;
    while (std::getline(in, line)) {
        ++lineno;
        if (text::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw std::runtime_error(path + ": malformed JSON at line " +
                                     std::to_string(lineno));
        if (lineno == 1) {
            int version = j.value("schema_version", -1);
            if (version != kSchemaVersion)
                throw std::runtime_error(path + ": schema-version mismatch at line 1 (got " +
                                         std::to_string(version) + ", expected " +
                                         std::to_string(kSchemaVersion) + ")");
            continue;
        }
        try {
            auto commit = commit_from_json(j);
            if (!keys.insert({commit.raw.repo_id, commit.raw.hash}).second)
                throw std::runtime_error("duplicate (repo_id, hash)");
            commits.push_back(std::move(commit));
        } catch (const std::exception& e) {
            throw std::runtime_error(path + ": bad record at line " + std::to_string(lineno) +
                                     ": " + e.what());
        }
    }
    return commits;
}

// --- subsets ---------------------------------------------------------------

std::string_view to_string(SubsetId id) {
    switch (id) {
    case SubsetId::D_all: return "D_all";
    case SubsetId::D_cmg: return "D_cmg";
    case SubsetId::D_ten: return "D_ten";
    case SubsetId::D_human: return "D_human";
    case SubsetId::D_ast_cmg: return "D_ast_cmg";
    case SubsetId::D_ast_ten: return "D_ast_ten";
    }
    return "D_all";
}

SubsetId subset_id_from_string(std::string_view s) {
    for (auto id : {SubsetId::D_all, SubsetId::D_cmg, SubsetId::D_ten, SubsetId::D_human,
                    SubsetId::D_ast_cmg, SubsetId::D_ast_ten})
        if (to_string(id) == s) return id;
    throw std::invalid_argument("unknown subset id: " + std::string(s));
}

std::optional<SubsetId> parent_of(SubsetId id) {
    switch (id) {
    case SubsetId::D_all: return std::nullopt;
    case SubsetId::D_cmg: return SubsetId::D_all;
    case SubsetId::D_ten: return SubsetId::D_all;
    case SubsetId::D_human: return SubsetId::D_cmg;
    case SubsetId::D_ast_cmg: return SubsetId::D_cmg;
    case SubsetId::D_ast_ten: return SubsetId::D_ten;
    }
    return std::nullopt;
}

void write_subset(const std::string& path, const DatasetSubset& subset) {
    json members = json::array();
    for (const auto& [repo, hash] : subset.member_keys)
        members.push_back({{"repo_id", repo}, {"hash", hash}});
    json j = {{"schema_version", kSchemaVersion},
              {"kind", "commitforge-subset"},
              {"id", to_string(subset.id)},
              {"seed", subset.seed},
              {"construction_params", subset.construction_params},
              {"member_keys", members}};
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

DatasetSubset read_subset(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    json j = json::parse(in);
    if (j.value("schema_version", -1) != kSchemaVersion)
        throw std::runtime_error(path + ": schema-version mismatch");
    DatasetSubset s;
    s.id = subset_id_from_string(j.at("id").get<std::string>());
    s.seed = j.at("seed").get<std::uint64_t>();
    s.construction_params =
        j.at("construction_params").get<std::map<std::string, std::string>>();
    for (const auto& m : j.at("member_keys"))
        s.member_keys.emplace_back(m.at("repo_id").get<std::string>(),
                                   m.at("hash").get<std::string>());
    return s;
}

void validate_nesting(const DatasetSubset& subset,
                      const std::vector<std::pair<std::string, std::string>>& parent_keys) {
    std::set<Key> parent(parent_keys.begin(), parent_keys.end());
    for (const auto& key : subset.member_keys) {
        if (!parent.count(key))
            throw std::runtime_error(std::string(to_string(subset.id)) +
                                     ": member outside parent subset: " + key.first + " " +
                                     key.second);
    }
}

DatasetSubset sample_ten_eval(const std::vector<AnnotatedCommit>& dataset, int per_class,
                              std::uint64_t seed, bool require_verified) {
    DatasetSubset subset;
    subset.id = SubsetId::D_ten;
    subset.seed = seed;
    subset.construction_params["per_class"] = std::to_string(per_class);
    subset.construction_params["require_verified"] = require_verified ? "true" : "false";
    if (per_class <= 0) return subset;

    std::map<ccs::CommitType, std::vector<Eligible>> by_class;
    for (const auto& c : dataset) {
        if (require_verified && !c.label_verified) continue;
        by_class[c.ccs.type].push_back({{c.raw.repo_id, c.raw.hash}, c.raw.timestamp});
    }
    std::mt19937_64 rng(seed);
    for (auto type : ccs::kAllTypes) {
        auto& pool = by_class[type];
        if (pool.size() < std::size_t(per_class))
            throw std::runtime_error("insufficient-class-population: class " +
                                     std::string(ccs::to_string(type)) + " short by " +
                                     std::to_string(per_class - long(pool.size())));
        for (auto& key : pick(std::move(pool), std::size_t(per_class), rng))
            subset.member_keys.push_back(std::move(key));
    }
    return subset;
}

std::map<std::string, int> default_cmg_quotas() {
    return {{"c_cpp", 180}, {"java", 102},       {"python", 180},
            {"go", 180},    {"javascript", 179}, {"typescript", 179}};
}

DatasetSubset sample_cmg_eval(const std::vector<AnnotatedCommit>& dataset,
                              const std::map<std::string, int>& quotas, std::uint64_t seed) {
    DatasetSubset subset;
    subset.id = SubsetId::D_cmg;
    subset.seed = seed;
    for (const auto& [group, count] : quotas)
        subset.construction_params["quota_" + group] = std::to_string(count);

    std::map<std::string, std::vector<Eligible>> by_group;
    for (const auto& c : dataset) {
        if (c.what_why.state() != "11") continue;
        auto lang = commit_language(c);
        if (!miner::is_supported_language(lang)) continue;
        by_group[language_group(lang)].push_back(
            {{c.raw.repo_id, c.raw.hash}, c.raw.timestamp});
    }
    std::mt19937_64 rng(seed);
    for (const auto& [group, count] : quotas) {
        if (count <= 0) continue;
        auto& pool = by_group[group];
        if (pool.size() < std::size_t(count))
            throw std::runtime_error("insufficient-population: language group " + group +
                                     " short by " + std::to_string(count - long(pool.size())));
        for (auto& key : pick(std::move(pool), std::size_t(count), rng))
            subset.member_keys.push_back(std::move(key));
    }
    return subset;
}

// --- statistics ------------------------------------------------------------

DatasetStats dataset_stats(const std::vector<AnnotatedCommit>& dataset) {
    DatasetStats stats;
    stats.total = long(dataset.size());
    for (auto type : ccs::kAllTypes) stats.type_histogram[std::string(ccs::to_string(type))] = 0;
    for (const char* state : {"00", "01", "10", "11"}) stats.state_counts[state] = 0;

    std::array<std::vector<double>, 5> columns;
    for (const auto& c : dataset) {
        stats.type_histogram[std::string(ccs::to_string(c.ccs.type))]++;
        stats.state_counts[c.what_why.state()]++;
        auto metrics = filter::outlier_metrics(c.raw);
        for (std::size_t i = 0; i < 5; ++i) columns[i].push_back(metrics.get(i));
    }
    for (const auto& [state, count] : stats.state_counts)
        stats.state_shares[state] = stats.total ? double(count) / double(stats.total) : 0.0;

    for (std::size_t i = 0; i < 5; ++i) {
        if (columns[i].empty()) continue;
        std::sort(columns[i].begin(), columns[i].end());
        NumericSummary s;
        s.metric_name = filter::kOutlierMetricNames[i];
        s.min = columns[i].front();
        s.q1 = quantile_sorted(columns[i], 0.25);
        s.median = quantile_sorted(columns[i], 0.5);
        s.q3 = quantile_sorted(columns[i], 0.75);
        s.max = columns[i].back();
        double sum = 0.0;
        for (double v : columns[i]) sum += v;
        s.mean = sum / double(columns[i].size());
        stats.distributions.push_back(std::move(s));
    }
    return stats;
}

json stats_to_json(const DatasetStats& stats) {
    json dists = json::array();
    for (const auto& d : stats.distributions)
        dists.push_back({{"metric", d.metric_name},
                         {"min", d.min},
                         {"q1", d.q1},
                         {"median", d.median},
                         {"q3", d.q3},
                         {"max", d.max},
                         {"mean", d.mean}});
    return {{"total", stats.total},
            {"type_histogram", stats.type_histogram},
            {"what_why_counts", stats.state_counts},
            {"what_why_shares", stats.state_shares},
            {"distributions", dists}};
}

void write_stats_svg(const std::string& path, const DatasetStats& stats) {
    long max_count = 1;
    for (const auto& [type, count] : stats.type_histogram) max_count = std::max(max_count, count);
    const int bar_width = 48, gap = 12, chart_height = 220, left = 40, bottom = 40;
    int width = left + int(stats.type_histogram.size()) * (bar_width + gap) + gap;
    int height = chart_height + bottom + 20;

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
        << height << "\">\n";
    svg << "<text x=\"" << left << "\" y=\"14\" font-size=\"12\">commit type distribution (n="
        << stats.total << ")</text>\n";
    int x = left + gap;
    for (const auto& [type, count] : stats.type_histogram) {
        int h = int(double(count) / double(max_count) * (chart_height - 30));
        int y = 20 + (chart_height - 30) - h;
        svg << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << bar_width
            << "\" height=\"" << h << "\" fill=\"#4878a8\"/>\n";
        svg << "<text x=\"" << x + bar_width / 2 << "\" y=\"" << y - 4
            << "\" font-size=\"10\" text-anchor=\"middle\">" << count << "</text>\n";
        svg << "<text x=\"" << x + bar_width / 2 << "\" y=\"" << chart_height + 8
            << "\" font-size=\"10\" text-anchor=\"middle\">" << type << "</text>\n";
        x += bar_width + gap;
    }
    svg << "</svg>\n";

    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << svg.str();
}

} // namespace commitforge::datastore
