#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "commitforge/ast.hpp"
#include "commitforge/ccs.hpp"
#include "commitforge/filter.hpp"
#include "commitforge/judge.hpp"
#include "commitforge/miner.hpp"

#include <json.hpp>

namespace commitforge::datastore {

inline constexpr int kSchemaVersion = 1;

enum class ComplianceTier { strict, partial };

std::string_view to_string(ComplianceTier t);
ComplianceTier compliance_tier_from_string(std::string_view s);

struct AnnotatedCommit {
    miner::RawCommit raw;
    ccs::CcsMessage ccs;
    std::vector<ast::StructuralChange> ast_changes;
    std::vector<ast::HunkContext> hunk_contexts;
    judge::WhatWhyFlags what_why;
    filter::FilterProvenance provenance;
    ComplianceTier compliance_tier = ComplianceTier::strict;
    bool label_verified = false; // human-vetted gold type (modeled, no UI)
};

/// Scope-free projection of the CCS header: "<type>: <description>".
std::string projected_message(const AnnotatedCommit& commit);

/// The single supported language the commit touches (post single-language
/// filter); Language::other when none is found.
miner::Language commit_language(const AnnotatedCommit& commit);

/// Quota grouping: c and cpp share the "c_cpp" bucket.
std::string language_group(miner::Language lang);

nlohmann::json commit_to_json(const AnnotatedCommit& commit);
AnnotatedCommit commit_from_json(const nlohmann::json& j);

/// JSONL: schema-version header line, one commit object per line. Rejects
/// duplicate (repo_id, hash) rows; takes an exclusive advisory lock while
/// writing. Throws std::runtime_error on I/O or duplicate-key failure.
void write_dataset(const std::string& path, const std::vector<AnnotatedCommit>& commits);

/// Throws std::runtime_error naming the offending line number on malformed
/// input or a schema-version mismatch.
std::vector<AnnotatedCommit> read_dataset(const std::string& path);

// --- subsets ---------------------------------------------------------------

enum class SubsetId { D_all, D_cmg, D_ten, D_human, D_ast_cmg, D_ast_ten };

std::string_view to_string(SubsetId id);
SubsetId subset_id_from_string(std::string_view s);

/// Parent in the nesting hierarchy (D_human -> D_cmg; D_cmg, D_ten -> D_all;
/// D_ast_cmg -> D_cmg; D_ast_ten -> D_ten); D_all has no parent.
std::optional<SubsetId> parent_of(SubsetId id);

struct DatasetSubset {
    SubsetId id = SubsetId::D_all;
    std::vector<std::pair<std::string, std::string>> member_keys; // (repo_id, hash)
    std::uint64_t seed = 0;
    std::map<std::string, std::string> construction_params;
};

void write_subset(const std::string& path, const DatasetSubset& subset);
DatasetSubset read_subset(const std::string& path);

/// Throws when a member key is missing from the parent key set.
void validate_nesting(const DatasetSubset& subset,
                      const std::vector<std::pair<std::string, std::string>>& parent_keys);

/// Deterministic selection: eligible keys sorted by (repo_id, timestamp, hash),
/// then a partial Fisher-Yates shuffle driven by std::mt19937_64(seed) with
/// rejection-sampled bounded draws (no distribution objects, so the picked set
/// is identical across platforms).
DatasetSubset sample_ten_eval(const std::vector<AnnotatedCommit>& dataset, int per_class,
                              std::uint64_t seed, bool require_verified = false);

std::map<std::string, int> default_cmg_quotas(); // 180/102/180/180/179/179 = 1,000

/// Eligibility: what_why.state() == "11". Exact per-language-group quotas.
DatasetSubset sample_cmg_eval(const std::vector<AnnotatedCommit>& dataset,
                              const std::map<std::string, int>& quotas, std::uint64_t seed);

// --- statistics ------------------------------------------------------------

struct NumericSummary {
    std::string metric_name;
    double min = 0.0, q1 = 0.0, median = 0.0, q3 = 0.0, max = 0.0, mean = 0.0;
};

struct DatasetStats {
    long total = 0;
    std::map<std::string, long> type_histogram;   // ten CCS types
    std::map<std::string, long> state_counts;     // what/why states 00,01,10,11
    std::map<std::string, double> state_shares;   // counts / total
    std::vector<NumericSummary> distributions;    // the five outlier metrics
};

DatasetStats dataset_stats(const std::vector<AnnotatedCommit>& dataset);

nlohmann::json stats_to_json(const DatasetStats& stats);

/// Minimal dependency-free bar chart of the type histogram.
void write_stats_svg(const std::string& path, const DatasetStats& stats);

} // namespace commitforge::datastore
