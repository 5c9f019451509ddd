#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "commitforge/ccs.hpp"
#include "commitforge/miner.hpp"

namespace commitforge::filter {

struct StageResult {
    std::string stage; // ccs_format, single_language, bot, multi_type, outlier
    bool pass = false;
    std::string reason;
};

struct FilterProvenance {
    std::vector<StageResult> stage_results; // short-circuits at first failure
    bool kept = false;
};

struct StageOutcome {
    bool pass = false;
    std::string reason;
};

/// Pass iff the message parses under the CCS grammar.
StageOutcome filter_ccs_format(const miner::RawCommit& commit);

/// Pass iff exactly one supported language is touched. When ignore_nonsource
/// is false (default), any file without a supported-language extension fails
/// the commit; when true such files are ignored.
StageOutcome filter_single_language(const miner::RawCommit& commit,
                                    bool ignore_nonsource = false);

struct BotFilterOptions {
    std::vector<std::string> botlist; // exact case-insensitive matches
    bool filter_robert = true;        // the verbatim "robert" substring rule
};

/// Fail iff author name or email contains "bot", "robert" (opt-out), or "b0t"
/// case-insensitively, or matches the botlist exactly.
StageOutcome filter_bots(const miner::RawCommit& commit, const BotFilterOptions& opts);

/// Fail iff two or more line-initial CCS type headers are stacked in the message.
StageOutcome filter_multi_type(const miner::RawCommit& commit);

/// Loads a newline-delimited botlist; '#' starts a comment.
std::vector<std::string> load_botlist(const std::string& path);

struct StageOptions {
    bool ignore_nonsource = false;
    BotFilterOptions bots;
};

/// Runs ccs_format -> single_language -> bot -> multi_type with short-circuit
/// provenance (the outlier stage is appended by remove_outliers).
FilterProvenance run_stages(const miner::RawCommit& commit, const StageOptions& opts);

// --- IQR outlier removal ----------------------------------------------------

constexpr std::array<const char*, 5> kOutlierMetricNames = {
    "diff_length_chars", "description_chars", "diff_tokens", "description_tokens",
    "files_modified"};

struct DistributionStats {
    std::string metric_name;
    double q1 = 0.0;
    double q3 = 0.0;
    double iqr = 0.0;
    double lower_fence = 0.0;
    double upper_fence = 0.0;
    double multiplier = 1.5;
};

/// Quartiles by linear interpolation between order statistics at rank
/// h = (n - 1) * p over the sorted sample. Fences per Tukey:
/// [q1 - k * iqr, q3 + k * iqr]. Throws on empty input.
DistributionStats compute_iqr_fences(std::vector<double> values, double multiplier,
                                     const std::string& metric_name = "");

/// The five per-commit distribution values.
struct OutlierMetrics {
    double diff_length_chars = 0.0;
    double description_chars = 0.0;
    double diff_tokens = 0.0;
    double description_tokens = 0.0;
    double files_modified = 0.0;

    double get(std::size_t i) const;
};

/// Computes the five values for one commit; description taken from the parsed
/// CCS message (falls back to the first message line if parsing fails).
OutlierMetrics outlier_metrics(const miner::RawCommit& commit);

enum class OutlierMode { union_rule, sequential };

struct OutlierResult {
    std::vector<bool> kept; // parallel to input
    std::vector<DistributionStats> fences;
};

/// Union rule: a commit is dropped iff it falls outside the fences of any of
/// the five distributions; fences are computed once over the full input
/// population. Sequential mode recomputes fences metric-by-metric over the
/// survivors of the previous metric's pass.
OutlierResult remove_outliers(const std::vector<OutlierMetrics>& values, double multiplier,
                              OutlierMode mode = OutlierMode::union_rule);

} // namespace commitforge::filter
