#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "commitforge/ast.hpp"
#include "commitforge/expected.hpp"
#include "commitforge/miner.hpp"

namespace commitforge::judge {

struct WhatWhyFlags {
    bool has_what = false;
    bool has_why = false;

    /// Two-character state: "10" = what present / why absent, "01" = why
    /// present / what absent, "00", "11".
    std::string state() const {
        return std::string(1, has_what ? '1' : '0') + (has_why ? '1' : '0');
    }
    bool operator==(const WhatWhyFlags&) const = default;
};

struct BinaryVerdict {
    bool rationality = false;
    bool comprehensiveness = false;
    bool non_redundancy = false;
    bool authenticity = false; // true = no fabricated modifications
    bool logicality = false;
    std::vector<std::pair<std::string, std::string>> rationales; // metric -> text
    std::string judge_id;
    std::string prompt_hash;
};

enum class Backend { chat_endpoint, rule_based };

struct JudgeConfig {
    Backend backend = Backend::rule_based;
    std::string endpoint_url;
    std::string model_name;
    double temperature = 0.0; // keep 0 for reproducibility
    int max_retries = 3;
    int requests_per_minute = 0; // 0 = unlimited
    std::string cache_dir;
    bool include_diffs_in_what_why = true;
};

/// What the judge sees about one commit.
struct CommitContext {
    std::string message; // full human message (what/why annotation input)
    std::vector<miner::FileModification> modifications;
    std::vector<std::string> linked_refs;
    std::vector<ast::StructuralChange> ast_changes;
};

struct JudgeError {
    std::string what; // endpoint-unreachable, unparseable-reply, verdict-incomplete
};

/// Injectable time source so rate-cap behavior is testable without waiting.
class Clock {
  public:
    virtual ~Clock() = default;
    virtual double now_seconds() = 0;
    virtual void sleep_seconds(double s) = 0;
};

std::shared_ptr<Clock> system_clock();

/// Deterministic rule-based fallback. A testing oracle, not a research-grade
/// judge; the exact rules are documented with each function.
class RuleJudge;

class JudgeBackend {
  public:
    virtual ~JudgeBackend() = default;
    virtual std::string id() const = 0;
    /// Raw reply text for a rendered prompt; throws on transport failure.
    virtual std::string complete(const std::string& prompt) = 0;
};

std::unique_ptr<JudgeBackend> make_backend(const JudgeConfig& cfg,
                                           std::shared_ptr<Clock> clock = nullptr);

/// Versioned prompt templates (the evaluation prompt embeds every diff file
/// path, linked refs, AST changes, and the candidate message).
std::string render_what_why_prompt(const CommitContext& ctx, bool include_diffs);
std::string render_evaluation_prompt(const CommitContext& ctx,
                                     const std::string& candidate_message);
std::string prompt_template_version();

/// Annotates what/why over the commit's own message.
Expected<WhatWhyFlags, JudgeError> annotate_what_why(const CommitContext& ctx,
                                                     const JudgeConfig& cfg,
                                                     std::shared_ptr<Clock> clock = nullptr);

/// Scores a candidate message on the five binary metrics.
Expected<BinaryVerdict, JudgeError> evaluate_binary(const CommitContext& ctx,
                                                    const std::string& candidate_message,
                                                    const JudgeConfig& cfg,
                                                    std::shared_ptr<Clock> clock = nullptr);

struct BatchItem {
    std::string id;
    CommitContext ctx;
    std::string candidate_message;
};

struct BatchItemRecord {
    std::string id;
    bool cache_hit = false;
    int retries = 0;
    bool failed = false;
    std::string error;
};

struct BatchResult {
    std::vector<std::optional<BinaryVerdict>> verdicts; // input order
    std::vector<BatchItemRecord> manifest;
    double wall_seconds = 0.0;
    long network_calls = 0;
};

/// Caches by (prompt_hash, judge_id), honors the requests-per-minute cap, and
/// aggregates per-item failures without aborting the batch.
BatchResult batch_evaluate(const std::vector<BatchItem>& items, const JudgeConfig& cfg,
                           std::shared_ptr<Clock> clock = nullptr);

// Rule-based pieces exposed for direct testing.
namespace rules {

/// has_what: the message mentions at least one changed file stem or extracted
/// declaration name (case-insensitive token match).
bool detect_what(const std::string& message, const CommitContext& ctx);

/// has_why: the message contains one of the documented causal/purposive
/// markers (because, since, so that, in order to, to avoid, to prevent,
/// to ensure, to fix, avoids, prevents, otherwise, fixes/closes/resolves #N).
bool detect_why(const std::string& message);

BinaryVerdict evaluate(const CommitContext& ctx, const std::string& candidate);

} // namespace rules

} // namespace commitforge::judge
