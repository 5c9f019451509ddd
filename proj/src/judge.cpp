#include "commitforge/judge.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "commitforge/text.hpp"

namespace commitforge::judge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kTemplateVersion = "v1";

constexpr const char* kEvalTemplate = R"(You are a code reviewer with deep experience in reading diffs and judging commit messages.

You are given the following information:

- Modified files (with diffs):
{diffs}

- Possibly related issues, pull requests, or comments:
{refs}

- Possibly AST changes:
{ast}

- The generated commit message (CMG_result):
{candidate}

You should assess the generated commit message from five perspectives:
- rationality: whether it contains "why" information explaining the motivation for the change.
- comprehensiveness: whether it contains "what" information and covers all affected files.
- non_redundancy: whether it is free of semantic repetition, mergeable details, or meaningless content.
- authenticity: whether it does not include modifications absent in the actual code changes.
- logicality: whether its content is reasonable and logical.

Reply with exactly one fenced JSON object with the five lowercase keys above, each mapped to true or false, plus an optional "<metric>_rationale" string per metric. No other text.)";

constexpr const char* kWhatWhyTemplate = R"(You are a code reviewer assessing the quality of a human-written commit message.

Commit message:
{message}
{diff_section}
Decide whether the message conveys "what" information (describing the content of the change) and "why" information (describing the rationale for the change).

Reply with exactly one fenced JSON object of the form {"what": true|false, "why": true|false}. No other text.)";

std::string replace_all(std::string s, const std::string& from, const std::string& to) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

std::string render_diff_section(const CommitContext& ctx) {
    std::string out;
    for (const auto& mod : ctx.modifications) {
        std::string path = mod.path_after ? *mod.path_after : mod.path_before.value_or("?");
        out += "File: " + path + "\n";
        out += mod.unified_diff;
        if (out.empty() || out.back() != '\n') out += '\n';
    }
    if (out.empty()) out = "(none)\n";
    return out;
}

std::string render_refs_section(const CommitContext& ctx) {
    if (ctx.linked_refs.empty()) return "(none)";
    std::string out;
    for (const auto& r : ctx.linked_refs) {
        if (!out.empty()) out += ", ";
        out += r;
    }
    return out;
}

std::string render_ast_section(const CommitContext& ctx) {
    if (ctx.ast_changes.empty()) return "(none)";
    std::string out;
    for (const auto& c : ctx.ast_changes) {
        out += "- ";
        out += to_string(c.change);
        out += " ";
        out += to_string(c.kind);
        out += " ";
        out += c.qualified_name;
        out += " in ";
        out += c.file_path;
        out += "\n";
    }
    return out;
}

class SystemClock : public Clock {
  public:
    double now_seconds() override {
        return std::chrono::duration<double>(
                   std::chrono::steady_clock::now().time_since_epoch())
            .count();
    }
    void sleep_seconds(double s) override {
        std::this_thread::sleep_for(std::chrono::duration<double>(s));
    }
};

class RateLimiter {
  public:
    RateLimiter(Clock& clock, int rpm) : clock_(clock), rpm_(rpm) {}
    void acquire() {
        if (rpm_ <= 0) return;
        double t = clock_.now_seconds();
        if (t < next_allowed_) {
            clock_.sleep_seconds(next_allowed_ - t);
            t = next_allowed_;
        }
        next_allowed_ = t + 60.0 / rpm_;
    }

  private:
    Clock& clock_;
    int rpm_;
    double next_allowed_ = 0.0;
};

class ChatBackend : public JudgeBackend {
  public:
    explicit ChatBackend(const JudgeConfig& cfg) : cfg_(cfg) {}

    std::string id() const override { return "chat:" + cfg_.model_name; }

    std::string complete(const std::string& prompt) override {
        httplib::Client client(cfg_.endpoint_url);
        client.set_connection_timeout(10);
        client.set_read_timeout(120);
        httplib::Headers headers;
        if (const char* key = std::getenv("COMMITFORGE_JUDGE_KEY"))
            headers.emplace("Authorization", std::string("Bearer ") + key);

        json body = {{"model", cfg_.model_name},
                     {"messages", json::array({{{"role", "user"}, {"content", prompt}}})},
                     {"temperature", cfg_.temperature}};
        auto res = client.Post("/chat/completions", headers, body.dump(), "application/json");
        if (!res || res->status != 200)
            throw std::runtime_error("endpoint-unreachable: " + cfg_.endpoint_url +
                                     (res ? " HTTP " + std::to_string(res->status) : ""));
        json reply = json::parse(res->body);
        return reply.at("choices").at(0).at("message").at("content").get<std::string>();
    }

  private:
    JudgeConfig cfg_;
};

std::optional<json> extract_json_object(const std::string& reply) {
    std::size_t open = reply.find('{');
    std::size_t close = reply.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open)
        return std::nullopt;
    auto parsed = json::parse(reply.substr(open, close - open + 1), nullptr, false);
    if (parsed.is_discarded()) return std::nullopt;
    return parsed;
}

std::optional<bool> coerce_bool(const json& v) {
    if (v.is_boolean()) return v.get<bool>();
    if (v.is_string()) {
        std::string s = text::to_lower(v.get<std::string>());
        if (s == "true" || s == "yes") return true;
        if (s == "false" || s == "no") return false;
    }
    return std::nullopt;
}

std::string make_prompt_hash(const std::string& judge_id, const JudgeConfig& cfg,
                             const std::string& prompt) {
    std::ostringstream key;
    key << kTemplateVersion << '\x1f' << judge_id << '\x1f' << cfg.model_name << '\x1f'
        << cfg.temperature << '\x1f' << prompt;
    return text::sha256_hex(key.str());
}

std::optional<BinaryVerdict> parse_verdict(const std::string& reply) {
    auto obj = extract_json_object(reply);
    if (!obj) return std::nullopt;
    BinaryVerdict v;
    static const char* metrics[] = {"rationality", "comprehensiveness", "non_redundancy",
                                    "authenticity", "logicality"};
    bool* fields[] = {&v.rationality, &v.comprehensiveness, &v.non_redundancy,
                      &v.authenticity, &v.logicality};
    for (int i = 0; i < 5; ++i) {
        if (!obj->contains(metrics[i])) return std::nullopt;
        auto b = coerce_bool((*obj)[metrics[i]]);
        if (!b) return std::nullopt;
        *fields[i] = *b;
        std::string rk = std::string(metrics[i]) + "_rationale";
        if (obj->contains(rk) && (*obj)[rk].is_string())
            v.rationales.emplace_back(metrics[i], (*obj)[rk].get<std::string>());
    }
    return v;
}

std::string cache_path(const JudgeConfig& cfg, const std::string& judge_id,
                       const std::string& prompt_hash) {
    return (fs::path(cfg.cache_dir) / (judge_id + "-" + prompt_hash + ".json")).string();
}

struct ChatCall {
    std::string reply;
    std::string error; // nonempty when every transport attempt failed
    bool cache_hit = false;
    int retries = 0;
    long network_calls = 0;
};

// One completion with transport retries, a single repair re-prompt on parse
// failure, and content-addressed caching of the raw reply.
template <class ParseFn>
ChatCall cached_complete(JudgeBackend& backend, const JudgeConfig& cfg, RateLimiter& limiter,
                         const std::string& prompt, const std::string& prompt_hash,
                         ParseFn parseable) {
    ChatCall call;
    std::string path;
    if (!cfg.cache_dir.empty()) {
        fs::create_directories(cfg.cache_dir);
        path = cache_path(cfg, backend.id(), prompt_hash);
        std::ifstream in(path);
        if (in) {
            std::ostringstream ss;
            ss << in.rdbuf();
            json stored = json::parse(ss.str());
            call.reply = stored.at("reply").get<std::string>();
            call.cache_hit = true;
            return call;
        }
    }
    auto attempt = [&](const std::string& p) -> std::optional<std::string> {
        for (int i = 0; i <= cfg.max_retries; ++i) {
            try {
                limiter.acquire();
                ++call.network_calls;
                return backend.complete(p);
            } catch (const std::exception& e) {
                call.error = e.what();
                call.retries++;
            }
        }
        if (call.error.empty()) call.error = "endpoint-unreachable";
        return std::nullopt;
    };
    auto first = attempt(prompt);
    if (!first) return call;
    call.error.clear();
    call.reply = *first;
    if (!parseable(call.reply)) {
        auto repaired =
            attempt(prompt +
                    "\n\nYour previous reply could not be parsed. Reply again with "
                    "only the fenced JSON object described above.");
        if (!repaired) return call;
        call.error.clear();
        call.reply = *repaired;
    }
    if (!path.empty() && parseable(call.reply)) {
        std::ofstream out(path);
        out << json{{"reply", call.reply}, {"prompt_hash", prompt_hash}}.dump();
    }
    return call;
}

struct EvalOutcome {
    std::optional<BinaryVerdict> verdict;
    std::string error;
    bool cache_hit = false;
    int retries = 0;
    long network_calls = 0;
};

EvalOutcome evaluate_with_stats(const CommitContext& ctx, const std::string& candidate,
                                const JudgeConfig& cfg, JudgeBackend* backend,
                                RateLimiter& limiter) {
    EvalOutcome out;
    std::string prompt = render_evaluation_prompt(ctx, candidate);

    if (cfg.backend == Backend::rule_based) {
        BinaryVerdict v = rules::evaluate(ctx, candidate);
        v.prompt_hash = make_prompt_hash(v.judge_id, cfg, prompt);
        out.verdict = std::move(v);
        return out;
    }
    std::string prompt_hash = make_prompt_hash(backend->id(), cfg, prompt);
    try {
        auto call = cached_complete(*backend, cfg, limiter, prompt, prompt_hash,
                                    [](const std::string& r) { return parse_verdict(r).has_value(); });
        out.cache_hit = call.cache_hit;
        out.retries = call.retries;
        out.network_calls = call.network_calls;
        if (!call.error.empty()) {
            out.error = call.error;
            return out;
        }
        auto v = parse_verdict(call.reply);
        if (!v) {
            out.error = "unparseable-reply";
            return out;
        }
        v->judge_id = backend->id();
        v->prompt_hash = prompt_hash;
        out.verdict = std::move(v);
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

} // namespace

std::shared_ptr<Clock> system_clock() { return std::make_shared<SystemClock>(); }

std::string prompt_template_version() { return kTemplateVersion; }

std::string render_evaluation_prompt(const CommitContext& ctx,
                                     const std::string& candidate_message) {
    std::string prompt = kEvalTemplate;
    prompt = replace_all(prompt, "{diffs}", render_diff_section(ctx));
    prompt = replace_all(prompt, "{refs}", render_refs_section(ctx));
    prompt = replace_all(prompt, "{ast}", render_ast_section(ctx));
    prompt = replace_all(prompt, "{candidate}", candidate_message);
    return prompt;
}

std::string render_what_why_prompt(const CommitContext& ctx, bool include_diffs) {
    std::string prompt = kWhatWhyTemplate;
    prompt = replace_all(prompt, "{message}", ctx.message);
    std::string diff_section;
    if (include_diffs) diff_section = "\nCode changes:\n" + render_diff_section(ctx) + "\n";
    prompt = replace_all(prompt, "{diff_section}", diff_section);
    return prompt;
}

std::unique_ptr<JudgeBackend> make_backend(const JudgeConfig& cfg, std::shared_ptr<Clock>) {
    if (cfg.backend == Backend::chat_endpoint) return std::make_unique<ChatBackend>(cfg);
    return nullptr; // rule-based path needs no transport
}

Expected<WhatWhyFlags, JudgeError> annotate_what_why(const CommitContext& ctx,
                                                     const JudgeConfig& cfg,
                                                     std::shared_ptr<Clock> clock) {
    if (cfg.backend == Backend::rule_based) {
        WhatWhyFlags flags;
        flags.has_what = rules::detect_what(ctx.message, ctx);
        flags.has_why = rules::detect_why(ctx.message);
        return flags;
    }
    if (!clock) clock = system_clock();
    auto backend = make_backend(cfg, clock);
    RateLimiter limiter(*clock, cfg.requests_per_minute);
    std::string prompt = render_what_why_prompt(ctx, cfg.include_diffs_in_what_why);
    std::string prompt_hash = make_prompt_hash(backend->id(), cfg, prompt);

    auto parse = [](const std::string& reply) -> std::optional<WhatWhyFlags> {
        auto obj = extract_json_object(reply);
        if (!obj || !obj->contains("what") || !obj->contains("why")) return std::nullopt;
        auto w = coerce_bool((*obj)["what"]);
        auto y = coerce_bool((*obj)["why"]);
        if (!w || !y) return std::nullopt;
        return WhatWhyFlags{*w, *y};
    };
    try {
        auto call = cached_complete(*backend, cfg, limiter, prompt, prompt_hash,
                                    [&](const std::string& r) { return parse(r).has_value(); });
        if (!call.error.empty()) return JudgeError{call.error};
        auto flags = parse(call.reply);
        if (!flags) return JudgeError{"unparseable-reply"};
        return *flags;
    } catch (const std::exception& e) {
        return JudgeError{e.what()};
    }
}

Expected<BinaryVerdict, JudgeError> evaluate_binary(const CommitContext& ctx,
                                                    const std::string& candidate_message,
                                                    const JudgeConfig& cfg,
                                                    std::shared_ptr<Clock> clock) {
    if (candidate_message.empty()) return JudgeError{"empty-candidate"};
    if (!clock) clock = system_clock();
    auto backend = make_backend(cfg, clock);
    RateLimiter limiter(*clock, cfg.requests_per_minute);
    auto outcome = evaluate_with_stats(ctx, candidate_message, cfg, backend.get(), limiter);
    if (!outcome.verdict) return JudgeError{outcome.error};
    return *outcome.verdict;
}

BatchResult batch_evaluate(const std::vector<BatchItem>& items, const JudgeConfig& cfg,
                           std::shared_ptr<Clock> clock) {
    if (!clock) clock = system_clock();
    auto backend = make_backend(cfg, clock);
    RateLimiter limiter(*clock, cfg.requests_per_minute);
    BatchResult result;
    double start = clock->now_seconds();
    for (const auto& item : items) {
        auto outcome =
            evaluate_with_stats(item.ctx, item.candidate_message, cfg, backend.get(), limiter);
        BatchItemRecord rec;
        rec.id = item.id;
        rec.cache_hit = outcome.cache_hit;
        rec.retries = outcome.retries;
        result.network_calls += outcome.network_calls;
        if (outcome.verdict) {
            result.verdicts.push_back(std::move(outcome.verdict));
        } else {
            rec.failed = true;
            rec.error = outcome.error;
            result.verdicts.push_back(std::nullopt);
        }
        result.manifest.push_back(std::move(rec));
    }
    result.wall_seconds = clock->now_seconds() - start;
    return result;
}

// --- rule-based oracle ------------------------------------------------------

namespace rules {

namespace {

std::string file_stem(const std::string& path) {
    std::size_t slash = path.find_last_of('/');
    std::string base = slash == std::string::npos ? path : path.substr(slash + 1);
    std::size_t dot = base.rfind('.');
    return dot == std::string::npos ? base : base.substr(0, dot);
}

std::vector<std::string> changed_stems(const CommitContext& ctx) {
    std::vector<std::string> stems;
    std::set<std::string> seen;
    for (const auto& mod : ctx.modifications) {
        for (const auto& p : {mod.path_after, mod.path_before}) {
            if (!p) continue;
            std::string s = file_stem(*p);
            if (s.size() >= 2 && seen.insert(text::to_lower(s)).second) stems.push_back(s);
        }
    }
    return stems;
}

std::vector<std::string> changed_basenames(const CommitContext& ctx) {
    std::vector<std::string> names;
    for (const auto& mod : ctx.modifications) {
        for (const auto& p : {mod.path_after, mod.path_before}) {
            if (!p) continue;
            std::size_t slash = p->find_last_of('/');
            names.push_back(text::to_lower(slash == std::string::npos ? *p
                                                                      : p->substr(slash + 1)));
        }
    }
    return names;
}

const char* kWhyMarkers[] = {"because",   "since",    "so that",  "in order to",
                             "to avoid",  "to prevent", "to ensure", "to fix",
                             "avoids",    "prevents", "otherwise"};

} // namespace

bool detect_what(const std::string& message, const CommitContext& ctx) {
    for (const auto& stem : changed_stems(ctx)) {
        if (text::contains_ci(message, stem)) return true;
    }
    for (const auto& change : ctx.ast_changes) {
        std::string name = change.qualified_name;
        std::size_t dot = name.rfind('.');
        if (dot != std::string::npos) name = name.substr(dot + 1);
        if (name.size() >= 2 && text::contains_ci(message, name)) return true;
    }
    return false;
}

bool detect_why(const std::string& message) {
    for (const char* marker : kWhyMarkers) {
        if (text::contains_ci(message, marker)) return true;
    }
    for (const char* kw : {"fixes #", "closes #", "resolves #"}) {
        if (text::contains_ci(message, kw)) return true;
    }
    return false;
}

BinaryVerdict evaluate(const CommitContext& ctx, const std::string& candidate) {
    BinaryVerdict v;
    v.judge_id = "rule-based-v1";

    v.rationality = detect_why(candidate);
    v.rationales.emplace_back("rationality", v.rationality
                                                 ? "causal/purposive marker present"
                                                 : "no causal/purposive marker");

    auto stems = changed_stems(ctx);
    bool covers_all = !stems.empty();
    for (const auto& stem : stems) {
        if (!text::contains_ci(candidate, stem)) {
            covers_all = false;
            break;
        }
    }
    v.comprehensiveness = detect_what(candidate, ctx) && covers_all;
    v.rationales.emplace_back("comprehensiveness",
                              v.comprehensiveness ? "mentions every changed file stem"
                                                  : "does not cover all changed files");

    // no duplicated normalized sentence
    std::set<std::string> sentences;
    v.non_redundancy = true;
    std::string current;
    auto flush = [&]() {
        std::string norm = text::trim(text::to_lower(current));
        current.clear();
        if (norm.empty()) return;
        if (!sentences.insert(norm).second) v.non_redundancy = false;
    };
    for (char c : candidate) {
        if (c == '.' || c == '!' || c == '?' || c == '\n') flush();
        else current += c;
    }
    flush();
    v.rationales.emplace_back("non_redundancy", v.non_redundancy
                                                    ? "no repeated sentence"
                                                    : "repeated sentence detected");

    // every file-looking token must correspond to an actually changed file
    auto basenames = changed_basenames(ctx);
    v.authenticity = true;
    static const char* exts[] = {".c",  ".h",  ".cc", ".cpp", ".hpp", ".cxx", ".java",
                                 ".py", ".go", ".js", ".jsx", ".mjs", ".ts",  ".tsx"};
    std::istringstream words(candidate);
    std::string word;
    while (words >> word) {
        while (!word.empty() && (word.back() == '.' || word.back() == ',' ||
                                 word.back() == ')' || word.back() == ':'))
            word.pop_back();
        while (!word.empty() && (word.front() == '(' || word.front() == '\''))
            word.erase(word.begin());
        std::string lower = text::to_lower(word);
        bool file_like = false;
        for (const char* ext : exts) {
            if (lower.size() > std::strlen(ext) &&
                lower.compare(lower.size() - std::strlen(ext), std::strlen(ext), ext) == 0) {
                file_like = true;
                break;
            }
        }
        if (!file_like) continue;
        std::size_t slash = lower.find_last_of('/');
        std::string base = slash == std::string::npos ? lower : lower.substr(slash + 1);
        bool known = false;
        for (const auto& b : basenames)
            if (b == base) known = true;
        if (!known) {
            v.authenticity = false;
            break;
        }
    }
    v.rationales.emplace_back("authenticity",
                              v.authenticity ? "no unknown file mentioned"
                                             : "mentions a file absent from the change");

    v.logicality = text::count_tokens(candidate) >= 3;
    v.rationales.emplace_back("logicality", v.logicality ? "message has substantive length"
                                                         : "message too short");
    return v;
}

} // namespace rules

} // namespace commitforge::judge
