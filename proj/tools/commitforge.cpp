// commitforge — batch toolchain for mining, filtering, enriching, and
// evaluating Conventional-Commits history. Stages communicate only through
// JSONL files; every run writes a manifest next to its output.

#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "commitforge/datastore.hpp"
#include "commitforge/metrics.hpp"
#include "commitforge/text.hpp"

namespace cf = commitforge;
using nlohmann::json;

namespace {

constexpr const char* kToolVersion = "commitforge 1.0.0";

std::int64_t now_epoch() {
    return std::chrono::duration_cast<std::chrono::seconds>(
               std::chrono::system_clock::now().time_since_epoch())
        .count();
}

struct StageCounts : std::vector<std::pair<std::string, long>> {
    void add(const std::string& name, long n) { emplace_back(name, n); }
};

void write_manifest(const std::string& subcommand, const std::string& output_path,
                    const json& config, const std::vector<std::string>& inputs,
                    const StageCounts& counts, std::int64_t start_epoch) {
    json stage_counts = json::object();
    for (const auto& [name, n] : counts) stage_counts[name] = n;
    json m = {{"subcommand", subcommand},
              {"tool_version", kToolVersion},
              {"schema_version", cf::datastore::kSchemaVersion},
              {"config", config},
              {"inputs", inputs},
              {"output", output_path},
              {"started_at", cf::miner::format_iso_utc(start_epoch)},
              {"finished_at", cf::miner::format_iso_utc(now_epoch())},
              {"stage_counts", stage_counts}};
    std::ofstream out(output_path + ".manifest.json", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write manifest for " + output_path);
    out << m.dump(2) << '\n';
}

void canonical_sort(std::vector<cf::datastore::AnnotatedCommit>& commits) {
    std::sort(commits.begin(), commits.end(), [](const auto& a, const auto& b) {
        return std::tie(a.raw.repo_id, a.raw.timestamp, a.raw.hash) <
               std::tie(b.raw.repo_id, b.raw.timestamp, b.raw.hash);
    });
}

/// Runs fn(i) over [0, n) on `jobs` threads; exceptions surface on join.
void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || n < 2) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    std::vector<std::exception_ptr> errors{std::size_t(jobs)};
    for (int t = 0; t < jobs; ++t) {
        workers.emplace_back([&, t] {
            try {
                for (std::size_t i = next++; i < n; i = next++) fn(i);
            } catch (...) {
                errors[std::size_t(t)] = std::current_exception();
            }
        });
    }
    for (auto& w : workers) w.join();
    for (auto& e : errors)
        if (e) std::rethrow_exception(e);
}

json verdict_to_json(const cf::judge::BinaryVerdict& v) {
    json rationales = json::object();
    for (const auto& [metric, text] : v.rationales) rationales[metric] = text;
    return {{"rationality", v.rationality},
            {"comprehensiveness", v.comprehensiveness},
            {"non_redundancy", v.non_redundancy},
            {"authenticity", v.authenticity},
            {"logicality", v.logicality},
            {"rationales", rationales},
            {"judge_id", v.judge_id},
            {"prompt_hash", v.prompt_hash}};
}

cf::judge::CommitContext make_context(const cf::datastore::AnnotatedCommit& c) {
    cf::judge::CommitContext ctx;
    ctx.message = c.raw.message;
    ctx.modifications = c.raw.modifications;
    ctx.linked_refs = c.raw.linked_refs;
    ctx.ast_changes = c.ast_changes;
    return ctx;
}

cf::judge::JudgeConfig judge_config_from(const std::string& backend,
                                         const std::string& endpoint, const std::string& model,
                                         const std::string& cache_dir, int rpm) {
    cf::judge::JudgeConfig cfg;
    cfg.backend = backend == "chat" ? cf::judge::Backend::chat_endpoint
                                    : cf::judge::Backend::rule_based;
    cfg.endpoint_url = endpoint;
    cfg.model_name = model;
    cfg.cache_dir = cache_dir;
    cfg.requests_per_minute = rpm;
    return cfg;
}

// --- subcommand bodies (throw std::runtime_error -> exit 1/2 in main) ------

struct EnvError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int run_discover(const std::string& fixture, const std::string& forge_url,
                 const std::string& today, const std::string& out_path) {
    auto start = now_epoch();
    cf::miner::RepoCriteria criteria;
    std::unique_ptr<cf::miner::ForgeClient> client;
    if (!fixture.empty()) {
        client = std::make_unique<cf::miner::FixtureForgeClient>(fixture);
    } else {
        if (!std::getenv("COMMITFORGE_FORGE_TOKEN"))
            throw EnvError("COMMITFORGE_FORGE_TOKEN is not set; export a forge API token "
                           "or use --fixture for offline runs");
        client = std::make_unique<cf::miner::HttpForgeClient>(forge_url);
    }
    std::vector<cf::miner::RepoDescriptor> repos;
    try {
        repos = cf::miner::discover_repos(criteria, *client, today);
    } catch (const std::runtime_error& e) {
        throw EnvError(e.what());
    }
    json arr = json::array();
    for (const auto& r : repos) {
        json criteria_passed = json::object();
        for (const auto& [name, pass] : r.criteria_passed) criteria_passed[name] = pass;
        arr.push_back({{"id", r.id},
                       {"license", r.license},
                       {"forks", r.forks},
                       {"created_at", r.created_at},
                       {"latest_commit_date", r.latest_commit_date},
                       {"avg_daily_commits", r.avg_daily_commits},
                       {"criteria_passed", criteria_passed}});
    }
    std::ofstream out(out_path, std::ios::trunc);
    out << arr.dump(2) << '\n';
    StageCounts counts;
    counts.add("repos_selected", long(repos.size()));
    write_manifest("discover",
                   out_path,
                   {{"fixture", fixture}, {"forge_url", forge_url}, {"today", today}},
                   {fixture.empty() ? forge_url : fixture}, counts, start);
    std::cout << "discovered " << repos.size() << " repositories -> " << out_path << "\n";
    return 0;
}

int run_mine(const std::string& repo_path, const std::string& repo_id,
             const std::string& since, const std::string& out_path, bool keep_contents) {
    auto start = now_epoch();
    cf::miner::MineOptions opts;
    opts.repo_id = repo_id.empty() ? repo_path : repo_id;
    if (!since.empty()) opts.since = cf::miner::parse_iso_instant(since);
    opts.keep_contents = keep_contents;
    std::vector<cf::miner::MinerWarning> warnings;
    auto raw = cf::miner::walk_history(repo_path, opts, &warnings);

    std::vector<cf::datastore::AnnotatedCommit> commits;
    commits.reserve(raw.size());
    for (auto& r : raw) {
        cf::datastore::AnnotatedCommit c;
        auto parsed = cf::ccs::parse_message(r.message);
        if (parsed.ok()) c.ccs = parsed.value();
        c.raw = std::move(r);
        commits.push_back(std::move(c));
    }
    canonical_sort(commits);
    cf::datastore::write_dataset(out_path, commits);
    StageCounts counts;
    counts.add("commits_mined", long(commits.size()));
    counts.add("warnings", long(warnings.size()));
    write_manifest("mine", out_path,
                   {{"repo", repo_path},
                    {"repo_id", opts.repo_id},
                    {"since", since},
                    {"keep_contents", keep_contents}},
                   {repo_path}, counts, start);
    for (const auto& w : warnings)
        std::cerr << "warning: " << w.hash << ": " << w.what << "\n";
    std::cout << "mined " << commits.size() << " commits -> " << out_path << "\n";
    return 0;
}

int run_filter(const std::string& in_path, const std::string& out_path,
               const std::string& rejects_path, const std::string& botlist_path,
               bool keep_robert, bool ignore_nonsource, double multiplier,
               const std::string& outlier_mode) {
    auto start = now_epoch();
    auto commits = cf::datastore::read_dataset(in_path);
    cf::filter::StageOptions opts;
    opts.ignore_nonsource = ignore_nonsource;
    opts.bots.filter_robert = !keep_robert;
    if (!botlist_path.empty()) opts.bots.botlist = cf::filter::load_botlist(botlist_path);

    std::vector<cf::datastore::AnnotatedCommit> kept, rejected;
    std::map<std::string, long> failed_per_stage;
    for (auto& c : commits) {
        auto prov = cf::filter::run_stages(c.raw, opts);
        c.provenance = prov;
        if (prov.kept) {
            kept.push_back(std::move(c));
        } else {
            failed_per_stage[prov.stage_results.back().stage]++;
            rejected.push_back(std::move(c));
        }
    }
    std::vector<cf::filter::OutlierMetrics> values;
    values.reserve(kept.size());
    for (const auto& c : kept) values.push_back(cf::filter::outlier_metrics(c.raw));
    auto mode = outlier_mode == "sequential" ? cf::filter::OutlierMode::sequential
                                             : cf::filter::OutlierMode::union_rule;
    auto outliers = cf::filter::remove_outliers(values, multiplier, mode);
    std::vector<cf::datastore::AnnotatedCommit> survivors;
    long removed_outliers = 0;
    for (std::size_t i = 0; i < kept.size(); ++i) {
        bool pass = outliers.kept[i];
        kept[i].provenance.stage_results.push_back(
            {"outlier", pass, pass ? "" : "outside IQR fences"});
        kept[i].provenance.kept = pass;
        if (pass) {
            survivors.push_back(std::move(kept[i]));
        } else {
            ++removed_outliers;
            rejected.push_back(std::move(kept[i]));
        }
    }
    canonical_sort(survivors);
    cf::datastore::write_dataset(out_path, survivors);
    if (!rejects_path.empty()) {
        canonical_sort(rejected);
        cf::datastore::write_dataset(rejects_path, rejected);
    }
    StageCounts counts;
    counts.add("input", long(commits.size()));
    for (const char* stage : {"ccs_format", "single_language", "bot", "multi_type"})
        counts.add(std::string("failed_") + stage, failed_per_stage[stage]);
    counts.add("failed_outlier", removed_outliers);
    counts.add("kept", long(survivors.size()));
    write_manifest("filter", out_path,
                   {{"botlist", botlist_path},
                    {"filter_robert", !keep_robert},
                    {"ignore_nonsource", ignore_nonsource},
                    {"multiplier", multiplier},
                    {"outlier_mode", outlier_mode}},
                   {in_path}, counts, start);
    std::cout << "kept " << survivors.size() << "/" << commits.size() << " commits -> "
              << out_path << "\n";
    return 0;
}

int run_ast(const std::string& in_path, const std::string& out_path, int jobs) {
    auto start = now_epoch();
    auto commits = cf::datastore::read_dataset(in_path);
    std::atomic<long> enriched{0};
    parallel_for(commits.size(), jobs, [&](std::size_t i) {
        auto& c = commits[i];
        c.ast_changes.clear();
        c.hunk_contexts.clear();
        bool any = false;
        for (const auto& mod : c.raw.modifications) {
            if (!cf::miner::is_supported_language(mod.language)) continue;
            std::optional<std::string_view> before, after;
            if (mod.content_before) before = *mod.content_before;
            if (mod.content_after) after = *mod.content_after;
            if (!before && !after) continue;
            any = true;
            std::string path = mod.path_after ? *mod.path_after : mod.path_before.value_or("");
            auto changes = cf::ast::diff_structures(before, after, mod.language);
            for (auto& ch : changes) {
                ch.file_path = path;
                c.ast_changes.push_back(std::move(ch));
            }
            std::vector<cf::ast::Declaration> decls_before, decls_after;
            if (before) decls_before = cf::ast::extract_declarations(*before, mod.language);
            if (after) decls_after = cf::ast::extract_declarations(*after, mod.language);
            auto contexts = cf::ast::map_hunks(mod.unified_diff, decls_before, decls_after);
            for (auto& hc : contexts) c.hunk_contexts.push_back(std::move(hc));
        }
        if (any) ++enriched;
    });
    canonical_sort(commits);
    cf::datastore::write_dataset(out_path, commits);
    StageCounts counts;
    counts.add("input", long(commits.size()));
    counts.add("enriched", enriched.load());
    write_manifest("ast", out_path, {{"jobs", jobs}}, {in_path}, counts, start);
    std::cout << "enriched " << enriched.load() << "/" << commits.size() << " commits -> "
              << out_path << "\n";
    return 0;
}

int run_annotate(const std::string& in_path, const std::string& out_path,
                 const cf::judge::JudgeConfig& cfg, int jobs) {
    auto start = now_epoch();
    auto commits = cf::datastore::read_dataset(in_path);
    std::atomic<long> failures{0};
    int workers = cfg.backend == cf::judge::Backend::rule_based ? jobs : 1;
    parallel_for(commits.size(), workers, [&](std::size_t i) {
        auto result = cf::judge::annotate_what_why(make_context(commits[i]), cfg);
        if (result.ok()) commits[i].what_why = result.value();
        else ++failures;
    });
    if (failures > 0 && cfg.backend == cf::judge::Backend::chat_endpoint)
        throw EnvError("judge endpoint failed for " + std::to_string(failures.load()) +
                       " commits; check the endpoint URL and COMMITFORGE_JUDGE_KEY");
    canonical_sort(commits);
    cf::datastore::write_dataset(out_path, commits);
    StageCounts counts;
    counts.add("input", long(commits.size()));
    counts.add("annotated", long(commits.size()) - failures.load());
    write_manifest("annotate", out_path,
                   {{"backend",
                     cfg.backend == cf::judge::Backend::rule_based ? "rule" : "chat"},
                    {"model", cfg.model_name},
                    {"jobs", jobs}},
                   {in_path}, counts, start);
    std::cout << "annotated " << commits.size() << " commits -> " << out_path << "\n";
    return 0;
}

int run_stats(const std::string& in_path, const std::string& out_path,
              const std::string& svg_path) {
    auto start = now_epoch();
    auto commits = cf::datastore::read_dataset(in_path);
    auto stats = cf::datastore::dataset_stats(commits);
    std::ofstream out(out_path, std::ios::trunc);
    out << cf::datastore::stats_to_json(stats).dump(2) << '\n';
    if (!svg_path.empty()) cf::datastore::write_stats_svg(svg_path, stats);
    StageCounts counts;
    counts.add("commits", stats.total);
    write_manifest("stats", out_path, {{"svg", svg_path}}, {in_path}, counts, start);
    std::cout << "stats over " << stats.total << " commits -> " << out_path << "\n";
    return 0;
}

int run_subset(const std::string& in_path, const std::string& kind, std::uint64_t seed,
               int per_class, const std::vector<std::string>& quota_args,
               const std::string& out_path) {
    auto start = now_epoch();
    auto commits = cf::datastore::read_dataset(in_path);
    cf::datastore::DatasetSubset subset;
    if (kind == "ten") {
        subset = cf::datastore::sample_ten_eval(commits, per_class, seed);
    } else if (kind == "cmg") {
        auto quotas = cf::datastore::default_cmg_quotas();
        for (const auto& arg : quota_args) {
            auto eq = arg.find('=');
            if (eq == std::string::npos)
                throw std::runtime_error("bad --quota (expected group=count): " + arg);
            quotas[arg.substr(0, eq)] = std::stoi(arg.substr(eq + 1));
        }
        subset = cf::datastore::sample_cmg_eval(commits, quotas, seed);
    } else {
        throw std::runtime_error("unknown subset kind: " + kind + " (expected ten or cmg)");
    }
    std::vector<std::pair<std::string, std::string>> parent_keys;
    for (const auto& c : commits) parent_keys.emplace_back(c.raw.repo_id, c.raw.hash);
    cf::datastore::validate_nesting(subset, parent_keys);
    cf::datastore::write_subset(out_path, subset);
    StageCounts counts;
    counts.add("pool", long(commits.size()));
    counts.add("selected", long(subset.member_keys.size()));
    write_manifest("subset", out_path,
                   {{"kind", kind}, {"seed", seed}, {"per_class", per_class}}, {in_path},
                   counts, start);
    std::cout << "sampled " << subset.member_keys.size() << " commits -> " << out_path << "\n";
    return 0;
}

int run_eval_classify(const std::string& gold_path, const std::string& pred_path,
                      const std::string& out_path, const std::string& csv_path) {
    auto start = now_epoch();
    auto gold_ds = cf::datastore::read_dataset(gold_path);
    auto pred_ds = cf::datastore::read_dataset(pred_path);
    std::map<std::pair<std::string, std::string>, cf::ccs::CommitType> pred_by_key;
    for (const auto& c : pred_ds) pred_by_key[{c.raw.repo_id, c.raw.hash}] = c.ccs.type;
    std::vector<cf::ccs::CommitType> gold, pred;
    for (const auto& c : gold_ds) {
        auto it = pred_by_key.find({c.raw.repo_id, c.raw.hash});
        if (it == pred_by_key.end())
            throw std::runtime_error("prediction missing for " + c.raw.repo_id + " " +
                                     c.raw.hash);
        gold.push_back(c.ccs.type);
        pred.push_back(it->second);
    }
    auto [matrix, report] = cf::metrics::classification_report(gold, pred);
    json per_class = json::object();
    for (const auto& [label, scores] : report.per_class)
        per_class[label] = {{"precision", scores.precision},
                            {"recall", scores.recall},
                            {"f1", scores.f1}};
    json out_json = {{"accuracy", report.accuracy},
                     {"macro_precision", report.macro_precision},
                     {"macro_recall", report.macro_recall},
                     {"macro_f1", report.macro_f1},
                     {"per_class", per_class},
                     {"labels", matrix.labels},
                     {"confusion", matrix.counts},
                     {"total", matrix.total}};
    std::ofstream out(out_path, std::ios::trunc);
    out << out_json.dump(2) << '\n';
    if (!csv_path.empty()) {
        std::ofstream csv(csv_path, std::ios::trunc);
        csv << "class,precision,recall,f1\n";
        for (const auto& [label, scores] : report.per_class)
            csv << label << ',' << scores.precision << ',' << scores.recall << ','
                << scores.f1 << '\n';
        csv << "macro," << report.macro_precision << ',' << report.macro_recall << ','
            << report.macro_f1 << '\n';
        csv << "accuracy," << report.accuracy << ",,\n";
    }
    StageCounts counts;
    counts.add("pairs", long(gold.size()));
    write_manifest("eval-classify", out_path, {{"gold", gold_path}, {"pred", pred_path}},
                   {gold_path, pred_path}, counts, start);
    std::cout << "accuracy " << report.accuracy << ", macro-F1 " << report.macro_f1 << " -> "
              << out_path << "\n";
    return 0;
}

int run_eval_cmg(const std::string& in_path, const std::string& candidates_path,
                 const std::string& out_path, const std::string& csv_path,
                 const cf::judge::JudgeConfig& cfg) {
    auto start = now_epoch();
    auto commits = cf::datastore::read_dataset(in_path);
    std::map<std::pair<std::string, std::string>, const cf::datastore::AnnotatedCommit*> by_key;
    for (const auto& c : commits) by_key[{c.raw.repo_id, c.raw.hash}] = &c;

    std::ifstream cand_in(candidates_path);
    if (!cand_in) throw std::runtime_error("cannot open: " + candidates_path);
    std::vector<cf::judge::BatchItem> items;
    std::vector<std::string> references;
    std::string line;
    long lineno = 0;
    while (std::getline(cand_in, line)) {
        ++lineno;
        if (cf::text::trim(line).empty()) continue;
        json j = json::parse(line, nullptr, false);
        if (j.is_discarded())
            throw std::runtime_error(candidates_path + ": malformed JSON at line " +
                                     std::to_string(lineno));
        auto key = std::pair{j.at("repo_id").get<std::string>(),
                             j.at("hash").get<std::string>()};
        auto it = by_key.find(key);
        if (it == by_key.end())
            throw std::runtime_error("candidate for unknown commit " + key.first + " " +
                                     key.second);
        cf::judge::BatchItem item;
        item.id = key.first + ":" + key.second;
        item.ctx = make_context(*it->second);
        item.candidate_message = j.at("message").get<std::string>();
        items.push_back(std::move(item));
        references.push_back(it->second->raw.message);
    }
    auto batch = cf::judge::batch_evaluate(items, cfg);

    json rows = json::array();
    std::map<std::string, long> passes;
    long scored = 0;
    double bleu_sum = 0, rouge_sum = 0, meteor_sum = 0;
    for (std::size_t i = 0; i < items.size(); ++i) {
        json row = {{"id", items[i].id},
                    {"bleu", cf::metrics::bleu(items[i].candidate_message, {references[i]})},
                    {"rouge_l", cf::metrics::rouge_l(items[i].candidate_message, references[i])},
                    {"meteor", cf::metrics::meteor(items[i].candidate_message, references[i])}};
        bleu_sum += row["bleu"].get<double>();
        rouge_sum += row["rouge_l"].get<double>();
        meteor_sum += row["meteor"].get<double>();
        if (batch.verdicts[i]) {
            const auto& v = *batch.verdicts[i];
            row["verdict"] = verdict_to_json(v);
            passes["rationality"] += v.rationality;
            passes["comprehensiveness"] += v.comprehensiveness;
            passes["non_redundancy"] += v.non_redundancy;
            passes["authenticity"] += v.authenticity;
            passes["logicality"] += v.logicality;
            ++scored;
        } else {
            row["error"] = batch.manifest[i].error;
        }
        rows.push_back(std::move(row));
    }
    json rates = json::object();
    for (const auto& [metric, n] : passes)
        rates[metric] = scored ? double(n) / double(scored) : 0.0;
    json out_json = {{"items", rows},
                     {"binary_pass_rates", rates},
                     {"scored", scored},
                     {"mean_bleu", items.empty() ? 0.0 : bleu_sum / double(items.size())},
                     {"mean_rouge_l", items.empty() ? 0.0 : rouge_sum / double(items.size())},
                     {"mean_meteor", items.empty() ? 0.0 : meteor_sum / double(items.size())},
                     {"network_calls", batch.network_calls}};
    std::ofstream out(out_path, std::ios::trunc);
    out << out_json.dump(2) << '\n';
    if (!csv_path.empty()) {
        // ROUGE-L and METEOR printed x100 to mirror the usual table layout.
        std::ofstream csv(csv_path, std::ios::trunc);
        csv << "metric,value\n";
        csv << "BLEU," << out_json["mean_bleu"].get<double>() << '\n';
        csv << "ROUGE-L," << out_json["mean_rouge_l"].get<double>() * 100.0 << '\n';
        csv << "METEOR," << out_json["mean_meteor"].get<double>() * 100.0 << '\n';
        for (auto& [metric, rate] : rates.items())
            csv << metric << ',' << rate.get<double>() * 100.0 << '\n';
    }
    StageCounts counts;
    counts.add("candidates", long(items.size()));
    counts.add("scored", scored);
    counts.add("network_calls", batch.network_calls);
    write_manifest("eval-cmg", out_path, {{"candidates", candidates_path}},
                   {in_path, candidates_path}, counts, start);
    std::cout << "scored " << scored << "/" << items.size() << " candidates -> " << out_path
              << "\n";
    return 0;
}

std::vector<std::string> read_label_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    json j = json::parse(in);
    return j.get<std::vector<std::string>>();
}

int run_agreement(const std::vector<std::string>& rater_paths, const std::string& out_path) {
    auto start = now_epoch();
    std::vector<std::vector<std::string>> raters;
    for (const auto& p : rater_paths) raters.push_back(read_label_file(p));
    cf::metrics::AgreementReport report;
    if (raters.size() == 2) report = cf::metrics::cohen_kappa(raters[0], raters[1]);
    else report = cf::metrics::pairwise_kappa(raters);
    json out_json = {{"kappa", report.kappa},
                     {"observed_agreement", report.observed_agreement},
                     {"expected_agreement", report.expected_agreement}};
    if (report.pairwise_kappas) out_json["pairwise_kappas"] = *report.pairwise_kappas;
    if (report.pairwise_mean) out_json["pairwise_mean"] = *report.pairwise_mean;
    std::ofstream out(out_path, std::ios::trunc);
    out << out_json.dump(2) << '\n';
    StageCounts counts;
    counts.add("raters", long(raters.size()));
    counts.add("items", raters.empty() ? 0 : long(raters[0].size()));
    write_manifest("agreement", out_path, {{"raters", rater_paths}}, rater_paths, counts,
                   start);
    std::cout << "kappa " << report.kappa << " -> " << out_path << "\n";
    return 0;
}

int run_sign_test(long wins, long losses, bool two_sided) {
    double p = two_sided ? cf::metrics::sign_test_two_sided(wins, losses)
                         : cf::metrics::sign_test_one_sided(wins, losses);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", p);
    std::cout << buf << "\n";
    return 0;
}

int run_report(const std::string& stats_path, const std::string& classify_path,
               const std::string& cmg_path, const std::string& agreement_path,
               const std::string& out_path) {
    auto start = now_epoch();
    std::ostringstream md;
    md << "# commitforge report\n\n";
    std::vector<std::string> inputs;
    auto load = [](const std::string& p) {
        std::ifstream in(p);
        if (!in) throw std::runtime_error("cannot open: " + p);
        return json::parse(in);
    };
    if (!stats_path.empty()) {
        inputs.push_back(stats_path);
        json s = load(stats_path);
        md << "## Dataset\n\n"
           << "Total commits: " << s["total"].get<long>() << "\n\n";
        md << "| type | count |\n|---|---|\n";
        for (auto& [type, count] : s["type_histogram"].items())
            md << "| " << type << " | " << count.get<long>() << " |\n";
        md << "\n| what/why state | share |\n|---|---|\n";
        for (auto& [state, share] : s["what_why_shares"].items())
            md << "| " << state << " | " << share.get<double>() << " |\n";
        md << "\n";
    }
    if (!classify_path.empty()) {
        inputs.push_back(classify_path);
        json c = load(classify_path);
        md << "## Classification\n\n"
           << "Accuracy: " << c["accuracy"].get<double>() << "; macro-F1: "
           << c["macro_f1"].get<double>() << " over " << c["total"].get<long>()
           << " pairs\n\n";
    }
    if (!cmg_path.empty()) {
        inputs.push_back(cmg_path);
        json g = load(cmg_path);
        md << "## Message generation\n\n"
           << "Mean BLEU: " << g["mean_bleu"].get<double>() << "; mean ROUGE-L: "
           << g["mean_rouge_l"].get<double>() << "; mean METEOR: "
           << g["mean_meteor"].get<double>() << "\n\n";
        md << "| binary metric | pass rate |\n|---|---|\n";
        for (auto& [metric, rate] : g["binary_pass_rates"].items())
            md << "| " << metric << " | " << rate.get<double>() << " |\n";
        md << "\n";
    }
    if (!agreement_path.empty()) {
        inputs.push_back(agreement_path);
        json a = load(agreement_path);
        md << "## Agreement\n\nCohen's kappa: " << a["kappa"].get<double>() << "\n\n";
    }
    std::ofstream out(out_path, std::ios::trunc);
    out << md.str();
    StageCounts counts;
    counts.add("sections", long(inputs.size()));
    write_manifest("report", out_path, json::object(), inputs, counts, start);
    std::cout << "report -> " << out_path << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"commitforge: mine, filter, enrich, and evaluate Conventional-Commits "
                 "history"};
    app.set_version_flag("--version", kToolVersion);
    app.set_config("--config", "", "TOML-style key=value config file; flags win");
    app.require_subcommand(1);

    int jobs = 1;
    app.add_option("--jobs", jobs, "worker threads for mine/ast/annotate")
        ->check(CLI::PositiveNumber);

    // discover
    auto* discover = app.add_subcommand("discover", "select candidate repositories");
    std::string fixture, forge_url = "https://api.example.com", today, disc_out = "repos.json";
    discover->add_option("--fixture", fixture, "JSON fixture instead of a live forge");
    discover->add_option("--forge-url", forge_url, "forge base URL");
    discover->add_option("--today", today, "ISO date used for age computation")->required();
    discover->add_option("--out", disc_out, "output path");

    // mine
    auto* mine = app.add_subcommand("mine", "walk a git repository's history");
    std::string repo_path, repo_id, since, mine_out = "commits.jsonl";
    bool no_contents = false;
    mine->add_option("repo", repo_path, "path to a git repository")->required();
    mine->add_option("--repo-id", repo_id, "identifier stored with each commit");
    mine->add_option("--since", since, "ISO date lower bound (inclusive)");
    mine->add_option("--out", mine_out, "output path");
    mine->add_flag("--no-contents", no_contents, "skip full file texts");

    // filter
    auto* filter_cmd = app.add_subcommand("filter", "apply the filtering cascade");
    std::string filt_in, filt_out = "kept.jsonl", rejects, botlist;
    bool keep_robert = false, ignore_nonsource = false;
    double multiplier = 1.5;
    std::string outlier_mode = "union";
    filter_cmd->add_option("--in", filt_in, "input dataset")->required();
    filter_cmd->add_option("--out", filt_out, "output path");
    filter_cmd->add_option("--rejects", rejects, "write rejected commits here");
    filter_cmd->add_option("--botlist", botlist, "newline-delimited bot names");
    filter_cmd->add_flag("--keep-robert", keep_robert, "disable the 'robert' substring rule");
    filter_cmd->add_flag("--ignore-nonsource", ignore_nonsource,
                         "ignore files outside the supported languages");
    filter_cmd->add_option("--multiplier", multiplier, "IQR fence multiplier");
    filter_cmd->add_option("--outlier-mode", outlier_mode, "union or sequential")
        ->check(CLI::IsMember({"union", "sequential"}));

    // ast
    auto* ast_cmd = app.add_subcommand("ast", "attach structural changes and hunk contexts");
    std::string ast_in, ast_out = "ast.jsonl";
    ast_cmd->add_option("--in", ast_in, "input dataset")->required();
    ast_cmd->add_option("--out", ast_out, "output path");

    // annotate
    auto* annotate = app.add_subcommand("annotate", "what/why annotation of messages");
    std::string ann_in, ann_out = "annotated.jsonl", judge_backend = "rule";
    std::string judge_endpoint, judge_model = "judge-model", judge_cache;
    int rpm = 0;
    annotate->add_option("--in", ann_in, "input dataset")->required();
    annotate->add_option("--out", ann_out, "output path");
    annotate->add_option("--judge", judge_backend, "rule or chat")
        ->check(CLI::IsMember({"rule", "chat"}));
    annotate->add_option("--endpoint", judge_endpoint, "chat endpoint base URL");
    annotate->add_option("--model", judge_model, "judge model name");
    annotate->add_option("--cache", judge_cache, "verdict cache directory");
    annotate->add_option("--rpm", rpm, "requests-per-minute cap (0 = unlimited)");

    // stats
    auto* stats = app.add_subcommand("stats", "dataset distribution tables");
    std::string stats_in, stats_out = "stats.json", svg;
    stats->add_option("--in", stats_in, "input dataset")->required();
    stats->add_option("--out", stats_out, "output path");
    stats->add_option("--svg", svg, "also write an SVG histogram");

    // subset
    auto* subset = app.add_subcommand("subset", "sample an evaluation subset");
    std::string sub_in, sub_kind, sub_out = "subset.json";
    std::uint64_t seed = 0;
    int per_class = 116;
    std::vector<std::string> quota_args;
    subset->add_option("--in", sub_in, "input dataset")->required();
    subset->add_option("--kind", sub_kind, "ten or cmg")->required();
    subset->add_option("--seed", seed, "sampling seed (reproducibility contract)")
        ->required();
    subset->add_option("--per-class", per_class, "commits per type (ten)");
    subset->add_option("--quota", quota_args, "override a language quota, group=count (cmg)");
    subset->add_option("--out", sub_out, "output path");

    // eval-classify
    auto* eval_classify = app.add_subcommand("eval-classify", "type-classification report");
    std::string gold_path, pred_path, cls_out = "classify.json", cls_csv;
    eval_classify->add_option("--gold", gold_path, "gold dataset")->required();
    eval_classify->add_option("--pred", pred_path, "predicted dataset")->required();
    eval_classify->add_option("--out", cls_out, "output path");
    eval_classify->add_option("--csv", cls_csv, "also write a per-class CSV table");

    // eval-cmg
    auto* eval_cmg = app.add_subcommand("eval-cmg", "score generated commit messages");
    std::string cmg_in, candidates, cmg_out = "cmg.json", cmg_csv;
    std::string cmg_backend = "rule", cmg_endpoint, cmg_model = "judge-model", cmg_cache;
    int cmg_rpm = 0;
    eval_cmg->add_option("--in", cmg_in, "annotated dataset")->required();
    eval_cmg->add_option("--candidates", candidates,
                         "JSONL of {repo_id, hash, message} rows")
        ->required();
    eval_cmg->add_option("--out", cmg_out, "output path");
    eval_cmg->add_option("--csv", cmg_csv, "also write a metric CSV table (x100 layout)");
    eval_cmg->add_option("--judge", cmg_backend, "rule or chat")
        ->check(CLI::IsMember({"rule", "chat"}));
    eval_cmg->add_option("--endpoint", cmg_endpoint, "chat endpoint base URL");
    eval_cmg->add_option("--model", cmg_model, "judge model name");
    eval_cmg->add_option("--cache", cmg_cache, "verdict cache directory");
    eval_cmg->add_option("--rpm", cmg_rpm, "requests-per-minute cap");

    // agreement
    auto* agreement = app.add_subcommand("agreement", "inter-rater kappa");
    std::vector<std::string> rater_paths;
    std::string agr_out = "agreement.json";
    agreement->add_option("--raters", rater_paths, "two or more JSON label arrays")
        ->required()
        ->expected(2, -1);
    agreement->add_option("--out", agr_out, "output path");

    // sign-test
    auto* sign = app.add_subcommand("sign-test", "exact binomial sign test");
    long wins = 0, losses = 0;
    bool two_sided = false;
    sign->add_option("--wins", wins)->required();
    sign->add_option("--losses", losses)->required();
    sign->add_flag("--two-sided", two_sided);

    // report
    auto* report = app.add_subcommand("report", "assemble a markdown report");
    std::string rpt_stats, rpt_classify, rpt_cmg, rpt_agreement, rpt_out = "report.md";
    report->add_option("--stats", rpt_stats);
    report->add_option("--classify", rpt_classify);
    report->add_option("--cmg", rpt_cmg);
    report->add_option("--agreement", rpt_agreement);
    report->add_option("--out", rpt_out, "output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*discover) return run_discover(fixture, forge_url, today, disc_out);
        if (*mine) return run_mine(repo_path, repo_id, since, mine_out, !no_contents);
        if (*filter_cmd)
            return run_filter(filt_in, filt_out, rejects, botlist, keep_robert,
                              ignore_nonsource, multiplier, outlier_mode);
        if (*ast_cmd) return run_ast(ast_in, ast_out, jobs);
        if (*annotate)
            return run_annotate(ann_in, ann_out,
                                judge_config_from(judge_backend == "chat" ? "chat" : "rule",
                                                  judge_endpoint, judge_model, judge_cache,
                                                  rpm),
                                jobs);
        if (*stats) return run_stats(stats_in, stats_out, svg);
        if (*subset) return run_subset(sub_in, sub_kind, seed, per_class, quota_args, sub_out);
        if (*eval_classify)
            return run_eval_classify(gold_path, pred_path, cls_out, cls_csv);
        if (*eval_cmg)
            return run_eval_cmg(cmg_in, candidates, cmg_out, cmg_csv,
                                judge_config_from(cmg_backend == "chat" ? "chat" : "rule",
                                                  cmg_endpoint, cmg_model, cmg_cache,
                                                  cmg_rpm));
        if (*agreement) return run_agreement(rater_paths, agr_out);
        if (*sign) return run_sign_test(wins, losses, two_sided);
        if (*report) return run_report(rpt_stats, rpt_classify, rpt_cmg, rpt_agreement, rpt_out);
    } catch (const EnvError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
