#include "commitforge/filter.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "commitforge/text.hpp"

namespace commitforge::filter {

StageOutcome filter_ccs_format(const miner::RawCommit& commit) {
    auto parsed = ccs::parse_message(commit.message);
    if (parsed.ok()) return {true, ""};
    return {false, std::string(ccs::to_string(parsed.error().kind))};
}

StageOutcome filter_single_language(const miner::RawCommit& commit, bool ignore_nonsource) {
    std::set<miner::Language> langs;
    bool has_nonsource = false;
    for (const auto& mod : commit.modifications) {
        if (miner::is_supported_language(mod.language)) langs.insert(mod.language);
        else has_nonsource = true;
    }
    if (!ignore_nonsource && has_nonsource)
        return {false, "touches files outside the seven supported languages"};
    if (langs.empty()) return {false, "no supported-language file"};
    if (langs.size() > 1) return {false, "touches files of multiple languages"};
    return {true, std::string(miner::to_string(*langs.begin()))};
}

StageOutcome filter_bots(const miner::RawCommit& commit, const BotFilterOptions& opts) {
    auto check_field = [&](const std::string& field) -> std::optional<std::string> {
        if (text::contains_ci(field, "bot")) return "contains 'bot'";
        if (text::contains_ci(field, "b0t")) return "contains 'b0t'";
        if (opts.filter_robert && text::contains_ci(field, "robert"))
            return "contains 'robert'";
        std::string lower = text::to_lower(field);
        for (const auto& name : opts.botlist) {
            if (lower == text::to_lower(name)) return "matches botlist entry '" + name + "'";
        }
        return std::nullopt;
    };
    if (auto r = check_field(commit.author_name)) return {false, "author name " + *r};
    if (auto r = check_field(commit.author_email)) return {false, "author email " + *r};
    return {true, ""};
}

StageOutcome filter_multi_type(const miner::RawCommit& commit) {
    auto verdict = ccs::detect_multi_type(commit.message);
    if (verdict.status == ccs::ComplianceStatus::multi_type) {
        std::string types;
        for (auto t : verdict.matched_types) {
            if (!types.empty()) types += ",";
            types += ccs::to_string(t);
        }
        return {false, "stacked type headers: " + types};
    }
    return {true, ""};
}

std::vector<std::string> load_botlist(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open botlist: " + path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::string name = text::trim(line);
        if (!name.empty()) names.push_back(name);
    }
    return names;
}

FilterProvenance run_stages(const miner::RawCommit& commit, const StageOptions& opts) {
    FilterProvenance prov;
    auto run = [&](const char* name, StageOutcome outcome) {
        prov.stage_results.push_back({name, outcome.pass, outcome.reason});
        return outcome.pass;
    };
    prov.kept = run("ccs_format", filter_ccs_format(commit)) &&
                run("single_language", filter_single_language(commit, opts.ignore_nonsource)) &&
                run("bot", filter_bots(commit, opts.bots)) &&
                run("multi_type", filter_multi_type(commit));
    return prov;
}

double OutlierMetrics::get(std::size_t i) const {
    switch (i) {
    case 0: return diff_length_chars;
    case 1: return description_chars;
    case 2: return diff_tokens;
    case 3: return description_tokens;
    case 4: return files_modified;
    }
    throw std::out_of_range("OutlierMetrics::get");
}

OutlierMetrics outlier_metrics(const miner::RawCommit& commit) {
    OutlierMetrics m;
    std::string all_diffs;
    for (const auto& mod : commit.modifications) all_diffs += mod.unified_diff;
    m.diff_length_chars = double(all_diffs.size());
    m.diff_tokens = double(text::count_tokens(all_diffs));
    m.files_modified = double(commit.modifications.size());

    std::string description;
    auto parsed = ccs::parse_message(commit.message);
    if (parsed.ok()) {
        description = parsed.value().description;
    } else {
        auto lines = text::split_lines(commit.message);
        if (!lines.empty()) description = lines[0];
    }
    m.description_chars = double(description.size());
    m.description_tokens = double(text::count_tokens(description));
    return m;
}

DistributionStats compute_iqr_fences(std::vector<double> values, double multiplier,
                                     const std::string& metric_name) {
    if (values.empty()) throw std::invalid_argument("compute_iqr_fences: empty input");
    std::sort(values.begin(), values.end());
    auto quantile = [&](double p) {
        double h = double(values.size() - 1) * p;
        std::size_t lo = static_cast<std::size_t>(std::floor(h));
        std::size_t hi = static_cast<std::size_t>(std::ceil(h));
        return values[lo] + (h - double(lo)) * (values[hi] - values[lo]);
    };
    DistributionStats s;
    s.metric_name = metric_name;
    s.multiplier = multiplier;
    s.q1 = quantile(0.25);
    s.q3 = quantile(0.75);
    s.iqr = s.q3 - s.q1;
    s.lower_fence = s.q1 - multiplier * s.iqr;
    s.upper_fence = s.q3 + multiplier * s.iqr;
    return s;
}

OutlierResult remove_outliers(const std::vector<OutlierMetrics>& values, double multiplier,
                              OutlierMode mode) {
    OutlierResult result;
    result.kept.assign(values.size(), true);
    if (values.empty()) return result;

    if (mode == OutlierMode::union_rule) {
        for (std::size_t metric = 0; metric < kOutlierMetricNames.size(); ++metric) {
            std::vector<double> col;
            col.reserve(values.size());
            for (const auto& v : values) col.push_back(v.get(metric));
            auto fences =
                compute_iqr_fences(std::move(col), multiplier, kOutlierMetricNames[metric]);
            for (std::size_t i = 0; i < values.size(); ++i) {
                double x = values[i].get(metric);
                if (x < fences.lower_fence || x > fences.upper_fence) result.kept[i] = false;
            }
            result.fences.push_back(std::move(fences));
        }
    } else {
        for (std::size_t metric = 0; metric < kOutlierMetricNames.size(); ++metric) {
            std::vector<double> col;
            for (std::size_t i = 0; i < values.size(); ++i)
                if (result.kept[i]) col.push_back(values[i].get(metric));
            if (col.empty()) break;
            auto fences =
                compute_iqr_fences(std::move(col), multiplier, kOutlierMetricNames[metric]);
            for (std::size_t i = 0; i < values.size(); ++i) {
                if (!result.kept[i]) continue;
                double x = values[i].get(metric);
                if (x < fences.lower_fence || x > fences.upper_fence) result.kept[i] = false;
            }
            result.fences.push_back(std::move(fences));
        }
    }
    return result;
}

} // namespace commitforge::filter
