#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "commitforge/filter.hpp"

using namespace commitforge;

namespace {

miner::RawCommit make_commit(const std::string& message, const std::string& author = "Dev One",
                             const std::string& email = "dev@example.com",
                             const std::vector<std::string>& paths = {"src/a.cpp"}) {
    miner::RawCommit c;
    c.repo_id = "r";
    c.hash = std::string(40, 'a');
    c.author_name = author;
    c.author_email = email;
    c.message = message;
    for (const auto& p : paths) {
        miner::FileModification m;
        m.path_before = p;
        m.path_after = p;
        m.language = miner::detect_language(p);
        m.unified_diff = "--- a/" + p + "\n+++ b/" + p + "\n@@ -1,1 +1,1 @@\n-x\n+y\n";
        c.modifications.push_back(std::move(m));
    }
    return c;
}

// Independent quantile oracle: index arithmetic written out directly.
double quantile_oracle(std::vector<double> v, double p) {
    std::sort(v.begin(), v.end());
    std::size_t n = v.size();
    double h = p * double(n - 1);
    std::size_t idx = std::size_t(h);
    double frac = h - double(idx);
    if (idx + 1 < n) return v[idx] * (1.0 - frac) + v[idx + 1] * frac;
    return v[idx];
}

} // namespace

TEST_CASE("ccs_format stage reports the parse error kind") {
    CHECK(filter::filter_ccs_format(make_commit("feat: ok")).pass);
    auto fail = filter::filter_ccs_format(make_commit("not conventional"));
    CHECK_FALSE(fail.pass);
    CHECK(fail.reason == "missing-colon");
}

TEST_CASE("single_language stage") {
    auto one = filter::filter_single_language(make_commit("feat: x", "d", "e", {"a.py"}));
    CHECK(one.pass);
    CHECK(one.reason == "python");

    auto mixed =
        filter::filter_single_language(make_commit("feat: x", "d", "e", {"a.py", "b.go"}));
    CHECK_FALSE(mixed.pass);

    auto docs_strict =
        filter::filter_single_language(make_commit("feat: x", "d", "e", {"README.md"}));
    CHECK_FALSE(docs_strict.pass);
    auto docs_lenient =
        filter::filter_single_language(make_commit("feat: x", "d", "e", {"README.md"}), true);
    CHECK_FALSE(docs_lenient.pass);
    CHECK(docs_lenient.reason == "no supported-language file");

    // A supported + unsupported mix fails strictly, passes with ignore_nonsource.
    auto strict =
        filter::filter_single_language(make_commit("feat: x", "d", "e", {"a.py", "doc.md"}));
    CHECK_FALSE(strict.pass);
    auto lenient = filter::filter_single_language(
        make_commit("feat: x", "d", "e", {"a.py", "doc.md"}), true);
    CHECK(lenient.pass);

    // C and C++ are distinct languages at this stage.
    auto c_cpp =
        filter::filter_single_language(make_commit("feat: x", "d", "e", {"a.c", "b.cpp"}));
    CHECK_FALSE(c_cpp.pass);
}

TEST_CASE("bot stage: substring rules and botlist") {
    filter::BotFilterOptions opts;
    CHECK_FALSE(filter::filter_bots(make_commit("feat: x", "dependabot[bot]"), opts).pass);
    CHECK_FALSE(filter::filter_bots(make_commit("feat: x", "ok", "ci-b0t@x.io"), opts).pass);
    CHECK_FALSE(filter::filter_bots(make_commit("feat: x", "Robert Smith"), opts).pass);
    CHECK_FALSE(filter::filter_bots(make_commit("feat: x", "RoBoT"), opts).pass);
    CHECK(filter::filter_bots(make_commit("feat: x", "Alice"), opts).pass);

    opts.filter_robert = false;
    CHECK(filter::filter_bots(make_commit("feat: x", "Robert Smith"), opts).pass);

    opts.botlist = {"release-automation"};
    CHECK_FALSE(filter::filter_bots(make_commit("feat: x", "Release-Automation"), opts).pass);
    CHECK(filter::filter_bots(make_commit("feat: x", "release-automation-2"), opts).pass);
}

TEST_CASE("multi_type stage") {
    CHECK(filter::filter_multi_type(make_commit("feat: one change")).pass);
    auto fail = filter::filter_multi_type(make_commit("feat: one\nfix: two"));
    CHECK_FALSE(fail.pass);
    CHECK(fail.reason.find("feat") != std::string::npos);
    CHECK(fail.reason.find("fix") != std::string::npos);
}

TEST_CASE("run_stages short-circuits at the first failure") {
    filter::StageOptions opts;
    auto prov = filter::run_stages(make_commit("not conventional"), opts);
    CHECK_FALSE(prov.kept);
    REQUIRE(prov.stage_results.size() == 1);
    CHECK(prov.stage_results[0].stage == "ccs_format");

    auto ok = filter::run_stages(make_commit("feat: fine"), opts);
    CHECK(ok.kept);
    REQUIRE(ok.stage_results.size() == 4);
    CHECK(ok.stage_results[3].stage == "multi_type");
}

TEST_CASE("IQR fences: documented small example flags 100") {
    auto s = filter::compute_iqr_fences({1, 2, 3, 4, 100}, 1.5);
    CHECK(s.q1 == doctest::Approx(2.0));
    CHECK(s.q3 == doctest::Approx(4.0));
    CHECK(s.upper_fence == doctest::Approx(7.0));
    CHECK(100.0 > s.upper_fence);
    CHECK_THROWS_AS(filter::compute_iqr_fences({}, 1.5), std::invalid_argument);
}

TEST_CASE("IQR fences equal the brute-force quantile oracle on 1,000 samples per metric") {
    std::mt19937_64 rng(2024);
    for (std::size_t metric = 0; metric < filter::kOutlierMetricNames.size(); ++metric) {
        std::vector<double> values;
        for (int i = 0; i < 1000; ++i) {
            // heavy-tailed-ish positive values
            double v = double(rng() % 1000) + (rng() % 50 == 0 ? 5000.0 : 0.0);
            values.push_back(v);
        }
        auto s = filter::compute_iqr_fences(values, 1.5, filter::kOutlierMetricNames[metric]);
        double q1 = quantile_oracle(values, 0.25);
        double q3 = quantile_oracle(values, 0.75);
        CHECK(s.q1 == doctest::Approx(q1).epsilon(1e-12));
        CHECK(s.q3 == doctest::Approx(q3).epsilon(1e-12));
        CHECK(s.lower_fence == doctest::Approx(q1 - 1.5 * (q3 - q1)).epsilon(1e-12));
        CHECK(s.upper_fence == doctest::Approx(q3 + 1.5 * (q3 - q1)).epsilon(1e-12));
    }
}

TEST_CASE("union-rule flagged sets equal an independent oracle") {
    std::mt19937_64 rng(77);
    std::vector<filter::OutlierMetrics> rows;
    for (int i = 0; i < 1000; ++i) {
        filter::OutlierMetrics m;
        m.diff_length_chars = double(rng() % 5000);
        m.description_chars = double(rng() % 200);
        m.diff_tokens = double(rng() % 900);
        m.description_tokens = double(rng() % 40);
        m.files_modified = double(1 + rng() % 12);
        rows.push_back(m);
    }
    auto result = filter::remove_outliers(rows, 1.5);
    REQUIRE(result.kept.size() == rows.size());
    REQUIRE(result.fences.size() == 5);

    for (std::size_t i = 0; i < rows.size(); ++i) {
        bool oracle_keep = true;
        for (std::size_t metric = 0; metric < 5; ++metric) {
            std::vector<double> col;
            for (const auto& r : rows) col.push_back(r.get(metric));
            double q1 = quantile_oracle(col, 0.25);
            double q3 = quantile_oracle(col, 0.75);
            double lo = q1 - 1.5 * (q3 - q1), hi = q3 + 1.5 * (q3 - q1);
            double x = rows[i].get(metric);
            if (x < lo || x > hi) oracle_keep = false;
        }
        CHECK(result.kept[i] == oracle_keep);
    }
}

TEST_CASE("multiplier monotonicity over 100 random multiplier pairs") {
    std::mt19937_64 rng(31337);
    std::vector<filter::OutlierMetrics> rows;
    for (int i = 0; i < 400; ++i) {
        filter::OutlierMetrics m;
        m.diff_length_chars = double(rng() % 3000);
        m.description_chars = double(rng() % 150);
        m.diff_tokens = double(rng() % 700);
        m.description_tokens = double(rng() % 30);
        m.files_modified = double(1 + rng() % 9);
        rows.push_back(m);
    }
    for (int trial = 0; trial < 100; ++trial) {
        double k1 = double(rng() % 300) / 100.0;
        double k2 = double(rng() % 300) / 100.0;
        if (k1 > k2) std::swap(k1, k2);
        auto loose = filter::remove_outliers(rows, k2);
        auto tight = filter::remove_outliers(rows, k1);
        // Larger multiplier = wider fences: everything kept under k1 stays kept under k2.
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (tight.kept[i]) CHECK(loose.kept[i]);
        }
    }
}

TEST_CASE("sequential mode recomputes fences over survivors") {
    // Rows 0-1 are extreme on metric 0 and carry large metric-1 values. The
    // union rule computes metric-1 fences over the full population (their 200s
    // included); sequential mode drops them at metric 0 first, so its metric-1
    // fences are computed over the survivors only.
    std::vector<filter::OutlierMetrics> rows;
    for (int i = 0; i < 16; ++i) {
        filter::OutlierMetrics m;
        m.diff_length_chars = 100.0 + i;
        m.description_chars = 50.0 + i;
        m.diff_tokens = 10.0;
        m.description_tokens = 5.0;
        m.files_modified = 1.0;
        rows.push_back(m);
    }
    rows[0].diff_length_chars = rows[1].diff_length_chars = 1e6;
    rows[0].description_chars = rows[1].description_chars = 200.0;

    auto uni = filter::remove_outliers(rows, 1.5, filter::OutlierMode::union_rule);
    auto seq = filter::remove_outliers(rows, 1.5, filter::OutlierMode::sequential);
    CHECK_FALSE(uni.kept[0]);
    CHECK_FALSE(seq.kept[0]);
    CHECK_FALSE(uni.kept[1]);
    CHECK_FALSE(seq.kept[1]);
    for (int i = 2; i < 16; ++i) {
        CHECK(uni.kept[i]);
        CHECK(seq.kept[i]);
    }
    // The second-stage fences demonstrably exclude the removed rows.
    REQUIRE(uni.fences.size() == 5);
    REQUIRE(seq.fences.size() == 5);
    CHECK(seq.fences[1].q3 < uni.fences[1].q3);
    // Survivor population for metric 1 is rows 2..15 (values 52..65).
    std::vector<double> survivor_vals;
    for (int i = 2; i < 16; ++i) survivor_vals.push_back(50.0 + i);
    CHECK(seq.fences[1].q1 == doctest::Approx(quantile_oracle(survivor_vals, 0.25)));
    CHECK(seq.fences[1].q3 == doctest::Approx(quantile_oracle(survivor_vals, 0.75)));
}

TEST_CASE("outlier_metrics uses the parsed description and the shared tokenizer") {
    auto c = make_commit("feat(core): add two words");
    auto m = filter::outlier_metrics(c);
    CHECK(m.description_chars == double(std::string("add two words").size()));
    CHECK(m.description_tokens == 3.0);
    CHECK(m.files_modified == 1.0);
    CHECK(m.diff_length_chars == double(c.modifications[0].unified_diff.size()));

    // Unparseable message: falls back to the first line.
    auto raw = make_commit("just words here\nmore");
    CHECK(filter::outlier_metrics(raw).description_chars ==
          double(std::string("just words here").size()));
}

TEST_CASE("load_botlist strips comments and blanks") {
    std::string path = "/tmp/cf_botlist_test.txt";
    {
        std::ofstream out(path);
        out << "# comment\nrenovate\n\n  github-actions  # trailing\n";
    }
    auto names = filter::load_botlist(path);
    REQUIRE(names.size() == 2);
    CHECK(names[0] == "renovate");
    CHECK(names[1] == "github-actions");
    CHECK_THROWS(filter::load_botlist("/nonexistent/botlist"));
}
