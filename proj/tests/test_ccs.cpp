#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "commitforge/ccs.hpp"

using namespace commitforge;
using ccs::CcsMessage;
using ccs::CommitType;
using ccs::ParseErrorKind;

namespace {

// Valid-message generator for the round-trip property. Bodies use word-only
// lines (no ':' or '#') so the trailing paragraph can never be mistaken for a
// footer block, which is required for format->parse identity.
CcsMessage random_message(std::mt19937_64& rng) {
    auto pick = [&](std::size_t n) { return std::size_t(rng() % n); };
    static const std::vector<std::string> words = {
        "update", "handler", "cache",  "token",  "stream", "widget", "retry",
        "parser", "index",   "buffer", "config", "module", "guard",  "branch"};
    auto sentence = [&](std::size_t n) {
        std::string s;
        for (std::size_t i = 0; i < n; ++i) {
            if (i) s += ' ';
            s += words[pick(words.size())];
        }
        return s;
    };

    CcsMessage m;
    m.type = ccs::kAllTypes[pick(10)];
    if (pick(2)) {
        static const std::vector<std::string> scopes = {"core", "api", "ui-kit", "db2"};
        m.scope = scopes[pick(scopes.size())];
    }
    m.breaking = pick(4) == 0;
    m.description = sentence(2 + pick(5));
    if (pick(2)) {
        std::string body = sentence(3 + pick(6));
        if (pick(3) == 0) body += "\n\n" + sentence(3 + pick(6));
        m.body = body;
    }
    std::size_t footer_count = pick(3);
    static const std::vector<std::string> tokens = {"Reviewed-by", "Refs", "Closes",
                                                    "BREAKING CHANGE", "Acked-by"};
    for (std::size_t i = 0; i < footer_count; ++i)
        m.footers.emplace_back(tokens[pick(tokens.size())], sentence(1 + pick(3)));
    return m;
}

} // namespace

TEST_CASE("round-trip: parse(format(m)) == m for 1,000 generated messages") {
    std::mt19937_64 rng(20240817);
    for (int i = 0; i < 1000; ++i) {
        CcsMessage m = random_message(rng);
        auto parsed = ccs::parse_message(ccs::format_message(m));
        REQUIRE(parsed.ok());
        CHECK(parsed.value() == m);
    }
}

TEST_CASE("header grammar: plain, scoped, breaking") {
    auto r = ccs::parse_message("feat: add pagination");
    REQUIRE(r.ok());
    CHECK(r.value().type == CommitType::feat);
    CHECK_FALSE(r.value().scope.has_value());
    CHECK_FALSE(r.value().breaking);
    CHECK(r.value().description == "add pagination");

    r = ccs::parse_message("fix(parser)!: handle empty input");
    REQUIRE(r.ok());
    CHECK(r.value().type == CommitType::fix);
    CHECK(r.value().scope == "parser");
    CHECK(r.value().breaking);

    r = ccs::parse_message("REFACTOR: case-insensitive type");
    REQUIRE(r.ok());
    CHECK(r.value().type == CommitType::refactor);
}

TEST_CASE("body and footers split") {
    auto r = ccs::parse_message("feat(core): add cache\n\nLonger explanation\nacross lines.\n\n"
                                "Reviewed-by: someone\nCloses #42");
    REQUIRE(r.ok());
    CHECK(r.value().body == "Longer explanation\nacross lines.");
    REQUIRE(r.value().footers.size() == 2);
    CHECK(r.value().footers[0] == std::pair<std::string, std::string>{"Reviewed-by", "someone"});
    CHECK(r.value().footers[1] == std::pair<std::string, std::string>{"Closes", "42"});
}

TEST_CASE("BREAKING CHANGE footer keeps its space") {
    auto r = ccs::parse_message("feat: x\n\nBREAKING CHANGE: env vars renamed");
    REQUIRE(r.ok());
    REQUIRE(r.value().footers.size() == 1);
    CHECK(r.value().footers[0].first == "BREAKING CHANGE");
}

TEST_CASE("last paragraph stays body unless every line is a footer") {
    auto r = ccs::parse_message("fix: y\n\nRefs: 12\nbut this line is prose");
    REQUIRE(r.ok());
    CHECK(r.value().footers.empty());
    CHECK(r.value().body == "Refs: 12\nbut this line is prose");
}

TEST_CASE("error taxonomy") {
    auto expect_error = [](const char* raw, ParseErrorKind kind) {
        auto r = ccs::parse_message(raw);
        REQUIRE_FALSE(r.ok());
        CHECK(r.error().kind == kind);
    };
    expect_error("add a feature with no colon", ParseErrorKind::missing_colon);
    expect_error("", ParseErrorKind::missing_colon);
    expect_error("feature: misspelled type", ParseErrorKind::unknown_type);
    expect_error("wip: unknown type", ParseErrorKind::unknown_type);
    expect_error("feat:", ParseErrorKind::empty_description);
    expect_error("feat:   ", ParseErrorKind::empty_description);
    expect_error("feat(): empty scope", ParseErrorKind::malformed_scope);
    expect_error("feat(a(b)): nested", ParseErrorKind::malformed_scope);
    expect_error("feat(api: unterminated", ParseErrorKind::malformed_scope);
    expect_error("featapi): stray paren", ParseErrorKind::malformed_scope);
}

TEST_CASE("50-case fixture corpus") {
    struct Case {
        const char* raw;
        bool ok;
        CommitType type;
        const char* description;
    };
    const Case cases[] = {
        {"feat: a", true, CommitType::feat, "a"},
        {"fix: b", true, CommitType::fix, "b"},
        {"perf: c", true, CommitType::perf, "c"},
        {"style: d", true, CommitType::style, "d"},
        {"refactor: e", true, CommitType::refactor, "e"},
        {"docs: f", true, CommitType::docs, "f"},
        {"test: g", true, CommitType::test, "g"},
        {"ci: h", true, CommitType::ci, "h"},
        {"build: i", true, CommitType::build, "i"},
        {"chore: j", true, CommitType::chore, "j"},
        {"feat(core): a", true, CommitType::feat, "a"},
        {"fix(net)!: b", true, CommitType::fix, "b"},
        {"feat!: breaking without scope", true, CommitType::feat,
         "breaking without scope"},
        {"Chore: capitalized type", true, CommitType::chore, "capitalized type"},
        {"DOCS: shouting", true, CommitType::docs, "shouting"},
        {"feat:   padded   ", true, CommitType::feat, "padded"},
        {"  feat: leading header spaces", true, CommitType::feat, "leading header spaces"},
        {"fix(a-b-c): dashed scope", true, CommitType::fix, "dashed scope"},
        {"fix(v2): digit scope", true, CommitType::fix, "digit scope"},
        {"feat: desc\n\nbody", true, CommitType::feat, "desc"},
        {"feat: desc\n\nbody\n\nRefs: 1", true, CommitType::feat, "desc"},
        {"feat: desc\n\nCloses #9", true, CommitType::feat, "desc"},
        {"feat: desc\r\n\r\nwindows line endings", true, CommitType::feat, "desc"},
        {"fix: colon: inside description", true, CommitType::fix,
         "colon: inside description"},
        {"test: multi\n\npara one\n\npara two", true, CommitType::test, "multi"},
        {"build: deps\n\nBREAKING-CHANGE: abi", true, CommitType::build, "deps"},
        {"perf: p\n\nSigned-off-by: dev\nAcked-by: lead", true, CommitType::perf, "p"},
        {"style: s\n\nbody only footerish Refs 1", true, CommitType::style, "s"},
        {"ci: pipeline\n\n\n\nbody after extra blanks", true, CommitType::ci, "pipeline"},
        {"chore: unicode déscription", true, CommitType::chore, "unicode déscription"},
        // malformed
        {"no colon here", false, CommitType::feat, ""},
        {"", false, CommitType::feat, ""},
        {"unknown: type", false, CommitType::feat, ""},
        {"feature: long form not allowed", false, CommitType::feat, ""},
        {"feat:", false, CommitType::feat, ""},
        {"feat:    ", false, CommitType::feat, ""},
        {"feat(): x", false, CommitType::feat, ""},
        {"feat(a)b: trailing junk", false, CommitType::feat, ""},
        {"feat(a(: bad", false, CommitType::feat, ""},
        {"fix): x", false, CommitType::feat, ""},
        {"123: numeric type", false, CommitType::feat, ""},
        {"fe at: space in type", false, CommitType::feat, ""},
        {"!: only bang", false, CommitType::feat, ""},
        {"(scope): no type", false, CommitType::feat, ""},
        {"feat!(core): bang before scope", false, CommitType::feat, ""},
        {"just words\nfeat: on second line only", false, CommitType::feat, ""},
        {"fixx: near miss", false, CommitType::feat, ""},
        {"feat : space before colon", false, CommitType::feat, ""},
        {"refactor(: open scope", false, CommitType::feat, ""},
        {"docs())(: garbage", false, CommitType::feat, ""},
    };
    static_assert(sizeof(cases) / sizeof(cases[0]) == 50);
    for (const auto& c : cases) {
        auto r = ccs::parse_message(c.raw);
        INFO("raw = " << c.raw);
        CHECK(r.ok() == c.ok);
        if (c.ok && r.ok()) {
            CHECK(r.value().type == c.type);
            CHECK(r.value().description == c.description);
        }
    }
}

TEST_CASE("multi-type detection counts only line-initial headers") {
    auto v = ccs::detect_multi_type("feat: add a thing\nfix: and repair another");
    CHECK(v.status == ccs::ComplianceStatus::multi_type);
    REQUIRE(v.matched_types.size() == 2);
    CHECK(v.matched_types[0] == CommitType::feat);
    CHECK(v.matched_types[1] == CommitType::fix);

    // A type word mid-line is not a header.
    v = ccs::detect_multi_type("feat: mention fix: inside the description");
    CHECK(v.status == ccs::ComplianceStatus::compliant);

    v = ccs::detect_multi_type("feat: one\n\nbody\nfix(core)!: stacked later");
    CHECK(v.status == ccs::ComplianceStatus::multi_type);

    v = ccs::detect_multi_type("not conventional at all");
    CHECK(v.status == ccs::ComplianceStatus::non_compliant);
}

TEST_CASE("type string round-trip") {
    for (auto t : ccs::kAllTypes) {
        auto back = ccs::type_from_string(ccs::to_string(t));
        REQUIRE(back.has_value());
        CHECK(*back == t);
    }
    CHECK_FALSE(ccs::type_from_string("feature").has_value());
    CHECK_FALSE(ccs::type_from_string("").has_value());
}
