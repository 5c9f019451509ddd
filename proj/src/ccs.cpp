#include "commitforge/ccs.hpp"

#include <cctype>

#include "commitforge/text.hpp"

namespace commitforge::ccs {

namespace {

const std::array<std::string_view, 10> kTypeNames = {
    "feat", "fix", "perf", "style", "refactor", "docs", "test", "ci", "build", "chore"};

bool is_letter(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }

bool is_token_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0 || c == '-';
}

// `Token: value` or `Token #value`; BREAKING CHANGE keeps its space.
std::optional<std::pair<std::string, std::string>> parse_footer_line(const std::string& line) {
    std::string_view sv(line);
    std::string token;
    std::size_t rest = 0;
    if (sv.rfind("BREAKING CHANGE", 0) == 0) {
        token = "BREAKING CHANGE";
        rest = token.size();
    } else if (sv.rfind("BREAKING-CHANGE", 0) == 0) {
        token = "BREAKING-CHANGE";
        rest = token.size();
    } else {
        while (rest < sv.size() && is_token_char(sv[rest])) ++rest;
        if (rest == 0) return std::nullopt;
        token = std::string(sv.substr(0, rest));
    }
    if (rest >= sv.size()) return std::nullopt;
    if (sv[rest] == ':') {
        std::string value = text::trim(sv.substr(rest + 1));
        if (value.empty()) return std::nullopt;
        return std::make_pair(token, value);
    }
    if (sv[rest] == ' ' && rest + 1 < sv.size() && sv[rest + 1] == '#') {
        std::string value = text::trim(sv.substr(rest + 2));
        if (value.empty()) return std::nullopt;
        return std::make_pair(token, value);
    }
    return std::nullopt;
}

// Matches `<type>[(<scope>)][!]:` at the start of a (whitespace-trimmed) line.
std::optional<CommitType> match_header_prefix(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t start = i;
    while (i < line.size() && is_letter(line[i])) ++i;
    if (i == start) return std::nullopt;
    auto type = type_from_string(std::string_view(line).substr(start, i - start));
    if (!type) return std::nullopt;
    if (i < line.size() && line[i] == '(') {
        std::size_t close = line.find(')', i + 1);
        if (close == std::string::npos) return std::nullopt;
        std::string_view scope = std::string_view(line).substr(i + 1, close - i - 1);
        if (scope.empty() || scope.find_first_of("():") != std::string_view::npos)
            return std::nullopt;
        i = close + 1;
    }
    if (i < line.size() && line[i] == '!') ++i;
    if (i < line.size() && line[i] == ':') return type;
    return std::nullopt;
}

} // namespace

std::string_view to_string(CommitType t) { return kTypeNames[static_cast<std::size_t>(t)]; }

std::string_view to_string(ParseErrorKind k) {
    switch (k) {
    case ParseErrorKind::missing_colon: return "missing-colon";
    case ParseErrorKind::unknown_type: return "unknown-type";
    case ParseErrorKind::empty_description: return "empty-description";
    case ParseErrorKind::malformed_scope: return "malformed-scope";
    }
    return "unknown";
}

std::optional<CommitType> type_from_string(std::string_view s) {
    std::string lower = text::to_lower(s);
    for (std::size_t i = 0; i < kTypeNames.size(); ++i) {
        if (lower == kTypeNames[i]) return kAllTypes[i];
    }
    return std::nullopt;
}

ParseResult parse_message(std::string_view raw) {
    auto lines = text::split_lines(raw);
    if (lines.empty()) return ParseError{ParseErrorKind::missing_colon, "empty message"};
    std::string header = text::trim(lines[0]);

    std::size_t colon = header.find(':');
    if (colon == std::string::npos)
        return ParseError{ParseErrorKind::missing_colon, "header has no ':'"};

    std::string prefix = header.substr(0, colon);
    CcsMessage msg;
    if (!prefix.empty() && prefix.back() == '!') {
        msg.breaking = true;
        prefix.pop_back();
    }
    std::string type_str = prefix;
    std::size_t open = prefix.find('(');
    if (open != std::string::npos) {
        if (prefix.empty() || prefix.back() != ')')
            return ParseError{ParseErrorKind::malformed_scope, "unterminated scope"};
        std::string scope = prefix.substr(open + 1, prefix.size() - open - 2);
        if (scope.empty())
            return ParseError{ParseErrorKind::malformed_scope, "empty scope"};
        if (scope.find_first_of("()") != std::string::npos)
            return ParseError{ParseErrorKind::malformed_scope, "nested parentheses in scope"};
        msg.scope = scope;
        type_str = prefix.substr(0, open);
    } else if (prefix.find(')') != std::string::npos) {
        return ParseError{ParseErrorKind::malformed_scope, "')' without '('"};
    }

    for (char c : type_str) {
        if (!is_letter(c))
            return ParseError{ParseErrorKind::unknown_type, "non-letter in type: " + type_str};
    }
    auto type = type_from_string(type_str);
    if (!type) return ParseError{ParseErrorKind::unknown_type, "not a CCS type: " + type_str};
    msg.type = *type;

    msg.description = text::trim(std::string_view(header).substr(colon + 1));
    if (msg.description.empty())
        return ParseError{ParseErrorKind::empty_description, "header has no description"};

    // Body and footers: paragraphs after the header; the last paragraph is a
    // footer block iff every line in it parses as a footer.
    std::size_t li = 1;
    while (li < lines.size() && text::trim(lines[li]).empty()) ++li;
    std::vector<std::vector<std::string>> paragraphs;
    std::vector<std::string> current;
    for (; li < lines.size(); ++li) {
        if (text::trim(lines[li]).empty()) {
            if (!current.empty()) paragraphs.push_back(std::move(current));
            current.clear();
        } else {
            current.push_back(lines[li]);
        }
    }
    if (!current.empty()) paragraphs.push_back(std::move(current));

    if (!paragraphs.empty()) {
        const auto& last = paragraphs.back();
        std::vector<std::pair<std::string, std::string>> footers;
        bool all_footers = true;
        for (const auto& line : last) {
            auto f = parse_footer_line(line);
            if (!f) {
                all_footers = false;
                break;
            }
            footers.push_back(std::move(*f));
        }
        if (all_footers) {
            msg.footers = std::move(footers);
            paragraphs.pop_back();
        }
    }
    if (!paragraphs.empty()) {
        std::string body;
        for (std::size_t p = 0; p < paragraphs.size(); ++p) {
            if (p) body += "\n\n";
            for (std::size_t l = 0; l < paragraphs[p].size(); ++l) {
                if (l) body += '\n';
                body += paragraphs[p][l];
            }
        }
        msg.body = std::move(body);
    }
    return msg;
}

std::string format_message(const CcsMessage& msg) {
    std::string out(to_string(msg.type));
    if (msg.scope) {
        out += '(';
        out += *msg.scope;
        out += ')';
    }
    if (msg.breaking) out += '!';
    out += ": ";
    out += msg.description;
    if (msg.body) {
        out += "\n\n";
        out += *msg.body;
    }
    if (!msg.footers.empty()) {
        out += "\n";
        for (const auto& [token, value] : msg.footers) {
            out += "\n";
            out += token;
            out += ": ";
            out += value;
        }
    }
    return out;
}

ComplianceVerdict detect_multi_type(std::string_view raw) {
    ComplianceVerdict verdict;
    for (const auto& line : text::split_lines(raw)) {
        if (auto t = match_header_prefix(line)) verdict.matched_types.push_back(*t);
    }
    if (verdict.matched_types.size() >= 2) {
        verdict.status = ComplianceStatus::multi_type;
    } else if (parse_message(raw).ok()) {
        verdict.status = ComplianceStatus::compliant;
    } else {
        verdict.status = ComplianceStatus::non_compliant;
    }
    return verdict;
}

} // namespace commitforge::ccs
