#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "commitforge/expected.hpp"

namespace commitforge::ccs {

/// The closed ten-category commit type taxonomy.
enum class CommitType { feat, fix, perf, style, refactor, docs, test, ci, build, chore };

constexpr std::array<CommitType, 10> kAllTypes = {
    CommitType::feat,  CommitType::fix,  CommitType::perf, CommitType::style,
    CommitType::refactor, CommitType::docs, CommitType::test, CommitType::ci,
    CommitType::build, CommitType::chore};

std::string_view to_string(CommitType t);

/// Case-insensitive lookup; returns nullopt for anything outside the ten values.
std::optional<CommitType> type_from_string(std::string_view s);

struct CcsMessage {
    CommitType type = CommitType::chore;
    std::optional<std::string> scope; // nonempty when present
    bool breaking = false;            // "!" before the colon
    std::string description;          // single line, trimmed, nonempty
    std::optional<std::string> body;
    std::vector<std::pair<std::string, std::string>> footers;

    bool operator==(const CcsMessage&) const = default;
};

enum class ParseErrorKind { missing_colon, unknown_type, empty_description, malformed_scope };

std::string_view to_string(ParseErrorKind k);

struct ParseError {
    ParseErrorKind kind;
    std::string detail;
};

using ParseResult = Expected<CcsMessage, ParseError>;

/// Parses a full commit message against the header grammar
/// `<type>[(<scope>)][!]: <description>` with an optional body and trailing
/// `Token: value` / `Token #value` footers.
ParseResult parse_message(std::string_view raw);

/// Canonical rendering; parse_message(format_message(m)) == m for any valid m.
std::string format_message(const CcsMessage& msg);

enum class ComplianceStatus { compliant, non_compliant, multi_type };

struct ComplianceVerdict {
    ComplianceStatus status;
    // Type keywords found at line-initial header positions, in order of occurrence.
    std::vector<CommitType> matched_types;
};

/// Flags messages stacking two or more `<type>:` headers (any line start).
ComplianceVerdict detect_multi_type(std::string_view raw);

} // namespace commitforge::ccs
