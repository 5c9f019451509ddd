#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "commitforge/miner.hpp"

namespace commitforge::ast {

using miner::Language;

/// Per-language closed structure taxonomy.
enum class StructureKind {
    function,
    klass,
    strukt,
    enumeration,
    name_space,
    method,
    interface,
    annotation,
    async_function,
    arrow_function,
    object_literal,
    type_alias,
};

std::string_view to_string(StructureKind k);
std::optional<StructureKind> structure_kind_from_string(std::string_view s);

/// Whether `kind` belongs to the language's detected-structure set.
bool kind_valid_for(StructureKind kind, Language lang);

struct Declaration {
    StructureKind kind = StructureKind::function;
    std::string qualified_name; // dotted enclosing chain; "<anonymous>@line:col" when unnamed
    int start_line = 0;         // 1-based inclusive
    int end_line = 0;
};

struct ParseFailure {
    std::string what;
};

/// Lists every declaration whose kind appears in the language's structure set.
/// Unsupported languages throw std::invalid_argument; unparseable input is
/// handled best-effort (no exception for recoverable damage).
std::vector<Declaration> extract_declarations(std::string_view source, Language lang);

enum class ChangeKind { added, deleted, modified };

std::string_view to_string(ChangeKind k);

struct StructuralChange {
    std::string file_path;
    Language language = Language::other;
    StructureKind kind = StructureKind::function;
    std::string qualified_name;
    ChangeKind change = ChangeKind::modified;
    std::optional<std::pair<int, int>> span_before;
    std::optional<std::pair<int, int>> span_after;
};

/// Declarations matched by (kind, qualified name): only-after => added,
/// only-before => deleted, both with differing spanned text => modified,
/// identical => omitted. Renames surface as delete+add.
std::vector<StructuralChange> diff_structures(std::optional<std::string_view> before,
                                              std::optional<std::string_view> after,
                                              Language lang);

struct Hunk {
    int old_start = 0;
    int old_len = 0;
    int new_start = 0;
    int new_len = 0;
};

struct HunkContext {
    Hunk hunk;
    std::vector<std::pair<StructureKind, std::string>> enclosing_chain; // outermost first
    bool orphan = false;
};

/// Parses "@@ -a,b +c,d @@" headers; throws std::invalid_argument on a
/// malformed diff.
std::vector<Hunk> parse_hunks(std::string_view unified_diff);

/// Matches each hunk's new-side range (old-side for pure deletions) against
/// declaration spans. A declaration encloses the hunk when its span contains
/// the whole range; if nothing does, the declarations containing the first
/// changed line are used.
std::vector<HunkContext> map_hunks(std::string_view unified_diff,
                                   const std::vector<Declaration>& declarations_before,
                                   const std::vector<Declaration>& declarations_after);

} // namespace commitforge::ast
