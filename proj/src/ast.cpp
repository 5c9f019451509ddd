#include "commitforge/ast.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <map>
#include <stdexcept>

#include "commitforge/text.hpp"

namespace commitforge::ast {

namespace {

bool is_ident_start(char c) {
    return std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}
bool is_ident_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$';
}

std::string anon_label(int line, int col) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "<anonymous>@%d:%d", line, col);
    return buf;
}

// --- source cleaning --------------------------------------------------------
// Blanks comments and string-literal contents while preserving newlines so
// line/column arithmetic stays valid on the original text.

std::string clean_brace_source(std::string_view src, Language lang) {
    std::string out(src);
    enum class St { code, line_comment, block_comment, squote, dquote, backtick, preproc };
    St st = St::code;
    bool has_backtick = lang == Language::go || lang == Language::javascript ||
                        lang == Language::typescript;
    bool has_preproc = lang == Language::c || lang == Language::cpp;
    bool at_line_start = true;

    for (std::size_t i = 0; i < src.size(); ++i) {
        char c = src[i];
        char next = i + 1 < src.size() ? src[i + 1] : '\0';
        if (c == '\n') {
            if (st == St::line_comment) st = St::code;
            if (st == St::preproc) {
                // keep blanking continuation lines
                if (!(i > 0 && src[i - 1] == '\\')) st = St::code;
            }
            at_line_start = true;
            continue;
        }
        switch (st) {
        case St::code:
            if (at_line_start && has_preproc && c == '#') {
                st = St::preproc;
                out[i] = ' ';
            } else if (c == '/' && next == '/') {
                st = St::line_comment;
                out[i] = ' ';
            } else if (c == '/' && next == '*') {
                st = St::block_comment;
                out[i] = ' ';
            } else if (c == '\'') {
                st = St::squote;
                out[i] = ' ';
            } else if (c == '"') {
                st = St::dquote;
                out[i] = ' ';
            } else if (c == '`' && has_backtick) {
                st = St::backtick;
                out[i] = ' ';
            }
            if (!std::isspace(static_cast<unsigned char>(c))) at_line_start = false;
            break;
        case St::line_comment:
        case St::preproc:
            out[i] = ' ';
            break;
        case St::block_comment:
            out[i] = ' ';
            if (c == '*' && next == '/') {
                out[i + 1] = ' ';
                ++i;
                st = St::code;
            }
            break;
        case St::squote:
            out[i] = ' ';
            if (c == '\\') {
                if (i + 1 < src.size() && src[i + 1] != '\n') out[++i] = ' ';
            } else if (c == '\'') {
                st = St::code;
            }
            break;
        case St::dquote:
            out[i] = ' ';
            if (c == '\\') {
                if (i + 1 < src.size() && src[i + 1] != '\n') out[++i] = ' ';
            } else if (c == '"') {
                st = St::code;
            }
            break;
        case St::backtick:
            out[i] = ' ';
            if (c == '`') st = St::code;
            break;
        }
    }
    return out;
}

// --- statement classification ----------------------------------------------

struct Classified {
    StructureKind kind;
    std::string name; // empty => anonymous
    bool is_decl = false;
    bool class_like = false; // scope whose members are methods
};

std::vector<std::string> words_of(const std::string& stmt) {
    std::vector<std::string> ws;
    std::size_t i = 0;
    while (i < stmt.size()) {
        if (is_ident_start(stmt[i])) {
            std::size_t j = i;
            while (j < stmt.size() && is_ident_char(stmt[j])) ++j;
            ws.push_back(stmt.substr(i, j - i));
            i = j;
        } else {
            ++i;
        }
    }
    return ws;
}

std::string ident_after(const std::string& stmt, const std::string& keyword) {
    std::size_t pos = 0;
    while (true) {
        pos = stmt.find(keyword, pos);
        if (pos == std::string::npos) return "";
        bool l_ok = pos == 0 || !is_ident_char(stmt[pos - 1]);
        std::size_t end = pos + keyword.size();
        bool r_ok = end >= stmt.size() || !is_ident_char(stmt[end]);
        if (l_ok && r_ok) break;
        pos = end;
    }
    std::size_t i = pos + keyword.size();
    while (i < stmt.size() && std::isspace(static_cast<unsigned char>(stmt[i]))) ++i;
    if (i >= stmt.size() || !is_ident_start(stmt[i])) return "";
    std::size_t j = i;
    while (j < stmt.size() && is_ident_char(stmt[j])) ++j;
    return stmt.substr(i, j - i);
}

bool has_word(const std::string& stmt, const std::string& keyword) {
    std::size_t pos = 0;
    while ((pos = stmt.find(keyword, pos)) != std::string::npos) {
        bool l_ok = pos == 0 || !is_ident_char(stmt[pos - 1]);
        std::size_t end = pos + keyword.size();
        bool r_ok = end >= stmt.size() || !is_ident_char(stmt[end]);
        if (l_ok && r_ok) return true;
        pos = end;
    }
    return false;
}

// Identifier immediately before the first top-level '('. For C++ the capture
// includes "::" qualifiers and '~'.
std::string name_before_call_parens(const std::string& stmt, bool allow_colons) {
    std::size_t open = std::string::npos;
    int angle = 0;
    for (std::size_t i = 0; i < stmt.size(); ++i) {
        if (stmt[i] == '<') ++angle;
        else if (stmt[i] == '>') angle = std::max(0, angle - 1);
        else if (stmt[i] == '(' && angle == 0) {
            open = i;
            break;
        }
    }
    if (open == std::string::npos) return "";
    std::size_t e = open;
    while (e > 0 && std::isspace(static_cast<unsigned char>(stmt[e - 1]))) --e;
    std::size_t b = e;
    auto ok = [&](char c) {
        return is_ident_char(c) || (allow_colons && (c == ':' || c == '~'));
    };
    while (b > 0 && ok(stmt[b - 1])) --b;
    std::string name = stmt.substr(b, e - b);
    while (!name.empty() && name.front() == ':') name.erase(name.begin());
    return name;
}

bool first_word_in(const std::string& stmt, std::initializer_list<const char*> kws) {
    auto ws = words_of(stmt);
    if (ws.empty()) return false;
    for (const char* kw : kws)
        if (ws.front() == kw) return true;
    return false;
}

std::string strip_cpp_template_prefix(std::string stmt) {
    std::string t = text::trim(stmt);
    while (t.rfind("template", 0) == 0) {
        std::size_t lt = t.find('<');
        if (lt == std::string::npos) break;
        int depth = 0;
        std::size_t i = lt;
        for (; i < t.size(); ++i) {
            if (t[i] == '<') ++depth;
            else if (t[i] == '>' && --depth == 0) break;
        }
        if (i >= t.size()) break;
        t = text::trim(t.substr(i + 1));
    }
    return t;
}

std::string strip_java_annotations(std::string stmt) {
    std::string t = text::trim(stmt);
    while (!t.empty() && t[0] == '@' && t.rfind("@interface", 0) != 0) {
        std::size_t i = 1;
        while (i < t.size() && is_ident_char(t[i])) ++i;
        while (i < t.size() && std::isspace(static_cast<unsigned char>(t[i]))) ++i;
        if (i < t.size() && t[i] == '(') {
            int depth = 0;
            for (; i < t.size(); ++i) {
                if (t[i] == '(') ++depth;
                else if (t[i] == ')' && --depth == 0) {
                    ++i;
                    break;
                }
            }
        }
        t = text::trim(t.substr(i));
    }
    return t;
}

// Name in `const NAME = ...` / `NAME = ...` heads (JS/TS bindings and class
// property arrows).
std::string binding_name(const std::string& stmt) {
    auto t = text::trim(stmt);
    for (const char* kw : {"export", "default", "const", "let", "var", "public", "private",
                           "protected", "readonly", "static"}) {
        if (t.rfind(kw, 0) == 0 && t.size() > std::strlen(kw) &&
            std::isspace(static_cast<unsigned char>(t[std::strlen(kw)]))) {
            t = text::trim(t.substr(std::strlen(kw)));
        }
    }
    if (t.empty() || !is_ident_start(t[0])) return "";
    std::size_t i = 0;
    while (i < t.size() && is_ident_char(t[i])) ++i;
    std::string name = t.substr(0, i);
    std::size_t j = i;
    while (j < t.size() && std::isspace(static_cast<unsigned char>(t[j]))) ++j;
    if (j < t.size() && t[j] == '=') return name;
    return "";
}

Classified classify_c_cpp(const std::string& raw_stmt) {
    std::string stmt = strip_cpp_template_prefix(text::trim(raw_stmt));
    if (first_word_in(stmt, {"namespace"}))
        return {StructureKind::name_space, ident_after(stmt, "namespace"), true, false};
    if (has_word(stmt, "enum")) {
        std::string name = ident_after(stmt, "enum");
        if (name == "class" || name == "struct") {
            std::string tail = stmt.substr(stmt.find(name) + name.size());
            name = text::trim(tail);
            std::size_t i = 0;
            while (i < name.size() && is_ident_char(name[i])) ++i;
            name = name.substr(0, i);
        }
        return {StructureKind::enumeration, name, true, false};
    }
    if (stmt.find('=') != std::string::npos) return {StructureKind::function, "", false, false};
    if (has_word(stmt, "class"))
        return {StructureKind::klass, ident_after(stmt, "class"), true, true};
    if (has_word(stmt, "struct") && stmt.find('(') == std::string::npos)
        return {StructureKind::strukt, ident_after(stmt, "struct"), true, true};
    if (first_word_in(stmt, {"if", "for", "while", "switch", "catch", "do", "else", "try",
                             "return"}))
        return {StructureKind::function, "", false, false};
    if (stmt.find('(') != std::string::npos && stmt.find(')') != std::string::npos) {
        std::string name = name_before_call_parens(stmt, /*allow_colons=*/true);
        // normalize A::f to A.f for qualified-name chains
        std::size_t pos;
        while ((pos = name.find("::")) != std::string::npos) name.replace(pos, 2, ".");
        if (!name.empty() && name != "if" && name != "for" && name != "while" &&
            name != "switch" && name != "catch")
            return {StructureKind::function, name, true, false};
    }
    return {StructureKind::function, "", false, false};
}

Classified classify_java(const std::string& raw_stmt, bool in_class) {
    std::string stmt = strip_java_annotations(text::trim(raw_stmt));
    if (stmt.find("@interface") != std::string::npos)
        return {StructureKind::annotation, ident_after(stmt, "@interface"), true, true};
    if (has_word(stmt, "class"))
        return {StructureKind::klass, ident_after(stmt, "class"), true, true};
    if (has_word(stmt, "interface"))
        return {StructureKind::interface, ident_after(stmt, "interface"), true, true};
    if (has_word(stmt, "enum"))
        return {StructureKind::enumeration, ident_after(stmt, "enum"), true, true};
    if (has_word(stmt, "new")) return {StructureKind::function, "", false, false};
    if (first_word_in(stmt, {"if", "for", "while", "switch", "catch", "do", "else", "try",
                             "finally", "synchronized", "return"}))
        return {StructureKind::function, "", false, false};
    if (stmt.find('=') != std::string::npos) return {StructureKind::function, "", false, false};
    if (in_class && stmt.find('(') != std::string::npos) {
        std::string name = name_before_call_parens(stmt, false);
        if (!name.empty()) return {StructureKind::method, name, true, false};
    }
    return {StructureKind::function, "", false, false};
}

Classified classify_go(const std::string& raw_stmt) {
    std::string stmt = text::trim(raw_stmt);
    // A package clause has no terminator the brace scanner can see, so it
    // rides along with the first declaration; drop it before matching.
    if (stmt.rfind("package", 0) == 0 &&
        (stmt.size() == 7 || !is_ident_char(stmt[7]))) {
        std::size_t i = 7;
        while (i < stmt.size() && std::isspace(static_cast<unsigned char>(stmt[i]))) ++i;
        while (i < stmt.size() && is_ident_char(stmt[i])) ++i;
        stmt = text::trim(stmt.substr(i));
    }
    if (stmt.rfind("func", 0) == 0 && (stmt.size() == 4 || !is_ident_char(stmt[4]))) {
        std::string rest = text::trim(stmt.substr(4));
        std::string receiver;
        if (!rest.empty() && rest[0] == '(') {
            std::size_t close = rest.find(')');
            if (close == std::string::npos) return {StructureKind::function, "", false, false};
            std::string recv = rest.substr(1, close - 1);
            auto ws = words_of(recv);
            if (!ws.empty()) receiver = ws.back();
            rest = text::trim(rest.substr(close + 1));
        }
        std::string name;
        std::size_t i = 0;
        while (i < rest.size() && is_ident_char(rest[i])) ++i;
        name = rest.substr(0, i);
        if (!receiver.empty() && !name.empty()) name = receiver + "." + name;
        return {StructureKind::function, name, true, false};
    }
    if (stmt.rfind("type", 0) == 0) {
        auto ws = words_of(stmt);
        if (ws.size() >= 3 && ws[0] == "type") {
            if (ws[2] == "struct") return {StructureKind::strukt, ws[1], true, false};
            if (ws[2] == "interface") return {StructureKind::interface, ws[1], true, false};
        }
    }
    return {StructureKind::function, "", false, false};
}

Classified classify_js_ts(const std::string& raw_stmt, Language lang, bool in_class,
                          bool top_level) {
    std::string stmt = text::trim(raw_stmt);
    bool ts = lang == Language::typescript;

    if (!stmt.empty() && stmt.size() >= 2 && stmt.substr(stmt.size() - 2) == "=>")
        return {StructureKind::arrow_function, binding_name(stmt), true, false};
    if (first_word_in(stmt, {"if", "for", "while", "switch", "catch", "do", "else", "try",
                             "finally", "return"}))
        return {StructureKind::function, "", false, false};
    if (has_word(stmt, "class"))
        return {StructureKind::klass, ident_after(stmt, "class"), true, true};
    if (ts && has_word(stmt, "interface"))
        return {StructureKind::interface, ident_after(stmt, "interface"), true, false};
    if (ts && has_word(stmt, "enum"))
        return {StructureKind::enumeration, ident_after(stmt, "enum"), true, false};
    if (ts && has_word(stmt, "type") && stmt.find('=') != std::string::npos) {
        std::string name = ident_after(stmt, "type");
        if (!name.empty()) return {StructureKind::type_alias, name, true, false};
    }
    if (has_word(stmt, "function")) {
        std::string name = ident_after(stmt, "function");
        return {StructureKind::function, name, true, false};
    }
    if (!stmt.empty() && stmt.back() == '=') {
        std::string name = binding_name(stmt + " x"); // reuse `NAME =` matcher
        if (!name.empty() && top_level && !ts)
            return {StructureKind::object_literal, name, true, false};
        if (!name.empty() && top_level && ts)
            return {StructureKind::function, "", false, false};
    }
    if (in_class && stmt.find('(') != std::string::npos &&
        stmt.find('=') == std::string::npos) {
        std::string trimmed = stmt;
        for (const char* kw : {"static", "async", "get", "set", "public", "private",
                               "protected", "override", "readonly"}) {
            while (trimmed.rfind(kw, 0) == 0 && trimmed.size() > std::strlen(kw) &&
                   std::isspace(static_cast<unsigned char>(trimmed[std::strlen(kw)])))
                trimmed = text::trim(trimmed.substr(std::strlen(kw)));
        }
        std::string name = name_before_call_parens(trimmed, false);
        if (!name.empty()) return {StructureKind::method, name, true, false};
    }
    return {StructureKind::function, "", false, false};
}

Classified classify(const std::string& stmt, Language lang, bool in_class, bool top_level) {
    switch (lang) {
    case Language::c:
    case Language::cpp: return classify_c_cpp(stmt);
    case Language::java: return classify_java(stmt, in_class);
    case Language::go: return classify_go(stmt);
    case Language::javascript:
    case Language::typescript: return classify_js_ts(stmt, lang, in_class, top_level);
    default: throw std::invalid_argument("unsupported language");
    }
}

// --- brace scanner ----------------------------------------------------------

struct Scope {
    bool is_decl = false;
    bool inline_block = false; // '{' inside parens; statement continues after
    bool class_like = false;
    StructureKind kind = StructureKind::function;
    std::string display_name;
    int start_line = 0;
};

void scan_braces(const std::string& cleaned, Language lang, std::vector<Declaration>& out) {
    std::vector<Scope> scopes;
    std::string stmt;
    int stmt_line = 0, stmt_col = 0;
    int line = 1, col = 0;
    int paren_depth = 0;

    auto chain_name = [&](const std::string& own) {
        std::string full;
        for (const auto& s : scopes) {
            if (!s.is_decl) continue;
            if (!full.empty()) full += ".";
            full += s.display_name;
        }
        if (!full.empty()) full += ".";
        full += own;
        return full;
    };
    auto innermost_class = [&]() {
        for (auto it = scopes.rbegin(); it != scopes.rend(); ++it)
            if (it->is_decl) return it->class_like;
        return false;
    };
    auto reset_stmt = [&]() {
        stmt.clear();
        stmt_line = stmt_col = 0;
        paren_depth = 0;
    };
    auto emit = [&](const Scope& s, int end_line) {
        out.push_back({s.kind, chain_name(s.display_name), s.start_line, end_line});
    };
    auto handle_semicolon = [&]() {
        std::string t = text::trim(stmt);
        if (t.empty()) return;
        if (lang == Language::typescript && has_word(t, "type") &&
            t.find('=') != std::string::npos) {
            std::string name = ident_after(t, "type");
            std::size_t tp = t.find("type");
            bool head = text::trim(t.substr(0, tp)).empty() ||
                        text::trim(t.substr(0, tp)) == "export";
            if (!name.empty() && head) {
                out.push_back(
                    {StructureKind::type_alias, chain_name(name), stmt_line, line});
                return;
            }
        }
        if ((lang == Language::javascript || lang == Language::typescript) &&
            t.find("=>") != std::string::npos) {
            std::string name = binding_name(t);
            std::string display = name.empty() ? anon_label(stmt_line, stmt_col) : name;
            out.push_back(
                {StructureKind::arrow_function, chain_name(display), stmt_line, line});
        }
    };

    for (std::size_t i = 0; i < cleaned.size(); ++i) {
        char c = cleaned[i];
        if (c == '\n') {
            ++line;
            col = 0;
            stmt += ' ';
            continue;
        }
        ++col;
        if (c == '{') {
            if (paren_depth > 0) {
                scopes.push_back({false, true, false, StructureKind::function, "", line});
                continue;
            }
            auto cls = classify(stmt, lang, innermost_class(),
                                /*top_level=*/scopes.empty());
            Scope s;
            s.is_decl = cls.is_decl;
            s.class_like = cls.class_like;
            s.kind = cls.kind;
            s.start_line = stmt_line > 0 ? stmt_line : line;
            s.display_name = cls.name.empty() && cls.is_decl
                                 ? anon_label(stmt_line > 0 ? stmt_line : line,
                                              stmt_col > 0 ? stmt_col : col)
                                 : cls.name;
            scopes.push_back(std::move(s));
            reset_stmt();
        } else if (c == '}') {
            if (!scopes.empty()) {
                Scope s = scopes.back();
                scopes.pop_back();
                if (s.inline_block) {
                    continue; // statement resumes
                }
                if (s.is_decl) emit(s, line);
            }
            reset_stmt();
        } else if (c == ';' && paren_depth == 0) {
            handle_semicolon();
            reset_stmt();
        } else {
            if (c == '(') ++paren_depth;
            else if (c == ')') paren_depth = std::max(0, paren_depth - 1);
            if (!std::isspace(static_cast<unsigned char>(c)) && stmt_line == 0) {
                stmt_line = line;
                stmt_col = col;
            }
            stmt += c;
        }
    }
    // unclosed scopes: best-effort spans to the last line
    while (!scopes.empty()) {
        Scope s = scopes.back();
        scopes.pop_back();
        if (s.is_decl && !s.inline_block) emit(s, line);
    }
}

// --- python scanner ---------------------------------------------------------

std::string clean_python_line(const std::string& line, int& triple_state) {
    // triple_state: 0 = code, 1 = inside '''...''', 2 = inside """..."""
    std::string out = line;
    std::size_t i = 0;
    while (i < out.size()) {
        if (triple_state != 0) {
            const char* delim = triple_state == 1 ? "'''" : "\"\"\"";
            std::size_t end = line.find(delim, i);
            if (end == std::string::npos) {
                for (std::size_t j = i; j < out.size(); ++j) out[j] = ' ';
                return out;
            }
            for (std::size_t j = i; j < end + 3; ++j) out[j] = ' ';
            triple_state = 0;
            i = end + 3;
            continue;
        }
        char c = out[i];
        if (c == '#') {
            for (std::size_t j = i; j < out.size(); ++j) out[j] = ' ';
            return out;
        }
        if (c == '\'' || c == '"') {
            const char* triple = c == '\'' ? "'''" : "\"\"\"";
            if (line.compare(i, 3, triple) == 0) {
                std::size_t end = line.find(triple, i + 3);
                if (end == std::string::npos) {
                    triple_state = c == '\'' ? 1 : 2;
                    for (std::size_t j = i; j < out.size(); ++j) out[j] = ' ';
                    return out;
                }
                for (std::size_t j = i; j < end + 3; ++j) out[j] = ' ';
                i = end + 3;
                continue;
            }
            std::size_t j = i + 1;
            while (j < out.size()) {
                if (out[j] == '\\') {
                    j += 2;
                    continue;
                }
                if (out[j] == c) break;
                ++j;
            }
            std::size_t close = std::min(j, out.size() - 1);
            for (std::size_t k = i; k <= close && k < out.size(); ++k) out[k] = ' ';
            i = j + 1;
            continue;
        }
        ++i;
    }
    return out;
}

void scan_python(std::string_view src, std::vector<Declaration>& out) {
    auto lines = text::split_lines(src);
    struct PyScope {
        StructureKind kind;
        std::string name;
        int indent;
        int start_line;
    };
    std::vector<PyScope> stack;
    int last_sig_line = 0;
    int triple_state = 0;

    auto chain_name = [&](std::size_t upto, const std::string& own) {
        std::string full;
        for (std::size_t i = 0; i < upto; ++i) {
            full += stack[i].name;
            full += ".";
        }
        full += own;
        return full;
    };
    auto pop_to = [&](int indent) {
        while (!stack.empty() && indent <= stack.back().indent) {
            auto s = stack.back();
            stack.pop_back();
            out.push_back({s.kind, chain_name(stack.size(), s.name), s.start_line,
                           last_sig_line});
        }
    };

    for (std::size_t idx = 0; idx < lines.size(); ++idx) {
        int lineno = static_cast<int>(idx) + 1;
        bool was_in_string = triple_state != 0;
        std::string cleaned = clean_python_line(lines[idx], triple_state);
        if (was_in_string) continue;
        std::string t = text::trim(cleaned);
        if (t.empty()) continue;
        int indent = 0;
        for (char ch : cleaned) {
            if (ch == ' ') ++indent;
            else if (ch == '\t') indent += 8;
            else break;
        }
        pop_to(indent);

        StructureKind kind;
        std::string rest;
        bool is_decl = true;
        if (t.rfind("async def ", 0) == 0) {
            kind = StructureKind::async_function;
            rest = t.substr(10);
        } else if (t.rfind("def ", 0) == 0) {
            kind = StructureKind::function;
            rest = t.substr(4);
        } else if (t.rfind("class ", 0) == 0) {
            kind = StructureKind::klass;
            rest = t.substr(6);
        } else {
            is_decl = false;
        }
        if (is_decl) {
            std::size_t i = 0;
            while (i < rest.size() && is_ident_char(rest[i])) ++i;
            std::string name = rest.substr(0, i);
            if (name.empty()) name = anon_label(lineno, indent + 1);
            stack.push_back({kind, name, indent, lineno});
        }
        last_sig_line = lineno;
    }
    pop_to(-1);
}

void apply_ordinal_suffixes(std::vector<Declaration>& decls) {
    std::stable_sort(decls.begin(), decls.end(), [](const Declaration& a, const Declaration& b) {
        if (a.start_line != b.start_line) return a.start_line < b.start_line;
        return a.end_line > b.end_line;
    });
    std::map<std::pair<StructureKind, std::string>, int> seen;
    for (auto& d : decls) {
        int& n = seen[{d.kind, d.qualified_name}];
        ++n;
        if (n > 1) d.qualified_name += "#" + std::to_string(n);
    }
}

} // namespace

// --- public surface ---------------------------------------------------------

std::string_view to_string(StructureKind k) {
    switch (k) {
    case StructureKind::function: return "Function";
    case StructureKind::klass: return "Class";
    case StructureKind::strukt: return "Struct";
    case StructureKind::enumeration: return "Enum";
    case StructureKind::name_space: return "Namespace";
    case StructureKind::method: return "Method";
    case StructureKind::interface: return "Interface";
    case StructureKind::annotation: return "Annotation";
    case StructureKind::async_function: return "AsyncFunction";
    case StructureKind::arrow_function: return "ArrowFunction";
    case StructureKind::object_literal: return "Object";
    case StructureKind::type_alias: return "TypeAlias";
    }
    return "Function";
}

std::optional<StructureKind> structure_kind_from_string(std::string_view s) {
    static const std::pair<const char*, StructureKind> table[] = {
        {"Function", StructureKind::function},
        {"Class", StructureKind::klass},
        {"Struct", StructureKind::strukt},
        {"Enum", StructureKind::enumeration},
        {"Namespace", StructureKind::name_space},
        {"Method", StructureKind::method},
        {"Interface", StructureKind::interface},
        {"Annotation", StructureKind::annotation},
        {"AsyncFunction", StructureKind::async_function},
        {"ArrowFunction", StructureKind::arrow_function},
        {"Object", StructureKind::object_literal},
        {"TypeAlias", StructureKind::type_alias},
    };
    for (const auto& [name, kind] : table)
        if (s == name) return kind;
    return std::nullopt;
}

bool kind_valid_for(StructureKind kind, Language lang) {
    using K = StructureKind;
    switch (lang) {
    case Language::c:
    case Language::cpp:
        return kind == K::function || kind == K::klass || kind == K::strukt ||
               kind == K::enumeration || kind == K::name_space;
    case Language::java:
        return kind == K::method || kind == K::klass || kind == K::interface ||
               kind == K::enumeration || kind == K::annotation;
    case Language::python:
        return kind == K::function || kind == K::klass || kind == K::async_function;
    case Language::go:
        return kind == K::function || kind == K::strukt || kind == K::interface;
    case Language::javascript:
        return kind == K::function || kind == K::klass || kind == K::method ||
               kind == K::arrow_function || kind == K::object_literal;
    case Language::typescript:
        return kind == K::function || kind == K::klass || kind == K::method ||
               kind == K::interface || kind == K::type_alias || kind == K::enumeration ||
               kind == K::arrow_function;
    default:
        return false;
    }
}

std::string_view to_string(ChangeKind k) {
    switch (k) {
    case ChangeKind::added: return "added";
    case ChangeKind::deleted: return "deleted";
    case ChangeKind::modified: return "modified";
    }
    return "modified";
}

std::vector<Declaration> extract_declarations(std::string_view source, Language lang) {
    if (!miner::is_supported_language(lang))
        throw std::invalid_argument("extract_declarations: unsupported language");
    std::vector<Declaration> decls;
    if (lang == Language::python) {
        scan_python(source, decls);
    } else {
        scan_braces(clean_brace_source(source, lang), lang, decls);
    }
    // drop kinds outside the language's closed set (scanner artifacts)
    decls.erase(std::remove_if(decls.begin(), decls.end(),
                               [&](const Declaration& d) {
                                   return !kind_valid_for(d.kind, lang);
                               }),
                decls.end());
    apply_ordinal_suffixes(decls);
    return decls;
}

namespace {

std::string span_text(std::string_view source, int start_line, int end_line) {
    auto lines = text::split_lines(source);
    std::string out;
    for (int i = start_line; i <= end_line && i <= static_cast<int>(lines.size()); ++i) {
        out += lines[i - 1];
        out += '\n';
    }
    return out;
}

} // namespace

std::vector<StructuralChange> diff_structures(std::optional<std::string_view> before,
                                              std::optional<std::string_view> after,
                                              Language lang) {
    if (!before && !after)
        throw std::invalid_argument("diff_structures: both sides absent");

    auto before_decls = before ? extract_declarations(*before, lang) : std::vector<Declaration>{};
    auto after_decls = after ? extract_declarations(*after, lang) : std::vector<Declaration>{};

    std::map<std::pair<StructureKind, std::string>, const Declaration*> before_map;
    for (const auto& d : before_decls) before_map[{d.kind, d.qualified_name}] = &d;

    std::vector<StructuralChange> changes;
    std::map<std::pair<StructureKind, std::string>, bool> matched;
    for (const auto& d : after_decls) {
        auto key = std::make_pair(d.kind, d.qualified_name);
        auto it = before_map.find(key);
        if (it == before_map.end()) {
            StructuralChange c;
            c.language = lang;
            c.kind = d.kind;
            c.qualified_name = d.qualified_name;
            c.change = ChangeKind::added;
            c.span_after = {d.start_line, d.end_line};
            changes.push_back(std::move(c));
        } else {
            matched[key] = true;
            const Declaration* b = it->second;
            std::string text_before = span_text(*before, b->start_line, b->end_line);
            std::string text_after = span_text(*after, d.start_line, d.end_line);
            if (text_before != text_after) {
                StructuralChange c;
                c.language = lang;
                c.kind = d.kind;
                c.qualified_name = d.qualified_name;
                c.change = ChangeKind::modified;
                c.span_before = {b->start_line, b->end_line};
                c.span_after = {d.start_line, d.end_line};
                changes.push_back(std::move(c));
            }
        }
    }
    for (const auto& d : before_decls) {
        auto key = std::make_pair(d.kind, d.qualified_name);
        bool in_after = matched.count(key) > 0;
        if (!in_after) {
            bool exists_after = false;
            for (const auto& a : after_decls)
                if (a.kind == d.kind && a.qualified_name == d.qualified_name) exists_after = true;
            if (exists_after) continue;
            StructuralChange c;
            c.language = lang;
            c.kind = d.kind;
            c.qualified_name = d.qualified_name;
            c.change = ChangeKind::deleted;
            c.span_before = {d.start_line, d.end_line};
            changes.push_back(std::move(c));
        }
    }
    return changes;
}

std::vector<Hunk> parse_hunks(std::string_view unified_diff) {
    std::vector<Hunk> hunks;
    for (const auto& line : text::split_lines(unified_diff)) {
        if (line.rfind("@@", 0) != 0) continue;
        Hunk h;
        h.old_len = 1;
        h.new_len = 1;
        int n1 = std::sscanf(line.c_str(), "@@ -%d,%d +%d,%d @@", &h.old_start, &h.old_len,
                             &h.new_start, &h.new_len);
        if (n1 != 4) {
            h.old_len = 1;
            h.new_len = 1;
            int a, c;
            if (std::sscanf(line.c_str(), "@@ -%d,%d +%d @@", &h.old_start, &h.old_len,
                            &h.new_start) == 3) {
            } else if (std::sscanf(line.c_str(), "@@ -%d +%d,%d @@", &h.old_start,
                                   &h.new_start, &h.new_len) == 3) {
            } else if (std::sscanf(line.c_str(), "@@ -%d +%d @@", &a, &c) == 2) {
                h.old_start = a;
                h.new_start = c;
            } else {
                throw std::invalid_argument("malformed-diff: bad hunk header: " + line);
            }
        }
        hunks.push_back(h);
    }
    return hunks;
}

std::vector<HunkContext> map_hunks(std::string_view unified_diff,
                                   const std::vector<Declaration>& declarations_before,
                                   const std::vector<Declaration>& declarations_after) {
    std::vector<HunkContext> out;
    for (const auto& h : parse_hunks(unified_diff)) {
        bool pure_deletion = h.new_len == 0;
        const auto& decls = pure_deletion ? declarations_before : declarations_after;
        int first = pure_deletion ? h.old_start : h.new_start;
        int last = pure_deletion ? h.old_start + std::max(h.old_len - 1, 0)
                                 : h.new_start + std::max(h.new_len - 1, 0);

        std::vector<const Declaration*> chain;
        for (const auto& d : decls)
            if (d.start_line <= first && last <= d.end_line) chain.push_back(&d);
        if (chain.empty()) {
            for (const auto& d : decls)
                if (d.start_line <= first && first <= d.end_line) chain.push_back(&d);
        }
        std::sort(chain.begin(), chain.end(), [](const Declaration* a, const Declaration* b) {
            long sa = a->end_line - a->start_line;
            long sb = b->end_line - b->start_line;
            if (sa != sb) return sa > sb; // outermost first
            return a->start_line < b->start_line;
        });
        HunkContext ctx;
        ctx.hunk = h;
        for (const auto* d : chain) ctx.enclosing_chain.emplace_back(d->kind, d->qualified_name);
        ctx.orphan = ctx.enclosing_chain.empty();
        out.push_back(std::move(ctx));
    }
    return out;
}

} // namespace commitforge::ast
