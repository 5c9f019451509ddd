#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>
#include <string>
#include <vector>

#include "commitforge/ast.hpp"

using namespace commitforge;
using ast::ChangeKind;
using ast::Language;
using ast::StructureKind;

namespace {

struct ExpectedDecl {
    StructureKind kind;
    const char* name;
    int start;
    int end;
};

void check_decls(const std::vector<ast::Declaration>& got,
                 const std::vector<ExpectedDecl>& want) {
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < want.size(); ++i) {
        INFO("decl #" << i << " expected " << want[i].name);
        CHECK(got[i].kind == want[i].kind);
        CHECK(got[i].qualified_name == want[i].name);
        CHECK(got[i].start_line == want[i].start);
        CHECK(got[i].end_line == want[i].end);
    }
}

const ast::StructuralChange* find_change(const std::vector<ast::StructuralChange>& changes,
                                         StructureKind kind, const std::string& name,
                                         ChangeKind change) {
    for (const auto& c : changes)
        if (c.kind == kind && c.qualified_name == name && c.change == change) return &c;
    return nullptr;
}

// One added / deleted / modified fixture per structure kind. `without` lacks
// the declaration, `with_decl` has it, `with_mod` edits text inside its span.
struct AdmCase {
    StructureKind kind;
    const char* name;
    const char* without;
    const char* with_decl;
    const char* with_mod;
};

void check_adm(Language lang, const AdmCase& c) {
    INFO("kind " << ast::to_string(c.kind) << " name " << c.name);

    auto added = ast::diff_structures(c.without, c.with_decl, lang);
    const auto* a = find_change(added, c.kind, c.name, ChangeKind::added);
    REQUIRE(a != nullptr);
    CHECK(a->language == lang);
    CHECK(a->file_path.empty()); // caller fills the path in
    CHECK(a->span_after.has_value());
    CHECK_FALSE(a->span_before.has_value());

    auto deleted = ast::diff_structures(c.with_decl, c.without, lang);
    const auto* d = find_change(deleted, c.kind, c.name, ChangeKind::deleted);
    REQUIRE(d != nullptr);
    CHECK(d->span_before.has_value());
    CHECK_FALSE(d->span_after.has_value());

    auto modified = ast::diff_structures(c.with_decl, c.with_mod, lang);
    const auto* m = find_change(modified, c.kind, c.name, ChangeKind::modified);
    REQUIRE(m != nullptr);
    CHECK(m->span_before.has_value());
    CHECK(m->span_after.has_value());

    // self-diff is the identity
    CHECK(ast::diff_structures(c.with_decl, c.with_decl, lang).empty());
    CHECK(ast::diff_structures(c.with_mod, c.with_mod, lang).empty());
}

const StructureKind kAllKinds[] = {
    StructureKind::function,       StructureKind::klass,
    StructureKind::strukt,         StructureKind::enumeration,
    StructureKind::name_space,     StructureKind::method,
    StructureKind::interface,      StructureKind::annotation,
    StructureKind::async_function, StructureKind::arrow_function,
    StructureKind::object_literal, StructureKind::type_alias,
};

// Runs every case and verifies the table covers the language's complete
// detected-structure set, so no kind is left untested.
void check_adm_table(Language lang, const std::vector<AdmCase>& cases) {
    std::set<StructureKind> covered;
    for (const auto& c : cases) {
        check_adm(lang, c);
        covered.insert(c.kind);
    }
    for (StructureKind k : kAllKinds) {
        INFO("kind " << ast::to_string(k));
        CHECK((covered.count(k) > 0) == ast::kind_valid_for(k, lang));
    }
}

} // namespace

TEST_CASE("structure kind names round-trip and change kinds stringify") {
    for (StructureKind k : kAllKinds) {
        auto back = ast::structure_kind_from_string(ast::to_string(k));
        REQUIRE(back.has_value());
        CHECK(*back == k);
    }
    CHECK_FALSE(ast::structure_kind_from_string("Lambda").has_value());
    CHECK_FALSE(ast::structure_kind_from_string("").has_value());

    CHECK(ast::to_string(ChangeKind::added) == "added");
    CHECK(ast::to_string(ChangeKind::deleted) == "deleted");
    CHECK(ast::to_string(ChangeKind::modified) == "modified");
}

TEST_CASE("kind_valid_for spot checks") {
    CHECK(ast::kind_valid_for(StructureKind::name_space, Language::cpp));
    CHECK_FALSE(ast::kind_valid_for(StructureKind::name_space, Language::java));
    CHECK(ast::kind_valid_for(StructureKind::async_function, Language::python));
    CHECK_FALSE(ast::kind_valid_for(StructureKind::async_function, Language::javascript));
    CHECK(ast::kind_valid_for(StructureKind::object_literal, Language::javascript));
    CHECK_FALSE(ast::kind_valid_for(StructureKind::object_literal, Language::typescript));
    CHECK(ast::kind_valid_for(StructureKind::type_alias, Language::typescript));
    CHECK_FALSE(ast::kind_valid_for(StructureKind::klass, Language::go));
    CHECK_FALSE(ast::kind_valid_for(StructureKind::function, Language::other));
}

TEST_CASE("extract_declarations: C++ file with nesting and qualified names") {
    const char* src = "namespace app {\n"                // 1
                      "\n"                               // 2
                      "struct Point {\n"                 // 3
                      "    int x;\n"                     // 4
                      "};\n"                             // 5
                      "\n"                               // 6
                      "enum class Color {\n"             // 7
                      "    red,\n"                       // 8
                      "    green\n"                      // 9
                      "};\n"                             // 10
                      "\n"                               // 11
                      "class Widget {\n"                 // 12
                      "public:\n"                        // 13
                      "    void draw() {\n"              // 14
                      "        render(x);\n"             // 15
                      "    }\n"                          // 16
                      "};\n"                             // 17
                      "\n"                               // 18
                      "int helper(int a) {\n"            // 19
                      "    return a + 1;\n"              // 20
                      "}\n"                              // 21
                      "\n"                               // 22
                      "} // namespace app\n";            // 23
    auto decls = ast::extract_declarations(src, Language::cpp);
    check_decls(decls, {
        {StructureKind::name_space, "app", 1, 23},
        {StructureKind::strukt, "app.Point", 3, 5},
        {StructureKind::enumeration, "app.Color", 7, 10},
        {StructureKind::klass, "app.Widget", 12, 17},
        // draw's statement opens at the access-specifier line
        {StructureKind::function, "app.Widget.draw", 13, 16},
        {StructureKind::function, "app.helper", 19, 21},
    });
}

TEST_CASE("extract_declarations: C++ templates, qualified definitions, overload ordinals") {
    auto decls = ast::extract_declarations("template <typename T>\n"
                                           "T max_of(T a, T b) {\n"
                                           "    return a > b ? a : b;\n"
                                           "}\n",
                                           Language::cpp);
    check_decls(decls, {{StructureKind::function, "max_of", 1, 4}});

    decls = ast::extract_declarations("void Widget::draw() {\n"
                                      "    render();\n"
                                      "}\n",
                                      Language::cpp);
    check_decls(decls, {{StructureKind::function, "Widget.draw", 1, 3}});

    decls = ast::extract_declarations("int f(int a) {\n"
                                      "    return a;\n"
                                      "}\n"
                                      "\n"
                                      "int f(double b) {\n"
                                      "    return 1;\n"
                                      "}\n",
                                      Language::cpp);
    check_decls(decls, {
        {StructureKind::function, "f", 1, 3},
        {StructureKind::function, "f#2", 5, 7},
    });
}

TEST_CASE("extract_declarations: anonymous namespace gets a position label") {
    auto decls = ast::extract_declarations("namespace {\n"
                                           "int hidden() {\n"
                                           "    return 1;\n"
                                           "}\n"
                                           "}\n",
                                           Language::cpp);
    check_decls(decls, {
        {StructureKind::name_space, "<anonymous>@1:1", 1, 5},
        {StructureKind::function, "<anonymous>@1:1.hidden", 2, 4},
    });
}

TEST_CASE("extract_declarations: braces in strings, comments, and preprocessor lines") {
    auto decls = ast::extract_declarations("#include <stdio.h>\n"
                                           "#define OPEN {\n"
                                           "/* { stray block */\n"
                                           "int f(void) {\n"
                                           "    const char* s = \"}{\";\n"
                                           "    // } stray line\n"
                                           "    return 0;\n"
                                           "}\n",
                                           Language::c);
    check_decls(decls, {{StructureKind::function, "f", 4, 8}});

    decls = ast::extract_declarations("function a() {\n"
                                      "  const t = `{{{`;\n"
                                      "  return t;\n"
                                      "}\n",
                                      Language::javascript);
    check_decls(decls, {{StructureKind::function, "a", 1, 4}});
}

TEST_CASE("extract_declarations: Java file") {
    const char* src = "package demo;\n"                          // 1
                      "\n"                                       // 2
                      "public class Service {\n"                 // 3
                      "    private int count;\n"                 // 4
                      "\n"                                       // 5
                      "    @Override\n"                          // 6
                      "    public String toString() {\n"         // 7
                      "        return String.valueOf(count);\n"  // 8
                      "    }\n"                                  // 9
                      "}\n"                                      // 10
                      "\n"                                       // 11
                      "interface Store {\n"                      // 12
                      "    int get(String key);\n"               // 13
                      "}\n"                                      // 14
                      "\n"                                       // 15
                      "enum Mode {\n"                            // 16
                      "    FAST,\n"                              // 17
                      "    SLOW\n"                               // 18
                      "}\n"                                      // 19
                      "\n"                                       // 20
                      "@interface Marker {\n"                    // 21
                      "    String value();\n"                    // 22
                      "}\n";                                     // 23
    auto decls = ast::extract_declarations(src, Language::java);
    check_decls(decls, {
        {StructureKind::klass, "Service", 3, 10},
        // the statement opens at the @Override line
        {StructureKind::method, "Service.toString", 6, 9},
        {StructureKind::interface, "Store", 12, 14},
        {StructureKind::enumeration, "Mode", 16, 19},
        {StructureKind::annotation, "Marker", 21, 23},
    });
}

TEST_CASE("extract_declarations: Python file with async and nesting") {
    const char* src = "class Engine:\n"            // 1
                      "    def start(self):\n"     // 2
                      "        return 1\n"         // 3
                      "\n"                         // 4
                      "    async def poll(self):\n"// 5
                      "        return 2\n"         // 6
                      "\n"                         // 7
                      "\n"                         // 8
                      "def top(x):\n"              // 9
                      "    return x\n";            // 10
    auto decls = ast::extract_declarations(src, Language::python);
    check_decls(decls, {
        {StructureKind::klass, "Engine", 1, 6},
        {StructureKind::function, "Engine.start", 2, 3},
        {StructureKind::async_function, "Engine.poll", 5, 6},
        {StructureKind::function, "top", 9, 10},
    });
}

TEST_CASE("extract_declarations: Python strings and duplicate-name ordinals") {
    auto decls = ast::extract_declarations("def g():\n"
                                           "    s = \"\"\"\n"
                                           "def not_real():\n"
                                           "    pass\n"
                                           "\"\"\"\n"
                                           "    return s\n"
                                           "\n"
                                           "def g():\n"
                                           "    return 2\n",
                                           Language::python);
    check_decls(decls, {
        {StructureKind::function, "g", 1, 6},
        {StructureKind::function, "g#2", 8, 9},
    });
}

TEST_CASE("extract_declarations: Go file including the package-clause boundary") {
    const char* src = "package main\n"                      // 1
                      "\n"                                  // 2
                      "type Point struct {\n"               // 3
                      "    X int\n"                         // 4
                      "}\n"                                 // 5
                      "\n"                                  // 6
                      "type Reader interface {\n"           // 7
                      "    Read() int\n"                    // 8
                      "}\n"                                 // 9
                      "\n"                                  // 10
                      "func Add(a int, b int) int {\n"      // 11
                      "    return a + b\n"                  // 12
                      "}\n"                                 // 13
                      "\n"                                  // 14
                      "func (p *Point) Move(dx int) {\n"    // 15
                      "    p.X += dx\n"                     // 16
                      "}\n";                                // 17
    auto decls = ast::extract_declarations(src, Language::go);
    check_decls(decls, {
        // the package clause rides along with the first statement
        {StructureKind::strukt, "Point", 1, 5},
        {StructureKind::interface, "Reader", 7, 9},
        {StructureKind::function, "Add", 11, 13},
        {StructureKind::function, "Point.Move", 15, 17},
    });
}

TEST_CASE("extract_declarations: JavaScript file") {
    const char* src = "const config = {\n"              // 1
                      "  retries: 3,\n"                 // 2
                      "};\n"                            // 3
                      "\n"                              // 4
                      "function parse(input) {\n"       // 5
                      "  return input;\n"               // 6
                      "}\n"                             // 7
                      "\n"                              // 8
                      "const load = (path) => {\n"      // 9
                      "  return path;\n"                // 10
                      "};\n"                            // 11
                      "\n"                              // 12
                      "const tiny = (x) => x + 1;\n"    // 13
                      "\n"                              // 14
                      "class Store {\n"                 // 15
                      "  get(key) {\n"                  // 16
                      "    return this.map[key];\n"     // 17
                      "  }\n"                           // 18
                      "}\n";                            // 19
    auto decls = ast::extract_declarations(src, Language::javascript);
    check_decls(decls, {
        {StructureKind::object_literal, "config", 1, 3},
        {StructureKind::function, "parse", 5, 7},
        {StructureKind::arrow_function, "load", 9, 11},
        {StructureKind::arrow_function, "tiny", 13, 13},
        {StructureKind::klass, "Store", 15, 19},
        {StructureKind::method, "Store.get", 16, 18},
    });
}

TEST_CASE("extract_declarations: anonymous JS structures get position labels") {
    auto decls = ast::extract_declarations("export default class {\n"
                                           "}\n",
                                           Language::javascript);
    check_decls(decls, {{StructureKind::klass, "<anonymous>@1:1", 1, 2}});

    decls = ast::extract_declarations("items.map((x) => x * 2);\n", Language::javascript);
    check_decls(decls, {{StructureKind::arrow_function, "<anonymous>@1:1", 1, 1}});
}

TEST_CASE("extract_declarations: TypeScript file") {
    const char* src = "type Id = string;\n"                       // 1
                      "\n"                                        // 2
                      "export type Result = {\n"                  // 3
                      "  ok: boolean;\n"                          // 4
                      "};\n"                                      // 5
                      "\n"                                        // 6
                      "interface Shape {\n"                       // 7
                      "  area(): number;\n"                       // 8
                      "}\n"                                       // 9
                      "\n"                                        // 10
                      "enum Direction {\n"                        // 11
                      "  Up,\n"                                   // 12
                      "  Down,\n"                                 // 13
                      "}\n"                                       // 14
                      "\n"                                        // 15
                      "const mk = (n: number): number[] => {\n"   // 16
                      "  return [n];\n"                           // 17
                      "};\n"                                      // 18
                      "\n"                                        // 19
                      "function identity<T>(value: T): T {\n"     // 20
                      "  return value;\n"                         // 21
                      "}\n"                                       // 22
                      "\n"                                        // 23
                      "class Grid {\n"                            // 24
                      "  render(): void {\n"                      // 25
                      "    this.draw();\n"                        // 26
                      "  }\n"                                     // 27
                      "}\n";                                      // 28
    auto decls = ast::extract_declarations(src, Language::typescript);
    check_decls(decls, {
        {StructureKind::type_alias, "Id", 1, 1},
        {StructureKind::type_alias, "Result", 3, 5},
        {StructureKind::interface, "Shape", 7, 9},
        {StructureKind::enumeration, "Direction", 11, 14},
        {StructureKind::arrow_function, "mk", 16, 18},
        {StructureKind::function, "identity", 20, 22},
        {StructureKind::klass, "Grid", 24, 28},
        {StructureKind::method, "Grid.render", 25, 27},
    });
}

TEST_CASE("extract_declarations rejects unsupported languages") {
    CHECK_THROWS_AS(ast::extract_declarations("text", Language::other),
                    std::invalid_argument);
}

TEST_CASE("diff_structures: added/deleted/modified for every kind of every language") {
    SUBCASE("c_cpp") {
        check_adm_table(Language::cpp, {
            {StructureKind::function, "helper", "",
             "int helper(int a) {\n    return a + 1;\n}\n",
             "int helper(int a) {\n    return a + 2;\n}\n"},
            {StructureKind::klass, "Widget", "",
             "class Widget {\n    int id;\n};\n",
             "class Widget {\n    int id;\n    int extra;\n};\n"},
            {StructureKind::strukt, "Point", "",
             "struct Point {\n    int x;\n};\n",
             "struct Point {\n    int x;\n    int y;\n};\n"},
            {StructureKind::enumeration, "Color", "",
             "enum class Color {\n    red\n};\n",
             "enum class Color {\n    red,\n    green\n};\n"},
            {StructureKind::name_space, "app", "",
             "namespace app {\n\nint run() {\n    return 0;\n}\n\n}\n",
             "namespace app {\n\nint run() {\n    return 1;\n}\n\n}\n"},
        });
    }
    SUBCASE("c (full set covered under cpp; same scanner)") {
        check_adm(Language::c, {StructureKind::function, "add",
                                "#include <stdio.h>\n",
                                "#include <stdio.h>\n\n"
                                "int add(int a, int b) {\n    return a + b;\n}\n",
                                "#include <stdio.h>\n\n"
                                "int add(int a, int b) {\n    return a - b;\n}\n"});
        check_adm(Language::c, {StructureKind::strukt, "node", "",
                                "struct node {\n    int value;\n};\n",
                                "struct node {\n    int value;\n    struct node *next;\n};\n"});
        check_adm(Language::c, {StructureKind::enumeration, "color", "",
                                "enum color {\n    RED\n};\n",
                                "enum color {\n    RED,\n    BLUE\n};\n"});
    }
    SUBCASE("java") {
        check_adm_table(Language::java, {
            {StructureKind::klass, "Service", "",
             "class Service {\n    int count;\n}\n",
             "class Service {\n    int count;\n    int total;\n}\n"},
            {StructureKind::method, "Service.next",
             "class Service {\n}\n",
             "class Service {\n    int next() {\n        return 1;\n    }\n}\n",
             "class Service {\n    int next() {\n        return 2;\n    }\n}\n"},
            {StructureKind::interface, "Store", "",
             "interface Store {\n    int get(String key);\n}\n",
             "interface Store {\n    int get(String key);\n    void clear();\n}\n"},
            {StructureKind::enumeration, "Mode", "",
             "enum Mode {\n    FAST\n}\n",
             "enum Mode {\n    FAST,\n    SLOW\n}\n"},
            {StructureKind::annotation, "Marker", "",
             "@interface Marker {\n    String value();\n}\n",
             "@interface Marker {\n    String value();\n    int weight();\n}\n"},
        });
    }
    SUBCASE("python") {
        check_adm_table(Language::python, {
            {StructureKind::function, "top", "",
             "def top(x):\n    return x\n",
             "def top(x):\n    return x + 1\n"},
            {StructureKind::klass, "Engine", "",
             "class Engine:\n    rate = 1\n",
             "class Engine:\n    rate = 2\n"},
            {StructureKind::async_function, "poll", "",
             "async def poll():\n    return 2\n",
             "async def poll():\n    return 3\n"},
        });
    }
    SUBCASE("go") {
        check_adm_table(Language::go, {
            {StructureKind::function, "Add",
             "package main\n",
             "package main\n\nfunc Add(a int, b int) int {\n    return a + b\n}\n",
             "package main\n\nfunc Add(a int, b int) int {\n    return a - b\n}\n"},
            {StructureKind::strukt, "Point",
             "package main\n",
             "package main\n\ntype Point struct {\n    X int\n}\n",
             "package main\n\ntype Point struct {\n    X int\n    Y int\n}\n"},
            {StructureKind::interface, "Reader",
             "package main\n",
             "package main\n\ntype Reader interface {\n    Read() int\n}\n",
             "package main\n\ntype Reader interface {\n    Read() int\n    Close() error\n}\n"},
        });
    }
    SUBCASE("javascript") {
        check_adm_table(Language::javascript, {
            {StructureKind::function, "parse", "",
             "function parse(input) {\n  return input;\n}\n",
             "function parse(input) {\n  return input.trim();\n}\n"},
            {StructureKind::klass, "Store", "",
             "class Store {\n}\n",
             "class Store {\n  extra = 1;\n}\n"},
            {StructureKind::method, "Store.get",
             "class Store {\n}\n",
             "class Store {\n  get(key) {\n    return key;\n  }\n}\n",
             "class Store {\n  get(key) {\n    return key + 1;\n  }\n}\n"},
            {StructureKind::arrow_function, "load", "",
             "const load = (path) => {\n  return path;\n};\n",
             "const load = (path) => {\n  return path.trim();\n};\n"},
            {StructureKind::object_literal, "config", "",
             "const config = {\n  retries: 3,\n};\n",
             "const config = {\n  retries: 4,\n};\n"},
        });
    }
    SUBCASE("typescript") {
        check_adm_table(Language::typescript, {
            {StructureKind::function, "identity", "",
             "function identity(value: number): number {\n  return value;\n}\n",
             "function identity(value: number): number {\n  return value + 1;\n}\n"},
            {StructureKind::klass, "Grid", "",
             "class Grid {\n}\n",
             "class Grid {\n  size = 0;\n}\n"},
            {StructureKind::method, "Grid.render",
             "class Grid {\n}\n",
             "class Grid {\n  render(): void {\n    this.draw();\n  }\n}\n",
             "class Grid {\n  render(): void {\n    this.paint();\n  }\n}\n"},
            {StructureKind::interface, "Shape", "",
             "interface Shape {\n  area(): number;\n}\n",
             "interface Shape {\n  area(): number;\n  perimeter(): number;\n}\n"},
            {StructureKind::type_alias, "Result", "",
             "type Result = {\n  ok: boolean;\n};\n",
             "type Result = {\n  ok: boolean;\n  code: number;\n};\n"},
            {StructureKind::enumeration, "Direction", "",
             "enum Direction {\n  Up,\n}\n",
             "enum Direction {\n  Up,\n  Down,\n}\n"},
            {StructureKind::arrow_function, "mk", "",
             "const mk = (n: number): number[] => {\n  return [n];\n};\n",
             "const mk = (n: number): number[] => {\n  return [n, n];\n};\n"},
        });
    }
}

namespace {

const char* kCppBefore = "namespace app {\n"            // 1
                         "\n"                           // 2
                         "struct Point {\n"             // 3
                         "    int x;\n"                 // 4
                         "};\n"                         // 5
                         "\n"                           // 6
                         "enum class Color {\n"         // 7
                         "    red,\n"                   // 8
                         "    green\n"                  // 9
                         "};\n"                         // 10
                         "\n"                           // 11
                         "class Widget {\n"             // 12
                         "public:\n"                    // 13
                         "    void draw() {\n"          // 14
                         "        render(x);\n"         // 15
                         "    }\n"                      // 16
                         "};\n"                         // 17
                         "\n"                           // 18
                         "int helper(int a) {\n"        // 19
                         "    return a + 1;\n"          // 20
                         "}\n"                          // 21
                         "\n"                           // 22
                         "} // namespace app\n";        // 23

const char* kCppAfter = "namespace app {\n"             // 1
                        "\n"                            // 2
                        "struct Point {\n"              // 3
                        "    int x;\n"                  // 4
                        "};\n"                          // 5
                        "\n"                            // 6
                        "enum class Color {\n"          // 7
                        "    red,\n"                    // 8
                        "    green\n"                   // 9
                        "};\n"                          // 10
                        "\n"                            // 11
                        "enum class Shade {\n"          // 12
                        "    dark\n"                    // 13
                        "};\n"                          // 14
                        "\n"                            // 15
                        "class Widget {\n"              // 16
                        "public:\n"                     // 17
                        "    void draw() {\n"           // 18
                        "        render(x + 1);\n"      // 19
                        "    }\n"                       // 20
                        "};\n"                          // 21
                        "\n"                            // 22
                        "int scale(int a) {\n"          // 23
                        "    return a * 2;\n"           // 24
                        "}\n"                           // 25
                        "\n"                            // 26
                        "} // namespace app\n";         // 27

} // namespace

TEST_CASE("diff_structures: hand-annotated C++ before/after") {
    auto changes = ast::diff_structures(kCppBefore, kCppAfter, Language::cpp);
    REQUIRE(changes.size() == 6);

    // Untouched siblings (Point, Color) are omitted even though nothing else
    // shifted above them; enclosing scopes of edits surface as modified.
    CHECK(find_change(changes, StructureKind::strukt, "app.Point",
                      ChangeKind::modified) == nullptr);

    const auto* shade =
        find_change(changes, StructureKind::enumeration, "app.Shade", ChangeKind::added);
    REQUIRE(shade != nullptr);
    CHECK(shade->span_after == std::pair<int, int>{12, 14});
    CHECK_FALSE(shade->span_before.has_value());

    const auto* scale =
        find_change(changes, StructureKind::function, "app.scale", ChangeKind::added);
    REQUIRE(scale != nullptr);
    CHECK(scale->span_after == std::pair<int, int>{23, 25});

    const auto* helper =
        find_change(changes, StructureKind::function, "app.helper", ChangeKind::deleted);
    REQUIRE(helper != nullptr);
    CHECK(helper->span_before == std::pair<int, int>{19, 21});
    CHECK_FALSE(helper->span_after.has_value());

    const auto* draw = find_change(changes, StructureKind::function, "app.Widget.draw",
                                   ChangeKind::modified);
    REQUIRE(draw != nullptr);
    CHECK(draw->span_before == std::pair<int, int>{13, 16});
    CHECK(draw->span_after == std::pair<int, int>{17, 20});

    const auto* widget =
        find_change(changes, StructureKind::klass, "app.Widget", ChangeKind::modified);
    REQUIRE(widget != nullptr);
    CHECK(widget->span_before == std::pair<int, int>{12, 17});
    CHECK(widget->span_after == std::pair<int, int>{16, 21});

    const auto* ns =
        find_change(changes, StructureKind::name_space, "app", ChangeKind::modified);
    REQUIRE(ns != nullptr);
    CHECK(ns->span_before == std::pair<int, int>{1, 23});
    CHECK(ns->span_after == std::pair<int, int>{1, 27});
}

TEST_CASE("diff_structures: absent sides and both-absent error") {
    const char* src = "def top(x):\n    return x\n";
    auto added = ast::diff_structures(std::nullopt, src, Language::python);
    REQUIRE(added.size() == 1);
    CHECK(added[0].change == ChangeKind::added);

    auto deleted = ast::diff_structures(src, std::nullopt, Language::python);
    REQUIRE(deleted.size() == 1);
    CHECK(deleted[0].change == ChangeKind::deleted);

    CHECK_THROWS_AS(ast::diff_structures(std::nullopt, std::nullopt, Language::python),
                    std::invalid_argument);
    CHECK_THROWS_AS(ast::diff_structures("a", "b", Language::other),
                    std::invalid_argument);
}

TEST_CASE("parse_hunks: all header forms, defaults, and malformed input") {
    auto hunks = ast::parse_hunks("--- a/f\n"
                                  "+++ b/f\n"
                                  "@@ -1,2 +3,4 @@ int context()\n"
                                  " unchanged\n"
                                  "@@ -7,2 +9 @@\n"
                                  "@@ -11 +12,3 @@\n"
                                  "@@ -20 +21 @@\n");
    REQUIRE(hunks.size() == 4);
    CHECK(hunks[0].old_start == 1);
    CHECK(hunks[0].old_len == 2);
    CHECK(hunks[0].new_start == 3);
    CHECK(hunks[0].new_len == 4);
    CHECK(hunks[1].old_len == 2);
    CHECK(hunks[1].new_start == 9);
    CHECK(hunks[1].new_len == 1); // omitted length defaults to 1
    CHECK(hunks[2].old_len == 1);
    CHECK(hunks[2].new_len == 3);
    CHECK(hunks[3].old_start == 20);
    CHECK(hunks[3].new_start == 21);
    CHECK(hunks[3].old_len == 1);
    CHECK(hunks[3].new_len == 1);

    CHECK(ast::parse_hunks("just prose\nno headers\n").empty());
    CHECK_THROWS_WITH_AS(ast::parse_hunks("@@ -x +y @@\n"),
                         doctest::Contains("malformed-diff"), std::invalid_argument);
    CHECK_THROWS_AS(ast::parse_hunks("@@@ nonsense\n"), std::invalid_argument);
}

TEST_CASE("map_hunks: enclosing chains, pure deletions, fallback, orphans") {
    auto before = ast::extract_declarations(kCppBefore, Language::cpp);
    auto after = ast::extract_declarations(kCppAfter, Language::cpp);

    const char* diff = "--- a/widget.cpp\n"
                       "+++ b/widget.cpp\n"
                       "@@ -10,0 +12,3 @@\n"
                       "@@ -15,1 +19,1 @@\n"
                       "@@ -20,1 +23,0 @@\n"  // pure deletion: old-side decls
                       "@@ -1,1 +20,9 @@\n";  // runs past app's end: fallback
    auto contexts = ast::map_hunks(diff, before, after);
    REQUIRE(contexts.size() == 4);

    using Link = std::pair<StructureKind, std::string>;

    CHECK(contexts[0].enclosing_chain ==
          std::vector<Link>{{StructureKind::name_space, "app"},
                            {StructureKind::enumeration, "app.Shade"}});
    CHECK_FALSE(contexts[0].orphan);

    CHECK(contexts[1].enclosing_chain ==
          std::vector<Link>{{StructureKind::name_space, "app"},
                            {StructureKind::klass, "app.Widget"},
                            {StructureKind::function, "app.Widget.draw"}});

    CHECK(contexts[2].hunk.new_len == 0);
    CHECK(contexts[2].enclosing_chain ==
          std::vector<Link>{{StructureKind::name_space, "app"},
                            {StructureKind::function, "app.helper"}});

    // [20, 28] is contained by nothing; the chain falls back to the
    // declarations holding the first changed line.
    CHECK(contexts[3].enclosing_chain ==
          std::vector<Link>{{StructureKind::name_space, "app"},
                            {StructureKind::klass, "app.Widget"},
                            {StructureKind::function, "app.Widget.draw"}});
    CHECK_FALSE(contexts[3].orphan);

    auto orphans = ast::map_hunks("@@ -1,2 +1,2 @@\n", {}, {});
    REQUIRE(orphans.size() == 1);
    CHECK(orphans[0].orphan);
    CHECK(orphans[0].enclosing_chain.empty());
}
