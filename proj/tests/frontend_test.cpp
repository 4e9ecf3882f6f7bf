#include <random>

#include "codesim/frontend.hpp"
#include "doctest.h"
#include "program_gen.hpp"

using namespace codesim;

namespace {

std::vector<std::pair<TokenKind, std::string>> kinds(const std::vector<SourceToken>& tokens) {
    std::vector<std::pair<TokenKind, std::string>> out;
    for (const auto& t : tokens) out.emplace_back(t.kind, t.lexeme);
    return out;
}

// Inserts comments and reflows whitespace at random token boundaries.
std::string inject_comments(const std::string& text, std::mt19937& rng) {
    std::string out;
    for (const auto& piece : lex_pieces(text)) {
        if (piece.kind == TextPiece::Kind::Space) {
            switch (rng() % 4) {
                case 0: out += piece.text + "/* note */ "; break;
                case 1: out += piece.text + "  // remark\n\t"; break;
                case 2: out += piece.text + "\n\n"; break;
                default: out += piece.text; break;
            }
            continue;
        }
        out += piece.text;
    }
    return out;
}

}  // namespace

TEST_CASE("lex drops a trailing line comment") {
    auto tokens = lex("x = 1; // note");
    REQUIRE(tokens.size() == 4);
    CHECK(kinds(tokens) == std::vector<std::pair<TokenKind, std::string>>{
                               {TokenKind::Identifier, "x"},
                               {TokenKind::Operator, "="},
                               {TokenKind::IntLiteral, "1"},
                               {TokenKind::Punctuation, ";"},
                           });
}

TEST_CASE("lex of empty input is empty") { CHECK(lex("").empty()); }

TEST_CASE("lex classifies keywords, literals and operators") {
    auto tokens = lex("fn f(int[] a): bool { return a[0] <= 2 && true != false; } str s = \"a\\\"b\";");
    CHECK(tokens[0].kind == TokenKind::Keyword);
    CHECK(tokens[1].kind == TokenKind::Identifier);
    CHECK(tokens[3].kind == TokenKind::Keyword);  // int
    bool saw_le = false, saw_and = false, saw_bool = false, saw_string = false;
    for (const auto& t : tokens) {
        saw_le |= t.lexeme == "<=" && t.kind == TokenKind::Operator;
        saw_and |= t.lexeme == "&&";
        saw_bool |= t.kind == TokenKind::BoolLiteral;
        saw_string |= t.kind == TokenKind::StringLiteral && t.lexeme == "\"a\\\"b\"";
    }
    CHECK(saw_le);
    CHECK(saw_and);
    CHECK(saw_bool);
    CHECK(saw_string);
}

TEST_CASE("lex positions strictly increase") {
    auto tokens = lex("fn main() {\n  int x = 10;\n  print(x);\n}\n");
    for (std::size_t i = 1; i < tokens.size(); ++i) {
        auto a = tokens[i - 1].pos, b = tokens[i].pos;
        CHECK((a.line < b.line || (a.line == b.line && a.column < b.column)));
    }
    CHECK(tokens[6].pos.line == 2);
    CHECK(tokens[6].pos.column == 7);
}

TEST_CASE("lex errors carry positions") {
    SUBCASE("unterminated string") {
        try {
            lex("x = \"abc");
            FAIL("expected LexError");
        } catch (const LexError& e) {
            CHECK(e.pos.line == 1);
            CHECK(e.pos.column == 5);
        }
    }
    SUBCASE("unterminated block comment") { CHECK_THROWS_AS(lex("/* never closed"), LexError); }
    SUBCASE("illegal character") {
        try {
            lex("x = 1;\n  y = #;");
            FAIL("expected LexError");
        } catch (const LexError& e) {
            CHECK(e.pos.line == 2);
            CHECK(e.pos.column == 7);
        }
    }
}

TEST_CASE("stripping comments leaves the token stream unchanged") {
    const std::string with = "/* header */\nfn main() { // entry\n  int x = 1; /* inline */ print(x); }\n";
    const std::string without = "\nfn main() {\n  int x = 1;  print(x); }\n";
    CHECK(kinds(lex(with)) == kinds(lex(without)));
}

TEST_CASE("property: comment injection and whitespace reflow never change lex output") {
    std::mt19937 rng(7);
    for (unsigned seed = 0; seed < 200; ++seed) {
        const std::string program = testgen::ProgramGen(seed).program();
        const auto base = kinds(lex(program));
        CHECK(kinds(lex(inject_comments(program, rng))) == base);
        CHECK(kinds(lex(program)) == base);
    }
}

TEST_CASE("lex_pieces is lossless") {
    const std::string text = "int g = 3; // c\nfn main() { /* b */ print(g); }";
    std::string joined;
    for (const auto& p : lex_pieces(text)) joined += p.text;
    CHECK(joined == text);
}

TEST_CASE("parse minimal program") {
    Ast ast = parse(lex("fn main() { print(1); }"));
    REQUIRE(ast.functions.size() == 1);
    CHECK(ast.functions[0].name == "main");
    REQUIRE(ast.functions[0].body.body.size() == 1);
    CHECK(ast.functions[0].body.body[0].kind == StmtKind::ExprStmt);
    CHECK(ast.functions[0].body.body[0].exprs[0].text == "print");
}

TEST_CASE("parse reports a missing main") {
    CHECK_THROWS_AS(parse(lex("fn helper() { }")), ResolveError);
    CHECK_THROWS_AS(parse(lex("fn main(int a) { }")), ResolveError);
}

TEST_CASE("parse golden tree for a while loop") {
    Ast ast = parse(lex("fn main() { int x = read(); while (x > 0) { x = x - 1; } }"));
    const auto& body = ast.functions[0].body.body;
    REQUIRE(body.size() == 2);
    REQUIRE(body[1].kind == StmtKind::While);
    CHECK(body[1].loop_body().body.size() == 1);
    CHECK(body[1].loop_body().body[0].kind == StmtKind::Assign);
    CHECK(dump_ast(ast) == read_file(CODESIM_FIXTURES "/while_loop.ast"));
}

TEST_CASE("parse errors") {
    SUBCASE("syntax") {
        try {
            parse(lex("fn main() { int x = ; }"));
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.pos.column == 21);
            CHECK(e.expected == "expression");
        }
    }
    SUBCASE("unknown variable") { CHECK_THROWS_AS(parse(lex("fn main() { y = 1; }")), ResolveError); }
    SUBCASE("unknown function") { CHECK_THROWS_AS(parse(lex("fn main() { f(); }")), ResolveError); }
    SUBCASE("duplicate local") { CHECK_THROWS_AS(parse(lex("fn main() { int a; int a; }")), ResolveError); }
    SUBCASE("shadowing a local") { CHECK_THROWS_AS(parse(lex("fn main() { int a; if (true) { int a; } }")), ResolveError); }
    SUBCASE("wrong arity") { CHECK_THROWS_AS(parse(lex("fn f(int a) { } fn main() { f(); }")), ResolveError); }
    SUBCASE("calling main") { CHECK_THROWS_AS(parse(lex("fn f() { main(); } fn main() { }")), ResolveError); }
    SUBCASE("duplicate case") {
        CHECK_THROWS_AS(parse(lex("fn main() { switch (1) { case 1: { } case 1: { } } }")), ResolveError);
    }
}

TEST_CASE("redeclaring in disjoint blocks is allowed") {
    CHECK_NOTHROW(parse(lex("fn main() { if (true) { int a = 1; } else { int a = 2; } { int a = 3; } }")));
}

TEST_CASE("load") {
    SUBCASE("valid file") {
        SourceUnit unit = load(CODESIM_FIXTURES "/hello.mj");
        CHECK(!unit.tokens.empty());
        CHECK(unit.origin == "hello.mj");
    }
    SUBCASE("missing file") { CHECK_THROWS_AS(load(CODESIM_FIXTURES "/does_not_exist.mj"), IoError); }
    SUBCASE("comments only: lexes, then fails to resolve main") {
        const std::string text = read_file(CODESIM_FIXTURES "/only_comments.mj");
        CHECK(lex(text).empty());
        CHECK_THROWS_AS(load(CODESIM_FIXTURES "/only_comments.mj"), ResolveError);
    }
}

TEST_CASE("property: parse . print . parse is a fixed point") {
    for (unsigned seed = 0; seed < 300; ++seed) {
        const std::string program = testgen::ProgramGen(seed).program();
        Ast first = parse(lex(program));
        const std::string printed = print_program(first);
        Ast second = parse(lex(printed));
        CHECK(first == second);
        CHECK(print_program(second) == printed);
        // The printer reproduces the original token stream exactly.
        CHECK(kinds(lex(printed)) == kinds(lex(program)));
    }
}

TEST_CASE("printer keeps else-if chains, parentheses and compound operators") {
    const std::string src =
        "int g = -1;\n\n"
        "fn f(int[] a, int n): int {\n"
        "    int s = (a[0] + n) * 2;\n"
        "    s -= 1;\n"
        "    if (s < 0) {\n        return 0;\n    } else if (!(s == 1)) {\n        s = 2;\n    } else {\n        s = 3;\n    }\n"
        "    for (; s > 0;) {\n        s = s - 1;\n    }\n"
        "    do {\n        s += 1;\n    } while (s < 2);\n"
        "    switch (s) {\n        case -1: {\n            print(\"neg\");\n        }\n        default: {\n            print(s);\n        }\n    }\n"
        "    return s;\n"
        "}\n\n"
        "fn main() {\n    int[] a = new int[3];\n    print(f(a, g));\n}\n";
    Ast ast = parse(lex(src));
    CHECK(print_program(ast) == src);
}
