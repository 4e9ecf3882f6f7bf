#include <map>
#include <regex>

#include "codesim/frontend.hpp"
#include "codesim/lowering.hpp"
#include "doctest.h"
#include "program_gen.hpp"

using namespace codesim;

namespace {

LowProgram compile_text(const std::string& text) { return compile(parse(lex(text))); }

std::string dump_text(const std::string& text) { return dump_program(compile_text(text)); }

std::string body_of(const std::string& text, const std::string& fn) {
    LowProgram p = compile_text(text);
    const LowFunction* f = p.find(fn);
    REQUIRE(f != nullptr);
    return dump_body(f->body);
}

// Renames every identifier that matches `pattern` by token rewriting; the
// result is rejoined with single spaces.
std::string rename_tokens(const std::string& text, const std::regex& pattern, const std::string& prefix) {
    std::string out;
    for (const auto& t : lex(text)) {
        if (t.kind == TokenKind::Identifier && std::regex_match(t.lexeme, pattern))
            out += prefix + t.lexeme + "_r";
        else
            out += t.lexeme;
        out += ' ';
    }
    return out;
}

// Token text with callee names blanked out.
std::vector<std::string> nameless(const LowFunction& fn) {
    std::vector<std::string> out;
    for (auto t : fn.body) {
        t.callee_name.clear();
        out.push_back(t.text() + " @ " + scope_path_text(t.scope));
    }
    return out;
}

ScopePath path_of_print(const LowFunction& fn, const std::string& constant) {
    for (std::size_t i = 0; i + 1 < fn.body.size(); ++i)
        if (fn.body[i].op == Opcode::Const && fn.body[i].constant == constant && fn.body[i + 1].op == Opcode::Print)
            return fn.body[i].scope;
    FAIL("constant not printed: " << constant);
    return {};
}

}  // namespace

TEST_CASE("golden: globals compile into <init>") {
    CHECK(dump_text("int g = 5; fn main(){ print(g); }") == read_file(CODESIM_FIXTURES "/global_init.dump"));
}

TEST_CASE("empty main is a single RETURN and has no <init>") {
    LowProgram p = compile_text("fn main() { }");
    REQUIRE(p.functions.size() == 1);
    CHECK(dump_body(p.functions[0].body) == "RETURN @ fn\n");
    CHECK(p.find(kInitFunction) == nullptr);
    // A global without initializer does not create <init> either.
    CHECK(compile_text("int g; fn main() { g = 1; }").find(kInitFunction) == nullptr);
}

TEST_CASE("while and for lower identically") {
    const std::string w = "fn main() { int i = 0; while (i < 3) { print(i); i = i + 1; } }";
    const std::string f = "fn main() { for (int i = 0; i < 3; i += 1) { print(i); } }";
    CHECK(dump_text(w) == dump_text(f));
    const std::string w2 = "fn main() { int c = read(); while (c > 0) { c = c - 1; } }";
    const std::string f2 = "fn main() { int c = read(); for (; c > 0; ) { c = c - 1; } }";
    CHECK(dump_text(w2) == dump_text(f2));
}

TEST_CASE("property: sugar invariance over random programs") {
    // Each generated `for (int c = 0; c < n; c += 1) B` is rewritten by hand to
    // `int c = 0; while (c < n) { B c = c + 1; }` at the token level.
    for (unsigned seed = 0; seed < 100; ++seed) {
        const std::string program = testgen::ProgramGen(seed).program();
        Ast ast = parse(lex(program));
        bool changed = false;
        for (auto& fn : ast.functions) {
            for_each_stmt_mut(fn.body, [&](Stmt& s) {
                if (s.kind != StmtKind::Block) return;
                std::vector<Stmt> out;
                for (auto& child : s.body) {
                    if (child.kind != StmtKind::For) {
                        out.push_back(child);
                        continue;
                    }
                    changed = true;
                    for (auto& init : child.for_init) out.push_back(init);
                    Stmt loop;
                    loop.kind = StmtKind::While;
                    loop.exprs.push_back(child.cond());
                    Stmt body = child.loop_body();
                    const Stmt& update = child.for_update.front();
                    body.body.push_back(Stmt::assign(update.name,
                                                     Expr::binary("+", Expr::var(update.name), update.value())));
                    loop.body.push_back(body);
                    out.push_back(loop);
                }
                s.body = out;
            });
        }
        if (!changed) continue;
        CHECK(dump_program(compile(parse(lex(program)))) == dump_program(compile(ast)));
    }
}

TEST_CASE("compound assignment expands") {
    CHECK(body_of("fn main() { int x = 1; x += 2; }", "main") ==
          body_of("fn main() { int x = 1; x = x + 2; }", "main"));
    CHECK(body_of("fn main() { int[] a = new int[2]; a[1] *= 3; }", "main") ==
          body_of("fn main() { int[] a = new int[2]; a[1] = a[1] * 3; }", "main"));
}

TEST_CASE("scope paths") {
    SUBCASE("nested while and if") {
        LowProgram p = compile_text("fn main() { int c = 1; int d = 1; while (c > 0) { if (d > 0) { print(\"X\"); } c = 0; } }");
        CHECK(path_of_print(*p.find("main"), "\"X\"") ==
              ScopePath{ScopeTag::FunctionRoot, ScopeTag::WhileBody, ScopeTag::Then});
    }
    SUBCASE("siblings share a path") {
        LowProgram p = compile_text("fn main() { if (true) { print(1); print(2); } }");
        CHECK(path_of_print(*p.find("main"), "1") == path_of_print(*p.find("main"), "2"));
    }
    SUBCASE("while body and do-while body differ") {
        LowProgram w = compile_text("fn main() { int c = 0; while (c < 1) { print(7); c = c + 1; } }");
        LowProgram d = compile_text("fn main() { int c = 0; do { print(7); c = c + 1; } while (c < 1); }");
        CHECK(path_of_print(*w.find("main"), "7") == ScopePath{ScopeTag::FunctionRoot, ScopeTag::WhileBody});
        CHECK(path_of_print(*d.find("main"), "7") == ScopePath{ScopeTag::FunctionRoot, ScopeTag::DoWhileBody});
    }
    SUBCASE("switch arms and else") {
        LowProgram p = compile_text(
            "fn main() { int x = read(); switch (x) { case 1: { print(1); } default: { print(2); } } "
            "if (x > 0) { print(3); } else { print(4); } }");
        const LowFunction& m = *p.find("main");
        CHECK(path_of_print(m, "1") == ScopePath{ScopeTag::FunctionRoot, ScopeTag::CaseArm});
        CHECK(path_of_print(m, "2") == ScopePath{ScopeTag::FunctionRoot, ScopeTag::DefaultArm});
        CHECK(path_of_print(m, "4") == ScopePath{ScopeTag::FunctionRoot, ScopeTag::Else});
    }
}

TEST_CASE("slot allocation") {
    SUBCASE("params first, then locals in order") {
        Ast ast = parse(lex("fn f(int a) { int x; int y; } fn main() { f(1); }"));
        SlotMap slots = slot_allocate(*ast.find_function("f"));
        CHECK(slots.count == 3);
        CHECK(slots.order == std::vector<std::pair<std::string, int>>{{"a", 0}, {"x", 1}, {"y", 2}});
    }
    SUBCASE("renaming keeps the mapping by position") {
        Ast ast = parse(lex("fn f(int a) { int p; int q; } fn main() { f(1); }"));
        SlotMap slots = slot_allocate(*ast.find_function("f"));
        CHECK(slots.order == std::vector<std::pair<std::string, int>>{{"a", 0}, {"p", 1}, {"q", 2}});
    }
    SUBCASE("redeclaration in disjoint blocks") {
        // Hand count: k=0, t(then)=1, t(else)=2, u=3, t(while)=4.
        Ast ast = parse(lex(read_file(CODESIM_FIXTURES "/redeclare.mj")));
        SlotMap slots = slot_allocate(*ast.find_function("main"));
        CHECK(slots.order == std::vector<std::pair<std::string, int>>{{"k", 0}, {"t", 1}, {"t", 2}, {"u", 3}, {"t", 4}});
        LowProgram p = compile(ast);
        CHECK(p.find("main")->slot_count == 5);
    }
}

TEST_CASE("compile errors") {
    CHECK_THROWS_AS(compile_text("fn main() { int x = true; }"), CompileError);
    CHECK_THROWS_AS(compile_text("fn main() { if (1) { } }"), CompileError);
    CHECK_THROWS_AS(compile_text("fn f(): int { print(1); } fn main() { print(f()); }"), CompileError);
    CHECK_THROWS_AS(compile_text("fn main() { return; print(1); }"), CompileError);
    CHECK_THROWS_AS(compile_text("fn f(): int { return 1; } fn main() { f(); }"), CompileError);
    CHECK_THROWS_AS(compile_text("fn main() { str s = \"a\"; s = s + 1; }"), CompileError);
    CHECK_NOTHROW(compile_text("fn f(int a): int { if (a > 0) { return 1; } return 0; } fn main() { print(f(1)); }"));
}

TEST_CASE("invoked ids and entry") {
    LowProgram p = compile_text("fn g() { } fn f() { g(); } fn main() { f(); g(); }");
    const LowFunction& m = *p.find("main");
    CHECK(p.functions[p.entry].name == "main");
    CHECK(m.invoked_ids == std::set<int>{p.find("f")->id, p.find("g")->id});
    CHECK(p.find("g")->invoked_ids.empty());
}

TEST_CASE("property: stack safety and label invariants over random programs") {
    for (unsigned seed = 0; seed < 300; ++seed) {
        LowProgram p = compile_text(testgen::ProgramGen(seed).program());
        for (const auto& fn : p.functions) {
            StackCheck check = check_stack(fn);
            CHECK_MESSAGE(check.ok, fn.name << ": " << check.message);
            REQUIRE(!fn.body.empty());
            CHECK((fn.body.back().op == Opcode::Return || fn.body.back().op == Opcode::RetVal));

            std::map<int, int> defined, referenced;
            for (const auto& t : fn.body) {
                CHECK(!t.scope.empty());
                CHECK(t.scope.front() == ScopeTag::FunctionRoot);
                if (t.op == Opcode::Label) ++defined[t.label];
                if (t.op == Opcode::IfCmp || t.op == Opcode::IfFalse || t.op == Opcode::Goto) ++referenced[t.label];
                if (t.op == Opcode::Switch)
                    for (int l : t.switch_targets) ++referenced[l];
            }
            for (const auto& [label, n] : defined) {
                CHECK(n == 1);
                CHECK(referenced.count(label) == 1);
            }
            for (const auto& [label, n] : referenced) CHECK(defined.count(label) == 1);
        }
    }
}

TEST_CASE("property: renaming locals and functions leaves tokens unchanged") {
    const std::regex locals("(v|p)[0-9]+");
    const std::regex helpers("h[0-9]+");
    for (unsigned seed = 0; seed < 200; ++seed) {
        const std::string program = testgen::ProgramGen(seed).program();
        LowProgram a = compile_text(program);
        LowProgram b = compile_text(rename_tokens(rename_tokens(program, locals, "loc_"), helpers, "fn_"));
        REQUIRE(a.functions.size() == b.functions.size());
        for (std::size_t i = 0; i < a.functions.size(); ++i) CHECK(nameless(a.functions[i]) == nameless(b.functions[i]));
    }
}

TEST_CASE("negative literals and short-circuit values") {
    CHECK(body_of("fn main() { print(-4); }", "main") == "CONST -4 @ fn\nPRINT @ fn\nRETURN @ fn\n");
    LowProgram p = compile_text("fn main() { bool b = 1 < 2 && 3 > 2; if (b || !b) { print(b); } }");
    CHECK(check_stack(*p.find("main")).ok);
}
