#include <algorithm>
#include <map>

#include "codesim/frontend.hpp"
#include "codesim/lowering.hpp"
#include "codesim/pipeline.hpp"
#include "doctest.h"
#include "program_gen.hpp"

using namespace codesim;

namespace {

LowProgram compile_text(const std::string& text) { return compile(parse(lex(text))); }

LowToken tok(Opcode op) {
    LowToken t;
    t.op = op;
    t.scope = {ScopeTag::FunctionRoot};
    return t;
}

LowToken load(int slot) {
    LowToken t = tok(Opcode::Load);
    t.slot = slot;
    return t;
}

LowToken cnst(const std::string& v) {
    LowToken t = tok(Opcode::Const);
    t.constant = v;
    return t;
}

LowToken invoke(const std::string& name, int argc) {
    LowToken t = tok(Opcode::Invoke);
    t.callee = 1;
    t.callee_name = name;
    t.argc = argc;
    return t;
}

LowToken branch(Opcode op, int label) {
    LowToken t = tok(op);
    t.label = label;
    return t;
}

std::vector<std::string> texts(const std::vector<LowToken>& body) {
    std::vector<std::string> out;
    for (const auto& t : body) out.push_back(t.text());
    return out;
}

std::vector<TokenSequence> sequences(const std::string& text, const ApproachConfig& config) {
    return build_sequences(parse_source(text, "case.mj"), config);
}

std::vector<std::string> keys(const std::vector<TokenSequence>& seqs) {
    std::vector<std::string> out;
    for (const auto& s : seqs)
        for (const auto& i : s.items) out.push_back(i.key);
    return out;
}

LowProgram generalized(const std::string& text) {
    LowProgram p = compile_text(text);
    for (auto& fn : p.functions) fn.body = generalize(reinterpret(fn.body));
    return p;
}

}  // namespace

TEST_CASE("approach presets") {
    const ApproachConfig sta = ApproachConfig::sta();
    CHECK(!(sta.linearization_enabled || sta.generalization_enabled || sta.reinterpretation_enabled ||
            sta.weighting_enabled || sta.argument_removal_enabled || sta.invoked_removal_enabled));
    const ApproachConfig lla = ApproachConfig::lla();
    CHECK((lla.linearization_enabled && lla.generalization_enabled && lla.reinterpretation_enabled));
    CHECK(!(lla.weighting_enabled || lla.argument_removal_enabled || lla.invoked_removal_enabled));
    const ApproachConfig ext = ApproachConfig::ext_lla(5);
    CHECK((ext.linearization_enabled && ext.generalization_enabled && ext.reinterpretation_enabled &&
           ext.weighting_enabled && ext.argument_removal_enabled && ext.invoked_removal_enabled));
    CHECK(ext.min_match_length == 5);
    CHECK(parse_approach("ext-lla") == Approach::EXT_LLA);
    CHECK(!parse_approach("bogus").has_value());
}

TEST_CASE("generalize") {
    SUBCASE("labels and targets are erased") {
        LowToken cmp = branch(Opcode::IfCmp, 3);
        cmp.cmp = CmpOp::GE;
        std::vector<LowToken> body{load(0), cnst("1"), cmp, cnst("2"), tok(Opcode::Print), branch(Opcode::Label, 3),
                                   tok(Opcode::Return)};
        std::vector<LowToken> g = generalize(body);
        CHECK(texts(g) == std::vector<std::string>{"LOAD 0", "CONST 1", "IFCMP GE", "CONST 2", "PRINT", "RETURN"});
        CHECK(g[0].leader);
        CHECK(!g[1].leader);
        CHECK(g[3].leader);  // after a branch
        CHECK(g[5].leader);  // after a label
    }
    SUBCASE("straight-line code is unchanged") {
        std::vector<LowToken> body{cnst("1"), tok(Opcode::Print), tok(Opcode::Return)};
        CHECK(texts(generalize(body)) == texts(body));
    }
    SUBCASE("label numbering does not matter") {
        LowProgram p = compile_text("fn main() { int x = read(); while (x > 0) { x = x - 1; } }");
        std::vector<LowToken> permuted = p.functions[0].body;
        for (auto& t : permuted)
            if (t.label != kNoLabel) t.label = 40 - t.label;
        CHECK(dump_body(permuted) != dump_body(p.functions[0].body));
        CHECK(dump_body(generalize(permuted)) == dump_body(generalize(p.functions[0].body)));
    }
}

TEST_CASE("reinterpret") {
    SUBCASE("3-arm switch equals the golden if-chain dump") {
        const std::string golden = read_file(CODESIM_FIXTURES "/ifchain3.dump");
        LowProgram sw = compile(load(CODESIM_FIXTURES "/switch3.mj").ast);
        LowProgram chain = compile(load(CODESIM_FIXTURES "/ifchain3.mj").ast);
        CHECK(dump_body(reinterpret(sw.functions[0].body)) == golden);
        CHECK(dump_body(chain.functions[0].body) == golden);
        CHECK(dump_body(reinterpret(chain.functions[0].body)) == golden);
    }
    SUBCASE("switch without default and with negative keys") {
        const std::string sw =
            "fn main() { int x = read(); switch (x + 1) { case -1: { print(1); } case 4: { print(2); } } print(0); }";
        const std::string chain =
            "fn main() { int x = read(); if (x + 1 == -1) { print(1); } else if (x + 1 == 4) { print(2); } print(0); }";
        CHECK(dump_body(reinterpret(compile_text(sw).functions[0].body)) ==
              dump_body(compile_text(chain).functions[0].body));
    }
    SUBCASE("nested switch inside an arm") {
        const std::string sw =
            "fn main() { int x = read(); int y = read(); switch (x) { case 1: { switch (y) { case 2: { print(2); } "
            "default: { print(3); } } } default: { print(4); } } }";
        const std::string chain =
            "fn main() { int x = read(); int y = read(); if (x == 1) { if (y == 2) { print(2); } else { print(3); } } "
            "else { print(4); } }";
        CHECK(dump_body(reinterpret(compile_text(sw).functions[0].body)) ==
              dump_body(compile_text(chain).functions[0].body));
    }
    SUBCASE("switch followed by a loop") {
        const std::string sw =
            "fn main() { int x = read(); switch (x) { case 0: { print(0); } default: { print(x); } } "
            "while (x > 0) { x = x - 1; } }";
        const std::string plain =
            "fn main() { int x = read(); if (x == 0) { print(0); } else { print(x); } while (x > 0) { x = x - 1; } }";
        CHECK(dump_body(reinterpret(compile_text(sw).functions[0].body)) ==
              dump_body(compile_text(plain).functions[0].body));
    }
    SUBCASE("no switch means no change") {
        LowProgram p = compile_text("fn main() { int x = read(); if (x > 1) { print(x); } }");
        CHECK(dump_body(reinterpret(p.functions[0].body)) == dump_body(p.functions[0].body));
    }
    SUBCASE("reinterpreted bodies keep stack discipline") {
        for (unsigned seed = 0; seed < 200; ++seed) {
            LowProgram p = compile_text(testgen::ProgramGen(seed).program());
            for (auto fn : p.functions) {
                fn.body = reinterpret(fn.body);
                CHECK(check_stack(fn).ok);
                for (const auto& t : fn.body) CHECK(t.op != Opcode::Switch);
            }
        }
    }
}

TEST_CASE("remove_arguments") {
    SUBCASE("simple argument expression") {
        std::vector<LowToken> body{load(0), cnst("2"), tok(Opcode::Add), invoke("f", 1)};
        CHECK(texts(remove_arguments(body)) == std::vector<std::string>{"INVOKE f 1"});
    }
    SUBCASE("zero arguments") {
        std::vector<LowToken> body{cnst("1"), tok(Opcode::Print), invoke("g", 0)};
        CHECK(texts(remove_arguments(body)) == texts(body));
    }
    SUBCASE("operations inside arguments are removed too") {
        LowProgram p = generalized("fn f(int v) { print(v); } fn main() { int a = 1; int b = 2; int c = 3; f(a + b * c); }");
        const auto& main = p.find("main")->body;
        auto call = std::find_if(main.begin(), main.end(), [](const LowToken& t) { return t.op == Opcode::Invoke; });
        REQUIRE(call != main.end());
        std::vector<LowToken> before(main.begin(), call);
        CHECK(texts({before.end() - 5, before.end()}) ==
              std::vector<std::string>{"LOAD 0", "LOAD 1", "LOAD 2", "MUL", "ADD"});
        std::vector<LowToken> removed = remove_arguments(main);
        CHECK(removed.size() == main.size() - 5);
    }
    SUBCASE("two arguments, leading statement kept") {
        std::vector<LowToken> body{cnst("9"), tok(Opcode::Print), load(0), cnst("2"), invoke("h", 2), tok(Opcode::Return)};
        CHECK(texts(remove_arguments(body)) == std::vector<std::string>{"CONST 9", "PRINT", "INVOKE h 2", "RETURN"});
    }
    SUBCASE("preparation outside the basic block is a recorded failure") {
        std::vector<LowToken> body{load(0), branch(Opcode::Goto, kNoLabel), invoke("f", 1)};
        std::vector<HeuristicFailure> failures;
        CHECK(texts(remove_arguments(body, &failures, "main")) == texts(body));
        REQUIRE(failures.size() == 1);
        CHECK(failures[0].function == "main");
        CHECK(failures[0].position == 2);
    }
}

TEST_CASE("linearize") {
    SUBCASE("no calls is the identity") {
        LowProgram p = generalized("fn main() { int x = read(); while (x > 0) { print(x); x = x - 1; } }");
        CHECK(dump_body(linearize(p).at(0)) == dump_body(p.functions[0].body));
    }
    SUBCASE("flat callee lands at the call-site path") {
        LowProgram p = generalized("fn f() { print(1); print(2); } fn main() { int c = read(); if (c > 0) { f(); } }");
        const auto lin = linearize(p);
        const auto& main = lin.at(p.find("main")->id);
        CHECK(dump_body(main) ==
              "READ @ fn\nSTORE 0 @ fn\nLOAD 0 @ fn\nCONST 0 @ fn\nIFCMP LE @ fn\n"
              "CONST 1 @ fn/then\nPRINT @ fn/then\nCONST 2 @ fn/then\nPRINT @ fn/then\nRETURN @ fn\n");
    }
    SUBCASE("extracting a block then calling it reproduces the original") {
        const std::string original =
            "fn main() { int s = 0; int i = 0; while (i < 3) { s = s + i; i = i + 1; } print(s); print(\"end\"); }";
        const std::string extracted =
            "fn work() { int s = 0; int i = 0; while (i < 3) { s = s + i; i = i + 1; } print(s); } "
            "fn main() { work(); print(\"end\"); }";
        CHECK(keys(sequences(original, ApproachConfig::ext_lla())) == keys(sequences(extracted, ApproachConfig::ext_lla())));
    }
    SUBCASE("extracted block with a parameter differs only by argument binding") {
        const std::string original = "fn main() { int x = read(); print(x * 2); }";
        const std::string extracted = "fn show(int v) { print(v * 2); } fn main() { int x = read(); show(x); }";
        auto a = sequences(original, ApproachConfig::ext_lla());
        auto b = sequences(extracted, ApproachConfig::ext_lla());
        REQUIRE(b.size() == 1);
        std::vector<std::string> mnemonics_a, mnemonics_b;
        for (const auto& i : a[0].items) mnemonics_a.push_back(i.text.substr(0, i.text.find(' ')));
        for (std::size_t k = 0; k < b[0].items.size(); ++k) {
            const auto& text = b[0].items[k].text;
            // The binding STORE immediately follows the original STORE of x.
            if (k == 2) {
                CHECK(text == "STORE 1 @ fn");
                continue;
            }
            mnemonics_b.push_back(text.substr(0, text.find(' ')));
        }
        CHECK(mnemonics_a == mnemonics_b);
    }
    SUBCASE("mutual recursion: each inlined once into main, cycle calls kept") {
        LowProgram p = compile(load(CODESIM_FIXTURES "/mutual.mj").ast);
        for (auto& fn : p.functions) fn.body = generalize(reinterpret(fn.body));
        const auto lin = linearize(p);
        CHECK(dump_body(lin.at(p.find("main")->id)) == read_file(CODESIM_FIXTURES "/mutual.expanded"));
        // f keeps its opaque call to g.
        const auto& f = lin.at(p.find("f")->id);
        CHECK(std::count_if(f.begin(), f.end(), [](const LowToken& t) { return t.op == Opcode::Invoke; }) == 1);
    }
    SUBCASE("self recursion terminates") {
        LowProgram p = generalized("fn r(int n) { if (n > 0) { r(n - 1); } } fn main() { r(3); }");
        const auto lin = linearize(p);
        const auto& main = lin.at(p.find("main")->id);
        CHECK(std::count_if(main.begin(), main.end(), [](const LowToken& t) { return t.op == Opcode::Invoke; }) == 1);
    }
    SUBCASE("inlined size follows the call structure") {
        for (unsigned seed = 0; seed < 200; ++seed) {
            LowProgram p = generalized(testgen::ProgramGen(seed).program());
            const auto lin = linearize(p);
            // Generated programs are acyclic: every call is inlined.
            std::map<int, std::size_t> expected;
            for (const auto& fn : p.functions) {
                std::size_t n = 0;
                for (const auto& t : fn.body) {
                    if (t.op != Opcode::Invoke) {
                        ++n;
                        continue;
                    }
                    const LowFunction& callee = p.functions[t.callee];
                    n += callee.param_count + expected.at(callee.id) - 1;  // minus its RETURN/RETVAL
                }
                expected[fn.id] = n;
                CHECK(lin.at(fn.id).size() == n);
            }

            // With one call site per callee the growth is bounded by
            // |program| x longest call chain.
            std::map<int, int> sites;
            std::size_t total = 0;
            for (const auto& fn : p.functions) {
                total += fn.body.size();
                for (const auto& t : fn.body)
                    if (t.op == Opcode::Invoke) ++sites[t.callee];
            }
            if (std::any_of(sites.begin(), sites.end(), [](const auto& kv) { return kv.second > 1; })) continue;
            std::map<int, std::size_t> chain;
            for (const auto& fn : p.functions) {
                std::size_t longest = 0;
                for (int c : fn.invoked_ids) longest = std::max(longest, chain.at(c));
                chain[fn.id] = longest + 1;
            }
            std::size_t longest = 0;
            for (const auto& [id, n] : chain) longest = std::max(longest, n);
            for (const auto& [id, body] : lin) CHECK(body.size() <= total * longest);
        }
    }
}

TEST_CASE("remove_invoked") {
    auto pool_names = [](const std::string& text) {
        LowProgram p = compile_text(text);
        std::vector<std::string> names;
        for (int id : remove_invoked(p)) names.push_back(p.functions[id].name);
        std::sort(names.begin(), names.end());
        return names;
    };
    CHECK(pool_names("int k = 1; fn g() { } fn f() { g(); } fn main() { f(); }") ==
          std::vector<std::string>{"<init>", "main"});
    CHECK(pool_names("fn h() { } fn main() { }") == std::vector<std::string>{"h", "main"});
    CHECK(pool_names(read_file(CODESIM_FIXTURES "/mutual.mj")) == std::vector<std::string>{"main"});
    // An uncalled cycle stays in the pool as a whole.
    CHECK(pool_names("fn a(int n) { if (n > 0) { b(n - 1); } } fn b(int n) { a(n); } fn main() { }") ==
          std::vector<std::string>{"a", "b", "main"});
}

TEST_CASE("build_sequences") {
    const std::string program = read_file(CODESIM_FIXTURES "/sample.mj");
    SourceUnit unit = parse_source(program, "sample.mj");
    SUBCASE("identical files") {
        for (Approach a : kAllApproaches) {
            CHECK(dump_sequences(build_sequences(unit, ApproachConfig::of(a))) ==
                  dump_sequences(build_sequences(parse_source(program, "sample.mj"), ApproachConfig::of(a))));
        }
    }
    SUBCASE("comment stripping is invisible to STA and Ext-LLA") {
        SourceUnit stripped = parse_source(print_program(unit.ast), "sample.mj");
        CHECK(keys(build_sequences(unit, ApproachConfig::sta())) == keys(build_sequences(stripped, ApproachConfig::sta())));
        CHECK(keys(build_sequences(unit, ApproachConfig::ext_lla())) ==
              keys(build_sequences(stripped, ApproachConfig::ext_lla())));
    }
    SUBCASE("renaming locals: STA sees every occurrence, Ext-LLA sees nothing") {
        SourceUnit renamed = parse_source(read_file(CODESIM_FIXTURES "/sample_renamed.mj"), "sample.mj");
        auto sta_a = keys(build_sequences(unit, ApproachConfig::sta()));
        auto sta_b = keys(build_sequences(renamed, ApproachConfig::sta()));
        REQUIRE(sta_a.size() == sta_b.size());
        int differing = 0;
        for (std::size_t i = 0; i < sta_a.size(); ++i) differing += sta_a[i] != sta_b[i];
        CHECK(differing == 7);  // total x3, best x4
        CHECK(keys(build_sequences(unit, ApproachConfig::ext_lla())) ==
              keys(build_sequences(renamed, ApproachConfig::ext_lla())));
        CHECK(keys(build_sequences(unit, ApproachConfig::lla())) == keys(build_sequences(renamed, ApproachConfig::lla())));
    }
    SUBCASE("key shapes") {
        for (const auto& s : build_sequences(unit, ApproachConfig::lla()))
            for (const auto& i : s.items) CHECK(i.key.find(" @ ") == std::string::npos);
        for (const auto& s : build_sequences(unit, ApproachConfig::ext_lla()))
            for (const auto& i : s.items) CHECK(i.key.find(" @ fn") != std::string::npos);
        for (const auto& s : build_sequences(unit, ApproachConfig::sta())) {
            CHECK(s.unit_name == "sample.mj");
            for (const auto& i : s.items) {
                const std::string kind = i.key.substr(0, i.key.find(' '));
                CHECK((kind == "keyword" || kind == "identifier" || kind == "int-literal" || kind == "string-literal" ||
                       kind == "bool-literal" || kind == "operator" || kind == "punctuation"));
            }
        }
    }
    SUBCASE("LLA keeps callees as units, Ext-LLA drops them") {
        auto lla = build_sequences(unit, ApproachConfig::lla());
        auto ext = build_sequences(unit, ApproachConfig::ext_lla());
        CHECK(lla.size() > ext.size());
        std::vector<std::string> names;
        for (const auto& s : ext) names.push_back(s.unit_name);
        CHECK(names == std::vector<std::string>{"main", "<init>"});
    }
    SUBCASE("switch and if-chain agree under both low-level approaches") {
        SourceUnit sw = load(CODESIM_FIXTURES "/switch3.mj");
        SourceUnit chain = load(CODESIM_FIXTURES "/ifchain3.mj");
        for (auto config : {ApproachConfig::lla(), ApproachConfig::ext_lla()})
            CHECK(keys(build_sequences(sw, config)) == keys(build_sequences(chain, config)));
    }
}

TEST_CASE("relocating a declaration out of a loop changes only its own Ext-LLA keys") {
    const std::string inside =
        "fn main() { int i = 0; while (i < 3) { int k = 7 * 2; print(i + k); i = i + 1; } }";
    const std::string outside =
        "fn main() { int i = 0; int k = 7 * 2; while (i < 3) { print(i + k); i = i + 1; } }";
    auto multiset = [](std::vector<std::string> v) {
        std::sort(v.begin(), v.end());
        return v;
    };
    // Slot numbering follows first occurrence, which this move preserves.
    auto lla_a = keys(sequences(inside, ApproachConfig::lla()));
    auto lla_b = keys(sequences(outside, ApproachConfig::lla()));
    CHECK(multiset(lla_a) == multiset(lla_b));
    CHECK(lla_a != lla_b);

    auto ext_a = multiset(keys(sequences(inside, ApproachConfig::ext_lla())));
    auto ext_b = multiset(keys(sequences(outside, ApproachConfig::ext_lla())));
    std::vector<std::string> only_a, only_b;
    std::set_difference(ext_a.begin(), ext_a.end(), ext_b.begin(), ext_b.end(), std::back_inserter(only_a));
    std::set_difference(ext_b.begin(), ext_b.end(), ext_a.begin(), ext_a.end(), std::back_inserter(only_b));
    CHECK(only_a == std::vector<std::string>{"CONST 2 @ fn/while-body", "CONST 7 @ fn/while-body",
                                             "MUL @ fn/while-body", "STORE 1 @ fn/while-body"});
    CHECK(only_b == std::vector<std::string>{"CONST 2 @ fn", "CONST 7 @ fn", "MUL @ fn", "STORE 1 @ fn"});
}
