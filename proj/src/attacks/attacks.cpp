#include <algorithm>
#include <array>
#include <functional>
#include <map>
#include <random>
#include <set>

#include "codesim/attacks.hpp"

namespace codesim {

namespace {

using Rng = std::mt19937_64;

std::size_t pick(Rng& rng, std::size_t n) { return static_cast<std::size_t>(rng() % n); }
bool coin(Rng& rng, unsigned percent) { return rng() % 100 < percent; }

struct KindInfo {
    AttackKind kind;
    const char* name;
    int level;
};

constexpr std::array<KindInfo, 16> kKinds{{
    {AttackKind::CommentStrip, "comment-strip", 1},
    {AttackKind::WhitespaceReflow, "whitespace-reflow", 1},
    {AttackKind::RenameLocals, "rename-locals", 2},
    {AttackKind::RenameFunctions, "rename-functions", 2},
    {AttackKind::RelocateDeclInBlock, "relocate-decl-in-block", 3},
    {AttackKind::RelocateDeclToGlobal, "relocate-decl-to-global", 3},
    {AttackKind::RelocateDeclOutOfLoop, "relocate-decl-out-of-loop", 3},
    {AttackKind::InlineFunction, "inline-function", 4},
    {AttackKind::ExtractBlock, "extract-block", 4},
    {AttackKind::WhileToFor, "while-to-for", 5},
    {AttackKind::WhileToDoWhile, "while-to-dowhile", 5},
    {AttackKind::SwapIfArms, "swap-if-arms", 5},
    {AttackKind::ExpandCompoundAssign, "expand-compound-assign", 5},
    {AttackKind::SwitchToIfChain, "switch-to-ifchain", 5},
    {AttackKind::LogicRewrite, "logic-rewrite", 6},
    {AttackKind::RenameEntryArtifacts, "rename-entry-artifacts", 0},
}};

const char* const kLocalNames[] = {
    "acc",  "tmp",   "val",   "cnt",  "idx",   "res",    "cur",     "prev", "nxt",  "num",  "len",
    "pos",  "pivot", "lo",    "hi",   "mid",   "flag",   "step",    "item", "elem", "left", "right",
    "key",  "temp",  "value", "aux",  "data",  "holder", "counter", "run",  "part", "piece", "slot",
    "mark", "probe", "span",  "unit", "delta", "bound",  "carry",   "seen", "spot", "head",  "tail",
};

const char* const kFunctionNames[] = {
    "helper", "compute", "process", "calc",    "doWork", "handle", "evaluate", "solve",  "update", "build",
    "check",  "apply",   "walk",    "scanAll", "fill",   "report", "show",     "emit",   "gather", "work",
};

const char* const kRemarks[] = {
    "main loop", "bookkeeping", "see above", "edge case", "keep this", "done here", "tweak later", "checked",
};

[[noreturn]] void not_applicable(AttackKind kind, const std::string& why) {
    throw NotApplicable(attack_kind_name(kind) + ": " + why);
}

// ---------------------------------------------------------------------------
// Name handling

enum class NameUse { LocalDecl, LocalRef, GlobalRef, Callee };
using NameFn = std::function<void(std::string&, NameUse)>;

// Walks a function the way the resolver does, telling each name apart as a
// local declaration, a local or global reference, or a callee.
class NameWalker {
public:
    explicit NameWalker(NameFn fn) : fn_(std::move(fn)) {}

    void function(Function& f) {
        scopes_.assign(1, {});
        for (auto& p : f.params) declare(p.name);
        for (auto& s : f.body.body) stmt(s);
    }

    // A statement list on its own: names declared outside it count as global.
    void fragment(std::vector<Stmt>& list) {
        scopes_.assign(1, {});
        for (auto& s : list) stmt(s);
    }

private:
    void declare(std::string& name) {
        scopes_.back().insert(name);
        fn_(name, NameUse::LocalDecl);
    }

    void ref(std::string& name) {
        bool local = false;
        for (const auto& scope : scopes_) local = local || scope.count(name);
        fn_(name, local ? NameUse::LocalRef : NameUse::GlobalRef);
    }

    void expr(Expr& e) {
        if (e.kind == ExprKind::Var) ref(e.text);
        if (e.kind == ExprKind::Call && !e.is_builtin_call()) fn_(e.text, NameUse::Callee);
        for (auto& a : e.args) expr(a);
    }

    void nested(Stmt& block) {
        scopes_.emplace_back();
        for (auto& s : block.body) stmt(s);
        scopes_.pop_back();
    }

    void stmt(Stmt& s) {
        switch (s.kind) {
            case StmtKind::VarDecl:
                for (auto& e : s.exprs) expr(e);
                declare(s.name);
                break;
            case StmtKind::Assign:
                ref(s.name);
                for (auto& e : s.exprs) expr(e);
                break;
            case StmtKind::If:
                expr(s.exprs.front());
                nested(s.body[0]);
                if (s.has_else()) {
                    if (s.body[1].kind == StmtKind::Block)
                        nested(s.body[1]);
                    else
                        stmt(s.body[1]);
                }
                break;
            case StmtKind::While:
            case StmtKind::DoWhile:
                expr(s.exprs.front());
                nested(s.body.front());
                break;
            case StmtKind::For:
                scopes_.emplace_back();
                for (auto& i : s.for_init) stmt(i);
                for (auto& e : s.exprs) expr(e);
                for (auto& u : s.for_update) stmt(u);
                nested(s.body.front());
                scopes_.pop_back();
                break;
            case StmtKind::Switch:
                expr(s.exprs.front());
                for (auto& arm : s.arms) nested(arm.block);
                break;
            case StmtKind::Return:
            case StmtKind::ExprStmt:
                for (auto& e : s.exprs) expr(e);
                break;
            case StmtKind::Block:
                nested(s);
                break;
        }
    }

    NameFn fn_;
    std::vector<std::set<std::string>> scopes_;
};

std::set<std::string> all_names(const Ast& ast) {
    std::set<std::string> names;
    for (const auto& g : ast.globals) names.insert(g.name);
    Ast copy = ast;
    for (auto& f : copy.functions) {
        names.insert(f.name);
        NameWalker([&](std::string& n, NameUse) { names.insert(n); }).function(f);
    }
    return names;
}

std::set<std::string> global_names(const Ast& ast) {
    std::set<std::string> names;
    for (const auto& g : ast.globals) names.insert(g.name);
    return names;
}

// Picks an unused name from the vocabulary, falling back to numbered forms.
template <std::size_t N>
std::string fresh_name(Rng& rng, std::set<std::string>& used, const char* const (&vocab)[N]) {
    const std::size_t start = pick(rng, N);
    for (int suffix = 0;; ++suffix) {
        for (std::size_t k = 0; k < N; ++k) {
            std::string name = vocab[(start + k) % N];
            if (suffix) name += std::to_string(suffix + 1);
            if (is_keyword(name) || used.count(name)) continue;
            used.insert(name);
            return name;
        }
    }
}

// Names read or written anywhere under a statement.
void collect_refs(const Stmt& s, std::set<std::string>& out) {
    for_each_stmt(s, [&](const Stmt& t) {
        if (t.kind == StmtKind::Assign) out.insert(t.name);
        for (const auto& e : t.exprs)
            for_each_expr(e, [&](const Expr& x) {
                if (x.kind == ExprKind::Var) out.insert(x.text);
            });
    });
}

bool declares(const Stmt& s, const std::string& name) {
    bool found = false;
    for_each_stmt(s, [&](const Stmt& t) { found = found || (t.kind == StmtKind::VarDecl && t.name == name); });
    return found;
}

bool contains_return(const Stmt& s) {
    bool found = false;
    for_each_stmt(s, [&](const Stmt& t) { found = found || t.kind == StmtKind::Return; });
    return found;
}

std::vector<Stmt*> blocks_of(Function& f) {
    std::vector<Stmt*> out;
    for_each_stmt_mut(f.body, [&](Stmt& s) {
        if (s.kind == StmtKind::Block) out.push_back(&s);
    });
    return out;
}

Expr parenthesized(Expr e) {
    if (e.parens == 0 && e.kind == ExprKind::Binary) ++e.parens;
    return e;
}

// No calls (so no reads), no faults, no dependence on array contents.
bool pure_total(const Expr& e) {
    bool ok = true;
    for_each_expr(e, [&](const Expr& x) {
        if (x.kind == ExprKind::Call || x.kind == ExprKind::Index || x.kind == ExprKind::NewArray) ok = false;
        if (x.kind == ExprKind::Binary && (x.text == "/" || x.text == "%")) ok = false;
    });
    return ok;
}

int expr_size(const Expr& e) {
    int n = 0;
    for_each_expr(e, [&](const Expr&) { ++n; });
    return n;
}

bool is_literal(const Expr& e) {
    if (e.kind == ExprKind::IntLit || e.kind == ExprKind::BoolLit || e.kind == ExprKind::StrLit) return true;
    return e.kind == ExprKind::Unary && e.text == "-" && e.parens == 0 && e.args[0].kind == ExprKind::IntLit &&
           e.args[0].parens == 0;
}

bool reparses(const Ast& ast) {
    try {
        parse(lex(print_program(ast)));
        return true;
    } catch (const Error&) {
        return false;
    }
}

// Candidates are enumerated afresh on a copy for every attempt, so the
// k-th candidate of the copy is the k-th candidate of the original.
Ast first_valid(const Ast& ast, AttackKind kind, Rng& rng, const std::function<std::size_t(Ast&)>& count,
                const std::function<void(Ast&, std::size_t)>& apply) {
    Ast probe = ast;
    const std::size_t n = count(probe);
    if (n == 0) not_applicable(kind, "no candidate");
    const std::size_t start = pick(rng, n);
    for (std::size_t k = 0; k < n; ++k) {
        Ast copy = ast;
        count(copy);
        apply(copy, (start + k) % n);
        if (reparses(copy)) return copy;
    }
    not_applicable(kind, "every candidate clashes with existing names");
}

// ---------------------------------------------------------------------------
// Level 1 (text)

std::string comment_strip(const std::string& text) {
    struct Line {
        std::string text;
        bool had_comment = false;
        bool has_token = false;
    };
    std::vector<Line> lines(1);
    bool any = false;
    bool after_comment = false;
    for (const auto& piece : lex_pieces(text)) {
        switch (piece.kind) {
            case TextPiece::Kind::LineComment:
            case TextPiece::Kind::BlockComment:
                any = true;
                lines.back().had_comment = true;
                after_comment = true;
                break;
            case TextPiece::Kind::Space:
                for (char c : piece.text) {
                    if (c == '\n')
                        lines.emplace_back();
                    else
                        lines.back().text += c;
                }
                after_comment = false;
                break;
            case TextPiece::Kind::Token: {
                auto& line = lines.back();
                if (after_comment && !line.text.empty() && line.text.back() != ' ' && line.text.back() != '\t')
                    line.text += ' ';
                line.text += piece.text;
                line.has_token = true;
                after_comment = false;
                break;
            }
        }
    }
    if (!any) not_applicable(AttackKind::CommentStrip, "no comments");
    std::string out;
    for (std::size_t k = 0; k < lines.size(); ++k) {
        auto& line = lines[k];
        while (!line.text.empty() && (line.text.back() == ' ' || line.text.back() == '\t')) line.text.pop_back();
        if (line.had_comment && !line.has_token) continue;
        out += line.text;
        if (k + 1 < lines.size()) out += '\n';
    }
    while (!out.empty() && out.front() == '\n') out.erase(out.begin());
    return out;
}

bool is_tight_punct(const std::string& t) {
    return t == "(" || t == ")" || t == "," || t == ";" || t == "[" || t == "]";
}

std::string whitespace_reflow(const std::string& text, Rng& rng) {
    static const char* const kIndents[] = {"  ", "\t", "   ", "        "};
    const std::string unit = kIndents[pick(rng, 4)];
    const bool allman = coin(rng, 50);
    const bool pad_parens = coin(rng, 40);
    const bool remarks = coin(rng, 50);
    const bool blank_lines = coin(rng, 40);

    const auto pieces = lex_pieces(text);
    auto next_token = [&](std::size_t from) -> const TextPiece* {
        for (std::size_t k = from; k < pieces.size(); ++k)
            if (pieces[k].kind == TextPiece::Kind::Token) return &pieces[k];
        return nullptr;
    };
    auto indent = [&](int depth) {
        std::string s;
        for (int k = 0; k < depth; ++k) s += unit;
        return s;
    };

    std::string out;
    int depth = 0;
    const TextPiece* prev = nullptr;  // previous piece
    for (std::size_t k = 0; k < pieces.size(); ++k) {
        const TextPiece& p = pieces[k];
        if (p.kind == TextPiece::Kind::Space) {
            const auto newlines = std::count(p.text.begin(), p.text.end(), '\n');
            const TextPiece* next = k + 1 < pieces.size() ? &pieces[k + 1] : nullptr;
            if (!next) {
                if (newlines) out += '\n';
                prev = &p;
                continue;
            }
            if (newlines > 0) {
                const TextPiece* tok = next_token(k + 1);
                const bool closes = next->kind == TextPiece::Kind::Token && tok && tok->text == "}";
                if (remarks && prev && prev->kind == TextPiece::Kind::Token && prev->text == ";" && coin(rng, 15))
                    out += std::string("  // ") + kRemarks[pick(rng, std::size(kRemarks))];
                const long lines = std::min<long>(newlines, 2) + (blank_lines && newlines == 1 && coin(rng, 10) ? 1 : 0);
                out += std::string(static_cast<std::size_t>(lines), '\n');
                out += indent(closes ? depth - 1 : depth);
            } else if (allman && next->kind == TextPiece::Kind::Token && next->text == "{" && prev &&
                       prev->kind == TextPiece::Kind::Token) {
                out += '\n' + indent(depth);
            } else if (prev && prev->kind == TextPiece::Kind::Token && next->kind == TextPiece::Kind::Token &&
                       (is_tight_punct(prev->text) || is_tight_punct(next->text)) && !pad_parens) {
                // `if (` becomes `if(`; removal next to punctuation never merges tokens.
                if (prev->text == "," || next->text == "{" || prev->text == ";") out += ' ';
            } else {
                out += ' ';
            }
            prev = &p;
            continue;
        }
        if (p.kind == TextPiece::Kind::Token) {
            if (pad_parens && prev && prev->kind == TextPiece::Kind::Token &&
                ((prev->text == "(" && p.text != ")") || (p.text == ")" && prev->text != "(")))
                out += ' ';
            if (p.text == "{") ++depth;
            if (p.text == "}") --depth;
        }
        out += p.text;
        prev = &p;
    }
    if (!text.empty() && text.back() == '\n' && (out.empty() || out.back() != '\n')) out += '\n';
    if (out == text) out = "// reformatted\n" + out;
    return out;
}

std::string rename_entry_artifacts(const Ast& ast, const std::string& text, Rng& rng) {
    static const char* const kOwners[] = {"student", "author", "owner", "user"};
    std::set<std::string> used = all_names(ast);
    std::string marker = "studentId";
    for (int k = 2; used.count(marker); ++k) marker = "studentId" + std::to_string(k);
    const auto id = 10000000 + rng() % 90000000;
    return std::string("// ") + kOwners[pick(rng, 4)] + " id " + std::to_string(id) + "\n// created with the course IDE\nint " +
           marker + " = " + std::to_string(id) + ";\n\n" + text;
}

// ---------------------------------------------------------------------------
// Level 2

void rename_locals(Ast& ast, Rng& rng) {
    std::set<std::string> used = all_names(ast);
    bool any = false;
    for (auto& f : ast.functions) {
        std::map<std::string, std::string> renamed;
        NameWalker([&](std::string& n, NameUse use) {
            if (use == NameUse::LocalDecl && !renamed.count(n)) renamed[n] = fresh_name(rng, used, kLocalNames);
            if (use == NameUse::LocalDecl || use == NameUse::LocalRef) {
                n = renamed.at(n);
                any = true;
            }
        }).function(f);
    }
    if (!any) not_applicable(AttackKind::RenameLocals, "no locals");
}

void rename_functions(Ast& ast, Rng& rng) {
    std::set<std::string> used = all_names(ast);
    std::map<std::string, std::string> renamed;
    for (auto& f : ast.functions) {
        if (f.name == "main") continue;
        renamed[f.name] = fresh_name(rng, used, kFunctionNames);
        f.name = renamed[f.name];
    }
    if (renamed.empty()) not_applicable(AttackKind::RenameFunctions, "main is the only function");
    for (auto& f : ast.functions)
        NameWalker([&](std::string& n, NameUse use) {
            if (use == NameUse::Callee) n = renamed.at(n);
        }).function(f);
}

// ---------------------------------------------------------------------------
// Level 3

void relocate_in_block(Ast& ast) {
    const std::set<std::string> globals = global_names(ast);
    bool moved = false;
    for (auto& f : ast.functions) {
        for (Stmt* block : blocks_of(f)) {
            std::vector<Stmt> head, rest;
            bool seen_other = false;
            for (auto& s : block->body) {
                if (s.kind != StmtKind::VarDecl) {
                    seen_other = true;
                    rest.push_back(std::move(s));
                    continue;
                }
                bool hoist = seen_other && !globals.count(s.name);
                for (const auto& before : rest) hoist = hoist && !declares(before, s.name);
                if (!hoist) {
                    (seen_other ? rest : head).push_back(std::move(s));
                    continue;
                }
                moved = true;
                Stmt decl = Stmt::var_decl(s.decl_type, s.name, nullptr);
                decl.pos = s.pos;
                if (s.has_init()) {
                    Stmt init = Stmt::assign(s.name, s.exprs.front());
                    init.pos = s.pos;
                    rest.push_back(std::move(init));
                }
                head.push_back(std::move(decl));
            }
            head.insert(head.end(), std::make_move_iterator(rest.begin()), std::make_move_iterator(rest.end()));
            block->body = std::move(head);
        }
    }
    if (!moved) not_applicable(AttackKind::RelocateDeclInBlock, "declarations already lead their blocks");
}

void relocate_to_global(Ast& ast) {
    Function* main = ast.find_function("main");
    std::set<std::string> taken = global_names(ast);
    for (const auto& f : ast.functions) taken.insert(f.name);
    auto& body = main->body.body;
    for (std::size_t k = body.size(); k-- > 0;) {
        Stmt& s = body[k];
        if (s.kind != StmtKind::VarDecl || taken.count(s.name)) continue;
        GlobalDecl g;
        g.type = s.decl_type;
        g.name = s.name;
        g.pos = s.pos;
        if (s.has_init() && is_literal(s.exprs.front())) {
            g.init.push_back(s.exprs.front());
            body.erase(body.begin() + static_cast<std::ptrdiff_t>(k));
        } else if (s.has_init()) {
            Stmt init = Stmt::assign(s.name, s.exprs.front());
            init.pos = s.pos;
            s = std::move(init);
        } else {
            body.erase(body.begin() + static_cast<std::ptrdiff_t>(k));
        }
        ast.globals.push_back(std::move(g));
        return;
    }
    not_applicable(AttackKind::RelocateDeclToGlobal, "main has no movable declaration");
}

struct LoopDecl {
    Stmt* parent;       // block holding the loop
    std::size_t loop;   // index of the loop in parent
    std::size_t decl;   // index of the declaration in the loop body
};

std::vector<LoopDecl> loop_decl_candidates(Ast& ast) {
    const std::set<std::string> globals = global_names(ast);
    std::vector<LoopDecl> out;
    for (auto& f : ast.functions) {
        for (Stmt* block : blocks_of(f)) {
            for (std::size_t i = 0; i < block->body.size(); ++i) {
                Stmt& loop = block->body[i];
                if (loop.kind != StmtKind::While && loop.kind != StmtKind::For) continue;
                // Names the loop may change: assignment targets and declarations.
                std::set<std::string> changed;
                for_each_stmt(loop, [&](const Stmt& t) {
                    if (t.kind == StmtKind::Assign) changed.insert(t.name);
                });
                std::map<std::string, int> declared;
                for_each_stmt(loop, [&](const Stmt& t) {
                    if (t.kind == StmtKind::VarDecl) ++declared[t.name];
                });
                const Stmt& body = loop.body.front();
                for (std::size_t d = 0; d < body.body.size(); ++d) {
                    const Stmt& s = body.body[d];
                    if (s.kind != StmtKind::VarDecl || !s.has_init()) continue;
                    if (globals.count(s.name) || changed.count(s.name) || declared[s.name] != 1) continue;
                    const Expr& init = s.exprs.front();
                    if (!pure_total(init) || expr_size(init) < 2) continue;
                    bool invariant = true;
                    for_each_expr(init, [&](const Expr& x) {
                        if (x.kind == ExprKind::Var && (changed.count(x.text) || declared.count(x.text))) invariant = false;
                    });
                    if (invariant) out.push_back({block, i, d});
                }
            }
        }
    }
    return out;
}

Ast relocate_out_of_loop(const Ast& ast, Rng& rng) {
    return first_valid(
        ast, AttackKind::RelocateDeclOutOfLoop, rng, [](Ast& a) { return loop_decl_candidates(a).size(); },
        [](Ast& a, std::size_t k) {
            LoopDecl c = loop_decl_candidates(a)[k];
            auto& body = c.parent->body[c.loop].body.front().body;
            Stmt decl = body[c.decl];
            body.erase(body.begin() + static_cast<std::ptrdiff_t>(c.decl));
            c.parent->body.insert(c.parent->body.begin() + static_cast<std::ptrdiff_t>(c.loop), std::move(decl));
        });
}

// ---------------------------------------------------------------------------
// Level 4

struct CallSite {
    Function* caller;
    Stmt* block;
    std::size_t index;
};

std::map<std::string, std::set<std::string>> call_graph(const Ast& ast) {
    std::map<std::string, std::set<std::string>> calls;
    for (const auto& f : ast.functions) {
        auto& out = calls[f.name];
        for_each_stmt(f.body, [&](const Stmt& s) {
            for (const auto& e : s.exprs)
                for_each_expr(e, [&](const Expr& x) {
                    if (x.kind == ExprKind::Call && !x.is_builtin_call()) out.insert(x.text);
                });
        });
    }
    return calls;
}

bool reaches(const std::map<std::string, std::set<std::string>>& calls, const std::string& from, const std::string& to) {
    std::set<std::string> seen;
    std::vector<std::string> todo{from};
    while (!todo.empty()) {
        const std::string cur = todo.back();
        todo.pop_back();
        auto it = calls.find(cur);
        if (it == calls.end()) continue;
        for (const auto& next : it->second) {
            if (next == to) return true;
            if (seen.insert(next).second) todo.push_back(next);
        }
    }
    return false;
}

int call_count(const Ast& ast, const std::string& name) {
    int n = 0;
    for (const auto& f : ast.functions)
        for_each_stmt(f.body, [&](const Stmt& s) {
            for (const auto& e : s.exprs)
                for_each_expr(e, [&](const Expr& x) { n += x.kind == ExprKind::Call && x.text == name; });
        });
    return n;
}

std::set<std::string> local_names(Function& f) {
    std::set<std::string> out;
    NameWalker([&](std::string& n, NameUse use) {
        if (use == NameUse::LocalDecl) out.insert(n);
    }).function(f);
    return out;
}

std::set<std::string> global_refs(Function& f) {
    std::set<std::string> out;
    NameWalker([&](std::string& n, NameUse use) {
        if (use == NameUse::GlobalRef) out.insert(n);
    }).function(f);
    return out;
}

std::vector<std::pair<std::string, CallSite>> inline_candidates(Ast& ast) {
    const auto calls = call_graph(ast);
    std::vector<std::pair<std::string, CallSite>> out;
    for (auto& callee : ast.functions) {
        if (callee.name == "main" || callee.return_type != TypeKind::Void) continue;
        if (contains_return(callee.body) || reaches(calls, callee.name, callee.name)) continue;
        if (call_count(ast, callee.name) != 1) continue;
        const std::set<std::string> used_globals = global_refs(callee);
        for (auto& caller : ast.functions) {
            if (caller.name == callee.name) continue;
            const std::set<std::string> caller_locals = local_names(caller);
            bool captured = false;
            for (const auto& g : used_globals) captured = captured || caller_locals.count(g);
            for (Stmt* block : blocks_of(caller)) {
                for (std::size_t i = 0; i < block->body.size(); ++i) {
                    const Stmt& s = block->body[i];
                    if (s.kind == StmtKind::ExprStmt && s.exprs.front().kind == ExprKind::Call &&
                        s.exprs.front().text == callee.name && !captured)
                        out.push_back({callee.name, {&caller, block, i}});
                }
            }
        }
    }
    return out;
}

void inline_at(Ast& ast, const std::string& name, const CallSite& site, Rng& rng) {
    std::set<std::string> used = all_names(ast);
    Function callee = *ast.find_function(name);
    std::map<std::string, std::string> renamed;
    NameWalker([&](std::string& n, NameUse use) {
        if (use == NameUse::LocalDecl && !renamed.count(n)) renamed[n] = fresh_name(rng, used, kLocalNames);
        if (use == NameUse::LocalDecl || use == NameUse::LocalRef) n = renamed.at(n);
    }).function(callee);

    Stmt& call = site.block->body[site.index];
    std::vector<Stmt> inlined;
    for (std::size_t p = 0; p < callee.params.size(); ++p) {
        Stmt bind = Stmt::var_decl(callee.params[p].type, callee.params[p].name, &call.exprs.front().args[p]);
        bind.pos = call.pos;
        inlined.push_back(std::move(bind));
    }
    for (auto& s : callee.body.body) inlined.push_back(std::move(s));
    Stmt block = Stmt::block(std::move(inlined));
    block.pos = call.pos;
    call = std::move(block);
    std::erase_if(ast.functions, [&](const Function& f) { return f.name == name; });
}

Ast inline_function(const Ast& ast, Rng& rng) {
    const std::uint64_t naming = rng();
    return first_valid(
        ast, AttackKind::InlineFunction, rng, [](Ast& a) { return inline_candidates(a).size(); },
        [&](Ast& a, std::size_t k) {
            auto c = inline_candidates(a)[k];
            Rng names(naming);
            inline_at(a, c.first, c.second, names);
        });
}

struct Run {
    Function* owner;
    Stmt* block;
    std::size_t begin, end;
};

bool extractable(Function& owner, const Stmt& block, std::size_t begin, std::size_t end, const std::set<std::string>& globals) {
    std::vector<Stmt> run(block.body.begin() + static_cast<std::ptrdiff_t>(begin),
                          block.body.begin() + static_cast<std::ptrdiff_t>(end));
    for (const auto& s : run)
        if (contains_return(s)) return false;
    const std::set<std::string> owner_locals = local_names(owner);
    bool free_local = false;
    NameWalker([&](std::string& n, NameUse use) {
        if (use == NameUse::GlobalRef && (!globals.count(n) || owner_locals.count(n))) free_local = true;
    }).fragment(run);
    if (free_local) return false;
    std::set<std::string> later;
    for (std::size_t k = end; k < block.body.size(); ++k) collect_refs(block.body[k], later);
    for (const auto& s : run)
        if (s.kind == StmtKind::VarDecl && later.count(s.name)) return false;
    // Worth a function: a compound statement or several statements.
    bool compound = false;
    for (const auto& s : run) compound = compound || (s.kind != StmtKind::VarDecl && s.kind != StmtKind::Assign &&
                                                      s.kind != StmtKind::ExprStmt);
    return compound || end - begin >= 3;
}

std::vector<Run> extract_candidates(Ast& ast) {
    const std::set<std::string> globals = global_names(ast);
    std::vector<Run> out;
    for (auto& f : ast.functions) {
        for (Stmt* block : blocks_of(f)) {
            // Longest self-contained run starting at each statement.
            for (std::size_t b = 0; b < block->body.size(); ++b) {
                for (std::size_t e = block->body.size(); e > b; --e) {
                    if (extractable(f, *block, b, e, globals)) {
                        out.push_back({&f, block, b, e});
                        break;
                    }
                }
            }
        }
    }
    return out;
}

Ast extract_block(const Ast& ast, Rng& rng) {
    const std::uint64_t naming = rng();
    return first_valid(
        ast, AttackKind::ExtractBlock, rng, [](Ast& a) { return extract_candidates(a).size(); },
        [&](Ast& a, std::size_t k) {
            Run r = extract_candidates(a)[k];
            Rng names(naming);
            std::set<std::string> used = all_names(a);
            Function fn;
            fn.name = fresh_name(names, used, kFunctionNames);
            fn.return_type = TypeKind::Void;
            fn.body = Stmt::block({});
            auto& body = r.block->body;
            const auto first = body.begin() + static_cast<std::ptrdiff_t>(r.begin);
            const auto last = body.begin() + static_cast<std::ptrdiff_t>(r.end);
            fn.body.body.assign(std::make_move_iterator(first), std::make_move_iterator(last));
            Stmt call = Stmt::expr_stmt(Expr::call(fn.name, {}));
            call.pos = first->pos;
            body.erase(first, last);
            body.insert(body.begin() + static_cast<std::ptrdiff_t>(r.begin), std::move(call));
            const auto at = std::find_if(a.functions.begin(), a.functions.end(),
                                         [&](const Function& f) { return &f == r.owner; });
            a.functions.insert(at, std::move(fn));
        });
}

// ---------------------------------------------------------------------------
// Level 5

// `for (init; c; u) B` as `init; while (c) { B u }`, the way lowering sees it.
// The init moves into the enclosing block when that is clash-free, otherwise
// the pair is wrapped in a block of its own.
std::vector<Stmt> unfold_for(Stmt& loop, Stmt body_loop, const std::vector<Stmt>& later, const std::set<std::string>& globals) {
    std::vector<Stmt> out;
    if (loop.for_init.empty()) {
        out.push_back(std::move(body_loop));
        return out;
    }
    Stmt init = loop.for_init.front();
    bool flat = true;
    if (init.kind == StmtKind::VarDecl) {
        flat = !globals.count(init.name);
        std::set<std::string> refs;
        for (const auto& s : later) {
            collect_refs(s, refs);
            flat = flat && !declares(s, init.name);
        }
        flat = flat && !refs.count(init.name);
    }
    if (flat) {
        out.push_back(std::move(init));
        out.push_back(std::move(body_loop));
        return out;
    }
    Stmt wrapper = Stmt::block({std::move(init), std::move(body_loop)});
    wrapper.pos = loop.pos;
    out.push_back(std::move(wrapper));
    return out;
}

// Rewrites the loops of every block bottom-up. A rewrite returns the
// replacement statements for one loop, or nothing to keep it; it may also
// absorb the statement right before the loop.
struct LoopEdit {
    std::vector<Stmt> stmts;
    bool absorb_previous = false;
};
using LoopRewrite = std::function<std::optional<LoopEdit>(Stmt& loop, std::vector<Stmt>& block, std::size_t index)>;

void rewrite_loops(Stmt& s, const LoopRewrite& fn, bool& changed) {
    for (auto& c : s.body) rewrite_loops(c, fn, changed);
    for (auto& arm : s.arms) rewrite_loops(arm.block, fn, changed);
    if (s.kind != StmtKind::Block) return;
    for (std::size_t i = 0; i < s.body.size(); ++i) {
        Stmt& loop = s.body[i];
        if (loop.kind != StmtKind::While && loop.kind != StmtKind::For) continue;
        auto edit = fn(loop, s.body, i);
        if (!edit) continue;
        changed = true;
        const std::size_t from = edit->absorb_previous ? i - 1 : i;
        const std::size_t n = edit->stmts.size();
        s.body.erase(s.body.begin() + static_cast<std::ptrdiff_t>(from), s.body.begin() + static_cast<std::ptrdiff_t>(i) + 1);
        s.body.insert(s.body.begin() + static_cast<std::ptrdiff_t>(from), std::make_move_iterator(edit->stmts.begin()),
                      std::make_move_iterator(edit->stmts.end()));
        i = from + n - 1;
    }
}

bool mentions(const Expr& e, const std::string& name) {
    bool found = false;
    for_each_expr(e, [&](const Expr& x) { found = found || (x.kind == ExprKind::Var && x.text == name); });
    return found;
}

void while_to_for(Ast& ast) {
    const std::set<std::string> globals = global_names(ast);
    bool changed = false;
    for (auto& f : ast.functions) {
        rewrite_loops(
            f.body,
            [&](Stmt& loop, std::vector<Stmt>& block, std::size_t index) -> std::optional<LoopEdit> {
                std::vector<Stmt> later(block.begin() + static_cast<std::ptrdiff_t>(index) + 1, block.end());
                if (loop.kind == StmtKind::For) {
                    if (!loop.for_has_cond) return std::nullopt;
                    Stmt w;
                    w.kind = StmtKind::While;
                    w.pos = loop.pos;
                    w.exprs.push_back(loop.cond());
                    Stmt body = loop.body.front();
                    for (auto& u : loop.for_update) body.body.push_back(u);
                    w.body.push_back(std::move(body));
                    return LoopEdit{unfold_for(loop, std::move(w), later, globals)};
                }
                Stmt fl;
                fl.kind = StmtKind::For;
                fl.pos = loop.pos;
                fl.for_has_cond = true;
                fl.exprs.push_back(loop.cond());
                Stmt body = loop.body.front();
                if (body.body.size() >= 2) {
                    const Stmt& last = body.body.back();
                    if (last.kind == StmtKind::Assign && !last.indexed && mentions(loop.cond(), last.name)) {
                        fl.for_update.push_back(last);
                        body.body.pop_back();
                    }
                }
                fl.body.push_back(std::move(body));
                // A counter declared right before the loop moves into the header.
                bool absorb = false;
                if (index > 0 && !fl.for_update.empty()) {
                    const Stmt& prev = block[index - 1];
                    std::set<std::string> refs;
                    for (const auto& s : later) collect_refs(s, refs);
                    if (prev.kind == StmtKind::VarDecl && prev.has_init() && prev.name == fl.for_update.front().name &&
                        !refs.count(prev.name)) {
                        fl.for_init.push_back(prev);
                        absorb = true;
                    }
                }
                LoopEdit edit;
                edit.stmts.push_back(std::move(fl));
                edit.absorb_previous = absorb;
                return edit;
            },
            changed);
    }
    if (!changed) not_applicable(AttackKind::WhileToFor, "no loops");
}

void while_to_dowhile(Ast& ast) {
    const std::set<std::string> globals = global_names(ast);
    bool changed = false;
    for (auto& f : ast.functions) {
        rewrite_loops(
            f.body,
            [&](Stmt& loop, std::vector<Stmt>& block, std::size_t index) -> std::optional<LoopEdit> {
                Stmt dw;
                dw.kind = StmtKind::DoWhile;
                dw.pos = loop.pos;
                Stmt body = loop.body.front();
                for (auto& u : loop.for_update) body.body.push_back(u);
                dw.body.push_back(std::move(body));
                const bool has_cond = loop.kind == StmtKind::While || loop.for_has_cond;
                Stmt guarded;
                if (has_cond) {
                    dw.exprs.push_back(loop.cond());
                    guarded.kind = StmtKind::If;
                    guarded.pos = loop.pos;
                    guarded.exprs.push_back(loop.cond());
                    Stmt then = Stmt::block({std::move(dw)});
                    then.pos = loop.pos;
                    guarded.body.push_back(std::move(then));
                } else {
                    Expr t;
                    t.kind = ExprKind::BoolLit;
                    t.text = "true";
                    dw.exprs.push_back(t);
                    guarded = std::move(dw);
                }
                LoopEdit edit;
                if (loop.kind == StmtKind::While) {
                    edit.stmts.push_back(std::move(guarded));
                    return edit;
                }
                std::vector<Stmt> later(block.begin() + static_cast<std::ptrdiff_t>(index) + 1, block.end());
                edit.stmts = unfold_for(loop, std::move(guarded), later, globals);
                return edit;
            },
            changed);
    }
    if (!changed) not_applicable(AttackKind::WhileToDoWhile, "no loops");
}

void swap_if_arms(Ast& ast) {
    bool changed = false;
    for (auto& f : ast.functions) {
        for_each_stmt_mut(f.body, [&](Stmt& s) {
            if (s.kind != StmtKind::If || !s.has_else() || s.body[1].kind != StmtKind::Block) return;
            Expr cond = s.cond();
            if (cond.kind == ExprKind::Unary && cond.text == "!" && cond.parens == 0) {
                Expr inner = cond.args[0];
                if (inner.parens > 0 && inner.kind == ExprKind::Binary) --inner.parens;
                cond = std::move(inner);
            } else {
                if (cond.parens == 0 && cond.kind != ExprKind::Var && cond.kind != ExprKind::Call) ++cond.parens;
                cond = Expr::unary("!", std::move(cond));
            }
            s.exprs.front() = std::move(cond);
            std::swap(s.body[0], s.body[1]);
            changed = true;
        });
    }
    if (!changed) not_applicable(AttackKind::SwapIfArms, "no if/else");
}

void expand_compound(Ast& ast) {
    bool changed = false;
    for (auto& f : ast.functions) {
        for_each_stmt_mut(f.body, [&](Stmt& s) {
            if (s.kind != StmtKind::Assign) return;
            Expr target = s.indexed ? Expr{} : Expr::var(s.name);
            if (s.indexed) {
                target.kind = ExprKind::Index;
                target.args = {Expr::var(s.name), s.exprs.front()};
            }
            Expr& value = s.exprs.back();
            if (s.op != "=") {
                value = Expr::binary(s.op.substr(0, 1), target, parenthesized(value));
                s.op = "=";
                changed = true;
                return;
            }
            static const std::set<std::string> kOps{"+", "-", "*", "/", "%"};
            if (value.kind == ExprKind::Binary && value.parens == 0 && kOps.count(value.text) && value.args[0] == target) {
                s.op = value.text + "=";
                Expr rhs = value.args[1];
                value = std::move(rhs);
                changed = true;
            }
        });
    }
    if (!changed) not_applicable(AttackKind::ExpandCompoundAssign, "no compound or collapsible assignment");
}

void switch_to_ifchain(Ast& ast) {
    bool changed = false;
    for (auto& f : ast.functions) {
        for_each_stmt_mut(f.body, [&](Stmt& s) {
            if (s.kind != StmtKind::Switch || !pure_total(s.cond())) return;
            const Expr selector = parenthesized(s.cond());
            std::optional<Stmt> chain;
            for (std::size_t k = s.arms.size(); k-- > 0;) {
                const SwitchArm& arm = s.arms[k];
                if (arm.is_default) {
                    chain = arm.block;
                    continue;
                }
                Expr key;
                key.kind = ExprKind::IntLit;
                key.text = arm.label[0] == '-' ? arm.label.substr(1) : arm.label;
                if (arm.label[0] == '-') key = Expr::unary("-", key);
                Stmt branch;
                branch.kind = StmtKind::If;
                branch.pos = s.pos;
                branch.exprs.push_back(Expr::binary("==", selector, key));
                branch.body.push_back(arm.block);
                if (chain) branch.body.push_back(std::move(*chain));
                chain = std::move(branch);
            }
            s = std::move(*chain);
            changed = true;
        });
    }
    if (!changed) not_applicable(AttackKind::SwitchToIfChain, "no switch with a side-effect-free selector");
}

}  // namespace

std::string attack_kind_name(AttackKind kind) {
    for (const auto& k : kKinds)
        if (k.kind == kind) return k.name;
    return "?";
}

std::optional<AttackKind> parse_attack_kind(std::string_view name) {
    for (const auto& k : kKinds)
        if (name == k.name) return k.kind;
    return std::nullopt;
}

int attack_level(AttackKind kind) {
    for (const auto& k : kKinds)
        if (k.kind == kind) return k.level;
    return 0;
}

SourceUnit apply_attack(const SourceUnit& unit, const AttackSpec& spec, const std::string* logic_variant) {
    Rng rng(spec.seed);
    switch (spec.kind) {
        case AttackKind::CommentStrip:
            return parse_source(comment_strip(unit.text), unit.origin);
        case AttackKind::WhitespaceReflow:
            return parse_source(whitespace_reflow(unit.text, rng), unit.origin);
        case AttackKind::RenameEntryArtifacts:
            return parse_source(rename_entry_artifacts(unit.ast, unit.text, rng), unit.origin);
        case AttackKind::LogicRewrite:
            if (!logic_variant) not_applicable(spec.kind, "no hand-authored variant");
            return parse_source(*logic_variant, unit.origin);
        default:
            break;
    }
    Ast ast = unit.ast;
    switch (spec.kind) {
        case AttackKind::RenameLocals: rename_locals(ast, rng); break;
        case AttackKind::RenameFunctions: rename_functions(ast, rng); break;
        case AttackKind::RelocateDeclInBlock: relocate_in_block(ast); break;
        case AttackKind::RelocateDeclToGlobal: relocate_to_global(ast); break;
        case AttackKind::RelocateDeclOutOfLoop: ast = relocate_out_of_loop(ast, rng); break;
        case AttackKind::InlineFunction: ast = inline_function(ast, rng); break;
        case AttackKind::ExtractBlock: ast = extract_block(ast, rng); break;
        case AttackKind::WhileToFor: while_to_for(ast); break;
        case AttackKind::WhileToDoWhile: while_to_dowhile(ast); break;
        case AttackKind::SwapIfArms: swap_if_arms(ast); break;
        case AttackKind::ExpandCompoundAssign: expand_compound(ast); break;
        case AttackKind::SwitchToIfChain: switch_to_ifchain(ast); break;
        default: break;
    }
    try {
        return parse_source(print_program(ast), unit.origin);
    } catch (const ParseError& e) {
        not_applicable(spec.kind, std::string("result does not parse: ") + e.what());
    } catch (const ResolveError& e) {
        not_applicable(spec.kind, std::string("result does not resolve: ") + e.what());
    }
}

}  // namespace codesim
