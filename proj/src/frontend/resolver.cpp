#include <map>
#include <set>

#include "codesim/frontend.hpp"

namespace codesim {

namespace {

class Resolver {
public:
    explicit Resolver(const Ast& ast) : ast_(ast) {}

    void run() {
        for (const auto& g : ast_.globals) {
            if (!globals_.insert(g.name).second) throw ResolveError(g.pos, g.name, "declared twice");
        }
        for (const auto& f : ast_.functions) {
            if (functions_.count(f.name)) throw ResolveError(f.pos, f.name, "declared twice");
            functions_[f.name] = f.params.size();
        }
        const Function* main = ast_.find_function("main");
        if (!main) throw ResolveError({1, 1}, "main", "is not defined");
        if (!main->params.empty()) throw ResolveError(main->pos, "main", "must take no parameters");

        // Global initializers may only see globals declared before them.
        std::set<std::string> visible;
        for (const auto& g : ast_.globals) {
            for (const auto& e : g.init) expr(e, &visible);
            visible.insert(g.name);
        }
        for (const auto& f : ast_.functions) function(f);
    }

private:
    void function(const Function& f) {
        scopes_.clear();
        scopes_.emplace_back();
        for (const auto& p : f.params) declare(p.name, p.pos);
        block_items(f.body);
        scopes_.clear();
    }

    void declare(const std::string& name, SourcePos pos) {
        for (const auto& scope : scopes_)
            if (scope.count(name)) throw ResolveError(pos, name, "already declared in an enclosing scope");
        scopes_.back().insert(name);
    }

    bool is_local(const std::string& name) const {
        for (const auto& scope : scopes_)
            if (scope.count(name)) return true;
        return false;
    }

    void variable(const std::string& name, SourcePos pos, const std::set<std::string>* globals_visible) {
        if (globals_visible) {
            if (!globals_visible->count(name)) throw ResolveError(pos, name, "is not declared");
            return;
        }
        if (!is_local(name) && !globals_.count(name)) throw ResolveError(pos, name, "is not declared");
    }

    void expr(const Expr& e, const std::set<std::string>* globals_visible = nullptr) {
        switch (e.kind) {
            case ExprKind::Var:
                variable(e.text, e.pos, globals_visible);
                break;
            case ExprKind::Call: {
                if (e.text == "print") {
                    if (e.args.size() != 1) throw ResolveError(e.pos, e.text, "takes one argument");
                } else if (e.text == "read") {
                    if (!e.args.empty()) throw ResolveError(e.pos, e.text, "takes no arguments");
                } else {
                    if (globals_visible) throw ResolveError(e.pos, e.text, "cannot be called from a global initializer");
                    auto it = functions_.find(e.text);
                    if (it == functions_.end()) throw ResolveError(e.pos, e.text, "is not a function");
                    if (e.text == "main") throw ResolveError(e.pos, e.text, "cannot be called");
                    if (it->second != e.args.size()) throw ResolveError(e.pos, e.text, "called with wrong argument count");
                }
                break;
            }
            default:
                break;
        }
        for (const auto& a : e.args) expr(a, globals_visible);
    }

    void block_items(const Stmt& block) {
        for (const auto& s : block.body) stmt(s);
    }

    void nested_block(const Stmt& block) {
        scopes_.emplace_back();
        block_items(block);
        scopes_.pop_back();
    }

    void stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::VarDecl:
                for (const auto& e : s.exprs) expr(e);
                declare(s.name, s.pos);
                break;
            case StmtKind::Assign:
                variable(s.name, s.pos, nullptr);
                for (const auto& e : s.exprs) expr(e);
                break;
            case StmtKind::If:
                expr(s.cond());
                nested_block(s.body[0]);
                if (s.has_else()) {
                    if (s.body[1].kind == StmtKind::Block)
                        nested_block(s.body[1]);
                    else
                        stmt(s.body[1]);
                }
                break;
            case StmtKind::While:
            case StmtKind::DoWhile:
                expr(s.cond());
                nested_block(s.loop_body());
                break;
            case StmtKind::For:
                scopes_.emplace_back();
                for (const auto& i : s.for_init) stmt(i);
                for (const auto& e : s.exprs) expr(e);
                for (const auto& u : s.for_update) stmt(u);
                nested_block(s.loop_body());
                scopes_.pop_back();
                break;
            case StmtKind::Switch: {
                expr(s.cond());
                std::set<std::int64_t> seen;
                for (const auto& arm : s.arms) {
                    if (!arm.is_default && !seen.insert(arm.value).second)
                        throw ResolveError(arm.block.pos, arm.label, "duplicate case label");
                    nested_block(arm.block);
                }
                break;
            }
            case StmtKind::Return:
            case StmtKind::ExprStmt:
                for (const auto& e : s.exprs) expr(e);
                break;
            case StmtKind::Block:
                nested_block(s);
                break;
        }
    }

    const Ast& ast_;
    std::set<std::string> globals_;
    std::map<std::string, std::size_t> functions_;
    std::vector<std::set<std::string>> scopes_;
};

}  // namespace

void resolve(const Ast& ast) { Resolver(ast).run(); }

}  // namespace codesim
