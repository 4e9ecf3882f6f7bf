#include <sstream>

#include "codesim/frontend.hpp"

namespace codesim {

namespace {

const char* stmt_kind_name(StmtKind kind) {
    switch (kind) {
        case StmtKind::VarDecl: return "var";
        case StmtKind::Assign: return "assign";
        case StmtKind::If: return "if";
        case StmtKind::While: return "while";
        case StmtKind::DoWhile: return "do-while";
        case StmtKind::For: return "for";
        case StmtKind::Switch: return "switch";
        case StmtKind::Return: return "return";
        case StmtKind::ExprStmt: return "call";
        case StmtKind::Block: return "block";
    }
    return "?";
}

class AstDumper {
public:
    std::string run(const Ast& ast) {
        for (const auto& g : ast.globals) {
            line(0) << "global " << type_name(g.type) << ' ' << g.name;
            if (!g.init.empty()) out_ << " = " << print_expr(g.init.front());
            out_ << '\n';
        }
        for (const auto& f : ast.functions) {
            line(0) << "fn " << f.name << '(';
            for (std::size_t i = 0; i < f.params.size(); ++i)
                out_ << (i ? ", " : "") << type_name(f.params[i].type) << ' ' << f.params[i].name;
            out_ << ") : " << type_name(f.return_type) << '\n';
            stmt(f.body, 1);
        }
        return out_.str();
    }

private:
    std::ostream& line(int depth) {
        for (int i = 0; i < depth; ++i) out_ << "  ";
        return out_;
    }

    void stmt(const Stmt& s, int depth) {
        line(depth) << stmt_kind_name(s.kind);
        switch (s.kind) {
            case StmtKind::VarDecl:
                out_ << ' ' << type_name(s.decl_type) << ' ' << s.name;
                if (s.has_init()) out_ << " = " << print_expr(s.exprs.front());
                break;
            case StmtKind::Assign:
                out_ << ' ' << s.name;
                if (s.indexed) out_ << '[' << print_expr(s.exprs.front()) << ']';
                out_ << ' ' << s.op << ' ' << print_expr(s.value());
                break;
            case StmtKind::If:
            case StmtKind::While:
            case StmtKind::DoWhile:
            case StmtKind::Switch:
            case StmtKind::ExprStmt:
                out_ << ' ' << print_expr(s.exprs.front());
                break;
            case StmtKind::For:
                out_ << (s.for_has_cond ? " " + print_expr(s.cond()) : std::string(" <no-cond>"));
                break;
            case StmtKind::Return:
                if (!s.exprs.empty()) out_ << ' ' << print_expr(s.value());
                break;
            case StmtKind::Block:
                break;
        }
        out_ << '\n';
        for (const auto& i : s.for_init) {
            line(depth + 1) << "init\n";
            stmt(i, depth + 2);
        }
        for (const auto& u : s.for_update) {
            line(depth + 1) << "update\n";
            stmt(u, depth + 2);
        }
        for (const auto& b : s.body) stmt(b, depth + 1);
        for (const auto& arm : s.arms) {
            line(depth + 1) << (arm.is_default ? std::string("default") : "case " + arm.label) << '\n';
            stmt(arm.block, depth + 2);
        }
    }

    std::ostringstream out_;
};

}  // namespace

std::string dump_ast(const Ast& ast) { return AstDumper().run(ast); }

}  // namespace codesim
