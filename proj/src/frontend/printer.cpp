#include <fstream>
#include <sstream>

#include "codesim/frontend.hpp"

namespace codesim {

namespace {

std::string type_text(TypeKind t) { return type_name(t); }

class Printer {
public:
    std::string program(const Ast& ast) {
        for (const auto& g : ast.globals) {
            out_ << type_text(g.type) << ' ' << g.name;
            if (!g.init.empty()) out_ << " = " << print_expr(g.init.front());
            out_ << ";\n";
        }
        for (std::size_t i = 0; i < ast.functions.size(); ++i) {
            if (i > 0 || !ast.globals.empty()) out_ << '\n';
            function(ast.functions[i]);
        }
        return out_.str();
    }

private:
    void function(const Function& f) {
        out_ << "fn " << f.name << '(';
        for (std::size_t i = 0; i < f.params.size(); ++i) {
            if (i) out_ << ", ";
            out_ << type_text(f.params[i].type) << ' ' << f.params[i].name;
        }
        out_ << ')';
        if (f.return_type != TypeKind::Void) out_ << ": " << type_text(f.return_type);
        out_ << ' ';
        block(f.body);
        out_ << '\n';
    }

    void indent() {
        for (int i = 0; i < depth_; ++i) out_ << "    ";
    }

    void block(const Stmt& b) {
        out_ << "{\n";
        ++depth_;
        for (const auto& s : b.body) {
            indent();
            stmt(s);
            out_ << '\n';
        }
        --depth_;
        indent();
        out_ << '}';
    }

    static std::string head(const Stmt& s) {
        if (s.kind == StmtKind::VarDecl) {
            std::string text = type_text(s.decl_type) + " " + s.name;
            if (s.has_init()) text += " = " + print_expr(s.exprs.front());
            return text;
        }
        std::string text = s.name;
        if (s.indexed) text += "[" + print_expr(s.exprs.front()) + "]";
        return text + " " + s.op + " " + print_expr(s.value());
    }

    void stmt(const Stmt& s) {
        switch (s.kind) {
            case StmtKind::VarDecl:
            case StmtKind::Assign:
                out_ << head(s) << ';';
                break;
            case StmtKind::If:
                out_ << "if (" << print_expr(s.cond()) << ") ";
                block(s.body[0]);
                if (s.has_else()) {
                    out_ << " else ";
                    if (s.body[1].kind == StmtKind::Block)
                        block(s.body[1]);
                    else
                        stmt(s.body[1]);
                }
                break;
            case StmtKind::While:
                out_ << "while (" << print_expr(s.cond()) << ") ";
                block(s.loop_body());
                break;
            case StmtKind::DoWhile:
                out_ << "do ";
                block(s.loop_body());
                out_ << " while (" << print_expr(s.cond()) << ");";
                break;
            case StmtKind::For:
                out_ << "for (";
                if (!s.for_init.empty()) out_ << head(s.for_init.front());
                out_ << ';';
                if (s.for_has_cond) out_ << ' ' << print_expr(s.cond());
                out_ << ';';
                if (!s.for_update.empty()) out_ << ' ' << head(s.for_update.front());
                out_ << ") ";
                block(s.loop_body());
                break;
            case StmtKind::Switch:
                out_ << "switch (" << print_expr(s.cond()) << ") {\n";
                ++depth_;
                for (const auto& arm : s.arms) {
                    indent();
                    if (arm.is_default)
                        out_ << "default: ";
                    else
                        out_ << "case " << arm.label << ": ";
                    block(arm.block);
                    out_ << '\n';
                }
                --depth_;
                indent();
                out_ << '}';
                break;
            case StmtKind::Return:
                out_ << "return";
                if (!s.exprs.empty()) out_ << ' ' << print_expr(s.value());
                out_ << ';';
                break;
            case StmtKind::ExprStmt:
                out_ << print_expr(s.exprs.front()) << ';';
                break;
            case StmtKind::Block:
                block(s);
                break;
        }
    }

    std::ostringstream out_;
    int depth_ = 0;
};

std::string bare_expr(const Expr& e) {
    switch (e.kind) {
        case ExprKind::IntLit:
        case ExprKind::BoolLit:
        case ExprKind::StrLit:
        case ExprKind::Var:
            return e.text;
        case ExprKind::Call: {
            std::string text = e.text + "(";
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) text += ", ";
                text += print_expr(e.args[i]);
            }
            return text + ")";
        }
        case ExprKind::Index:
            return print_expr(e.args[0]) + "[" + print_expr(e.args[1]) + "]";
        case ExprKind::Unary:
            return e.text + print_expr(e.args[0]);
        case ExprKind::Binary:
            return print_expr(e.args[0]) + " " + e.text + " " + print_expr(e.args[1]);
        case ExprKind::NewArray:
            return "new int[" + print_expr(e.args[0]) + "]";
    }
    return {};
}

}  // namespace

std::string print_expr(const Expr& e) {
    std::string text = bare_expr(e);
    for (int i = 0; i < e.parens; ++i) text = "(" + text + ")";
    return text;
}

std::string print_program(const Ast& ast) { return Printer().program(ast); }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SourceUnit load(const std::filesystem::path& path) {
    return parse_source(read_file(path), path.filename().string());
}

}  // namespace codesim
