#include "codesim/ast.hpp"

#include <algorithm>

namespace codesim {

std::string to_string(SourcePos pos) {
    return std::to_string(pos.line) + ":" + std::to_string(pos.column);
}

std::string type_name(TypeKind kind) {
    switch (kind) {
        case TypeKind::Int: return "int";
        case TypeKind::Bool: return "bool";
        case TypeKind::Str: return "str";
        case TypeKind::IntArray: return "int[]";
        case TypeKind::Void: return "void";
    }
    return "?";
}

Expr Expr::int_lit(std::int64_t value) {
    Expr e;
    if (value < 0) return unary("-", int_lit(-value));
    e.kind = ExprKind::IntLit;
    e.text = std::to_string(value);
    return e;
}

Expr Expr::var(std::string name) {
    Expr e;
    e.kind = ExprKind::Var;
    e.text = std::move(name);
    return e;
}

Expr Expr::binary(std::string op, Expr lhs, Expr rhs) {
    Expr e;
    e.kind = ExprKind::Binary;
    e.text = std::move(op);
    e.args.push_back(std::move(lhs));
    e.args.push_back(std::move(rhs));
    return e;
}

Expr Expr::unary(std::string op, Expr operand) {
    Expr e;
    e.kind = ExprKind::Unary;
    e.text = std::move(op);
    e.args.push_back(std::move(operand));
    return e;
}

Expr Expr::call(std::string name, std::vector<Expr> args) {
    Expr e;
    e.kind = ExprKind::Call;
    e.text = std::move(name);
    e.args = std::move(args);
    return e;
}

Stmt Stmt::block(std::vector<Stmt> stmts) {
    Stmt s;
    s.kind = StmtKind::Block;
    s.body = std::move(stmts);
    return s;
}

Stmt Stmt::var_decl(TypeKind type, std::string name, const Expr* init) {
    Stmt s;
    s.kind = StmtKind::VarDecl;
    s.decl_type = type;
    s.name = std::move(name);
    if (init) s.exprs.push_back(*init);
    return s;
}

Stmt Stmt::assign(std::string name, Expr value) {
    Stmt s;
    s.kind = StmtKind::Assign;
    s.name = std::move(name);
    s.op = "=";
    s.exprs.push_back(std::move(value));
    return s;
}

Stmt Stmt::expr_stmt(Expr call) {
    Stmt s;
    s.kind = StmtKind::ExprStmt;
    s.exprs.push_back(std::move(call));
    return s;
}

const Function* Ast::find_function(const std::string& name) const {
    auto it = std::find_if(functions.begin(), functions.end(), [&](const Function& f) { return f.name == name; });
    return it == functions.end() ? nullptr : &*it;
}

Function* Ast::find_function(const std::string& name) {
    auto it = std::find_if(functions.begin(), functions.end(), [&](const Function& f) { return f.name == name; });
    return it == functions.end() ? nullptr : &*it;
}

// Positions are diagnostics only and do not take part in structural equality.
bool operator==(const Expr& a, const Expr& b) {
    return a.kind == b.kind && a.text == b.text && a.parens == b.parens && a.args == b.args;
}

bool operator==(const SwitchArm& a, const SwitchArm& b) {
    return a.is_default == b.is_default && a.label == b.label && a.value == b.value && a.block == b.block;
}

bool operator==(const Stmt& a, const Stmt& b) {
    return a.kind == b.kind && a.decl_type == b.decl_type && a.name == b.name && a.op == b.op &&
           a.indexed == b.indexed && a.exprs == b.exprs && a.body == b.body && a.for_init == b.for_init &&
           a.for_update == b.for_update && a.for_has_cond == b.for_has_cond && a.arms == b.arms;
}

bool operator==(const Param& a, const Param& b) { return a.type == b.type && a.name == b.name; }

bool operator==(const GlobalDecl& a, const GlobalDecl& b) {
    return a.type == b.type && a.name == b.name && a.init == b.init;
}

bool operator==(const Function& a, const Function& b) {
    return a.name == b.name && a.params == b.params && a.return_type == b.return_type && a.body == b.body;
}

bool operator==(const Ast& a, const Ast& b) { return a.globals == b.globals && a.functions == b.functions; }

}  // namespace codesim
