#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "codesim/errors.hpp"

namespace codesim {

enum class TypeKind { Int, Bool, Str, IntArray, Void };

std::string type_name(TypeKind kind);

enum class ExprKind { IntLit, BoolLit, StrLit, Var, Call, Index, Unary, Binary, NewArray };

// Expressions keep enough concrete syntax (literal lexemes, parenthesis depth)
// for the printer to reproduce the original token stream.
struct Expr {
    ExprKind kind = ExprKind::IntLit;
    std::string text;         // literal lexeme, variable name, callee name or operator
    std::vector<Expr> args;   // operands, call arguments, index (array, index), array size
    int parens = 0;
    SourcePos pos;

    static Expr int_lit(std::int64_t value);
    static Expr var(std::string name);
    static Expr binary(std::string op, Expr lhs, Expr rhs);
    static Expr unary(std::string op, Expr operand);
    static Expr call(std::string name, std::vector<Expr> args);

    bool is_builtin_call() const { return kind == ExprKind::Call && (text == "print" || text == "read"); }
};

enum class StmtKind { VarDecl, Assign, If, While, DoWhile, For, Switch, Return, ExprStmt, Block };

struct SwitchArm;

struct Stmt {
    StmtKind kind = StmtKind::Block;
    SourcePos pos;

    // VarDecl
    TypeKind decl_type = TypeKind::Int;
    // VarDecl name, Assign target
    std::string name;
    // Assign operator: "=", "+=", "-=", "*=", "/=", "%="
    std::string op;
    bool indexed = false;

    // VarDecl: [init]; Assign: [index]? value; If/While/DoWhile/Switch: [cond];
    // For: [cond]?; Return: [value]?; ExprStmt: [call]
    std::vector<Expr> exprs;

    // Block: statements; If: then block, optional else (block or if);
    // While/DoWhile/For: [body block]
    std::vector<Stmt> body;

    // For header pieces, zero or one each
    std::vector<Stmt> for_init;
    std::vector<Stmt> for_update;
    bool for_has_cond = false;

    std::vector<SwitchArm> arms;

    const Expr& cond() const { return exprs.front(); }
    const Stmt& loop_body() const { return body.front(); }
    bool has_else() const { return kind == StmtKind::If && body.size() > 1; }
    bool has_init() const { return kind == StmtKind::VarDecl && !exprs.empty(); }
    const Expr& value() const { return exprs.back(); }

    static Stmt block(std::vector<Stmt> stmts);
    static Stmt var_decl(TypeKind type, std::string name, const Expr* init);
    static Stmt assign(std::string name, Expr value);
    static Stmt expr_stmt(Expr call);
};

struct SwitchArm {
    bool is_default = false;
    std::string label;  // case label lexeme, e.g. "3" or "-1"
    std::int64_t value = 0;
    Stmt block;
};

struct Param {
    TypeKind type = TypeKind::Int;
    std::string name;
    SourcePos pos;
};

struct GlobalDecl {
    TypeKind type = TypeKind::Int;
    std::string name;
    std::vector<Expr> init;  // zero or one
    SourcePos pos;
};

struct Function {
    std::string name;
    std::vector<Param> params;
    TypeKind return_type = TypeKind::Void;
    Stmt body;
    SourcePos pos;
};

struct Ast {
    std::vector<GlobalDecl> globals;
    std::vector<Function> functions;

    const Function* find_function(const std::string& name) const;
    Function* find_function(const std::string& name);
};

bool operator==(const Expr& a, const Expr& b);
bool operator==(const Stmt& a, const Stmt& b);
bool operator==(const SwitchArm& a, const SwitchArm& b);
bool operator==(const Param& a, const Param& b);
bool operator==(const GlobalDecl& a, const GlobalDecl& b);
bool operator==(const Function& a, const Function& b);
bool operator==(const Ast& a, const Ast& b);

// Visits every statement in pre-order, including nested ones.
template <typename Fn>
void for_each_stmt(const Stmt& stmt, Fn&& fn) {
    fn(stmt);
    for (const auto& s : stmt.for_init) for_each_stmt(s, fn);
    for (const auto& s : stmt.body) for_each_stmt(s, fn);
    for (const auto& s : stmt.for_update) for_each_stmt(s, fn);
    for (const auto& arm : stmt.arms) for_each_stmt(arm.block, fn);
}

template <typename Fn>
void for_each_stmt_mut(Stmt& stmt, Fn&& fn) {
    fn(stmt);
    for (auto& s : stmt.for_init) for_each_stmt_mut(s, fn);
    for (auto& s : stmt.body) for_each_stmt_mut(s, fn);
    for (auto& s : stmt.for_update) for_each_stmt_mut(s, fn);
    for (auto& arm : stmt.arms) for_each_stmt_mut(arm.block, fn);
}

template <typename Fn>
void for_each_expr(const Expr& expr, Fn&& fn) {
    fn(expr);
    for (const auto& e : expr.args) for_each_expr(e, fn);
}

template <typename Fn>
void for_each_expr_mut(Expr& expr, Fn&& fn) {
    fn(expr);
    for (auto& e : expr.args) for_each_expr_mut(e, fn);
}

// Expressions owned directly by a statement (not by nested statements).
template <typename Fn>
void for_each_own_expr_mut(Stmt& stmt, Fn&& fn) {
    for (auto& e : stmt.exprs) for_each_expr_mut(e, fn);
}

}  // namespace codesim
