#include <charconv>

#include "codesim/frontend.hpp"

namespace codesim {

namespace {

class Parser {
public:
    explicit Parser(const std::vector<SourceToken>& tokens) : tokens_(tokens) {}

    Ast program() {
        Ast ast;
        while (!at_end()) {
            if (check_lexeme("fn"))
                ast.functions.push_back(function());
            else
                ast.globals.push_back(global());
        }
        return ast;
    }

private:
    bool at_end() const { return at_ >= tokens_.size(); }

    const SourceToken* peek(std::size_t offset = 0) const {
        return at_ + offset < tokens_.size() ? &tokens_[at_ + offset] : nullptr;
    }

    SourcePos pos() const {
        if (!at_end()) return tokens_[at_].pos;
        if (tokens_.empty()) return {1, 1};
        auto p = tokens_.back().pos;
        p.column += static_cast<int>(tokens_.back().lexeme.size());
        return p;
    }

    bool check_lexeme(std::string_view lexeme, std::size_t offset = 0) const {
        const auto* t = peek(offset);
        return t && t->kind != TokenKind::StringLiteral && t->lexeme == lexeme;
    }

    bool check_kind(TokenKind kind) const { return !at_end() && tokens_[at_].kind == kind; }

    [[noreturn]] void fail(const std::string& expected) const {
        throw ParseError(pos(), expected, at_end() ? "end of input" : "'" + tokens_[at_].lexeme + "'");
    }

    const SourceToken& expect(std::string_view lexeme) {
        if (!check_lexeme(lexeme)) fail("'" + std::string(lexeme) + "'");
        return tokens_[at_++];
    }

    bool accept(std::string_view lexeme) {
        if (!check_lexeme(lexeme)) return false;
        ++at_;
        return true;
    }

    std::string identifier() {
        if (!check_kind(TokenKind::Identifier)) fail("identifier");
        return tokens_[at_++].lexeme;
    }

    bool at_type() const { return check_lexeme("int") || check_lexeme("bool") || check_lexeme("str"); }

    TypeKind type() {
        if (accept("int")) {
            if (accept("[")) {
                expect("]");
                return TypeKind::IntArray;
            }
            return TypeKind::Int;
        }
        if (accept("bool")) return TypeKind::Bool;
        if (accept("str")) return TypeKind::Str;
        fail("type");
    }

    GlobalDecl global() {
        GlobalDecl g;
        g.pos = pos();
        if (!at_type()) fail("'fn' or global declaration");
        g.type = type();
        g.name = identifier();
        if (accept("=")) g.init.push_back(expression());
        expect(";");
        return g;
    }

    Function function() {
        Function f;
        f.pos = pos();
        expect("fn");
        f.name = identifier();
        expect("(");
        if (!check_lexeme(")")) {
            do {
                Param p;
                p.pos = pos();
                p.type = type();
                p.name = identifier();
                f.params.push_back(std::move(p));
            } while (accept(","));
        }
        expect(")");
        if (accept(":")) f.return_type = type();
        f.body = block();
        return f;
    }

    Stmt block() {
        Stmt s;
        s.kind = StmtKind::Block;
        s.pos = pos();
        expect("{");
        while (!check_lexeme("}")) {
            if (at_end()) fail("'}'");
            s.body.push_back(statement());
        }
        expect("}");
        return s;
    }

    Stmt var_decl_head() {
        Stmt s;
        s.kind = StmtKind::VarDecl;
        s.pos = pos();
        s.decl_type = type();
        s.name = identifier();
        if (accept("=")) s.exprs.push_back(expression());
        return s;
    }

    bool at_assign_op() const {
        static constexpr std::string_view ops[] = {"=", "+=", "-=", "*=", "/=", "%="};
        for (auto op : ops)
            if (check_lexeme(op) && peek()->kind == TokenKind::Operator) return true;
        return false;
    }

    // ident ("[" expr "]")? op expr, without the terminating ';'
    Stmt assignment_head() {
        Stmt s;
        s.kind = StmtKind::Assign;
        s.pos = pos();
        s.name = identifier();
        if (accept("[")) {
            s.indexed = true;
            s.exprs.push_back(expression());
            expect("]");
        }
        if (!at_assign_op()) fail("assignment operator");
        s.op = tokens_[at_++].lexeme;
        s.exprs.push_back(expression());
        return s;
    }

    Stmt statement() {
        if (check_lexeme("{")) return block();
        if (at_type()) {
            Stmt s = var_decl_head();
            expect(";");
            return s;
        }
        const SourcePos start = pos();
        if (accept("if")) {
            Stmt s;
            s.kind = StmtKind::If;
            s.pos = start;
            expect("(");
            s.exprs.push_back(expression());
            expect(")");
            s.body.push_back(block());
            if (accept("else")) s.body.push_back(check_lexeme("if") ? statement() : block());
            return s;
        }
        if (accept("while")) {
            Stmt s;
            s.kind = StmtKind::While;
            s.pos = start;
            expect("(");
            s.exprs.push_back(expression());
            expect(")");
            s.body.push_back(block());
            return s;
        }
        if (accept("do")) {
            Stmt s;
            s.kind = StmtKind::DoWhile;
            s.pos = start;
            s.body.push_back(block());
            expect("while");
            expect("(");
            s.exprs.push_back(expression());
            expect(")");
            expect(";");
            return s;
        }
        if (accept("for")) return for_statement(start);
        if (accept("switch")) return switch_statement(start);
        if (accept("return")) {
            Stmt s;
            s.kind = StmtKind::Return;
            s.pos = start;
            if (!check_lexeme(";")) s.exprs.push_back(expression());
            expect(";");
            return s;
        }
        if (check_kind(TokenKind::Identifier) && !check_lexeme("(", 1)) {
            Stmt s = assignment_head();
            expect(";");
            return s;
        }
        if (check_kind(TokenKind::Identifier) || check_lexeme("print") || check_lexeme("read")) {
            Stmt s;
            s.kind = StmtKind::ExprStmt;
            s.pos = start;
            Expr e = expression();
            if (e.kind != ExprKind::Call || e.parens != 0) throw ParseError(start, "call statement", "expression");
            s.exprs.push_back(std::move(e));
            expect(";");
            return s;
        }
        fail("statement");
    }

    Stmt for_statement(SourcePos start) {
        Stmt s;
        s.kind = StmtKind::For;
        s.pos = start;
        expect("(");
        if (!check_lexeme(";")) s.for_init.push_back(at_type() ? var_decl_head() : assignment_head());
        expect(";");
        if (!check_lexeme(";")) {
            s.for_has_cond = true;
            s.exprs.push_back(expression());
        }
        expect(";");
        if (!check_lexeme(")")) s.for_update.push_back(assignment_head());
        expect(")");
        s.body.push_back(block());
        return s;
    }

    Stmt switch_statement(SourcePos start) {
        Stmt s;
        s.kind = StmtKind::Switch;
        s.pos = start;
        expect("(");
        s.exprs.push_back(expression());
        expect(")");
        expect("{");
        while (accept("case")) {
            SwitchArm arm;
            const SourcePos label_pos = pos();
            if (accept("-")) arm.label = "-";
            if (!check_kind(TokenKind::IntLiteral)) fail("integer case label");
            arm.label += tokens_[at_++].lexeme;
            std::int64_t value = 0;
            auto [ptr, ec] = std::from_chars(arm.label.data(), arm.label.data() + arm.label.size(), value);
            if (ec != std::errc()) throw ParseError(label_pos, "integer case label", arm.label);
            arm.value = value;
            expect(":");
            arm.block = block();
            s.arms.push_back(std::move(arm));
        }
        if (s.arms.empty()) fail("'case'");
        if (accept("default")) {
            SwitchArm arm;
            arm.is_default = true;
            expect(":");
            arm.block = block();
            s.arms.push_back(std::move(arm));
        }
        expect("}");
        return s;
    }

    Expr expression() { return binary_level(0); }

    static int precedence(std::string_view op) {
        if (op == "||") return 1;
        if (op == "&&") return 2;
        if (op == "==" || op == "!=") return 3;
        if (op == "<" || op == "<=" || op == ">" || op == ">=") return 4;
        if (op == "+" || op == "-") return 5;
        if (op == "*" || op == "/" || op == "%") return 6;
        return 0;
    }

    Expr binary_level(int min_prec) {
        Expr lhs = unary();
        while (!at_end() && tokens_[at_].kind == TokenKind::Operator) {
            const int prec = precedence(tokens_[at_].lexeme);
            if (prec == 0 || prec <= min_prec) break;
            const SourcePos op_pos = pos();
            std::string op = tokens_[at_++].lexeme;
            Expr rhs = binary_level(prec);
            lhs = Expr::binary(std::move(op), std::move(lhs), std::move(rhs));
            lhs.pos = op_pos;
        }
        return lhs;
    }

    Expr unary() {
        if (check_lexeme("-") || check_lexeme("!")) {
            const SourcePos start = pos();
            std::string op = tokens_[at_++].lexeme;
            Expr e = Expr::unary(std::move(op), unary());
            e.pos = start;
            return e;
        }
        return postfix();
    }

    Expr postfix() {
        Expr e = primary();
        while (check_lexeme("[")) {
            Expr idx;
            idx.kind = ExprKind::Index;
            idx.pos = pos();
            ++at_;
            idx.args.push_back(std::move(e));
            idx.args.push_back(expression());
            expect("]");
            e = std::move(idx);
        }
        return e;
    }

    std::vector<Expr> call_args() {
        std::vector<Expr> args;
        expect("(");
        if (!check_lexeme(")")) {
            do {
                args.push_back(expression());
            } while (accept(","));
        }
        expect(")");
        return args;
    }

    Expr primary() {
        if (at_end()) fail("expression");
        const SourceToken& t = tokens_[at_];
        Expr e;
        e.pos = t.pos;
        switch (t.kind) {
            case TokenKind::IntLiteral:
                e.kind = ExprKind::IntLit;
                e.text = t.lexeme;
                ++at_;
                return e;
            case TokenKind::BoolLiteral:
                e.kind = ExprKind::BoolLit;
                e.text = t.lexeme;
                ++at_;
                return e;
            case TokenKind::StringLiteral:
                e.kind = ExprKind::StrLit;
                e.text = t.lexeme;
                ++at_;
                return e;
            case TokenKind::Identifier:
                ++at_;
                if (check_lexeme("(")) {
                    e.kind = ExprKind::Call;
                    e.text = t.lexeme;
                    e.args = call_args();
                    return e;
                }
                e.kind = ExprKind::Var;
                e.text = t.lexeme;
                return e;
            default:
                break;
        }
        if (check_lexeme("print") || check_lexeme("read")) {
            e.kind = ExprKind::Call;
            e.text = tokens_[at_++].lexeme;
            e.args = call_args();
            return e;
        }
        if (accept("new")) {
            expect("int");
            expect("[");
            e.kind = ExprKind::NewArray;
            e.args.push_back(expression());
            expect("]");
            return e;
        }
        if (accept("(")) {
            Expr inner = expression();
            expect(")");
            ++inner.parens;
            return inner;
        }
        fail("expression");
    }

    const std::vector<SourceToken>& tokens_;
    std::size_t at_ = 0;
};

}  // namespace

Ast parse(const std::vector<SourceToken>& tokens) {
    Ast ast = Parser(tokens).program();
    resolve(ast);
    return ast;
}

SourceUnit parse_source(std::string_view text, std::string origin) {
    SourceUnit unit;
    unit.tokens = lex(text);
    unit.ast = parse(unit.tokens);
    unit.origin = std::move(origin);
    unit.text = std::string(text);
    return unit;
}

}  // namespace codesim
