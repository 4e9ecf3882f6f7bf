#include <charconv>
#include <map>
#include <optional>

#include "codesim/lowering.hpp"

namespace codesim {

namespace {

struct FunctionInfo {
    int id = 0;
    std::vector<TypeKind> params;
    TypeKind result = TypeKind::Void;
};

struct GlobalInfo {
    int id = 0;
    TypeKind type = TypeKind::Int;
};

std::optional<CmpOp> comparison(const std::string& op) {
    if (op == "<") return CmpOp::LT;
    if (op == "<=") return CmpOp::LE;
    if (op == ">") return CmpOp::GT;
    if (op == ">=") return CmpOp::GE;
    if (op == "==") return CmpOp::EQ;
    if (op == "!=") return CmpOp::NE;
    return std::nullopt;
}

std::optional<Opcode> arithmetic(const std::string& op) {
    if (op == "+") return Opcode::Add;
    if (op == "-") return Opcode::Sub;
    if (op == "*") return Opcode::Mul;
    if (op == "/") return Opcode::Div;
    if (op == "%") return Opcode::Rem;
    return std::nullopt;
}

class FunctionCompiler {
public:
    FunctionCompiler(const std::map<std::string, FunctionInfo>& functions,
                     const std::map<std::string, GlobalInfo>& globals, const std::vector<std::string>& function_names)
        : functions_(functions), globals_(globals), function_names_(function_names) {}

    LowFunction compile(const Function& source, int id) {
        const Function fn = desugar_for(source);
        scopes_ = assign_scope_paths(fn);
        slots_ = slot_allocate(fn);
        result_ = fn.return_type;

        LowFunction out;
        out.id = id;
        out.name = fn.name;
        out.param_count = static_cast<int>(fn.params.size());
        out.returns_value = fn.return_type != TypeKind::Void;
        out.slot_count = slots_.count;

        env_.clear();
        env_.emplace_back();
        for (std::size_t i = 0; i < fn.params.size(); ++i)
            env_.back()[fn.params[i].name] = {static_cast<int>(i), fn.params[i].type};

        path_ = {ScopeTag::FunctionRoot};
        const auto& items = fn.body.body;
        check_reachability(fn.body);
        for (const auto& s : items) stmt(s);
        const bool ends_in_return = !items.empty() && items.back().kind == StmtKind::Return;
        if (!ends_in_return) {
            if (out.returns_value) throw CompileError(fn.pos, "function '" + fn.name + "' must end with a return");
            path_ = {ScopeTag::FunctionRoot};
            line_ = 0;
            emit(Opcode::Return);
        }

        out.body = std::move(body_);
        renumber_labels(out.body);
        for (const auto& t : out.body)
            if (t.op == Opcode::Invoke) out.invoked_ids.insert(t.callee);
        return out;
    }

    // Global initializers; the caller appends RETURN.
    void global_init(const GlobalDecl& g, const GlobalInfo& info) {
        path_ = {ScopeTag::FunctionRoot};
        line_ = g.pos.line;
        const TypeKind t = value(g.init.front());
        require(t == info.type, g.pos, "initializer type does not match '" + g.name + "'");
        LowToken& store = emit(Opcode::GStore);
        store.global = info.id;
        store.global_name = g.name;
    }

    std::vector<LowToken> take_body() { return std::move(body_); }

private:
    struct Local {
        int slot = 0;
        TypeKind type = TypeKind::Int;
    };

    static void require(bool cond, SourcePos pos, const std::string& what) {
        if (!cond) throw CompileError(pos, what);
    }

    static void check_reachability(const Stmt& block) {
        for (std::size_t i = 0; i + 1 < block.body.size(); ++i)
            if (block.body[i].kind == StmtKind::Return)
                throw CompileError(block.body[i + 1].pos, "unreachable code after return");
    }

    LowToken& emit(Opcode op) {
        LowToken t;
        t.op = op;
        t.scope = path_;
        t.first_line = line_;
        t.last_line = line_;
        body_.push_back(std::move(t));
        return body_.back();
    }

    int new_label() { return next_label_++; }

    void place_label(int label) { emit(Opcode::Label).label = label; }

    void branch(Opcode op, int label) { emit(op).label = label; }

    void ifcmp(CmpOp cmp, int label) {
        LowToken& t = emit(Opcode::IfCmp);
        t.cmp = cmp;
        t.label = label;
    }

    std::optional<Local> local(const std::string& name) const {
        for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
            auto found = it->find(name);
            if (found != it->end()) return found->second;
        }
        return std::nullopt;
    }

    // Pushes the value of a variable; returns its type.
    TypeKind load(const std::string& name, SourcePos pos) {
        if (auto l = local(name)) {
            emit(Opcode::Load).slot = l->slot;
            return l->type;
        }
        auto g = globals_.find(name);
        require(g != globals_.end(), pos, "unknown variable '" + name + "'");
        LowToken& t = emit(Opcode::GLoad);
        t.global = g->second.id;
        t.global_name = name;
        return g->second.type;
    }

    TypeKind store_type(const std::string& name, SourcePos pos) const {
        if (auto l = local(name)) return l->type;
        auto g = globals_.find(name);
        require(g != globals_.end(), pos, "unknown variable '" + name + "'");
        return g->second.type;
    }

    void store(const std::string& name) {
        if (auto l = local(name)) {
            emit(Opcode::Store).slot = l->slot;
            return;
        }
        const auto& g = globals_.at(name);
        LowToken& t = emit(Opcode::GStore);
        t.global = g.id;
        t.global_name = name;
    }

    TypeKind call(const Expr& e) {
        if (e.text == "print") {
            const TypeKind t = value(e.args[0]);
            require(t != TypeKind::Void, e.pos, "cannot print a void value");
            emit(Opcode::Print);
            return TypeKind::Void;
        }
        if (e.text == "read") {
            emit(Opcode::Read);
            return TypeKind::Int;
        }
        const auto& info = functions_.at(e.text);
        for (std::size_t i = 0; i < e.args.size(); ++i) {
            const TypeKind t = value(e.args[i]);
            require(t == info.params[i], e.args[i].pos, "argument " + std::to_string(i + 1) + " of '" + e.text + "' has type " + type_name(t));
        }
        LowToken& t = emit(Opcode::Invoke);
        t.callee = info.id;
        t.callee_name = e.text;
        t.argc = static_cast<int>(e.args.size());
        t.returns_value = info.result != TypeKind::Void;
        return info.result;
    }

    void int_constant(const std::string& lexeme, bool negative, SourcePos pos) {
        std::int64_t v = 0;
        auto [ptr, ec] = std::from_chars(lexeme.data(), lexeme.data() + lexeme.size(), v);
        require(ec == std::errc(), pos, "integer literal out of range");
        emit(Opcode::Const).constant = std::to_string(negative ? -v : v);
    }

    // Value context: leaves exactly one value on the stack (none for void calls).
    TypeKind value(const Expr& e) {
        switch (e.kind) {
            case ExprKind::IntLit:
                int_constant(e.text, false, e.pos);
                return TypeKind::Int;
            case ExprKind::BoolLit:
                emit(Opcode::Const).constant = e.text;
                return TypeKind::Bool;
            case ExprKind::StrLit:
                emit(Opcode::Const).constant = e.text;
                return TypeKind::Str;
            case ExprKind::Var:
                return load(e.text, e.pos);
            case ExprKind::Call:
                return call(e);
            case ExprKind::Index: {
                require(value(e.args[0]) == TypeKind::IntArray, e.pos, "indexing a non-array");
                require(value(e.args[1]) == TypeKind::Int, e.pos, "array index must be int");
                emit(Opcode::ALoadIdx);
                return TypeKind::Int;
            }
            case ExprKind::NewArray:
                require(value(e.args[0]) == TypeKind::Int, e.pos, "array size must be int");
                emit(Opcode::NewArray);
                return TypeKind::IntArray;
            case ExprKind::Unary:
                if (e.text == "-") {
                    const Expr& operand = e.args[0];
                    if (operand.kind == ExprKind::IntLit) {
                        int_constant(operand.text, true, operand.pos);
                        return TypeKind::Int;
                    }
                    require(value(operand) == TypeKind::Int, e.pos, "unary '-' needs int");
                    emit(Opcode::Neg);
                    return TypeKind::Int;
                }
                require(value(e.args[0]) == TypeKind::Bool, e.pos, "'!' needs bool");
                emit(Opcode::Not);
                return TypeKind::Bool;
            case ExprKind::Binary: {
                if (auto op = arithmetic(e.text)) {
                    require(value(e.args[0]) == TypeKind::Int, e.pos, "'" + e.text + "' needs int operands");
                    require(value(e.args[1]) == TypeKind::Int, e.pos, "'" + e.text + "' needs int operands");
                    emit(*op);
                    return TypeKind::Int;
                }
                // Comparisons and logical operators materialize a bool through branches.
                const int on_false = new_label();
                const int done = new_label();
                condition(e, on_false, false);
                emit(Opcode::Const).constant = "true";
                branch(Opcode::Goto, done);
                place_label(on_false);
                emit(Opcode::Const).constant = "false";
                place_label(done);
                return TypeKind::Bool;
            }
        }
        return TypeKind::Void;
    }

    // Branch context: jumps to `target` when the condition equals `jump_if`.
    void condition(const Expr& e, int target, bool jump_if) {
        if (e.kind == ExprKind::Unary && e.text == "!") {
            condition(e.args[0], target, !jump_if);
            return;
        }
        if (e.kind == ExprKind::Binary) {
            if (auto cmp = comparison(e.text)) {
                const TypeKind l = value(e.args[0]);
                const TypeKind r = value(e.args[1]);
                const bool ordered = *cmp != CmpOp::EQ && *cmp != CmpOp::NE;
                require(l == r && (l == TypeKind::Int || (!ordered && l == TypeKind::Bool)), e.pos,
                        "cannot compare " + type_name(l) + " with " + type_name(r) + " using '" + e.text + "'");
                ifcmp(jump_if ? *cmp : negate(*cmp), target);
                return;
            }
            if (e.text == "&&" || e.text == "||") {
                const bool is_and = e.text == "&&";
                if (is_and != jump_if) {
                    // && jumping on false, || jumping on true: both operands share the target.
                    condition(e.args[0], target, jump_if);
                    condition(e.args[1], target, jump_if);
                } else {
                    const int skip = new_label();
                    condition(e.args[0], skip, !jump_if);
                    condition(e.args[1], target, jump_if);
                    place_label(skip);
                }
                return;
            }
        }
        require(value(e) == TypeKind::Bool, e.pos, "condition must be bool");
        if (jump_if) emit(Opcode::Not);
        branch(Opcode::IfFalse, target);
    }

    void block(const Stmt& b) {
        check_reachability(b);
        env_.emplace_back();
        for (const auto& s : b.body) stmt(s);
        env_.pop_back();
    }

    void enter(const Stmt& s) {
        path_ = scopes_.at(&s);
        line_ = s.pos.line;
    }

    void stmt(const Stmt& s) {
        enter(s);
        switch (s.kind) {
            case StmtKind::VarDecl: {
                const int slot = slots_.locals.at(&s);
                if (s.has_init()) {
                    const TypeKind t = value(s.exprs.front());
                    require(t == s.decl_type, s.pos, "cannot initialize " + type_name(s.decl_type) + " '" + s.name + "' with " + type_name(t));
                    enter(s);
                    emit(Opcode::Store).slot = slot;
                }
                env_.back()[s.name] = {slot, s.decl_type};
                break;
            }
            case StmtKind::Assign:
                assignment(s);
                break;
            case StmtKind::If: {
                const int on_false = new_label();
                condition(s.cond(), on_false, false);
                block(s.body[0]);
                if (s.has_else()) {
                    const int done = new_label();
                    enter(s);
                    branch(Opcode::Goto, done);
                    place_label(on_false);
                    if (s.body[1].kind == StmtKind::Block)
                        block(s.body[1]);
                    else
                        stmt(s.body[1]);
                    enter(s);
                    place_label(done);
                } else {
                    enter(s);
                    place_label(on_false);
                }
                break;
            }
            case StmtKind::While: {
                const int top = new_label();
                const int done = new_label();
                place_label(top);
                if (!s.exprs.empty()) condition(s.cond(), done, false);
                block(s.loop_body());
                enter(s);
                branch(Opcode::Goto, top);
                place_label(done);
                break;
            }
            case StmtKind::DoWhile: {
                const int top = new_label();
                place_label(top);
                block(s.loop_body());
                enter(s);
                condition(s.cond(), top, true);
                break;
            }
            case StmtKind::Switch:
                switch_stmt(s);
                break;
            case StmtKind::Return:
                if (s.exprs.empty()) {
                    require(result_ == TypeKind::Void, s.pos, "missing return value");
                    emit(Opcode::Return);
                } else {
                    require(result_ != TypeKind::Void, s.pos, "void function returns a value");
                    const TypeKind t = value(s.value());
                    require(t == result_, s.pos, "return type mismatch");
                    emit(Opcode::RetVal);
                }
                break;
            case StmtKind::ExprStmt: {
                const TypeKind t = value(s.exprs.front());
                require(t == TypeKind::Void, s.pos, "result of call to '" + s.exprs.front().text + "' is discarded");
                break;
            }
            case StmtKind::Block:
                block(s);
                break;
            case StmtKind::For:
                throw CompileError(s.pos, "for loop was not desugared");
        }
    }

    void assignment(const Stmt& s) {
        const bool compound = s.op != "=";
        const std::string op = compound ? s.op.substr(0, 1) : std::string();
        if (s.indexed) {
            const Expr& index = s.exprs.front();
            require(load(s.name, s.pos) == TypeKind::IntArray, s.pos, "indexing a non-array");
            require(value(index) == TypeKind::Int, s.pos, "array index must be int");
            if (compound) {
                load(s.name, s.pos);
                value(index);
                emit(Opcode::ALoadIdx);
            }
            require(value(s.value()) == TypeKind::Int, s.pos, "array element must be int");
            if (compound) emit(*arithmetic(op));
            emit(Opcode::AStoreIdx);
            return;
        }
        const TypeKind target = store_type(s.name, s.pos);
        if (compound) {
            require(target == TypeKind::Int, s.pos, "compound assignment needs int");
            load(s.name, s.pos);
        }
        const TypeKind t = value(s.value());
        require(t == target, s.pos, "cannot assign " + type_name(t) + " to " + type_name(target) + " '" + s.name + "'");
        if (compound) emit(*arithmetic(op));
        store(s.name);
    }

    void switch_stmt(const Stmt& s) {
        require(value(s.cond()) == TypeKind::Int, s.pos, "switch selector must be int");
        std::vector<int> arm_labels;
        for (std::size_t i = 0; i < s.arms.size(); ++i) arm_labels.push_back(new_label());
        const int done = new_label();
        const bool has_default = s.arms.back().is_default;

        LowToken& sw = emit(Opcode::Switch);
        for (const auto& arm : s.arms)
            if (!arm.is_default) sw.switch_keys.push_back(arm.value);
        sw.switch_default = has_default;
        sw.switch_targets = arm_labels;
        if (!has_default) sw.switch_targets.push_back(done);

        for (std::size_t i = 0; i < s.arms.size(); ++i) {
            enter(s);
            place_label(arm_labels[i]);
            block(s.arms[i].block);
            if (!s.arms[i].is_default) {
                enter(s);
                branch(Opcode::Goto, done);
            }
        }
        enter(s);
        place_label(done);
    }

    const std::map<std::string, FunctionInfo>& functions_;
    const std::map<std::string, GlobalInfo>& globals_;
    const std::vector<std::string>& function_names_;

    ScopeMap scopes_;
    SlotMap slots_;
    TypeKind result_ = TypeKind::Void;
    std::vector<std::map<std::string, Local>> env_;
    ScopePath path_;
    int line_ = 0;
    int next_label_ = 0;
    std::vector<LowToken> body_;
};

}  // namespace

void renumber_labels(std::vector<LowToken>& body) {
    std::map<int, int> referenced;
    for (const auto& t : body) {
        if (t.op == Opcode::IfCmp || t.op == Opcode::IfFalse || t.op == Opcode::Goto) referenced[t.label];
        for (int l : t.switch_targets) referenced[l];
    }
    std::vector<LowToken> kept;
    kept.reserve(body.size());
    std::map<int, int> renamed;
    for (auto& t : body) {
        if (t.op == Opcode::Label) {
            if (!referenced.count(t.label)) continue;
            const int fresh = static_cast<int>(renamed.size());
            renamed[t.label] = fresh;
        }
        kept.push_back(std::move(t));
    }
    auto map = [&](int l) {
        auto it = renamed.find(l);
        return it == renamed.end() ? l : it->second;
    };
    for (auto& t : kept) {
        if (t.label != kNoLabel) t.label = map(t.label);
        for (int& l : t.switch_targets) l = map(l);
    }
    body = std::move(kept);
}

LowProgram compile(const Ast& ast) {
    std::map<std::string, FunctionInfo> functions;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < ast.functions.size(); ++i) {
        const auto& f = ast.functions[i];
        FunctionInfo info;
        info.id = static_cast<int>(i);
        for (const auto& p : f.params) {
            if (p.type == TypeKind::Void) throw CompileError(p.pos, "void parameter");
            info.params.push_back(p.type);
        }
        info.result = f.return_type;
        functions[f.name] = info;
        names.push_back(f.name);
    }
    std::map<std::string, GlobalInfo> globals;
    for (std::size_t i = 0; i < ast.globals.size(); ++i)
        globals[ast.globals[i].name] = {static_cast<int>(i), ast.globals[i].type};

    LowProgram program;
    for (std::size_t i = 0; i < ast.functions.size(); ++i) {
        FunctionCompiler fc(functions, globals, names);
        program.functions.push_back(fc.compile(ast.functions[i], static_cast<int>(i)));
        if (ast.functions[i].name == "main") program.entry = static_cast<int>(i);
    }

    bool any_init = false;
    for (const auto& g : ast.globals) any_init = any_init || !g.init.empty();
    if (any_init) {
        FunctionCompiler fc(functions, globals, names);
        for (const auto& g : ast.globals) {
            if (!g.init.empty()) fc.global_init(g, globals.at(g.name));
        }
        LowFunction init;
        init.id = static_cast<int>(program.functions.size());
        init.name = kInitFunction;
        init.body = fc.take_body();
        LowToken ret;
        ret.op = Opcode::Return;
        ret.scope = {ScopeTag::FunctionRoot};
        init.body.push_back(ret);
        renumber_labels(init.body);
        program.functions.push_back(std::move(init));
    }
    return program;
}

}  // namespace codesim
